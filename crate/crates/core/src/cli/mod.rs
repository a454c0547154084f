//! Command-line front end. Every subcommand resolves a [`RunConfig`] from an
//! optional TOML file plus flag overrides (flags win), hashes it, and embeds
//! the hash and seed in everything it writes.

mod config;

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use config::{
    config_hash, EngineConfig, RepeatersConfig, RunConfig, SweepConfig, ThresholdConfig,
    TopologyConfig,
};

use crate::analysis::{
    aggregate, coherence_time, complexity_f, find_threshold, interpolate_f, log_grid,
    min_d0_on_grid, sweep_connectivity, worst_case_n, write_aggregate_csv, write_curve_csv,
    Interpolation, SweepSpec, ThresholdEstimate,
};
use crate::engine::{percolate, run_ordered, EngineKind, MergePolicy, ReductionMode, RuleCounts};
use crate::error::{validation, Error, Result};
use crate::params::{ModelParams, Scenario};
use crate::quantum::{
    bbpssw_fidelity, bbpssw_success, channel_p, component_range, fidelity_of_p, nested_distill,
    ChannelModel, DistillationParams, RangeMode,
};
use crate::topology::{
    generate_uniform_points, insert_repeaters, load_edge_list, load_edge_list_with_nodes,
    synthetic_fiber, EdgeListNetwork, FiberSpec, Network, PointCloud, RepeaterConfig,
    SpatialNetwork,
};

#[derive(Debug, Parser)]
#[command(name = "alpha-perc", version, about = "Alpha-percolation of quantum networks with distributed memories")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps and threshold searches.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a uniform point cloud or a synthetic fiber network.
    #[command(subcommand)]
    Generate(Generate),
    /// Load an edge list, canonicalize it and export CSV and JSON.
    Ingest(IngestArgs),
    /// Cut every cable of an edge list at Poisson-distributed repeaters.
    Repeaters(RepeatersArgs),
    /// Run the percolation engine once and export the report.
    Run(RunArgs),
    /// Giant-fraction curves over d0 for the memory scenarios.
    Sweep(SweepArgs),
    /// Threshold base range on uniform clouds, one estimate per alpha.
    Threshold(ThresholdArgs),
    /// Channel and distillation formulas.
    #[command(subcommand)]
    Distill(Distill),
    /// Remote distillation rounds and memory coherence time.
    Complexity(ComplexityArgs),
}

#[derive(Debug, Subcommand)]
enum Generate {
    /// Uniform points in a square box, written as `points.csv`.
    Points {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        box_side: Option<f64>,
    },
    /// Planar backbone plus repeaters, written as `fiber_edges.csv`,
    /// `fiber_nodes.csv` and `fiber.json`.
    Fiber {
        /// Final node count including repeaters.
        #[arg(long)]
        nodes: Option<usize>,
        /// Final link count.
        #[arg(long)]
        edges: Option<usize>,
        #[arg(long)]
        mean_cable_km: Option<f64>,
        #[arg(long)]
        mean_segment_km: Option<f64>,
    },
}

#[derive(Debug, Args)]
struct EdgeFiles {
    /// Edge-list CSV (`u,v,length_km`).
    #[arg(long, value_name = "PATH")]
    edges: Option<PathBuf>,
    /// Companion node table (`id,kind,x,y`).
    #[arg(long, value_name = "PATH")]
    nodes: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct IngestArgs {
    #[command(flatten)]
    files: EdgeFiles,
}

#[derive(Debug, Args)]
struct RepeatersArgs {
    #[command(flatten)]
    files: EdgeFiles,
    #[arg(long)]
    mean_segment_km: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Asymptotic,
    Exact,
}

impl From<ModeArg> for RangeMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Asymptotic => RangeMode::Asymptotic,
            ModeArg::Exact => RangeMode::Exact,
        }
    }
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Decoherence length, km.
    #[arg(long)]
    d0: Option<f64>,
    /// Memories per node.
    #[arg(long, visible_alias = "m")]
    memories: Option<u32>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long, value_enum)]
    range_mode: Option<ModeArg>,
    /// Disable the sudden-death cap on ranges.
    #[arg(long)]
    no_beta_cap: bool,
}

#[derive(Debug, Args)]
struct TopologyArgs {
    /// Point-cloud CSV (`id,x,y`).
    #[arg(long, value_name = "PATH", conflicts_with_all = ["edges", "fiber"])]
    points: Option<PathBuf>,
    #[command(flatten)]
    files: EdgeFiles,
    /// Use the synthetic fiber network instead of a generated cloud.
    #[arg(long, conflicts_with = "edges")]
    fiber: bool,
    /// Size of the generated cloud.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    box_side: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScenarioArg {
    NoMemory,
    PointToPoint,
    Distributed,
}

impl From<ScenarioArg> for Scenario {
    fn from(s: ScenarioArg) -> Self {
        match s {
            ScenarioArg::NoMemory => Scenario::NoMemory,
            ScenarioArg::PointToPoint => Scenario::PointToPoint,
            ScenarioArg::Distributed => Scenario::Distributed,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EngineArg {
    Shortcuts,
    ShortestPath,
    RangeOrdered,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    topology: TopologyArgs,
    #[arg(long, value_enum)]
    scenario: Option<ScenarioArg>,
    #[arg(long, value_enum)]
    engine: Option<EngineArg>,
    /// Pick applicable rules at random with this seed.
    #[arg(long)]
    policy_seed: Option<u64>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    topology: TopologyArgs,
    /// Scenario to include; repeatable. Defaults to all three.
    #[arg(long = "scenario", value_enum)]
    scenarios: Vec<ScenarioArg>,
    /// Explicit d0 value, km; repeatable.
    #[arg(long = "d0-value")]
    d0_values: Vec<f64>,
    #[arg(long)]
    d0_min: Option<f64>,
    #[arg(long)]
    d0_max: Option<f64>,
    #[arg(long)]
    d0_points: Option<usize>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    target: Option<f64>,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    /// Exponent to estimate; repeatable.
    #[arg(long = "alpha")]
    alphas: Vec<f64>,
    /// Points per cloud.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    target: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    low: Option<f64>,
    #[arg(long)]
    high: Option<f64>,
    #[arg(long)]
    resamples: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Distill {
    /// BBPSSW success probability.
    Success {
        #[arg(long)]
        f: f64,
    },
    /// BBPSSW output fidelity.
    Fidelity {
        #[arg(long)]
        f: f64,
    },
    /// Fidelity after distilling `n` pairs down to one.
    Nested {
        #[arg(long)]
        f: f64,
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value = "asymptotic")]
        mode: ModeArg,
    },
    /// Werner weight and fidelity after distance `d`.
    Channel {
        #[arg(long)]
        d: f64,
        #[arg(long)]
        d0: Option<f64>,
    },
    /// Range of a component of `size` nodes.
    Range {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1)]
        size: u64,
    },
}

#[derive(Debug, Args)]
struct ComplexityArgs {
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    /// Pair count to evaluate; repeatable.
    #[arg(long = "n")]
    n: Vec<f64>,
    /// Interpolate between halving points instead of evaluating directly.
    #[arg(long, value_enum)]
    interpolate: Option<InterpArg>,
    /// Worst-case link length, km; derives the pair count.
    #[arg(long)]
    d_worst: Option<f64>,
    #[arg(long)]
    d0: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Detection rate, Hz; adds the coherence time.
    #[arg(long)]
    rate: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InterpArg {
    Geometric,
    LogLog,
}

/// Parses `args`, runs the command and returns the process exit code:
/// 0 on success, 1 on runtime failure, 2 on invalid input.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                2
            } else {
                1
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let out_given = cli.out.is_some();
    set(&mut cfg.seed, cli.seed);
    set(&mut cfg.jobs, cli.jobs);
    set(&mut cfg.out, cli.out);
    match cli.command {
        Command::Generate(g) => cmd_generate(cfg, g),
        Command::Ingest(a) => cmd_ingest(cfg, a),
        Command::Repeaters(a) => cmd_repeaters(cfg, a),
        Command::Run(a) => cmd_run(cfg, a),
        Command::Sweep(a) => cmd_sweep(cfg, a),
        Command::Threshold(a) => cmd_threshold(cfg, a),
        Command::Distill(d) => cmd_distill(cfg, d, out_given),
        Command::Complexity(a) => cmd_complexity(cfg, a, out_given),
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

/// Provenance stamp for one command invocation.
struct Stamp {
    hash: String,
    seed: u64,
}

impl Stamp {
    /// Hashes the command name and the resolved config. The output
    /// directory and worker count do not change results and are left out.
    fn new(command: &str, cfg: &RunConfig) -> Result<Self> {
        let mut c = cfg.clone();
        c.out = PathBuf::new();
        c.jobs = 0;
        Ok(Stamp {
            hash: config_hash(&(command, &c))?,
            seed: cfg.seed,
        })
    }

    fn comment(&self) -> String {
        format!("config_hash={} seed={}", self.hash, self.seed)
    }
}

#[derive(Serialize)]
struct Stamped<'a, T: Serialize> {
    config_hash: &'a str,
    seed: u64,
    #[serde(flatten)]
    body: T,
}

fn stamped<T: Serialize>(stamp: &Stamp, body: T) -> Result<String> {
    let v = Stamped {
        config_hash: &stamp.hash,
        seed: stamp.seed,
        body,
    };
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

fn out_dir(cfg: &RunConfig) -> Result<&Path> {
    fs::create_dir_all(&cfg.out)?;
    Ok(&cfg.out)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn cmd_generate(mut cfg: RunConfig, g: Generate) -> Result<()> {
    match g {
        Generate::Points { n, box_side } => {
            set(&mut cfg.topology.n, n);
            set(&mut cfg.topology.box_side, box_side);
            let stamp = Stamp::new("generate points", &cfg)?;
            let cloud = generate_uniform_points(cfg.topology.n, cfg.topology.box_side, cfg.seed)?;
            let path = out_dir(&cfg)?.join("points.csv");
            let mut w = create(&path)?;
            cloud.write_csv(&mut w, Some(&stamp.comment()))?;
            w.flush()?;
            println!("wrote {} points to {}", cloud.len(), path.display());
        }
        Generate::Fiber {
            nodes,
            edges,
            mean_cable_km,
            mean_segment_km,
        } => {
            let f = &mut cfg.topology.fiber;
            set(&mut f.nodes, nodes);
            set(&mut f.links, edges);
            set(&mut f.mean_cable_km, mean_cable_km);
            set(&mut f.mean_segment_km, mean_segment_km);
            f.seed = cfg.seed;
            let stamp = Stamp::new("generate fiber", &cfg)?;
            let net = synthetic_fiber(&cfg.topology.fiber)?;
            let dir = out_dir(&cfg)?;
            net.save(dir, "fiber", Some(&stamp.comment()))?;
            fs::write(dir.join("fiber.json"), stamped(&stamp, net.to_json())?)?;
            print_summary(&net);
        }
    }
    Ok(())
}

fn print_summary(net: &EdgeListNetwork) {
    println!(
        "nodes={} edges={} repeaters={} components={} total_km={:.3} mean_edge_km={:.3}",
        net.node_count(),
        net.edge_count(),
        net.repeater_count(),
        net.classical_components(),
        net.total_length(),
        if net.edge_count() > 0 { net.total_length() / net.edge_count() as f64 } else { 0.0 },
    );
}

fn edge_files(cfg: &mut RunConfig, files: EdgeFiles) -> Result<EdgeListNetwork> {
    set(&mut cfg.topology.edges, files.edges.map(Some));
    set(&mut cfg.topology.nodes, files.nodes.map(Some));
    let edges = cfg
        .topology
        .edges
        .clone()
        .ok_or_else(|| validation("an edge list is required (--edges)"))?;
    match &cfg.topology.nodes {
        Some(nodes) => load_edge_list_with_nodes(&edges, nodes),
        None => load_edge_list(&edges),
    }
}

fn cmd_ingest(mut cfg: RunConfig, a: IngestArgs) -> Result<()> {
    let net = edge_files(&mut cfg, a.files)?.canonicalize();
    let stamp = Stamp::new("ingest", &cfg)?;
    let dir = out_dir(&cfg)?;
    net.save(dir, "network", Some(&stamp.comment()))?;
    fs::write(dir.join("network.json"), stamped(&stamp, net.to_json())?)?;
    print_summary(&net);
    Ok(())
}

fn cmd_repeaters(mut cfg: RunConfig, a: RepeatersArgs) -> Result<()> {
    set(&mut cfg.repeaters.mean_segment_km, a.mean_segment_km);
    let net = edge_files(&mut cfg, a.files)?;
    let stamp = Stamp::new("repeaters", &cfg)?;
    let out = insert_repeaters(
        &net,
        &RepeaterConfig {
            mean_segment_km: cfg.repeaters.mean_segment_km,
            seed: cfg.seed,
        },
    )?;
    let dir = out_dir(&cfg)?;
    out.save(dir, "repeated", Some(&stamp.comment()))?;
    fs::write(dir.join("repeated.json"), stamped(&stamp, out.to_json())?)?;
    print_summary(&out);
    Ok(())
}

fn apply_model(cfg: &mut RunConfig, m: ModelArgs) -> Result<()> {
    let p = &mut cfg.model;
    set(&mut p.alpha, m.alpha);
    set(&mut p.epsilon, m.epsilon);
    set(&mut p.d0, m.d0);
    set(&mut p.memories, m.memories);
    set(&mut p.eta, m.eta);
    set(&mut p.range_mode, m.range_mode.map(Into::into));
    if m.no_beta_cap {
        p.beta_cap = false;
    }
    p.validate()
}

fn apply_topology(cfg: &mut RunConfig, t: TopologyArgs, fiber: &mut bool) {
    let topo = &mut cfg.topology;
    if t.points.is_some() || t.files.edges.is_some() {
        topo.points = None;
        topo.edges = None;
        topo.nodes = None;
    }
    set(&mut topo.points, t.points.map(Some));
    set(&mut topo.edges, t.files.edges.map(Some));
    set(&mut topo.nodes, t.files.nodes.map(Some));
    set(&mut topo.n, t.n);
    set(&mut topo.box_side, t.box_side);
    *fiber = t.fiber;
}

/// Network for replicate `seed`: a file when configured, otherwise a
/// generated cloud or synthetic fiber seeded by `seed`.
fn network(topo: &TopologyConfig, fiber: bool, seed: u64) -> Result<Network> {
    Ok(match (&topo.points, &topo.edges) {
        (Some(_), Some(_)) => return Err(validation("give either --points or --edges, not both")),
        (Some(p), None) => PointCloud::load_csv(p)?.into(),
        (None, Some(e)) => match &topo.nodes {
            Some(n) => load_edge_list_with_nodes(e, n)?.into(),
            None => load_edge_list(e)?.into(),
        },
        (None, None) if fiber => synthetic_fiber(&FiberSpec { seed, ..topo.fiber })?.into(),
        (None, None) => generate_uniform_points(topo.n, topo.box_side, seed)?.into(),
    })
}

#[derive(Serialize)]
struct ReportJson<'a> {
    engine: EngineKind,
    scenario: Scenario,
    node_count: usize,
    params: &'a ModelParams,
    base_range: f64,
    giant_fraction: f64,
    blocks: usize,
    counts: RuleCounts,
    partition: Vec<Vec<String>>,
}

fn cmd_run(mut cfg: RunConfig, a: RunArgs) -> Result<()> {
    apply_model(&mut cfg, a.model)?;
    let mut fiber = false;
    apply_topology(&mut cfg, a.topology, &mut fiber);
    set(&mut cfg.scenario, a.scenario.map(Into::into));
    set(
        &mut cfg.engine.reduction,
        a.engine.map(|e| match e {
            EngineArg::Shortcuts => EngineKind::Shortcuts,
            EngineArg::ShortestPath => EngineKind::ShortestPath,
            EngineArg::RangeOrdered => EngineKind::RangeOrdered,
        }),
    );
    set(&mut cfg.engine.policy, a.policy_seed.map(MergePolicy::Seeded));
    let stamp = Stamp::new(if fiber { "run fiber" } else { "run" }, &cfg)?;

    let net = network(&cfg.topology, fiber, cfg.seed)?;
    let report = match cfg.engine.reduction {
        EngineKind::RangeOrdered => run_ordered(&net, &cfg.model, cfg.scenario)?,
        EngineKind::Shortcuts => percolate(&net, &cfg.model, cfg.scenario, ReductionMode::Shortcuts, cfg.engine.policy)?,
        EngineKind::ShortestPath => {
            percolate(&net, &cfg.model, cfg.scenario, ReductionMode::ShortestPath, cfg.engine.policy)?
        }
    };
    report.verify().map_err(|e| Error::Usage(format!("run failed its audit: {e}")))?;

    let labels = report.partition.with_labels(&net);
    let dir = out_dir(&cfg)?;
    let body = ReportJson {
        engine: report.engine,
        scenario: report.scenario,
        node_count: report.node_count,
        params: &report.params,
        base_range: report.base_range,
        giant_fraction: report.giant_fraction,
        blocks: report.partition.len(),
        counts: report.counts,
        partition: labels.clone(),
    };
    fs::write(dir.join("report.json"), stamped(&stamp, body)?)?;
    fs::write(dir.join("partition.json"), serde_json::to_string_pretty(&labels)? + "\n")?;

    #[derive(Serialize)]
    struct Events<'a> {
        events: &'a [crate::engine::Event],
    }
    fs::write(dir.join("events.json"), stamped(&stamp, Events { events: &report.events })?)?;
    println!(
        "p_inf={} blocks={} merges={} reductions={} hopping_merges={}",
        report.giant_fraction,
        report.partition.len(),
        report.counts.merges,
        report.counts.reductions,
        report.counts.hopping_merges
    );
    Ok(())
}

fn cmd_sweep(mut cfg: RunConfig, a: SweepArgs) -> Result<()> {
    apply_model(&mut cfg, a.model)?;
    let mut fiber = false;
    apply_topology(&mut cfg, a.topology, &mut fiber);
    let s = &mut cfg.sweep;
    if !a.scenarios.is_empty() {
        s.scenarios = a.scenarios.into_iter().map(Into::into).collect();
    }
    if !a.d0_values.is_empty() {
        s.d0 = Some(a.d0_values);
    }
    set(&mut s.d0_min, a.d0_min);
    set(&mut s.d0_max, a.d0_max);
    set(&mut s.d0_points, a.d0_points);
    set(&mut s.replicates, a.replicates);
    set(&mut s.target, a.target);
    if s.replicates < 1 {
        return Err(validation("at least one replicate is required"));
    }
    let spec = SweepSpec {
        d0_grid: s
            .d0
            .clone()
            .unwrap_or_else(|| log_grid(s.d0_min, s.d0_max, s.d0_points)),
        scenarios: s.scenarios.clone(),
        seeds: (0..s.replicates as u64).map(|k| cfg.seed + k).collect(),
        target: s.target,
    };
    spec.validate()?;
    let stamp = Stamp::new(if fiber { "sweep fiber" } else { "sweep" }, &cfg)?;
    let topo = cfg.topology.clone();
    let curve = sweep_connectivity(|seed| network(&topo, fiber, seed), &cfg.model, &spec, cfg.jobs)?;
    let agg = aggregate(&curve);
    let dir = out_dir(&cfg)?;
    let comment = stamp.comment();
    write_curve_csv(create(&dir.join("curve.csv"))?, &curve, Some(&comment))?;
    write_aggregate_csv(create(&dir.join("aggregate.csv"))?, &agg, Some(&comment))?;
    for &sc in &spec.scenarios {
        match min_d0_on_grid(&agg, sc, spec.target) {
            Some(d) => println!("{sc}: min d0 on grid with mean p_inf >= {} is {d:.1} km", spec.target),
            None => println!("{sc}: mean p_inf stays below {} on the grid", spec.target),
        }
    }
    Ok(())
}

fn cmd_threshold(mut cfg: RunConfig, a: ThresholdArgs) -> Result<()> {
    let t = &mut cfg.threshold;
    if !a.alphas.is_empty() {
        t.alphas = a.alphas;
    }
    set(&mut t.spec.points, a.n);
    set(&mut t.spec.replicates, a.replicates);
    set(&mut t.spec.target, a.target);
    set(&mut t.spec.tol, a.tol);
    set(&mut t.spec.bracket.0, a.low);
    set(&mut t.spec.bracket.1, a.high);
    set(&mut t.spec.resamples, a.resamples);
    t.spec.seed = cfg.seed;
    t.spec.validate()?;
    let stamp = Stamp::new("threshold", &cfg)?;
    let mut estimates: Vec<ThresholdEstimate> = Vec::new();
    for &alpha in &cfg.threshold.alphas {
        let params = cfg.model.with_alpha(alpha);
        let e = find_threshold(&params, &cfg.threshold.spec, cfg.jobs)?;
        println!(
            "alpha={} r0_th={:.6} ci=[{:.6}, {:.6}] replicates={}",
            e.alpha, e.r0_th, e.ci_low, e.ci_high, e.replicates
        );
        estimates.push(e);
    }
    #[derive(Serialize)]
    struct Body<'a> {
        estimates: &'a [ThresholdEstimate],
    }
    let dir = out_dir(&cfg)?;
    fs::write(dir.join("threshold.json"), stamped(&stamp, Body { estimates: &estimates })?)?;

    // Larger alpha must not raise the threshold.
    let mut sorted: Vec<&ThresholdEstimate> = estimates.iter().collect();
    sorted.sort_by(|x, y| x.alpha.total_cmp(&y.alpha));
    for w in sorted.windows(2) {
        if w[1].alpha > w[0].alpha && !(w[1].r0_th < w[0].r0_th) {
            return Err(Error::Usage(format!(
                "threshold did not decrease from alpha={} to alpha={}",
                w[0].alpha, w[1].alpha
            )));
        }
    }
    Ok(())
}

fn emit(cfg: &RunConfig, stamp: &Stamp, name: &str, body: impl Serialize, to_file: bool) -> Result<()> {
    let text = stamped(stamp, body)?;
    print!("{text}");
    if to_file {
        fs::write(out_dir(cfg)?.join(name), text)?;
    }
    Ok(())
}

fn cmd_distill(mut cfg: RunConfig, d: Distill, to_file: bool) -> Result<()> {
    #[derive(Serialize)]
    struct Value<'a> {
        quantity: &'a str,
        input: serde_json::Value,
        value: f64,
    }
    let (quantity, input, value) = match d {
        Distill::Success { f } => ("bbpssw_success", serde_json::json!({ "f": f }), bbpssw_success(f)?),
        Distill::Fidelity { f } => ("bbpssw_fidelity", serde_json::json!({ "f": f }), bbpssw_fidelity(f)?),
        Distill::Nested { f, n, mode } => {
            let mode = RangeMode::from(mode);
            (
                "nested_distill",
                serde_json::json!({ "f": f, "n": n, "mode": mode }),
                nested_distill(f, n, mode)?,
            )
        }
        Distill::Channel { d, d0 } => {
            set(&mut cfg.model.d0, d0);
            let ch = ChannelModel::new(cfg.model.d0, cfg.model.epsilon)?;
            let p = channel_p(d, &ch)?;
            (
                "channel_fidelity",
                serde_json::json!({ "d": d, "d0": ch.d0, "p": p }),
                fidelity_of_p(p)?,
            )
        }
        Distill::Range { model, size } => {
            apply_model(&mut cfg, model)?;
            let p = &cfg.model;
            let ch = ChannelModel::new(p.d0, p.epsilon)?;
            let dp = DistillationParams::new(p.memories, p.alpha, p.eta)?;
            (
                "component_range",
                serde_json::json!({ "size": size, "params": p }),
                component_range(size, &ch, &dp, p.range_mode, p.beta_cap)?,
            )
        }
    };
    let stamp = Stamp::new(&format!("distill {quantity} {input}"), &cfg)?;
    emit(&cfg, &stamp, "distill.json", Value { quantity, input, value }, to_file)
}

fn cmd_complexity(mut cfg: RunConfig, a: ComplexityArgs, to_file: bool) -> Result<()> {
    let cp = &mut cfg.complexity;
    set(&mut cp.memories, a.m);
    set(&mut cp.p, a.p);
    set(&mut cp.eta, a.eta);
    cp.validate()?;
    let cp = cfg.complexity;
    set(&mut cfg.model.d0, a.d0);
    set(&mut cfg.model.epsilon, a.epsilon);
    set(&mut cfg.model.alpha, a.alpha);

    let mut ns = a.n.clone();
    let mut worst = None;
    if let Some(d_worst) = a.d_worst {
        let m = &cfg.model;
        let n = worst_case_n(m.epsilon, d_worst, m.d0, m.alpha)?;
        worst = Some(n);
        ns.push(n as f64);
    }
    if ns.is_empty() {
        return Err(validation("give at least one --n or a --d-worst"));
    }
    let how = a.interpolate.map(|i| match i {
        InterpArg::Geometric => Interpolation::BracketGeometricMean,
        InterpArg::LogLog => Interpolation::LogLog,
    });

    #[derive(Serialize)]
    struct Row {
        n: f64,
        f: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        coherence_s: Option<f64>,
    }
    let rows = ns
        .iter()
        .map(|&n| {
            let f = match how {
                Some(how) => interpolate_f(n, &cp, how)?,
                None => complexity_f(n, &cp)?,
            };
            let coherence_s = a.rate.map(|r| coherence_time(f, r)).transpose()?;
            Ok(Row { n, f, coherence_s })
        })
        .collect::<Result<Vec<_>>>()?;

    #[derive(Serialize)]
    struct Body {
        params: crate::analysis::ComplexityParams,
        #[serde(skip_serializing_if = "Option::is_none")]
        interpolation: Option<Interpolation>,
        #[serde(skip_serializing_if = "Option::is_none")]
        worst_case_n: Option<u64>,
        results: Vec<Row>,
    }
    let stamp = Stamp::new(&format!("complexity {ns:?} {how:?} {:?}", a.rate), &cfg)?;
    emit(
        &cfg,
        &stamp,
        "complexity.json",
        Body {
            params: cp,
            interpolation: how,
            worst_case_n: worst,
            results: rows,
        },
        to_file,
    )
}
