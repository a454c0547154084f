//! Independent reference implementations and instance generators shared by
//! the integration tests. Nothing here calls into the engine.

#![allow(dead_code)]

use alpha_perc::params::ModelParams;
use alpha_perc::topology::{EdgeListNetwork, Network, NodeKind, PointCloud, SpatialNetwork};
use rand::Rng;

/// Dense distance matrix, `INFINITY` where no channel exists.
pub fn matrix(net: &dyn SpatialNetwork) -> Vec<Vec<f64>> {
    let n = net.node_count();
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0.0 } else { net.distance(i, j) }).collect())
        .collect()
}

/// Blocks sorted internally and by first member.
pub fn canonical(mut blocks: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    blocks.retain(|b| !b.is_empty());
    for b in &mut blocks {
        b.sort_unstable();
    }
    blocks.sort_unstable_by_key(|b| b[0]);
    blocks
}

/// Connected components of the graph with an edge wherever `d_ij < r0`.
pub fn disk_components(d: &[Vec<f64>], r0: f64) -> Vec<Vec<usize>> {
    let n = d.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if d[i][j] < r0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut blocks = vec![Vec::new(); n];
    for i in 0..n {
        let r = find(&mut parent, i);
        blocks[r].push(i);
    }
    canonical(blocks)
}

/// Range of an `s`-node component, written out from the asymptotic law
/// without the library: `min(beta, 4/3 eps (m s)^(eta alpha) d0)`.
pub fn oracle_range(p: &ModelParams, s: usize) -> f64 {
    let r = 4.0 / 3.0 * p.epsilon * (f64::from(p.memories) * s as f64).powf(p.eta * p.alpha) * p.d0;
    if p.beta_cap {
        r.min(p.d0 * 3f64.ln())
    } else {
        r
    }
}

/// Outcome of the brute-force run.
pub struct Brute {
    pub blocks: Vec<Vec<usize>>,
    /// Merges whose pair had no direct member link below the criterion.
    pub hopping: usize,
}

/// Alpha-percolation from scratch: each step recomputes every effective
/// distance as a shortest path whose interior nodes all belong to removed
/// components (free to cross inside one), merges the first connecting pair,
/// or else removes the smallest-range component after checking isolation.
pub fn brute_force(d: &[Vec<f64>], p: &ModelParams) -> Brute {
    let n = d.len();
    let mut comp: Vec<usize> = (0..n).collect();
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut active = vec![true; n];
    let mut removed_node = vec![false; n];
    let mut blocks = Vec::new();
    let mut hopping = 0;
    loop {
        let live: Vec<usize> = (0..members.len()).filter(|&c| active[c]).collect();
        if live.is_empty() {
            break;
        }
        let mut sp = d.to_vec();
        for i in 0..n {
            for j in 0..n {
                if removed_node[i] && removed_node[j] && comp[i] == comp[j] {
                    sp[i][j] = 0.0;
                }
            }
        }
        for k in (0..n).filter(|&k| removed_node[k]) {
            for i in 0..n {
                for j in 0..n {
                    let via = sp[i][k] + sp[k][j];
                    if via < sp[i][j] {
                        sp[i][j] = via;
                    }
                }
            }
        }
        let between = |a: usize, b: usize, m: &Vec<Vec<f64>>| {
            let mut best = f64::INFINITY;
            for &i in &members[a] {
                for &j in &members[b] {
                    best = best.min(m[i][j]);
                }
            }
            best
        };
        let range = |c: usize| oracle_range(p, members[c].len());
        let mut pair = None;
        'outer: for (x, &a) in live.iter().enumerate() {
            for &b in &live[x + 1..] {
                if between(a, b, &sp) < range(a).min(range(b)) {
                    pair = Some((a, b));
                    break 'outer;
                }
            }
        }
        match pair {
            Some((a, b)) => {
                if !(between(a, b, &d.to_vec()) < range(a).min(range(b))) {
                    hopping += 1;
                }
                let id = members.len();
                let mut m = std::mem::take(&mut members[a]);
                m.extend(std::mem::take(&mut members[b]));
                for &i in &m {
                    comp[i] = id;
                }
                members.push(m);
                active[a] = false;
                active[b] = false;
                active.push(true);
            }
            None => {
                let c = *live
                    .iter()
                    .min_by(|&&x, &&y| range(x).total_cmp(&range(y)))
                    .unwrap();
                assert!(live.iter().all(|&b| b == c || between(c, b, &sp) >= range(c)));
                for &i in &members[c] {
                    removed_node[i] = true;
                }
                blocks.push(members[c].clone());
                active[c] = false;
            }
        }
    }
    Brute {
        blocks: canonical(blocks),
        hopping,
    }
}

/// Random instance: a uniform cloud or a sparse edge list with random
/// lengths, plus parameters that put the base range near the interesting
/// regime for that instance.
pub fn random_instance(rng: &mut impl Rng, max_n: usize, alpha: f64) -> (Network, ModelParams) {
    let n = rng.random_range(1..=max_n);
    let base = ModelParams {
        alpha,
        beta_cap: rng.random_bool(0.5),
        d0: 1.0,
        ..ModelParams::default()
    };
    if rng.random_bool(0.5) {
        let pts: Vec<[f64; 2]> = (0..n).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect();
        let cloud = PointCloud::new(pts, 1.0).unwrap();
        let r0 = rng.random_range(0.03..0.35);
        let p = base.with_epsilon(base.epsilon_for_base_range(r0));
        (cloud.into(), p)
    } else {
        let mut net = EdgeListNetwork::new();
        for i in 0..n {
            net.add_node(&format!("n{i:02}"), NodeKind::Station, None);
        }
        let density = rng.random_range(0.05..0.4);
        for i in 0..n {
            for j in i + 1..n {
                if rng.random_bool(density) {
                    net.add_edge(i, j, rng.random_range(0.05..1.5)).unwrap();
                }
            }
        }
        let r0 = rng.random_range(0.2..0.9);
        let p = base.with_epsilon(base.epsilon_for_base_range(r0));
        (net.into(), p)
    }
}
