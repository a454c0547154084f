use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;
use serde::Deserialize;

use super::{NetworkJson, NodeJson, NodeKind, SpatialNetwork};
use crate::error::{domain, usage, validation, Error, Result};
use crate::seed::{self, Stream};

/// Points in the plane with a uniform-grid index for radius queries.
#[derive(Debug, Clone)]
pub struct PointCloud {
    ids: Vec<String>,
    positions: Vec<[f64; 2]>,
    box_side: f64,
    seed: Option<u64>,
    grid: Grid,
}

impl PointCloud {
    /// Builds a cloud; ids default to the point index.
    pub fn new(positions: Vec<[f64; 2]>, box_side: f64) -> Result<Self> {
        let ids = (0..positions.len()).map(|i| i.to_string()).collect();
        Self::with_ids(ids, positions, box_side)
    }

    pub fn with_ids(ids: Vec<String>, positions: Vec<[f64; 2]>, box_side: f64) -> Result<Self> {
        if positions.is_empty() {
            return Err(validation("a point cloud needs at least one point"));
        }
        if ids.len() != positions.len() {
            return Err(validation("one id per point is required"));
        }
        if positions.iter().flatten().any(|c| !c.is_finite()) {
            return Err(validation("coordinates must be finite"));
        }
        let grid = Grid::build(&positions);
        Ok(PointCloud {
            ids,
            positions,
            box_side,
            seed: None,
            grid,
        })
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.positions
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn box_side(&self) -> f64 {
        self.box_side
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Reads the `id,x,y` CSV format. The box side is the larger extent of
    /// the bounding box.
    pub fn load_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(file, path)
    }

    pub fn read_csv(reader: impl Read, path: &Path) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            id: String,
            x: f64,
            y: f64,
        }
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
        let mut ids = Vec::new();
        let mut positions = Vec::new();
        for row in rdr.deserialize::<Row>() {
            let row = row.map_err(|e| csv_parse_error(path, e))?;
            ids.push(row.id);
            positions.push([row.x, row.y]);
        }
        let (lo, hi) = bounding_box(&positions);
        let side = (hi[0] - lo[0]).max(hi[1] - lo[1]);
        Self::with_ids(ids, positions, side)
    }

    pub fn write_csv(&self, out: impl Write, header_comment: Option<&str>) -> Result<()> {
        let mut out = out;
        if let Some(comment) = header_comment {
            writeln!(out, "# {comment}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["id", "x", "y"])?;
        for (id, [x, y]) in self.ids.iter().zip(&self.positions) {
            w.write_record([id.as_str(), &x.to_string(), &y.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> NetworkJson {
        NetworkJson {
            nodes: self
                .ids
                .iter()
                .zip(&self.positions)
                .map(|(id, p)| NodeJson {
                    id: id.clone(),
                    kind: NodeKind::Station,
                    x: Some(p[0]),
                    y: Some(p[1]),
                })
                .collect(),
            edges: Vec::new(),
        }
    }
}

pub(crate) fn csv_parse_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: e.to_string(),
    }
}

/// `n` i.i.d. uniform points in `[0, box_side)^2`, reproducible per seed.
pub fn generate_uniform_points(n: usize, box_side: f64, seed: u64) -> Result<PointCloud> {
    if n < 1 {
        return Err(domain("point count must be at least 1"));
    }
    if !(box_side > 0.0 && box_side.is_finite()) {
        return Err(domain(format!("box side must be positive, got {box_side}")));
    }
    let mut rng = seed::stream_rng(seed, Stream::Points, 0);
    let positions = (0..n)
        .map(|_| {
            [
                rng.random::<f64>() * box_side,
                rng.random::<f64>() * box_side,
            ]
        })
        .collect();
    let mut cloud = PointCloud::new(positions, box_side)?;
    cloud.seed = Some(seed);
    Ok(cloud)
}

pub fn euclidean_distance(cloud: &PointCloud, i: usize, j: usize) -> Result<f64> {
    let n = cloud.len();
    if i >= n || j >= n {
        return Err(usage(format!("index out of range for {n} points: ({i}, {j})")));
    }
    Ok(cloud.distance(i, j))
}

impl SpatialNetwork for PointCloud {
    fn node_count(&self) -> usize {
        self.positions.len()
    }

    fn distance(&self, i: usize, j: usize) -> f64 {
        let [xi, yi] = self.positions[i];
        let [xj, yj] = self.positions[j];
        (xi - xj).hypot(yi - yj)
    }

    fn for_each_neighbor(&self, i: usize, radius: f64, visit: &mut dyn FnMut(usize, f64)) {
        let p = self.positions[i];
        self.grid.visit_box(p, radius, &mut |j| {
            if j != i {
                let d = self.distance(i, j);
                if d < radius {
                    visit(j, d);
                }
            }
        });
    }

    fn node_label(&self, i: usize) -> String {
        self.ids[i].clone()
    }
}

fn bounding_box(points: &[[f64; 2]]) -> ([f64; 2], [f64; 2]) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in points {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}

/// Bucket grid over the bounding box, roughly one point per cell.
#[derive(Debug, Clone)]
struct Grid {
    origin: [f64; 2],
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl Grid {
    fn build(points: &[[f64; 2]]) -> Self {
        let (lo, hi) = bounding_box(points);
        let extent = (hi[0] - lo[0]).max(hi[1] - lo[1]);
        let per_side = (points.len() as f64).sqrt().ceil().max(1.0);
        let cell = if extent > 0.0 { extent / per_side } else { 1.0 };
        let nx = (((hi[0] - lo[0]) / cell).floor() as usize + 1).max(1);
        let ny = (((hi[1] - lo[1]) / cell).floor() as usize + 1).max(1);
        let mut buckets = vec![Vec::new(); nx * ny];
        for (i, p) in points.iter().enumerate() {
            let cx = (((p[0] - lo[0]) / cell) as usize).min(nx - 1);
            let cy = (((p[1] - lo[1]) / cell) as usize).min(ny - 1);
            buckets[cy * nx + cx].push(i as u32);
        }
        Grid {
            origin: lo,
            cell,
            nx,
            ny,
            buckets,
        }
    }

    fn visit_box(&self, p: [f64; 2], radius: f64, visit: &mut dyn FnMut(usize)) {
        let span = |c: f64, o: f64, n: usize| -> (usize, usize) {
            if !radius.is_finite() {
                return (0, n - 1);
            }
            let lo = ((c - radius - o) / self.cell).floor();
            let hi = ((c + radius - o) / self.cell).floor();
            let clamp = |v: f64| v.max(0.0).min((n - 1) as f64) as usize;
            (clamp(lo), clamp(hi))
        };
        let (x0, x1) = span(p[0], self.origin[0], self.nx);
        let (y0, y1) = span(p[1], self.origin[1], self.ny);
        for cy in y0..=y1 {
            for cx in x0..=x1 {
                for &j in &self.buckets[cy * self.nx + cx] {
                    visit(j as usize);
                }
            }
        }
    }
}
