use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::Deserialize;

use super::cloud::csv_parse_error;
use super::{EdgeJson, NetworkJson, NodeJson, NodeKind, SpatialNetwork};
use crate::error::{validation, Error, Result};

/// A cable between two node indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub length_km: f64,
}

/// Fiber network: distances exist only along cables.
#[derive(Debug, Clone, Default)]
pub struct EdgeListNetwork {
    ids: Vec<String>,
    kinds: Vec<NodeKind>,
    coords: Vec<Option<[f64; 2]>>,
    index: HashMap<String, usize>,
    edges: Vec<Edge>,
    edge_slot: HashMap<(usize, usize), usize>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl PartialEq for EdgeListNetwork {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids
            && self.kinds == other.kinds
            && self.coords == other.coords
            && self.edges == other.edges
    }
}

impl EdgeListNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a node, or returns the index of an existing node with this id.
    pub fn add_node(&mut self, id: &str, kind: NodeKind, coords: Option<[f64; 2]>) -> usize {
        if let Some(&i) = self.index.get(id) {
            return i;
        }
        let i = self.ids.len();
        self.ids.push(id.to_owned());
        self.kinds.push(kind);
        self.coords.push(coords);
        self.index.insert(id.to_owned(), i);
        self.adjacency.push(Vec::new());
        i
    }

    /// Adds a cable; a duplicate pair keeps the shorter length.
    pub fn add_edge(&mut self, u: usize, v: usize, length_km: f64) -> Result<()> {
        let n = self.ids.len();
        if u >= n || v >= n {
            return Err(validation(format!("edge ({u}, {v}) references a missing node")));
        }
        if u == v {
            return Err(validation(format!("self-loop on node `{}`", self.ids[u])));
        }
        if !(length_km > 0.0 && length_km.is_finite()) {
            return Err(validation(format!(
                "edge `{}`-`{}` has non-positive length {length_km}",
                self.ids[u], self.ids[v]
            )));
        }
        let key = (u.min(v), u.max(v));
        if let Some(&slot) = self.edge_slot.get(&key) {
            let edge = &mut self.edges[slot];
            if length_km < edge.length_km {
                edge.length_km = length_km;
                for (a, b) in [(u, v), (v, u)] {
                    if let Some(entry) = self.adjacency[a].iter_mut().find(|(w, _)| *w == b) {
                        entry.1 = length_km;
                    }
                }
            }
            return Ok(());
        }
        self.edge_slot.insert(key, self.edges.len());
        self.edges.push(Edge { u, v, length_km });
        self.adjacency[u].push((v, length_km));
        self.adjacency[v].push((u, length_km));
        Ok(())
    }

    pub fn add_edge_by_id(&mut self, u: &str, v: &str, length_km: f64) -> Result<()> {
        let a = self.add_node(u, NodeKind::Station, None);
        let b = self.add_node(v, NodeKind::Station, None);
        self.add_edge(a, b, length_km)
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn kind(&self, i: usize) -> NodeKind {
        self.kinds[i]
    }

    pub fn coords(&self, i: usize) -> Option<[f64; 2]> {
        self.coords[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn repeater_count(&self) -> usize {
        self.kinds.iter().filter(|&&k| k == NodeKind::Repeater).count()
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length_km).sum()
    }

    /// Number of classical connected components (cables as links).
    pub fn classical_components(&self) -> usize {
        let n = self.ids.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &(v, _) in &self.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        count
    }

    /// Nodes sorted by id, edges by `(u, v)` id with `u < v`.
    pub fn canonicalize(&self) -> Self {
        let mut order: Vec<usize> = (0..self.ids.len()).collect();
        order.sort_by(|&a, &b| self.ids[a].cmp(&self.ids[b]));
        let mut out = EdgeListNetwork::new();
        for &i in &order {
            out.add_node(&self.ids[i], self.kinds[i], self.coords[i]);
        }
        let mut edges: Vec<(String, String, f64)> = self
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (&self.ids[e.u], &self.ids[e.v]);
                if a <= b {
                    (a.clone(), b.clone(), e.length_km)
                } else {
                    (b.clone(), a.clone(), e.length_km)
                }
            })
            .collect();
        edges.sort_by(|x, y| (&x.0, &x.1).cmp(&(&y.0, &y.1)));
        for (a, b, len) in edges {
            let (u, v) = (out.index[&a], out.index[&b]);
            out.add_edge(u, v, len).expect("validated on insert");
        }
        out
    }

    pub fn read_edges_csv(&mut self, reader: impl Read, path: &Path) -> Result<()> {
        #[derive(Deserialize)]
        struct Row {
            u: String,
            v: String,
            length_km: f64,
        }
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut record = csv::StringRecord::new();
        let headers = rdr.headers().map_err(|e| csv_parse_error(path, e))?.clone();
        loop {
            match rdr.read_record(&mut record) {
                Ok(false) => break,
                Ok(true) => {}
                Err(e) => return Err(csv_parse_error(path, e)),
            }
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            let row: Row = record
                .deserialize(Some(&headers))
                .map_err(|e| parse_at(path, line, e.to_string()))?;
            let u = self.add_node(&row.u, NodeKind::Station, None);
            let v = self.add_node(&row.v, NodeKind::Station, None);
            self.add_edge(u, v, row.length_km).map_err(|e| match e {
                Error::Validation(msg) => Error::Validation(format!("{}:{line}: {msg}", path.display())),
                other => other,
            })?;
        }
        Ok(())
    }

    /// Reads the companion `id,kind,x,y` node table; `x`/`y` may be empty.
    pub fn read_nodes_csv(&mut self, reader: impl Read, path: &Path) -> Result<()> {
        #[derive(Deserialize)]
        struct Row {
            id: String,
            kind: NodeKind,
            x: Option<f64>,
            y: Option<f64>,
        }
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        for row in rdr.deserialize::<Row>() {
            let row = row.map_err(|e| csv_parse_error(path, e))?;
            let coords = match (row.x, row.y) {
                (Some(x), Some(y)) => Some([x, y]),
                _ => None,
            };
            let i = self.add_node(&row.id, row.kind, coords);
            self.kinds[i] = row.kind;
            self.coords[i] = coords;
        }
        Ok(())
    }

    pub fn write_edges_csv(&self, out: impl Write, header_comment: Option<&str>) -> Result<()> {
        let mut out = out;
        if let Some(comment) = header_comment {
            writeln!(out, "# {comment}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["u", "v", "length_km"])?;
        for e in &self.edges {
            w.write_record([
                self.ids[e.u].as_str(),
                self.ids[e.v].as_str(),
                &e.length_km.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_nodes_csv(&self, out: impl Write, header_comment: Option<&str>) -> Result<()> {
        let mut out = out;
        if let Some(comment) = header_comment {
            writeln!(out, "# {comment}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["id", "kind", "x", "y"])?;
        for i in 0..self.ids.len() {
            let (x, y) = match self.coords[i] {
                Some([x, y]) => (x.to_string(), y.to_string()),
                None => (String::new(), String::new()),
            };
            w.write_record([self.ids[i].as_str(), self.kinds[i].as_str(), &x, &y])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `<stem>_edges.csv` and `<stem>_nodes.csv` into `dir`.
    pub fn save(&self, dir: &Path, stem: &str, header_comment: Option<&str>) -> Result<()> {
        let edges = std::fs::File::create(dir.join(format!("{stem}_edges.csv")))?;
        self.write_edges_csv(std::io::BufWriter::new(edges), header_comment)?;
        let nodes = std::fs::File::create(dir.join(format!("{stem}_nodes.csv")))?;
        self.write_nodes_csv(std::io::BufWriter::new(nodes), header_comment)
    }

    pub fn to_json(&self) -> NetworkJson {
        NetworkJson {
            nodes: (0..self.ids.len())
                .map(|i| NodeJson {
                    id: self.ids[i].clone(),
                    kind: self.kinds[i],
                    x: self.coords[i].map(|c| c[0]),
                    y: self.coords[i].map(|c| c[1]),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeJson {
                    u: self.ids[e.u].clone(),
                    v: self.ids[e.v].clone(),
                    length_km: e.length_km,
                })
                .collect(),
        }
    }
}

fn parse_at(path: &Path, line: u64, message: String) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    }
}

/// Loads a `u,v,length_km` edge list.
pub fn load_edge_list(path: &Path) -> Result<EdgeListNetwork> {
    let mut net = EdgeListNetwork::new();
    net.read_edges_csv(std::fs::File::open(path)?, path)?;
    Ok(net)
}

/// Loads the node table first, so isolated nodes and node kinds survive.
pub fn load_edge_list_with_nodes(edges: &Path, nodes: &Path) -> Result<EdgeListNetwork> {
    let mut net = EdgeListNetwork::new();
    net.read_nodes_csv(std::fs::File::open(nodes)?, nodes)?;
    net.read_edges_csv(std::fs::File::open(edges)?, edges)?;
    Ok(net)
}

impl SpatialNetwork for EdgeListNetwork {
    fn node_count(&self) -> usize {
        self.ids.len()
    }

    fn distance(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        self.edge_slot
            .get(&(i.min(j), i.max(j)))
            .map_or(f64::INFINITY, |&slot| self.edges[slot].length_km)
    }

    fn for_each_neighbor(&self, i: usize, radius: f64, visit: &mut dyn FnMut(usize, f64)) {
        for &(j, d) in &self.adjacency[i] {
            if d < radius {
                visit(j, d);
            }
        }
    }

    fn node_label(&self, i: usize) -> String {
        self.ids[i].clone()
    }
}
