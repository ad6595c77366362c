//! Temporal graphs (contact sequences), their aggregate static graphs, and the
//! contact-list text format.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::textio;

/// Undirected timestamped contact, canonicalized so that `u < v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TemporalEdge {
    pub u: usize,
    pub v: usize,
    pub t: f64,
}

impl TemporalEdge {
    pub fn pair(&self) -> (usize, usize) {
        (self.u, self.v)
    }

    pub fn touches(&self, w: usize) -> bool {
        self.u == w || self.v == w
    }
}

/// A set of vertices `0..n` plus a multiset of temporal edges, stored sorted
/// by `(u, v, t)`. Duplicate contacts are kept.
#[derive(Clone, Debug, PartialEq)]
pub struct TemporalGraph {
    n_vertices: usize,
    edges: Vec<TemporalEdge>,
    names: Vec<String>,
    single_labeled: bool,
}

impl TemporalGraph {
    /// Builds a graph on vertices `0..n_vertices` named by their decimal ids.
    pub fn new<I>(n_vertices: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let names = (0..n_vertices).map(|i| i.to_string()).collect();
        Self::with_names(names, edges)
    }

    pub fn with_names<I>(names: Vec<String>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let n = names.len();
        let mut out = Vec::new();
        for (u, v, t) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidInput(format!(
                    "edge ({u}, {v}) references a vertex outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidInput(format!("self loop on vertex {u}")));
            }
            if !t.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite timestamp on edge ({u}, {v})")));
            }
            let (u, v) = if u < v { (u, v) } else { (v, u) };
            out.push(TemporalEdge { u, v, t });
        }
        out.sort_by(|a, b| a.u.cmp(&b.u).then(a.v.cmp(&b.v)).then(a.t.total_cmp(&b.t)));
        let single_labeled = out.windows(2).all(|w| w[0].pair() != w[1].pair());
        Ok(Self {
            n_vertices: n,
            edges: out,
            names,
            single_labeled,
        })
    }

    /// Rebuilds a graph from aggregate pairs and one label list per pair.
    pub(crate) fn from_pair_labels(names: Vec<String>, pairs: &[(usize, usize)], labels: &[Vec<f64>]) -> Result<Self> {
        let edges = pairs
            .iter()
            .zip(labels)
            .flat_map(|(&(u, v), ts)| ts.iter().map(move |&t| (u, v, t)));
        Self::with_names(names, edges)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[TemporalEdge] {
        &self.edges
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex_id(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn is_single_labeled(&self) -> bool {
        self.single_labeled
    }

    pub fn timestamps(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.t).collect()
    }

    /// Same topology with every timestamp passed through `f`.
    pub fn map_timestamps<F: Fn(f64) -> f64>(&self, f: F) -> Result<Self> {
        Self::with_names(self.names.clone(), self.edges.iter().map(|e| (e.u, e.v, f(e.t))))
    }

    /// Same topology with the timestamps replaced in canonical edge order.
    pub fn with_timestamps(&self, ts: &[f64]) -> Result<Self> {
        if ts.len() != self.edges.len() {
            return Err(Error::InvalidInput("timestamp count mismatch".into()));
        }
        Self::with_names(
            self.names.clone(),
            self.edges.iter().zip(ts).map(|(e, &t)| (e.u, e.v, t)),
        )
    }

    pub fn temporal_degree(&self, v: usize) -> Result<usize> {
        if v >= self.n_vertices {
            return Err(Error::InvalidInput(format!(
                "vertex {v} out of range (graph has {} vertices)",
                self.n_vertices
            )));
        }
        Ok(self.edges.iter().filter(|e| e.touches(v)).count())
    }

    pub fn temporal_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_vertices];
        for e in &self.edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg
    }

    pub fn aggregate(&self) -> AggregateGraph {
        AggregateGraph::from_temporal(self)
    }

    /// Hash of the canonical edge list and vertex count; used as a cache key.
    pub fn content_hash(&self) -> u64 {
        let mut h = crate::rng::splitmix64(self.n_vertices as u64);
        for e in &self.edges {
            h = crate::rng::splitmix64(h ^ e.u as u64);
            h = crate::rng::splitmix64(h ^ e.v as u64);
            h = crate::rng::splitmix64(h ^ e.t.to_bits());
        }
        h
    }

    pub fn stats(&self) -> GraphStats {
        GraphStats::of(self)
    }

    /// Serializes in TUV order, canonical edge order, with a vertex-name
    /// directive so that re-reading reproduces the same ids.
    pub fn write_to(&self, w: &mut dyn Write) -> std::io::Result<()> {
        write!(w, "#! vertices")?;
        for n in &self.names {
            write!(w, " {n}")?;
        }
        writeln!(w)?;
        for e in &self.edges {
            writeln!(w, "{} {} {}", textio::fmt_f64(e.t), self.names[e.u], self.names[e.v])?;
        }
        Ok(())
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        textio::write_atomic(path, |w| self.write_to(w))
    }
}

/// Column layout of a contact file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ColumnOrder {
    /// `t u v [ignored...]`, the SocioPatterns contact-list layout.
    #[default]
    Tuv,
    /// `u v t [ignored...]`
    Uvt,
}

impl FromStr for ColumnOrder {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tuv" => Ok(ColumnOrder::Tuv),
            "uvt" => Ok(ColumnOrder::Uvt),
            other => Err(Error::InvalidInput(format!("unknown column order `{other}`"))),
        }
    }
}

impl fmt::Display for ColumnOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColumnOrder::Tuv => "tuv",
            ColumnOrder::Uvt => "uvt",
        })
    }
}

#[derive(Default)]
struct SymbolTable {
    names: Vec<String>,
    ids: HashMap<String, usize>,
}

impl SymbolTable {
    fn intern(&mut self, name: &str) -> usize {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), id);
        id
    }
}

pub fn read_contact_sequence(path: &Path, order: ColumnOrder) -> Result<TemporalGraph> {
    let reader = textio::open_text(path)?;
    parse_contact_sequence(reader, order).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

/// Parses a whitespace-delimited contact list. Vertex ids are assigned in
/// first-appearance order unless a `#! vertices` directive fixes them.
pub fn parse_contact_sequence<R: BufRead>(reader: R, order: ColumnOrder) -> Result<TemporalGraph> {
    let mut symbols = SymbolTable::default();
    let mut edges = Vec::new();
    let mut saw_directive = false;
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io("<input>", e))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if let Some(("vertices", rest)) = textio::directive(line) {
                saw_directive = true;
                for name in rest.split_whitespace() {
                    symbols.intern(name);
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 3 {
            return Err(Error::parse(
                lineno,
                format!("expected at least 3 fields, found {}", fields.len()),
            ));
        }
        let (ts, a, b) = match order {
            ColumnOrder::Tuv => (fields[0], fields[1], fields[2]),
            ColumnOrder::Uvt => (fields[2], fields[0], fields[1]),
        };
        let t = ts
            .parse::<f64>()
            .ok()
            .filter(|t| t.is_finite())
            .ok_or_else(|| Error::parse(lineno, format!("timestamp `{ts}` is not a finite number")))?;
        if a == b {
            return Err(Error::parse(lineno, format!("self loop on vertex `{a}`")));
        }
        let u = symbols.intern(a);
        let v = symbols.intern(b);
        edges.push((u, v, t));
    }
    if edges.is_empty() && !saw_directive {
        return Err(Error::parse(0, "no contacts found"));
    }
    TemporalGraph::with_names(symbols.names, edges)
}

/// Simple static graph obtained by forgetting timestamps; each edge keeps its
/// sorted label list.
#[derive(Clone, Debug)]
pub struct AggregateGraph {
    n_vertices: usize,
    pairs: Vec<(usize, usize)>,
    labels: Vec<Vec<f64>>,
    adjacency: Vec<Vec<(usize, usize)>>,
    index: HashMap<(usize, usize), usize>,
}

impl AggregateGraph {
    fn from_temporal(t: &TemporalGraph) -> Self {
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut labels: Vec<Vec<f64>> = Vec::new();
        for e in t.edges() {
            if pairs.last() == Some(&e.pair()) {
                labels.last_mut().unwrap().push(e.t);
            } else {
                pairs.push(e.pair());
                labels.push(vec![e.t]);
            }
        }
        Self::from_parts(t.n_vertices(), pairs, labels)
    }

    /// Static graph with one empty label list per edge. Pairs are
    /// canonicalized and deduplicated; self loops are rejected.
    pub fn from_pairs(n_vertices: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut canon = Vec::with_capacity(pairs.len());
        for &(u, v) in pairs {
            if u == v || u >= n_vertices || v >= n_vertices {
                return Err(Error::InvalidInput(format!("invalid static edge ({u}, {v})")));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        canon.dedup();
        let labels = vec![Vec::new(); canon.len()];
        Ok(Self::from_parts(n_vertices, canon, labels))
    }

    fn from_parts(n_vertices: usize, pairs: Vec<(usize, usize)>, labels: Vec<Vec<f64>>) -> Self {
        let mut adjacency = vec![Vec::new(); n_vertices];
        let mut index = HashMap::with_capacity(pairs.len());
        for (i, &(u, v)) in pairs.iter().enumerate() {
            adjacency[u].push((v, i));
            adjacency[v].push((u, i));
            index.insert((u, v), i);
        }
        for nb in &mut adjacency {
            nb.sort_unstable();
        }
        Self {
            n_vertices,
            pairs,
            labels,
            adjacency,
            index,
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.pairs.len()
    }

    /// Edges in canonical `(u, v)` order with `u < v`.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn labels(&self, edge: usize) -> &[f64] {
        &self.labels[edge]
    }

    pub fn all_labels(&self) -> &[Vec<f64>] {
        &self.labels
    }

    pub fn multiplicity(&self, edge: usize) -> usize {
        self.labels[edge].len()
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.index.get(&(u.min(v), u.max(v))).copied()
    }

    /// `(neighbor, edge index)` pairs sorted by neighbor.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }
}

/// Summary counts in the layout of a dataset-statistics table.
///
/// `avg_degree`/`max_degree` are degrees in the aggregate graph;
/// the temporal variants count temporal edges per vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphStats {
    pub n_vertices: usize,
    pub n_static_edges: usize,
    pub n_temporal_edges: usize,
    pub avg_labels_per_edge: f64,
    pub max_labels_per_edge: usize,
    pub avg_degree: f64,
    pub max_degree: usize,
    pub avg_temporal_degree: f64,
    pub max_temporal_degree: usize,
}

impl GraphStats {
    fn of(t: &TemporalGraph) -> Self {
        let agg = t.aggregate();
        let n = t.n_vertices();
        let m = agg.n_edges();
        let mean = |total: usize, count: usize| if count == 0 { 0.0 } else { total as f64 / count as f64 };
        let tdeg = t.temporal_degrees();
        let sdeg = agg.degrees();
        GraphStats {
            n_vertices: n,
            n_static_edges: m,
            n_temporal_edges: t.n_edges(),
            avg_labels_per_edge: mean(t.n_edges(), m),
            max_labels_per_edge: (0..m).map(|e| agg.multiplicity(e)).max().unwrap_or(0),
            avg_degree: mean(2 * m, n),
            max_degree: sdeg.iter().copied().max().unwrap_or(0),
            avg_temporal_degree: mean(2 * t.n_edges(), n),
            max_temporal_degree: tdeg.iter().copied().max().unwrap_or(0),
        }
    }
}

impl fmt::Display for GraphStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vertices           {}", self.n_vertices)?;
        writeln!(f, "static edges       {}", self.n_static_edges)?;
        writeln!(f, "temporal edges     {}", self.n_temporal_edges)?;
        writeln!(f, "labels/edge avg    {:.2}", self.avg_labels_per_edge)?;
        writeln!(f, "labels/edge max    {}", self.max_labels_per_edge)?;
        writeln!(f, "degree avg         {:.2}", self.avg_degree)?;
        writeln!(f, "degree max         {}", self.max_degree)?;
        writeln!(f, "temporal deg avg   {:.2}", self.avg_temporal_degree)?;
        write!(f, "temporal deg max   {}", self.max_temporal_degree)
    }
}
