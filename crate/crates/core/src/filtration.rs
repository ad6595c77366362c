//! Edge filtrations of the aggregate graph.
//!
//! The temporal filtrations assign each static edge a value derived from the
//! time gaps to its adjacent temporal edges (edges sharing exactly one
//! endpoint): the minimum gap, the mean gap, and the mean summed over all
//! label pairs for multi-labeled graphs. Edges with no adjacent temporal edge
//! get `+inf`. Three static filtrations (max degree, max core number, half the
//! max triangle count of the endpoints) are provided as baselines.

use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::textio;
use crate::tgraph::{AggregateGraph, TemporalGraph};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilteredEdge {
    pub u: usize,
    pub v: usize,
    pub value: f64,
}

/// Simple graph with a filtration value per edge; vertices sit at 0.
#[derive(Clone, Debug, PartialEq)]
pub struct FilteredGraph {
    n_vertices: usize,
    edges: Vec<FilteredEdge>,
    names: Vec<String>,
}

impl FilteredGraph {
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
        let mut out: Vec<FilteredEdge> = Vec::new();
        for (u, v, value) in edges {
            if u == v || u >= n || v >= n {
                return Err(Error::InvalidInput(format!("invalid edge ({u}, {v})")));
            }
            if value.is_nan() || value < 0.0 || value == f64::NEG_INFINITY {
                return Err(Error::InvalidInput(format!(
                    "filtration value {value} on edge ({u}, {v}) must be >= 0 or +inf"
                )));
            }
            out.push(FilteredEdge {
                u: u.min(v),
                v: u.max(v),
                value,
            });
        }
        out.sort_by(|a, b| a.u.cmp(&b.u).then(a.v.cmp(&b.v)));
        if out.windows(2).any(|w| (w[0].u, w[0].v) == (w[1].u, w[1].v)) {
            return Err(Error::InvalidInput("parallel edges in filtered graph".into()));
        }
        Ok(Self {
            n_vertices: n,
            edges: out,
            names,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Edges in canonical `(u, v)` order.
    pub fn edges(&self) -> &[FilteredEdge] {
        &self.edges
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.names
    }

    pub fn value(&self, u: usize, v: usize) -> Option<f64> {
        let key = (u.min(v), u.max(v));
        self.edges
            .binary_search_by(|e| (e.u, e.v).cmp(&key))
            .ok()
            .map(|i| self.edges[i].value)
    }

    pub fn max_finite_value(&self) -> Option<f64> {
        self.edges
            .iter()
            .map(|e| e.value)
            .filter(|v| v.is_finite())
            .max_by(f64::total_cmp)
    }

    /// Same edges with every value replaced by `f(value)`.
    pub fn map_values<F: Fn(f64) -> f64>(&self, f: F) -> Result<Self> {
        Self::with_names(self.names.clone(), self.edges.iter().map(|e| (e.u, e.v, f(e.value))))
    }

    pub fn write_to(&self, w: &mut dyn Write) -> std::io::Result<()> {
        write!(w, "#! vertices")?;
        for n in &self.names {
            write!(w, " {n}")?;
        }
        writeln!(w)?;
        for e in &self.edges {
            writeln!(
                w,
                "{} {} {}",
                self.names[e.u],
                self.names[e.v],
                textio::fmt_f64(e.value)
            )?;
        }
        Ok(())
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        textio::write_atomic(path, |w| self.write_to(w))
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        Self::parse(textio::open_text(path)?)
    }

    /// Reads `u v f` lines; `inf` marks edges outside the finite filtration.
    pub fn parse<R: BufRead>(reader: R) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        let mut ids = std::collections::HashMap::new();
        let mut intern = |name: &str, names: &mut Vec<String>| -> usize {
            *ids.entry(name.to_string()).or_insert_with(|| {
                names.push(name.to_string());
                names.len() - 1
            })
        };
        let mut edges = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<input>", e))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('#') {
                if let Some(("vertices", rest)) = textio::directive(line) {
                    for n in rest.split_whitespace() {
                        intern(n, &mut names);
                    }
                }
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(Error::parse(i + 1, "expected `u v value`"));
            }
            let value = textio::parse_f64(f[2])
                .ok_or_else(|| Error::parse(i + 1, format!("bad filtration value `{}`", f[2])))?;
            let u = intern(f[0], &mut names);
            let v = intern(f[1], &mut names);
            edges.push((u, v, value));
        }
        Self::with_names(names, edges).map_err(|e| match e {
            Error::InvalidInput(m) => Error::parse(0, m),
            other => other,
        })
    }
}

/// Every filtration the crate can build from a temporal graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FiltrationMethod {
    Min,
    Avg,
    AvgMulti,
    AddMaxDeg,
    AddCoreNum,
    AddTriangle,
}

impl FiltrationMethod {
    /// Whether small values mean "enters early" (true for the temporal
    /// filtrations) or large values do (the static ones).
    pub fn is_sublevel(self) -> bool {
        matches!(self, Self::Min | Self::Avg | Self::AvgMulti)
    }

    pub fn apply(self, t: &TemporalGraph) -> Result<FilteredGraph> {
        match self {
            Self::Min => min_filtration(t),
            Self::Avg => avg_filtration(t),
            Self::AvgMulti => Ok(avg_filtration_multi(t)),
            Self::AddMaxDeg => Ok(static_filtration(t, StaticKind::AddMaxDeg)),
            Self::AddCoreNum => Ok(static_filtration(t, StaticKind::AddCoreNum)),
            Self::AddTriangle => Ok(static_filtration(t, StaticKind::AddTriangle)),
        }
    }
}

impl FromStr for FiltrationMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "min" => Self::Min,
            "avg" => Self::Avg,
            "avg-mlt" => Self::AvgMulti,
            "add-max-deg" => Self::AddMaxDeg,
            "add-core-num" => Self::AddCoreNum,
            "add-triangle" => Self::AddTriangle,
            other => return Err(Error::InvalidInput(format!("unknown filtration method `{other}`"))),
        })
    }
}

impl fmt::Display for FiltrationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Min => "min",
            Self::Avg => "avg",
            Self::AvgMulti => "avg-mlt",
            Self::AddMaxDeg => "add-max-deg",
            Self::AddCoreNum => "add-core-num",
            Self::AddTriangle => "add-triangle",
        })
    }
}

/// Average filtration appropriate for the graph: the single-label sweep when
/// possible, the multi-label form otherwise.
pub fn average_filtration(t: &TemporalGraph) -> FilteredGraph {
    if t.is_single_labeled() {
        avg_filtration(t).expect("single-labeled input")
    } else {
        avg_filtration_multi(t)
    }
}

/// Temporal edge ids incident to each vertex, in canonical edge order.
fn incidence(t: &TemporalGraph) -> Vec<Vec<usize>> {
    let mut inc = vec![Vec::new(); t.n_vertices()];
    for (i, e) in t.edges().iter().enumerate() {
        inc[e.u].push(i);
        inc[e.v].push(i);
    }
    inc
}

fn finish(t: &TemporalGraph, values: impl Iterator<Item = f64>) -> FilteredGraph {
    let edges = t.edges().iter().zip(values).map(|(e, f)| (e.u, e.v, f));
    FilteredGraph::with_names(t.vertex_names().to_vec(), edges).expect("aggregate edges are simple")
}

/// Size of the adjacent-temporal-edge set of every aggregate edge:
/// `td_u + td_v - 2 * multiplicity(u, v)`.
pub fn neighborhood_sizes(t: &TemporalGraph) -> Vec<usize> {
    let agg = t.aggregate();
    let td = t.temporal_degrees();
    agg.pairs()
        .iter()
        .enumerate()
        .map(|(e, &(u, v))| td[u] + td[v] - 2 * agg.multiplicity(e))
        .collect()
}

/// Smallest time gap between each edge and its adjacent temporal edges.
pub fn min_filtration(t: &TemporalGraph) -> Result<FilteredGraph> {
    if !t.is_single_labeled() {
        return Err(Error::MultiLabeled);
    }
    let edges = t.edges();
    let mut best = vec![f64::INFINITY; edges.len()];
    for inc in incidence(t) {
        let mut by_time: Vec<usize> = inc;
        by_time.sort_by(|&a, &b| edges[a].t.total_cmp(&edges[b].t));
        for w in by_time.windows(2) {
            let gap = edges[w[1]].t - edges[w[0]].t;
            best[w[0]] = best[w[0]].min(gap);
            best[w[1]] = best[w[1]].min(gap);
        }
    }
    Ok(finish(t, best.into_iter()))
}

/// Mean time gap between each edge and its adjacent temporal edges.
///
/// Runs the incident-pair sweep: every pair of temporal edges meeting at a
/// vertex contributes its gap to both running sums, so the cost is
/// `O(sum_v td_v^2) = O(|E| * d_max)`.
pub fn avg_filtration(t: &TemporalGraph) -> Result<FilteredGraph> {
    if !t.is_single_labeled() {
        return Err(Error::MultiLabeled);
    }
    let edges = t.edges();
    let mut sums = vec![0.0f64; edges.len()];
    let inc = incidence(t);
    for at_vertex in &inc {
        for (a, &ea) in at_vertex.iter().enumerate() {
            let ta = edges[ea].t;
            for &eb in &at_vertex[a + 1..] {
                let gap = (ta - edges[eb].t).abs();
                sums[ea] += gap;
                sums[eb] += gap;
            }
        }
    }
    let values = edges.iter().zip(&sums).map(|(e, &s)| {
        let denom = inc[e.u].len() + inc[e.v].len() - 2;
        if denom == 0 {
            f64::INFINITY
        } else {
            s / denom as f64
        }
    });
    Ok(finish(t, values))
}

/// Sorted sample with prefix sums, answering `sum_i |x - s_i|` in `O(log n)`.
struct GapSummer {
    sorted: Vec<f64>,
    prefix: Vec<f64>,
}

impl GapSummer {
    fn new(mut xs: Vec<f64>) -> Self {
        xs.sort_by(f64::total_cmp);
        let mut prefix = Vec::with_capacity(xs.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for &x in &xs {
            acc += x;
            prefix.push(acc);
        }
        Self { sorted: xs, prefix }
    }

    fn total_gap(&self, x: f64) -> f64 {
        let n = self.sorted.len();
        let k = self.sorted.partition_point(|&s| s <= x);
        let below = x * k as f64 - self.prefix[k];
        let above = (self.prefix[n] - self.prefix[k]) - x * (n - k) as f64;
        below + above
    }
}

/// Multi-label average: for an edge with label set `tau`, the sum over
/// adjacent temporal edges `e'` and all `t in tau` of `|t - tau(e')|`,
/// divided by the number of adjacent temporal edges. Temporal edges parallel
/// to the edge itself are not adjacent.
pub fn avg_filtration_multi(t: &TemporalGraph) -> FilteredGraph {
    let agg = t.aggregate();
    // Shift to the earliest contact; only differences matter and smaller
    // magnitudes keep the prefix sums accurate.
    let origin = t.edges().iter().map(|e| e.t).min_by(f64::total_cmp).unwrap_or(0.0);
    let mut at_vertex: Vec<Vec<f64>> = vec![Vec::new(); t.n_vertices()];
    for e in t.edges() {
        at_vertex[e.u].push(e.t - origin);
        at_vertex[e.v].push(e.t - origin);
    }
    let counts: Vec<usize> = at_vertex.iter().map(Vec::len).collect();
    let summers: Vec<GapSummer> = at_vertex.into_iter().map(GapSummer::new).collect();
    let values: Vec<f64> = agg
        .pairs()
        .iter()
        .enumerate()
        .map(|(e, &(u, v))| {
            let tau: Vec<f64> = agg.labels(e).iter().map(|&x| x - origin).collect();
            let denom = counts[u] + counts[v] - 2 * tau.len();
            if denom == 0 {
                return f64::INFINITY;
            }
            let own = GapSummer::new(tau.clone());
            let total: f64 = tau
                .iter()
                .map(|&x| summers[u].total_gap(x) + summers[v].total_gap(x) - 2.0 * own.total_gap(x))
                .sum();
            // Cancellation can leave a tiny negative residue.
            total.max(0.0) / denom as f64
        })
        .collect();
    let edges = agg.pairs().iter().zip(values).map(|(&(u, v), f)| (u, v, f));
    FilteredGraph::with_names(t.vertex_names().to_vec(), edges).expect("aggregate edges are simple")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StaticKind {
    AddMaxDeg,
    AddCoreNum,
    AddTriangle,
}

pub fn static_filtration(t: &TemporalGraph, kind: StaticKind) -> FilteredGraph {
    let agg = t.aggregate();
    let g = static_filtration_of(&agg, kind);
    FilteredGraph::with_names(t.vertex_names().to_vec(), g.edges().iter().map(|e| (e.u, e.v, e.value)))
        .expect("aggregate edges are simple")
}

/// Static filtration of an aggregate graph: the max endpoint degree, the max
/// endpoint core number, or half the max endpoint triangle count.
pub fn static_filtration_of(g: &AggregateGraph, kind: StaticKind) -> FilteredGraph {
    let per_vertex: Vec<f64> = match kind {
        StaticKind::AddMaxDeg => g.degrees().into_iter().map(|d| d as f64).collect(),
        StaticKind::AddCoreNum => core_numbers(g).into_iter().map(|c| c as f64).collect(),
        StaticKind::AddTriangle => triangle_counts(g).into_iter().map(|c| c as f64 / 2.0).collect(),
    };
    let edges = g.pairs().iter().map(|&(u, v)| (u, v, per_vertex[u].max(per_vertex[v])));
    FilteredGraph::new(g.n_vertices(), edges).expect("aggregate edges are simple")
}

/// Core number of every vertex by bucket peeling.
pub fn core_numbers(g: &AggregateGraph) -> Vec<usize> {
    let n = g.n_vertices();
    let mut deg = g.degrees();
    let max_deg = deg.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); max_deg + 1];
    for v in 0..n {
        buckets[deg[v]].push(v);
    }
    let mut removed = vec![false; n];
    let mut core = vec![0; n];
    let mut k = 0;
    let mut done = 0;
    while done < n {
        let Some(level) = (0..=max_deg).find(|&d| !buckets[d].is_empty()) else {
            break;
        };
        let v = buckets[level].pop().unwrap();
        if removed[v] || deg[v] != level {
            continue;
        }
        k = k.max(level);
        core[v] = k;
        removed[v] = true;
        done += 1;
        for &(w, _) in g.neighbors(v) {
            if !removed[w] && deg[w] > 0 {
                deg[w] -= 1;
                buckets[deg[w]].push(w);
            }
        }
    }
    core
}

/// Number of triangles through each vertex.
pub fn triangle_counts(g: &AggregateGraph) -> Vec<usize> {
    let mut count = vec![0; g.n_vertices()];
    for &(u, v) in g.pairs() {
        let (nu, nv) = (g.neighbors(u), g.neighbors(v));
        let (mut i, mut j) = (0, 0);
        while i < nu.len() && j < nv.len() {
            let (a, b) = (nu[i].0, nv[j].0);
            if a < b {
                i += 1;
            } else if b < a {
                j += 1;
            } else {
                if a > v {
                    count[u] += 1;
                    count[v] += 1;
                    count[a] += 1;
                }
                i += 1;
                j += 1;
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tgraph::fixtures::{five_cycle, multi_cycle};

    fn value(g: &FilteredGraph, t: &TemporalGraph, a: &str, b: &str) -> f64 {
        g.value(t.vertex_id(a).unwrap(), t.vertex_id(b).unwrap()).unwrap()
    }

    #[test]
    fn five_cycle_minimum() {
        let t = five_cycle();
        let f = min_filtration(&t).unwrap();
        for (a, b, want) in [
            ("A", "B", 2.0),
            ("B", "C", 2.0),
            ("C", "D", 2.0),
            ("D", "E", 2.0),
            ("E", "A", 2.0),
            ("B", "F", 2.0),
            ("F", "C", 3.0),
        ] {
            assert_eq!(value(&f, &t, a, b), want, "{a}{b}");
        }
    }

    #[test]
    fn five_cycle_average() {
        let t = five_cycle();
        let f = avg_filtration(&t).unwrap();
        for (a, b, want) in [
            ("A", "B", 5.0),
            ("C", "D", 8.0 / 3.0),
            ("E", "A", 5.5),
            ("B", "F", 10.0 / 3.0),
            ("B", "C", 3.25),
            ("D", "E", 2.0),
            ("F", "C", 13.0 / 3.0),
        ] {
            assert!((value(&f, &t, a, b) - want).abs() < 1e-12, "{a}{b}");
        }
    }

    #[test]
    fn disconnected_edges_are_infinite() {
        let t = TemporalGraph::new(4, [(0, 1, 5.0), (2, 3, 9.0)]).unwrap();
        for f in [
            min_filtration(&t).unwrap(),
            avg_filtration(&t).unwrap(),
            avg_filtration_multi(&t),
        ] {
            assert!(f.edges().iter().all(|e| e.value == f64::INFINITY));
        }
    }

    #[test]
    fn path_minimum() {
        let t = TemporalGraph::new(4, [(0, 1, 10.0), (1, 2, 4.0), (2, 3, 7.0)]).unwrap();
        let f = min_filtration(&t).unwrap();
        assert_eq!(f.value(1, 2), Some(3.0));
    }

    #[test]
    fn star_average() {
        let t = TemporalGraph::new(4, [(0, 1, 1.0), (0, 2, 3.0), (0, 3, 8.0)]).unwrap();
        let f = avg_filtration(&t).unwrap();
        assert_eq!(f.value(0, 1), Some(4.5));
        assert_eq!(f.value(0, 2), Some(3.5));
        assert_eq!(f.value(0, 3), Some(6.0));
    }

    #[test]
    fn multi_label_examples() {
        let t = multi_cycle();
        let f = avg_filtration_multi(&t);
        assert!((value(&f, &t, "B", "F") - 34.0 / 6.0).abs() < 1e-12);
        assert!((value(&f, &t, "F", "C") - 20.0 / 6.0).abs() < 1e-12);
        assert!(matches!(avg_filtration(&t), Err(Error::MultiLabeled)));
        assert!(matches!(min_filtration(&t), Err(Error::MultiLabeled)));
    }

    #[test]
    fn multi_reduces_to_single() {
        let t = five_cycle();
        let a = avg_filtration(&t).unwrap();
        let b = avg_filtration_multi(&t);
        for (x, y) in a.edges().iter().zip(b.edges()) {
            assert_eq!((x.u, x.v), (y.u, y.v));
            assert!((x.value - y.value).abs() < 1e-9);
        }
    }

    #[test]
    fn static_examples() {
        let t = five_cycle();
        let deg = static_filtration(&t, StaticKind::AddMaxDeg);
        assert_eq!(value(&deg, &t, "A", "B"), 3.0);
        assert_eq!(value(&deg, &t, "D", "E"), 2.0);
        let core = static_filtration(&t, StaticKind::AddCoreNum);
        assert!(core.edges().iter().all(|e| e.value == 2.0));
        let tri = static_filtration(&t, StaticKind::AddTriangle);
        assert_eq!(value(&tri, &t, "B", "C"), 0.5);
        assert_eq!(value(&tri, &t, "D", "E"), 0.0);
    }

    #[test]
    fn core_numbers_of_k4_plus_tail() {
        let g =
            AggregateGraph::from_pairs(6, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4), (4, 5)]).unwrap();
        assert_eq!(core_numbers(&g), vec![3, 3, 3, 3, 1, 1]);
        assert_eq!(triangle_counts(&g), vec![3, 3, 3, 3, 0, 0]);
    }

    #[test]
    fn neighborhood_sizes_multi_cycle() {
        let t = multi_cycle();
        let agg = t.aggregate();
        let bf = agg
            .edge_index(t.vertex_id("B").unwrap(), t.vertex_id("F").unwrap())
            .unwrap();
        assert_eq!(neighborhood_sizes(&t)[bf], 6);
    }

    #[test]
    fn filtered_graph_file_round_trip() {
        let t = TemporalGraph::new(5, [(0, 1, 5.0), (2, 3, 9.0), (1, 2, 1.5)]).unwrap();
        let f = avg_filtration(&t).unwrap();
        let mut buf = Vec::new();
        f.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("inf") || f.edges().iter().all(|e| e.value.is_finite()));
        assert_eq!(FilteredGraph::parse(buf.as_slice()).unwrap(), f);
    }

    #[test]
    fn rejects_negative_values() {
        assert!(FilteredGraph::new(2, [(0, 1, -1.0)]).is_err());
        assert!(FilteredGraph::new(2, [(0, 1, f64::NAN)]).is_err());
        assert!(FilteredGraph::new(2, [(0, 1, 1.0), (1, 0, 2.0)]).is_err());
    }
}
