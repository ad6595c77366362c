//! Synthetic temporal graphs: uniform random single-labeled graphs of a given
//! density, and a degree-heterogeneous contact model with tunable
//! (dis)assortative mixing.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{self, RngSeed};
use crate::tgraph::{AggregateGraph, TemporalGraph};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomGraphSpec {
    pub n_vertices: usize,
    /// Fraction of the `n (n - 1) / 2` vertex pairs that become edges.
    pub sparsity: f64,
    /// Timestamps are drawn uniformly from the half-open interval `(lo, hi]`.
    pub t_range: (f64, f64),
    pub seed: RngSeed,
}

impl Default for RandomGraphSpec {
    fn default() -> Self {
        Self {
            n_vertices: 100,
            sparsity: 0.05,
            t_range: (0.0, 100.0),
            seed: RngSeed::default(),
        }
    }
}

/// Number of aggregate edges a [`RandomGraphSpec`] produces.
pub fn random_edge_count(n_vertices: usize, sparsity: f64) -> usize {
    let pairs = n_vertices * n_vertices.saturating_sub(1) / 2;
    (sparsity * pairs as f64).floor() as usize
}

/// Uniform sample of distinct vertex pairs, one uniform timestamp each.
pub fn random_temporal_graph(spec: &RandomGraphSpec) -> Result<TemporalGraph> {
    let n = spec.n_vertices;
    if !(spec.sparsity > 0.0 && spec.sparsity <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "sparsity {} outside (0, 1]",
            spec.sparsity
        )));
    }
    let (lo, hi) = spec.t_range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidInput(format!("empty time range ({lo}, {hi}]")));
    }
    let m = random_edge_count(n, spec.sparsity);
    if m == 0 {
        return Err(Error::InvalidInput(format!(
            "sparsity {} on {n} vertices yields no edges",
            spec.sparsity
        )));
    }
    let total = n * (n - 1) / 2;
    // row_start[i] = index of pair (i, i + 1) in the row-major upper triangle.
    let row_start: Vec<usize> = (0..n)
        .scan(0, |acc, i| {
            let s = *acc;
            *acc += n - 1 - i;
            Some(s)
        })
        .collect();
    let mut rng = spec.seed.rng();
    let picks = rng::sample_indices(&mut rng, total, m);
    let edges: Vec<(usize, usize, f64)> = picks
        .into_iter()
        .map(|k| {
            let i = row_start.partition_point(|&s| s <= k) - 1;
            let j = i + 1 + (k - row_start[i]);
            let t = hi - rng.gen::<f64>() * (hi - lo);
            (i, j, t)
        })
        .collect();
    TemporalGraph::new(n, edges)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mixing {
    #[default]
    Assortative,
    Disassortative,
}

impl FromStr for Mixing {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "assortative" => Ok(Mixing::Assortative),
            "disassortative" => Ok(Mixing::Disassortative),
            other => Err(Error::InvalidInput(format!("unknown mixing `{other}`"))),
        }
    }
}

impl fmt::Display for Mixing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mixing::Assortative => "assortative",
            Mixing::Disassortative => "disassortative",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContactModelSpec {
    pub n_vertices: usize,
    pub n_temporal_edges: usize,
    /// Distinct vertex pairs; defaults to `n_temporal_edges` (single-labeled).
    /// Contacts beyond this count repeat already chosen pairs.
    pub n_static_edges: Option<usize>,
    pub mixing: Mixing,
    pub mixing_strength: f64,
    pub seed: RngSeed,
}

impl Default for ContactModelSpec {
    fn default() -> Self {
        Self {
            n_vertices: 100,
            n_temporal_edges: 200,
            n_static_edges: None,
            mixing: Mixing::Assortative,
            mixing_strength: 0.5,
            seed: RngSeed::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ContactGraph {
    pub graph: TemporalGraph,
    /// False when no attempt produced a connected aggregate graph.
    pub connected: bool,
}

const CONTACT_ATTEMPTS: u64 = 20;
const CONTACT_T_MAX: f64 = 1000.0;
const PARETO_ALPHA: f64 = 1.5;
const MIXING_CANDIDATES: usize = 6;

/// Degree-heterogeneous contact graph.
///
/// Vertices get Pareto activity weights. Each new pair starts at a vertex
/// drawn by weight; with probability `mixing_strength` its partner is the
/// candidate (out of a few weight-drawn ones) whose weight is closest to
/// (assortative) or farthest from (disassortative) the first endpoint's,
/// otherwise a single weight-drawn candidate. Every vertex receives at least
/// one contact. Timestamps are uniform on `(0, 1000]`. Up to 20 attempts are
/// made to obtain a connected aggregate graph.
pub fn synthetic_contact_graph(spec: &ContactModelSpec) -> Result<ContactGraph> {
    let n = spec.n_vertices;
    let statics = spec.n_static_edges.unwrap_or(spec.n_temporal_edges);
    if n < 2 {
        return Err(Error::InvalidInput("contact model needs at least 2 vertices".into()));
    }
    if statics > spec.n_temporal_edges {
        return Err(Error::InvalidInput("more static pairs than contacts".into()));
    }
    if statics > n * (n - 1) / 2 || statics < n.div_ceil(2) {
        return Err(Error::InvalidInput(format!(
            "{statics} static pairs cannot cover {n} vertices as a simple graph"
        )));
    }
    if !(0.0..=1.0).contains(&spec.mixing_strength) {
        return Err(Error::InvalidInput("mixing strength outside [0, 1]".into()));
    }
    let mut last = None;
    for attempt in 0..CONTACT_ATTEMPTS {
        let g = contact_attempt(spec, statics, spec.seed.derive(attempt))?;
        if is_connected(&g.aggregate()) {
            return Ok(ContactGraph {
                graph: g,
                connected: true,
            });
        }
        last = Some(g);
    }
    log::warn!("contact model: no connected aggregate after {CONTACT_ATTEMPTS} attempts");
    Ok(ContactGraph {
        graph: last.expect("at least one attempt"),
        connected: false,
    })
}

fn contact_attempt(spec: &ContactModelSpec, statics: usize, seed: RngSeed) -> Result<TemporalGraph> {
    let n = spec.n_vertices;
    let mut rng = seed.rng();
    let cap = n as f64 / 2.0;
    let weights: Vec<f64> = (0..n)
        .map(|_| (1.0 - rng.gen::<f64>()).powf(-1.0 / PARETO_ALPHA).min(cap))
        .collect();
    let mut cumulative = Vec::with_capacity(n);
    let mut acc = 0.0;
    for &w in &weights {
        acc += w;
        cumulative.push(acc);
    }
    let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> usize {
        let x = rng.gen::<f64>() * acc;
        cumulative.partition_point(|&c| c <= x).min(n - 1)
    };
    let mut present: HashSet<(usize, usize)> = HashSet::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut degree = vec![0usize; n];

    let partner = |a: usize, rng: &mut rand_chacha::ChaCha8Rng, present: &HashSet<(usize, usize)>| -> Option<usize> {
        let ok = |b: usize| b != a && !present.contains(&(a.min(b), a.max(b)));
        if rng.gen::<f64>() < spec.mixing_strength {
            let cands: Vec<usize> = (0..MIXING_CANDIDATES * 4)
                .map(|_| draw(rng))
                .filter(|&b| ok(b))
                .take(MIXING_CANDIDATES)
                .collect();
            let gap = |b: &usize| (weights[a].ln() - weights[*b].ln()).abs();
            match spec.mixing {
                Mixing::Assortative => cands.into_iter().min_by(|x, y| gap(x).total_cmp(&gap(y))),
                Mixing::Disassortative => cands.into_iter().max_by(|x, y| gap(x).total_cmp(&gap(y))),
            }
        } else {
            Some(draw(rng)).filter(|&b| ok(b))
        }
    };

    let mut order: Vec<usize> = (0..n).collect();
    rng::shuffle(&mut rng, &mut order);
    for &a in &order {
        if degree[a] > 0 || pairs.len() >= statics {
            continue;
        }
        let mut b = None;
        for _ in 0..100 {
            b = partner(a, &mut rng, &present);
            if b.is_some() {
                break;
            }
        }
        let b = b.unwrap_or_else(|| (a + 1) % n);
        let p = (a.min(b), a.max(b));
        if present.insert(p) {
            pairs.push(p);
            degree[a] += 1;
            degree[b] += 1;
        }
    }
    let mut misses = 0usize;
    while pairs.len() < statics {
        let a = draw(&mut rng);
        match partner(a, &mut rng, &present) {
            Some(b) => {
                let p = (a.min(b), a.max(b));
                present.insert(p);
                pairs.push(p);
                degree[a] += 1;
                degree[b] += 1;
            }
            None => {
                misses += 1;
                if misses > 1000 * statics.max(1) {
                    return Err(Error::Infeasible(
                        "contact model could not place enough distinct pairs".into(),
                    ));
                }
            }
        }
    }
    let mut labels: Vec<Vec<f64>> = pairs.iter().map(|_| Vec::new()).collect();
    for k in 0..spec.n_temporal_edges {
        let slot = if k < statics { k } else { rng::index(&mut rng, statics) };
        labels[slot].push(CONTACT_T_MAX - rng.gen::<f64>() * CONTACT_T_MAX);
    }
    let names = (0..n).map(|i| i.to_string()).collect();
    TemporalGraph::from_pair_labels(names, &pairs, &labels)
}

pub fn is_connected(g: &AggregateGraph) -> bool {
    let n = g.n_vertices();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &(w, _) in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == n
}

/// Pearson correlation of the degrees at either end of each edge.
pub fn degree_assortativity(g: &AggregateGraph) -> f64 {
    let deg = g.degrees();
    let (mut sx, mut sxx, mut sxy, mut cnt) = (0.0, 0.0, 0.0, 0.0);
    for &(u, v) in g.pairs() {
        let (a, b) = (deg[u] as f64, deg[v] as f64);
        // Both orientations, so the two marginals coincide.
        sx += a + b;
        sxx += a * a + b * b;
        sxy += 2.0 * a * b;
        cnt += 2.0;
    }
    if cnt == 0.0 {
        return 0.0;
    }
    let mean = sx / cnt;
    let var = sxx / cnt - mean * mean;
    if var <= 0.0 {
        return 0.0;
    }
    (sxy / cnt - mean * mean) / var
}
