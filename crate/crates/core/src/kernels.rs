//! Persistence scale space kernel on diagrams, the filtered
//! Weisfeiler-Lehman graph filtration kernel, and Gram matrix assembly.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::{BufRead, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filtration::FilteredGraph;
use crate::persistence::{PersistenceDiagram, MAX_DEGREE};
use crate::rng::splitmix64;
use crate::textio;

/// Essential deaths are replaced by this multiple of the largest finite
/// filtration value in the dataset.
pub const ESSENTIAL_CAP_FACTOR: f64 = 1.1;

#[derive(Clone, Debug, PartialEq)]
pub struct KernelParams {
    pub sigma: f64,
    pub gamma: f64,
    pub wl_depth: usize,
    pub n_levels: usize,
    pub degree_weights: [f64; 3],
    /// Absolute value substituted for infinite deaths. `None` derives it from
    /// the dataset.
    pub essential_cap: Option<f64>,
}

impl Default for KernelParams {
    fn default() -> Self {
        Self {
            sigma: 1.0,
            gamma: 1.0,
            wl_depth: 3,
            n_levels: 10,
            degree_weights: [1.0; 3],
            essential_cap: None,
        }
    }
}

impl KernelParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(m.to_string()));
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad("sigma must be positive");
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad("gamma must be positive");
        }
        if self.n_levels == 0 {
            return bad("need at least one threshold level");
        }
        if self.degree_weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return bad("degree weights must be non-negative");
        }
        if let Some(c) = self.essential_cap {
            if !(c >= 0.0 && c.is_finite()) {
                return bad("essential cap must be a finite non-negative value");
            }
        }
        Ok(())
    }
}

/// Symmetric matrix of kernel values with one id per row.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix {
    ids: Vec<String>,
    values: Vec<f64>,
}

impl GramMatrix {
    pub fn new(ids: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let n = ids.len();
        if values.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "{} values for {} ids, expected {}",
                values.len(),
                n,
                n * n
            )));
        }
        if let Some(id) = ids.iter().find(|s| s.contains([',', '\n', '\r'])) {
            return Err(Error::InvalidInput(format!("graph id {id:?} contains a separator")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite kernel value".into()));
        }
        let g = Self { ids, values };
        for i in 0..n {
            for j in 0..i {
                let (a, b) = (g.get(i, j), g.get(j, i));
                if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                    return Err(Error::InvalidInput(format!("matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(g)
    }

    fn from_upper(ids: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = ids.len();
        let mut values = vec![0.0; n * n];
        for (i, row) in rows.iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                let j = i + k;
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        Self::new(ids, values)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ids.len() + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn trace(&self) -> f64 {
        (0..self.len()).map(|i| self.get(i, i)).sum()
    }

    /// Rows `rows`, columns `cols`.
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> Vec<Vec<f64>> {
        rows.iter()
            .map(|&i| cols.iter().map(|&j| self.get(i, j)).collect())
            .collect()
    }

    /// Entry-wise `a * self + b * other`; ids must agree.
    pub fn combine(&self, a: f64, other: &GramMatrix, b: f64) -> Result<GramMatrix> {
        if self.ids != other.ids {
            return Err(Error::InvalidInput("gram matrices cover different graphs".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Self::new(self.ids.clone(), values)
    }

    pub fn write_to(&self, w: &mut dyn Write) -> std::io::Result<()> {
        writeln!(w, "{}", self.ids.join(","))?;
        let n = self.len();
        for i in 0..n {
            let row: Vec<String> = (0..n).map(|j| textio::fmt_f64(self.get(i, j))).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        textio::write_atomic(path, |w| self.write_to(w))
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        Self::parse(textio::open_text(path)?)
    }

    pub fn parse<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let ids: Vec<String> = match lines.next() {
            Some((_, l)) => {
                let l = l.map_err(|e| Error::io("<input>", e))?;
                if l.trim().is_empty() {
                    Vec::new()
                } else {
                    l.trim().split(',').map(|s| s.trim().to_string()).collect()
                }
            }
            None => return Err(Error::parse(1, "missing id row")),
        };
        let mut values = Vec::with_capacity(ids.len() * ids.len());
        let mut rows = 0;
        for (i, line) in lines {
            let line = line.map_err(|e| Error::io("<input>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            let before = values.len();
            for tok in line.trim().split(',') {
                values.push(
                    tok.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::parse(i + 1, format!("bad number {tok:?}")))?,
                );
            }
            if values.len() - before != ids.len() {
                return Err(Error::parse(i + 1, format!("expected {} columns", ids.len())));
            }
            rows += 1;
        }
        if rows != ids.len() {
            return Err(Error::parse(
                rows + 1,
                format!("expected {} rows, found {rows}", ids.len()),
            ));
        }
        Self::new(ids, values)
    }
}

/// Gram matrix of a symmetric pairwise kernel. The upper triangle is
/// computed in parallel, one row per task.
fn symmetric_gram<T, F>(ids: Vec<String>, items: &[T], kernel: F) -> Result<GramMatrix>
where
    T: Sync,
    F: Fn(&T, &T) -> Result<f64> + Sync,
{
    if ids.len() != items.len() {
        return Err(Error::InvalidInput(format!(
            "{} ids for {} graphs",
            ids.len(),
            items.len()
        )));
    }
    let rows: Vec<Vec<f64>> = (0..items.len())
        .into_par_iter()
        .map(|i| {
            (i..items.len())
                .map(|j| kernel(&items[i], &items[j]))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    GramMatrix::from_upper(ids, rows)
}

// ---------------------------------------------------------------------------
// Persistence scale space kernel

/// Scale space kernel between two diagrams of one degree, given as
/// `(birth, death)` pairs.
pub fn pss_kernel(d1: &[(f64, f64)], d2: &[(f64, f64)], sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidInput("sigma must be positive".into()));
    }
    if d1.iter().chain(d2).any(|&(b, d)| !b.is_finite() || !d.is_finite()) {
        return Err(Error::InvalidInput(
            "diagram has a non-finite point; cap essential classes first".into(),
        ));
    }
    // Fixed argument order so that k(D, D') and k(D', D) agree bit for bit.
    let (d1, d2) = if diagram_cmp(d1, d2).is_gt() {
        (d2, d1)
    } else {
        (d1, d2)
    };
    let scale = 1.0 / (8.0 * sigma);
    let mut sum = 0.0;
    for &(px, py) in d1 {
        for &(qx, qy) in d2 {
            let near = (px - qx).powi(2) + (py - qy).powi(2);
            let mirrored = (px - qy).powi(2) + (py - qx).powi(2);
            sum += (-near * scale).exp() - (-mirrored * scale).exp();
        }
    }
    Ok(sum / (8.0 * PI * sigma * sigma))
}

fn diagram_cmp(a: &[(f64, f64)], b: &[(f64, f64)]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        a.iter()
            .zip(b)
            .map(|(p, q)| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    })
}

/// Value substituted for infinite deaths: the configured cap, or
/// [`ESSENTIAL_CAP_FACTOR`] times the largest finite value seen in any
/// diagram (or its source graph).
pub fn essential_cap(diagrams: &[PersistenceDiagram], params: &KernelParams) -> f64 {
    if let Some(c) = params.essential_cap {
        return c;
    }
    let max = diagrams
        .iter()
        .flat_map(|d| {
            d.points
                .iter()
                .flat_map(|p| [p.birth, p.death])
                .chain(d.max_edge_value)
                .filter(|x| x.is_finite())
        })
        .fold(0.0f64, f64::max);
    ESSENTIAL_CAP_FACTOR * max
}

/// Weighted sum over degrees 0..=2 of per-degree scale space Gram matrices.
/// Essential points are capped per [`essential_cap`].
pub fn pss_gram(ids: Vec<String>, diagrams: &[PersistenceDiagram], params: &KernelParams) -> Result<GramMatrix> {
    params.validate()?;
    let cap = essential_cap(diagrams, params);
    let slices: Vec<[Vec<(f64, f64)>; MAX_DEGREE + 1]> = diagrams
        .iter()
        .map(|d| {
            let c = d.cap_essential(cap);
            [c.degree(0), c.degree(1), c.degree(2)]
        })
        .collect();
    symmetric_gram(ids, &slices, |a, b| {
        let mut k = 0.0;
        for (d, &w) in params.degree_weights.iter().enumerate() {
            if w != 0.0 {
                k += w * pss_kernel(&a[d], &b[d], params.sigma)?;
            }
        }
        Ok(k)
    })
}

// ---------------------------------------------------------------------------
// Graph filtration kernel

/// Threshold levels shared by every graph of a dataset. Level `i` keeps the
/// finite edges with (mapped) value at least `thresholds[i]`; thresholds are
/// descending so each level contains the previous one.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSet {
    pub thresholds: Vec<f64>,
    /// For sublevel filtrations, values are mapped to `reference - w`.
    pub reference: Option<f64>,
}

impl LevelSet {
    /// Levels at the 1.0, 0.9, ... quantiles (`n_levels` of them) of the
    /// pooled edge values, plus the full graph at 0. Sublevel values are
    /// flipped against the dataset maximum first.
    pub fn from_dataset(graphs: &[FilteredGraph], n_levels: usize, sublevel: bool) -> Self {
        let reference = if sublevel {
            Some(graphs.iter().filter_map(|g| g.max_finite_value()).fold(0.0, f64::max))
        } else {
            None
        };
        let probe = Self {
            thresholds: Vec::new(),
            reference,
        };
        let mut pooled: Vec<f64> = graphs
            .iter()
            .flat_map(|g| g.edges().iter().map(|e| probe.map_value(e.value)))
            .filter(|v| v.is_finite())
            .collect();
        pooled.sort_by(f64::total_cmp);
        let mut thresholds = Vec::with_capacity(n_levels + 1);
        if !pooled.is_empty() {
            let last = (pooled.len() - 1) as f64;
            for k in 0..n_levels {
                let q = 1.0 - k as f64 / n_levels as f64;
                thresholds.push(pooled[(q * last).round() as usize]);
            }
        }
        thresholds.push(0.0);
        thresholds.dedup();
        Self { thresholds, reference }
    }

    pub fn map_value(&self, w: f64) -> f64 {
        match self.reference {
            Some(m) if w.is_finite() => (m - w).max(0.0),
            _ => w,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiltrationHistograms {
    pub thresholds: Vec<f64>,
    /// Feature id to per-level counts.
    pub features: BTreeMap<u64, Vec<u32>>,
}

impl FiltrationHistograms {
    pub fn mass(&self, feature: u64) -> u64 {
        self.features
            .get(&feature)
            .map_or(0, |c| c.iter().map(|&x| x as u64).sum())
    }
}

fn wl_feature(round: usize, label: u64) -> u64 {
    splitmix64(label ^ splitmix64(round as u64 ^ 0x5157_4c46))
}

fn wl_relabel(own: u64, mut neighbors: Vec<u64>) -> u64 {
    neighbors.sort_unstable();
    let mut h = splitmix64(own);
    for l in neighbors {
        h = splitmix64(h ^ l);
    }
    h
}

/// Per-level WL feature counts. At each level, `h` refinement rounds run from
/// a uniform initial label; every vertex contributes one feature per round.
/// Values are mapped through `levels` before thresholding.
pub fn wl_filtration_histograms(g: &FilteredGraph, levels: &LevelSet, h: usize) -> FiltrationHistograms {
    let n = g.n_vertices();
    let mut features: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    let n_levels = levels.thresholds.len();
    let mapped: Vec<(usize, usize, f64)> = g
        .edges()
        .iter()
        .map(|e| (e.u, e.v, levels.map_value(e.value)))
        .filter(|e| e.2.is_finite())
        .collect();
    for (li, &alpha) in levels.thresholds.iter().enumerate() {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(u, v, w) in &mapped {
            if w >= alpha {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        let mut labels = vec![0u64; n];
        for round in 0..=h {
            if round > 0 {
                labels = (0..n)
                    .map(|v| wl_relabel(labels[v], adj[v].iter().map(|&x| labels[x]).collect()))
                    .collect();
            }
            for &l in &labels {
                features
                    .entry(wl_feature(round, l))
                    .or_insert_with(|| vec![0; n_levels])[li] += 1;
            }
        }
    }
    FiltrationHistograms {
        thresholds: levels.thresholds.clone(),
        features,
    }
}

/// 1-Wasserstein distance between two histograms over the support points
/// `support`, with ground distance `|a - b|`. Histograms are normalized here.
pub fn wasserstein_1d(h1: &[f64], h2: &[f64], support: &[f64]) -> Result<f64> {
    if h1.len() != support.len() || h2.len() != support.len() {
        return Err(Error::InvalidInput("histogram length differs from the support".into()));
    }
    let m1: f64 = h1.iter().sum();
    let m2: f64 = h2.iter().sum();
    if !(m1 > 0.0 && m2 > 0.0) || h1.iter().chain(h2).any(|&x| x < 0.0) {
        return Err(Error::InvalidInput(
            "histograms need positive mass and no negative bins".into(),
        ));
    }
    let mut order: Vec<usize> = (0..support.len()).collect();
    order.sort_by(|&a, &b| support[a].total_cmp(&support[b]));
    let (mut c1, mut c2, mut w) = (0.0, 0.0, 0.0);
    for k in 0..order.len().saturating_sub(1) {
        c1 += h1[order[k]] / m1;
        c2 += h2[order[k]] / m2;
        w += (c1 - c2).abs() * (support[order[k + 1]] - support[order[k]]);
    }
    Ok(w)
}

/// Sum over features present in both graphs of
/// `exp(-gamma * W) * mass(G) * mass(G')`.
pub fn filtration_kernel(a: &FiltrationHistograms, b: &FiltrationHistograms, gamma: f64) -> Result<f64> {
    if a.thresholds != b.thresholds {
        return Err(Error::InvalidInput(
            "histograms were computed on different levels".into(),
        ));
    }
    let mut k = 0.0;
    let (mut ia, mut ib) = (a.features.iter().peekable(), b.features.iter().peekable());
    while let (Some(&(fa, ca)), Some(&(fb, cb))) = (ia.peek(), ib.peek()) {
        match fa.cmp(fb) {
            std::cmp::Ordering::Less => {
                ia.next();
            }
            std::cmp::Ordering::Greater => {
                ib.next();
            }
            std::cmp::Ordering::Equal => {
                let ha: Vec<f64> = ca.iter().map(|&x| x as f64).collect();
                let hb: Vec<f64> = cb.iter().map(|&x| x as f64).collect();
                let ma: f64 = ha.iter().sum();
                let mb: f64 = hb.iter().sum();
                let w = if ca == cb {
                    0.0
                } else {
                    wasserstein_1d(&ha, &hb, &a.thresholds)?
                };
                k += (-gamma * w).exp() * ma * mb;
                ia.next();
                ib.next();
            }
        }
    }
    Ok(k)
}

pub fn histogram_gram(ids: Vec<String>, hists: &[FiltrationHistograms], gamma: f64) -> Result<GramMatrix> {
    symmetric_gram(ids, hists, |a, b| filtration_kernel(a, b, gamma))
}

/// Levels from the whole dataset, histograms per graph, then the pairwise
/// filtration kernel.
pub fn filtration_gram(
    ids: Vec<String>,
    graphs: &[FilteredGraph],
    sublevel: bool,
    params: &KernelParams,
) -> Result<GramMatrix> {
    params.validate()?;
    let levels = LevelSet::from_dataset(graphs, params.n_levels, sublevel);
    let hists: Vec<FiltrationHistograms> = graphs
        .par_iter()
        .map(|g| wl_filtration_histograms(g, &levels, params.wl_depth))
        .collect();
    histogram_gram(ids, &hists, params.gamma)
}
