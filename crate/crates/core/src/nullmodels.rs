//! Randomized reference models for temporal graphs.
//!
//! * TP (time perturbation) moves a fraction of timestamps forward by less than `epsilon`.
//! * EWLSS swaps whole label sets between static edges with equal label counts.
//! * RE rewires pairs of static edges by exchanging endpoints; each edge keeps
//!   its label set.
//! * CM replaces the aggregate graph by a configuration-model rewiring with the
//!   same degree sequence, redistributes the label sets, then shuffles all
//!   timestamps.
//!
//! Every model is deterministic in its [`RngSeed`].

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{self, RngSeed};
use crate::tgraph::TemporalGraph;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NullModel {
    Tp {
        fraction: f64,
        epsilon: f64,
    },
    Ewlss {
        steps: usize,
    },
    /// `steps` edge exchanges; edge `k mod |E_s|` is visited at step `k`, so
    /// `|E_s|` steps make one full pass.
    Re {
        steps: usize,
    },
    Cm,
}

impl NullModel {
    pub fn apply(&self, t: &TemporalGraph, seed: RngSeed) -> Result<TemporalGraph> {
        match *self {
            NullModel::Tp { fraction, epsilon } => tp_perturb(t, fraction, epsilon, seed),
            NullModel::Ewlss { steps } => ewlss_shuffle(t, steps, seed),
            NullModel::Re { steps } => re_shuffle(t, steps, seed),
            NullModel::Cm => cm_rewire(t, seed),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NullModel::Tp { .. } => "tp",
            NullModel::Ewlss { .. } => "ewlss",
            NullModel::Re { .. } => "re",
            NullModel::Cm => "cm",
        }
    }
}

impl fmt::Display for NullModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NullModel::Tp { fraction, epsilon } => write!(f, "tp(fraction={fraction}, epsilon={epsilon})"),
            NullModel::Ewlss { steps } => write!(f, "ewlss(steps={steps})"),
            NullModel::Re { steps } => write!(f, "re(steps={steps})"),
            NullModel::Cm => write!(f, "cm"),
        }
    }
}

/// A model together with the seed it runs under.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NullModelSpec {
    pub model: NullModel,
    pub seed: RngSeed,
}

impl NullModelSpec {
    pub fn apply(&self, t: &TemporalGraph) -> Result<TemporalGraph> {
        self.model.apply(t, self.seed)
    }
}

/// Moves `ceil(fraction * |E|)` uniformly chosen timestamps `t` to `t + d`
/// with `d` uniform on `(0, epsilon)`.
///
/// Shifts go forward only. Independent shifts in both directions can move
/// the gap between two adjacent edges by almost `2 epsilon`; one-sided
/// shifts keep every gap, and so every average, within `epsilon`.
pub fn tp_perturb(t: &TemporalGraph, fraction: f64, epsilon: f64, seed: RngSeed) -> Result<TemporalGraph> {
    tp_shift(t, fraction, 0.0, epsilon, seed)
}

/// Like [`tp_perturb`] with `d` uniform on `[min_shift, max_shift)`
/// (`(0, max_shift)` when `min_shift` is 0).
pub fn tp_shift(
    t: &TemporalGraph,
    fraction: f64,
    min_shift: f64,
    max_shift: f64,
    seed: RngSeed,
) -> Result<TemporalGraph> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidInput(format!("TP fraction {fraction} outside [0, 1]")));
    }
    if !(max_shift > 0.0 && max_shift.is_finite()) {
        return Err(Error::InvalidInput(format!("TP epsilon {max_shift} must be positive")));
    }
    if !(min_shift >= 0.0 && min_shift < max_shift) {
        return Err(Error::InvalidInput(format!(
            "TP shift range [{min_shift}, {max_shift}) is empty"
        )));
    }
    let m = t.n_edges();
    let k = ((fraction * m as f64).ceil() as usize).min(m);
    if k == 0 {
        return Ok(t.clone());
    }
    let mut rng = seed.rng();
    let mut ts = t.timestamps();
    for i in rng::sample_indices(&mut rng, m, k) {
        let old = ts[i];
        loop {
            let new = old + min_shift + (max_shift - min_shift) * rng.gen::<f64>();
            let moved = new - old;
            if moved > 0.0 && moved >= min_shift && moved < max_shift {
                ts[i] = new;
                break;
            }
        }
    }
    t.with_timestamps(&ts)
}

/// EWLSS with the list of swapped aggregate-edge pairs (indices into
/// `t.aggregate().pairs()`), in the order applied.
pub fn ewlss_shuffle_traced(
    t: &TemporalGraph,
    steps: usize,
    seed: RngSeed,
) -> Result<(TemporalGraph, Vec<(usize, usize)>)> {
    let agg = t.aggregate();
    let mut by_count: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for e in 0..agg.n_edges() {
        by_count.entry(agg.multiplicity(e)).or_default().push(e);
    }
    let groups: Vec<Vec<usize>> = by_count.into_values().filter(|g| g.len() >= 2).collect();
    if groups.is_empty() {
        return Err(Error::Infeasible(
            "EWLSS needs two static edges with the same number of time labels".into(),
        ));
    }
    if steps == 0 {
        return Ok((t.clone(), Vec::new()));
    }
    // Pick a group with probability proportional to its number of edge pairs,
    // so every eligible pair is equally likely.
    let mut cumulative = Vec::with_capacity(groups.len());
    let mut total = 0u64;
    for g in &groups {
        let n = g.len() as u64;
        total += n * (n - 1) / 2;
        cumulative.push(total);
    }
    let mut rng = seed.rng();
    let mut labels: Vec<Vec<f64>> = agg.all_labels().to_vec();
    let mut swaps = Vec::with_capacity(steps);
    for _ in 0..steps {
        let r = rng.gen_range(0..total);
        let g = &groups[cumulative.partition_point(|&c| c <= r)];
        let a = rng::index(&mut rng, g.len());
        let mut b = rng::index(&mut rng, g.len() - 1);
        if b >= a {
            b += 1;
        }
        labels.swap(g[a], g[b]);
        swaps.push((g[a], g[b]));
    }
    let out = TemporalGraph::from_pair_labels(t.vertex_names().to_vec(), agg.pairs(), &labels)?;
    Ok((out, swaps))
}

pub fn ewlss_shuffle(t: &TemporalGraph, steps: usize, seed: RngSeed) -> Result<TemporalGraph> {
    ewlss_shuffle_traced(t, steps, seed).map(|(g, _)| g)
}

/// Aggregate edges with attached label sets, rewired in place by endpoint
/// exchanges that never create self loops or parallel edges.
pub(crate) struct EdgeRewirer {
    pairs: Vec<(usize, usize)>,
    present: HashSet<(usize, usize)>,
}

fn canon(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl EdgeRewirer {
    pub(crate) fn new(pairs: &[(usize, usize)]) -> Self {
        Self {
            pairs: pairs.to_vec(),
            present: pairs.iter().copied().collect(),
        }
    }

    /// Exchanges endpoints of edges `i = (u, v)` and `j = (u', v')`: crossed
    /// gives `(u, v'), (u', v)`, otherwise `(u, u'), (v, v')`. Edge `i` keeps
    /// `u` either way. Returns false (and changes nothing) when the result
    /// would not be simple.
    pub(crate) fn try_exchange(&mut self, i: usize, j: usize, crossed: bool) -> bool {
        if i == j {
            return false;
        }
        let (u, v) = self.pairs[i];
        let (u2, v2) = self.pairs[j];
        let (a, b) = if crossed {
            ((u, v2), (u2, v))
        } else {
            ((u, u2), (v, v2))
        };
        if a.0 == a.1 || b.0 == b.1 {
            return false;
        }
        let (a, b) = (canon(a.0, a.1), canon(b.0, b.1));
        if a == b || self.present.contains(&a) || self.present.contains(&b) {
            return false;
        }
        self.present.remove(&self.pairs[i]);
        self.present.remove(&self.pairs[j]);
        self.present.insert(a);
        self.present.insert(b);
        self.pairs[i] = a;
        self.pairs[j] = b;
        true
    }

    pub(crate) fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

/// Randomized edges: at step `k` the edge `k mod |E_s|` is exchanged with a
/// uniformly chosen other edge, crossed or uncrossed with probability 1/2.
/// Exchanges that would break simplicity are skipped.
pub fn re_shuffle(t: &TemporalGraph, steps: usize, seed: RngSeed) -> Result<TemporalGraph> {
    let agg = t.aggregate();
    let m = agg.n_edges();
    if m < 2 || steps == 0 {
        return Ok(t.clone());
    }
    let mut rng = seed.rng();
    let mut rewirer = EdgeRewirer::new(agg.pairs());
    for k in 0..steps {
        let i = k % m;
        let mut j = rng::index(&mut rng, m - 1);
        if j >= i {
            j += 1;
        }
        let crossed = rng.gen_bool(0.5);
        rewirer.try_exchange(i, j, crossed);
    }
    TemporalGraph::from_pair_labels(t.vertex_names().to_vec(), rewirer.pairs(), agg.all_labels())
}

pub const CM_MAX_RETRIES: usize = 100;

pub fn cm_rewire(t: &TemporalGraph, seed: RngSeed) -> Result<TemporalGraph> {
    cm_rewire_with_retries(t, seed, CM_MAX_RETRIES)
}

/// Configuration-model null graph.
///
/// Stubs are matched in random order. A stub whose random partner would form
/// a self loop or a repeated edge is re-paired with another random stub; if
/// no valid partner turns up, a random existing edge is split to absorb the
/// pair (a degree-preserving repair). An attempt that still fails restarts
/// the matching, up to `max_retries` times.
pub fn cm_rewire_with_retries(t: &TemporalGraph, seed: RngSeed, max_retries: usize) -> Result<TemporalGraph> {
    let agg = t.aggregate();
    let mut rng = seed.rng();
    let degrees = agg.degrees();
    let mut pairs = None;
    for _ in 0..max_retries.max(1) {
        if let Some(p) = match_stubs(&degrees, &mut rng) {
            pairs = Some(p);
            break;
        }
    }
    let Some(mut pairs) = pairs else {
        return Err(Error::Infeasible(format!(
            "configuration-model stub matching failed after {max_retries} attempts"
        )));
    };
    pairs.sort_unstable();

    let mut label_sets: Vec<Vec<f64>> = agg.all_labels().to_vec();
    rng::shuffle(&mut rng, &mut label_sets);
    let mut stamps: Vec<f64> = label_sets.iter().flatten().copied().collect();
    rng::shuffle(&mut rng, &mut stamps);
    let mut it = stamps.into_iter();
    for set in &mut label_sets {
        for slot in set.iter_mut() {
            *slot = it.next().expect("same number of timestamps");
        }
    }
    TemporalGraph::from_pair_labels(t.vertex_names().to_vec(), &pairs, &label_sets)
}

fn match_stubs<R: Rng>(degrees: &[usize], rng: &mut R) -> Option<Vec<(usize, usize)>> {
    const PARTNER_TRIES: usize = 50;
    const REPAIR_TRIES: usize = 200;
    let mut stubs: Vec<usize> = degrees
        .iter()
        .enumerate()
        .flat_map(|(v, &d)| std::iter::repeat_n(v, d))
        .collect();
    rng::shuffle(rng, &mut stubs);
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(stubs.len() / 2);
    let mut present: HashSet<(usize, usize)> = HashSet::with_capacity(stubs.len() / 2);
    let valid = |a: usize, b: usize, present: &HashSet<(usize, usize)>| a != b && !present.contains(&canon(a, b));

    while let Some(a) = stubs.pop() {
        if stubs.is_empty() {
            return None;
        }
        let mut partner = None;
        for _ in 0..PARTNER_TRIES {
            let k = rng::index(rng, stubs.len());
            if valid(a, stubs[k], &present) {
                partner = Some(k);
                break;
            }
        }
        if let Some(k) = partner {
            let b = stubs.swap_remove(k);
            present.insert(canon(a, b));
            edges.push(canon(a, b));
            continue;
        }
        // Repair: take any remaining stub b and an existing edge (c, d), and
        // replace it by (a, c), (b, d) or (a, d), (b, c).
        let k = rng::index(rng, stubs.len());
        let b = stubs.swap_remove(k);
        let mut fixed = false;
        for _ in 0..REPAIR_TRIES {
            if edges.is_empty() {
                break;
            }
            let idx = rng::index(rng, edges.len());
            let (c, d) = edges[idx];
            let (c, d) = if rng.gen_bool(0.5) { (c, d) } else { (d, c) };
            let e1 = canon(a, c);
            let e2 = canon(b, d);
            if a != c && b != d && e1 != e2 && !present.contains(&e1) && !present.contains(&e2) {
                present.remove(&edges[idx]);
                edges.swap_remove(idx);
                present.insert(e1);
                present.insert(e2);
                edges.push(e1);
                edges.push(e2);
                fixed = true;
                break;
            }
        }
        if !fixed {
            return None;
        }
    }
    Some(edges)
}
