//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tempofilt::filtration::FilteredGraph;
use tempofilt::persistence::{PersistenceDiagram, PersistencePoint};
use tempofilt::tgraph::{TemporalEdge, TemporalGraph};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random temporal graph with `m` temporal edges on `n` vertices. With
/// `single`, every vertex pair carries at most one edge.
pub fn random_tgraph(r: &mut ChaCha8Rng, n: usize, m: usize, single: bool, integer_times: bool) -> TemporalGraph {
    let mut used = BTreeSet::new();
    let mut edges = Vec::new();
    let max_pairs = n * (n - 1) / 2;
    while edges.len() < m {
        if single && used.len() == max_pairs {
            break;
        }
        let u = r.gen_range(0..n);
        let v = r.gen_range(0..n);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if single && !used.insert(key) {
            continue;
        }
        let t = if integer_times {
            r.gen_range(0..50) as f64
        } else {
            r.gen_range(0.0..100.0)
        };
        edges.push((u, v, t));
    }
    TemporalGraph::new(n, edges).unwrap()
}

/// Average filtration straight from the definition: for each static edge,
/// the mean absolute time difference between its labels and all temporal
/// edges sharing exactly one endpoint, over the number of those edges.
pub fn naive_average(t: &TemporalGraph) -> HashMap<(usize, usize), f64> {
    let mut labels: HashMap<(usize, usize), Vec<f64>> = HashMap::new();
    for e in t.edges() {
        labels.entry((e.u, e.v)).or_default().push(e.t);
    }
    let mut out = HashMap::new();
    for (&(u, v), ts) in &labels {
        let nbrs: Vec<&TemporalEdge> = t
            .edges()
            .iter()
            .filter(|e| (e.u, e.v) != (u, v) && (e.touches(u) || e.touches(v)))
            .collect();
        let value = if nbrs.is_empty() {
            f64::INFINITY
        } else {
            let mut sum = 0.0;
            for &a in ts {
                for b in &nbrs {
                    sum += (a - b.t).abs();
                }
            }
            sum / nbrs.len() as f64
        };
        out.insert((u, v), value);
    }
    out
}

/// Minimum filtration from the definition (single-labeled graphs).
pub fn naive_minimum(t: &TemporalGraph) -> HashMap<(usize, usize), f64> {
    let mut out = HashMap::new();
    for e in t.edges() {
        let m = t
            .edges()
            .iter()
            .filter(|f| (f.u, f.v) != (e.u, e.v) && (f.touches(e.u) || f.touches(e.v)))
            .map(|f| (e.t - f.t).abs())
            .fold(f64::INFINITY, f64::min);
        out.insert((e.u, e.v), m);
    }
    out
}

pub fn values(g: &FilteredGraph) -> HashMap<(usize, usize), f64> {
    g.edges().iter().map(|e| ((e.u, e.v), e.value)).collect()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a == b) || (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Largest entry-wise difference between two filtrations of the same
/// aggregate graph; equal infinities count as 0.
pub fn linf(a: &FilteredGraph, b: &FilteredGraph) -> f64 {
    let (va, vb) = (values(a), values(b));
    assert_eq!(va.len(), vb.len());
    va.iter()
        .map(|(k, &x)| {
            let y = vb[k];
            if x == y {
                0.0
            } else {
                (x - y).abs()
            }
        })
        .fold(0.0, f64::max)
}

/// Random filtered graph: each pair becomes an edge with probability `p`,
/// value drawn from a few integers so that ties are common.
pub fn random_filtered(r: &mut ChaCha8Rng, n: usize, p: f64, n_values: u32) -> FilteredGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.gen::<f64>() < p {
                edges.push((u, v, r.gen_range(0..n_values) as f64));
            }
        }
    }
    FilteredGraph::new(n, edges).unwrap()
}

/// Persistence by full boundary-matrix reduction over Z/2 without any
/// shortcut, on the clique complex enumerated from all vertex subsets.
pub fn naive_persistence(g: &FilteredGraph, drop_zero: bool) -> Vec<PersistencePoint> {
    let n = g.n_vertices();
    let val = |a: usize, b: usize| g.value(a, b).filter(|v| v.is_finite());
    let mut simplices: Vec<(f64, Vec<usize>)> = (0..n).map(|v| (0.0, vec![v])).collect();
    let mut grow: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    for _ in 1..4 {
        let mut next = Vec::new();
        for s in &grow {
            for w in s.last().unwrap() + 1..n {
                if s.iter().all(|&x| val(x, w).is_some()) {
                    let mut t = s.clone();
                    t.push(w);
                    let mut m: f64 = 0.0;
                    for i in 0..t.len() {
                        for j in i + 1..t.len() {
                            m = m.max(val(t[i], t[j]).unwrap());
                        }
                    }
                    simplices.push((m, t.clone()));
                    next.push(t);
                }
            }
        }
        grow = next;
    }
    simplices.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.len().cmp(&b.1.len())).then(a.1.cmp(&b.1)));
    let index: HashMap<Vec<usize>, usize> = simplices.iter().enumerate().map(|(i, s)| (s.1.clone(), i)).collect();
    let mut cols: Vec<BTreeSet<usize>> = simplices
        .iter()
        .map(|(_, s)| {
            if s.len() == 1 {
                return BTreeSet::new();
            }
            (0..s.len())
                .map(|k| {
                    let mut f = s.clone();
                    f.remove(k);
                    index[&f]
                })
                .collect()
        })
        .collect();
    let mut low_of: HashMap<usize, usize> = HashMap::new();
    for j in 0..cols.len() {
        while let Some(&low) = cols[j].iter().next_back() {
            match low_of.get(&low) {
                Some(&k) => {
                    let other = cols[k].clone();
                    cols[j] = cols[j].symmetric_difference(&other).copied().collect();
                }
                None => {
                    low_of.insert(low, j);
                    break;
                }
            }
        }
    }
    let mut points = Vec::new();
    for (i, (v, s)) in simplices.iter().enumerate() {
        let dim = s.len() - 1;
        if dim > 2 {
            continue;
        }
        if let Some(&j) = low_of.get(&i) {
            let d = simplices[j].0;
            if !(drop_zero && d == *v) {
                points.push(PersistencePoint {
                    dim,
                    birth: *v,
                    death: d,
                });
            }
        } else if cols[i].is_empty() {
            points.push(PersistencePoint {
                dim,
                birth: *v,
                death: f64::INFINITY,
            });
        }
    }
    PersistenceDiagram::new(points).points
}

/// Values of the edges Kruskal's algorithm adds, and the number of
/// components of the finite-valued graph.
pub fn kruskal(g: &FilteredGraph) -> (Vec<f64>, usize) {
    let n = g.n_vertices();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut edges: Vec<_> = g.edges().iter().filter(|e| e.value.is_finite()).collect();
    edges.sort_by(|a, b| a.value.total_cmp(&b.value));
    let mut taken = Vec::new();
    for e in edges {
        let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
        if a != b {
            parent[a] = b;
            taken.push(e.value);
        }
    }
    let comps = n - taken.len();
    (taken, comps)
}

/// Exact bottleneck distance between two diagrams of finite points, by
/// threshold search over candidate distances with bipartite matching.
pub fn bottleneck(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let diag = |p: &(f64, f64)| (p.1 - p.0) / 2.0;
    let dist = |p: &(f64, f64), q: &(f64, f64)| (p.0 - q.0).abs().max((p.1 - q.1).abs());
    // Left: a points then one diagonal slot per b point. Right: b points then
    // one diagonal slot per a point.
    let (na, nb) = (a.len(), b.len());
    let size = na + nb;
    let cost = |i: usize, j: usize| -> f64 {
        match (i < na, j < nb) {
            (true, true) => dist(&a[i], &b[j]),
            (true, false) => {
                if j - nb == i {
                    diag(&a[i])
                } else {
                    f64::INFINITY
                }
            }
            (false, true) => {
                if i - na == j {
                    diag(&b[j])
                } else {
                    f64::INFINITY
                }
            }
            (false, false) => 0.0,
        }
    };
    let mut cands: Vec<f64> = Vec::new();
    for i in 0..size {
        for j in 0..size {
            let c = cost(i, j);
            if c.is_finite() {
                cands.push(c);
            }
        }
    }
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    let perfect = |thr: f64| -> bool {
        let mut match_r: Vec<Option<usize>> = vec![None; size];
        fn augment(
            i: usize,
            thr: f64,
            size: usize,
            cost: &dyn Fn(usize, usize) -> f64,
            seen: &mut [bool],
            match_r: &mut [Option<usize>],
        ) -> bool {
            for j in 0..size {
                if cost(i, j) <= thr && !seen[j] {
                    seen[j] = true;
                    if match_r[j].is_none() || augment(match_r[j].unwrap(), thr, size, cost, seen, match_r) {
                        match_r[j] = Some(i);
                        return true;
                    }
                }
            }
            false
        }
        (0..size).all(|i| {
            let mut seen = vec![false; size];
            augment(i, thr, size, &cost, &mut seen, &mut match_r)
        })
    };
    let (mut lo, mut hi) = (0usize, cands.len().saturating_sub(1));
    if cands.is_empty() {
        return 0.0;
    }
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect(cands[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    cands[lo]
}

/// Minimizes `0.5 a'Qa - sum a` over `0 <= a <= c`, `y'a = 0` by trying
/// every assignment of variables to {lower bound, free, upper bound} and
/// solving the stationarity system on the free ones.
pub fn brute_force_dual(k: &[Vec<f64>], y: &[f64], c: f64) -> f64 {
    use nalgebra::{DMatrix, DVector};
    let n = y.len();
    let q = |i: usize, j: usize| y[i] * y[j] * k[i][j];
    let objective = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += 0.5 * a[i] * a[j] * q(i, j);
            }
        }
        s - a.iter().sum::<f64>()
    };
    let mut best = f64::INFINITY;
    for code in 0..3usize.pow(n as u32) {
        let mut state = vec![0u8; n];
        let mut x = code;
        for s in state.iter_mut() {
            *s = (x % 3) as u8;
            x /= 3;
        }
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 1).collect();
        let mut a: Vec<f64> = state.iter().map(|&s| if s == 2 { c } else { 0.0 }).collect();
        if !free.is_empty() {
            let f = free.len();
            let mut m = DMatrix::<f64>::zeros(f + 1, f + 1);
            let mut rhs = DVector::<f64>::zeros(f + 1);
            for (r, &i) in free.iter().enumerate() {
                for (s, &j) in free.iter().enumerate() {
                    m[(r, s)] = q(i, j);
                }
                m[(r, f)] = y[i];
                m[(f, r)] = y[i];
                rhs[r] = 1.0 - (0..n).filter(|&j| state[j] == 2).map(|j| q(i, j) * c).sum::<f64>();
            }
            rhs[f] = -(0..n).filter(|&j| state[j] == 2).map(|j| y[j] * c).sum::<f64>();
            let Some(sol) = m.lu().solve(&rhs) else { continue };
            for (r, &i) in free.iter().enumerate() {
                a[i] = sol[r];
            }
        }
        let feasible =
            a.iter().all(|&v| v >= -1e-9 && v <= c + 1e-9) && (0..n).map(|i| y[i] * a[i]).sum::<f64>().abs() < 1e-9;
        if feasible {
            best = best.min(objective(&a));
        }
    }
    best
}

/// Gram matrix of random feature vectors; positive definite almost surely.
pub fn random_psd(r: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    let x: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| r.gen_range(-1.0..1.0)).collect())
        .collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| x[i].iter().zip(&x[j]).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect()
}

/// Smallest eigenvalue of a symmetric matrix given row-major.
pub fn min_eigenvalue(n: usize, values: &[f64]) -> f64 {
    let m = nalgebra::DMatrix::from_row_slice(n, n, values);
    m.symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Random diagram with `k` points per degree, births and deaths in [0, 10].
pub fn random_diagram(r: &mut ChaCha8Rng, k: usize) -> PersistenceDiagram {
    let mut pts = Vec::new();
    for dim in 0..3 {
        for _ in 0..r.gen_range(0..=k) {
            let b: f64 = r.gen_range(0.0..10.0);
            let d = b + r.gen_range(0.0..5.0);
            pts.push(PersistencePoint {
                dim,
                birth: b,
                death: d,
            });
        }
    }
    PersistenceDiagram::new(pts)
}

pub fn random_histogram(r: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    loop {
        let h: Vec<f64> = (0..len)
            .map(|_| if r.gen_bool(0.3) { 0.0 } else { r.gen_range(0.0..1.0) })
            .collect();
        let s: f64 = h.iter().sum();
        if s > 0.0 {
            return h.iter().map(|x| x / s).collect();
        }
    }
}
