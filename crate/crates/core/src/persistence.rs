//! Flag (clique) filtrations of edge-filtered graphs and their persistence
//! diagrams over Z/2.
//!
//! Cliques up to four vertices are enumerated, so homology in degrees 0..=2
//! is exact. The boundary matrix is reduced dimension by dimension from the
//! top with clearing: once a column of dimension `d` reduces to pivot `i`,
//! column `i` (dimension `d - 1`) is known to reduce to zero and is skipped.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::filtration::FilteredGraph;
use crate::textio;

pub const DEFAULT_CLIQUE_CAP: usize = 50_000_000;

/// Highest homology degree reported.
pub const MAX_DEGREE: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilteredSimplex {
    vertices: [u32; 4],
    dim: u8,
    pub value: f64,
    /// Position in the filtration order.
    pub index: usize,
}

impl FilteredSimplex {
    fn new(vs: &[u32], value: f64) -> Self {
        let mut vertices = [u32::MAX; 4];
        vertices[..vs.len()].copy_from_slice(vs);
        Self {
            vertices,
            dim: (vs.len() - 1) as u8,
            value,
            index: 0,
        }
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices[..self.dim as usize + 1]
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    fn key(&self) -> ([u32; 4], u8) {
        (self.vertices, self.dim)
    }
}

/// Filtration order: value, then dimension, then vertices.
fn filtration_order(a: &FilteredSimplex, b: &FilteredSimplex) -> Ordering {
    a.value
        .total_cmp(&b.value)
        .then(a.dim.cmp(&b.dim))
        .then_with(|| a.vertices().cmp(b.vertices()))
}

pub fn build_flag_filtration(g: &FilteredGraph, max_dim: usize) -> Result<Vec<FilteredSimplex>> {
    build_flag_filtration_capped(g, max_dim, DEFAULT_CLIQUE_CAP)
}

/// All cliques with at most `max_dim + 1` vertices of the finite-valued part
/// of `g`, each valued by its largest edge, in filtration order. Edges at
/// `+inf` and every clique containing one are left out.
pub fn build_flag_filtration_capped(g: &FilteredGraph, max_dim: usize, cap: usize) -> Result<Vec<FilteredSimplex>> {
    let max_dim = max_dim.min(3);
    let n = g.n_vertices();
    // Forward adjacency: neighbors with a larger id, sorted.
    let mut fwd: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    for e in g.edges().iter().filter(|e| e.value.is_finite()) {
        fwd[e.u].push((e.v as u32, e.value));
    }
    for list in &mut fwd {
        list.sort_by_key(|&(w, _)| w);
    }
    let lookup = |a: u32, b: u32| -> Option<f64> {
        let list = &fwd[a as usize];
        list.binary_search_by_key(&b, |&(w, _)| w).ok().map(|i| list[i].1)
    };

    let mut out: Vec<FilteredSimplex> = (0..n as u32).map(|v| FilteredSimplex::new(&[v], 0.0)).collect();
    let too_many = |len: usize| {
        if len > cap {
            Err(Error::Resource(format!("flag filtration exceeds {cap} simplices")))
        } else {
            Ok(())
        }
    };

    // Depth-first clique extension. `cands` holds common forward neighbors of
    // the clique with the largest edge value from each to the clique.
    fn extend(
        clique: &mut Vec<u32>,
        value: f64,
        cands: &[(u32, f64)],
        max_len: usize,
        lookup: &dyn Fn(u32, u32) -> Option<f64>,
        out: &mut Vec<FilteredSimplex>,
        check: &dyn Fn(usize) -> Result<()>,
    ) -> Result<()> {
        for (k, &(c, to_clique)) in cands.iter().enumerate() {
            let v = value.max(to_clique);
            clique.push(c);
            out.push(FilteredSimplex::new(clique, v));
            check(out.len())?;
            if clique.len() < max_len {
                let next: Vec<(u32, f64)> = cands[k + 1..]
                    .iter()
                    .filter_map(|&(x, m)| lookup(c, x).map(|f| (x, m.max(f))))
                    .collect();
                if !next.is_empty() {
                    extend(clique, v, &next, max_len, lookup, out, check)?;
                }
            }
            clique.pop();
        }
        Ok(())
    }

    if max_dim >= 1 {
        let mut clique = Vec::with_capacity(4);
        for u in 0..n as u32 {
            clique.push(u);
            extend(
                &mut clique,
                0.0,
                &fwd[u as usize],
                max_dim + 1,
                &lookup,
                &mut out,
                &too_many,
            )?;
            clique.pop();
        }
    }
    out.sort_by(filtration_order);
    for (i, s) in out.iter_mut().enumerate() {
        s.index = i;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PersistencePoint {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
}

impl PersistencePoint {
    pub fn is_essential(&self) -> bool {
        self.death == f64::INFINITY
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct PersistenceDiagram {
    pub points: Vec<PersistencePoint>,
    /// Largest finite edge value of the source graph, if known. Used to cap
    /// essential classes before kernel evaluation.
    pub max_edge_value: Option<f64>,
}

impl PersistenceDiagram {
    pub fn new(mut points: Vec<PersistencePoint>) -> Self {
        points.sort_by(|a, b| {
            a.dim
                .cmp(&b.dim)
                .then(a.birth.total_cmp(&b.birth))
                .then(a.death.total_cmp(&b.death))
        });
        Self {
            points,
            max_edge_value: None,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `(birth, death)` pairs of one homology degree.
    pub fn degree(&self, dim: usize) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter(|p| p.dim == dim)
            .map(|p| (p.birth, p.death))
            .collect()
    }

    pub fn count(&self, dim: usize) -> usize {
        self.points.iter().filter(|p| p.dim == dim).count()
    }

    /// Drops finite points with persistence below `min_persistence`.
    pub fn threshold(&self, min_persistence: f64) -> Self {
        Self {
            points: self
                .points
                .iter()
                .filter(|p| p.is_essential() || p.persistence() >= min_persistence)
                .copied()
                .collect(),
            max_edge_value: self.max_edge_value,
        }
    }

    /// Replaces infinite deaths by `cap` (never below the birth).
    pub fn cap_essential(&self, cap: f64) -> Self {
        Self {
            points: self
                .points
                .iter()
                .map(|p| PersistencePoint {
                    death: if p.is_essential() { cap.max(p.birth) } else { p.death },
                    ..*p
                })
                .collect(),
            max_edge_value: self.max_edge_value,
        }
    }

    pub fn write_to(&self, w: &mut dyn Write) -> std::io::Result<()> {
        if let Some(m) = self.max_edge_value {
            writeln!(w, "#! max-edge-value {}", textio::fmt_f64(m))?;
        }
        for p in &self.points {
            writeln!(w, "{} {} {}", p.dim, textio::fmt_f64(p.birth), textio::fmt_f64(p.death))?;
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
        let mut points = Vec::new();
        let mut max_edge_value = None;
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<input>", e))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('#') {
                if let Some(("max-edge-value", v)) = textio::directive(line) {
                    max_edge_value = textio::parse_f64(v);
                }
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::parse(i + 1, "expected `dim birth death`");
            if f.len() != 3 {
                return Err(bad());
            }
            let dim = f[0].parse::<usize>().map_err(|_| bad())?;
            let birth = textio::parse_f64(f[1]).ok_or_else(bad)?;
            let death = textio::parse_f64(f[2]).ok_or_else(bad)?;
            if death < birth {
                return Err(Error::parse(i + 1, "death before birth"));
            }
            points.push(PersistencePoint { dim, birth, death });
        }
        let mut d = Self::new(points);
        d.max_edge_value = max_edge_value;
        Ok(d)
    }
}

pub fn threshold_diagram(d: &PersistenceDiagram, min_persistence: f64) -> PersistenceDiagram {
    d.threshold(min_persistence)
}

/// Symmetric difference of two ascending index lists.
fn add_columns(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Persistence pairs of a filtration in degrees 0..=2.
///
/// The filtration must list faces before cofaces (as
/// [`build_flag_filtration`] does). Unpaired simplices of dimension at most 2
/// give essential points. With `drop_zero_persistence`, pairs born and killed
/// at the same value are omitted.
pub fn compute_persistence(filtration: &[FilteredSimplex], drop_zero_persistence: bool) -> Result<PersistenceDiagram> {
    let n = filtration.len();
    let index: HashMap<([u32; 4], u8), usize> = filtration.iter().enumerate().map(|(i, s)| (s.key(), i)).collect();
    let boundary = |s: &FilteredSimplex| -> Result<Vec<usize>> {
        let vs = s.vertices();
        let mut col = Vec::with_capacity(vs.len());
        if vs.len() == 1 {
            return Ok(col);
        }
        for skip in 0..vs.len() {
            let face: Vec<u32> = vs
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != skip)
                .map(|(_, &v)| v)
                .collect();
            let key = FilteredSimplex::new(&face, 0.0).key();
            let &fi = index
                .get(&key)
                .ok_or_else(|| Error::Invariant(format!("face {face:?} missing from filtration")))?;
            col.push(fi);
        }
        col.sort_unstable();
        Ok(col)
    };

    let top = filtration.iter().map(|s| s.dim()).max().unwrap_or(0);
    let mut pivot_owner: Vec<Option<usize>> = vec![None; n];
    let mut cleared = vec![false; n];
    let mut is_death = vec![false; n];
    let mut reduced: HashMap<usize, Vec<usize>> = HashMap::new();

    for dim in (1..=top).rev() {
        for j in 0..n {
            let s = &filtration[j];
            if s.dim() != dim || cleared[j] {
                continue;
            }
            let mut col = boundary(s)?;
            if col.iter().any(|&f| f >= j) {
                return Err(Error::Invariant("a face comes after its coface".into()));
            }
            while let Some(&low) = col.last() {
                match pivot_owner[low] {
                    Some(k) => col = add_columns(&col, &reduced[&k]),
                    None => break,
                }
            }
            if let Some(&low) = col.last() {
                pivot_owner[low] = Some(j);
                cleared[low] = true;
                is_death[j] = true;
                reduced.insert(j, col);
            }
        }
    }

    let mut points = Vec::new();
    for (i, s) in filtration.iter().enumerate() {
        if s.dim() > MAX_DEGREE {
            continue;
        }
        match pivot_owner[i] {
            Some(j) => {
                let death = filtration[j].value;
                if !(drop_zero_persistence && death == s.value) {
                    points.push(PersistencePoint {
                        dim: s.dim(),
                        birth: s.value,
                        death,
                    });
                }
            }
            None if !is_death[i] => points.push(PersistencePoint {
                dim: s.dim(),
                birth: s.value,
                death: f64::INFINITY,
            }),
            None => {}
        }
    }
    let mut d = PersistenceDiagram::new(points);
    d.max_edge_value = filtration
        .iter()
        .filter(|s| s.dim() >= 1)
        .map(|s| s.value)
        .max_by(f64::total_cmp);
    Ok(d)
}

/// Flag filtration up to tetrahedra, persistence in degrees 0..=2, then
/// thresholding at `min_persistence`.
pub fn graph_persistence(g: &FilteredGraph, min_persistence: f64) -> Result<PersistenceDiagram> {
    let filtration = build_flag_filtration(g, 3)?;
    let mut d = compute_persistence(&filtration, true)?.threshold(min_persistence);
    d.max_edge_value = g.max_finite_value();
    Ok(d)
}
