//! Class populations from null models and the repeated train/test harness.

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use super::svm::{svm_predict, svm_train};
use crate::error::{Error, Result};
use crate::filtration::{FilteredGraph, FiltrationMethod};
use crate::generate::{random_temporal_graph, synthetic_contact_graph, ContactModelSpec, RandomGraphSpec};
use crate::kernels::{filtration_gram, pss_gram, GramMatrix, KernelParams};
use crate::nullmodels::{tp_shift, NullModel};
use crate::persistence::{graph_persistence, PersistenceDiagram};
use crate::rng::{self, RngSeed};
use crate::tgraph::{read_contact_sequence, ColumnOrder, TemporalGraph};

/// A null model as used by a class plan. For TP, a set `epsilon_max` turns
/// `epsilon` into a lower bound: every moved timestamp shifts by an amount
/// in `[epsilon, epsilon_max)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelPlan {
    pub model: NullModel,
    pub epsilon_max: Option<f64>,
}

impl ModelPlan {
    pub fn new(model: NullModel) -> Self {
        Self {
            model,
            epsilon_max: None,
        }
    }

    pub fn apply(&self, t: &TemporalGraph, seed: RngSeed) -> Result<TemporalGraph> {
        match (self.model, self.epsilon_max) {
            (NullModel::Tp { fraction, epsilon }, Some(hi)) => tp_shift(t, fraction, epsilon, hi, seed),
            (m, _) => m.apply(t, seed),
        }
    }
}

impl From<NullModel> for ModelPlan {
    fn from(model: NullModel) -> Self {
        Self::new(model)
    }
}

/// Parses `cm`, `re:STEPS`, `ewlss:STEPS`, `tp:FRACTION:EPS` or
/// `tp:FRACTION:EPS_MIN-EPS_MAX`.
impl FromStr for ModelPlan {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::InvalidInput(format!(
                "bad null model {s:?}; expected cm, re:N, ewlss:N or tp:F:E[-E]"
            ))
        };
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |p: &str| p.trim().parse::<f64>().map_err(|_| bad());
        let count = |p: &str| p.trim().parse::<usize>().map_err(|_| bad());
        Ok(match parts.as_slice() {
            ["cm"] => NullModel::Cm.into(),
            ["re", n] => NullModel::Re { steps: count(n)? }.into(),
            ["ewlss", n] => NullModel::Ewlss { steps: count(n)? }.into(),
            ["tp", f, e] => {
                let fraction = num(f)?;
                let (lo, hi) = match e.split_once('-') {
                    Some((a, b)) => (num(a)?, Some(num(b)?)),
                    None => (num(e)?, None),
                };
                if hi.is_some_and(|h| h <= lo) {
                    return Err(bad());
                }
                ModelPlan {
                    model: NullModel::Tp { fraction, epsilon: lo },
                    epsilon_max: hi,
                }
            }
            _ => return Err(bad()),
        })
    }
}

impl fmt::Display for ModelPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.model, self.epsilon_max) {
            (NullModel::Cm, _) => write!(f, "cm"),
            (NullModel::Re { steps }, _) => write!(f, "re:{steps}"),
            (NullModel::Ewlss { steps }, _) => write!(f, "ewlss:{steps}"),
            (NullModel::Tp { fraction, epsilon }, None) => write!(f, "tp:{fraction}:{epsilon}"),
            (NullModel::Tp { fraction, epsilon }, Some(hi)) => write!(f, "tp:{fraction}:{epsilon}-{hi}"),
        }
    }
}

/// One class: a representative derived from the root (or the root itself)
/// and `count` members generated from the representative.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassPlan {
    pub representative: Option<ModelPlan>,
    pub members: ModelPlan,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RootSource {
    File { path: PathBuf, columns: ColumnOrder },
    Random(RandomGraphSpec),
    Contact(ContactModelSpec),
    Graph(TemporalGraph),
}

impl RootSource {
    pub fn load(&self) -> Result<TemporalGraph> {
        match self {
            RootSource::File { path, columns } => read_contact_sequence(path, *columns),
            RootSource::Random(spec) => random_temporal_graph(spec),
            RootSource::Contact(spec) => {
                let c = synthetic_contact_graph(spec)?;
                if !c.connected {
                    log::warn!("contact root is not connected");
                }
                Ok(c.graph)
            }
            RootSource::Graph(g) => Ok(g.clone()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Pipeline {
    /// Filtration, persistence diagrams, scale space kernel.
    #[default]
    Ph,
    /// Filtration, WL histograms per level, graph filtration kernel.
    Fwl,
}

impl FromStr for Pipeline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ph" => Ok(Pipeline::Ph),
            "fwl" => Ok(Pipeline::Fwl),
            _ => Err(Error::InvalidInput(format!(
                "unknown pipeline {s:?}; expected ph or fwl"
            ))),
        }
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pipeline::Ph => "ph",
            Pipeline::Fwl => "fwl",
        })
    }
}

pub const GRID_C: [f64; 5] = [0.01, 0.1, 1.0, 10.0, 100.0];
pub const GRID_BANDWIDTH: [f64; 3] = [0.1, 1.0, 10.0];
const CV_FOLDS: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub root: RootSource,
    pub classes: Vec<ClassPlan>,
    pub pipeline: Pipeline,
    pub filtration: FiltrationMethod,
    /// Diagram points with smaller persistence are dropped.
    pub min_persistence: f64,
    pub kernel: KernelParams,
    pub c: f64,
    /// Searches C and sigma (PH) or gamma (FWL) by cross-validation on each
    /// training split.
    pub grid_search: bool,
    pub test_fraction: f64,
    pub n_runs: usize,
    pub seed: u64,
    /// Draw fresh class members for every run; otherwise one population is
    /// shared by all runs.
    pub regenerate: bool,
}

impl ExperimentSpec {
    /// Root with a class of loose copies and a class around a rewired
    /// variant of the root, both populated by `members`.
    pub fn two_class(root: RootSource, second: ModelPlan, members: ModelPlan, count: usize) -> Self {
        Self {
            root,
            classes: vec![
                ClassPlan {
                    representative: None,
                    members,
                    count,
                },
                ClassPlan {
                    representative: Some(second),
                    members,
                    count,
                },
            ],
            pipeline: Pipeline::Ph,
            filtration: FiltrationMethod::Avg,
            min_persistence: 0.0,
            kernel: KernelParams::default(),
            c: 1.0,
            grid_search: false,
            test_fraction: 0.2,
            n_runs: 5,
            seed: 1,
            regenerate: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if self.classes.len() < 2 {
            return bad("an experiment needs at least two classes".into());
        }
        if let Some(i) = self.classes.iter().position(|c| c.count < 2) {
            return bad(format!("class {i} needs at least two members"));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return bad(format!("test fraction {} outside (0, 1)", self.test_fraction));
        }
        if self.n_runs == 0 {
            return bad("n_runs must be at least 1".into());
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return bad("C must be positive".into());
        }
        if !(self.min_persistence >= 0.0) {
            return bad("persistence threshold must be non-negative".into());
        }
        self.kernel.validate()
    }

    fn population_seed(&self, run: usize) -> RngSeed {
        let base = RngSeed::new(self.seed).derive(0x9090);
        if self.regenerate {
            base.derive(run as u64 + 1)
        } else {
            base
        }
    }

    fn split_seed(&self, run: usize) -> RngSeed {
        RngSeed::new(self.seed).derive(0x5917).derive(run as u64)
    }
}

/// Where a dataset graph came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub class: usize,
    pub representative: Option<ModelPlan>,
    pub member_model: ModelPlan,
    pub seed: RngSeed,
}

#[derive(Clone, Debug)]
pub struct LabeledDataset {
    pub ids: Vec<String>,
    pub graphs: Vec<TemporalGraph>,
    pub labels: Vec<usize>,
    pub provenance: Vec<Provenance>,
}

impl LabeledDataset {
    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }
}

/// Generates every class of `plans` from `root`. Class `c` uses seed
/// `seed.derive(c + 1)`; its representative and members use sub-seeds of it.
pub fn populate_from_root(root: &TemporalGraph, plans: &[ClassPlan], seed: RngSeed) -> Result<LabeledDataset> {
    let mut ds = LabeledDataset {
        ids: Vec::new(),
        graphs: Vec::new(),
        labels: Vec::new(),
        provenance: Vec::new(),
    };
    for (c, plan) in plans.iter().enumerate() {
        let class_seed = seed.derive(c as u64 + 1);
        let rep = match &plan.representative {
            None => root.clone(),
            Some(m) => m
                .apply(root, class_seed.derive(0))
                .map_err(|e| e.context(&format!("class {c} representative")))?,
        };
        let members: Vec<(RngSeed, TemporalGraph)> = (0..plan.count)
            .into_par_iter()
            .map(|j| {
                let s = class_seed.derive(j as u64 + 1);
                plan.members
                    .apply(&rep, s)
                    .map(|g| (s, g))
                    .map_err(|e| e.context(&format!("class {c} member {j}")))
            })
            .collect::<Result<_>>()?;
        for (j, (s, g)) in members.into_iter().enumerate() {
            ds.ids.push(format!("c{c}m{j}"));
            ds.graphs.push(g);
            ds.labels.push(c);
            ds.provenance.push(Provenance {
                class: c,
                representative: plan.representative,
                member_model: plan.members,
                seed: s,
            });
        }
    }
    Ok(ds)
}

/// The population of the first run of `spec`.
pub fn populate_classes(spec: &ExperimentSpec) -> Result<LabeledDataset> {
    spec.validate()?;
    let root = spec.root.load().map_err(|e| e.context("root"))?;
    populate_from_root(&root, &spec.classes, spec.population_seed(0))
}

/// Per-graph artifacts keyed by content hash and the settings that produced
/// them.
#[derive(Default)]
pub struct ArtifactCache {
    filtrations: Mutex<HashMap<(u64, String), Arc<FilteredGraph>>>,
    diagrams: Mutex<HashMap<(u64, String, u64), Arc<PersistenceDiagram>>>,
}

impl ArtifactCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn filtration(&self, g: &TemporalGraph, method: FiltrationMethod) -> Result<Arc<FilteredGraph>> {
        let key = (g.content_hash(), method.to_string());
        if let Some(f) = self.filtrations.lock().expect("cache lock").get(&key) {
            return Ok(f.clone());
        }
        let f = Arc::new(method.apply(g)?);
        self.filtrations.lock().expect("cache lock").insert(key, f.clone());
        Ok(f)
    }

    pub fn diagram(
        &self,
        g: &TemporalGraph,
        method: FiltrationMethod,
        min_persistence: f64,
    ) -> Result<Arc<PersistenceDiagram>> {
        let key = (g.content_hash(), method.to_string(), min_persistence.to_bits());
        if let Some(d) = self.diagrams.lock().expect("cache lock").get(&key) {
            return Ok(d.clone());
        }
        let f = self.filtration(g, method)?;
        let d = Arc::new(graph_persistence(&f, min_persistence)?);
        self.diagrams.lock().expect("cache lock").insert(key, d.clone());
        Ok(d)
    }
}

/// Gram matrix of a dataset under the spec's pipeline, with an optional
/// override of sigma (PH) or gamma (FWL).
pub fn dataset_gram(
    ds: &LabeledDataset,
    spec: &ExperimentSpec,
    bandwidth: Option<f64>,
    cache: &ArtifactCache,
) -> Result<GramMatrix> {
    let mut params = spec.kernel.clone();
    match spec.pipeline {
        Pipeline::Ph => {
            if let Some(s) = bandwidth {
                params.sigma = s;
            }
            let diagrams: Vec<PersistenceDiagram> = ds
                .graphs
                .par_iter()
                .map(|g| {
                    cache
                        .diagram(g, spec.filtration, spec.min_persistence)
                        .map(|d| (*d).clone())
                })
                .collect::<Result<_>>()
                .map_err(|e| e.context("persistence"))?;
            pss_gram(ds.ids.clone(), &diagrams, &params).map_err(|e| e.context("kernel"))
        }
        Pipeline::Fwl => {
            if let Some(g) = bandwidth {
                params.gamma = g;
            }
            let filtered: Vec<FilteredGraph> = ds
                .graphs
                .par_iter()
                .map(|g| cache.filtration(g, spec.filtration).map(|f| (*f).clone()))
                .collect::<Result<_>>()
                .map_err(|e| e.context("filtration"))?;
            filtration_gram(ds.ids.clone(), &filtered, spec.filtration.is_sublevel(), &params)
                .map_err(|e| e.context("kernel"))
        }
    }
}

/// Per-class random split; each class with at least two members keeps at
/// least one graph on each side. Both index lists are ascending.
pub fn stratified_split(labels: &[usize], test_fraction: f64, seed: RngSeed) -> (Vec<usize>, Vec<usize>) {
    let mut by_class: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (i, &l) in labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    let mut rng = seed.rng();
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (_, mut idx) in by_class {
        rng::shuffle(&mut rng, &mut idx);
        let n = idx.len();
        let mut k = (test_fraction * n as f64).round() as usize;
        if n >= 2 {
            k = k.clamp(1, n - 1);
        }
        test.extend_from_slice(&idx[..k]);
        train.extend_from_slice(&idx[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Fraction of `test` predicted correctly by a model trained on `train`.
pub fn holdout_accuracy(gram: &GramMatrix, labels: &[usize], train: &[usize], test: &[usize], c: f64) -> Result<f64> {
    let y: Vec<usize> = train.iter().map(|&i| labels[i]).collect();
    let model = svm_train(&gram.block(train, train), &y, c)?;
    let pred = svm_predict(&model, &gram.block(test, train))?;
    let correct = pred.iter().zip(test).filter(|(p, &i)| **p == labels[i]).count();
    Ok(correct as f64 / test.len().max(1) as f64)
}

/// Mean k-fold accuracy restricted to `train`.
fn cv_accuracy(gram: &GramMatrix, labels: &[usize], train: &[usize], c: f64, seed: RngSeed) -> Result<f64> {
    let sub: Vec<usize> = train.iter().map(|&i| labels[i]).collect();
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); CV_FOLDS];
    let mut by_class: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (k, &l) in sub.iter().enumerate() {
        by_class.entry(l).or_default().push(k);
    }
    let mut rng = seed.rng();
    let mut next = 0;
    for (_, mut idx) in by_class {
        rng::shuffle(&mut rng, &mut idx);
        for k in idx {
            folds[next % CV_FOLDS].push(train[k]);
            next += 1;
        }
    }
    let mut total = 0.0;
    let mut used = 0;
    for f in 0..CV_FOLDS {
        let test: Vec<usize> = folds[f].clone();
        let mut fit: Vec<usize> = folds
            .iter()
            .enumerate()
            .filter(|&(g, _)| g != f)
            .flat_map(|(_, v)| v.clone())
            .collect();
        fit.sort_unstable();
        let classes: std::collections::BTreeSet<usize> = fit.iter().map(|&i| labels[i]).collect();
        if test.is_empty() || classes.len() < 2 {
            continue;
        }
        total += holdout_accuracy(gram, labels, &fit, &test, c)?;
        used += 1;
    }
    Ok(if used == 0 { 0.0 } else { total / used as f64 })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub run: usize,
    pub accuracy: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub c: f64,
    /// Sigma (PH) or gamma (FWL) used for this run.
    pub bandwidth: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub pipeline: Pipeline,
    pub filtration: FiltrationMethod,
    pub runs: Vec<RunResult>,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single run.
    pub stdev: f64,
}

impl Report {
    pub fn from_runs(pipeline: Pipeline, filtration: FiltrationMethod, runs: Vec<RunResult>) -> Self {
        let n = runs.len() as f64;
        let mean = runs.iter().map(|r| r.accuracy).sum::<f64>() / n;
        let stdev = if runs.len() > 1 {
            (runs.iter().map(|r| (r.accuracy - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self {
            pipeline,
            filtration,
            runs,
            mean,
            stdev,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("run,accuracy,n_train,n_test,c,bandwidth\n");
        for r in &self.runs {
            s += &format!(
                "{},{},{},{},{},{}\n",
                r.run, r.accuracy, r.n_train, r.n_test, r.c, r.bandwidth
            );
        }
        s += &format!("mean,{},,,,\nstdev,{},,,,\n", self.mean, self.stdev);
        s
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "pipeline {} / filtration {}", self.pipeline, self.filtration)?;
        writeln!(
            f,
            "{:>4}  {:>8}  {:>5}  {:>4}  {:>7}  {:>9}",
            "run", "accuracy", "train", "test", "C", "bandwidth"
        )?;
        for r in &self.runs {
            writeln!(
                f,
                "{:>4}  {:>8.4}  {:>5}  {:>4}  {:>7}  {:>9}",
                r.run, r.accuracy, r.n_train, r.n_test, r.c, r.bandwidth
            )?;
        }
        write!(
            f,
            "mean accuracy {:.4} (std {:.4}) over {} runs",
            self.mean,
            self.stdev,
            self.runs.len()
        )
    }
}

fn default_bandwidth(spec: &ExperimentSpec) -> f64 {
    match spec.pipeline {
        Pipeline::Ph => spec.kernel.sigma,
        Pipeline::Fwl => spec.kernel.gamma,
    }
}

/// Runs `spec.n_runs` train/test evaluations.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Report> {
    spec.validate()?;
    let root = spec.root.load().map_err(|e| e.context("root"))?;
    let cache = ArtifactCache::new();
    let mut frozen: Option<(LabeledDataset, Vec<(f64, GramMatrix)>)> = None;
    let mut runs = Vec::with_capacity(spec.n_runs);
    for run in 0..spec.n_runs {
        if spec.regenerate || frozen.is_none() {
            let ds = populate_from_root(&root, &spec.classes, spec.population_seed(run))?;
            let bandwidths: Vec<f64> = if spec.grid_search {
                GRID_BANDWIDTH.to_vec()
            } else {
                vec![default_bandwidth(spec)]
            };
            let grams = bandwidths
                .into_iter()
                .map(|b| dataset_gram(&ds, spec, Some(b), &cache).map(|g| (b, g)))
                .collect::<Result<Vec<_>>>()?;
            frozen = Some((ds, grams));
        }
        let (ds, grams) = frozen.as_ref().expect("population exists");
        let (train, test) = stratified_split(&ds.labels, spec.test_fraction, spec.split_seed(run));
        let (mut c, mut gi) = (spec.c, 0);
        if spec.grid_search {
            let mut best = f64::NEG_INFINITY;
            for (k, (_, g)) in grams.iter().enumerate() {
                for &cc in &GRID_C {
                    let acc = cv_accuracy(g, &ds.labels, &train, cc, spec.split_seed(run).derive(0xC5))?;
                    if acc > best {
                        best = acc;
                        c = cc;
                        gi = k;
                    }
                }
            }
        }
        let accuracy = holdout_accuracy(&grams[gi].1, &ds.labels, &train, &test, c).map_err(|e| e.context("svm"))?;
        log::info!("run {run}: accuracy {accuracy:.4}");
        runs.push(RunResult {
            run,
            accuracy,
            n_train: train.len(),
            n_test: test.len(),
            c,
            bandwidth: grams[gi].0,
        });
    }
    Ok(Report::from_runs(spec.pipeline, spec.filtration, runs))
}
