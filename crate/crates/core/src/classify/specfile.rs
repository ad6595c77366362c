//! Line-oriented experiment files.
//!
//! ```text
//! [root]
//! source = contact          # file | random | contact
//! vertices = 100
//! edges = 200
//!
//! [class]
//! members = re:20
//! count = 20
//!
//! [class]
//! representative = cm
//! members = re:20
//! count = 20
//!
//! [pipeline]
//! kind = ph
//! filtration = avg
//!
//! [evaluation]
//! runs = 5
//! seed = 1
//! ```
//!
//! Sections: `root`, `class` (repeatable), `pipeline`, `kernel`, `svm`,
//! `evaluation`. Unknown sections and keys are errors.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::experiment::{ClassPlan, ExperimentSpec, ModelPlan, RootSource};
use crate::error::{Error, Result};
use crate::generate::{ContactModelSpec, Mixing, RandomGraphSpec};
use crate::kernels::KernelParams;
use crate::nullmodels::NullModel;
use crate::rng::RngSeed;
use crate::tgraph::ColumnOrder;

#[derive(Default)]
struct RootKeys {
    source: Option<String>,
    path: Option<PathBuf>,
    columns: ColumnOrder,
    vertices: Option<usize>,
    edges: Option<usize>,
    static_edges: Option<usize>,
    sparsity: Option<f64>,
    t_min: Option<f64>,
    t_max: Option<f64>,
    mixing: Option<Mixing>,
    mixing_strength: Option<f64>,
    seed: Option<u64>,
}

fn value<T: FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse::<T>()
        .map_err(|_| Error::parse(line, format!("bad value {v:?} for {key}")))
}

fn flag(line: usize, key: &str, v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::parse(
            line,
            format!("bad value {v:?} for {key}; expected true or false"),
        )),
    }
}

fn at_line(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::InvalidInput(m) => Error::parse(line, m),
        other => other,
    }
}

impl ExperimentSpec {
    pub fn read_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Parses an experiment file. Relative root paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let defaults = ExperimentSpec::two_class(
            RootSource::Random(RandomGraphSpec::default()),
            NullModel::Cm.into(),
            NullModel::Re { steps: 20 }.into(),
            20,
        );
        let mut root = RootKeys::default();
        let mut classes: Vec<(usize, Option<ModelPlan>, Option<ModelPlan>, Option<usize>)> = Vec::new();
        let mut pipeline = defaults.pipeline;
        let mut filtration = defaults.filtration;
        let mut min_persistence = defaults.min_persistence;
        let mut kernel = KernelParams::default();
        let (mut c, mut grid_search) = (defaults.c, defaults.grid_search);
        let (mut test_fraction, mut n_runs, mut seed, mut regenerate) = (
            defaults.test_fraction,
            defaults.n_runs,
            defaults.seed,
            defaults.regenerate,
        );
        let mut section = String::new();

        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_ascii_lowercase();
                match section.as_str() {
                    "class" => classes.push((ln, None, None, None)),
                    "root" | "pipeline" | "kernel" | "svm" | "evaluation" => {}
                    _ => return Err(Error::parse(ln, format!("unknown section [{section}]"))),
                }
                continue;
            }
            let (key, v) = line
                .split_once('=')
                .map(|(k, v)| (k.trim().to_ascii_lowercase(), v.trim()))
                .ok_or_else(|| Error::parse(ln, "expected `key = value`"))?;
            let unknown = || Err(Error::parse(ln, format!("unknown key {key:?} in [{section}]")));
            match section.as_str() {
                "root" => match key.as_str() {
                    "source" => root.source = Some(v.to_ascii_lowercase()),
                    "path" => root.path = Some(base.join(v)),
                    "columns" => root.columns = v.parse().map_err(at_line(ln))?,
                    "vertices" => root.vertices = Some(value(ln, &key, v)?),
                    "edges" => root.edges = Some(value(ln, &key, v)?),
                    "static-edges" => root.static_edges = Some(value(ln, &key, v)?),
                    "sparsity" => root.sparsity = Some(value(ln, &key, v)?),
                    "t-min" => root.t_min = Some(value(ln, &key, v)?),
                    "t-max" => root.t_max = Some(value(ln, &key, v)?),
                    "mixing" => root.mixing = Some(v.parse().map_err(at_line(ln))?),
                    "mixing-strength" => root.mixing_strength = Some(value(ln, &key, v)?),
                    "seed" => root.seed = Some(value(ln, &key, v)?),
                    _ => return unknown(),
                },
                "class" => {
                    let cl = classes.last_mut().expect("inside a [class] section");
                    match key.as_str() {
                        "representative" => {
                            cl.1 = if v.eq_ignore_ascii_case("root") {
                                None
                            } else {
                                Some(v.parse().map_err(at_line(ln))?)
                            }
                        }
                        "members" => cl.2 = Some(v.parse().map_err(at_line(ln))?),
                        "count" => cl.3 = Some(value(ln, &key, v)?),
                        _ => return unknown(),
                    }
                }
                "pipeline" => match key.as_str() {
                    "kind" => pipeline = v.parse().map_err(at_line(ln))?,
                    "filtration" => filtration = v.parse().map_err(at_line(ln))?,
                    "threshold" => min_persistence = value(ln, &key, v)?,
                    _ => return unknown(),
                },
                "kernel" => match key.as_str() {
                    "sigma" => kernel.sigma = value(ln, &key, v)?,
                    "gamma" => kernel.gamma = value(ln, &key, v)?,
                    "wl-depth" => kernel.wl_depth = value(ln, &key, v)?,
                    "levels" => kernel.n_levels = value(ln, &key, v)?,
                    "weights" => {
                        let w: Vec<f64> = v.split(',').map(|x| value(ln, &key, x.trim())).collect::<Result<_>>()?;
                        kernel.degree_weights = w
                            .try_into()
                            .map_err(|_| Error::parse(ln, "weights needs three values"))?;
                    }
                    "essential-cap" => kernel.essential_cap = Some(value(ln, &key, v)?),
                    _ => return unknown(),
                },
                "svm" => match key.as_str() {
                    "c" => c = value(ln, &key, v)?,
                    "grid-search" => grid_search = flag(ln, &key, v)?,
                    _ => return unknown(),
                },
                "evaluation" => match key.as_str() {
                    "test-fraction" => test_fraction = value(ln, &key, v)?,
                    "runs" => n_runs = value(ln, &key, v)?,
                    "seed" => seed = value(ln, &key, v)?,
                    "regenerate" => regenerate = flag(ln, &key, v)?,
                    _ => return unknown(),
                },
                _ => return Err(Error::parse(ln, "key outside of a section")),
            }
        }

        let root_seed = RngSeed::new(root.seed.unwrap_or(seed)).derive(0x5200);
        let root_source = match root.source.as_deref() {
            Some("file") => RootSource::File {
                path: root
                    .path
                    .ok_or_else(|| Error::InvalidInput("[root] source = file needs a path".into()))?,
                columns: root.columns,
            },
            Some("random") | None => {
                let d = RandomGraphSpec::default();
                RootSource::Random(RandomGraphSpec {
                    n_vertices: root.vertices.unwrap_or(d.n_vertices),
                    sparsity: root.sparsity.unwrap_or(d.sparsity),
                    t_range: (root.t_min.unwrap_or(d.t_range.0), root.t_max.unwrap_or(d.t_range.1)),
                    seed: root_seed,
                })
            }
            Some("contact") => {
                let d = ContactModelSpec::default();
                RootSource::Contact(ContactModelSpec {
                    n_vertices: root.vertices.unwrap_or(d.n_vertices),
                    n_temporal_edges: root.edges.unwrap_or(d.n_temporal_edges),
                    n_static_edges: root.static_edges,
                    mixing: root.mixing.unwrap_or(d.mixing),
                    mixing_strength: root.mixing_strength.unwrap_or(d.mixing_strength),
                    seed: root_seed,
                })
            }
            Some(other) => return Err(Error::InvalidInput(format!("unknown root source {other:?}"))),
        };
        let classes = if classes.is_empty() {
            defaults.classes
        } else {
            classes
                .into_iter()
                .map(|(ln, rep, members, count)| {
                    Ok(ClassPlan {
                        representative: rep,
                        members: members.ok_or_else(|| Error::parse(ln, "[class] needs `members`"))?,
                        count: count.ok_or_else(|| Error::parse(ln, "[class] needs `count`"))?,
                    })
                })
                .collect::<Result<_>>()?
        };
        let spec = ExperimentSpec {
            root: root_source,
            classes,
            pipeline,
            filtration,
            min_persistence,
            kernel,
            c,
            grid_search,
            test_fraction,
            n_runs,
            seed,
            regenerate,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// A two-class experiment in the file format.
pub const EXAMPLE_SPEC: &str = "\
[root]
source = contact
vertices = 100
edges = 200

[class]
representative = root
members = re:20
count = 20

[class]
representative = cm
members = re:20
count = 20

[pipeline]
kind = ph
filtration = avg
threshold = 0

[kernel]
sigma = 1
weights = 1,1,1

[svm]
c = 1

[evaluation]
test-fraction = 0.2
runs = 5
seed = 1
";
