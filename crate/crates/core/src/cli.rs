//! Command-line front end. `dispatch` parses arguments, runs one subcommand
//! inside a dedicated thread pool and maps errors to exit codes.

use std::ffi::OsString;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::classify::{run_experiment, ExperimentSpec};
use crate::error::{Error, Result};
use crate::filtration::{FilteredGraph, FiltrationMethod};
use crate::generate::{random_temporal_graph, synthetic_contact_graph, ContactModelSpec, Mixing, RandomGraphSpec};
use crate::kernels::{filtration_gram, pss_gram, KernelParams};
use crate::nullmodels::NullModel;
use crate::persistence::{build_flag_filtration_capped, compute_persistence, PersistenceDiagram, DEFAULT_CLIQUE_CAP};
use crate::rng::RngSeed;
use crate::textio;
use crate::tgraph::{read_contact_sequence, ColumnOrder};

pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_IO: i32 = 66;
pub const EXIT_RESOURCE: i32 = 69;
pub const EXIT_INTERNAL: i32 = 70;

#[derive(Parser, Debug)]
#[command(
    name = "tempofilt",
    version,
    about = "Filtrations, persistence and kernels for temporal graphs"
)]
struct Cli {
    /// Master seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses all available cores.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    /// Column order of contact-sequence inputs.
    #[arg(long, global = true, default_value = "tuv")]
    columns: ColumnOrder,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Edge filtration of a contact sequence.
    Filtrate {
        #[arg(long, default_value = "avg")]
        method: FiltrationMethod,
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Persistence diagram of a filtered graph.
    Persistence {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Highest homology degree reported (at most 2).
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(0..=2))]
        max_dim: u8,
        /// Drop finite points with smaller persistence.
        #[arg(long, default_value_t = 0.0)]
        threshold: f64,
        #[arg(long, default_value_t = DEFAULT_CLIQUE_CAP)]
        clique_cap: usize,
    },
    /// Gram matrix over diagrams or filtered graphs.
    Kernel {
        #[command(subcommand)]
        kind: KernelCommand,
    },
    /// Randomized reference model of a contact sequence.
    Nullmodel {
        #[arg(long)]
        model: ModelName,
        /// Fraction of timestamps moved (tp).
        #[arg(long, default_value_t = 0.1)]
        fraction: f64,
        /// Largest timestamp shift, exclusive (tp).
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        /// Swaps (ewlss) or edge exchanges (re).
        #[arg(long, default_value_t = 20)]
        steps: usize,
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Synthetic temporal graphs.
    Generate {
        #[command(subcommand)]
        kind: GenerateCommand,
    },
    /// Train/test evaluation described by an experiment file.
    #[command(alias = "classify")]
    Experiment {
        #[arg(long)]
        spec: PathBuf,
        /// Per-run CSV report.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Summary statistics of a contact sequence.
    Stats { input: PathBuf },
}

#[derive(Subcommand, Debug)]
enum KernelCommand {
    /// Scale space kernel over persistence diagram files.
    Pss {
        #[arg(required = true)]
        diagrams: Vec<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Weights of degrees 0, 1 and 2.
        #[arg(long, default_value = "1,1,1", value_delimiter = ',', num_args = 3)]
        weights: Vec<f64>,
        /// Death value for essential classes; derived from the data if unset.
        #[arg(long)]
        essential_cap: Option<f64>,
    },
    /// Graph filtration kernel over filtered graph files.
    Fwl {
        #[arg(required = true)]
        graphs: Vec<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 3)]
        wl_depth: usize,
        #[arg(long, default_value_t = 10)]
        levels: usize,
        /// Read edge values as sublevel or superlevel; by default taken from
        /// the filtration recorded in the files.
        #[arg(long)]
        orientation: Option<Orientation>,
    },
}

#[derive(Subcommand, Debug)]
enum GenerateCommand {
    /// Uniform random single-labeled graph.
    Random {
        #[arg(long, default_value_t = 100)]
        vertices: usize,
        #[arg(long, default_value_t = 0.05)]
        sparsity: f64,
        #[arg(long, default_value_t = 0.0)]
        t_min: f64,
        #[arg(long, default_value_t = 100.0)]
        t_max: f64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Degree-heterogeneous contact graph with biased mixing.
    Contact {
        #[arg(long, default_value_t = 100)]
        vertices: usize,
        /// Temporal edges.
        #[arg(long, default_value_t = 200)]
        edges: usize,
        /// Distinct vertex pairs; defaults to the number of temporal edges.
        #[arg(long)]
        static_edges: Option<usize>,
        #[arg(long, default_value = "assortative")]
        mixing: Mixing,
        #[arg(long, default_value_t = 0.5)]
        mixing_strength: f64,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModelName {
    Tp,
    Ewlss,
    Re,
    Cm,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Orientation {
    Sublevel,
    Superlevel,
}

/// Runs the command line `argv` (including the program name) and returns the
/// process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .try_init();
    log::info!("resolved configuration: {cli:?}");

    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error[resource]: cannot start worker threads: {e}");
            return EXIT_RESOURCE;
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(()) => 0,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error[{}]: {msg}", e.category());
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } => EXIT_IO,
        Error::InvalidInput(_) | Error::MultiLabeled => EXIT_USAGE,
        Error::Parse { .. } | Error::Infeasible(_) => EXIT_DATA,
        Error::Resource(_) => EXIT_RESOURCE,
        Error::Invariant(_) => EXIT_INTERNAL,
    }
}

fn run(cli: &Cli) -> Result<()> {
    let seed = RngSeed::new(cli.seed);
    match &cli.command {
        Command::Filtrate { method, input, output } => {
            let t = read_contact_sequence(input, cli.columns)?;
            let f = method.apply(&t)?;
            write_filtered(output, &f, *method)
        }
        Command::Persistence {
            input,
            output,
            max_dim,
            threshold,
            clique_cap,
        } => {
            if !(*threshold >= 0.0) {
                return Err(Error::InvalidInput("--threshold must be non-negative".into()));
            }
            let g = FilteredGraph::read_file(input)?;
            let filtration = build_flag_filtration_capped(&g, *max_dim as usize + 1, *clique_cap)?;
            let mut d = compute_persistence(&filtration, true)?.threshold(*threshold);
            d.points.retain(|p| p.dim <= *max_dim as usize);
            d.max_edge_value = g.max_finite_value();
            d.write_file(output)
        }
        Command::Kernel { kind } => match kind {
            KernelCommand::Pss {
                diagrams,
                output,
                sigma,
                weights,
                essential_cap,
            } => {
                let ds = diagrams
                    .iter()
                    .map(|p| PersistenceDiagram::read_file(p))
                    .collect::<Result<Vec<_>>>()?;
                let params = KernelParams {
                    sigma: *sigma,
                    degree_weights: [weights[0], weights[1], weights[2]],
                    essential_cap: *essential_cap,
                    ..Default::default()
                };
                pss_gram(file_ids(diagrams)?, &ds, &params)?.write_file(output)
            }
            KernelCommand::Fwl {
                graphs,
                output,
                gamma,
                wl_depth,
                levels,
                orientation,
            } => {
                let gs = graphs
                    .iter()
                    .map(|p| FilteredGraph::read_file(p))
                    .collect::<Result<Vec<_>>>()?;
                let sublevel = match orientation {
                    Some(o) => *o == Orientation::Sublevel,
                    None => recorded_orientation(graphs)?,
                };
                let params = KernelParams {
                    gamma: *gamma,
                    wl_depth: *wl_depth,
                    n_levels: *levels,
                    ..Default::default()
                };
                filtration_gram(file_ids(graphs)?, &gs, sublevel, &params)?.write_file(output)
            }
        },
        Command::Nullmodel {
            model,
            fraction,
            epsilon,
            steps,
            input,
            output,
        } => {
            let t = read_contact_sequence(input, cli.columns)?;
            let m = match model {
                ModelName::Tp => NullModel::Tp {
                    fraction: *fraction,
                    epsilon: *epsilon,
                },
                ModelName::Ewlss => NullModel::Ewlss { steps: *steps },
                ModelName::Re => NullModel::Re { steps: *steps },
                ModelName::Cm => NullModel::Cm,
            };
            m.apply(&t, seed)?.write_file(output)
        }
        Command::Generate { kind } => match kind {
            GenerateCommand::Random {
                vertices,
                sparsity,
                t_min,
                t_max,
                output,
            } => random_temporal_graph(&RandomGraphSpec {
                n_vertices: *vertices,
                sparsity: *sparsity,
                t_range: (*t_min, *t_max),
                seed,
            })?
            .write_file(output),
            GenerateCommand::Contact {
                vertices,
                edges,
                static_edges,
                mixing,
                mixing_strength,
                output,
            } => {
                let c = synthetic_contact_graph(&ContactModelSpec {
                    n_vertices: *vertices,
                    n_temporal_edges: *edges,
                    n_static_edges: *static_edges,
                    mixing: *mixing,
                    mixing_strength: *mixing_strength,
                    seed,
                })?;
                if !c.connected {
                    log::warn!("no attempt gave a connected aggregate graph; writing the last one");
                }
                c.graph.write_file(output)
            }
        },
        Command::Experiment { spec, output } => {
            let s = ExperimentSpec::read_file(spec)?;
            log::info!("experiment: {s:?}");
            let report = run_experiment(&s)?;
            println!("{report}");
            if let Some(out) = output {
                let csv = report.to_csv();
                textio::write_atomic(out, |w| w.write_all(csv.as_bytes()))?;
            }
            Ok(())
        }
        Command::Stats { input } => {
            let t = read_contact_sequence(input, cli.columns)?;
            println!("{}", t.stats());
            Ok(())
        }
    }
}

/// Filtered graph file with the producing method recorded as a directive.
fn write_filtered(path: &Path, g: &FilteredGraph, method: FiltrationMethod) -> Result<()> {
    textio::write_atomic(path, |w| {
        writeln!(w, "#! filtration {method}")?;
        g.write_to(w)
    })
}

/// Sublevel unless every file records a superlevel (static) filtration.
fn recorded_orientation(paths: &[PathBuf]) -> Result<bool> {
    let mut methods = Vec::new();
    for p in paths {
        for line in textio::open_text(p)?.lines() {
            let line = line.map_err(|e| Error::io(p, e))?;
            if !line.starts_with('#') {
                break;
            }
            if let Some(("filtration", m)) = textio::directive(&line) {
                methods.push(m.parse::<FiltrationMethod>()?);
            }
        }
    }
    if methods.windows(2).any(|w| w[0].is_sublevel() != w[1].is_sublevel()) {
        return Err(Error::InvalidInput(
            "inputs mix sublevel and superlevel filtrations".into(),
        ));
    }
    Ok(methods.first().is_none_or(|m| m.is_sublevel()))
}

/// File stems as graph ids; duplicates are rejected.
fn file_ids(paths: &[PathBuf]) -> Result<Vec<String>> {
    let ids: Vec<String> = paths
        .iter()
        .map(|p| {
            let name = p
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            name.split('.').next().unwrap_or_default().to_string()
        })
        .collect();
    let mut sorted = ids.clone();
    sorted.sort();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput(format!("duplicate graph id {:?}", w[0])));
    }
    Ok(ids)
}
