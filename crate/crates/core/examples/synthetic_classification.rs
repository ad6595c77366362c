//! Two classes around a synthetic contact graph: loose copies of the root,
//! and loose copies of a configuration-model rewiring of it.
//!
//!     cargo run --release --example synthetic_classification -- [ph|fwl] [runs]

use tempofilt::classify::{run_experiment, ExperimentSpec, RootSource};
use tempofilt::generate::ContactModelSpec;
use tempofilt::rng::RngSeed;

fn main() -> tempofilt::Result<()> {
    let mut args = std::env::args().skip(1);
    let pipeline = args.next().unwrap_or_else(|| "ph".into()).parse()?;
    let runs = args.next().map_or(5, |r| r.parse().expect("runs must be a number"));

    let root = RootSource::Contact(ContactModelSpec {
        n_vertices: 100,
        n_temporal_edges: 200,
        seed: RngSeed::new(3),
        ..Default::default()
    });
    let mut spec = ExperimentSpec::two_class(root, "cm".parse()?, "re:20".parse()?, 20);
    spec.pipeline = pipeline;
    spec.n_runs = runs;

    let start = std::time::Instant::now();
    let report = run_experiment(&spec)?;
    println!("{report}");
    println!("elapsed {:.1?}", start.elapsed());
    Ok(())
}
