//! Runs an experiment described by a spec file, as `tempofilt experiment`
//! does, and prints the per-run CSV.
//!
//!     cargo run --release --example experiment_spec -- [file.spec]

use std::path::PathBuf;

use tempofilt::classify::{run_experiment, ExperimentSpec};

fn main() -> tempofilt::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/two_classes.spec"));
    let spec = ExperimentSpec::read_file(&path)?;
    let report = run_experiment(&spec)?;
    print!("{}", report.to_csv());
    Ok(())
}
