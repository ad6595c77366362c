//! Three classes that differ only by small timestamp shifts: each class has
//! its own representative shifted away from a random root, and members are
//! shifted a little from their representative.

use tempofilt::classify::{run_experiment, ClassPlan, ExperimentSpec, ModelPlan, RootSource};
use tempofilt::generate::RandomGraphSpec;
use tempofilt::rng::RngSeed;

fn main() -> tempofilt::Result<()> {
    let root = RootSource::Random(RandomGraphSpec {
        n_vertices: 50,
        sparsity: 0.1,
        t_range: (0.0, 100.0),
        seed: RngSeed::new(9),
    });
    let out_shift: ModelPlan = "tp:0.0475:1-5".parse()?;
    let in_shift: ModelPlan = "tp:0.016:1-5".parse()?;
    let mut spec = ExperimentSpec::two_class(root, out_shift, in_shift, 20);
    spec.classes = vec![
        ClassPlan {
            representative: Some(out_shift),
            members: in_shift,
            count: 20
        };
        3
    ];
    println!("{}", run_experiment(&spec)?);
    Ok(())
}
