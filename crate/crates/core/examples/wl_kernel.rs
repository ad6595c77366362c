//! WL filtration kernel: level sets, per-level WL histograms and the Gram
//! matrix for a handful of random temporal graphs.

use tempofilt::filtration::average_filtration;
use tempofilt::generate::{random_temporal_graph, RandomGraphSpec};
use tempofilt::kernels::{filtration_gram, wl_filtration_histograms, KernelParams, LevelSet};
use tempofilt::rng::RngSeed;

fn main() -> tempofilt::Result<()> {
    let graphs = (0..6)
        .map(|i| {
            let sparsity = if i < 3 { 0.1 } else { 0.3 };
            random_temporal_graph(&RandomGraphSpec {
                n_vertices: 30,
                sparsity,
                t_range: (0.0, 100.0),
                seed: RngSeed::new(i),
            })
            .map(|t| average_filtration(&t))
        })
        .collect::<tempofilt::Result<Vec<_>>>()?;

    let params = KernelParams::default();
    let levels = LevelSet::from_dataset(&graphs, params.n_levels, true);
    println!("thresholds {:?}", levels.thresholds);
    let h = wl_filtration_histograms(&graphs[0], &levels, params.wl_depth);
    println!("graph 0 has {} WL features", h.features.len());

    let ids = (0..graphs.len()).map(|i| format!("g{i}")).collect();
    let gram = filtration_gram(ids, &graphs, true, &params)?;
    gram.write_to(&mut std::io::stdout().lock()).expect("write to stdout");
    Ok(())
}
