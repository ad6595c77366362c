//! Applies each null model to a synthetic contact graph and reports how far
//! the average filtration moves.

use tempofilt::filtration::average_filtration;
use tempofilt::generate::{synthetic_contact_graph, ContactModelSpec};
use tempofilt::nullmodels::NullModel;
use tempofilt::rng::RngSeed;

fn main() -> tempofilt::Result<()> {
    let root = synthetic_contact_graph(&ContactModelSpec {
        n_vertices: 50,
        n_temporal_edges: 150,
        seed: RngSeed::new(1),
        ..Default::default()
    })?
    .graph;
    println!("root: {}", root.stats());
    let base = average_filtration(&root);

    let models = [
        NullModel::Tp {
            fraction: 0.2,
            epsilon: 5.0,
        },
        NullModel::Ewlss { steps: 20 },
        NullModel::Re { steps: 100 },
        NullModel::Cm,
    ];
    for (i, model) in models.iter().enumerate() {
        let g = model.apply(&root, RngSeed::new(100 + i as u64))?;
        let f = average_filtration(&g);
        let same_edges = g.aggregate().pairs() == root.aggregate().pairs();
        let line = if same_edges {
            let linf = base
                .edges()
                .iter()
                .zip(f.edges())
                .map(|(a, b)| {
                    if a.value == b.value {
                        0.0
                    } else {
                        (a.value - b.value).abs()
                    }
                })
                .fold(0.0, f64::max);
            format!("same static edges, L-inf shift {linf:.3}")
        } else {
            let kept = g
                .aggregate()
                .pairs()
                .iter()
                .filter(|p| root.aggregate().pairs().contains(p))
                .count();
            format!("{kept}/{} static edges kept", root.aggregate().n_edges())
        };
        println!("{model:<24} {line}");
    }
    Ok(())
}
