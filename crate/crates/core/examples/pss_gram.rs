//! PSS Gram matrix over diagrams of a root graph and a few of its null
//! model copies.

use tempofilt::filtration::average_filtration;
use tempofilt::generate::{synthetic_contact_graph, ContactModelSpec};
use tempofilt::kernels::{pss_gram, KernelParams};
use tempofilt::nullmodels::NullModel;
use tempofilt::persistence::graph_persistence;
use tempofilt::rng::RngSeed;

fn main() -> tempofilt::Result<()> {
    let root = synthetic_contact_graph(&ContactModelSpec {
        n_vertices: 60,
        n_temporal_edges: 120,
        seed: RngSeed::new(2),
        ..Default::default()
    })?
    .graph;
    let mut ids = vec!["root".to_string()];
    let mut graphs = vec![root.clone()];
    for i in 0..3 {
        ids.push(format!("re{i}"));
        graphs.push(NullModel::Re { steps: 30 }.apply(&root, RngSeed::new(10 + i))?);
        ids.push(format!("cm{i}"));
        graphs.push(NullModel::Cm.apply(&root, RngSeed::new(20 + i))?);
    }
    let diagrams = graphs
        .iter()
        .map(|g| graph_persistence(&average_filtration(g), 0.0))
        .collect::<tempofilt::Result<Vec<_>>>()?;
    let gram = pss_gram(
        ids,
        &diagrams,
        &KernelParams {
            sigma: 5.0,
            ..Default::default()
        },
    )?;
    gram.write_to(&mut std::io::stdout().lock()).expect("write to stdout");
    Ok(())
}
