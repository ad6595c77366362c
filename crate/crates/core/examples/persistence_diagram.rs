//! Persistence diagram of the average filtration of a contact graph, written
//! in the same text format the CLI uses.

use tempofilt::filtration::average_filtration;
use tempofilt::generate::{synthetic_contact_graph, ContactModelSpec};
use tempofilt::persistence::graph_persistence;
use tempofilt::rng::RngSeed;

fn main() -> tempofilt::Result<()> {
    let t = synthetic_contact_graph(&ContactModelSpec {
        n_vertices: 40,
        n_temporal_edges: 120,
        seed: RngSeed::new(5),
        ..Default::default()
    })?
    .graph;
    let f = average_filtration(&t);
    let d = graph_persistence(&f, 0.0)?;
    for k in 0..3 {
        let pts = d.degree(k);
        let essential = pts.iter().filter(|p| p.1.is_infinite()).count();
        let longest = pts
            .iter()
            .filter(|p| p.1.is_finite())
            .map(|p| p.1 - p.0)
            .fold(0.0, f64::max);
        println!(
            "H{k}: {} points, {essential} essential, longest finite bar {longest:.2}",
            pts.len()
        );
    }
    println!();
    d.write_to(&mut std::io::stdout().lock()).expect("write to stdout");
    Ok(())
}
