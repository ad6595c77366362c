//! Every edge filtration on a small contact sequence.
//!
//!     cargo run --example filtrations -- [contacts.tsv]

use std::path::PathBuf;

use tempofilt::filtration::FiltrationMethod;
use tempofilt::tgraph::{read_contact_sequence, ColumnOrder};

fn main() -> tempofilt::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/five_cycle.tsv"));
    let t = read_contact_sequence(&path, ColumnOrder::Tuv)?;
    println!("{}", t.stats());

    let methods = ["min", "avg", "avg-mlt", "add-max-deg", "add-core-num", "add-triangle"];
    print!("{:<8}", "edge");
    for m in methods {
        print!("{m:>14}");
    }
    println!();

    let filtered: Vec<_> = methods
        .iter()
        .map(|m| m.parse::<FiltrationMethod>().and_then(|m| m.apply(&t)))
        .collect::<tempofilt::Result<_>>()?;
    let names = t.vertex_names();
    for (i, e) in filtered[0].edges().iter().enumerate() {
        print!("{:<8}", format!("{}-{}", names[e.u], names[e.v]));
        for f in &filtered {
            print!("{:>14.4}", f.edges()[i].value);
        }
        println!();
    }
    Ok(())
}
