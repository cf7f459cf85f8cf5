//! Derived link constants for a scenario.
//!
//! ```text
//! cargo run --example link_budget -- [CONFIG]
//! ```

use qsync::experiments::{derived_entries, format_number};
use qsync::{Scenario, SystemConfig};

pub fn run(cfg: SystemConfig) -> qsync::Result<()> {
    let scn = Scenario::new(cfg)?;
    for (name, value) in derived_entries(&scn.derived) {
        println!("{name:>16} = {}", format_number(value));
    }
    let array = &scn.ccr;
    println!("array: {} reflectors, centroid {:?}", array.len(), array.centroid());
    println!("scan grid: {} cells, central cell {}", scn.grid.len(), scn.grid.central_index());
    Ok(())
}

fn main() -> qsync::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => SystemConfig::parse(&std::fs::read_to_string(path)?)?,
        None => SystemConfig::default(),
    };
    run(cfg)
}
