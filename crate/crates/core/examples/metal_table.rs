//! Equivalent plasma frequency of the bundled Brendel-Bormann metals.
//!
//!     cargo run --example metal_table [metals.toml]

use std::path::PathBuf;

use pr_bounds::report::{reproduce_table, table_text};

fn main() -> pr_bounds::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/metals_bb.toml"));
    let table = reproduce_table(&path)?;
    print!("{}", table_text(&table));
    println!("{} mismatches", table.mismatches());
    Ok(())
}
