//! Runs the bundled experiment plan and prints the classification table.
//!
//! ```text
//! cargo run --release --example run_plan -- [plan.json]
//! ```

use std::path::Path;

use rn_topo::plan::{parse_plan, run_plan};

fn main() {
    let default = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/plans/showcase.json");
    let path = std::env::args().nth(1).unwrap_or_else(|| default.to_string());
    let text = std::fs::read_to_string(&path).unwrap();
    let plan = parse_plan(&text).unwrap_or_else(|e| panic!("{path}: {e}"));
    let report = run_plan(&plan, Path::new(&path).parent().unwrap_or(Path::new(".")));
    for t in &report.tasks {
        println!("{:>2} {:<9} {:?} {:>9.1} ms {}", t.index, t.kind, t.status, t.wall_time_ms, t.error.as_deref().unwrap_or(""));
    }
    println!();
    println!("{:<24} {:<16} {:<12} {:<10}", "system", "forward", "back", "core");
    for c in &report.summary {
        let word = |v: serde_json::Value| v.as_str().unwrap_or_default().to_string();
        println!(
            "{:<24} {:<16} {:<12} {:<10}",
            c.system,
            word(serde_json::to_value(c.forward).unwrap()),
            word(serde_json::to_value(c.back).unwrap()),
            word(serde_json::to_value(c.core).unwrap())
        );
    }
}
