//! Parses a scenario from an inline config and prints its verification
//! report as JSON, without writing files.
//!
//!     cargo run --release --example run_config

use pr_bounds::report::{parse_config, run_scenario, RunOptions};

const CONFIG: &str = r#"
schema_version = 1

[[scenario]]
name = "drude_au_short"
outputs = ["trace", "envelope", "sumrules"]
envelope = "early"

[scenario.model]
kind = "drude"
eps_inf = 1.0
omega_p = "1.29e16 rad/s"
nu = "7.14e13 rad/s"

[scenario.pulse]
kind = "generalized_step"
tau = "1 /wp"

[scenario.grid]
start = "0 s"
stop = "20 /wp"
count = 50
"#;

fn main() -> pr_bounds::Result<()> {
    for cfg in parse_config(CONFIG, "inline.toml", None)? {
        let out = run_scenario(&cfg, &RunOptions::default())?;
        println!("{}", out.report.to_json()?);
        println!(
            "passed: {}  ({:.3} s)",
            out.report.passed, out.timing.total_seconds
        );
    }
    Ok(())
}
