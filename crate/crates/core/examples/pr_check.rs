//! Samples every bundled model in the right half-plane and checks
//! `Re p >= 0` and `p(s*) = p(s)*`, then compares the numerically
//! estimated expansion coefficients with the exact ones.
//!
//!     cargo run --release --example pr_check

use pr_bounds::models::{fixtures, model_coeffs, model_pr};
use pr_bounds::pr_core::{check_pr_properties, coeffs_from_pr};

fn main() -> pr_bounds::Result<()> {
    for (name, params) in fixtures() {
        let p = model_pr(&params)?;
        let report = check_pr_properties(&p, 10_000, 42);
        let exact = model_coeffs(&params);
        let num = coeffs_from_pr(&p);
        println!(
            "{name:<16} violations {:>3}  b_1 {:.6e} (exact {:.6e})  a_1 {:?}  b_-1 {:?}",
            report.violations.len(),
            num.b_1.value,
            exact.b_1,
            exact.a_1(),
            exact.b_minus1(),
        );
    }
    Ok(())
}
