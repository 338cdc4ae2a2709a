//! Unit-step response of the Lorentz oscillator `ε_∞ = ω0 = ω_p = 1` against
//! the combined early/late envelope, for three losses.
//!
//!     cargo run --release --example lorentz_envelope

use pr_bounds::models::{closed_form_step_response, model_coeffs, LorentzParams, ModelParams};
use pr_bounds::td_bounds::{combined_envelope, containment_check, linear_grid};

fn main() -> pr_bounds::Result<()> {
    let grid = linear_grid(0.0, 10.0, 21);
    for nu in [0.0, 0.5, 1.95] {
        let params: ModelParams = LorentzParams::new(1.0, 1.0, 1.0, nu)?.into();
        let env = combined_envelope(&model_coeffs(&params))?;
        let tr = closed_form_step_response(&params, &grid, 0.0)?;
        println!("ν = {nu}: corner time {:?}", env.corner_time);
        for (t, v) in grid.iter().zip(&tr.value).step_by(4) {
            println!(
                "  t = {t:>4.1}  {:>8.4} <= {v:>8.4} <= {:>8.4}",
                env.lower(*t),
                env.upper(*t)
            );
        }
        let r = containment_check(&tr, &env);
        println!("  violations {} of {}", r.violations, r.points);
    }
    Ok(())
}
