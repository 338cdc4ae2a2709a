//! Olmon's Drude gold driven by generalized steps: the numerical inverse
//! Laplace response against the closed form, inside the early-time envelope.
//!
//!     cargo run --release --example drude_gold

use pr_bounds::models::{
    closed_form_step_response, model_coeffs, model_pr, DrudeParams, ModelParams,
};
use pr_bounds::td_bounds::{
    containment_check, early_time_envelope, linear_grid, numerical_response, PulseSpec,
};

fn main() -> pr_bounds::Result<()> {
    let d = DrudeParams::olmon_gold();
    let params = ModelParams::from(d);
    let p = model_pr(&params)?;
    let grid = linear_grid(0.0, 50.0 / d.omega_p, 2000);
    for (label, tau) in [
        ("0", 0.0),
        ("1/ω_p", 1.0 / d.omega_p),
        ("0.1/ω_p", 0.1 / d.omega_p),
    ] {
        let pulse = PulseSpec::generalized_step(tau)?;
        let exact = closed_form_step_response(&params, &grid, tau)?;
        let num = numerical_response(&p, &pulse, &grid)?;
        let env = early_time_envelope(&model_coeffs(&params), &pulse)?;
        let r = containment_check(&exact, &env);
        println!(
            "τ = {label:<8} oracle deviation {:.2e}  degraded {}  envelope violations {}  final response {:.4e}",
            num.max_relative_deviation(&exact, 1e-300),
            num.degraded_count(),
            r.violations,
            exact.value.last().unwrap()
        );
    }
    Ok(())
}
