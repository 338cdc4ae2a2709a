//! Brendel-Bormann gold: the Faddeeva form of each oscillator against direct
//! Gaussian quadrature, and its step response over the first 4 fs.
//!
//!     cargo run --release --example bb_gold

use pr_bounds::models::{
    bb_susceptibility, bb_susceptibility_direct, equivalent_plasma_frequency, model_coeffs,
    model_pr, rad_per_s_to_ev, MetalDb, ModelParams,
};
use pr_bounds::td_bounds::{
    containment_check, early_time_envelope, linear_grid, numerical_response, PulseSpec,
};
use pr_bounds::Complex64;

fn main() -> pr_bounds::Result<()> {
    let au = MetalDb::builtin().params("Au")?;
    let wp = equivalent_plasma_frequency(&au);
    println!("equivalent plasma frequency {:.3} eV", rad_per_s_to_ev(wp));
    for (j, o) in au.oscillators.iter().enumerate() {
        let w = Complex64::new(o.omega, 0.2 * o.omega);
        let a = bb_susceptibility(&au, j, w)?;
        let b = bb_susceptibility_direct(&au, j, w)?;
        println!(
            "χ_{j}(ω_{j}(1 + 0.2i)) = {a:.6e}  |Δ|/|χ| = {:.1e}",
            (a - b).norm() / b.norm()
        );
    }

    let params = ModelParams::from(au);
    let p = model_pr(&params)?;
    let grid = linear_grid(0.0, 4e-15, 200);
    let tr = numerical_response(&p, &PulseSpec::unit_step(), &grid)?;
    let env = early_time_envelope(&model_coeffs(&params), &PulseSpec::unit_step())?;
    let r = containment_check(&tr, &env);
    for k in (0..grid.len()).step_by(40) {
        println!(
            "t = {:.2} fs  response {:>10.4}  bound [{:>10.4}, {:>10.4}]",
            grid[k] * 1e15,
            tr.value[k],
            env.lower(grid[k]),
            env.upper(grid[k])
        );
    }
    println!(
        "degraded {}  violations {}",
        tr.degraded_count(),
        r.violations
    );
    Ok(())
}
