//! Round trip through Cauer's representation: build a PR function from a
//! Lorentz-shaped density plus a point mass, then recover both from `p(s)`.
//!
//!     cargo run --release --example cauer_measure

use std::f64::consts::PI;

use pr_bounds::pr_core::{
    default_sigma_seq, density_from_pr, point_mass_at, Density, MeasureSpec, PointMass,
};

fn main() -> pr_bounds::Result<()> {
    let (wp, w0, nu) = (1.0, 1.0, 0.4);
    let rho =
        move |x: f64| wp * wp * nu * x * x / (PI * ((w0 * w0 - x * x).powi(2) + nu * nu * x * x));
    let mass = PointMass {
        location: 2.5,
        weight: 0.3,
    };
    let m = MeasureSpec::new(
        1.0,
        vec![mass],
        Some(Density::new(rho, w0).with_breaks(vec![w0])),
    )?;
    let p = m
        .to_pr("lorentz+mass")
        .with_band(nu, 3.0)
        .with_point_mass_candidates(vec![mass.location]);

    for xi in [0.3, 0.9, 1.0, 1.6] {
        let got = density_from_pr(&p, xi, &default_sigma_seq(&p, xi))?;
        println!("density at ξ = {xi}: {got:.10} (exact {:.10})", rho(xi));
    }
    let w = point_mass_at(&p, mass.location)?;
    println!(
        "point mass at ξ = {}: {w:.10} (exact {})",
        mass.location, mass.weight
    );
    Ok(())
}
