//! Brendel-Bormann susceptibility in the Fourier variable `ω` (`s = -iω`).

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use super::{equivalent_plasma_frequency, BbParams};
use crate::complex_special::faddeeva;
use crate::error::{Error, Result};
use crate::pr_core::PrFunction;
use crate::quad::{integrate, QuadConfig};

const I: Complex64 = Complex64::new(0.0, 1.0);

// sqrt(ω² + iων) on the branch Im α >= 0.
fn alpha(omega: Complex64, nu: f64) -> Result<Complex64> {
    let rad = omega * omega + I * omega * nu;
    if rad.im == 0.0 && rad.re > 0.0 {
        return Err(Error::BranchAmbiguity(format!(
            "ω² + iων = {} is real and positive at ω = {omega}",
            rad.re
        )));
    }
    let r = rad.sqrt();
    Ok(if r.im < 0.0 { -r } else { r })
}

fn oscillator(params: &BbParams, j: usize) -> Result<super::BbOscillator> {
    params.oscillators.get(j).copied().ok_or_else(|| {
        Error::InvalidInput(format!(
            "oscillator index {j} out of range ({} oscillators)",
            params.oscillators.len()
        ))
    })
}

/// `χ_j(ω)` from the two-term Faddeeva form; `j` indexes `params.oscillators`
/// from zero.
pub fn bb_susceptibility(params: &BbParams, j: usize, omega: Complex64) -> Result<Complex64> {
    let o = oscillator(params, j)?;
    if !(omega.re.is_finite() && omega.im.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite ω = {omega}")));
    }
    if omega.im < 0.0 {
        return Err(Error::DomainError(format!(
            "ω = {omega} lies in the lower half-plane"
        )));
    }
    let a = alpha(omega, o.nu)?;
    if a == Complex64::new(0.0, 0.0) {
        return Err(Error::DomainError("ω = 0".into()));
    }
    let k = SQRT_2 * o.sigma;
    let sum = faddeeva((a - o.omega) / k)? + faddeeva((a + o.omega) / k)?;
    Ok(I * sum * (o.omega_p * o.omega_p * PI.sqrt() / (2.0 * k * a)))
}

/// `χ_j(ω)` by adaptive quadrature over the Gaussian distribution of
/// Lorentz resonances. Slow; used as an independent check of
/// [`bb_susceptibility`].
pub fn bb_susceptibility_direct(
    params: &BbParams,
    j: usize,
    omega: Complex64,
) -> Result<Complex64> {
    let o = oscillator(params, j)?;
    let w2 = o.omega * o.omega;
    let target = (omega * omega + I * omega * o.nu) / w2;
    let a = alpha(omega, o.nu)?;
    // u = (x - ω_j)/σ_j; the Gaussian is negligible beyond |u| = 40.
    let breaks: Vec<f64> = [0.0, (a.re - o.omega) / o.sigma, (-a.re - o.omega) / o.sigma]
        .into_iter()
        .filter(|u| u.abs() < 40.0)
        .collect();
    let cfg = QuadConfig {
        rel_tol: 1e-11,
        abs_tol: 1e-16,
        max_intervals: 20_000,
    };
    let est = integrate(
        |u: f64| {
            let x = (o.omega + o.sigma * u) / o.omega;
            Complex64::new((-0.5 * u * u).exp(), 0.0) / (x * x - target)
        },
        -40.0,
        40.0,
        &breaks,
        cfg,
    )?;
    Ok(est.value * (o.omega_p * o.omega_p / (w2 * (2.0 * PI).sqrt())))
}

pub(super) fn bb_pr(b: BbParams) -> PrFunction {
    let wp = equivalent_plasma_frequency(&b);
    let mut low = b.nu0;
    let mut high = wp.max(b.nu0);
    let mut resonance: f64 = 0.0;
    for o in &b.oscillators {
        low = low.min(o.nu).min(o.sigma).min(o.omega);
        high = high.max(o.omega + 5.0 * o.sigma).max(o.nu);
        resonance = resonance.max(o.omega + 3.0 * o.sigma);
    }
    let wp02 = b.omega_p0 * b.omega_p0;
    let params = b.clone();
    PrFunction::new("brendel_bormann", move |s: Complex64| {
        let omega = I * s;
        let mut chi = Complex64::new(0.0, 0.0);
        for j in 0..params.oscillators.len() {
            match bb_susceptibility(&params, j, omega) {
                Ok(c) => chi += c,
                Err(_) => return Complex64::new(f64::NAN, f64::NAN),
            }
        }
        s + wp02 / (s + params.nu0) + s * chi
    })
    .with_band(low, high)
    .with_omega_ref(wp)
    .with_resonance(resonance)
}
