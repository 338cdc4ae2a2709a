//! Numerical inverse Laplace transforms and the response oracle built on them.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{PulseSpec, ResponseSource, ResponseTrace};
use crate::error::{Error, Result};
use crate::pr_core::{coeffs_from_pr, PrFunction};

/// A Laplace-domain function `F(s)`.
pub trait LaplaceTransform: Fn(Complex64) -> Complex64 + Sync {}
impl<T: Fn(Complex64) -> Complex64 + Sync> LaplaceTransform for T {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InversionMethod {
    /// Fixed Talbot contour; needs `F` analytic off the negative real axis.
    Talbot,
    /// de Hoog's accelerated Fourier series on a Bromwich line.
    DeHoog,
}

/// Fixed Talbot rule with `m` nodes (Abate-Valkó parametrization).
pub fn talbot(f: &impl LaplaceTransform, t: f64, m: usize) -> f64 {
    let mf = m as f64;
    let r = 2.0 * mf / (5.0 * t);
    let mut sum = 0.5 * (f(Complex64::new(r, 0.0)) * (r * t).exp()).re;
    for k in 1..m {
        let th = k as f64 * PI / mf;
        let cot = th.cos() / th.sin();
        let s = Complex64::new(r * th * cot, r * th);
        let sigma = th + (th * cot - 1.0) * cot;
        sum += ((s * t).exp() * f(s) * Complex64::new(1.0, sigma)).re;
    }
    r / mf * sum
}

/// de Hoog, Knight and Stokes quotient-difference acceleration with `2m + 1`
/// terms on the Bromwich line `Re s = -ln(tol)/(4t)`.
pub fn de_hoog(f: &impl LaplaceTransform, t: f64, m: usize, tol: f64) -> f64 {
    let period = 2.0 * t;
    let gamma = -tol.ln() / (2.0 * period);
    let n = 2 * m + 1;
    let zero = Complex64::new(0.0, 0.0);
    let fp: Vec<Complex64> = (0..n)
        .map(|k| f(Complex64::new(gamma, PI * k as f64 / period)))
        .collect();

    let mut e = vec![vec![zero; m + 1]; n];
    let mut q = vec![vec![zero; m]; 2 * m];
    q[0][0] = fp[1] / (fp[0] * 0.5);
    for i in 1..2 * m {
        q[i][0] = fp[i + 1] / fp[i];
    }
    for r in 1..=m {
        for i in 0..2 * (m - r) + 1 {
            e[i][r] = q[i + 1][r - 1] - q[i][r - 1] + e[i + 1][r - 1];
        }
        if r != m {
            let rq = r + 1;
            for i in 0..2 * (m - rq) + 3 {
                q[i][rq - 1] = q[i + 1][rq - 2] * e[i + 1][rq - 1] / e[i][rq - 1];
            }
        }
    }
    let mut d = vec![zero; n];
    d[0] = fp[0] * 0.5;
    for r in 1..=m {
        d[2 * r - 1] = -q[0][r - 1];
        d[2 * r] = -e[0][r];
    }

    let mut a = vec![zero; n + 1];
    let mut b = vec![zero; n + 1];
    a[1] = d[0];
    b[0] = Complex64::new(1.0, 0.0);
    b[1] = b[0];
    let z = Complex64::from_polar(1.0, PI * t / period);
    for i in 1..2 * m {
        a[i + 1] = a[i] + d[i] * a[i - 1] * z;
        b[i + 1] = b[i] + d[i] * b[i - 1] * z;
    }
    let brem = (Complex64::new(1.0, 0.0) + (d[2 * m - 1] - d[2 * m]) * z) * 0.5;
    let rem = -brem * (Complex64::new(1.0, 0.0) - (d[2 * m] * z / (brem * brem) + 1.0).sqrt());
    a[n] = a[2 * m] + rem * a[2 * m - 1];
    b[n] = b[2 * m] + rem * b[2 * m - 1];
    (gamma * t).exp() / period * (a[n] / b[n]).re
}

const TALBOT_NODES: [usize; 4] = [16, 24, 32, 40];
const TALBOT_AGREEMENT: f64 = 1e-10;
const DE_HOOG_MIN_TERMS: usize = 32;
const DE_HOOG_MAX_TERMS: usize = 160;
/// Per-point relative accuracy target of the oracle.
pub const ORACLE_TARGET: f64 = 1e-6;

/// What the inversion needs to know about the singularities of `F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumHint {
    /// Largest oscillation frequency of the inverse transform.
    pub resonance: f64,
    /// Poles sit on the imaginary axis (undamped oscillation).
    pub axis_poles: bool,
}

impl SpectrumHint {
    pub fn of(p: &PrFunction) -> Self {
        Self {
            resonance: p.resonance(),
            axis_poles: p.is_discrete_only() || !p.point_mass_candidates().is_empty(),
        }
    }
}

// The Talbot contour crosses the imaginary axis at |Im s| = rπ/2 with
// r = 2m/(5t); poles at ±iω must fall inside with 20% margin.
fn talbot_min_nodes(t: f64, omega: f64) -> f64 {
    1.2 * 5.0 * omega * t / PI
}

// Value and absolute error estimate at one time.
fn invert_at(
    f: &impl LaplaceTransform,
    t: f64,
    method: InversionMethod,
    hint: SpectrumHint,
) -> (f64, f64) {
    match method {
        InversionMethod::Talbot => {
            let need = talbot_min_nodes(t, hint.resonance);
            let nodes: Vec<usize> = TALBOT_NODES
                .iter()
                .copied()
                .filter(|&m| m as f64 >= need)
                .collect();
            let mut best = (f64::NAN, f64::INFINITY);
            if nodes.len() >= 2 {
                let mut prev = talbot(f, t, nodes[0]);
                for &m in &nodes[1..] {
                    let v = talbot(f, t, m);
                    let err = (v - prev).abs();
                    prev = v;
                    best = (v, err);
                    if err <= TALBOT_AGREEMENT * v.abs() {
                        return best;
                    }
                }
            }
            let (v, e) = invert_at(f, t, InversionMethod::DeHoog, hint);
            if e < best.1 || best.0.is_nan() {
                (v, e)
            } else {
                best
            }
        }
        InversionMethod::DeHoog => {
            // Keep the sampled band |Im s| <= πm/t well above the resonance.
            let need = (2.0 * hint.resonance * t / PI).ceil() as usize;
            let m = need.clamp(DE_HOOG_MIN_TERMS, DE_HOOG_MAX_TERMS);
            let v = de_hoog(f, t, m, 1e-15);
            let check = de_hoog(f, t, m + 8, 1e-16);
            // On undamped oscillation the series converges to a wrong value
            // while agreeing with itself, so no error estimate is credible.
            let err = if hint.axis_poles || need > DE_HOOG_MAX_TERMS {
                f64::INFINITY
            } else {
                (v - check).abs()
            };
            (v, err)
        }
    }
}

/// `ε(t) * δ_t f(t)` as the inverse transform of `p(s) F(s)`, `F` the
/// transform of the ramp-like `f`.
///
/// Rational models (marked continuable) use the Talbot contour; everything
/// else the de Hoog series. Points missing [`ORACLE_TARGET`] are flagged in
/// `degraded`; non-finite values fail the whole call.
pub fn numerical_response(
    p: &PrFunction,
    pulse: &PulseSpec,
    t_grid: &[f64],
) -> Result<ResponseTrace> {
    pulse.validate()?;
    if t_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidInput(
            "time grid must be finite and >= 0".into(),
        ));
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("time grid must be ascending".into()));
    }
    let tau = pulse.raise_time();
    let method = if p.is_continuable() {
        InversionMethod::Talbot
    } else {
        InversionMethod::DeHoog
    };
    let y = |s: Complex64| {
        let ramp = if tau == 0.0 {
            1.0 / (s * s)
        } else {
            let a = 1.0 / tau;
            a / (s * s * (s + a))
        };
        p.eval(s) * ramp
    };
    // The response jumps to b_1 at t = 0+ for the unit step.
    let initial = if tau == 0.0 && t_grid.first() == Some(&0.0) {
        coeffs_from_pr(p).b_1.value
    } else {
        0.0
    };
    let hint = SpectrumHint::of(p);
    let samples: Vec<(f64, f64)> = t_grid
        .par_iter()
        .map(|&t| {
            if t == 0.0 {
                (initial, 0.0)
            } else {
                invert_at(&y, t, method, hint)
            }
        })
        .collect();

    let mut failed = samples
        .iter()
        .zip(t_grid)
        .filter(|((v, _), _)| !v.is_finite());
    if let Some((_, &first_t)) = failed.next() {
        return Err(Error::ContourFailure {
            count: 1 + failed.count(),
            first_t,
        });
    }
    let value: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let error: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let floor = 1e-12 * value.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let degraded = value
        .iter()
        .zip(&error)
        .map(|(v, e)| !(*e <= ORACLE_TARGET * v.abs().max(floor)))
        .collect();
    let mut trace = ResponseTrace::new(t_grid.to_vec(), value, ResponseSource::NumericalOracle);
    trace.error_estimate = error;
    trace.degraded = degraded;
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn talbot_inverts_simple_transforms() {
        for &t in &[0.1, 1.0, 5.0, 20.0] {
            let v = talbot(&|s: Complex64| 1.0 / (s + 1.0), t, 24);
            assert!((v - (-t).exp()).abs() < 1e-11, "t = {t}");
            let v = talbot(&|s: Complex64| 1.0 / s.sqrt(), t, 24);
            let exact = 1.0 / (PI * t).sqrt();
            assert!((v - exact).abs() < 1e-10 * exact, "t = {t}");
        }
    }

    #[test]
    fn de_hoog_inverts_simple_transforms() {
        for &t in &[0.1, 1.0, 5.0, 20.0] {
            let v = de_hoog(&|s: Complex64| 1.0 / (s + 1.0), t, 20, 1e-14);
            assert!((v - (-t).exp()).abs() < 1e-9, "t = {t}");
            let v = de_hoog(&|s: Complex64| 1.0 / s.sqrt(), t, 20, 1e-14);
            let exact = 1.0 / (PI * t).sqrt();
            assert!((v - exact).abs() < 1e-9 * exact, "t = {t}");
        }
    }

    const LOSSLESS: SpectrumHint = SpectrumHint {
        resonance: 1.0,
        axis_poles: true,
    };

    // (1 + 1/(s² + 1))/s  <->  2 - cos t
    fn lossless(s: Complex64) -> Complex64 {
        (1.0 + 1.0 / (s * s + 1.0)) / s
    }

    #[test]
    fn lossless_oscillation_within_talbot_range() {
        for &t in &[0.5, PI, 9.9] {
            let exact = 2.0 - t.cos();
            let (v, err) = invert_at(&lossless, t, InversionMethod::Talbot, LOSSLESS);
            assert!((v - exact).abs() < 1e-9, "t = {t}");
            assert!(err < 1e-9, "t = {t}");
        }
        let (v, err) = invert_at(&lossless, 15.0, InversionMethod::Talbot, LOSSLESS);
        assert!((v - (2.0 - 15f64.cos())).abs() <= err);
    }

    #[test]
    fn lossless_oscillation_beyond_range_is_not_trusted() {
        for &t in &[40.0, 100.0] {
            let (_, err) = invert_at(&lossless, t, InversionMethod::Talbot, LOSSLESS);
            assert!(err.is_infinite(), "t = {t}");
        }
    }

    #[test]
    fn damped_oscillation_error_estimate_is_honest() {
        // 1/((s + 0.05)² + 1)  <->  e^{-0.05 t} sin t
        let f = |s: Complex64| 1.0 / ((s + 0.05) * (s + 0.05) + 1.0);
        let hint = SpectrumHint {
            resonance: 1.0,
            axis_poles: false,
        };
        for &t in &[1.0_f64, 5.0, 10.0, 20.0, 40.0, 100.0] {
            let exact = (-0.05 * t).exp() * t.sin();
            for method in [InversionMethod::Talbot, InversionMethod::DeHoog] {
                let (v, err) = invert_at(&f, t, method, hint);
                assert!(
                    (v - exact).abs() <= 10.0 * err + 1e-11,
                    "{method:?} t = {t}: {v} vs {exact} ± {err}"
                );
                if t <= 10.0 {
                    assert!(err < 1e-8, "{method:?} t = {t}: {err}");
                }
            }
        }
    }
}
