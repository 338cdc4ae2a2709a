//! Time-domain bounds on `p(t) * f(t)` for unipolar step-like pulses.
//!
//! For a PR function with high-frequency expansion `b_1 s + b_-1/s` and
//! `a_-1 = lim s p(s)`, the response `ε(t) * δ_t f(t)` deviates from
//! `b_1 δ_t f + a_-1 δ_t⁻¹ f` by at most `(b_-1 - a_-1) δ_t⁻¹ f(t)`. With a
//! low-frequency term `a_1 s` as well, the ramp response deviates from
//! `b_1 + a_-1 t²/2` by at most `2(a_1 - b_1)`; the two bounds cross at the
//! corner time.

mod laplace;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phi::phi;
use crate::pr_core::AsymptoticCoeffs;

pub use laplace::{
    de_hoog, numerical_response, talbot, InversionMethod, LaplaceTransform, SpectrumHint,
    ORACLE_TARGET,
};

/// Input pulse shape. `UnitStep` and `Ramp` name the same input: the ramp
/// `f = t H(t)` whose derivative `δ_t f` is the unit step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseKind {
    UnitStep,
    GeneralizedStep,
    Ramp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub kind: PulseKind,
    /// Raise time in seconds; zero unless `kind` is `GeneralizedStep`.
    pub tau: f64,
}

impl PulseSpec {
    pub fn unit_step() -> Self {
        Self {
            kind: PulseKind::UnitStep,
            tau: 0.0,
        }
    }

    pub fn ramp() -> Self {
        Self {
            kind: PulseKind::Ramp,
            tau: 0.0,
        }
    }

    /// `δ_t f(t) = (1 - e^{-t/τ}) H(t)`.
    pub fn generalized_step(tau: f64) -> Result<Self> {
        let p = Self {
            kind: PulseKind::GeneralizedStep,
            tau,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "raise time {} must be finite and >= 0",
                self.tau
            )));
        }
        if self.kind != PulseKind::GeneralizedStep && self.tau != 0.0 {
            return Err(Error::InvalidInput(format!(
                "{:?} pulse takes no raise time",
                self.kind
            )));
        }
        Ok(())
    }

    /// Raise time, zero for the unit step.
    pub fn raise_time(&self) -> f64 {
        match self.kind {
            PulseKind::GeneralizedStep => self.tau,
            _ => 0.0,
        }
    }
}

/// `f`, `δ_t f` and `δ_t⁻¹ f` of a pulse, all vanishing for `t < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseFunctions {
    tau: f64,
}

pub fn pulse_functions(p: &PulseSpec) -> PulseFunctions {
    PulseFunctions {
        tau: p.raise_time(),
    }
}

impl PulseFunctions {
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `f(t)`: the ramp, or `t - τ(1 - e^{-t/τ})`.
    pub fn f(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else if self.tau == 0.0 {
            t
        } else {
            let x = t / self.tau;
            t * x * phi(2, x)
        }
    }

    /// `δ_t f(t)`: the step, or `1 - e^{-t/τ}`.
    pub fn df(&self, t: f64) -> f64 {
        if t < 0.0 {
            0.0
        } else if self.tau == 0.0 {
            1.0
        } else {
            let x = t / self.tau;
            x * phi(1, x)
        }
    }

    /// `δ_t⁻¹ f(t) = ∫_0^t f`.
    pub fn intf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else if self.tau == 0.0 {
            0.5 * t * t
        } else {
            let x = t / self.tau;
            t * t * x * phi(3, x)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Validity {
    EarlyOnly,
    LateOnly,
    Combined,
}

/// Upper bound `|response(t) - center(t)| <= half_width(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundEnvelope {
    pub validity: Validity,
    pub pulse: PulseSpec,
    pub b_1: f64,
    pub a_minus1: f64,
    /// `b_-1 - a_-1`, multiplying `δ_t⁻¹ f`.
    pub early_slope: Option<f64>,
    /// `2(a_1 - b_1)`.
    pub late_level: Option<f64>,
    pub corner_time: Option<f64>,
}

impl BoundEnvelope {
    pub fn center(&self, t: f64) -> f64 {
        let pf = pulse_functions(&self.pulse);
        self.b_1 * pf.df(t) + self.a_minus1 * pf.intf(t)
    }

    pub fn half_width(&self, t: f64) -> f64 {
        let pf = pulse_functions(&self.pulse);
        match self.validity {
            Validity::EarlyOnly => self.early_slope.unwrap_or(0.0) * pf.intf(t),
            Validity::LateOnly => {
                if t < 0.0 {
                    0.0
                } else {
                    self.late_level.unwrap_or(0.0)
                }
            }
            Validity::Combined => {
                let tc = self.corner_time.unwrap_or(f64::INFINITY);
                if t < 0.0 {
                    0.0
                } else if t < tc {
                    self.early_slope.unwrap_or(0.0) * pf.intf(t)
                } else {
                    self.late_level.unwrap_or(0.0)
                }
            }
        }
    }

    pub fn lower(&self, t: f64) -> f64 {
        self.center(t) - self.half_width(t)
    }

    pub fn upper(&self, t: f64) -> f64 {
        self.center(t) + self.half_width(t)
    }
}

fn high_order1(coeffs: &AsymptoticCoeffs) -> Result<f64> {
    let b_m1 = coeffs.b_minus1().ok_or_else(|| {
        Error::MissingAsymptotics("no s⁻¹ term in the high-frequency expansion".into())
    })?;
    let slope = b_m1 - coeffs.a_minus1;
    if slope < 0.0 {
        return Err(Error::InvalidInput(format!(
            "b_-1 = {b_m1} < a_-1 = {}",
            coeffs.a_minus1
        )));
    }
    Ok(slope)
}

fn low_order1(coeffs: &AsymptoticCoeffs) -> Result<f64> {
    let a_1 = coeffs.a_1().ok_or_else(|| {
        Error::MissingAsymptotics("no s term in the low-frequency expansion".into())
    })?;
    let level = a_1 - coeffs.b_1;
    if level < 0.0 {
        return Err(Error::InvalidInput(format!(
            "a_1 = {a_1} < b_1 = {}",
            coeffs.b_1
        )));
    }
    Ok(2.0 * level)
}

/// Quadratic bound `(b_-1 - a_-1) δ_t⁻¹ f(t)` around `b_1 δ_t f + a_-1 δ_t⁻¹ f`.
pub fn early_time_envelope(coeffs: &AsymptoticCoeffs, p: &PulseSpec) -> Result<BoundEnvelope> {
    p.validate()?;
    let slope = high_order1(coeffs)?;
    Ok(BoundEnvelope {
        validity: Validity::EarlyOnly,
        pulse: *p,
        b_1: coeffs.b_1,
        a_minus1: coeffs.a_minus1,
        early_slope: Some(slope),
        late_level: None,
        corner_time: None,
    })
}

/// Constant bound `2(a_1 - b_1)` on the unit-step response around `b_1 + a_-1 t²/2`.
pub fn late_time_envelope(coeffs: &AsymptoticCoeffs) -> Result<BoundEnvelope> {
    let level = low_order1(coeffs)?;
    Ok(BoundEnvelope {
        validity: Validity::LateOnly,
        pulse: PulseSpec::unit_step(),
        b_1: coeffs.b_1,
        a_minus1: coeffs.a_minus1,
        early_slope: None,
        late_level: Some(level),
        corner_time: None,
    })
}

/// Minimum of the early and late bounds for the unit step, switching at
/// `t_c = sqrt(4(a_1 - b_1)/(b_-1 - a_-1))`.
pub fn combined_envelope(coeffs: &AsymptoticCoeffs) -> Result<BoundEnvelope> {
    let slope = high_order1(coeffs)?;
    let level = low_order1(coeffs)?;
    if slope == 0.0 {
        return Err(Error::TrivialMeasure);
    }
    Ok(BoundEnvelope {
        validity: Validity::Combined,
        pulse: PulseSpec::unit_step(),
        b_1: coeffs.b_1,
        a_minus1: coeffs.a_minus1,
        early_slope: Some(slope),
        late_level: Some(level),
        corner_time: Some((2.0 * level / slope).sqrt()),
    })
}

/// `(b_-1 - a_-1) B` for a pulse with `δ_t⁻¹ f(t) <= B` for all `t`.
pub fn constant_alltime_bound(coeffs: &AsymptoticCoeffs, pulse_area: f64) -> Result<f64> {
    if !(pulse_area >= 0.0 && pulse_area.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "pulse area bound {pulse_area} must be finite and >= 0"
        )));
    }
    Ok(high_order1(coeffs)? * pulse_area)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseSource {
    ClosedForm,
    NumericalOracle,
}

/// Sampled response `ε(t) * δ_t f(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseTrace {
    pub t: Vec<f64>,
    pub value: Vec<f64>,
    pub source: ResponseSource,
    /// Absolute error estimate per point; zero for closed forms.
    pub error_estimate: Vec<f64>,
    /// Points where the numerical oracle missed its accuracy target.
    pub degraded: Vec<bool>,
}

impl ResponseTrace {
    pub fn new(t: Vec<f64>, value: Vec<f64>, source: ResponseSource) -> Self {
        let n = t.len();
        Self {
            t,
            value,
            source,
            error_estimate: vec![0.0; n],
            degraded: vec![false; n],
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn degraded_count(&self) -> usize {
        self.degraded.iter().filter(|&&d| d).count()
    }

    /// Largest `|a - b| / max(|b|, floor)` against a reference trace on the same grid.
    pub fn max_relative_deviation(&self, reference: &ResponseTrace, floor: f64) -> f64 {
        self.value
            .iter()
            .zip(&reference.value)
            .map(|(a, b)| (a - b).abs() / b.abs().max(floor))
            .fold(0.0, f64::max)
    }
}

/// `n` points from `start` to `stop`, inclusive.
pub fn linear_grid(start: f64, stop: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![start];
    }
    (0..n)
        .map(|i| {
            if i == n - 1 {
                stop
            } else {
                start + (stop - start) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// `n` logarithmically spaced points from `start > 0` to `stop`.
pub fn log_grid(start: f64, stop: f64, n: usize) -> Vec<f64> {
    let (a, b) = (start.ln(), stop.ln());
    linear_grid(a, b, n)
        .into_iter()
        .enumerate()
        .map(|(i, x)| {
            if i == 0 {
                start
            } else if i == n - 1 {
                stop
            } else {
                x.exp()
            }
        })
        .collect()
}

/// Relative slack on the half width.
pub const CONTAINMENT_SLACK: f64 = 1e-9;
/// Absolute tolerance as a fraction of `max |value|`.
pub const CONTAINMENT_ATOL_FRACTION: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentReport {
    pub points: usize,
    pub violations: usize,
    /// Grid indices of the first violations (at most 16).
    pub first_violations: Vec<usize>,
    pub atol: f64,
    /// Smallest `half_width(1 + slack) + atol - |value - center|`.
    pub min_margin: f64,
    pub argmin_t: f64,
    pub in_bounds: Vec<bool>,
}

impl ContainmentReport {
    pub fn contained(&self) -> bool {
        self.violations == 0
    }
}

/// Checks every grid point with `t >= 0` against the envelope.
pub fn containment_check(trace: &ResponseTrace, env: &BoundEnvelope) -> ContainmentReport {
    containment_check_with(trace, env, CONTAINMENT_ATOL_FRACTION)
}

pub fn containment_check_with(
    trace: &ResponseTrace,
    env: &BoundEnvelope,
    atol_fraction: f64,
) -> ContainmentReport {
    let vmax = trace.value.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let atol = atol_fraction * vmax;
    let mut report = ContainmentReport {
        points: 0,
        violations: 0,
        first_violations: Vec::new(),
        atol,
        min_margin: f64::INFINITY,
        argmin_t: f64::NAN,
        in_bounds: Vec::with_capacity(trace.len()),
    };
    for (i, (&t, &v)) in trace.t.iter().zip(&trace.value).enumerate() {
        if t < 0.0 {
            report.in_bounds.push(true);
            continue;
        }
        report.points += 1;
        let margin =
            env.half_width(t) * (1.0 + CONTAINMENT_SLACK) + atol - (v - env.center(t)).abs();
        let ok = margin >= 0.0;
        if !ok {
            report.violations += 1;
            if report.first_violations.len() < 16 {
                report.first_violations.push(i);
            }
        }
        if margin < report.min_margin || report.argmin_t.is_nan() {
            report.min_margin = margin;
            report.argmin_t = t;
        }
        report.in_bounds.push(ok);
    }
    report
}
