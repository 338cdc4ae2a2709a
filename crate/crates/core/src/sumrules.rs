//! Moments of the representing measure and the sum rules that tie them to
//! the expansion coefficients.
//!
//! For odd order `M`, the low-frequency family reads
//!
//! ```text
//! ∫ ξ^-2 dβ = a_1 - b_1,      ∫ ξ^-n dβ = -(-1)^(n/2) a_(n-1),  n = 4, ..., M+1
//! ```
//!
//! and the high-frequency family
//!
//! ```text
//! ∫ dβ = b_-1 - a_-1,         ∫ ξ^n dβ = (-1)^(n/2) b_(-n-1),   n = 2, ..., M-1
//! ```
//!
//! with a point mass at the origin excluded from every moment.

use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pr_core::{extract_measure, AsymptoticCoeffs, MeasureSpec, PrFunction};
use crate::quad::{integrate_half_line, QuadConfig};

/// Default relative pass tolerance of a sum rule.
pub const SUM_RULE_REL_TOL: f64 = 1e-6;

/// Moment value with its quadrature error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moment {
    pub value: f64,
    pub error: f64,
}

fn moment_quad_config() -> QuadConfig {
    QuadConfig {
        rel_tol: 1e-9,
        abs_tol: 1e-300,
        max_intervals: 8000,
    }
}

/// `∫_{ℝ∖{0}} ξ^n dβ(ξ)` for even `n` (negative allowed).
pub fn moment(m: &MeasureSpec, n: i32) -> Result<f64> {
    Ok(moment_estimate(m, n)?.value)
}

/// [`moment`] with its error bound.
pub fn moment_estimate(m: &MeasureSpec, n: i32) -> Result<Moment> {
    if n % 2 != 0 {
        return Err(Error::InvalidInput(format!(
            "moment order {n} must be even"
        )));
    }
    let mut value = 0.0;
    for pm in &m.point_masses {
        if pm.location > 0.0 {
            value += 2.0 * pm.weight * pm.location.powi(n);
        }
    }
    let mut error = 0.0;
    if let Some(d) = &m.density {
        let scale = d.scale();
        let q = |xi: f64| xi.powi(n + 1) * d.eval(xi);

        // The integrand must fall off faster than 1/ξ at both ends.
        let decays = |a: f64, b: f64| {
            let (qa, qb) = (q(a).abs(), q(b).abs());
            !(qa.is_finite() && qb.is_finite()) || qb < 0.5 * qa || qb == 0.0
        };
        if !decays(1e6 * scale, 1e8 * scale) {
            return Err(Error::Divergent(format!(
                "ξ^{n} β'(ξ) does not decay faster than 1/ξ as ξ -> ∞"
            )));
        }
        if n < 0 && !decays(1e-6 * scale, 1e-8 * scale) {
            return Err(Error::Divergent(format!(
                "ξ^{n} β'(ξ) is not integrable at ξ -> 0"
            )));
        }

        let bad = AtomicBool::new(false);
        let est = integrate_half_line(
            |xi: f64| {
                let v = xi.powi(n) * d.eval(xi);
                if v.is_finite() {
                    v
                } else {
                    bad.store(true, Ordering::Relaxed);
                    0.0
                }
            },
            scale,
            d.breaks(),
            moment_quad_config(),
        );
        if bad.load(Ordering::Relaxed) {
            return Err(Error::NonConvergent(format!(
                "density evaluation failed inside the order {n} moment"
            )));
        }
        let est = est.map_err(|e| Error::Divergent(format!("order {n} moment: {e}")))?;
        value += 2.0 * est.value;
        error = 2.0 * est.error;
    }
    Ok(Moment { value, error })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Moments `∫ ξ^-n dβ`, tied to the expansion at `s -> 0`.
    Low,
    /// Moments `∫ ξ^n dβ`, tied to the expansion at `s -> ∞`.
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inapplicable,
}

/// Outcome of one sum rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumRuleVerdict {
    pub family: Family,
    /// The `n` of the identity (`n >= 2` for the low family, `n >= 0` for the high one).
    pub order_n: u32,
    /// Power of `ξ` in the moment: `-n` or `n`.
    pub power: i32,
    pub lhs: Option<Moment>,
    pub lhs_divergent: bool,
    pub rhs: Option<f64>,
    pub abs_diff: Option<f64>,
    pub rel_diff: Option<f64>,
    pub status: Status,
    pub note: String,
}

fn rhs_for(coeffs: &AsymptoticCoeffs, family: Family, n: u32) -> Option<f64> {
    let sign = if (n / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    match family {
        Family::Low if n == 2 => Some(coeffs.a_1()? - coeffs.b_1),
        Family::Low => Some(-sign * coeffs.a(n as i32 - 1)?),
        Family::High if n == 0 => Some(coeffs.b_minus1()? - coeffs.a_minus1),
        Family::High => Some(sign * coeffs.b(-(n as i32) - 1)?),
    }
}

/// Verifies both sum-rule families up to odd order `order` against
/// `coeffs`, with the measure recovered from `p`.
pub fn verify_sum_rules(
    p: &PrFunction,
    coeffs: &AsymptoticCoeffs,
    order: u32,
) -> Result<Vec<SumRuleVerdict>> {
    verify_sum_rules_with(p, coeffs, order, SUM_RULE_REL_TOL)
}

/// [`verify_sum_rules`] with an explicit relative pass tolerance.
pub fn verify_sum_rules_with(
    p: &PrFunction,
    coeffs: &AsymptoticCoeffs,
    order: u32,
    rel_tol: f64,
) -> Result<Vec<SumRuleVerdict>> {
    let measure = extract_measure(p);
    verify_against_measure(measure, coeffs, order, rel_tol)
}

/// Sum-rule verdicts for an explicit measure.
pub fn verify_measure_sum_rules(
    m: &MeasureSpec,
    coeffs: &AsymptoticCoeffs,
    order: u32,
    rel_tol: f64,
) -> Result<Vec<SumRuleVerdict>> {
    verify_against_measure(Ok(m.clone()), coeffs, order, rel_tol)
}

fn verify_against_measure(
    measure: Result<MeasureSpec>,
    coeffs: &AsymptoticCoeffs,
    order: u32,
    rel_tol: f64,
) -> Result<Vec<SumRuleVerdict>> {
    if order == 0 || order.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "sum-rule order {order} must be odd and >= 1"
        )));
    }
    // Ascending moment power: -(M+1), ..., -2, 0, 2, ..., M-1.
    let mut rules: Vec<(Family, u32)> = (1..=order.div_ceil(2))
        .rev()
        .map(|k| (Family::Low, 2 * k))
        .collect();
    rules.extend((0..order.div_ceil(2)).map(|k| (Family::High, 2 * k)));

    let moments: Vec<std::result::Result<Moment, Error>> = match &measure {
        Ok(m) => rules
            .par_iter()
            .map(|&(family, n)| {
                let power = if family == Family::Low {
                    -(n as i32)
                } else {
                    n as i32
                };
                moment_estimate(m, power)
            })
            .collect(),
        Err(e) => rules.iter().map(|_| Err(e.clone())).collect(),
    };

    let mut verdicts: Vec<SumRuleVerdict> = rules
        .iter()
        .zip(moments)
        .map(|(&(family, n), lhs)| {
            let power = if family == Family::Low {
                -(n as i32)
            } else {
                n as i32
            };
            let (lhs, lhs_divergent, note) = match lhs {
                Ok(m) => (Some(m), false, String::new()),
                Err(Error::Divergent(msg)) => (None, true, msg),
                Err(e) => (None, false, e.to_string()),
            };
            SumRuleVerdict {
                family,
                order_n: n,
                power,
                lhs,
                lhs_divergent,
                rhs: rhs_for(coeffs, family, n),
                abs_diff: None,
                rel_diff: None,
                status: Status::Fail,
                note,
            }
        })
        .collect();

    enforce_monotone_divergence(&mut verdicts);

    for v in &mut verdicts {
        match (v.rhs, v.lhs) {
            (None, _) => {
                v.status = Status::Inapplicable;
                let missing = match v.family {
                    Family::Low => "low-frequency",
                    Family::High => "high-frequency",
                };
                let found = if v.lhs_divergent {
                    "moment diverges"
                } else if v.lhs.is_some() {
                    "moment finite"
                } else {
                    "moment not computed"
                };
                v.note = join_note(&format!("{missing} coefficient absent; {found}"), &v.note);
            }
            (Some(rhs), Some(lhs)) => {
                let d = (lhs.value - rhs).abs();
                v.abs_diff = Some(d);
                v.rel_diff = Some(if rhs != 0.0 { d / rhs.abs() } else { d });
                let tol = (rel_tol * rhs.abs()).max(lhs.error);
                v.status = if d <= tol { Status::Pass } else { Status::Fail };
            }
            (Some(_), None) => {
                v.status = Status::Fail;
            }
        }
    }
    Ok(verdicts)
}

fn join_note(head: &str, tail: &str) -> String {
    if tail.is_empty() {
        head.to_string()
    } else {
        format!("{head}: {tail}")
    }
}

// Tails only get heavier away from power 0: a divergent moment of power
// k > 0 forces divergence of every larger power, and likewise for k < 0.
fn enforce_monotone_divergence(verdicts: &mut [SumRuleVerdict]) {
    let mut idx: Vec<usize> = (0..verdicts.len()).collect();
    idx.sort_by_key(|&i| verdicts[i].power);
    let upward: Vec<usize> = idx
        .iter()
        .copied()
        .filter(|&i| verdicts[i].power >= 0)
        .collect();
    let downward: Vec<usize> = idx
        .iter()
        .rev()
        .copied()
        .filter(|&i| verdicts[i].power < 0)
        .collect();
    let mut diverged = false;
    for i in upward {
        if diverged && !verdicts[i].lhs_divergent {
            verdicts[i].lhs = None;
            verdicts[i].lhs_divergent = true;
            verdicts[i].note = "implied by divergence of a lower power".into();
        }
        diverged |= verdicts[i].lhs_divergent;
    }
    diverged = false;
    for i in downward {
        if diverged && !verdicts[i].lhs_divergent {
            verdicts[i].lhs = None;
            verdicts[i].lhs_divergent = true;
            verdicts[i].note = "implied by divergence of a power closer to zero".into();
        }
        diverged |= verdicts[i].lhs_divergent;
    }
}

/// Result of checking one positivity inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    Strict,
    Equality,
    Violated,
    Inapplicable,
}

/// Consequences of positivity of the measure for the order-1 coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    /// `a_1 >= b_1`
    pub low: Inequality,
    /// `b_-1 >= a_-1`
    pub high: Inequality,
    /// Both equalities hold: `p(s) = b_1 s + a_-1 / s`.
    pub trivial: bool,
}

impl PositivityReport {
    pub fn holds(&self) -> bool {
        self.low != Inequality::Violated && self.high != Inequality::Violated
    }
}

fn compare(big: f64, small: f64) -> Inequality {
    let tol = 1e-12 * big.abs().max(small.abs());
    if (big - small).abs() <= tol {
        Inequality::Equality
    } else if big > small {
        Inequality::Strict
    } else {
        Inequality::Violated
    }
}

/// Checks `a_1 >= b_1` and `b_-1 >= a_-1` where the coefficients exist.
pub fn positivity_consequences(coeffs: &AsymptoticCoeffs) -> PositivityReport {
    let low = coeffs
        .a_1()
        .map_or(Inequality::Inapplicable, |a1| compare(a1, coeffs.b_1));
    let high = coeffs.b_minus1().map_or(Inequality::Inapplicable, |bm1| {
        compare(bm1, coeffs.a_minus1)
    });
    PositivityReport {
        low,
        high,
        trivial: low == Inequality::Equality && high == Inequality::Equality,
    }
}
