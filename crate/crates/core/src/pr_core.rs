//! Positive-real functions and their representing measures.
//!
//! A PR function is holomorphic on `Re s > 0`, maps it into `Re p >= 0` and
//! satisfies `p(conj s) = conj p(s)`. Such a function is generated by a linear
//! term and an even nonnegative measure `β` on the real line:
//!
//! ```text
//! p(s) = b s + ∫ s / (s² + ξ²) dβ(ξ)
//! ```
//!
//! This module evaluates that integral for explicit measures ([`eval_cauer`]),
//! recovers the measure from an evaluatable function ([`density_from_pr`],
//! [`point_mass_at`]), estimates the low/high-frequency expansion coefficients
//! ([`coeffs_from_pr`]) and checks the PR properties statistically
//! ([`check_pr_properties`]).

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate_half_line, QuadConfig};
use crate::richardson::{extrapolate, geometric, Extrapolated};

pub type EvalFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// An evaluatable PR function `s ↦ p(s)` with the scales needed to take its
/// limits numerically.
#[derive(Clone)]
pub struct PrFunction {
    label: String,
    eval: EvalFn,
    omega_ref: f64,
    band: (f64, f64),
    point_mass_candidates: Vec<f64>,
    discrete_only: bool,
    continuable: bool,
    resonance: Option<f64>,
}

impl fmt::Debug for PrFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrFunction")
            .field("label", &self.label)
            .field("omega_ref", &self.omega_ref)
            .field("band", &self.band)
            .field("point_mass_candidates", &self.point_mass_candidates)
            .field("discrete_only", &self.discrete_only)
            .field("continuable", &self.continuable)
            .field("resonance", &self.resonance)
            .finish()
    }
}

impl PrFunction {
    pub fn new(
        label: impl Into<String>,
        eval: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            eval: Arc::new(eval),
            omega_ref: 1.0,
            band: (1.0, 1.0),
            point_mass_candidates: Vec::new(),
            discrete_only: false,
            continuable: false,
            resonance: None,
        }
    }

    /// Sampling scale for [`check_pr_properties`].
    pub fn with_omega_ref(mut self, omega_ref: f64) -> Self {
        self.omega_ref = omega_ref;
        self
    }

    /// Smallest and largest characteristic frequencies (rad/s). Limits at
    /// `s -> 0` are taken well below `low`, limits at `s -> ∞` well above `high`.
    pub fn with_band(mut self, low: f64, high: f64) -> Self {
        self.band = (low, high);
        self
    }

    /// Frequencies `ξ0 >= 0` where the measure may carry point masses.
    pub fn with_point_mass_candidates(mut self, xs: Vec<f64>) -> Self {
        self.point_mass_candidates = xs;
        self
    }

    /// Marks the measure as purely discrete (no density).
    pub fn with_discrete_measure(mut self) -> Self {
        self.discrete_only = true;
        self
    }

    /// Marks the closure as a well-behaved continuation into `Re s < 0`
    /// (rational models). Contour methods may then deform into the left half-plane.
    pub fn with_continuation(mut self) -> Self {
        self.continuable = true;
        self
    }

    /// Largest oscillation frequency of the time response (rad/s); zero for
    /// purely relaxing models. Sizes the inverse Laplace quadratures.
    pub fn with_resonance(mut self, omega: f64) -> Self {
        self.resonance = Some(omega);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn omega_ref(&self) -> f64 {
        self.omega_ref
    }

    pub fn band(&self) -> (f64, f64) {
        self.band
    }

    pub fn point_mass_candidates(&self) -> &[f64] {
        &self.point_mass_candidates
    }

    pub fn is_discrete_only(&self) -> bool {
        self.discrete_only
    }

    pub fn is_continuable(&self) -> bool {
        self.continuable
    }

    /// The value set by [`PrFunction::with_resonance`], or the upper band edge.
    pub fn resonance(&self) -> f64 {
        self.resonance.unwrap_or(self.band.1)
    }

    /// Evaluates the closure without a domain check.
    pub fn eval(&self, s: Complex64) -> Complex64 {
        (self.eval)(s)
    }

    /// Evaluates `p(s)` for `Re s > 0`.
    pub fn eval_checked(&self, s: Complex64) -> Result<Complex64> {
        if !(s.re > 0.0) || !s.im.is_finite() || !s.re.is_finite() {
            return Err(Error::DomainError(format!("s = {s}")));
        }
        Ok(self.eval(s))
    }
}

/// Even density `ξ ↦ β'(ξ)`; only `ξ >= 0` is ever passed to the closure.
#[derive(Clone)]
pub struct Density {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    scale: f64,
    breaks: Vec<f64>,
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Density")
            .field("scale", &self.scale)
            .field("breaks", &self.breaks)
            .finish()
    }
}

impl Density {
    /// `scale` is the frequency (rad/s) around which most of the mass sits.
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static, scale: f64) -> Self {
        Self {
            f: Arc::new(f),
            scale,
            breaks: Vec::new(),
        }
    }

    /// Frequencies `>= 0` where the density has sharp features.
    pub fn with_breaks(mut self, breaks: Vec<f64>) -> Self {
        self.breaks = breaks;
        self
    }

    pub fn eval(&self, xi: f64) -> f64 {
        (self.f)(xi.abs())
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }
}

/// A symmetric pair of point masses: `weight` at `+location` and at
/// `-location`. A location of zero stands for a single mass at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointMass {
    pub location: f64,
    pub weight: f64,
}

/// Measure data for Cauer's representation.
#[derive(Debug, Clone, Default)]
pub struct MeasureSpec {
    pub b_slope: f64,
    pub point_masses: Vec<PointMass>,
    pub density: Option<Density>,
}

impl MeasureSpec {
    pub fn new(
        b_slope: f64,
        point_masses: Vec<PointMass>,
        density: Option<Density>,
    ) -> Result<Self> {
        if !(b_slope >= 0.0 && b_slope.is_finite()) {
            return Err(Error::InvalidInput(format!("b = {b_slope} must be >= 0")));
        }
        for m in &point_masses {
            if !(m.location >= 0.0 && m.location.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "point mass location {} must be finite and >= 0",
                    m.location
                )));
            }
            if !(m.weight >= 0.0 && m.weight.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "point mass weight {} must be >= 0",
                    m.weight
                )));
            }
        }
        Ok(Self {
            b_slope,
            point_masses,
            density,
        })
    }

    /// Empty measure: `p(s) = b s`.
    pub fn linear(b_slope: f64) -> Self {
        Self {
            b_slope,
            ..Self::default()
        }
    }

    /// The PR function generated by this measure, evaluated by quadrature.
    pub fn to_pr(&self, label: impl Into<String>) -> PrFunction {
        let m = self.clone();
        let scale = m.density.as_ref().map_or(1.0, |d| d.scale);
        let mut candidates: Vec<f64> = m.point_masses.iter().map(|p| p.location).collect();
        candidates.sort_by(f64::total_cmp);
        candidates.dedup();
        let low = m
            .density
            .as_ref()
            .map(|d| {
                d.breaks
                    .iter()
                    .copied()
                    .filter(|&x| x > 0.0)
                    .fold(d.scale, f64::min)
            })
            .unwrap_or(scale);
        let pr = PrFunction::new(label, move |s| {
            eval_cauer(&m, s).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
        })
        .with_omega_ref(scale)
        .with_band(low, scale)
        .with_point_mass_candidates(candidates);
        if self.density.is_none() {
            pr.with_discrete_measure()
        } else {
            pr
        }
    }
}

fn cauer_quad_config() -> QuadConfig {
    QuadConfig {
        rel_tol: 1e-8,
        abs_tol: 1e-12,
        max_intervals: 20_000,
    }
}

/// Cauer's representation `b s + Σ s/(s²+ξ0²) β({±ξ0}) + ∫ s/(s²+ξ²) β'(ξ) dξ`.
pub fn eval_cauer(m: &MeasureSpec, s: Complex64) -> Result<Complex64> {
    eval_cauer_with(m, s, cauer_quad_config())
}

/// [`eval_cauer`] with explicit quadrature tolerances.
pub fn eval_cauer_with(m: &MeasureSpec, s: Complex64, cfg: QuadConfig) -> Result<Complex64> {
    if !(s.re > 0.0 && s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::DomainError(format!("s = {s}")));
    }
    let mut p = s * m.b_slope;
    for pm in &m.point_masses {
        if pm.location == 0.0 {
            p += pm.weight / s;
        } else {
            p += s * (2.0 * pm.weight) / (s * s + pm.location * pm.location);
        }
    }
    if let Some(d) = &m.density {
        // Integrand peaks near ξ = |Im s| with width Re s.
        let y = s.im.abs();
        let mut breaks = d.breaks.clone();
        breaks.extend([y, y - s.re, y + s.re, s.re]);
        let s2 = s * s;
        let est = integrate_half_line(
            |xi: f64| s / (s2 + xi * xi) * d.eval(xi),
            d.scale,
            &breaks,
            cfg,
        )?;
        p += est.value * 2.0;
    }
    Ok(p)
}

/// Default horizontal approach sequence for limits towards the axis point `iξ`.
pub fn default_sigma_seq(p: &PrFunction, xi: f64) -> Vec<f64> {
    let low = p.band.0;
    let base = if xi != 0.0 { low.min(xi.abs()) } else { low };
    geometric(1e-3 * base, 2.0, 4)
}

/// Density `β'(ξ) = lim (1/π) Re p(σ - iξ)` as `σ -> 0+`, by Richardson
/// extrapolation over `sigma_seq`.
pub fn density_from_pr(p: &PrFunction, xi: f64, sigma_seq: &[f64]) -> Result<f64> {
    Ok(density_estimate(p, xi, sigma_seq)?.value)
}

/// [`density_from_pr`] with its extrapolation error.
pub fn density_estimate(p: &PrFunction, xi: f64, sigma_seq: &[f64]) -> Result<Extrapolated<f64>> {
    if sigma_seq.len() < 2 || sigma_seq.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::InvalidInput(
            "sigma sequence needs at least two positive entries".into(),
        ));
    }
    let samples: Vec<Complex64> = sigma_seq
        .iter()
        .map(|&sig| p.eval(Complex64::new(sig, -xi)) / PI)
        .collect();
    let v: Vec<f64> = samples.iter().map(|z| z.re).collect();
    // Re p inherits the absolute round-off of |p|.
    let magnitude = samples.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonConvergent(format!(
            "non-finite p(σ - iξ) at ξ = {xi:e}"
        )));
    }
    let mut e = extrapolate(sigma_seq, &v);
    if e.error > 1e-4 * e.value.abs() + 1e-12 * magnitude {
        return Err(Error::NonConvergent(format!(
            "density extrapolation at ξ = {xi:e}: value {:e}, spread {:e}",
            e.value, e.error
        )));
    }
    // Round-off can leave a tiny negative value where the density vanishes.
    let floor = 1e-10 * e.sample_scale.max(1e-300);
    if e.value < 0.0 && e.value >= -floor.max(1e-10) {
        e.value = 0.0;
    }
    Ok(e)
}

/// Point mass `β({ξ0}) = lim (s - iξ0) p(s)` along `s = iξ0 + σ`, `σ -> 0+`.
///
/// Returns exactly 0 when the samples decay towards zero.
pub fn point_mass_at(p: &PrFunction, xi0: f64) -> Result<f64> {
    Ok(point_mass_estimate(p, xi0)?.0)
}

/// [`point_mass_at`] together with its uncertainty.
pub fn point_mass_estimate(p: &PrFunction, xi0: f64) -> Result<(f64, f64)> {
    let sig = default_sigma_seq(p, xi0);
    let g: Vec<Complex64> = sig
        .iter()
        .map(|&s| p.eval(Complex64::new(s, xi0)) * s)
        .collect();
    if g.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonConvergent(format!(
            "non-finite p near iξ0, ξ0 = {xi0:e}"
        )));
    }
    let first = g[0].norm();
    let last = g[g.len() - 1].norm();
    // A mass keeps (s - iξ0) p(s) at the weight; otherwise it decays at
    // least like sqrt(σ), i.e. by a factor >= 2.8 over the sequence.
    if first == 0.0 || last < 0.5 * first {
        return Ok((0.0, last));
    }
    let e = extrapolate(&sig, &g);
    if e.error > 1e-6 * e.value.norm() + 1e-12 * e.sample_scale {
        return Err(Error::NonConvergent(format!(
            "point mass at ξ0 = {xi0:e}: value {:e}, spread {:e}",
            e.value.re, e.error
        )));
    }
    if e.value.re.abs() <= 1e-9 * e.sample_scale {
        return Ok((0.0, e.error));
    }
    Ok((e.value.re, e.error))
}

/// Presence of an expansion coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Presence {
    Present,
    Absent,
    Unknown,
}

/// Odd expansion at one end of the frequency axis beyond the order `-1` term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "presence", content = "coefficients", rename_all = "snake_case")]
pub enum Expansion {
    /// `[a_1, a_3, ...]` at `s -> 0` or `[b_-1, b_-3, ...]` at `s -> ∞`.
    Present(Vec<f64>),
    Absent,
    Unknown,
}

impl Expansion {
    pub fn presence(&self) -> Presence {
        match self {
            Expansion::Present(_) => Presence::Present,
            Expansion::Absent => Presence::Absent,
            Expansion::Unknown => Presence::Unknown,
        }
    }

    fn get(&self, idx: usize) -> Option<f64> {
        match self {
            Expansion::Present(c) => c.get(idx).copied(),
            _ => None,
        }
    }

    /// Highest odd order carried, or `None`.
    fn order(&self) -> Option<usize> {
        match self {
            Expansion::Present(c) if !c.is_empty() => Some(2 * c.len() - 1),
            _ => None,
        }
    }
}

/// Coefficients of the odd expansions
///
/// ```text
/// p(s) = a_-1/s + a_1 s + a_3 s³ + ...    (s -> 0)
/// p(s) = b_1 s + b_-1/s + b_-3/s³ + ...   (s -> ∞)
/// ```
///
/// `a_-1` and `b_1` exist for every PR function; the remaining terms are
/// tri-state because the bounds are only valid when the order-1 terms exist.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticCoeffs {
    pub a_minus1: f64,
    pub b_1: f64,
    pub low: Expansion,
    pub high: Expansion,
}

impl AsymptoticCoeffs {
    pub fn new(a_minus1: f64, b_1: f64) -> Self {
        Self {
            a_minus1,
            b_1,
            low: Expansion::Absent,
            high: Expansion::Absent,
        }
    }

    pub fn with_low(mut self, coeffs: Vec<f64>) -> Self {
        self.low = Expansion::Present(coeffs);
        self
    }

    pub fn with_high(mut self, coeffs: Vec<f64>) -> Self {
        self.high = Expansion::Present(coeffs);
        self
    }

    pub fn has_low_order1(&self) -> bool {
        self.a_1().is_some()
    }

    pub fn has_high_order1(&self) -> bool {
        self.b_minus1().is_some()
    }

    pub fn a_1(&self) -> Option<f64> {
        self.low.get(0)
    }

    pub fn b_minus1(&self) -> Option<f64> {
        self.high.get(0)
    }

    /// `a_k` for odd `k >= -1`.
    pub fn a(&self, k: i32) -> Option<f64> {
        match k {
            -1 => Some(self.a_minus1),
            k if k >= 1 && k % 2 == 1 => self.low.get(((k - 1) / 2) as usize),
            _ => None,
        }
    }

    /// `b_k` for odd `k <= 1`.
    pub fn b(&self, k: i32) -> Option<f64> {
        match k {
            1 => Some(self.b_1),
            k if k <= -1 && k % 2 == -1 => self.high.get(((-k - 1) / 2) as usize),
            _ => None,
        }
    }

    pub fn low_order(&self) -> Option<usize> {
        self.low.order()
    }

    pub fn high_order(&self) -> Option<usize> {
        self.high.order()
    }
}

/// A numerically estimated coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimated {
    pub value: f64,
    pub uncertainty: f64,
    pub presence: Presence,
}

/// Order-1 coefficients estimated from samples of `p` on the positive real axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericCoeffs {
    pub a_minus1: Estimated,
    pub a_1: Estimated,
    pub b_1: Estimated,
    pub b_minus1: Estimated,
}

impl NumericCoeffs {
    pub fn to_coeffs(&self) -> AsymptoticCoeffs {
        let mut c = AsymptoticCoeffs::new(self.a_minus1.value, self.b_1.value);
        c.low = match self.a_1.presence {
            Presence::Present => Expansion::Present(vec![self.a_1.value]),
            Presence::Absent => Expansion::Absent,
            Presence::Unknown => Expansion::Unknown,
        };
        c.high = match self.b_minus1.presence {
            Presence::Present => Expansion::Present(vec![self.b_minus1.value]),
            Presence::Absent => Expansion::Absent,
            Presence::Unknown => Expansion::Unknown,
        };
        c
    }
}

fn classify(e: &Extrapolated<f64>) -> Estimated {
    let finite = e.value.is_finite() && e.error.is_finite();
    let presence = if !finite {
        Presence::Unknown
    } else if e.error <= 1e-6 * e.value.abs().max(e.sample_scale) {
        Presence::Present
    } else if e.error >= 1e-2 * e.value.abs().max(e.sample_scale) {
        Presence::Absent
    } else {
        Presence::Unknown
    };
    Estimated {
        value: if finite { e.value } else { f64::NAN },
        uncertainty: e.error,
        presence,
    }
}

/// Estimates `a_-1`, `a_1`, `b_1`, `b_-1` along the positive real axis.
///
/// A coefficient is `Present` only when the Richardson table settles;
/// a diverging residual marks it `Absent`, anything in between `Unknown`.
pub fn coeffs_from_pr(p: &PrFunction) -> NumericCoeffs {
    let (low, high) = p.band;
    let re = |x: f64| p.eval(Complex64::new(x, 0.0)).re;

    let a_minus1 = match point_mass_estimate(p, 0.0) {
        Ok((v, err)) => Estimated {
            value: v,
            uncertainty: err,
            presence: Presence::Present,
        },
        Err(_) => Estimated {
            value: f64::NAN,
            uncertainty: f64::INFINITY,
            presence: Presence::Unknown,
        },
    };

    // b_1 = lim p(σ)/σ in the variable u = 1/σ.
    let u: Vec<f64> = geometric(1e-3 / high, 2.0, 4);
    let g: Vec<f64> = u.iter().map(|&u| re(1.0 / u) * u).collect();
    let b_1 = {
        let mut e = classify(&extrapolate(&u, &g));
        if e.presence == Presence::Absent {
            e.presence = Presence::Unknown;
        }
        e
    };

    // a_1 = lim (p(σ) - a_-1/σ)/σ.
    let a_1 = if a_minus1.presence == Presence::Present {
        let sig = geometric(1e-2 * low, 2.0, 4);
        let r: Vec<f64> = sig
            .iter()
            .map(|&s| (re(s) - a_minus1.value / s) / s)
            .collect();
        classify(&extrapolate(&sig, &r))
    } else {
        Estimated {
            value: f64::NAN,
            uncertainty: f64::INFINITY,
            presence: Presence::Unknown,
        }
    };

    // b_-1 = lim (p(σ) - b_1 σ) σ as σ -> ∞.
    let b_minus1 = if b_1.presence == Presence::Present {
        let u = geometric(1e-2 / high, 2.0, 4);
        let r: Vec<f64> = u
            .iter()
            .map(|&u| (re(1.0 / u) - b_1.value / u) / u)
            .collect();
        classify(&extrapolate(&u, &r))
    } else {
        Estimated {
            value: f64::NAN,
            uncertainty: f64::INFINITY,
            presence: Presence::Unknown,
        }
    };

    NumericCoeffs {
        a_minus1,
        a_1,
        b_1,
        b_minus1,
    }
}

/// Kind of PR-property violation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    NegativeRealPart,
    Asymmetry,
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrViolation {
    pub s: Complex64,
    pub p: Complex64,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrCheckReport {
    pub label: String,
    pub samples: usize,
    pub seed: u64,
    pub violations: Vec<PrViolation>,
}

impl PrCheckReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Samples `s` log-uniformly in `Re s, |Im s| ∈ [1e-6, 1e6]·ω_ref` (random
/// sign of `Im s`) and checks `Re p >= -1e-12|p|` and
/// `|p(s) - conj p(conj s)| <= 1e-12|p|`.
pub fn check_pr_properties(p: &PrFunction, n_samples: usize, seed: u64) -> PrCheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = p.omega_ref;
    let points: Vec<Complex64> = (0..n_samples)
        .map(|_| {
            let re = w * 10f64.powf(rng.gen_range(-6.0..6.0));
            let im = w * 10f64.powf(rng.gen_range(-6.0..6.0));
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            Complex64::new(re, sign * im)
        })
        .collect();
    let found: Vec<Vec<PrViolation>> = points
        .par_iter()
        .map(|&s| {
            let v = p.eval(s);
            let vc = p.eval(s.conj());
            let mut out = Vec::new();
            let finite = |z: Complex64| z.re.is_finite() && z.im.is_finite();
            if !finite(v) || !finite(vc) {
                out.push(PrViolation {
                    s,
                    p: v,
                    kind: ViolationKind::NonFinite,
                });
                return out;
            }
            let mag = v.norm();
            if v.re < -1e-12 * mag {
                out.push(PrViolation {
                    s,
                    p: v,
                    kind: ViolationKind::NegativeRealPart,
                });
            }
            if (v - vc.conj()).norm() > 1e-12 * mag {
                out.push(PrViolation {
                    s,
                    p: v,
                    kind: ViolationKind::Asymmetry,
                });
            }
            out
        })
        .collect();
    PrCheckReport {
        label: p.label.clone(),
        samples: n_samples,
        seed,
        violations: found.into_iter().flatten().collect(),
    }
}

/// Measure recovered from an evaluatable PR function: the linear term from
/// `b_1`, point masses at the candidate locations and the axis density.
pub fn extract_measure(p: &PrFunction) -> Result<MeasureSpec> {
    let coeffs = coeffs_from_pr(p);
    if coeffs.b_1.presence != Presence::Present {
        return Err(Error::NonConvergent(format!(
            "{}: slope b_1 at infinity did not converge",
            p.label
        )));
    }
    let mut masses = Vec::new();
    for &xi0 in &p.point_mass_candidates {
        let w = point_mass_at(p, xi0)?;
        if w > 0.0 {
            masses.push(PointMass {
                location: xi0,
                weight: w,
            });
        }
    }
    let density = if p.discrete_only {
        None
    } else {
        let pf = p.clone();
        let (low, high) = p.band;
        Some(
            Density::new(
                move |xi| {
                    let seq = default_sigma_seq(&pf, xi);
                    density_from_pr(&pf, xi, &seq).unwrap_or(f64::NAN)
                },
                (low * high).sqrt(),
            )
            .with_breaks(vec![low, high]),
        )
    };
    MeasureSpec::new(coeffs.b_1.value.max(0.0), masses, density)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lorentz_density(wp: f64, w0: f64, nu: f64) -> impl Fn(f64) -> f64 {
        move |x: f64| wp * wp * nu * x * x / (PI * ((w0 * w0 - x * x).powi(2) + nu * nu * x * x))
    }

    fn lorentz_pr(eps_inf: f64, wp: f64, w0: f64, nu: f64) -> PrFunction {
        PrFunction::new("lorentz", move |s: Complex64| {
            s * (eps_inf + wp * wp / (s * s + s * nu + w0 * w0))
        })
        .with_band(if nu > 0.0 { w0.min(nu) } else { w0 }, w0.max(wp))
    }

    #[test]
    fn cauer_of_origin_mass_is_c_over_s() {
        let m = MeasureSpec::new(
            0.0,
            vec![PointMass {
                location: 0.0,
                weight: 2.5,
            }],
            None,
        )
        .unwrap();
        let s = c(0.3, -1.7);
        assert!((eval_cauer(&m, s).unwrap() - 2.5 / s).norm() < 1e-15);
    }

    #[test]
    fn cauer_of_empty_measure_is_linear() {
        let s = c(2.0, 5.0);
        assert_eq!(eval_cauer(&MeasureSpec::linear(1.5), s).unwrap(), s * 1.5);
    }

    #[test]
    fn cauer_of_constant_density_is_constant() {
        let cst = 3.0;
        let m = MeasureSpec::new(0.0, vec![], Some(Density::new(move |_| cst / PI, 1.0))).unwrap();
        for s in [c(1.0, 0.0), c(0.01, 4.0), c(30.0, -2.0)] {
            let v = eval_cauer(&m, s).unwrap();
            assert!((v - c(cst, 0.0)).norm() < 1e-7, "{s} -> {v}");
        }
    }

    #[test]
    fn cauer_rejects_left_half_plane() {
        assert!(matches!(
            eval_cauer(&MeasureSpec::linear(1.0), c(0.0, 1.0)),
            Err(Error::DomainError(_))
        ));
    }

    #[test]
    fn lorentz_density_recovered() {
        let p = lorentz_pr(1.0, 1.0, 1.0, 0.5);
        let rho = lorentz_density(1.0, 1.0, 0.5);
        for &xi in &[0.05, 0.7, 1.0, 1.3, 10.0] {
            let d = density_from_pr(&p, xi, &default_sigma_seq(&p, xi)).unwrap();
            assert!((d - rho(xi)).abs() < 1e-9 * rho(xi), "xi = {xi}");
        }
    }

    #[test]
    fn debye_density_recovered() {
        let (einf, es, tau) = (2.0, 80.0, 1e-11);
        let p = PrFunction::new("debye", move |s: Complex64| {
            s * (einf + (es - einf) / (s * tau + 1.0))
        })
        .with_band(1.0 / tau, 1.0 / tau);
        for &xi in &[1e9, 1e11, 1e13] {
            let exact = (es - einf) * xi * xi * tau / (PI * (1.0 + xi * xi * tau * tau));
            let d = density_from_pr(&p, xi, &default_sigma_seq(&p, xi)).unwrap();
            assert!((d - exact).abs() < 1e-8 * exact);
        }
    }

    #[test]
    fn linear_function_has_zero_density() {
        let p = PrFunction::new("linear", |s| s * 3.0);
        let d = density_from_pr(&p, 2.0, &default_sigma_seq(&p, 2.0)).unwrap();
        assert!(d.abs() < 1e-15);
    }

    #[test]
    fn density_at_point_mass_does_not_converge() {
        let p = lorentz_pr(1.0, 1.0, 1.0, 0.0);
        let r = density_from_pr(&p, 1.0, &default_sigma_seq(&p, 1.0));
        assert!(matches!(r, Err(Error::NonConvergent(_))));
    }

    #[test]
    fn point_masses() {
        let cst = 0.75;
        let p = PrFunction::new("c/s", move |s: Complex64| cst / s);
        assert!((point_mass_at(&p, 0.0).unwrap() - cst).abs() < 1e-12);

        let lossy = lorentz_pr(1.0, 1.0, 1.0, 0.5);
        assert_eq!(point_mass_at(&lossy, 1.0).unwrap(), 0.0);
        assert_eq!(point_mass_at(&lossy, 0.0).unwrap(), 0.0);

        let (wp, w0) = (1.3, 0.8);
        let lossless = lorentz_pr(1.0, wp, w0, 0.0);
        let w = point_mass_at(&lossless, w0).unwrap();
        assert!((w - wp * wp / 2.0).abs() < 1e-8 * wp * wp);
    }

    #[test]
    fn lorentz_coefficients() {
        let (einf, wp, w0, nu) = (1.5, 2.0, 1.0, 0.5);
        let p = lorentz_pr(einf, wp, w0, nu);
        let k = coeffs_from_pr(&p);
        let es = einf + wp * wp / (w0 * w0);
        assert_eq!(k.a_minus1.value, 0.0);
        assert_eq!(k.a_1.presence, Presence::Present);
        assert!((k.a_1.value - es).abs() < 1e-8 * es);
        assert!((k.b_1.value - einf).abs() < 1e-10 * einf);
        assert_eq!(k.b_minus1.presence, Presence::Present);
        assert!((k.b_minus1.value - wp * wp).abs() < 1e-6 * wp * wp);
    }

    #[test]
    fn conductivity_has_no_order_one_terms() {
        let (einf, rate) = (2.0, 3.0);
        let p = PrFunction::new("cond", move |s: Complex64| s * einf + rate).with_band(1.0, 1.0);
        let k = coeffs_from_pr(&p);
        assert_eq!(k.a_minus1.value, 0.0);
        assert!((k.b_1.value - einf).abs() < 1e-12);
        assert_eq!(k.a_1.presence, Presence::Absent);
        assert_eq!(k.b_minus1.presence, Presence::Absent);
    }

    #[test]
    fn pure_capacitor_coefficients() {
        let p = PrFunction::new("c/s", |s: Complex64| 4.0 / s);
        let k = coeffs_from_pr(&p);
        assert!((k.a_minus1.value - 4.0).abs() < 1e-12);
        assert!(k.b_1.value.abs() < 1e-12);
    }

    #[test]
    fn non_pr_function_is_flagged_everywhere() {
        let p = PrFunction::new("minus s", |s: Complex64| -s);
        let r = check_pr_properties(&p, 200, 3);
        assert_eq!(
            r.violations
                .iter()
                .filter(|v| v.kind == ViolationKind::NegativeRealPart)
                .count(),
            200
        );
    }

    #[test]
    fn lorentz_passes_pr_check() {
        let r = check_pr_properties(&lorentz_pr(1.0, 1.0, 1.0, 0.5), 2000, 11);
        assert!(
            r.is_clean(),
            "{:?}",
            &r.violations[..r.violations.len().min(3)]
        );
    }

    #[test]
    fn a_minus1_equals_origin_mass() {
        let p = PrFunction::new("mix", |s: Complex64| s * 2.0 + 0.4 / s + s / (s * s + 1.0))
            .with_band(1.0, 1.0);
        let k = coeffs_from_pr(&p);
        let m = point_mass_at(&p, 0.0).unwrap();
        assert!((k.a_minus1.value - m).abs() <= 1e-8 * m);
        assert!((m - 0.4).abs() < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn cauer_round_trip_recovers_density(
            wp in 0.5f64..2.0, w0 in 0.5f64..2.0, nu in 0.2f64..1.5, t in 0.05f64..0.95
        ) {
            let rho = lorentz_density(wp, w0, nu);
            let m = MeasureSpec::new(0.0, vec![], Some(
                Density::new(lorentz_density(wp, w0, nu), w0).with_breaks(vec![w0])
            )).unwrap();
            let cfg = QuadConfig { rel_tol: 1e-12, abs_tol: 1e-15, max_intervals: 20_000 };
            let p = PrFunction::new("cauer", move |s| eval_cauer_with(&m, s, cfg).unwrap())
                .with_band(nu.min(w0), w0.max(wp));
            let xi = 3.0 * w0 * t;
            let got = density_from_pr(&p, xi, &default_sigma_seq(&p, xi)).unwrap();
            prop_assert!((got - rho(xi)).abs() <= 1e-6 * rho(xi), "{} vs {}", got, rho(xi));
        }

        #[test]
        fn recovered_density_is_even(xi in 0.01f64..20.0, nu in 0.1f64..1.9) {
            let p = lorentz_pr(1.0, 1.0, 1.0, nu);
            let seq = default_sigma_seq(&p, xi);
            let a = density_from_pr(&p, xi, &seq).unwrap();
            let b = density_from_pr(&p, -xi, &seq).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1e-300));
        }
    }
}
