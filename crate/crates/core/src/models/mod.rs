//! Dielectric models as PR functions `p(s) = s·ε(s)`.
//!
//! All frequencies are angular (rad/s) and all times in seconds. The eV
//! interface converts through [`HBAR_EV_S`].

mod bb;
mod metals;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phi::{phi, phi_divided_difference};
use crate::pr_core::{AsymptoticCoeffs, PrFunction};
use crate::td_bounds::{ResponseSource, ResponseTrace};

pub use bb::{bb_susceptibility, bb_susceptibility_direct};
pub use metals::{MetalDb, MetalRecord, BUILTIN_METALS_TOML};

/// Vacuum permittivity in F/m.
pub const EPS0: f64 = 8.854_187_812_8e-12;

/// Reduced Planck constant in eV·s.
pub const HBAR_EV_S: f64 = 6.582_119_569e-16;

pub fn ev_to_rad_per_s(ev: f64) -> f64 {
    ev / HBAR_EV_S
}

pub fn rad_per_s_to_ev(omega: f64) -> f64 {
    omega * HBAR_EV_S
}

fn require(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParams(msg.into()))
    }
}

fn finite(name: &str, x: f64) -> Result<()> {
    require(x.is_finite(), format!("{name} = {x} is not finite"))
}

/// `ε(s) = ε_∞ + σ/(ε0 s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConductivityParams {
    pub eps_inf: f64,
    /// S/m.
    pub sigma: f64,
}

impl ConductivityParams {
    pub fn new(eps_inf: f64, sigma: f64) -> Result<Self> {
        let p = Self { eps_inf, sigma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        finite("eps_inf", self.eps_inf)?;
        finite("sigma", self.sigma)?;
        require(self.eps_inf > 0.0, "conductivity: eps_inf must be > 0")?;
        require(self.sigma >= 0.0, "conductivity: sigma must be >= 0")
    }

    /// Relaxation rate `σ/(ε0 ε_∞)`.
    pub fn rate(&self) -> f64 {
        self.sigma / (EPS0 * self.eps_inf)
    }
}

/// `ε(s) = ε_∞ + (ε_s - ε_∞)/(1 + s τ_r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DebyeParams {
    pub eps_inf: f64,
    pub eps_s: f64,
    pub tau_r: f64,
}

impl DebyeParams {
    pub fn new(eps_inf: f64, eps_s: f64, tau_r: f64) -> Result<Self> {
        let p = Self {
            eps_inf,
            eps_s,
            tau_r,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        finite("eps_inf", self.eps_inf)?;
        finite("eps_s", self.eps_s)?;
        finite("tau_r", self.tau_r)?;
        require(self.eps_inf > 0.0, "debye: eps_inf must be > 0")?;
        require(
            self.eps_s >= self.eps_inf,
            "debye: eps_s must be >= eps_inf",
        )?;
        require(self.tau_r > 0.0, "debye: tau_r must be > 0")
    }
}

/// `ε(s) = ε_∞ + ω_p²/(s² + ν s + ω0²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzParams {
    pub eps_inf: f64,
    pub omega_p: f64,
    pub omega_0: f64,
    pub nu: f64,
}

impl LorentzParams {
    pub fn new(eps_inf: f64, omega_p: f64, omega_0: f64, nu: f64) -> Result<Self> {
        let p = Self {
            eps_inf,
            omega_p,
            omega_0,
            nu,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (n, x) in [
            ("eps_inf", self.eps_inf),
            ("omega_p", self.omega_p),
            ("omega_0", self.omega_0),
            ("nu", self.nu),
        ] {
            finite(n, x)?;
        }
        require(self.eps_inf > 0.0, "lorentz: eps_inf must be > 0")?;
        require(self.omega_p > 0.0, "lorentz: omega_p must be > 0")?;
        require(self.omega_0 >= 0.0, "lorentz: omega_0 must be >= 0")?;
        require(self.nu >= 0.0, "lorentz: nu must be >= 0")?;
        require(
            self.omega_0 > 0.0 || self.nu > 0.0,
            "lorentz: omega_0 = nu = 0 has no Drude limit",
        )
    }

    pub fn eps_s(&self) -> f64 {
        self.eps_inf + (self.omega_p / self.omega_0).powi(2)
    }

    pub fn is_underdamped(&self) -> bool {
        self.omega_0 > 0.5 * self.nu
    }

    fn as_drude(&self) -> DrudeParams {
        DrudeParams {
            eps_inf: self.eps_inf,
            omega_p: self.omega_p,
            nu: self.nu,
        }
    }
}

/// `ε(s) = ε_∞ + ω_p²/(s (s + ν))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrudeParams {
    pub eps_inf: f64,
    pub omega_p: f64,
    pub nu: f64,
}

impl DrudeParams {
    pub fn new(eps_inf: f64, omega_p: f64, nu: f64) -> Result<Self> {
        let p = Self {
            eps_inf,
            omega_p,
            nu,
        };
        p.validate()?;
        Ok(p)
    }

    /// Free-electron fit for gold by Olmon et al.
    pub fn olmon_gold() -> Self {
        Self {
            eps_inf: 1.0,
            omega_p: 1.29e16,
            nu: 7.14e13,
        }
    }

    pub fn validate(&self) -> Result<()> {
        finite("eps_inf", self.eps_inf)?;
        finite("omega_p", self.omega_p)?;
        finite("nu", self.nu)?;
        require(self.eps_inf > 0.0, "drude: eps_inf must be > 0")?;
        require(self.omega_p > 0.0, "drude: omega_p must be > 0")?;
        require(self.nu > 0.0, "drude: nu must be > 0")
    }
}

/// One Gaussian-broadened Lorentz oscillator of a Brendel-Bormann model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BbOscillator {
    pub omega_p: f64,
    pub sigma: f64,
    pub omega: f64,
    pub nu: f64,
}

/// Brendel-Bormann model: Drude term `(ω_p0, ν0)` plus oscillators, `ε_∞ = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BbParams {
    pub omega_p0: f64,
    pub nu0: f64,
    pub oscillators: Vec<BbOscillator>,
}

impl BbParams {
    pub fn new(omega_p0: f64, nu0: f64, oscillators: Vec<BbOscillator>) -> Result<Self> {
        let p = Self {
            omega_p0,
            nu0,
            oscillators,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        finite("omega_p0", self.omega_p0)?;
        finite("nu0", self.nu0)?;
        require(self.omega_p0 > 0.0, "bb: omega_p0 must be > 0")?;
        require(self.nu0 > 0.0, "bb: nu0 must be > 0")?;
        for (j, o) in self.oscillators.iter().enumerate() {
            for (n, x) in [
                ("omega_p", o.omega_p),
                ("sigma", o.sigma),
                ("omega", o.omega),
                ("nu", o.nu),
            ] {
                finite(n, x)?;
                require(x > 0.0, format!("bb: oscillator {j} {n} must be > 0"))?;
            }
        }
        Ok(())
    }
}

/// Parameters of any supported model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    Conductivity(ConductivityParams),
    Debye(DebyeParams),
    Lorentz(LorentzParams),
    Drude(DrudeParams),
    BrendelBormann(BbParams),
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        match self {
            ModelParams::Conductivity(p) => p.validate(),
            ModelParams::Debye(p) => p.validate(),
            ModelParams::Lorentz(p) => p.validate(),
            ModelParams::Drude(p) => p.validate(),
            ModelParams::BrendelBormann(p) => p.validate(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ModelParams::Conductivity(_) => "conductivity",
            ModelParams::Debye(_) => "debye",
            ModelParams::Lorentz(_) => "lorentz",
            ModelParams::Drude(_) => "drude",
            ModelParams::BrendelBormann(_) => "brendel_bormann",
        }
    }

    /// Plasma frequency `sqrt(b_-1 - a_-1)` where the high expansion exists.
    pub fn plasma_frequency(&self) -> Option<f64> {
        match self {
            ModelParams::Lorentz(p) => Some(p.omega_p),
            ModelParams::Drude(p) => Some(p.omega_p),
            ModelParams::BrendelBormann(p) => Some(equivalent_plasma_frequency(p)),
            _ => None,
        }
    }

    /// Characteristic angular frequency of the model.
    pub fn omega_ref(&self) -> f64 {
        match self {
            ModelParams::Conductivity(p) => {
                if p.sigma > 0.0 {
                    p.rate()
                } else {
                    1.0
                }
            }
            ModelParams::Debye(p) => 1.0 / p.tau_r,
            ModelParams::Lorentz(p) if p.omega_0 > 0.0 => p.omega_0,
            ModelParams::Lorentz(p) => p.omega_p,
            ModelParams::Drude(p) => p.omega_p,
            ModelParams::BrendelBormann(p) => equivalent_plasma_frequency(p),
        }
    }
}

impl From<ConductivityParams> for ModelParams {
    fn from(p: ConductivityParams) -> Self {
        ModelParams::Conductivity(p)
    }
}

impl From<DebyeParams> for ModelParams {
    fn from(p: DebyeParams) -> Self {
        ModelParams::Debye(p)
    }
}

impl From<LorentzParams> for ModelParams {
    fn from(p: LorentzParams) -> Self {
        ModelParams::Lorentz(p)
    }
}

impl From<DrudeParams> for ModelParams {
    fn from(p: DrudeParams) -> Self {
        ModelParams::Drude(p)
    }
}

impl From<BbParams> for ModelParams {
    fn from(p: BbParams) -> Self {
        ModelParams::BrendelBormann(p)
    }
}

/// `sqrt(Σ ω_pj²)` over the Drude term and every oscillator.
pub fn equivalent_plasma_frequency(bb: &BbParams) -> f64 {
    let sum: f64 = bb.omega_p0 * bb.omega_p0
        + bb.oscillators
            .iter()
            .map(|o| o.omega_p * o.omega_p)
            .sum::<f64>();
    sum.sqrt()
}

/// The PR function `p(s) = s·ε(s)` of a model.
pub fn model_pr(params: &ModelParams) -> Result<PrFunction> {
    params.validate()?;
    let omega_ref = params.omega_ref();
    let pr = match *params {
        ModelParams::Conductivity(c) => {
            let g = c.sigma / EPS0;
            let rate = if c.sigma > 0.0 { c.rate() } else { 1.0 };
            PrFunction::new("conductivity", move |s| s * c.eps_inf + g)
                .with_band(rate, rate)
                .with_resonance(0.0)
                .with_continuation()
        }
        ModelParams::Debye(d) => {
            let delta = d.eps_s - d.eps_inf;
            let rate = 1.0 / d.tau_r;
            PrFunction::new("debye", move |s| {
                s * d.eps_inf + s * delta / (s * d.tau_r + 1.0)
            })
            .with_band(rate, rate)
            .with_resonance(0.0)
            .with_continuation()
        }
        ModelParams::Lorentz(l) if l.omega_0 == 0.0 => {
            return Ok(drude_pr(l.as_drude(), "lorentz"));
        }
        ModelParams::Lorentz(l) => {
            let wp2 = l.omega_p * l.omega_p;
            let w02 = l.omega_0 * l.omega_0;
            let pr = PrFunction::new("lorentz", move |s| {
                s * l.eps_inf + s * wp2 / (s * s + s * l.nu + w02)
            })
            .with_continuation()
            .with_resonance((w02 - 0.25 * l.nu * l.nu).max(0.0).sqrt());
            if l.nu == 0.0 {
                pr.with_band(l.omega_0, l.omega_0.max(l.omega_p))
                    .with_point_mass_candidates(vec![l.omega_0])
                    .with_discrete_measure()
            } else {
                let low = l.omega_0.min(l.nu).min(w02 / l.nu);
                let high = l.omega_0.max(l.omega_p).max(l.nu);
                pr.with_band(low, high)
            }
        }
        ModelParams::Drude(d) => return Ok(drude_pr(d, "drude")),
        ModelParams::BrendelBormann(ref b) => bb::bb_pr(b.clone()),
    };
    Ok(pr.with_omega_ref(omega_ref))
}

fn drude_pr(d: DrudeParams, label: &str) -> PrFunction {
    let wp2 = d.omega_p * d.omega_p;
    PrFunction::new(label, move |s| s * d.eps_inf + wp2 / (s + d.nu))
        .with_band(d.nu, d.omega_p.max(d.nu))
        .with_omega_ref(d.omega_p)
        .with_resonance(0.0)
        .with_continuation()
}

/// Exact order-1 asymptotic coefficients.
pub fn model_coeffs(params: &ModelParams) -> AsymptoticCoeffs {
    match params {
        ModelParams::Conductivity(c) if c.sigma == 0.0 => AsymptoticCoeffs::new(0.0, c.eps_inf)
            .with_low(vec![c.eps_inf])
            .with_high(vec![0.0]),
        ModelParams::Conductivity(c) => AsymptoticCoeffs::new(0.0, c.eps_inf),
        ModelParams::Debye(d) => AsymptoticCoeffs::new(0.0, d.eps_inf).with_low(vec![d.eps_s]),
        ModelParams::Lorentz(l) if l.omega_0 == 0.0 => {
            AsymptoticCoeffs::new(0.0, l.eps_inf).with_high(vec![l.omega_p * l.omega_p])
        }
        ModelParams::Lorentz(l) => AsymptoticCoeffs::new(0.0, l.eps_inf)
            .with_low(vec![l.eps_s()])
            .with_high(vec![l.omega_p * l.omega_p]),
        ModelParams::Drude(d) => {
            AsymptoticCoeffs::new(0.0, d.eps_inf).with_high(vec![d.omega_p * d.omega_p])
        }
        ModelParams::BrendelBormann(b) => {
            AsymptoticCoeffs::new(0.0, 1.0).with_high(vec![equivalent_plasma_frequency(b).powi(2)])
        }
    }
}

/// Exact response `ε(t) * δ_t f(t)` to the generalized step
/// `δ_t f(t) = (1 - e^{-t/τ}) H(t)`, or to the unit step when `tau == 0`.
///
/// Available for conductivity, Debye, Drude, and underdamped Lorentz with `tau == 0`.
pub fn closed_form_step_response(
    params: &ModelParams,
    t_grid: &[f64],
    tau: f64,
) -> Result<ResponseTrace> {
    params.validate()?;
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "raise time {tau} must be >= 0"
        )));
    }
    let eval: Box<dyn Fn(f64) -> f64> = match *params {
        ModelParams::Conductivity(c) => {
            let g = c.sigma / EPS0;
            Box::new(move |t| {
                let (df, f) = step_and_ramp(t, tau);
                c.eps_inf * df + g * f
            })
        }
        ModelParams::Debye(d) => {
            let delta = d.eps_s - d.eps_inf;
            let c = 1.0 / d.tau_r;
            if tau == 0.0 {
                Box::new(move |t| d.eps_inf - delta * (-c * t).exp_m1())
            } else {
                let a = 1.0 / tau;
                Box::new(move |t| {
                    -d.eps_inf * (-a * t).exp_m1()
                        - delta * a * c * t * t * phi_divided_difference(1, a * t, c * t)
                })
            }
        }
        ModelParams::Lorentz(l) if l.omega_0 == 0.0 => drude_response(l.as_drude(), tau),
        ModelParams::Lorentz(l) => {
            if tau != 0.0 {
                return Err(Error::Unsupported(
                    "lorentz closed form exists for the unit step only".into(),
                ));
            }
            if !l.is_underdamped() {
                return Err(Error::Unsupported(
                    "lorentz closed form requires omega_0 > nu/2".into(),
                ));
            }
            Box::new(move |t| lorentz_step(&l, t))
        }
        ModelParams::Drude(d) => drude_response(d, tau),
        ModelParams::BrendelBormann(_) => {
            return Err(Error::Unsupported(
                "brendel-bormann model has no closed-form time response".into(),
            ))
        }
    };
    let value = t_grid
        .iter()
        .map(|&t| if t < 0.0 { 0.0 } else { eval(t) })
        .collect();
    Ok(ResponseTrace::new(
        t_grid.to_vec(),
        value,
        ResponseSource::ClosedForm,
    ))
}

// (δ_t f, f) of the generalized step, or of the unit step when tau == 0.
fn step_and_ramp(t: f64, tau: f64) -> (f64, f64) {
    if tau == 0.0 {
        (1.0, t)
    } else {
        let x = t / tau;
        (x * phi(1, x), t * x * phi(2, x))
    }
}

fn drude_response(d: DrudeParams, tau: f64) -> Box<dyn Fn(f64) -> f64> {
    let wp2 = d.omega_p * d.omega_p;
    if tau == 0.0 {
        Box::new(move |t| d.eps_inf + wp2 * t * t * phi(2, d.nu * t))
    } else {
        let a = 1.0 / tau;
        Box::new(move |t| {
            -d.eps_inf * (-a * t).exp_m1()
                - wp2 * a * t * t * t * phi_divided_difference(2, a * t, d.nu * t)
        })
    }
}

fn lorentz_step(l: &LorentzParams, t: f64) -> f64 {
    let scale = (l.omega_p / l.omega_0).powi(2);
    let w02 = l.omega_0 * l.omega_0;
    let x = l.omega_0.max(l.nu) * t;
    let bracket = if x < 0.5 {
        // Taylor series of g'' + ν g' + ω0² g = 0, g(0) = 0, g'(0) = 1;
        // the bracket is ω0² ∫_0^t g.
        let (mut g, mut g_next) = (0.0, 1.0);
        let mut sum = 0.0;
        let mut tp = t;
        for k in 0..40 {
            let kf = k as f64;
            sum += g * tp / (kf + 1.0);
            let g2 = (-l.nu * (kf + 1.0) * g_next - w02 * g) / ((kf + 2.0) * (kf + 1.0));
            g = g_next;
            g_next = g2;
            tp *= t;
        }
        w02 * sum
    } else {
        let nu0 = (w02 - 0.25 * l.nu * l.nu).sqrt();
        1.0 - (-0.5 * l.nu * t).exp() * ((nu0 * t).cos() + 0.5 * l.nu / nu0 * (nu0 * t).sin())
    };
    l.eps_inf + scale * bracket
}

#[cfg(test)]
mod tests;

/// Parameter sets exercised by the self test and the acceptance suite:
/// the Lorentz oscillator with `ε_∞ = 1, ω0 = ω_p = 1` at three losses, the
/// Olmon Drude fit of gold, a water-like Debye relaxation, a conductor, and
/// the Brendel-Bormann model of gold.
pub fn fixtures() -> Vec<(String, ModelParams)> {
    let mut out: Vec<(String, ModelParams)> = [0.0, 0.5, 1.95]
        .iter()
        .map(|&nu| {
            (
                format!("lorentz_nu{nu}"),
                ModelParams::Lorentz(LorentzParams {
                    eps_inf: 1.0,
                    omega_p: 1.0,
                    omega_0: 1.0,
                    nu,
                }),
            )
        })
        .collect();
    out.push(("drude_au_olmon".into(), DrudeParams::olmon_gold().into()));
    out.push((
        "debye_water".into(),
        DebyeParams {
            eps_inf: 5.2,
            eps_s: 80.1,
            tau_r: 8.27e-12,
        }
        .into(),
    ));
    out.push((
        "conductivity".into(),
        ConductivityParams {
            eps_inf: 4.0,
            sigma: 5.0,
        }
        .into(),
    ));
    out.push((
        "bb_au".into(),
        MetalDb::builtin()
            .params("Au")
            .expect("gold is in the bundled database")
            .into(),
    ));
    out
}
