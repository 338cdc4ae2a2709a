//! Scenario configuration files.
//!
//! A config is a TOML document holding one or more `[[scenario]]` tables.
//! Every dimensional quantity is a string with an explicit unit:
//!
//! ```toml
//! schema_version = 1
//!
//! [[scenario]]
//! name = "drude_au_step"
//! outputs = ["trace", "envelope", "sumrules"]
//!
//! [scenario.model]
//! kind = "drude"
//! eps_inf = 1.0
//! omega_p = "1.29e16 rad/s"
//! nu = "7.14e13 s^-1"
//!
//! [scenario.pulse]
//! kind = "generalized_step"
//! tau = "1 /wp"
//!
//! [scenario.grid]
//! start = "0 s"
//! stop = "50 /wp"
//! count = 2000
//! spacing = "linear"
//! ```
//!
//! Frequencies take `rad/s`, `s^-1`, `1/s` or `eV`; times take `s`, `ns`,
//! `ps`, `fs`, `as`, `/wp` (multiples of the inverse plasma frequency) or
//! `/w0` (multiples of the inverse Lorentz resonance); conductivities take
//! `S/m`. A bare number in a dimensional field is rejected.

use std::collections::HashSet;
use std::ops::Range;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::{Spanned, Value};

use crate::error::{Error, Result};
use crate::models::{
    ev_to_rad_per_s, BbOscillator, BbParams, ConductivityParams, DebyeParams, DrudeParams,
    LorentzParams, MetalDb, ModelParams,
};
use crate::td_bounds::{linear_grid, log_grid, PulseSpec};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;
pub const MAX_GRID_POINTS: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    /// Sampled response with envelope columns.
    Trace,
    /// Envelope columns only.
    Envelope,
    Sumrules,
    /// Plasma-frequency table of the built-in metal database.
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeChoice {
    /// Combined when both order-1 expansions exist, else whichever exists.
    #[default]
    Auto,
    Early,
    Late,
    Combined,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseChoice {
    /// Numerical oracle, cross-checked against the closed form when one exists.
    #[default]
    Auto,
    ClosedForm,
    Numerical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Seconds.
    pub start: f64,
    /// Seconds.
    pub stop: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Linear => linear_grid(self.start, self.stop, self.count),
            Spacing::Log => log_grid(self.start, self.stop, self.count),
        }
    }
}

/// A fully resolved scenario, all quantities in SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    /// `lorentz`, `drude`, ..., or `metal:Au` for database entries.
    pub model_label: String,
    pub model: ModelParams,
    pub pulse: PulseSpec,
    pub grid: GridSpec,
    pub outputs: Vec<OutputKind>,
    pub envelope: EnvelopeChoice,
    pub response: ResponseChoice,
    pub sum_rule_order: u32,
}

impl ScenarioConfig {
    pub fn wants(&self, kind: OutputKind) -> bool {
        self.outputs.contains(&kind)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    schema_version: Option<Spanned<u32>>,
    #[serde(default)]
    scenario: Vec<Spanned<RawScenario>>,
}

fn default_outputs() -> Vec<OutputKind> {
    vec![
        OutputKind::Trace,
        OutputKind::Envelope,
        OutputKind::Sumrules,
    ]
}

fn default_order() -> u32 {
    1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: Spanned<String>,
    model: Spanned<RawModel>,
    pulse: Option<Spanned<RawPulse>>,
    grid: Spanned<RawGrid>,
    #[serde(default = "default_outputs")]
    outputs: Vec<OutputKind>,
    #[serde(default)]
    envelope: EnvelopeChoice,
    #[serde(default)]
    response: ResponseChoice,
    #[serde(default = "default_order")]
    sum_rule_order: u32,
}

type Q = Spanned<Value>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    kind: Spanned<String>,
    eps_inf: Option<Q>,
    eps_s: Option<Q>,
    sigma: Option<Q>,
    tau_r: Option<Q>,
    omega_p: Option<Q>,
    omega_0: Option<Q>,
    nu: Option<Q>,
    omega_p0: Option<Q>,
    nu0: Option<Q>,
    oscillators: Option<Vec<Spanned<RawOscillator>>>,
    symbol: Option<Spanned<String>>,
    database: Option<Spanned<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOscillator {
    omega_p: Q,
    sigma: Q,
    omega: Q,
    nu: Q,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPulse {
    kind: Spanned<String>,
    tau: Option<Q>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    start: Q,
    stop: Q,
    count: Spanned<i64>,
    #[serde(default = "default_spacing")]
    spacing: Spacing,
}

fn default_spacing() -> Spacing {
    Spacing::Linear
}

// Diagnostics carry the origin and 1-based line of the offending item.
struct Ctx<'a> {
    origin: &'a str,
    text: &'a str,
    base_dir: Option<&'a Path>,
}

impl Ctx<'_> {
    fn line(&self, span: &Range<usize>) -> usize {
        let end = span.start.min(self.text.len());
        self.text[..end].bytes().filter(|&b| b == b'\n').count() + 1
    }

    fn err(&self, span: &Range<usize>, field: &str, msg: impl std::fmt::Display) -> Error {
        Error::Config(format!(
            "{}:{}: field `{field}`: {msg}",
            self.origin,
            self.line(span)
        ))
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Dim {
    Dimensionless,
    Frequency,
    Time,
    Conductivity,
}

const FREQUENCY_UNITS: [&str; 4] = ["rad/s", "s^-1", "1/s", "eV"];
const TIME_UNITS: [&str; 7] = ["/wp", "/w0", "fs", "as", "ps", "ns", "s"];
const CONDUCTIVITY_UNITS: [&str; 1] = ["S/m"];

#[derive(Clone, Copy)]
enum Time {
    Seconds(f64),
    PerPlasma(f64),
    PerResonance(f64),
}

fn split_unit<'u>(text: &str, units: &[&'u str]) -> Option<(f64, &'u str)> {
    let text = text.trim();
    units.iter().find_map(|&u| {
        let num = text.strip_suffix(u)?.trim_end();
        num.parse::<f64>().ok().map(|v| (v, u))
    })
}

fn quantity(ctx: &Ctx, q: &Q, field: &str, dim: Dim) -> Result<(f64, &'static str)> {
    let span = q.span();
    let units: &[&'static str] = match dim {
        Dim::Dimensionless => &[],
        Dim::Frequency => &FREQUENCY_UNITS,
        Dim::Time => &TIME_UNITS,
        Dim::Conductivity => &CONDUCTIVITY_UNITS,
    };
    let (value, unit) = match (q.get_ref(), dim) {
        (Value::Float(v), Dim::Dimensionless) => (*v, ""),
        (Value::Integer(v), Dim::Dimensionless) => (*v as f64, ""),
        (Value::String(_), Dim::Dimensionless) => {
            return Err(ctx.err(&span, field, "dimensionless; give a plain number"));
        }
        (Value::Float(_) | Value::Integer(_), _) => {
            return Err(ctx.err(
                &span,
                field,
                format!("bare number; add a unit suffix ({})", units.join(", ")),
            ));
        }
        (Value::String(s), _) => split_unit(s, units).ok_or_else(|| {
            ctx.err(
                &span,
                field,
                format!(
                    "cannot read {s:?}; expected a number and one of {}",
                    units.join(", ")
                ),
            )
        })?,
        (other, _) => {
            return Err(ctx.err(
                &span,
                field,
                format!("expected a quantity, found {}", other.type_str()),
            ));
        }
    };
    if !value.is_finite() {
        return Err(ctx.err(&span, field, "value must be finite"));
    }
    Ok((value, unit))
}

fn dimensionless(ctx: &Ctx, q: &Q, field: &str) -> Result<f64> {
    Ok(quantity(ctx, q, field, Dim::Dimensionless)?.0)
}

fn frequency(ctx: &Ctx, q: &Q, field: &str) -> Result<f64> {
    let (v, unit) = quantity(ctx, q, field, Dim::Frequency)?;
    Ok(if unit == "eV" { ev_to_rad_per_s(v) } else { v })
}

fn conductivity(ctx: &Ctx, q: &Q, field: &str) -> Result<f64> {
    Ok(quantity(ctx, q, field, Dim::Conductivity)?.0)
}

fn time(ctx: &Ctx, q: &Q, field: &str) -> Result<Time> {
    let (v, unit) = quantity(ctx, q, field, Dim::Time)?;
    Ok(match unit {
        "/wp" => Time::PerPlasma(v),
        "/w0" => Time::PerResonance(v),
        "fs" => Time::Seconds(v * 1e-15),
        "as" => Time::Seconds(v * 1e-18),
        "ps" => Time::Seconds(v * 1e-12),
        "ns" => Time::Seconds(v * 1e-9),
        _ => Time::Seconds(v),
    })
}

fn resolve_time(ctx: &Ctx, q: &Q, field: &str, t: Time, model: &ModelParams) -> Result<f64> {
    match t {
        Time::Seconds(v) => Ok(v),
        Time::PerPlasma(v) => match model.plasma_frequency() {
            Some(wp) if wp > 0.0 => Ok(v / wp),
            _ => Err(ctx.err(
                &q.span(),
                field,
                format!(
                    "`/wp` needs a plasma frequency; {} model has none",
                    model.kind()
                ),
            )),
        },
        Time::PerResonance(v) => match model {
            ModelParams::Lorentz(l) if l.omega_0 > 0.0 => Ok(v / l.omega_0),
            _ => Err(ctx.err(
                &q.span(),
                field,
                "`/w0` is only defined for Lorentz models with omega_0 > 0",
            )),
        },
    }
}

fn req<'q>(
    ctx: &Ctx,
    span: &Range<usize>,
    kind: &str,
    q: &'q Option<Q>,
    field: &'static str,
) -> Result<(&'q Q, &'static str)> {
    let q = q
        .as_ref()
        .ok_or_else(|| ctx.err(span, field, format!("required for kind = \"{kind}\"")))?;
    Ok((q, field))
}

fn reject_extra(ctx: &Ctx, raw: &RawModel, allowed: &[&str]) -> Result<()> {
    let present: [(&str, Option<Range<usize>>); 12] = [
        ("eps_inf", raw.eps_inf.as_ref().map(Spanned::span)),
        ("eps_s", raw.eps_s.as_ref().map(Spanned::span)),
        ("sigma", raw.sigma.as_ref().map(Spanned::span)),
        ("tau_r", raw.tau_r.as_ref().map(Spanned::span)),
        ("omega_p", raw.omega_p.as_ref().map(Spanned::span)),
        ("omega_0", raw.omega_0.as_ref().map(Spanned::span)),
        ("nu", raw.nu.as_ref().map(Spanned::span)),
        ("omega_p0", raw.omega_p0.as_ref().map(Spanned::span)),
        ("nu0", raw.nu0.as_ref().map(Spanned::span)),
        (
            "oscillators",
            raw.oscillators
                .as_ref()
                .and_then(|o| o.first())
                .map(Spanned::span),
        ),
        ("symbol", raw.symbol.as_ref().map(Spanned::span)),
        ("database", raw.database.as_ref().map(Spanned::span)),
    ];
    for (name, span) in present {
        if let Some(span) = span {
            if !allowed.contains(&name) {
                return Err(ctx.err(
                    &span,
                    name,
                    format!("not a parameter of kind = \"{}\"", raw.kind.get_ref()),
                ));
            }
        }
    }
    Ok(())
}

fn build_model(ctx: &Ctx, m: &Spanned<RawModel>) -> Result<(String, ModelParams)> {
    let span = m.span();
    let raw = m.get_ref();
    let kind = raw.kind.get_ref().as_str();
    let invalid = |e: Error| ctx.err(&span, "model", e);

    let params: ModelParams = match kind {
        "conductivity" => {
            reject_extra(ctx, raw, &["eps_inf", "sigma"])?;
            let (q, f) = req(ctx, &span, kind, &raw.eps_inf, "eps_inf")?;
            let eps_inf = dimensionless(ctx, q, f)?;
            let (q, f) = req(ctx, &span, kind, &raw.sigma, "sigma")?;
            ConductivityParams::new(eps_inf, conductivity(ctx, q, f)?).map_err(invalid)?.into()
        }
        "debye" => {
            reject_extra(ctx, raw, &["eps_inf", "eps_s", "tau_r"])?;
            let (q, f) = req(ctx, &span, kind, &raw.eps_inf, "eps_inf")?;
            let eps_inf = dimensionless(ctx, q, f)?;
            let (q, f) = req(ctx, &span, kind, &raw.eps_s, "eps_s")?;
            let eps_s = dimensionless(ctx, q, f)?;
            let (q, f) = req(ctx, &span, kind, &raw.tau_r, "tau_r")?;
            let tau_r = match time(ctx, q, f)? {
                Time::Seconds(v) => v,
                _ => return Err(ctx.err(&q.span(), f, "relaxation time needs an absolute unit")),
            };
            DebyeParams::new(eps_inf, eps_s, tau_r).map_err(invalid)?.into()
        }
        "lorentz" => {
            reject_extra(ctx, raw, &["eps_inf", "omega_p", "omega_0", "nu"])?;
            let (q, f) = req(ctx, &span, kind, &raw.eps_inf, "eps_inf")?;
            let eps_inf = dimensionless(ctx, q, f)?;
            let (q, f) = req(ctx, &span, kind, &raw.omega_p, "omega_p")?;
            let wp = frequency(ctx, q, f)?;
            let (q, f) = req(ctx, &span, kind, &raw.omega_0, "omega_0")?;
            let w0 = frequency(ctx, q, f)?;
            let (q, f) = req(ctx, &span, kind, &raw.nu, "nu")?;
            let nu = frequency(ctx, q, f)?;
            LorentzParams::new(eps_inf, wp, w0, nu).map_err(invalid)?.into()
        }
        "drude" => {
            reject_extra(ctx, raw, &["eps_inf", "omega_p", "nu"])?;
            let (q, f) = req(ctx, &span, kind, &raw.eps_inf, "eps_inf")?;
            let eps_inf = dimensionless(ctx, q, f)?;
            let (q, f) = req(ctx, &span, kind, &raw.omega_p, "omega_p")?;
            let wp = frequency(ctx, q, f)?;
            let (q, f) = req(ctx, &span, kind, &raw.nu, "nu")?;
            let nu = frequency(ctx, q, f)?;
            DrudeParams::new(eps_inf, wp, nu).map_err(invalid)?.into()
        }
        "brendel_bormann" => {
            reject_extra(ctx, raw, &["omega_p0", "nu0", "oscillators"])?;
            let (q, f) = req(ctx, &span, kind, &raw.omega_p0, "omega_p0")?;
            let wp0 = frequency(ctx, q, f)?;
            let (q, f) = req(ctx, &span, kind, &raw.nu0, "nu0")?;
            let nu0 = frequency(ctx, q, f)?;
            let mut oscillators = Vec::new();
            for o in raw.oscillators.iter().flatten() {
                let o = o.get_ref();
                oscillators.push(BbOscillator {
                    omega_p: frequency(ctx, &o.omega_p, "oscillators.omega_p")?,
                    sigma: frequency(ctx, &o.sigma, "oscillators.sigma")?,
                    omega: frequency(ctx, &o.omega, "oscillators.omega")?,
                    nu: frequency(ctx, &o.nu, "oscillators.nu")?,
                });
            }
            BbParams::new(wp0, nu0, oscillators).map_err(invalid)?.into()
        }
        "metal" => {
            reject_extra(ctx, raw, &["symbol", "database"])?;
            let symbol = raw
                .symbol
                .as_ref()
                .ok_or_else(|| ctx.err(&span, "symbol", "required for kind = \"metal\""))?;
            let db = match &raw.database {
                None => MetalDb::builtin(),
                Some(path) => {
                    let p = PathBuf::from(path.get_ref());
                    let p = match ctx.base_dir {
                        Some(dir) if p.is_relative() => dir.join(p),
                        _ => p,
                    };
                    MetalDb::load(&p)?
                }
            };
            let params = db
                .params(symbol.get_ref())
                .map_err(|e| ctx.err(&symbol.span(), "symbol", e))?;
            return Ok((format!("metal:{}", symbol.get_ref()), params.into()));
        }
        other => {
            return Err(ctx.err(
                &raw.kind.span(),
                "kind",
                format!(
                    "unknown model {other:?}; expected conductivity, debye, lorentz, drude, brendel_bormann or metal"
                ),
            ))
        }
    };
    Ok((kind.to_string(), params))
}

fn build_pulse(ctx: &Ctx, p: Option<&Spanned<RawPulse>>, model: &ModelParams) -> Result<PulseSpec> {
    let Some(p) = p else {
        return Ok(PulseSpec::unit_step());
    };
    let raw = p.get_ref();
    let kind = raw.kind.get_ref().as_str();
    let pulse = match kind {
        "unit_step" | "ramp" => {
            if let Some(q) = &raw.tau {
                return Err(ctx.err(&q.span(), "tau", format!("not used by kind = \"{kind}\"")));
            }
            if kind == "ramp" {
                PulseSpec::ramp()
            } else {
                PulseSpec::unit_step()
            }
        }
        "generalized_step" => {
            let q = raw.tau.as_ref().ok_or_else(|| {
                ctx.err(&p.span(), "tau", "required for kind = \"generalized_step\"")
            })?;
            let t = time(ctx, q, "tau")?;
            let tau = resolve_time(ctx, q, "tau", t, model)?;
            PulseSpec::generalized_step(tau).map_err(|e| ctx.err(&q.span(), "tau", e))?
        }
        other => {
            return Err(ctx.err(
                &raw.kind.span(),
                "kind",
                format!("unknown pulse {other:?}; expected unit_step, ramp or generalized_step"),
            ))
        }
    };
    Ok(pulse)
}

fn build_grid(ctx: &Ctx, g: &Spanned<RawGrid>, model: &ModelParams) -> Result<GridSpec> {
    let raw = g.get_ref();
    let t = time(ctx, &raw.start, "grid.start")?;
    let start = resolve_time(ctx, &raw.start, "grid.start", t, model)?;
    let t = time(ctx, &raw.stop, "grid.stop")?;
    let stop = resolve_time(ctx, &raw.stop, "grid.stop", t, model)?;
    let count = *raw.count.get_ref();
    if !(2..=MAX_GRID_POINTS as i64).contains(&count) {
        return Err(ctx.err(
            &raw.count.span(),
            "grid.count",
            format!("{count} outside [2, {MAX_GRID_POINTS}]"),
        ));
    }
    if start < 0.0 {
        return Err(ctx.err(&raw.start.span(), "grid.start", "must be >= 0"));
    }
    if stop <= start {
        return Err(ctx.err(&raw.stop.span(), "grid.stop", "must exceed grid.start"));
    }
    if raw.spacing == Spacing::Log && start <= 0.0 {
        return Err(ctx.err(
            &raw.start.span(),
            "grid.start",
            "log spacing needs start > 0",
        ));
    }
    Ok(GridSpec {
        start,
        stop,
        count: count as usize,
        spacing: raw.spacing,
    })
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Parses config text; `origin` names the source in diagnostics and
/// `base_dir` anchors relative database paths.
pub fn parse_config(
    text: &str,
    origin: &str,
    base_dir: Option<&Path>,
) -> Result<Vec<ScenarioConfig>> {
    let ctx = Ctx {
        origin,
        text,
        base_dir,
    };
    let raw: RawFile = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| ctx.line(&s)).unwrap_or(0);
        Error::Config(format!("{origin}:{line}: {}", e.message().trim()))
    })?;
    match &raw.schema_version {
        Some(v) if *v.get_ref() != CONFIG_SCHEMA_VERSION => {
            return Err(ctx.err(
                &v.span(),
                "schema_version",
                format!(
                    "unsupported version {}; expected {CONFIG_SCHEMA_VERSION}",
                    v.get_ref()
                ),
            ))
        }
        None => {
            return Err(Error::Config(format!(
                "{origin}: missing `schema_version = {CONFIG_SCHEMA_VERSION}`"
            )))
        }
        _ => {}
    }
    if raw.scenario.is_empty() {
        return Err(Error::Config(format!("{origin}: no [[scenario]] tables")));
    }
    let mut names = HashSet::new();
    let mut out = Vec::with_capacity(raw.scenario.len());
    for sc in &raw.scenario {
        let s = sc.get_ref();
        let name = s.name.get_ref();
        if !valid_name(name) {
            return Err(ctx.err(&s.name.span(), "name", "use letters, digits, '_' or '-'"));
        }
        if !names.insert(name.clone()) {
            return Err(ctx.err(
                &s.name.span(),
                "name",
                format!("duplicate scenario {name:?}"),
            ));
        }
        if s.sum_rule_order == 0 || s.sum_rule_order % 2 == 0 {
            return Err(ctx.err(&sc.span(), "sum_rule_order", "must be odd and >= 1"));
        }
        if s.outputs.is_empty() {
            return Err(ctx.err(&sc.span(), "outputs", "request at least one output"));
        }
        let (model_label, model) = build_model(&ctx, &s.model)?;
        let pulse = build_pulse(&ctx, s.pulse.as_ref(), &model)?;
        let grid = build_grid(&ctx, &s.grid, &model)?;
        let mut outputs = s.outputs.clone();
        outputs.dedup();
        out.push(ScenarioConfig {
            name: name.clone(),
            model_label,
            model,
            pulse,
            grid,
            outputs,
            envelope: s.envelope,
            response: s.response,
            sum_rule_order: s.sum_rule_order,
        });
    }
    Ok(out)
}

pub fn load_config(path: &Path) -> Result<Vec<ScenarioConfig>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text, &path.display().to_string(), path.parent())
}
