use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{EnvelopeChoice, OutputKind, ResponseChoice, ScenarioConfig};
use super::table::{reproduce_table_from, table_csv, TableReport};
use super::{write_atomic, ToleranceProfile, Tolerances};
use crate::error::{Error, Result};
use crate::models::{closed_form_step_response, model_coeffs, model_pr, MetalDb};
use crate::pr_core::{coeffs_from_pr, AsymptoticCoeffs, Estimated, Presence};
use crate::sumrules::{
    positivity_consequences, verify_sum_rules_with, PositivityReport, Status, SumRuleVerdict,
};
use crate::td_bounds::{
    combined_envelope, containment_check_with, early_time_envelope, late_time_envelope,
    numerical_response, BoundEnvelope, ResponseSource, ResponseTrace,
};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Directory for CSV, report and timing files; nothing is written when `None`.
    pub out_dir: Option<PathBuf>,
    pub profile: ToleranceProfile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Closed-form value from the model parameters.
    Exact,
    /// Only a numerical estimate from samples of `p(s)` exists.
    Numerical,
    Unavailable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub name: String,
    pub exact: Option<f64>,
    pub numerical: Option<f64>,
    pub uncertainty: Option<f64>,
    pub numerical_presence: Presence,
    /// Which of the two values the envelopes and sum rules use.
    pub provenance: Provenance,
    pub agrees: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseSummary {
    pub source: ResponseSource,
    pub points: usize,
    pub degraded: usize,
    pub max_error_estimate: Option<f64>,
    /// Largest relative deviation of the numerical trace from the closed form.
    pub closed_form_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentSummary {
    pub source: ResponseSource,
    pub points: usize,
    pub violations: usize,
    pub atol: f64,
    pub min_margin: Option<f64>,
    pub argmin_t: Option<f64>,
    pub first_violation_t: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub scenario: ScenarioConfig,
    pub tolerance_profile: ToleranceProfile,
    pub tolerances: Tolerances,
    pub coefficients: Vec<CoefficientRow>,
    pub positivity: PositivityReport,
    pub sum_rules: Vec<SumRuleVerdict>,
    pub envelope: Option<BoundEnvelope>,
    pub envelope_note: Option<String>,
    pub corner_time: Option<f64>,
    pub responses: Vec<ResponseSummary>,
    pub containment: Vec<ContainmentSummary>,
    pub table: Option<TableReport>,
    /// Output files, relative to the output directory.
    pub files: Vec<String>,
    pub timing_file: Option<String>,
    pub warnings: Vec<String>,
    pub failures: Vec<String>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("report: {e}")))
    }
}

/// Wall-clock seconds per phase; kept out of the report so that reports
/// are byte-identical across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub scenario: String,
    pub phases: Vec<(String, f64)>,
    pub total_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: VerificationReport,
    pub timing: Timing,
    /// Absolute paths of everything written.
    pub written: Vec<PathBuf>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn coefficient_rows(
    exact: &AsymptoticCoeffs,
    num: [(&str, Estimated); 4],
    omega_ref: f64,
    tol: f64,
) -> (Vec<CoefficientRow>, Vec<String>, Vec<String>) {
    let exact_values = [
        Some(exact.a_minus1),
        exact.a_1(),
        Some(exact.b_1),
        exact.b_minus1(),
    ];
    // a_-1 and b_-1 scale like ω², a_1 and b_1 are dimensionless.
    let floors = [
        1e-9 * omega_ref * omega_ref,
        1e-9,
        1e-9,
        1e-9 * omega_ref * omega_ref,
    ];
    let (mut rows, mut warnings, mut failures) = (Vec::new(), Vec::new(), Vec::new());
    for (((name, est), ex), floor) in num.into_iter().zip(exact_values).zip(floors) {
        let numerical = (est.presence == Presence::Present)
            .then_some(est.value)
            .and_then(finite);
        let agrees = match (ex, numerical) {
            (Some(e), Some(n)) => Some((n - e).abs() <= tol * e.abs().max(floor)),
            _ => None,
        };
        match (ex, est.presence, agrees) {
            (_, _, Some(false)) => failures.push(format!(
                "coefficient {name}: numerical {} disagrees with exact {}",
                est.value,
                ex.unwrap_or(f64::NAN)
            )),
            (Some(_), p, None) => warnings.push(format!(
                "coefficient {name}: exact value exists but the numerical estimate is {p:?}"
            )),
            (None, Presence::Present, _) => warnings.push(format!(
                "coefficient {name}: numerical estimate {} has no closed-form counterpart",
                est.value
            )),
            _ => {}
        }
        rows.push(CoefficientRow {
            name: name.to_string(),
            exact: ex,
            numerical: finite(est.value),
            uncertainty: finite(est.uncertainty),
            numerical_presence: est.presence,
            provenance: match (ex, numerical) {
                (Some(_), _) => Provenance::Exact,
                (None, Some(_)) => Provenance::Numerical,
                (None, None) => Provenance::Unavailable,
            },
            agrees,
        });
    }
    (rows, warnings, failures)
}

fn select_envelope(
    choice: EnvelopeChoice,
    coeffs: &AsymptoticCoeffs,
    cfg: &ScenarioConfig,
) -> Result<(Option<BoundEnvelope>, Option<String>)> {
    let step = cfg.pulse.raise_time() == 0.0;
    let late_step_only = || {
        Error::Config(format!(
            "scenario {}: the late-time envelope bounds the unit-step response only",
            cfg.name
        ))
    };
    Ok(match choice {
        EnvelopeChoice::None => (None, None),
        EnvelopeChoice::Early => (Some(early_time_envelope(coeffs, &cfg.pulse)?), None),
        EnvelopeChoice::Late if !step => return Err(late_step_only()),
        EnvelopeChoice::Late => (Some(late_time_envelope(coeffs)?), None),
        EnvelopeChoice::Combined if !step => return Err(late_step_only()),
        EnvelopeChoice::Combined => (Some(combined_envelope(coeffs)?), None),
        EnvelopeChoice::Auto => {
            let high = coeffs.has_high_order1();
            let low = coeffs.has_low_order1();
            if step && high && low {
                match combined_envelope(coeffs) {
                    Ok(env) => (Some(env), None),
                    Err(Error::TrivialMeasure) => (
                        Some(early_time_envelope(coeffs, &cfg.pulse)?),
                        Some("trivial measure: early envelope has zero width".into()),
                    ),
                    Err(e) => return Err(e),
                }
            } else if high {
                (Some(early_time_envelope(coeffs, &cfg.pulse)?), None)
            } else if low && step {
                (Some(late_time_envelope(coeffs)?), None)
            } else {
                (
                    None,
                    Some("no odd order-1 expansion applies to this pulse; no envelope".into()),
                )
            }
        }
    })
}

struct Clock {
    start: Instant,
    last: Instant,
    phases: Vec<(String, f64)>,
}

impl Clock {
    fn new() -> Self {
        let now = Instant::now();
        Self {
            start: now,
            last: now,
            phases: Vec::new(),
        }
    }

    fn lap(&mut self, name: &str) {
        let now = Instant::now();
        self.phases
            .push((name.to_string(), (now - self.last).as_secs_f64()));
        self.last = now;
    }
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn trace_csv(
    grid: &[f64],
    trace: Option<&ResponseTrace>,
    in_bounds: Option<&[bool]>,
    env: Option<&BoundEnvelope>,
) -> String {
    let span = grid.last().copied().unwrap_or(0.0) - grid.first().copied().unwrap_or(0.0);
    let with_fs = span < 1e-9;
    let mut out = String::from("t_seconds");
    if with_fs {
        out.push_str(",t_fs");
    }
    out.push_str(",response,center,bound_lo,bound_hi,in_bounds\n");
    for (i, &t) in grid.iter().enumerate() {
        out.push_str(&num(t));
        if with_fs {
            let _ = write!(out, ",{}", num(t * 1e15));
        }
        let response = trace.map(|tr| num(tr.value[i])).unwrap_or_default();
        let (c, lo, hi) = match env {
            Some(e) => (num(e.center(t)), num(e.lower(t)), num(e.upper(t))),
            None => Default::default(),
        };
        let ok = in_bounds.map(|b| b[i].to_string()).unwrap_or_default();
        let _ = writeln!(out, ",{response},{c},{lo},{hi},{ok}");
    }
    out
}

fn summarize_containment(
    trace: &ResponseTrace,
    env: &BoundEnvelope,
    atol_fraction: f64,
) -> (ContainmentSummary, Vec<bool>) {
    let r = containment_check_with(trace, env, atol_fraction);
    let summary = ContainmentSummary {
        source: trace.source,
        points: r.points,
        violations: r.violations,
        atol: r.atol,
        min_margin: finite(r.min_margin),
        argmin_t: finite(r.argmin_t),
        first_violation_t: r.first_violations.iter().map(|&i| trace.t[i]).collect(),
    };
    (summary, r.in_bounds)
}

/// Runs one scenario: coefficients, positivity, sum rules, envelope,
/// response traces and containment, writing CSV, report and timing files
/// when an output directory is given.
pub fn run_scenario(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunOutput> {
    let tol = opts.profile.tolerances();
    let mut clock = Clock::new();
    let (mut warnings, mut failures) = (Vec::new(), Vec::new());

    let p = model_pr(&cfg.model)?;
    let exact = model_coeffs(&cfg.model);
    let est = coeffs_from_pr(&p);
    let (coefficients, w, f) = coefficient_rows(
        &exact,
        [
            ("a_-1", est.a_minus1),
            ("a_1", est.a_1),
            ("b_1", est.b_1),
            ("b_-1", est.b_minus1),
        ],
        p.omega_ref(),
        tol.coefficient_rel,
    );
    warnings.extend(w);
    failures.extend(f);
    let positivity = positivity_consequences(&exact);
    if !positivity.holds() {
        failures.push(format!("positivity consequences violated: {positivity:?}"));
    }
    clock.lap("coefficients");

    let mut sum_rules = Vec::new();
    if cfg.wants(OutputKind::Sumrules) {
        sum_rules = verify_sum_rules_with(&p, &exact, cfg.sum_rule_order, tol.sum_rule_rel)?;
        for v in &mut sum_rules {
            v.rel_diff = v.rel_diff.and_then(finite);
            v.abs_diff = v.abs_diff.and_then(finite);
            if v.status == Status::Fail {
                failures.push(format!(
                    "sum rule {:?} n = {}: lhs {:?} vs rhs {:?}",
                    v.family,
                    v.order_n,
                    v.lhs.map(|m| m.value),
                    v.rhs
                ));
            }
        }
        clock.lap("sum_rules");
    }

    let wants_curves = cfg.wants(OutputKind::Trace) || cfg.wants(OutputKind::Envelope);
    let (envelope, envelope_note) = if wants_curves {
        select_envelope(cfg.envelope, &exact, cfg)?
    } else {
        (None, None)
    };
    let grid = cfg.grid.points();

    let mut traces: Vec<ResponseTrace> = Vec::new();
    let mut responses = Vec::new();
    if cfg.wants(OutputKind::Trace) {
        let tau = cfg.pulse.raise_time();
        let closed = match cfg.response {
            ResponseChoice::Numerical => None,
            _ => match closed_form_step_response(&cfg.model, &grid, tau) {
                Ok(tr) => Some(tr),
                Err(Error::Unsupported(why)) if cfg.response == ResponseChoice::Auto => {
                    warnings.push(format!("no closed form: {why}"));
                    None
                }
                Err(e) => return Err(e),
            },
        };
        clock.lap("closed_form");
        if cfg.response != ResponseChoice::ClosedForm {
            let numerical = numerical_response(&p, &cfg.pulse, &grid)?;
            let deviation = closed
                .as_ref()
                .map(|c| numerical.max_relative_deviation(c, 1e-300));
            if let Some(d) = deviation {
                if !(d <= tol.oracle_rel) {
                    failures.push(format!(
                        "numerical response deviates from the closed form by {d:e} (limit {:e})",
                        tol.oracle_rel
                    ));
                }
            }
            if numerical.degraded_count() > 0 {
                warnings.push(format!(
                    "{} of {} numerical points missed the accuracy target",
                    numerical.degraded_count(),
                    numerical.len()
                ));
            }
            responses.push(ResponseSummary {
                source: numerical.source,
                points: numerical.len(),
                degraded: numerical.degraded_count(),
                max_error_estimate: finite(
                    numerical
                        .error_estimate
                        .iter()
                        .fold(0.0_f64, |m, &e| m.max(e)),
                ),
                closed_form_deviation: deviation,
            });
            traces.push(numerical);
            clock.lap("numerical_response");
        }
        if let Some(c) = closed {
            responses.push(ResponseSummary {
                source: c.source,
                points: c.len(),
                degraded: 0,
                max_error_estimate: Some(0.0),
                closed_form_deviation: None,
            });
            // The closed form leads the CSV when present.
            traces.insert(0, c);
        }
    }

    let mut containment = Vec::new();
    let mut primary_in_bounds = None;
    if let Some(env) = &envelope {
        let (summaries, in_bounds, f) =
            containment_outcome(&traces, env, tol.containment_atol_fraction);
        containment = summaries;
        primary_in_bounds = in_bounds;
        failures.extend(f);
        clock.lap("containment");
    }

    let mut table = None;
    if cfg.wants(OutputKind::Table) {
        let t = reproduce_table_from(&MetalDb::builtin());
        for row in t.rows.iter().filter(|r| r.mismatch) {
            failures.push(format!("table: {} deviates by more than 0.5%", row.symbol));
        }
        table = Some(t);
        clock.lap("table");
    }

    let mut report = VerificationReport {
        schema_version: REPORT_SCHEMA_VERSION,
        scenario: cfg.clone(),
        tolerance_profile: opts.profile,
        tolerances: tol,
        coefficients,
        positivity,
        sum_rules,
        corner_time: envelope.and_then(|e| e.corner_time),
        envelope,
        envelope_note,
        responses,
        containment,
        table,
        files: Vec::new(),
        timing_file: None,
        passed: failures.is_empty(),
        warnings,
        failures,
    };

    let mut written = Vec::new();
    if let Some(dir) = &opts.out_dir {
        let mut write =
            |name: String, body: &[u8], report: &mut VerificationReport| -> Result<()> {
                let path = dir.join(&name);
                write_atomic(&path, body)?;
                report.files.push(name);
                written.push(path);
                Ok(())
            };
        if wants_curves {
            let csv = trace_csv(
                &grid,
                traces.first(),
                primary_in_bounds.as_deref(),
                report.envelope.as_ref(),
            );
            write(format!("{}.csv", cfg.name), csv.as_bytes(), &mut report)?;
        }
        if let Some(t) = &report.table {
            let csv = table_csv(t);
            write(
                format!("{}_table.csv", cfg.name),
                csv.as_bytes(),
                &mut report,
            )?;
        }
        report.timing_file = Some(format!("{}.timing.json", cfg.name));
        let json_name = format!("{}.report.json", cfg.name);
        report.files.push(json_name.clone());
        let path = dir.join(&json_name);
        write_atomic(&path, report.to_json()?.as_bytes())?;
        written.push(path);
    }
    clock.lap("write");

    let timing = Timing {
        scenario: cfg.name.clone(),
        total_seconds: (clock.last - clock.start).as_secs_f64(),
        phases: clock.phases,
    };
    if let (Some(dir), Some(name)) = (&opts.out_dir, &report.timing_file) {
        let path = dir.join(name);
        let body = serde_json::to_string_pretty(&timing).map_err(|e| Error::Io(e.to_string()))?;
        write_atomic(&path, body.as_bytes())?;
        written.push(path);
    }
    Ok(RunOutput {
        report,
        timing,
        written,
    })
}

/// Containment summaries of every trace, the in-bounds flags of the first
/// one, and one failure message per trace that leaves the envelope.
fn containment_outcome(
    traces: &[ResponseTrace],
    env: &BoundEnvelope,
    atol_fraction: f64,
) -> (Vec<ContainmentSummary>, Option<Vec<bool>>, Vec<String>) {
    let mut summaries = Vec::new();
    let mut primary = None;
    let mut failures = Vec::new();
    for tr in traces {
        let (summary, in_bounds) = summarize_containment(tr, env, atol_fraction);
        if summary.violations > 0 {
            failures.push(format!(
                "{:?} response leaves the envelope at {} of {} points (first t = {:e} s)",
                tr.source, summary.violations, summary.points, summary.first_violation_t[0]
            ));
        }
        summaries.push(summary);
        if primary.is_none() {
            primary = Some(in_bounds);
        }
    }
    (summaries, primary, failures)
}

/// Runs every scenario of a config file in order.
pub fn run_config_file(path: &Path, opts: &RunOptions) -> Result<Vec<RunOutput>> {
    super::config::load_config(path)?
        .iter()
        .map(|cfg| run_scenario(cfg, opts))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::LorentzParams;
    use crate::td_bounds::{linear_grid, PulseSpec};

    #[test]
    fn out_of_bounds_points_fail_and_are_marked() {
        let params = LorentzParams::new(1.0, 1.0, 1.0, 0.5).unwrap().into();
        let env = early_time_envelope(&model_coeffs(&params), &PulseSpec::unit_step()).unwrap();
        let grid = linear_grid(0.0, 1.0, 11);
        let good = closed_form_step_response(&params, &grid, 0.0).unwrap();
        let mut bad = good.clone();
        bad.value[7] = env.upper(grid[7]) + 0.1;

        let (summaries, in_bounds, failures) =
            containment_outcome(std::slice::from_ref(&good), &env, 1e-9);
        assert!(failures.is_empty() && summaries[0].violations == 0);
        assert!(in_bounds.unwrap().iter().all(|&b| b));

        let (summaries, in_bounds, failures) =
            containment_outcome(&[bad.clone(), good], &env, 1e-9);
        assert_eq!(failures.len(), 1);
        assert_eq!(summaries[0].violations, 1);
        assert_eq!(summaries[0].first_violation_t, vec![grid[7]]);
        let in_bounds = in_bounds.unwrap();
        let csv = trace_csv(&grid, Some(&bad), Some(&in_bounds), Some(&env));
        let flags: Vec<&str> = csv
            .lines()
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap())
            .collect();
        assert_eq!(flags.iter().filter(|f| **f == "false").count(), 1);
        assert_eq!(flags[7], "false");
    }
}
