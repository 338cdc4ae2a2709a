use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{
    EnvelopeChoice, GridSpec, OutputKind, ResponseChoice, ScenarioConfig, Spacing,
};
use super::run::{run_scenario, RunOptions};
use super::table::reproduce_table_from;
use super::ToleranceProfile;
use crate::complex_special::faddeeva;
use crate::models::{
    bb_susceptibility, bb_susceptibility_direct, fixtures, model_coeffs, model_pr, DrudeParams,
    LorentzParams, MetalDb, ModelParams,
};
use crate::pr_core::{
    check_pr_properties, coeffs_from_pr, default_sigma_seq, density_from_pr, eval_cauer_with,
    Density, MeasureSpec, PrFunction, Presence,
};
use crate::quad::QuadConfig;
use crate::sumrules::{verify_sum_rules_with, Status};
use crate::td_bounds::{combined_envelope, PulseSpec};

// e·erfc(1)
const W_AT_I: f64 = 0.427_583_576_155_807;

#[derive(Debug, Clone)]
pub struct SelfTestOptions {
    pub seed: u64,
    pub profile: ToleranceProfile,
    /// Metal database for the table check; the bundled one when `None`.
    pub metals_db: Option<PathBuf>,
    /// PR property samples per model.
    pub pr_samples: usize,
    /// Grid points per containment scenario.
    pub grid_points: usize,
}

impl Default for SelfTestOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            profile: ToleranceProfile::Default,
            metals_db: None,
            pr_samples: 2000,
            grid_points: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfTestReport {
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
}

impl SelfTestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{} {:<18} {:>7.2}s  {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.seconds,
                c.detail
            ));
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        out.push_str(&format!(
            "seed {}: {} checks, {failed} failed\n",
            self.seed,
            self.checks.len()
        ));
        out
    }
}

type Check = std::result::Result<String, String>;

fn faddeeva_check(rng: &mut ChaCha8Rng, n: usize) -> Check {
    for _ in 0..n {
        let r = 50.0 * rng.gen::<f64>();
        let th = rng.gen_range(0.0..PI);
        let z = Complex64::from_polar(r, th);
        let w = faddeeva(z).map_err(|e| format!("w({z}): {e}"))?;
        let wr = faddeeva(-z.conj()).map_err(|e| format!("w({}): {e}", -z.conj()))?;
        if (wr - w.conj()).norm() > 1e-12 * w.norm() {
            return Err(format!("conjugate symmetry fails at z = {z}"));
        }
        if z.im > 0.0 && !(w.re > 0.0) {
            return Err(format!("Re w({z}) = {} is not positive", w.re));
        }
    }
    let w = faddeeva(Complex64::new(0.0, 1.0)).map_err(|e| e.to_string())?;
    if (w - W_AT_I).norm() > 1e-10 * W_AT_I {
        return Err(format!("w(i) = {w}, expected {W_AT_I}"));
    }
    Ok(format!("{n} points"))
}

fn pr_check(seed: u64, samples: usize) -> Check {
    let mut total = 0;
    for (name, params) in fixtures() {
        let p = model_pr(&params).map_err(|e| format!("{name}: {e}"))?;
        let r = check_pr_properties(&p, samples, seed);
        if !r.is_clean() {
            return Err(format!(
                "{name}: {} violations, first {:?}",
                r.violations.len(),
                r.violations[0]
            ));
        }
        total += r.samples;
    }
    Ok(format!("{total} samples over {} models", fixtures().len()))
}

fn lorentz_density(wp: f64, w0: f64, nu: f64) -> impl Fn(f64) -> f64 + Send + Sync + Copy {
    move |x: f64| wp * wp * nu * x * x / (PI * ((w0 * w0 - x * x).powi(2) + nu * nu * x * x))
}

fn cauer_check(rng: &mut ChaCha8Rng, cases: usize) -> Check {
    let cfg = QuadConfig {
        rel_tol: 1e-12,
        abs_tol: 1e-15,
        max_intervals: 20_000,
    };
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let wp = rng.gen_range(0.5..2.0);
        let w0 = rng.gen_range(0.5..2.0);
        let nu = rng.gen_range(0.2..1.5);
        let rho = lorentz_density(wp, w0, nu);
        let m = MeasureSpec::new(
            0.0,
            vec![],
            Some(Density::new(rho, w0).with_breaks(vec![w0])),
        )
        .map_err(|e| e.to_string())?;
        let p = PrFunction::new("cauer", move |s| {
            eval_cauer_with(&m, s, cfg).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
        })
        .with_band(nu.min(w0), w0.max(wp));
        let xi = 3.0 * w0 * rng.gen_range(0.05..0.95);
        let got = density_from_pr(&p, xi, &default_sigma_seq(&p, xi)).map_err(|e| e.to_string())?;
        let rel = (got - rho(xi)).abs() / rho(xi);
        if !(rel <= 1e-6) {
            return Err(format!(
                "density at ξ = {xi}: {got} vs {} (ω0 {w0}, ν {nu})",
                rho(xi)
            ));
        }
        worst = worst.max(rel);
    }
    Ok(format!(
        "{cases} densities, worst relative error {worst:.1e}"
    ))
}

fn coefficient_check(tol: f64) -> Check {
    for (name, params) in fixtures() {
        let exact = model_coeffs(&params);
        let p = model_pr(&params).map_err(|e| e.to_string())?;
        let num = coeffs_from_pr(&p);
        let pairs = [
            ("b_1", Some(exact.b_1), num.b_1),
            ("a_1", exact.a_1(), num.a_1),
            ("b_-1", exact.b_minus1(), num.b_minus1),
        ];
        for (coef, ex, est) in pairs {
            if let Some(e) = ex {
                if est.presence != Presence::Present || (est.value - e).abs() > tol * e.abs() {
                    return Err(format!("{name} {coef}: estimate {est:?}, exact {e}"));
                }
            } else if est.presence == Presence::Present {
                return Err(format!(
                    "{name} {coef}: estimated {} but no such term exists",
                    est.value
                ));
            }
        }
    }
    Ok("numerical estimates match closed forms".into())
}

fn sum_rule_check(tol: f64) -> Check {
    let cases: [(&str, ModelParams); 2] = [
        (
            "lorentz_nu0.5",
            LorentzParams::new(1.0, 1.0, 1.0, 0.5).unwrap().into(),
        ),
        ("drude_au_olmon", DrudeParams::olmon_gold().into()),
    ];
    let mut n = 0;
    for (name, params) in cases {
        let p = model_pr(&params).map_err(|e| e.to_string())?;
        let verdicts =
            verify_sum_rules_with(&p, &model_coeffs(&params), 1, tol).map_err(|e| e.to_string())?;
        for v in verdicts {
            match v.status {
                Status::Pass => n += 1,
                Status::Fail => return Err(format!("{name}: {v:?}")),
                Status::Inapplicable => {}
            }
        }
    }
    Ok(format!("{n} identities closed"))
}

fn corner_time_check() -> Check {
    let l = ModelParams::from(LorentzParams::new(1.0, 1.0, 1.0, 0.5).unwrap());
    let env = combined_envelope(&model_coeffs(&l)).map_err(|e| e.to_string())?;
    let tc = env.corner_time.unwrap_or(f64::NAN);
    if (tc - 2.0).abs() > 1e-15 {
        return Err(format!("t_c = {tc}"));
    }
    let pf = crate::td_bounds::pulse_functions(&PulseSpec::unit_step());
    let quad = env.early_slope.unwrap_or(0.0) * pf.intf(tc);
    let level = env.late_level.unwrap_or(0.0);
    if (quad - level).abs() > 1e-12 * level {
        return Err(format!("branches {quad} and {level} do not meet"));
    }
    Ok("t_c = 2".into())
}

fn table_check(db: Option<&PathBuf>) -> Check {
    let db = match db {
        Some(path) => MetalDb::load(path).map_err(|e| e.to_string())?,
        None => MetalDb::builtin(),
    };
    let t = reproduce_table_from(&db);
    let bad: Vec<&str> = t
        .rows
        .iter()
        .filter(|r| r.mismatch)
        .map(|r| r.symbol.as_str())
        .collect();
    if !bad.is_empty() {
        return Err(format!("deviation above 0.5% for {}", bad.join(", ")));
    }
    Ok(format!("{} metals within 0.5%", t.rows.len()))
}

fn bb_check(rng: &mut ChaCha8Rng, per_oscillator: usize) -> Check {
    let au = MetalDb::builtin().params("Au").map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for j in 0..au.oscillators.len() {
        let scale = au.oscillators[j].omega;
        for _ in 0..per_oscillator {
            let w = Complex64::new(
                scale * rng.gen_range(0.05..3.0),
                scale * rng.gen_range(0.01..1.0),
            );
            let a = bb_susceptibility(&au, j, w).map_err(|e| e.to_string())?;
            let b = bb_susceptibility_direct(&au, j, w).map_err(|e| e.to_string())?;
            let rel = (a - b).norm() / b.norm();
            if !(rel <= 1e-6) {
                return Err(format!("oscillator {j}, ω = {w}: {a} vs {b}"));
            }
            worst = worst.max(rel);
        }
    }
    Ok(format!("worst relative difference {worst:.1e}"))
}

fn fixture(
    name: &str,
    model: ModelParams,
    pulse: PulseSpec,
    stop: f64,
    points: usize,
    envelope: EnvelopeChoice,
) -> ScenarioConfig {
    ScenarioConfig {
        name: name.to_string(),
        model_label: model.kind().to_string(),
        model,
        pulse,
        grid: GridSpec {
            start: 0.0,
            stop,
            count: points,
            spacing: Spacing::Linear,
        },
        outputs: vec![OutputKind::Trace],
        envelope,
        response: ResponseChoice::Auto,
        sum_rule_order: 1,
    }
}

/// The fixture (model, pulse, envelope) combinations that must show zero
/// bound violations: Lorentz at three losses with the combined envelope,
/// Drude gold at three raise times with the early envelope, Debye with the
/// late envelope and Brendel-Bormann gold with the early envelope.
pub fn fixture_scenarios(points: usize) -> Vec<ScenarioConfig> {
    let mut out = Vec::new();
    for nu in [0.0, 0.5, 1.95] {
        let l = LorentzParams::new(1.0, 1.0, 1.0, nu).expect("valid Lorentz parameters");
        out.push(fixture(
            &format!("lorentz_nu{nu}"),
            l.into(),
            PulseSpec::unit_step(),
            10.0,
            points,
            EnvelopeChoice::Combined,
        ));
    }
    let d = DrudeParams::olmon_gold();
    for (label, k) in [("0", 0.0), ("1", 1.0), ("0.1", 0.1)] {
        let pulse = if k == 0.0 {
            PulseSpec::unit_step()
        } else {
            PulseSpec::generalized_step(k / d.omega_p).expect("positive raise time")
        };
        out.push(fixture(
            &format!("drude_au_tau{label}"),
            d.into(),
            pulse,
            50.0 / d.omega_p,
            points,
            EnvelopeChoice::Early,
        ));
    }
    for (name, params) in fixtures() {
        match (name.as_str(), &params) {
            ("debye_water", ModelParams::Debye(db)) => out.push(fixture(
                "debye_water",
                params.clone(),
                PulseSpec::unit_step(),
                10.0 * db.tau_r,
                points,
                EnvelopeChoice::Late,
            )),
            ("bb_au", _) => out.push(fixture(
                "bb_au",
                params.clone(),
                PulseSpec::unit_step(),
                4e-15,
                points,
                EnvelopeChoice::Early,
            )),
            _ => {}
        }
    }
    out
}

fn containment_check(points: usize, profile: ToleranceProfile) -> Check {
    let opts = RunOptions {
        out_dir: None,
        profile,
    };
    let scenarios = fixture_scenarios(points);
    for cfg in &scenarios {
        let out = run_scenario(cfg, &opts).map_err(|e| format!("{}: {e}", cfg.name))?;
        if !out.report.passed {
            return Err(format!("{}: {}", cfg.name, out.report.failures.join("; ")));
        }
    }
    Ok(format!("{} scenarios at {points} points", scenarios.len()))
}

/// Runs the invariant checks of every module. The seed drives the random
/// samples of the Faddeeva, PR, Cauer and Brendel-Bormann checks.
pub fn self_test(opts: &SelfTestOptions) -> SelfTestReport {
    let tol = opts.profile.tolerances();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checks = Vec::new();
    let mut run = |name: &str, f: &mut dyn FnMut() -> Check| {
        let start = Instant::now();
        let result = f();
        checks.push(CheckOutcome {
            name: name.to_string(),
            passed: result.is_ok(),
            detail: result.unwrap_or_else(|e| e),
            seconds: start.elapsed().as_secs_f64(),
        });
    };
    run("faddeeva", &mut || faddeeva_check(&mut rng, 2000));
    run("pr_properties", &mut || {
        pr_check(opts.seed, opts.pr_samples)
    });
    run("cauer_round_trip", &mut || cauer_check(&mut rng, 4));
    run("coefficients", &mut || {
        coefficient_check(tol.coefficient_rel)
    });
    run("sum_rules", &mut || sum_rule_check(tol.sum_rule_rel));
    run("corner_time", &mut corner_time_check);
    run("metal_table", &mut || table_check(opts.metals_db.as_ref()));
    run("bb_dual_form", &mut || bb_check(&mut rng, 4));
    run("containment", &mut || {
        containment_check(opts.grid_points, opts.profile)
    });
    SelfTestReport {
        seed: opts.seed,
        checks,
    }
}
