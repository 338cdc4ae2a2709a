use proptest::prelude::*;

use pr_bounds::models::{
    closed_form_step_response, ev_to_rad_per_s, model_coeffs, rad_per_s_to_ev, DebyeParams,
    DrudeParams, LorentzParams, ModelParams,
};
use pr_bounds::report::{
    parse_config, run_scenario, sig3, RunOptions, ScenarioConfig, VerificationReport,
};
use pr_bounds::td_bounds::{
    combined_envelope, containment_check, early_time_envelope, late_time_envelope, linear_grid,
    PulseSpec,
};

fn lorentz_config(nu: &str, stop: &str, count: usize) -> String {
    format!(
        r#"
schema_version = 1

[[scenario]]
name = "prop"
outputs = ["trace", "envelope", "sumrules"]

[scenario.model]
kind = "lorentz"
eps_inf = 1.0
omega_p = "1 rad/s"
omega_0 = "1 rad/s"
nu = "{nu}"

[scenario.grid]
start = "0 s"
stop = "{stop}"
count = {count}
"#
    )
}

fn single(text: &str) -> ScenarioConfig {
    let mut v = parse_config(text, "prop.toml", None).unwrap();
    assert_eq!(v.len(), 1);
    v.remove(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lorentz_step_stays_in_combined_envelope(
        wp in 0.2..3.0f64, w0 in 0.2..3.0f64, ratio in 0.01..1.99f64, eps_inf in 1.0..4.0f64,
    ) {
        let params: ModelParams = LorentzParams::new(eps_inf, wp, w0, ratio * w0).unwrap().into();
        let env = combined_envelope(&model_coeffs(&params)).unwrap();
        let grid = linear_grid(0.0, 30.0 / w0, 600);
        let tr = closed_form_step_response(&params, &grid, 0.0).unwrap();
        let r = containment_check(&tr, &env);
        prop_assert!(r.contained(), "min margin {} at t = {}", r.min_margin, r.argmin_t);
    }

    #[test]
    fn drude_generalized_step_stays_in_early_envelope(
        wp in 0.5..2.0f64, nu in 0.01..2.0f64, tau in 0.0..3.0f64,
    ) {
        let params: ModelParams = DrudeParams::new(1.0, wp, nu).unwrap().into();
        let pulse = PulseSpec::generalized_step(tau).unwrap();
        let env = early_time_envelope(&model_coeffs(&params), &pulse).unwrap();
        let grid = linear_grid(0.0, 40.0 / wp, 400);
        let tr = closed_form_step_response(&params, &grid, tau).unwrap();
        prop_assert!(containment_check(&tr, &env).contained());
    }

    #[test]
    fn debye_step_stays_in_late_envelope(
        eps_inf in 1.0..10.0f64, delta in 0.0..100.0f64, tau_r in 1e-13..1e-9f64,
    ) {
        let params: ModelParams = DebyeParams::new(eps_inf, eps_inf + delta, tau_r).unwrap().into();
        let env = late_time_envelope(&model_coeffs(&params)).unwrap();
        let grid = linear_grid(0.0, 20.0 * tau_r, 300);
        let tr = closed_form_step_response(&params, &grid, 0.0).unwrap();
        prop_assert!(containment_check(&tr, &env).contained());
    }

    #[test]
    fn electronvolt_round_trip(ev in 1e-3..1e3f64) {
        let back = rad_per_s_to_ev(ev_to_rad_per_s(ev));
        prop_assert!((back - ev).abs() <= 1e-14 * ev);
    }

    #[test]
    fn time_units_scale_to_seconds(x in 0.01..1e3f64) {
        for (unit, factor) in [("as", 1e-18), ("fs", 1e-15), ("ps", 1e-12), ("ns", 1e-9), ("s", 1.0)] {
            let cfg = single(&lorentz_config("0.5 rad/s", &format!("{x} {unit}"), 11));
            let expected = x * factor;
            prop_assert!((cfg.grid.stop - expected).abs() <= 1e-15 * expected, "{unit}");
        }
        let cfg = single(&lorentz_config("2 rad/s", &format!("{x} /w0"), 11));
        prop_assert!((cfg.grid.stop - x).abs() <= 1e-15 * x);
    }

    #[test]
    fn three_digit_rounding_error_is_half_an_ulp(x in 1e-3..1e4f64) {
        let r: f64 = sig3(x).parse().unwrap();
        let unit = 10f64.powi(x.log10().floor() as i32 - 2);
        prop_assert!((r - x).abs() <= 0.5 * unit * (1.0 + 1e-9), "{x} -> {r}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn report_json_round_trips(nu in 0.05..1.9f64) {
        let cfg = single(&lorentz_config(&format!("{nu} rad/s"), "8 /w0", 60));
        let out = run_scenario(&cfg, &RunOptions::default()).unwrap();
        prop_assert!(out.report.passed, "{:?}", out.report.failures);
        let json = out.report.to_json().unwrap();
        let back = VerificationReport::from_json(&json).unwrap();
        prop_assert_eq!(&back, &out.report);
        prop_assert_eq!(back.to_json().unwrap(), json);
    }
}
