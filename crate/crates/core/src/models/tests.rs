use num_complex::Complex64;

use super::*;
use crate::pr_core::{check_pr_properties, coeffs_from_pr, Presence};
use crate::td_bounds::linear_grid;

fn lorentz(nu: f64) -> ModelParams {
    LorentzParams::new(1.0, 1.0, 1.0, nu).unwrap().into()
}

fn gold() -> BbParams {
    MetalDb::builtin().params("Au").unwrap()
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[test]
fn debye_on_real_axis_lies_between_limits() {
    let d = DebyeParams::new(2.0, 80.0, 1e-11).unwrap();
    let p = model_pr(&d.into()).unwrap();
    for &s in &[1e6, 1e10, 1e11, 1e12, 1e15] {
        let v = p.eval(re(s));
        assert!(v.im == 0.0);
        assert!(v.re > 2.0 * s && v.re < 80.0 * s, "s = {s}");
    }
}

#[test]
fn lorentz_by_direct_substitution() {
    let l = LorentzParams::new(1.5, 2.0, 3.0, 0.7).unwrap();
    let p = model_pr(&l.into()).unwrap();
    let w0 = 3.0;
    let expected = w0 * 1.5 + w0 * 4.0 / (2.0 * w0 * w0 + w0 * 0.7);
    assert!((p.eval(re(w0)).re - expected).abs() < 1e-14 * expected);
}

#[test]
fn lorentz_without_restoring_force_is_drude() {
    let l: ModelParams = LorentzParams::new(1.0, 2.0, 0.0, 0.3).unwrap().into();
    let d: ModelParams = DrudeParams::new(1.0, 2.0, 0.3).unwrap().into();
    let s = Complex64::new(0.2, 1.7);
    assert_eq!(model_pr(&l).unwrap().eval(s), model_pr(&d).unwrap().eval(s));
    assert_eq!(model_coeffs(&l), model_coeffs(&d));
}

#[test]
fn bb_without_oscillators_is_drude() {
    let bb: ModelParams = BbParams::new(3.0, 0.4, vec![]).unwrap().into();
    let d: ModelParams = DrudeParams::new(1.0, 3.0, 0.4).unwrap().into();
    let (pb, pd) = (model_pr(&bb).unwrap(), model_pr(&d).unwrap());
    for &s in &[
        Complex64::new(0.1, 0.0),
        Complex64::new(1.0, -2.0),
        Complex64::new(0.01, 30.0),
    ] {
        assert!((pb.eval(s) - pd.eval(s)).norm() < 1e-14 * pd.eval(s).norm());
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(DebyeParams::new(3.0, 2.0, 1.0).is_err());
    assert!(DrudeParams::new(1.0, 1.0, 0.0).is_err());
    assert!(LorentzParams::new(1.0, 1.0, 0.0, 0.0).is_err());
    assert!(ConductivityParams::new(0.0, 1.0).is_err());
    assert!(matches!(
        model_pr(&ModelParams::Drude(DrudeParams {
            eps_inf: 1.0,
            omega_p: f64::NAN,
            nu: 1.0
        })),
        Err(Error::InvalidParams(_))
    ));
}

#[test]
fn exact_coefficients_per_model() {
    let c = model_coeffs(&lorentz(1.2));
    assert_eq!(
        (c.a_minus1, c.a_1(), c.b_1, c.b_minus1()),
        (0.0, Some(2.0), 1.0, Some(1.0))
    );

    let c = model_coeffs(&DebyeParams::new(2.0, 7.0, 1.0).unwrap().into());
    assert_eq!((c.a_1(), c.b_1, c.b_minus1()), (Some(7.0), 2.0, None));

    let c = model_coeffs(&ConductivityParams::new(3.0, 1.0).unwrap().into());
    assert!(!c.has_low_order1() && !c.has_high_order1());

    let c = model_coeffs(&DrudeParams::olmon_gold().into());
    assert_eq!(c.b_minus1(), Some(1.29e16 * 1.29e16));
    assert!(!c.has_low_order1());

    let c = model_coeffs(&gold().into());
    let wp = ev_to_rad_per_s(17.0);
    assert!((c.b_minus1().unwrap() / (wp * wp) - 1.0).abs() < 1e-2);
    assert_eq!(c.b_1, 1.0);
}

#[test]
fn equivalent_plasma_frequency_examples() {
    let au = equivalent_plasma_frequency(&gold());
    assert!((au / 2.58e16 - 1.0).abs() < 5e-3);
    let ti = equivalent_plasma_frequency(&MetalDb::builtin().params("Ti").unwrap());
    assert!((rad_per_s_to_ev(ti) / 8.3 - 1.0).abs() < 5e-3);
    let single = BbParams::new(2.5, 1.0, vec![]).unwrap();
    assert_eq!(equivalent_plasma_frequency(&single), 2.5);
}

#[test]
fn ev_conversion_round_trips() {
    for &ev in &[1e-3, 0.5, 17.0, 2.3e4] {
        let back = rad_per_s_to_ev(ev_to_rad_per_s(ev));
        assert!((back - ev).abs() <= 1e-12 * ev);
    }
}

#[test]
fn builtin_database_has_eleven_metals_matching_the_table() {
    let db = MetalDb::builtin();
    let symbols: Vec<&str> = db.records().iter().map(|r| r.symbol.as_str()).collect();
    for s in [
        "Ag", "Au", "Cu", "Al", "Be", "Cr", "Ni", "Pd", "Pt", "Ti", "W",
    ] {
        assert!(symbols.contains(&s), "{s}");
    }
    for r in db.records() {
        let wp = equivalent_plasma_frequency(&r.to_params().unwrap());
        let ev = rad_per_s_to_ev(wp);
        let attos = 1e18 / wp;
        assert!(
            (ev / r.table_hbar_omega_p_ev.unwrap() - 1.0).abs() < 5e-3,
            "{}",
            r.symbol
        );
        assert!(
            (attos / r.table_inv_omega_p_as.unwrap() - 1.0).abs() < 5e-3,
            "{}",
            r.symbol
        );
    }
}

#[test]
fn corrupted_database_is_a_database_error() {
    let broken = BUILTIN_METALS_TOML.replace("plasma_ev = 9.03", "plasma_ev = \"x\"");
    assert!(matches!(MetalDb::parse(&broken), Err(Error::Database(_))));
    let negative = BUILTIN_METALS_TOML.replace("plasma_ev = 9.03", "plasma_ev = -9.03");
    assert!(matches!(MetalDb::parse(&negative), Err(Error::Database(_))));
    assert!(matches!(
        MetalDb::parse("schema_version = 7\nmetal = []"),
        Err(Error::Database(_))
    ));
}

#[test]
fn faddeeva_form_matches_direct_quadrature() {
    let au = gold();
    for j in 0..au.oscillators.len() {
        let omega = Complex64::new(1.0, 0.3) * au.oscillators[j].omega;
        let a = bb_susceptibility(&au, j, omega).unwrap();
        let b = bb_susceptibility_direct(&au, j, omega).unwrap();
        assert!(
            (a - b).norm() < 1e-6 * b.norm(),
            "oscillator {j}: {a} vs {b}"
        );
    }
}

#[test]
fn bb_high_frequency_asymptote() {
    let au = gold();
    for (j, o) in au.oscillators.iter().enumerate() {
        let omega = Complex64::new(1e4 * (o.omega + 5.0 * o.sigma), 0.0);
        let w_chi = omega * bb_susceptibility(&au, j, omega).unwrap();
        let lead = -o.omega_p * o.omega_p / omega;
        assert!((w_chi - lead).norm() < 1e-3 * lead.norm(), "oscillator {j}");
    }
}

#[test]
fn bb_low_frequency_square_root_scaling() {
    // The √ω term carries the factor e^{-x²}, x = ω_j/(√2 σ_j); it dominates
    // the window only for broad oscillators.
    let au = gold();
    let broad: Vec<usize> = (0..au.oscillators.len())
        .filter(|&j| au.oscillators[j].omega <= std::f64::consts::SQRT_2 * au.oscillators[j].sigma)
        .collect();
    assert_eq!(broad, vec![0]);
    for &j in &broad {
        let o = au.oscillators[j];
        let mag = |w: f64| {
            let omega = Complex64::new(w, 0.0);
            (omega * bb_susceptibility(&au, j, omega).unwrap()).norm()
        };
        let (w1, w2) = (1e-6 * o.omega, 1e-4 * o.omega);
        let slope = (mag(w2) / mag(w1)).ln() / (w2 / w1).ln();
        assert!((slope - 0.5).abs() < 0.02, "oscillator {j}: slope {slope}");
    }
}

#[test]
fn bb_branch_and_domain_errors() {
    let mut lossless = gold();
    lossless.oscillators[0].nu = 0.0;
    let omega = Complex64::new(lossless.oscillators[0].omega, 0.0);
    assert!(matches!(
        bb_susceptibility(&lossless, 0, omega),
        Err(Error::BranchAmbiguity(_))
    ));
    let au = gold();
    assert!(matches!(
        bb_susceptibility(&au, 0, Complex64::new(1e15, -1e14)),
        Err(Error::DomainError(_))
    ));
    assert!(bb_susceptibility(&au, 9, Complex64::new(1e15, 0.0)).is_err());
}

#[test]
fn fixtures_are_positive_real() {
    for (name, params) in fixtures() {
        let report = check_pr_properties(&model_pr(&params).unwrap(), 2000, 11);
        assert!(report.is_clean(), "{name}: {:?}", &report.violations[..1]);
    }
}

#[test]
fn numerical_coefficients_agree_with_exact_ones() {
    for (name, params) in fixtures() {
        let exact = model_coeffs(&params);
        let num = coeffs_from_pr(&model_pr(&params).unwrap());
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-4 * b.abs().max(1e-300);
        let close_or_zero =
            |a: f64, b: f64, scale: f64| (a - b).abs() <= 1e-4 * b.abs().max(1e-9 * scale);
        assert!(close(num.b_1.value, exact.b_1), "{name} b_1");
        assert!(
            close_or_zero(num.a_minus1.value, exact.a_minus1, exact.b_1),
            "{name} a_-1 = {}",
            num.a_minus1.value
        );
        match exact.a_1() {
            Some(a1) => {
                assert_eq!(num.a_1.presence, Presence::Present, "{name} a_1");
                assert!(close(num.a_1.value, a1), "{name} a_1");
            }
            None => assert_ne!(num.a_1.presence, Presence::Present, "{name} a_1"),
        }
        match exact.b_minus1() {
            Some(b) => {
                assert_eq!(num.b_minus1.presence, Presence::Present, "{name} b_-1");
                assert!(
                    close(num.b_minus1.value, b),
                    "{name} b_-1 {} vs {b}",
                    num.b_minus1.value
                );
            }
            None => assert_ne!(num.b_minus1.presence, Presence::Present, "{name} b_-1"),
        }
    }
}

#[test]
fn lorentz_lossless_half_period() {
    let l = LorentzParams::new(1.3, 2.0, 1.5, 0.0).unwrap();
    let t = std::f64::consts::PI / 1.5;
    let v = closed_form_step_response(&l.into(), &[t], 0.0)
        .unwrap()
        .value[0];
    let expected = 1.3 + 2.0 * 4.0 / 2.25;
    assert!((v - expected).abs() < 1e-13 * expected);
}

#[test]
fn lorentz_final_value() {
    let l = LorentzParams::new(1.0, 1.0, 1.0, 0.5).unwrap();
    let v = closed_form_step_response(&l.into(), &[1e3 / 0.5], 0.0)
        .unwrap()
        .value[0];
    assert!((v - l.eps_s()).abs() < 1e-6 * l.eps_s());
}

#[test]
fn lorentz_series_and_trig_branches_meet() {
    for &nu in &[0.0, 0.5, 1.95] {
        let l = LorentzParams::new(1.0, 1.0, 1.0, nu).unwrap();
        let x = 0.5 / 1.0_f64.max(nu);
        let below = lorentz_step(&l, x * (1.0 - 1e-12));
        let above = lorentz_step(&l, x);
        assert!((below - above).abs() < 1e-12, "nu = {nu}");
    }
}

#[test]
fn lorentz_step_satisfies_its_ode() {
    // y = ε_∞ + ω_p² ∫ g with g'' + ν g' + ω0² g = 0, so y''' + ν y'' + ω0² y' = 0.
    let l = LorentzParams::new(1.0, 1.0, 1.0, 0.5).unwrap();
    let h = 1e-3;
    for &t in &[0.3, 1.0, 4.0] {
        let y = |k: f64| lorentz_step(&l, t + k * h);
        let d1 = (y(1.0) - y(-1.0)) / (2.0 * h);
        let d2 = (y(1.0) - 2.0 * y(0.0) + y(-1.0)) / (h * h);
        let d3 = (y(2.0) - 2.0 * y(1.0) + 2.0 * y(-1.0) - y(-2.0)) / (2.0 * h * h * h);
        assert!((d3 + 0.5 * d2 + d1).abs() < 1e-5, "t = {t}");
    }
}

#[test]
fn drude_unit_step_near_origin() {
    let d = DrudeParams::olmon_gold();
    let (wp, nu) = (d.omega_p, d.nu);
    for &t in &[1e-20, 1e-18, 1e-17] {
        let v = closed_form_step_response(&d.into(), &[t], 0.0)
            .unwrap()
            .value[0];
        let x = nu * t;
        // e^{-x} = 1 - x + x²/2 - x³/6 + ..., so (x - 1 + e^{-x})/x² = 1/2 - x/6 + O(x²).
        let series = 1.0 + wp * wp * t * t * (0.5 - x / 6.0);
        assert!(
            (v - series).abs() <= wp * wp * t * t * x * x / 24.0 + 1e-15,
            "t = {t}"
        );
    }
}

#[test]
fn causal_responses_vanish_before_zero() {
    for (name, params) in fixtures() {
        if let Ok(trace) = closed_form_step_response(&params, &[-1.0, -1e-20], 0.0) {
            assert_eq!(trace.value, vec![0.0, 0.0], "{name}");
        }
    }
}

#[test]
fn unsupported_closed_forms() {
    assert!(matches!(
        closed_form_step_response(&gold().into(), &[1e-15], 0.0),
        Err(Error::Unsupported(_))
    ));
    assert!(matches!(
        closed_form_step_response(&lorentz(0.5), &[1.0], 0.1),
        Err(Error::Unsupported(_))
    ));
    assert!(matches!(
        closed_form_step_response(&lorentz(2.5), &[1.0], 0.0),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn drude_generalized_step_is_continuous_across_equal_rates() {
    let d = DrudeParams::new(1.0, 1.0, 1.0).unwrap();
    let t = linear_grid(0.1, 30.0, 40);
    let at = |tau: f64| closed_form_step_response(&d.into(), &t, tau).unwrap().value;
    // Rates a = 1/τ just inside and just outside the midpoint-expansion window.
    let edge = crate::phi::NEAR_EQUAL_GAP / (1.0 - crate::phi::NEAR_EQUAL_GAP);
    let (a, b) = (
        at(1.0 / (1.0 + edge * (1.0 - 1e-9))),
        at(1.0 / (1.0 + edge * (1.0 + 1e-9))),
    );
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-9 * x.abs(), "{x} vs {y}");
    }
    let (c, e) = (at(1.0), at(1.0 / (1.0 + 1e-9)));
    for (x, y) in c.iter().zip(&e) {
        assert!((x - y).abs() < 1e-9 * x.abs(), "{x} vs {y}");
    }
}

#[test]
fn conductivity_step_is_linear_growth() {
    let c = ConductivityParams::new(2.0, 3.0).unwrap();
    let v = closed_form_step_response(&c.into(), &[0.0, 1e-12], 0.0)
        .unwrap()
        .value;
    assert_eq!(v[0], 2.0);
    assert!((v[1] - (2.0 + 3.0 / EPS0 * 1e-12)).abs() < 1e-12 * v[1]);
}

#[test]
fn debye_step_relaxes_to_static_value() {
    let d = DebyeParams::new(2.0, 10.0, 1e-9).unwrap();
    let v = closed_form_step_response(&d.into(), &[0.0, 1e-9, 1e-6], 0.0)
        .unwrap()
        .value;
    assert_eq!(v[0], 2.0);
    assert!((v[1] - (2.0 + 8.0 * (1.0 - (-1.0_f64).exp()))).abs() < 1e-14 * v[1]);
    assert!((v[2] - 10.0).abs() < 1e-12);
}
