//! Both sum-rule families for a lossy Lorentz oscillator, Olmon's Drude gold
//! and a Debye relaxation.
//!
//!     cargo run --release --example sum_rules

use pr_bounds::models::{
    model_coeffs, model_pr, DebyeParams, DrudeParams, LorentzParams, ModelParams,
};
use pr_bounds::sumrules::verify_sum_rules;

fn main() -> pr_bounds::Result<()> {
    let cases: [(&str, ModelParams); 3] = [
        (
            "lorentz ν=0.5",
            LorentzParams::new(1.0, 1.0, 1.0, 0.5)?.into(),
        ),
        ("drude Au", DrudeParams::olmon_gold().into()),
        ("debye water", DebyeParams::new(5.2, 80.1, 8.27e-12)?.into()),
    ];
    for (name, params) in cases {
        println!("{name}");
        let p = model_pr(&params)?;
        for v in verify_sum_rules(&p, &model_coeffs(&params), 3)? {
            println!(
                "  {:?} n={} ξ^{:<3} lhs {:<24} rhs {:<24} {:?} {}",
                v.family,
                v.order_n,
                v.power,
                v.lhs
                    .map(|m| format!("{:.12e}", m.value))
                    .unwrap_or("-".into()),
                v.rhs.map(|r| format!("{r:.12e}")).unwrap_or("-".into()),
                v.status,
                v.note
            );
        }
    }
    Ok(())
}
