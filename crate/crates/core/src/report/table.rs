use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::models::{equivalent_plasma_frequency, rad_per_s_to_ev, MetalDb};

/// Relative deviation from the reference values beyond which a metal is flagged.
pub const TABLE_MISMATCH: f64 = 0.005;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub symbol: String,
    pub hbar_omega_p_ev: f64,
    pub inv_omega_p_as: f64,
    /// Three significant digits.
    pub rounded_ev: String,
    pub rounded_as: String,
    pub reference_ev: Option<f64>,
    pub reference_as: Option<f64>,
    pub deviation_ev: Option<f64>,
    pub deviation_as: Option<f64>,
    pub mismatch: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub rows: Vec<TableRow>,
}

impl TableReport {
    pub fn mismatches(&self) -> usize {
        self.rows.iter().filter(|r| r.mismatch).count()
    }
}

/// `x` rounded to three significant digits.
pub fn sig3(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (2 - magnitude).max(0) as usize;
    let rounded = format!("{x:.decimals$}");
    // Rounding can carry into a new digit (99.96 -> "100.0").
    if rounded
        .trim_start_matches('-')
        .replace('.', "")
        .trim_start_matches('0')
        .len()
        > 3
        && decimals > 0
    {
        format!("{x:.prec$}", prec = decimals - 1)
    } else {
        rounded
    }
}

pub(crate) fn reproduce_table_from(db: &MetalDb) -> TableReport {
    let rows = db
        .records()
        .iter()
        .filter_map(|r| {
            let wp = equivalent_plasma_frequency(&r.to_params().ok()?);
            let ev = rad_per_s_to_ev(wp);
            let attos = 1e18 / wp;
            let dev = |value: f64, reference: Option<f64>| reference.map(|t| (value - t) / t);
            let deviation_ev = dev(ev, r.table_hbar_omega_p_ev);
            let deviation_as = dev(attos, r.table_inv_omega_p_as);
            let mismatch = [deviation_ev, deviation_as]
                .iter()
                .flatten()
                .any(|d| !(d.abs() <= TABLE_MISMATCH));
            Some(TableRow {
                symbol: r.symbol.clone(),
                hbar_omega_p_ev: ev,
                inv_omega_p_as: attos,
                rounded_ev: sig3(ev),
                rounded_as: sig3(attos),
                reference_ev: r.table_hbar_omega_p_ev,
                reference_as: r.table_inv_omega_p_as,
                deviation_ev,
                deviation_as,
                mismatch,
            })
        })
        .collect();
    TableReport { rows }
}

/// Equivalent plasma frequency of every metal in the database at `path`,
/// in eV and as its inverse in attoseconds.
pub fn reproduce_table(metals_db_path: &Path) -> Result<TableReport> {
    Ok(reproduce_table_from(&MetalDb::load(metals_db_path)?))
}

pub fn table_csv(t: &TableReport) -> String {
    let opt = |x: Option<f64>| x.map(|v| format!("{v}")).unwrap_or_default();
    let mut out = String::from(
        "symbol,hbar_omega_p_ev,inv_omega_p_as,reference_ev,reference_as,deviation_ev,deviation_as,mismatch\n",
    );
    for r in &t.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.symbol,
            r.rounded_ev,
            r.rounded_as,
            opt(r.reference_ev),
            opt(r.reference_as),
            opt(r.deviation_ev.map(|d| (d * 1e6).round() / 1e6)),
            opt(r.deviation_as.map(|d| (d * 1e6).round() / 1e6)),
            r.mismatch
        );
    }
    out
}

/// Fixed-width text rendering for the terminal.
pub fn table_text(t: &TableReport) -> String {
    let mut out = format!(
        "{:<4} {:>10} {:>10} {:>9} {:>9}  flag\n",
        "", "ħω_p [eV]", "1/ω_p [as]", "dev eV", "dev as"
    );
    let pct = |d: Option<f64>| {
        d.map(|d| format!("{:+.2}%", 100.0 * d))
            .unwrap_or_else(|| "-".into())
    };
    for r in &t.rows {
        let _ = writeln!(
            out,
            "{:<4} {:>10} {:>10} {:>9} {:>9}  {}",
            r.symbol,
            r.rounded_ev,
            r.rounded_as,
            pct(r.deviation_ev),
            pct(r.deviation_as),
            if r.mismatch { "MISMATCH" } else { "ok" }
        );
    }
    out
}
