//! Brendel-Bormann parameter database, keyed by element symbol.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ev_to_rad_per_s, BbOscillator, BbParams};
use crate::error::{Error, Result};

/// The database shipped with the crate.
pub const BUILTIN_METALS_TOML: &str = include_str!("../../data/metals_bb.toml");

const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrudeTerm {
    pub f: f64,
    pub gamma_ev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorTerm {
    pub f: f64,
    pub gamma_ev: f64,
    pub omega_ev: f64,
    pub sigma_ev: f64,
}

/// One metal: plasma energy, oscillator strengths and widths in eV, and the
/// rounded reference values of its equivalent plasma frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetalRecord {
    pub symbol: String,
    pub plasma_ev: f64,
    pub drude: DrudeTerm,
    #[serde(default)]
    pub oscillators: Vec<OscillatorTerm>,
    pub table_hbar_omega_p_ev: Option<f64>,
    pub table_inv_omega_p_as: Option<f64>,
}

impl MetalRecord {
    /// Model parameters in rad/s.
    pub fn to_params(&self) -> Result<BbParams> {
        let bad = |what: &str| Error::Database(format!("{}: {what}", self.symbol));
        if !(self.plasma_ev > 0.0) {
            return Err(bad("plasma_ev must be > 0"));
        }
        if !(self.drude.f > 0.0) {
            return Err(bad("drude strength must be > 0"));
        }
        let wp = ev_to_rad_per_s(self.plasma_ev);
        let oscillators = self
            .oscillators
            .iter()
            .map(|o| {
                if !(o.f > 0.0) {
                    return Err(bad("oscillator strength must be > 0"));
                }
                Ok(BbOscillator {
                    omega_p: o.f.sqrt() * wp,
                    sigma: ev_to_rad_per_s(o.sigma_ev),
                    omega: ev_to_rad_per_s(o.omega_ev),
                    nu: ev_to_rad_per_s(o.gamma_ev),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        BbParams::new(
            self.drude.f.sqrt() * wp,
            ev_to_rad_per_s(self.drude.gamma_ev),
            oscillators,
        )
        .map_err(|e| bad(&e.to_string()))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DbFile {
    schema_version: u32,
    metal: Vec<MetalRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetalDb {
    records: Vec<MetalRecord>,
}

impl MetalDb {
    pub fn parse(text: &str) -> Result<Self> {
        let file: DbFile =
            toml::from_str(text).map_err(|e| Error::Database(e.to_string().trim().to_string()))?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(Error::Database(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                file.schema_version
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for r in &file.metal {
            if !seen.insert(r.symbol.clone()) {
                return Err(Error::Database(format!("duplicate symbol {}", r.symbol)));
            }
            r.to_params()?;
        }
        Ok(Self {
            records: file.metal,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Database(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn builtin() -> Self {
        Self::parse(BUILTIN_METALS_TOML).expect("bundled metal database is valid")
    }

    pub fn records(&self) -> &[MetalRecord] {
        &self.records
    }

    pub fn get(&self, symbol: &str) -> Option<&MetalRecord> {
        self.records.iter().find(|r| r.symbol == symbol)
    }

    pub fn params(&self, symbol: &str) -> Result<BbParams> {
        self.get(symbol)
            .ok_or_else(|| Error::Database(format!("unknown metal {symbol}")))?
            .to_params()
    }
}
