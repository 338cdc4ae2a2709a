//! Scenario runner, output files, table reproduction and the self test
//! behind the command-line front end.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod config;
mod run;
mod selftest;
mod table;

pub use config::{
    load_config, parse_config, EnvelopeChoice, GridSpec, OutputKind, ResponseChoice,
    ScenarioConfig, Spacing,
};
pub use run::{
    run_config_file, run_scenario, CoefficientRow, ContainmentSummary, Provenance, ResponseSummary,
    RunOptions, RunOutput, Timing, VerificationReport, REPORT_SCHEMA_VERSION,
};
pub use selftest::{fixture_scenarios, self_test, CheckOutcome, SelfTestOptions, SelfTestReport};
pub use table::{
    reproduce_table, sig3, table_csv, table_text, TableReport, TableRow, TABLE_MISMATCH,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceProfile {
    Strict,
    #[default]
    Default,
}

/// Pass thresholds used by the runner and the self test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub sum_rule_rel: f64,
    /// Containment atol as a fraction of `max |response|`.
    pub containment_atol_fraction: f64,
    /// Numerical oracle against closed forms.
    pub oracle_rel: f64,
    /// Numerically estimated against exact expansion coefficients.
    pub coefficient_rel: f64,
}

impl ToleranceProfile {
    pub fn tolerances(self) -> Tolerances {
        match self {
            ToleranceProfile::Default => Tolerances {
                sum_rule_rel: 1e-6,
                containment_atol_fraction: 1e-9,
                oracle_rel: 1e-5,
                coefficient_rel: 1e-4,
            },
            ToleranceProfile::Strict => Tolerances {
                sum_rule_rel: 1e-7,
                containment_atol_fraction: 1e-10,
                oracle_rel: 1e-5,
                coefficient_rel: 1e-4,
            },
        }
    }
}

/// Process exit status of the command-line front end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Ok = 0,
    VerificationFailure = 1,
    ConfigError = 2,
    NumericalFailure = 3,
}

impl ExitStatus {
    pub fn for_error(e: &Error) -> Self {
        if e.is_numerical() || matches!(e, Error::DomainError(_) | Error::BranchAmbiguity(_)) {
            ExitStatus::NumericalFailure
        } else {
            ExitStatus::ConfigError
        }
    }

    pub fn code(self) -> u8 {
        self as u8
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{} has no file name", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}
