//! Experiment configuration files (TOML).
//!
//! ```toml
//! tolerance = 1e-9            # optional
//!
//! [settings]                  # optional, uniform when absent
//! weights = [[0.25, 0.25], [0.25, 0.25]]   # p(a=i, b=j), row i, column j
//! # or independent generators:
//! # a = [0.5, 0.5]
//! # b = [0.5, 0.5]
//!
//! [angles]                    # either [angles] ...
//! a = [0.0, 45.0]
//! b = [22.5, -22.5]
//! unit = "degrees"            # or "radians"
//! convention = "photon"       # or "spin"
//!
//! [table]                     # ... or an explicit conditional table
//! q11 = [0.5, 0.0, 0.0, 0.5]  # q(+,+), q(+,-), q(-,+), q(-,-) given (a,b) = (1,1)
//! q12 = [0.5, 0.0, 0.0, 0.5]
//! q21 = [0.5, 0.0, 0.0, 0.5]
//! q22 = [0.5, 0.0, 0.0, 0.5]
//! ```

use serde::{Deserialize, Serialize};

use crate::quantum::{singlet_table, AngleSettings, Convention};
use crate::space::{ConditionalTable, SettingDistribution, DEFAULT_TOLERANCE};

use super::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub tolerance: Option<f64>,
    pub settings: Option<SettingsSection>,
    pub angles: Option<AnglesSection>,
    pub table: Option<TableSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingsSection {
    pub weights: Option<[[f64; 2]; 2]>,
    pub a: Option<[f64; 2]>,
    pub b: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleUnit {
    #[default]
    Degrees,
    Radians,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnglesSection {
    pub a: [f64; 2],
    pub b: [f64; 2],
    #[serde(default)]
    pub unit: AngleUnit,
    #[serde(default)]
    pub convention: Convention,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSection {
    pub q11: [f64; 4],
    pub q12: [f64; 4],
    pub q21: [f64; 4],
    pub q22: [f64; 4],
}

/// Where the conditional table came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TableSource {
    Angles {
        angles_rad: AngleSettings,
        convention: Convention,
    },
    Explicit,
}

/// A parsed and validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub settings: SettingDistribution,
    pub table: ConditionalTable,
    pub tolerance: f64,
    pub source: TableSource,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    /// Check every field and build the experiment. `tolerance_override`
    /// takes precedence over the file's `tolerance`.
    pub fn validate(&self, tolerance_override: Option<f64>) -> Result<Experiment, CliError> {
        let tolerance = tolerance_override.or(self.tolerance).unwrap_or(DEFAULT_TOLERANCE);
        if !(tolerance.is_finite() && tolerance >= 0.0) {
            return Err(CliError::Validation(format!(
                "tolerance: must be a nonnegative number, got {tolerance}"
            )));
        }

        let settings = match &self.settings {
            None => SettingDistribution::uniform(),
            Some(SettingsSection {
                weights: Some(w),
                a: None,
                b: None,
            }) => SettingDistribution::with_tolerance(*w, tolerance)
                .map_err(|e| CliError::Validation(format!("settings.weights: {e}")))?,
            Some(SettingsSection {
                weights: None,
                a: Some(a),
                b: Some(b),
            }) => {
                for (name, v) in [("a", a), ("b", b)] {
                    let sum: f64 = v.iter().sum();
                    if v.iter().any(|x| !x.is_finite() || *x < 0.0) || (sum - 1.0).abs() > tolerance {
                        return Err(CliError::Validation(format!(
                            "settings.{name}: expected two nonnegative probabilities summing to 1, got {v:?}"
                        )));
                    }
                }
                let w = [[a[0] * b[0], a[0] * b[1]], [a[1] * b[0], a[1] * b[1]]];
                SettingDistribution::with_tolerance(w, tolerance)
                    .map_err(|e| CliError::Validation(format!("settings: {e}")))?
            }
            Some(_) => {
                return Err(CliError::Validation(
                    "settings: give either `weights` or both `a` and `b`".into(),
                ))
            }
        };

        let (table, source) = match (&self.angles, &self.table) {
            (Some(angles), None) => {
                let built = match angles.unit {
                    AngleUnit::Degrees => AngleSettings::from_degrees(angles.a, angles.b),
                    AngleUnit::Radians => AngleSettings::new(angles.a, angles.b),
                }
                .map_err(|e| CliError::Validation(format!("angles: {e}")))?;
                (
                    singlet_table(&built, angles.convention),
                    TableSource::Angles {
                        angles_rad: built,
                        convention: angles.convention,
                    },
                )
            }
            (None, Some(t)) => {
                let table = ConditionalTable::from_entries_with_tolerance([[t.q11, t.q12], [t.q21, t.q22]], tolerance)
                    .map_err(|e| CliError::Validation(format!("table: {e}")))?;
                (table, TableSource::Explicit)
            }
            (Some(_), Some(_)) => {
                return Err(CliError::Validation(
                    "config has both [angles] and [table]; give exactly one".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Validation(
                    "config needs an [angles] or a [table] section".into(),
                ))
            }
        };

        Ok(Experiment {
            settings,
            table,
            tolerance,
            source,
        })
    }
}
