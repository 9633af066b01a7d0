//! JSON model-configuration files.
//!
//! A config names a measurement model plus optional optimizer settings.
//! Complex numbers are `[re, im]` pairs. Validation errors always name the
//! failing field. Normalization (amplitude norm, spectrum sum) is accepted
//! within `1e-6` and then renormalized exactly, so hand-written configs with
//! rounded decimals load cleanly.

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use qmeas_core::{ComplexMatrix, Interaction, MeasurementModel, OptimizerConfig};
use serde::Deserialize;
use std::path::Path;

/// Loose slack accepted on unit-norm quantities before exact renormalization.
const NORMALIZATION_SLACK: f64 = 1e-6;

/// Hard cap on the purified total dimension `N·N·d_S`.
const MAX_PURIFIED_DIM: usize = 64;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfigFile {
    pub system_amplitudes: Vec<[f64; 2]>,
    pub apparatus_spectrum: Vec<f64>,
    pub apparatus_dim: usize,
    #[serde(default)]
    pub apparatus_basis: Option<Vec<Vec<[f64; 2]>>>,
    pub interaction: String,
    #[serde(default)]
    pub optimizer: Option<OptimizerSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSection {
    pub restarts: Option<usize>,
    pub max_iters: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub outcomes: Option<usize>,
}

impl ModelConfigFile {
    pub fn from_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("config is not valid JSON for a model description")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        Self::from_str(&text)
    }

    /// Validate and convert into the core model plus optimizer settings.
    pub fn into_parts(self) -> Result<(MeasurementModel, OptimizerConfig)> {
        let d_s = self.system_amplitudes.len();
        let n = self.apparatus_dim;
        if d_s == 0 {
            bail!("system_amplitudes: must not be empty");
        }
        let mut amplitudes: Vec<Complex64> = self
            .system_amplitudes
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > NORMALIZATION_SLACK {
            bail!("system_amplitudes: norm is {norm:.9}, expected 1 within {NORMALIZATION_SLACK:e}");
        }
        for a in amplitudes.iter_mut() {
            *a /= norm;
        }

        if self.apparatus_spectrum.len() != n {
            bail!(
                "apparatus_spectrum: has {} entries but apparatus_dim is {n}",
                self.apparatus_spectrum.len()
            );
        }
        if n < d_s {
            bail!("apparatus_dim: is {n}, below the system dimension {d_s}");
        }
        let purified_dim = n.checked_mul(n).and_then(|nn| nn.checked_mul(d_s));
        if purified_dim.is_none_or(|total| total > MAX_PURIFIED_DIM) {
            bail!(
                "apparatus_dim: purified dimension {n}·{n}·{d_s} exceeds the cap {MAX_PURIFIED_DIM}"
            );
        }
        let mut spectrum = self.apparatus_spectrum;
        if let Some(bad) = spectrum.iter().find(|&&r| !(r >= -1e-12) || !r.is_finite()) {
            bail!("apparatus_spectrum: entry {bad} is not a probability");
        }
        let total: f64 = spectrum.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_SLACK {
            bail!("apparatus_spectrum: sums to {total:.9}, expected 1 within {NORMALIZATION_SLACK:e}");
        }
        for r in spectrum.iter_mut() {
            *r = r.max(0.0) / total;
        }

        let apparatus_basis = match self.apparatus_basis {
            None => None,
            Some(rows) => {
                if rows.len() != n || rows.iter().any(|row| row.len() != n) {
                    bail!("apparatus_basis: must be a {n}x{n} matrix of [re, im] pairs");
                }
                let entries = rows
                    .iter()
                    .flat_map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)))
                    .collect::<Vec<_>>();
                let mut m = ComplexMatrix::zeros(n);
                for (index, value) in entries.into_iter().enumerate() {
                    m.set(index / n, index % n, value);
                }
                if !qmeas_core::matrix::is_unitary(&m, 1e-8) {
                    bail!("apparatus_basis: matrix is not unitary within 1e-8");
                }
                Some(m)
            }
        };

        if self.interaction != "shift" {
            bail!(
                "interaction: unknown kind {:?}, expected \"shift\"",
                self.interaction
            );
        }

        let defaults = OptimizerConfig::default();
        let optimizer = match self.optimizer {
            None => defaults,
            Some(section) => OptimizerConfig {
                restarts: section.restarts.unwrap_or(defaults.restarts),
                max_iters: section.max_iters.unwrap_or(defaults.max_iters),
                tol: section.tol.unwrap_or(defaults.tol),
                seed: section.seed.unwrap_or(defaults.seed),
                outcomes: section.outcomes,
            },
        };
        optimizer
            .validate()
            .map_err(|e| anyhow::anyhow!("optimizer: {e}"))?;

        let model = MeasurementModel {
            system_amplitudes: amplitudes,
            apparatus_spectrum: spectrum,
            apparatus_basis,
            interaction: Interaction::Shift,
        };
        model
            .validate()
            .map_err(|e| anyhow::anyhow!("model validation failed: {e}"))?;
        Ok((model, optimizer))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(spectrum: &str) -> String {
        format!(
            r#"{{
                "system_amplitudes": [[0.7071067811865476, 0.0], [0.7071067811865476, 0.0]],
                "apparatus_spectrum": {spectrum},
                "apparatus_dim": 2,
                "interaction": "shift"
            }}"#
        )
    }

    #[test]
    fn valid_config_loads() {
        let cfg = ModelConfigFile::from_str(&minimal("[0.75, 0.25]")).unwrap();
        let (model, opt) = cfg.into_parts().unwrap();
        assert_eq!(model.apparatus_dim(), 2);
        assert_eq!(opt.restarts, OptimizerConfig::default().restarts);
    }

    #[test]
    fn bad_spectrum_sum_names_the_field() {
        let cfg = ModelConfigFile::from_str(&minimal("[0.65, 0.25]")).unwrap();
        let err = cfg.into_parts().unwrap_err().to_string();
        assert!(err.contains("apparatus_spectrum"), "message was: {err}");
    }

    #[test]
    fn spectrum_length_mismatch_names_the_field() {
        let cfg = ModelConfigFile::from_str(&minimal("[0.5, 0.25, 0.25]")).unwrap();
        let err = cfg.into_parts().unwrap_err().to_string();
        assert!(err.contains("apparatus_spectrum"), "message was: {err}");
    }

    #[test]
    fn unknown_interaction_is_rejected() {
        let text = minimal("[0.5, 0.5]").replace("shift", "swap");
        let err = ModelConfigFile::from_str(&text)
            .unwrap()
            .into_parts()
            .unwrap_err()
            .to_string();
        assert!(err.contains("interaction"), "message was: {err}");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = minimal("[0.5, 0.5]").replace(
            "\"interaction\"",
            "\"extra\": 1, \"interaction\"",
        );
        assert!(ModelConfigFile::from_str(&text).is_err());
    }

    #[test]
    fn slightly_denormalized_inputs_are_renormalized() {
        let text = r#"{
            "system_amplitudes": [[0.70710678, 0.0], [0.70710678, 0.0]],
            "apparatus_spectrum": [0.7500001, 0.25],
            "apparatus_dim": 2,
            "interaction": "shift"
        }"#;
        let (model, _) = ModelConfigFile::from_str(text).unwrap().into_parts().unwrap();
        model.validate().unwrap();
        let sum: f64 = model.apparatus_spectrum.iter().sum();
        assert!((sum - 1.0).abs() < 1e-14);
    }

    #[test]
    fn oversized_purified_dimension_is_rejected() {
        let text = r#"{
            "system_amplitudes": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
            "apparatus_spectrum": [0.2, 0.2, 0.2, 0.2, 0.2],
            "apparatus_dim": 5,
            "interaction": "shift"
        }"#;
        let err = ModelConfigFile::from_str(text)
            .unwrap()
            .into_parts()
            .unwrap_err()
            .to_string();
        assert!(err.contains("apparatus_dim"), "message was: {err}");
    }
}
