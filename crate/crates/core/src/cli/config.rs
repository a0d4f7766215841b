//! JSON run configuration for `metrics`.

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use super::{CliError, OutputFormat};
use crate::error::Error;
use crate::fuglede::verify::random_perturbation;
use crate::hopf_sphere::{ModeIndex, SpectralField, SpectralFieldRecord};

/// Boundary profile `u`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    /// `u = 0`.
    Zero {},
    /// `u = amplitude · Ψ_{k,ℓ,m}`.
    Mode {
        k: i64,
        ell: i64,
        m: i64,
        amplitude: f64,
    },
    /// Standard normal coefficients on `2 ≤ k ≤ kmax`, scaled to
    /// `‖u‖_{W^{1,∞}} = eps`; drawn from `seed`.
    Random { kmax: u32, eps: f64 },
    /// Explicit coefficients.
    Inline { field: SpectralFieldRecord },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Must be `"metrics"` when present.
    #[serde(default)]
    pub command: Option<String>,
    pub r: f64,
    pub u: ProfileSpec,
    /// Project onto the volume and barycenter constraints first.
    #[serde(default = "default_true")]
    pub project: bool,
    /// `[N_s, N_t, N_φ]`; defaults to the rule for the profile's degree.
    #[serde(default)]
    pub quad: Option<[usize; 3]>,
    #[serde(default = "default_radial")]
    pub radial_nodes: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<OutputFormat>,
}

fn default_true() -> bool {
    true
}

fn default_radial() -> usize {
    crate::barycenter::DEFAULT_RADIAL_NODES
}

fn default_tolerance() -> f64 {
    crate::barycenter::DEFAULT_TOLERANCE
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if let Some(c) = &self.command {
            if c != "metrics" {
                return bad(format!("unsupported command {c:?} (expected \"metrics\")"));
            }
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return bad(format!("r must be positive and finite (got {})", self.r));
        }
        if self.radial_nodes == 0 {
            return bad("radial_nodes must be positive".into());
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return bad(format!(
                "tolerance must be positive (got {})",
                self.tolerance
            ));
        }
        if let Some(q) = self.quad {
            if q.contains(&0) {
                return bad("quad sizes must be positive".into());
            }
        }
        match &self.u {
            ProfileSpec::Mode { amplitude, .. } if !amplitude.is_finite() => {
                bad("amplitude must be finite".into())
            }
            ProfileSpec::Random { eps, kmax } if !(*eps > 0.0 && *eps <= 0.5) || *kmax < 2 => {
                bad("random profile needs kmax >= 2 and eps in (0, 1/2]".into())
            }
            _ => Ok(()),
        }
    }

    /// The unprojected profile.
    pub fn profile(&self) -> Result<SpectralField, CliError> {
        let as_config = |e: Error| CliError::Config(e.to_string());
        match &self.u {
            ProfileSpec::Zero {} => Ok(SpectralField::zeros(0)),
            ProfileSpec::Mode {
                k,
                ell,
                m,
                amplitude,
            } => Ok(SpectralField::single_mode(
                ModeIndex::new(*k, *ell, *m).map_err(as_config)?,
                *amplitude,
            )),
            ProfileSpec::Random { kmax, eps } => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                random_perturbation(*kmax, *eps, &mut rng).map_err(as_config)
            }
            ProfileSpec::Inline { field } => {
                SpectralField::try_from(field.clone()).map_err(as_config)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_family() {
        let zero = RunConfig::parse(r#"{"r": 1.0, "u": {"family": "zero"}}"#).unwrap();
        assert!(zero.project && zero.profile().unwrap().coeffs().iter().all(|c| *c == 0.0));
        let mode = RunConfig::parse(
            r#"{"r": 1, "u": {"family": "mode", "k": 2, "ell": 1, "m": 1, "amplitude": 0.01}}"#,
        )
        .unwrap();
        assert_eq!(
            mode.profile()
                .unwrap()
                .get(ModeIndex::new(2, 1, 1).unwrap()),
            0.01
        );
        let inline = RunConfig::parse(
            r#"{"r": 2, "quad": [12, 16, 16], "u": {"family": "inline",
                "field": {"kmax": 3, "entries": [{"k": 3, "ell": -1, "m": 2, "coeff": 0.02}]}}}"#,
        )
        .unwrap();
        assert_eq!(inline.profile().unwrap().kmax(), 3);
        let random = RunConfig::parse(
            r#"{"r": 1, "seed": 4, "u": {"family": "random", "kmax": 3, "eps": 0.01}}"#,
        )
        .unwrap();
        assert_eq!(random.profile().unwrap(), random.profile().unwrap());
    }

    #[test]
    fn rejects_bad_documents() {
        for doc in [
            r#"{"r": 1, "u": {"family": "zero"}, "extra": 1}"#,
            r#"{"r": 0, "u": {"family": "zero"}}"#,
            r#"{"r": 1, "u": {"family": "zero", "k": 2}}"#,
            r#"{"r": 1, "u": {"family": "spiral"}}"#,
            r#"{"r": 1, "u": {"family": "zero"}, "command": "verify"}"#,
            r#"{"r": 1"#,
        ] {
            assert!(
                matches!(RunConfig::parse(doc), Err(CliError::Config(_))),
                "{doc}"
            );
        }
        let bad_mode = RunConfig::parse(
            r#"{"r": 1, "u": {"family": "mode", "k": 2, "ell": 2, "m": 1, "amplitude": 0.1}}"#,
        )
        .unwrap();
        assert!(matches!(bad_mode.profile(), Err(CliError::Config(_))));
    }
}
