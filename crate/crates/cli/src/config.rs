use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ergodic_jacobi::bounds::BoundSettings;
use ergodic_jacobi::cocycle::LyapunovSettings;
use ergodic_jacobi::models::ErgodicModel;
use ergodic_jacobi::potential::EquilibriumSettings;
use ergodic_jacobi::spectrum::{DosSettings, SpectrumSettings};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// One run: a model plus every resolution and tolerance. Missing sections
/// take their defaults; unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ErgodicModel,
    /// Drives every random choice of the run.
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub lyapunov: LyapunovSettings,
    #[serde(default = "default_grid_lyapunov")]
    pub grid_lyapunov: LyapunovSettings,
    #[serde(default)]
    pub dos: DosSettings,
    #[serde(default)]
    pub spectrum: SpectrumSettings,
    #[serde(default)]
    pub equilibrium: EquilibriumSettings,
    #[serde(default)]
    pub curve: CurveGrid,
    #[serde(default)]
    pub checks: CheckSettings,
}

fn default_grid_lyapunov() -> LyapunovSettings {
    BoundSettings::default().grid_lyapunov
}

/// Real grid for the `lyapunov` command. Without explicit ends it spans
/// the coefficient enclosure of the spectrum plus a margin of 0.5.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurveGrid {
    pub points: usize,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl Default for CurveGrid {
    fn default() -> Self {
        Self {
            points: 201,
            lo: None,
            hi: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckSettings {
    pub curve_points: usize,
    pub thouless_points: Option<Vec<Complex64>>,
    pub holder_alphas: Vec<f64>,
    pub merge_tol: f64,
    pub tol_l: f64,
    pub identity_tol: f64,
    pub coherence_tol: f64,
    pub thouless_tol: f64,
    pub solver_tol: f64,
}

impl Default for CheckSettings {
    fn default() -> Self {
        let b = BoundSettings::default();
        Self {
            curve_points: b.curve_points,
            thouless_points: b.thouless_points,
            holder_alphas: b.holder_alphas,
            merge_tol: b.merge_tol,
            tol_l: b.tol_l,
            identity_tol: b.identity_tol,
            coherence_tol: b.coherence_tol,
            thouless_tol: b.thouless_tol,
            solver_tol: b.solver_tol,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text)
    }

    /// Parses and validates; errors name the offending key.
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            if path == "." {
                anyhow::anyhow!("config: {}", e.inner())
            } else {
                anyhow::anyhow!("config key `{path}`: {}", e.inner())
            }
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate().context("config key `model`")?;
        self.bound_settings().validate().context("config key `checks`")?;
        let positive = [
            ("lyapunov.n_steps", self.lyapunov.n_steps),
            ("lyapunov.n_samples", self.lyapunov.n_samples),
            ("grid_lyapunov.n_steps", self.grid_lyapunov.n_steps),
            ("grid_lyapunov.n_samples", self.grid_lyapunov.n_samples),
            ("dos.n_sites", self.dos.n_sites),
            ("dos.n_samples", self.dos.n_samples),
            ("dos.m_bins", self.dos.m_bins),
            ("spectrum.n_sites", self.spectrum.n_sites),
            ("spectrum.n_samples", self.spectrum.n_samples),
            ("equilibrium.m_points", self.equilibrium.m_points),
            ("equilibrium.max_iter", self.equilibrium.max_iter),
        ];
        for (key, v) in positive {
            if v == 0 {
                bail!("config key `{key}`: must be positive");
            }
        }
        if self.curve.points < 2 {
            bail!("config key `curve.points`: need at least 2 points");
        }
        if let (Some(lo), Some(hi)) = (self.curve.lo, self.curve.hi) {
            if !(lo < hi) {
                bail!("config key `curve`: lo = {lo} must be below hi = {hi}");
            }
        }
        Ok(())
    }

    /// Applies a command-line seed override and spreads the seed over every
    /// sampler.
    pub fn resolve(mut self, seed: Option<u64>) -> Self {
        if let Some(s) = seed {
            self.seed = s;
        }
        self.lyapunov.seed = self.seed;
        self.grid_lyapunov.seed = self.seed;
        self.dos.seed = self.seed;
        self.spectrum.seed = self.seed;
        self
    }

    pub fn bound_settings(&self) -> BoundSettings {
        let c = &self.checks;
        BoundSettings {
            lyapunov: self.lyapunov,
            grid_lyapunov: self.grid_lyapunov,
            dos: self.dos,
            spectrum: self.spectrum.clone(),
            equilibrium: self.equilibrium.clone(),
            curve_points: c.curve_points,
            thouless_points: c.thouless_points.clone(),
            holder_alphas: c.holder_alphas.clone(),
            merge_tol: c.merge_tol,
            tol_l: c.tol_l,
            identity_tol: c.identity_tol,
            coherence_tol: c.coherence_tol,
            thouless_tol: c.thouless_tol,
            solver_tol: c.solver_tol,
        }
    }

    /// Grid for the `lyapunov` command.
    pub fn curve_grid(&self) -> Vec<f64> {
        let (b_lo, b_hi, a_max) = self.model.coefficient_bounds();
        let lo = self.curve.lo.unwrap_or(b_lo - 2.0 * a_max - 0.5);
        let hi = self.curve.hi.unwrap_or(b_hi + 2.0 * a_max + 0.5);
        let n = self.curve.points;
        (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let c = RunConfig::parse(r#"{"model": {"kind": "free"}}"#).unwrap();
        assert_eq!(c.model, ErgodicModel::Free);
        assert_eq!(c.bound_settings(), BoundSettings::default());
    }

    #[test]
    fn errors_name_the_key() {
        let err = RunConfig::parse(r#"{"model": {"kind": "free"}, "dos": {"n_sites": "many"}}"#).unwrap_err();
        assert!(format!("{err:#}").contains("dos.n_sites"), "{err:#}");
        let err = RunConfig::parse(r#"{"model": {"kind": "free"}, "colour": 1}"#).unwrap_err();
        assert!(format!("{err:#}").contains("colour"), "{err:#}");
        let err = RunConfig::parse(r#"{"model": {"kind": "free"}, "checks": {"tol_l": -1}}"#).unwrap_err();
        assert!(format!("{err:#}").contains("tol_l"), "{err:#}");
        let err = RunConfig::parse(r#"{"model": {"kind": "free"}, "dos": {"m_bins": 0}}"#).unwrap_err();
        assert!(format!("{err:#}").contains("dos.m_bins"), "{err:#}");
    }

    #[test]
    fn zero_coupling_is_rejected() {
        let err = RunConfig::parse(r#"{"model": {"kind": "almost_mathieu", "lambda": 0, "alpha": 0.6}}"#).unwrap_err();
        assert!(format!("{err:#}").contains("λ must be nonzero"));
    }

    #[test]
    fn seed_override_reaches_every_sampler() {
        let c = RunConfig::parse(r#"{"model": {"kind": "free"}, "seed": 3}"#)
            .unwrap()
            .resolve(Some(9));
        let s = c.bound_settings();
        assert_eq!(
            (
                c.seed,
                s.lyapunov.seed,
                s.dos.seed,
                s.spectrum.seed,
                s.grid_lyapunov.seed
            ),
            (9, 9, 9, 9, 9)
        );
    }
}
