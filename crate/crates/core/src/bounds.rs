//! Numerical verification of the spectral inequalities linking `|Σ|`,
//! `λ_M − λ_m`, capacity, the density of states and the Lyapunov exponent.
//!
//! An [`Analysis`] gathers every ingredient once (spectrum, `A`, `dN`,
//! Lyapunov samples, equilibrium measure); the checks are cheap functions of
//! it and return [`BoundCheck`] records.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::cocycle::{geometric_mean_a, lyapunov_curve, lyapunov_points, LyapunovCurve, LyapunovSettings};
use crate::error::{Error, Result};
use crate::intervals::IntervalUnion;
use crate::models::ErgodicModel;
use crate::potential::{
    equilibrium_measure, log_energy, log_potential, DiscreteMeasure, Equilibrium, EquilibriumSettings,
};
use crate::spectrum::{dos_measure, spectrum_approx, DosSettings, SpectralMeasure, SpectrumApprox, SpectrumSettings};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundSettings {
    /// Curves on `Σ` and the Thouless test points.
    pub lyapunov: LyapunovSettings,
    /// Dense evaluations: DOS bin centers and equilibrium cells.
    pub grid_lyapunov: LyapunovSettings,
    pub dos: DosSettings,
    pub spectrum: SpectrumSettings,
    pub equilibrium: EquilibriumSettings,
    /// Samples of `L` on `Σ`; the sup is re-evaluated on twice as many.
    pub curve_points: usize,
    /// Off-axis points for the Thouless check; `None` spreads ten over the
    /// spectral hull.
    pub thouless_points: Option<Vec<Complex64>>,
    pub holder_alphas: Vec<f64>,
    pub merge_tol: f64,
    /// Below this spread `L` counts as constant on `Σ`, and below this size
    /// as zero.
    pub tol_l: f64,
    pub identity_tol: f64,
    pub coherence_tol: f64,
    pub thouless_tol: f64,
    pub solver_tol: f64,
}

impl Default for BoundSettings {
    fn default() -> Self {
        Self {
            lyapunov: LyapunovSettings::default(),
            grid_lyapunov: LyapunovSettings::new(2000, 4, 0),
            dos: DosSettings::default(),
            spectrum: SpectrumSettings::default(),
            equilibrium: EquilibriumSettings::default(),
            curve_points: 41,
            thouless_points: None,
            holder_alphas: vec![0.25, 1.0 / 3.0, 0.5, 2.0 / 3.0],
            merge_tol: 0.02,
            tol_l: 0.02,
            identity_tol: 0.05,
            coherence_tol: 0.05,
            thouless_tol: 0.05,
            solver_tol: 0.01,
        }
    }
}

impl BoundSettings {
    /// Uses `seed` for every random ingredient.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.lyapunov.seed = seed;
        self.grid_lyapunov.seed = seed;
        self.dos.seed = seed;
        self.spectrum.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.curve_points < 2 {
            return Err(Error::InvalidInput("curve_points must be at least 2".into()));
        }
        if self.holder_alphas.is_empty() || self.holder_alphas.iter().any(|a| !(*a > 0.0 && *a <= 1.0)) {
            return Err(Error::InvalidInput("holder_alphas must lie in (0, 1]".into()));
        }
        let tols = [
            ("merge_tol", self.merge_tol),
            ("tol_l", self.tol_l),
            ("identity_tol", self.identity_tol),
            ("coherence_tol", self.coherence_tol),
            ("thouless_tol", self.thouless_tol),
            ("solver_tol", self.solver_tol),
        ];
        for (name, t) in tols {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidInput(format!("{name} = {t} must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "≤")]
    Le,
    #[serde(rename = "≥")]
    Ge,
    /// Equal up to a relative tolerance.
    #[serde(rename = "≈")]
    Approx,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Le => "≤",
            Self::Ge => "≥",
            Self::Approx => "≈",
        })
    }
}

/// Where a check's numbers came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub model: ErgodicModel,
    pub settings: BoundSettings,
    pub spectrum_method: crate::spectrum::SpectrumMethod,
    pub spectrum_gap_tol: f64,
}

/// One inequality or identity evaluated numerically.
///
/// `slack` is positive exactly when the relation holds without tolerance:
/// `rhs − lhs` for `≤`, `lhs − rhs` for `≥`, and `tol·|rhs| − |lhs − rhs|`
/// for `≈`. `tolerance` is absolute for `≤`/`≥` and relative for `≈`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    pub holds: bool,
    pub slack: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundCheck {
    pub fn new(name: &str, lhs: f64, relation: Relation, rhs: f64, tolerance: f64) -> Self {
        let (slack, holds) = match relation {
            Relation::Le => (rhs - lhs, lhs <= rhs + tolerance),
            Relation::Ge => (lhs - rhs, lhs + tolerance >= rhs),
            Relation::Approx => {
                let s = tolerance * rhs.abs() - (lhs - rhs).abs();
                (s, s >= 0.0)
            }
        };
        Self {
            name: name.to_owned(),
            lhs,
            rhs,
            relation,
            holds: holds && lhs.is_finite() && rhs.is_finite(),
            slack,
            tolerance,
            note: None,
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// `|lhs − rhs| / |rhs|`.
    pub fn relative_gap(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.rhs.abs()
    }
}

/// Empirical Hölder constant of `L` on `Σ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderEstimate {
    pub alpha: f64,
    pub c: f64,
    /// RMS residual of a log-log fit of the sampled modulus of continuity.
    pub fit_residual: f64,
    /// Slope of that fit, an empirical Hölder exponent.
    pub fitted_exponent: f64,
    /// `L` is numerically constant; `c` is zero and bounds built on it are
    /// trivial.
    pub degenerate: bool,
}

impl HolderEstimate {
    /// `(|L(Σ)| / (C 4^{1−α}))^{1/α}`, or 0 in the degenerate case.
    pub fn diameter_bound(&self, image: f64) -> f64 {
        if self.degenerate || self.c <= 0.0 {
            return 0.0;
        }
        (image / (self.c * 4f64.powf(1.0 - self.alpha))).powf(1.0 / self.alpha)
    }
}

/// Picks the Hölder exponent in `alphas` giving the strongest diameter
/// bound. `C(α)` is the largest ratio `|L_i − L_j| / |E_i − E_j|^α` over
/// sample pairs inside one component of `set`.
pub fn estimate_holder(
    curve: &LyapunovCurve,
    set: &IntervalUnion,
    alphas: &[f64],
    tol_l: f64,
) -> Result<HolderEstimate> {
    if curve.len() < 2 {
        return Err(Error::InvalidInput("Hölder estimate needs at least 2 samples".into()));
    }
    let comp: Vec<Option<usize>> = curve.grid.iter().map(|&e| set.component_of(e)).collect();
    let mut pairs = Vec::new();
    for i in 0..curve.len() {
        for j in i + 1..curve.len() {
            if comp[i].is_some() && comp[i] == comp[j] {
                pairs.push((curve.grid[j] - curve.grid[i], (curve.values[j] - curve.values[i]).abs()));
            }
        }
    }
    let image = image_measure(&curve.values, tol_l);
    let spread = curve.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - curve.values.iter().copied().fold(f64::INFINITY, f64::min);
    let (fit_residual, fitted_exponent) = modulus_fit(&pairs);
    if spread <= tol_l || pairs.is_empty() {
        return Ok(HolderEstimate {
            alpha: alphas[0],
            c: 0.0,
            fit_residual,
            fitted_exponent,
            degenerate: true,
        });
    }
    let best = alphas
        .iter()
        .map(|&alpha| {
            let c = pairs.iter().map(|&(d, dl)| dl / d.powf(alpha)).fold(0.0, f64::max);
            HolderEstimate {
                alpha,
                c,
                fit_residual,
                fitted_exponent,
                degenerate: false,
            }
        })
        .max_by(|a, b| a.diameter_bound(image).total_cmp(&b.diameter_bound(image)))
        .expect("alphas is nonempty");
    Ok(best)
}

/// Log-log regression of `ω(h) = max{|ΔL| : |ΔE| ≤ h}` at a dozen scales.
fn modulus_fit(pairs: &[(f64, f64)]) -> (f64, f64) {
    let (dmin, dmax) = pairs
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &(d, _)| (lo.min(d), hi.max(d)));
    if pairs.is_empty() || dmax <= dmin {
        return (0.0, 0.0);
    }
    let pts: Vec<(f64, f64)> = (0..12)
        .map(|k| dmin * (dmax / dmin).powf(k as f64 / 11.0))
        .filter_map(|h| {
            let w = pairs
                .iter()
                .filter(|&&(d, _)| d <= h * (1.0 + 1e-12))
                .map(|&(_, dl)| dl)
                .fold(0.0, f64::max);
            (w > 0.0).then(|| (h.ln(), w.ln()))
        })
        .collect();
    if pts.len() < 2 {
        return (0.0, 0.0);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    ((rss / n).sqrt(), slope)
}

/// Lower estimate of `|L(Σ)|`: sampled values are sorted, neighbours closer
/// than `merge_tol` are joined, and the joined lengths are summed.
pub fn image_measure(values: &[f64], merge_tol: f64) -> f64 {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    v.sort_by(f64::total_cmp);
    v.windows(2).map(|w| w[1] - w[0]).filter(|&g| g < merge_tol).sum()
}

/// Every ingredient of the checks for one model.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub model: ErgodicModel,
    pub settings: BoundSettings,
    pub spectrum: SpectrumApprox,
    pub a: f64,
    pub dos: SpectralMeasure,
    /// `L` on `curve_points` samples of `Σ`.
    pub curve: LyapunovCurve,
    /// `L` on twice as many samples, guarding the supremum.
    pub refined_curve: LyapunovCurve,
    /// `L` at the centers of occupied DOS bins.
    pub dos_curve: LyapunovCurve,
    pub equilibrium: Equilibrium,
    /// `L` at the equilibrium cells.
    pub equilibrium_curve: LyapunovCurve,
}

impl Analysis {
    pub fn new(model: &ErgodicModel, settings: &BoundSettings) -> Result<Self> {
        model.validate()?;
        settings.validate()?;
        let spectrum = spectrum_approx(model, &settings.spectrum)?;
        let set = spectrum.set.clone();
        let lyap = &settings.lyapunov;
        let a = geometric_mean_a(model, lyap.n_steps, lyap.n_samples, lyap.seed)?;
        let dos = dos_measure(model, &settings.dos)?;

        let curve = lyapunov_curve(model, &set.sample_grid(settings.curve_points), lyap)?;
        let refined_curve = lyapunov_curve(model, &set.sample_grid(2 * settings.curve_points), lyap)?;
        let occupied: Vec<f64> = dos
            .centers()
            .into_iter()
            .zip(&dos.weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|(c, _)| c)
            .collect();
        let dos_curve = lyapunov_curve(model, &occupied, &settings.grid_lyapunov)?;
        let equilibrium = equilibrium_measure(&set, &settings.equilibrium)?;
        let equilibrium_curve = lyapunov_curve(model, equilibrium.measure.points(), &settings.grid_lyapunov)?;
        Ok(Self {
            model: model.clone(),
            settings: settings.clone(),
            spectrum,
            a,
            dos,
            curve,
            refined_curve,
            dos_curve,
            equilibrium,
            equilibrium_curve,
        })
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            model: self.model.clone(),
            settings: self.settings.clone(),
            spectrum_method: self.spectrum.method,
            spectrum_gap_tol: self.spectrum.gap_tol,
        }
    }

    pub fn set(&self) -> &IntervalUnion {
        &self.spectrum.set
    }

    /// `λ_M − λ_m`, read off the interval approximation.
    pub fn diameter(&self) -> f64 {
        self.spectrum.diameter()
    }

    pub fn capacity(&self) -> f64 {
        self.equilibrium.capacity()
    }

    /// Largest sampled `max(L, 0)` and its standard error, over both curves.
    pub fn sup_l(&self) -> (f64, f64) {
        let (l, s) = self.curve.merge(&self.refined_curve).max_point().unwrap_or((0.0, 0.0));
        (l.max(0.0), s)
    }

    /// Whether the sup over the refined curve moved by more than `tol_l`.
    pub fn refinement_shift(&self) -> f64 {
        let coarse = self.curve.max_point().map_or(0.0, |p| p.0);
        let fine = self.refined_curve.max_point().map_or(0.0, |p| p.0);
        (fine - coarse).abs()
    }

    /// Whether `L` vanishes (numerically) at every sample of `Σ`.
    pub fn zero_lyapunov(&self) -> bool {
        self.sup_l().0 <= self.settings.tol_l
    }

    /// `I(dN)` with histogram bins as cells.
    pub fn dos_energy(&self) -> Result<f64> {
        Ok(log_energy(&DiscreteMeasure::from_spectral(&self.dos)?))
    }

    /// `Σ_bins w · L(E_bin)`.
    pub fn dos_l_integral(&self) -> f64 {
        let w: Vec<f64> = self.dos.weights.iter().copied().filter(|&w| w > 0.0).collect();
        w.iter().zip(&self.dos_curve.values).map(|(w, l)| w * l).sum()
    }

    /// `Σ_i w_i L(x_i)` over the equilibrium cells.
    pub fn equilibrium_l_integral(&self) -> f64 {
        self.equilibrium
            .measure
            .weights()
            .iter()
            .zip(&self.equilibrium_curve.values)
            .map(|(w, l)| w * l)
            .sum()
    }

    fn combined_stderr(curve: &LyapunovCurve, weights: &[f64]) -> f64 {
        weights.iter().zip(&curve.stderrs).map(|(w, s)| w * s).sum()
    }

    pub fn check_capacity_identity(&self) -> BoundCheck {
        let lhs = self.capacity();
        let rhs = self.a * self.equilibrium_l_integral().exp();
        BoundCheck::new(
            "capacity_identity",
            lhs,
            Relation::Approx,
            rhs,
            self.settings.identity_tol,
        )
    }

    pub fn check_measure_bound(&self) -> BoundCheck {
        let (sup, stderr) = self.sup_l();
        let rhs = 4.0 * self.a * (sup + stderr).exp();
        let lhs = self.set().measure();
        BoundCheck::new("measure_bound", lhs, Relation::Le, rhs, self.settings.solver_tol * rhs).with_note(format!(
            "sup L = {sup} ± {stderr}; refinement shift {}",
            self.refinement_shift()
        ))
    }

    /// Both lower bounds on `λ_M − λ_m` and their mutual consistency.
    pub fn check_gap_bounds(&self) -> Result<[BoundCheck; 3]> {
        let lhs = self.diameter();
        let energy = self.dos_energy()?;
        let rhs1 = 4.0 * (-energy).exp();
        let integral = self.dos_l_integral();
        let rhs2 = 4.0 * self.a * integral.exp();
        let occupied: Vec<f64> = self.dos.weights.iter().copied().filter(|&w| w > 0.0).collect();
        let stderr = Self::combined_stderr(&self.dos_curve, &occupied);
        let tol = self.settings.solver_tol;
        Ok([
            BoundCheck::new("gap_bound_energy", lhs, Relation::Ge, rhs1, tol * rhs1)
                .with_note(format!("I(dN) = {energy}")),
            BoundCheck::new("gap_bound_lyapunov", lhs, Relation::Ge, rhs2, (tol + stderr) * rhs2)
                .with_note(format!("∫L dN = {integral} ± {stderr}")),
            BoundCheck::new(
                "gap_bound_coherence",
                rhs2,
                Relation::Approx,
                rhs1,
                self.settings.coherence_tol,
            ),
        ])
    }

    pub fn holder(&self) -> Result<HolderEstimate> {
        estimate_holder(
            &self.curve,
            self.set(),
            &self.settings.holder_alphas,
            self.settings.tol_l,
        )
    }

    pub fn image_measure(&self) -> f64 {
        image_measure(&self.curve.values, self.settings.merge_tol)
    }

    /// The Hölder diameter bound, plus its simplified form when `min L ≈ 0`.
    pub fn check_holder_bound(&self) -> Result<Vec<BoundCheck>> {
        let h = self.holder()?;
        let lhs = self.diameter();
        let tol = self.settings.solver_tol * lhs;
        let image = self.image_measure();
        let rhs = h.diameter_bound(image);
        let note = if h.degenerate {
            "L constant on Σ: C = 0, trivial bound".to_owned()
        } else {
            format!("α = {}, C = {}, |L(Σ)| ≥ {image}", h.alpha, h.c)
        };
        let mut out = vec![BoundCheck::new("holder_bound", lhs, Relation::Ge, rhs, tol).with_note(note)];
        let min_l = self.curve.values.iter().copied().fold(f64::INFINITY, f64::min);
        if !h.degenerate && min_l <= self.settings.tol_l {
            let sup = self.sup_l().0;
            out.push(BoundCheck::new(
                "holder_bound_simplified",
                lhs,
                Relation::Ge,
                h.diameter_bound(sup),
                tol,
            ));
        }
        Ok(out)
    }

    /// Default Thouless test points: five real parts across the hull of
    /// `Σ` at heights 0.5 and 1.
    pub fn thouless_points(&self) -> Vec<Complex64> {
        if let Some(p) = &self.settings.thouless_points {
            return p.clone();
        }
        let (lo, hi) = (self.set().min().unwrap_or(-1.0), self.set().max().unwrap_or(1.0));
        [0.5, 1.0]
            .iter()
            .flat_map(|&y| (0..5).map(move |k| Complex64::new(lo + (hi - lo) * k as f64 / 4.0, y)))
            .collect()
    }

    pub fn thouless_residuals(&self, points: &[Complex64]) -> Result<Vec<ThoulessResidual>> {
        verify_thouless_with(&self.model, &self.dos, self.a, points, &self.settings.lyapunov)
    }

    pub fn check_thouless(&self) -> Result<BoundCheck> {
        let res = self.thouless_residuals(&self.thouless_points())?;
        let max = res.iter().map(|r| r.residual).fold(0.0, f64::max);
        let mean = res.iter().map(|r| r.residual).sum::<f64>() / res.len().max(1) as f64;
        Ok(
            BoundCheck::new("thouless", max, Relation::Le, self.settings.thouless_tol, 0.0)
                .with_note(format!("mean residual {mean} over {} points", res.len())),
        )
    }

    /// `|Σ| ≤ 4A ≤ λ_M − λ_m`, valid when `L` vanishes on `Σ`.
    pub fn check_chain(&self) -> Option<[BoundCheck; 2]> {
        if !self.zero_lyapunov() {
            return None;
        }
        let four_a = 4.0 * self.a;
        let tol = self.settings.solver_tol * four_a;
        Some([
            BoundCheck::new("chain_measure", self.set().measure(), Relation::Le, four_a, tol),
            BoundCheck::new("chain_diameter", self.diameter(), Relation::Ge, four_a, tol),
        ])
    }

    /// All checks in a fixed order.
    pub fn report(&self) -> Result<Report> {
        let mut checks = vec![
            self.check_thouless()?,
            self.check_capacity_identity(),
            self.check_measure_bound(),
        ];
        checks.extend(self.check_gap_bounds()?);
        checks.extend(self.check_holder_bound()?);
        if let Some(chain) = self.check_chain() {
            checks.extend(chain);
        }
        let h = self.holder()?;
        Ok(Report {
            provenance: self.provenance(),
            spectrum_measure: self.set().measure(),
            spectrum_min: self.set().min().unwrap_or(f64::NAN),
            spectrum_max: self.set().max().unwrap_or(f64::NAN),
            spectrum_intervals: self.set().len(),
            a: self.a,
            capacity: self.capacity(),
            sup_l: self.sup_l().0,
            holder: h,
            image_measure: self.image_measure(),
            checks,
        })
    }
}

/// Summary of every check for one model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub provenance: Provenance,
    pub spectrum_measure: f64,
    pub spectrum_min: f64,
    pub spectrum_max: f64,
    pub spectrum_intervals: usize,
    pub a: f64,
    pub capacity: f64,
    pub sup_l: f64,
    pub holder: HolderEstimate,
    pub image_measure: f64,
    pub checks: Vec<BoundCheck>,
}

impl Report {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn check(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThoulessResidual {
    pub z: Complex64,
    /// Transfer-matrix `L(z)`.
    pub lyapunov: f64,
    /// `∫ log|E − z| dN(E) − log A`.
    pub thouless: f64,
    pub residual: f64,
}

/// Compares `L(z)` with the Thouless integral against a given DOS.
pub fn verify_thouless_with(
    model: &ErgodicModel,
    dos: &SpectralMeasure,
    a: f64,
    points: &[Complex64],
    settings: &LyapunovSettings,
) -> Result<Vec<ThoulessResidual>> {
    let measure = DiscreteMeasure::from_spectral(dos)?;
    let est = lyapunov_points(model, points, settings)?;
    Ok(est
        .iter()
        .map(|e| {
            let thouless = -log_potential(&measure, e.z) - a.ln();
            ThoulessResidual {
                z: e.z,
                lyapunov: e.value,
                thouless,
                residual: (e.value - thouless).abs(),
            }
        })
        .collect())
}

/// Thouless residuals at `points`, computing `dN` and `A` from `settings`.
pub fn verify_thouless(
    model: &ErgodicModel,
    points: &[Complex64],
    settings: &BoundSettings,
) -> Result<Vec<ThoulessResidual>> {
    let dos = dos_measure(model, &settings.dos)?;
    let l = &settings.lyapunov;
    let a = geometric_mean_a(model, l.n_steps, l.n_samples, l.seed)?;
    verify_thouless_with(model, &dos, a, points, l)
}

/// Runs every check for `model`.
pub fn verify_all(model: &ErgodicModel, settings: &BoundSettings) -> Result<Report> {
    Analysis::new(model, settings)?.report()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(grid: Vec<f64>, f: impl Fn(f64) -> f64) -> LyapunovCurve {
        let values = grid.iter().map(|&e| f(e)).collect();
        let n = grid.len();
        LyapunovCurve::new(grid, values, vec![0.0; n]).unwrap()
    }

    fn alphas() -> Vec<f64> {
        BoundSettings::default().holder_alphas
    }

    #[test]
    fn relations_and_slack() {
        let c = BoundCheck::new("x", 1.0, Relation::Le, 2.0, 0.0);
        assert!(c.holds && c.slack == 1.0);
        let c = BoundCheck::new("x", 1.0, Relation::Ge, 2.0, 0.5);
        assert!(!c.holds && c.slack == -1.0);
        let c = BoundCheck::new("x", 1.0, Relation::Ge, 1.01, 0.02);
        assert!(c.holds && c.slack < 0.0);
        let c = BoundCheck::new("x", 1.04, Relation::Approx, 1.0, 0.05);
        assert!(c.holds && (c.slack - 0.01).abs() < 1e-12);
        assert!(!BoundCheck::new("x", f64::NAN, Relation::Le, 1.0, 0.0).holds);
    }

    #[test]
    fn constant_curve_is_degenerate() {
        let set = IntervalUnion::interval(-1.0, 1.0).unwrap();
        let grid = set.sample_grid(30);
        let h = estimate_holder(&curve(grid, |_| 0.7), &set, &alphas(), 0.02).unwrap();
        assert!(h.degenerate);
        assert_eq!(h.c, 0.0);
        assert_eq!(h.diameter_bound(0.0), 0.0);
    }

    #[test]
    fn square_root_curve() {
        // brute force over the same grid gives C(1/2) = 1, the largest bound
        let set = IntervalUnion::interval(-1.0, 1.0).unwrap();
        let grid: Vec<f64> = (0..=200).map(|k| -1.0 + k as f64 / 100.0).collect();
        let h = estimate_holder(&curve(grid, |e| e.abs().sqrt()), &set, &alphas(), 0.02).unwrap();
        assert_eq!(h.alpha, 0.5);
        assert!((h.c - 1.0).abs() < 1e-9, "{}", h.c);
        assert!((h.fitted_exponent - 0.5).abs() < 0.05);
    }

    #[test]
    fn holder_constant_dominates_every_pair() {
        let set = IntervalUnion::new(vec![(0.0, 1.0), (2.0, 3.0)]).unwrap();
        let grid = set.sample_grid(40);
        let c = curve(grid, |e| (3.0 * e).sin() + 0.3 * e);
        let h = estimate_holder(&c, &set, &alphas(), 0.02).unwrap();
        for i in 0..c.len() {
            for j in 0..c.len() {
                if i != j && set.component_of(c.grid[i]) == set.component_of(c.grid[j]) {
                    let d = (c.grid[i] - c.grid[j]).abs();
                    assert!((c.values[i] - c.values[j]).abs() <= h.c * d.powf(h.alpha) * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn too_few_samples() {
        let set = IntervalUnion::interval(0.0, 1.0).unwrap();
        assert!(estimate_holder(&curve(vec![0.5], |_| 0.0), &set, &alphas(), 0.02).is_err());
    }

    #[test]
    fn image_measures() {
        assert_eq!(image_measure(&[0.0; 10], 0.02), 0.0);
        let ramp: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
        assert!((image_measure(&ramp, 0.02) - 1.0).abs() <= 0.02);
        assert!((image_measure(&[0.0, 0.01, 0.5, 0.505], 0.02) - 0.015).abs() < 1e-12);
    }
}
