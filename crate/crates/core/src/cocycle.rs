//! Transfer matrices and Lyapunov exponents.
//!
//! The eigenvalue equation `a_{n-1}ψ_{n-1} + b_nψ_n + a_nψ_{n+1} = zψ_n` is
//! propagated by the one-step matrices
//!
//! ```text
//! A_n(z) = (1/a_n) [[z - b_n, -a_{n-1}], [a_n, 0]]
//! ```
//!
//! and the cocycle `A_z^N = A_N ⋯ A_1`. Products are renormalized after every
//! multiplication so arbitrarily long runs never overflow.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::ops::Mul;

use crate::error::{Error, Result};
use crate::models::{ErgodicModel, ParameterSequence, Realization};

/// Default nonnegativity tolerance for numerical Lyapunov exponents.
pub const DEFAULT_TOL_L: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix2 {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

/// Matrix norm used when reading off growth rates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    #[default]
    Frobenius,
    /// Operator 2-norm (largest singular value).
    Operator,
}

impl Matrix2 {
    pub fn new(m11: Complex64, m12: Complex64, m21: Complex64, m22: Complex64) -> Self {
        Self { m11, m12, m21, m22 }
    }

    pub fn real(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Self::new(m11.into(), m12.into(), m21.into(), m22.into())
    }

    pub fn identity() -> Self {
        Self::real(1.0, 0.0, 0.0, 1.0)
    }

    pub fn det(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn trace(&self) -> Complex64 {
        self.m11 + self.m22
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.m11 * s, self.m12 * s, self.m21 * s, self.m22 * s)
    }

    pub fn frobenius_norm(&self) -> f64 {
        (self.m11.norm_sqr() + self.m12.norm_sqr() + self.m21.norm_sqr() + self.m22.norm_sqr()).sqrt()
    }

    /// Largest singular value, from `σ_max² = (F² + √(F⁴ − 4|det|²))/2`.
    pub fn operator_norm(&self) -> f64 {
        let f2 = self.m11.norm_sqr() + self.m12.norm_sqr() + self.m21.norm_sqr() + self.m22.norm_sqr();
        let d = self.det().norm();
        let disc = (f2 * f2 - 4.0 * d * d).max(0.0).sqrt();
        (0.5 * (f2 + disc)).sqrt()
    }

    pub fn norm(&self, norm: Norm) -> f64 {
        match norm {
            Norm::Frobenius => self.frobenius_norm(),
            Norm::Operator => self.operator_norm(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            self.m11 - other.m11,
            self.m12 - other.m12,
            self.m21 - other.m21,
            self.m22 - other.m22,
        ]
        .iter()
        .map(|d| d.norm())
        .fold(0.0, f64::max)
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;

    #[inline]
    fn mul(self, r: Matrix2) -> Matrix2 {
        Matrix2 {
            m11: self.m11 * r.m11 + self.m12 * r.m21,
            m12: self.m11 * r.m12 + self.m12 * r.m22,
            m21: self.m21 * r.m11 + self.m22 * r.m21,
            m22: self.m21 * r.m12 + self.m22 * r.m22,
        }
    }
}

/// One-step transfer matrix `(1/a_cur)·[[z − b, −a_prev], [a_cur, 0]]`.
pub fn step_matrix(a_prev: f64, a_cur: f64, b: f64, z: Complex64) -> Result<Matrix2> {
    if !(a_cur > 0.0) {
        return Err(Error::InvalidParameters(format!(
            "transfer matrix needs a_n > 0, got {a_cur}"
        )));
    }
    if !(a_prev >= 0.0) {
        return Err(Error::InvalidParameters(format!(
            "transfer matrix needs a_(n-1) >= 0, got {a_prev}"
        )));
    }
    Ok(step_unchecked(a_prev, a_cur, b, z))
}

#[inline]
fn step_unchecked(a_prev: f64, a_cur: f64, b: f64, z: Complex64) -> Matrix2 {
    let inv = 1.0 / a_cur;
    Matrix2 {
        m11: (z - b) * inv,
        m12: Complex64::new(-a_prev * inv, 0.0),
        m21: Complex64::new(1.0, 0.0),
        m22: Complex64::new(0.0, 0.0),
    }
}

/// Running product kept as `exp(log_norm) · normalized` with
/// `‖normalized‖_F = 1`.
#[derive(Clone, Copy, Debug)]
pub struct CocycleProduct {
    pub normalized: Matrix2,
    pub log_norm: f64,
    pub steps: usize,
}

impl CocycleProduct {
    pub fn identity() -> Self {
        Self {
            normalized: Matrix2::identity(),
            log_norm: 0.0,
            steps: 0,
        }
    }

    /// Left-multiplies by `m` and renormalizes.
    #[inline]
    pub fn push(&mut self, m: Matrix2) {
        let p = m * self.normalized;
        let f = p.frobenius_norm();
        if f > 0.0 && f.is_finite() {
            self.normalized = p.scale(1.0 / f);
            self.log_norm += f.ln();
        } else {
            // A zero product stays zero; record it as -inf growth.
            self.normalized = p;
            self.log_norm = f64::NEG_INFINITY;
        }
        self.steps += 1;
    }

    /// `log ‖A‖` in the requested norm.
    pub fn log_norm_with(&self, norm: Norm) -> f64 {
        self.log_norm + self.normalized.norm(norm).ln()
    }

    /// `log |det A|`.
    pub fn log_abs_det(&self) -> f64 {
        2.0 * self.log_norm + self.normalized.det().norm().ln()
    }
}

/// `A_z^N = A_N ⋯ A_1` for the whole sequence, with the boundary convention
/// `a_0 = 0` in the first step.
pub fn cocycle_product(params: &ParameterSequence, z: Complex64) -> Result<CocycleProduct> {
    if params.is_empty() {
        return Err(Error::InvalidParameters("empty parameter sequence".into()));
    }
    params.validate()?;
    let mut prod = CocycleProduct::identity();
    let mut a_prev = 0.0;
    for (&a, &b) in params.a.iter().zip(&params.b) {
        prod.push(step_unchecked(a_prev, a, b, z));
        a_prev = a;
    }
    Ok(prod)
}

/// Cocycle over `n_steps` full-rank steps `n = 2 .. n_steps + 1` of a
/// realization. The singular boundary step `n = 1` is skipped; it only
/// contributes `O(1/n)` to the growth rate.
pub fn realization_product(model: &ErgodicModel, r: Realization, z: Complex64, n_steps: usize) -> CocycleProduct {
    let mut it = model.params(r);
    let (mut a_prev, _) = it.next().expect("parameter stream is infinite");
    let mut prod = CocycleProduct::identity();
    for (a, b) in it.take(n_steps) {
        prod.push(step_unchecked(a_prev, a, b, z));
        a_prev = a;
    }
    prod
}

/// Resolution of a Lyapunov run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LyapunovSettings {
    pub n_steps: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub norm: Norm,
}

impl Default for LyapunovSettings {
    fn default() -> Self {
        Self {
            n_steps: 10_000,
            n_samples: 8,
            seed: 0,
            norm: Norm::Frobenius,
        }
    }
}

impl LyapunovSettings {
    pub fn new(n_steps: usize, n_samples: usize, seed: u64) -> Self {
        Self {
            n_steps,
            n_samples,
            seed,
            norm: Norm::Frobenius,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_steps < 100 {
            return Err(Error::InvalidInput(format!(
                "Lyapunov runs need at least 100 steps, got {}",
                self.n_steps
            )));
        }
        if self.n_samples == 0 {
            return Err(Error::InvalidInput("n_samples must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    /// Growth rate in nats per step.
    pub value: f64,
    /// Standard error of the sample mean (0 for a single sample).
    pub stderr: f64,
    pub n_steps: usize,
    pub n_samples: usize,
    pub z: Complex64,
}

/// Averages `(1/n) log ‖A_z^n(ω_j)‖` over the model's sample realizations.
pub fn lyapunov(model: &ErgodicModel, z: Complex64, settings: &LyapunovSettings) -> Result<LyapunovEstimate> {
    model.validate()?;
    settings.validate()?;
    let realizations = model.realizations(settings.n_samples, settings.seed);
    Ok(lyapunov_over(model, z, settings, &realizations))
}

fn lyapunov_over(
    model: &ErgodicModel,
    z: Complex64,
    settings: &LyapunovSettings,
    realizations: &[Realization],
) -> LyapunovEstimate {
    let n = settings.n_steps as f64;
    let rates: Vec<f64> = realizations
        .iter()
        .map(|&r| realization_product(model, r, z, settings.n_steps).log_norm_with(settings.norm) / n)
        .collect();
    let (value, stderr) = mean_stderr(&rates);
    LyapunovEstimate {
        value,
        stderr,
        n_steps: settings.n_steps,
        n_samples: rates.len(),
        z,
    }
}

pub(crate) fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// `A = exp(E log a_n)`, the almost-sure limit of `(a_1⋯a_n)^{1/n}`.
pub fn geometric_mean_a(model: &ErgodicModel, n_steps: usize, n_samples: usize, seed: u64) -> Result<f64> {
    model.validate()?;
    if n_steps == 0 {
        return Err(Error::InvalidInput("n_steps must be at least 1".into()));
    }
    match model {
        ErgodicModel::Periodic { a, .. } => {
            // exact: one full period
            Ok((a.iter().map(|x| x.ln()).sum::<f64>() / a.len() as f64).exp())
        }
        ErgodicModel::Free => Ok(1.0),
        _ => {
            let rs = model.realizations(n_samples, seed);
            let total: f64 = rs
                .iter()
                .map(|&r| model.params(r).take(n_steps).map(|(a, _)| a.ln()).sum::<f64>() / n_steps as f64)
                .sum();
            Ok((total / rs.len() as f64).exp())
        }
    }
}

/// Lyapunov exponent sampled on a sorted real grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub stderrs: Vec<f64>,
}

impl LyapunovCurve {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, stderrs: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() || grid.len() != stderrs.len() {
            return Err(Error::InvalidInput("curve columns differ in length".into()));
        }
        if grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput("curve grid must be strictly increasing".into()));
        }
        Ok(Self { grid, values, stderrs })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Points whose energy satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(f64) -> bool) -> Self {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| keep(self.grid[i])).collect();
        Self {
            grid: idx.iter().map(|&i| self.grid[i]).collect(),
            values: idx.iter().map(|&i| self.values[i]).collect(),
            stderrs: idx.iter().map(|&i| self.stderrs[i]).collect(),
        }
    }

    /// Merge of two curves on disjoint grids.
    pub fn merge(&self, other: &Self) -> Self {
        let mut rows: Vec<(f64, f64, f64)> = self
            .grid
            .iter()
            .zip(&self.values)
            .zip(&self.stderrs)
            .chain(other.grid.iter().zip(&other.values).zip(&other.stderrs))
            .map(|((&e, &l), &s)| (e, l, s))
            .collect();
        rows.sort_by(|x, y| x.0.total_cmp(&y.0));
        rows.dedup_by(|x, y| x.0 == y.0);
        Self {
            grid: rows.iter().map(|r| r.0).collect(),
            values: rows.iter().map(|r| r.1).collect(),
            stderrs: rows.iter().map(|r| r.2).collect(),
        }
    }

    /// `(value, stderr)` at the sample with the largest value.
    pub fn max_point(&self) -> Option<(f64, f64)> {
        (0..self.len())
            .max_by(|&i, &j| self.values[i].total_cmp(&self.values[j]))
            .map(|i| (self.values[i], self.stderrs[i]))
    }
}

/// Pointwise [`lyapunov`] on a real grid. All grid points share the same
/// realizations, so the result does not depend on evaluation order.
pub fn lyapunov_curve(model: &ErgodicModel, grid: &[f64], settings: &LyapunovSettings) -> Result<LyapunovCurve> {
    model.validate()?;
    settings.validate()?;
    if grid.is_empty() {
        return Err(Error::InvalidInput("Lyapunov grid is empty".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidInput("Lyapunov grid must be strictly increasing".into()));
    }
    let points: Vec<Complex64> = grid.iter().map(|&e| Complex64::new(e, 0.0)).collect();
    let est = lyapunov_points(model, &points, settings)?;
    Ok(LyapunovCurve {
        grid: grid.to_vec(),
        values: est.iter().map(|e| e.value).collect(),
        stderrs: est.iter().map(|e| e.stderr).collect(),
    })
}

/// [`lyapunov`] at many spectral parameters, evaluated in parallel.
pub fn lyapunov_points(
    model: &ErgodicModel,
    points: &[Complex64],
    settings: &LyapunovSettings,
) -> Result<Vec<LyapunovEstimate>> {
    model.validate()?;
    settings.validate()?;
    let realizations = model.realizations(settings.n_samples, settings.seed);
    Ok(points
        .par_iter()
        .map(|&z| lyapunov_over(model, z, settings, &realizations))
        .collect())
}

/// `L(z) = log|(z + √(z² − 4))/2|` for the discrete Laplacian, with the root
/// branch chosen so the modulus is at least 1.
pub fn free_lyapunov(z: Complex64) -> f64 {
    let s = (z * z - 4.0).sqrt();
    let r1 = (z + s) / 2.0;
    let r2 = (z - s) / 2.0;
    r1.norm().max(r2.norm()).ln()
}
