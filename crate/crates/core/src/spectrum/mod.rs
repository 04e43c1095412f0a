//! Finite sections, density of states and interval approximations of the
//! almost-sure spectrum `Σ`.

pub mod bands;
pub mod dos;
pub mod tridiag;

pub use bands::{bloch_eigenvalues, discriminant, discriminant_bands, level_set, Discriminant};
pub use dos::{dos_measure, ids, DosSettings, SpectralMeasure};
pub use tridiag::{eigenvalues_truncated, kth_eigenvalue, sturm_count, EIGEN_TOL};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, TAU};

use crate::contfrac::{self, Convergent};
use crate::error::{Error, Result};
use crate::intervals::IntervalUnion;
use crate::models::{sample_realization, ErgodicModel, ParameterSequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMethod {
    /// Pooled eigenvalues of long finite sections.
    Eigencloud,
    /// Bands of periodic approximants.
    Approximant,
}

impl SpectrumMethod {
    /// Approximants where they exist, eigenvalue clouds otherwise.
    pub fn preferred(model: &ErgodicModel) -> Self {
        match model {
            ErgodicModel::Anderson { .. } => Self::Eigencloud,
            _ => Self::Approximant,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSettings {
    /// `None` picks [`SpectrumMethod::preferred`].
    pub method: Option<SpectrumMethod>,
    /// Section size for the eigencloud.
    pub n_sites: usize,
    /// Number of sections pooled by the eigencloud.
    pub n_samples: usize,
    /// Smallest approximant denominator.
    pub q_min: u64,
    /// Gaps narrower than this are closed. Defaults to `4·diam/N` for the
    /// eigencloud and to no merging for approximants.
    pub gap_tol: Option<f64>,
    pub seed: u64,
}

impl Default for SpectrumSettings {
    fn default() -> Self {
        Self {
            method: None,
            n_sites: 2000,
            n_samples: 8,
            q_min: 100,
            gap_tol: None,
            seed: 0,
        }
    }
}

/// An interval approximation of `Σ` together with how it was obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumApprox {
    pub set: IntervalUnion,
    pub method: SpectrumMethod,
    pub gap_tol: f64,
    /// Periodic approximants used (empty for the eigencloud).
    pub convergents: Vec<Convergent>,
    pub n_sites: usize,
    pub n_samples: usize,
}

impl SpectrumApprox {
    /// `λ_M − λ_m`.
    pub fn diameter(&self) -> f64 {
        self.set.diameter()
    }
}

pub fn spectrum_approx(model: &ErgodicModel, settings: &SpectrumSettings) -> Result<SpectrumApprox> {
    model.validate()?;
    if let Some(t) = settings.gap_tol {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidInput(format!("gap_tol = {t} must be nonnegative")));
        }
    }
    let method = settings.method.unwrap_or_else(|| SpectrumMethod::preferred(model));
    match method {
        SpectrumMethod::Eigencloud => eigencloud(model, settings),
        SpectrumMethod::Approximant => approximant(model, settings),
    }
}

fn approximant(model: &ErgodicModel, settings: &SpectrumSettings) -> Result<SpectrumApprox> {
    let (set, convergents) = match model {
        ErgodicModel::Free => (IntervalUnion::interval(-2.0, 2.0)?, Vec::new()),
        ErgodicModel::Periodic { a, b } => {
            let period = ParameterSequence::new(a.clone(), b.clone())?;
            (discriminant_bands(&period)?, Vec::new())
        }
        ErgodicModel::AlmostMathieu { lambda, alpha } => {
            let c = pick_convergent(*alpha, settings.q_min)?;
            (almost_mathieu_union(*lambda, c)?, vec![c])
        }
        ErgodicModel::Sturmian { coupling, alpha } => {
            let c = pick_convergent(*alpha, settings.q_min)?;
            let mut used = vec![c];
            let mut set = sturmian_bands(*coupling, c)?;
            if let Some(next) = contfrac::next_convergent(*alpha, c) {
                set = set.union(&sturmian_bands(*coupling, next)?);
                used.push(next);
            }
            (set, used)
        }
        ErgodicModel::Anderson { .. } => {
            return Err(Error::Unsupported {
                method: "approximant",
                model: model.name(),
            })
        }
    };
    let gap_tol = settings.gap_tol.unwrap_or(0.0);
    Ok(SpectrumApprox {
        set: set.merge_gaps(gap_tol),
        method: SpectrumMethod::Approximant,
        gap_tol,
        convergents,
        n_sites: 0,
        n_samples: 0,
    })
}

fn pick_convergent(alpha: f64, q_min: u64) -> Result<Convergent> {
    contfrac::convergent_at_least(alpha, q_min.max(1))
        .ok_or_else(|| Error::InvalidModel(format!("no convergents for α = {alpha}")))
}

fn rotation_period(c: Convergent, theta: f64, b: impl Fn(f64) -> f64) -> Result<ParameterSequence> {
    let q = c.q as usize;
    let coeffs = (1..=c.q)
        .map(|n| b((theta + (n * c.p % c.q) as f64 / c.q as f64).fract()))
        .collect();
    ParameterSequence::new(vec![1.0; q], coeffs)
}

/// Almost Mathieu operator at frequency `p/q`, phase `theta`.
pub fn almost_mathieu_period(lambda: f64, c: Convergent, theta: f64) -> Result<ParameterSequence> {
    rotation_period(c, theta, |x| 2.0 * lambda * (TAU * x).cos())
}

/// Sturmian operator at frequency `p/q`, phase `theta`.
pub fn sturmian_period(coupling: f64, c: Convergent, theta: f64) -> Result<ParameterSequence> {
    let window = 1.0 - c.value();
    rotation_period(c, theta, |x| if x >= window { coupling } else { 0.0 })
}

/// Union over all phases of the bands of the almost Mathieu operator with
/// rational frequency `p/q`.
///
/// The monodromy trace splits as `D(E) + 2 λ^q cos(2π q θ)` up to sign, so
/// the union is `{|D| ≤ 2 + 2|λ|^q}` with `D` the trace at `θ = 1/(4q)`.
/// Its boundary consists of Bloch eigenvalues at `θ = 0` and `θ = 1/(2q)`.
pub fn almost_mathieu_union(lambda: f64, c: Convergent) -> Result<IntervalUnion> {
    let q = c.q as f64;
    let reference = almost_mathieu_period(lambda, c, 0.25 / q)?;
    let mut candidates = Vec::with_capacity(4 * c.q as usize);
    for theta in [0.0, 0.5 / q] {
        let p = almost_mathieu_period(lambda, c, theta)?;
        candidates.extend(bloch_eigenvalues(&p, false));
        candidates.extend(bloch_eigenvalues(&p, true));
    }
    // ln(2 + 2|λ|^q) without overflow
    let t = q * lambda.abs().ln();
    let log_level = LN_2
        + if t > 0.0 {
            t + (-t).exp().ln_1p()
        } else {
            t.exp().ln_1p()
        };
    Ok(level_set(&reference, log_level, &candidates))
}

/// Bands of the Sturmian operator with rational frequency `p/q`; every phase
/// in `[0, 1/q)` produces the same coefficient sequence.
pub fn sturmian_bands(coupling: f64, c: Convergent) -> Result<IntervalUnion> {
    discriminant_bands(&sturmian_period(coupling, c, 0.5 / c.q as f64)?)
}

fn eigencloud(model: &ErgodicModel, settings: &SpectrumSettings) -> Result<SpectrumApprox> {
    let n = settings.n_sites;
    if n < 2 {
        return Err(Error::InvalidInput(format!("eigencloud needs N >= 2, got {n}")));
    }
    if settings.n_samples == 0 {
        return Err(Error::InvalidInput("n_samples must be at least 1".into()));
    }
    let sections: Vec<ParameterSequence> = model
        .realizations(settings.n_samples, settings.seed)
        .into_iter()
        .map(|r| sample_realization(model, r, n))
        .collect();
    let (b_lo, b_hi, a_max) = model.coefficient_bounds();
    let (lo_box, hi_box) = (b_lo - 2.0 * a_max - 1.0, b_hi + 2.0 * a_max + 1.0);
    let off = |p: &ParameterSequence| p.a[..n - 1].to_vec();
    let kth =
        |p: &ParameterSequence, k: usize, lo: f64, hi: f64| kth_eigenvalue(&p.b, &p.a[..n - 1], k, lo, hi, EIGEN_TOL);
    let extremes: Vec<(f64, f64)> = sections
        .par_iter()
        .map(|p| (kth(p, 0, lo_box, hi_box), kth(p, n - 1, lo_box, hi_box)))
        .collect();
    let lo = extremes.iter().map(|e| e.0).fold(f64::INFINITY, f64::min);
    let hi = extremes.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
    let gap_tol = settings.gap_tol.unwrap_or(4.0 * (hi - lo) / n as f64);

    let meta = |set| SpectrumApprox {
        set,
        method: SpectrumMethod::Eigencloud,
        gap_tol,
        convergents: Vec::new(),
        n_sites: n,
        n_samples: settings.n_samples,
    };
    if gap_tol <= 0.0 || hi - lo <= gap_tol {
        // no gap can be resolved beyond the raw eigenvalues
        if gap_tol <= 0.0 {
            let mut pts: Vec<(f64, f64)> = sections
                .par_iter()
                .flat_map_iter(|p| tridiag::eigenvalues(&p.b, &off(p), EIGEN_TOL))
                .map(|e| (e, e))
                .collect();
            pts.sort_by(|x, y| x.0.total_cmp(&y.0));
            return Ok(meta(IntervalUnion::new(pts)?));
        }
        return Ok(meta(IntervalUnion::interval(lo, hi)?));
    }

    // Every gap of length ≥ gap_tol between pooled eigenvalues contains a
    // whole cell of width gap_tol/2, so scanning empty cells finds them all.
    let h = 0.5 * gap_tol;
    let cells = ((hi - lo) / h).ceil() as usize;
    let edges: Vec<f64> = (0..=cells).map(|j| (lo + j as f64 * h).min(hi)).collect();
    let counts: Vec<Vec<usize>> = sections
        .par_iter()
        .map(|p| edges.iter().map(|&x| sturm_count(&p.b, &p.a[..n - 1], x)).collect())
        .collect();
    let total = |j: usize| counts.iter().map(|c| c[j]).sum::<usize>();
    let empty: Vec<bool> = (0..cells).map(|j| j + 1 < cells && total(j) == total(j + 1)).collect();

    let mut pieces = Vec::new();
    let mut left = lo;
    let mut j = 0;
    while j < cells {
        if !empty[j] {
            j += 1;
            continue;
        }
        let start = j;
        while j < cells && empty[j] {
            j += 1;
        }
        let (xs, xe) = (edges[start], edges[j]);
        // nearest pooled eigenvalues on either side of the empty run
        let below = sections
            .iter()
            .zip(&counts)
            .filter(|(_, c)| c[start] > 0)
            .map(|(p, c)| kth(p, c[start] - 1, lo - 1.0, xs))
            .fold(f64::NEG_INFINITY, f64::max);
        let above = sections
            .iter()
            .zip(&counts)
            .filter(|(_, c)| c[j] < n)
            .map(|(p, c)| kth(p, c[j], xe, hi + 1.0))
            .fold(f64::INFINITY, f64::min);
        if above - below >= gap_tol {
            pieces.push((left, below.max(left)));
            left = above;
        }
    }
    pieces.push((left, hi.max(left)));
    Ok(meta(IntervalUnion::new(pieces)?))
}
