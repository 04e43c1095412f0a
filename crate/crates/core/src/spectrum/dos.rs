//! Density of states as a histogram of pooled finite-section eigenvalues.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tridiag::{gershgorin, kth_eigenvalue, sturm_count, EIGEN_TOL};
use crate::error::{Error, Result};
use crate::models::{sample_realization, ErgodicModel};

/// Binned probability measure on the energy axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralMeasure {
    pub bin_edges: Vec<f64>,
    pub weights: Vec<f64>,
    pub n_eigenvalues_total: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DosSettings {
    /// Size `N` of each finite section.
    pub n_sites: usize,
    pub n_samples: usize,
    pub m_bins: usize,
    pub seed: u64,
}

impl Default for DosSettings {
    fn default() -> Self {
        Self {
            n_sites: 1000,
            n_samples: 20,
            m_bins: 200,
            seed: 0,
        }
    }
}

impl SpectralMeasure {
    pub fn new(bin_edges: Vec<f64>, weights: Vec<f64>, n_eigenvalues_total: usize) -> Result<Self> {
        if bin_edges.len() != weights.len() + 1 || weights.is_empty() {
            return Err(Error::InvalidInput("need m weights and m + 1 bin edges".into()));
        }
        if bin_edges.windows(2).any(|w| !(w[0] < w[1])) || bin_edges.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(
                "bin edges must be finite and strictly increasing".into(),
            ));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidInput("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self {
            bin_edges,
            weights,
            n_eigenvalues_total,
        })
    }

    pub fn n_bins(&self) -> usize {
        self.weights.len()
    }

    pub fn centers(&self) -> Vec<f64> {
        self.bin_edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.bin_edges.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// `[first, last]` edge of the bins carrying mass.
    pub fn support(&self) -> (f64, f64) {
        let first = self.weights.iter().position(|&w| w > 0.0).unwrap_or(0);
        let last = self.weights.iter().rposition(|&w| w > 0.0).unwrap_or(self.n_bins() - 1);
        (self.bin_edges[first], self.bin_edges[last + 1])
    }

    /// `∫ h dN` with `h` evaluated at bin centers.
    pub fn integrate(&self, h: impl Fn(f64) -> f64) -> f64 {
        self.centers()
            .iter()
            .zip(&self.weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|(&x, &w)| w * h(x))
            .sum()
    }

    /// The measure translated by `c`.
    pub fn translate(&self, c: f64) -> Self {
        Self {
            bin_edges: self.bin_edges.iter().map(|x| x + c).collect(),
            ..self.clone()
        }
    }
}

/// Integrated density of states `k(E) = N((−∞, E])`, linear inside bins.
pub fn ids(measure: &SpectralMeasure, e: f64) -> f64 {
    let edges = &measure.bin_edges;
    if e <= edges[0] {
        return 0.0;
    }
    if e >= edges[edges.len() - 1] {
        return 1.0;
    }
    let i = edges.partition_point(|&x| x <= e) - 1;
    let below: f64 = measure.weights[..i].iter().sum();
    let frac = (e - edges[i]) / (edges[i + 1] - edges[i]);
    (below + frac * measure.weights[i]).min(1.0)
}

/// Histogram of all eigenvalues of `n_samples` finite sections of size
/// `n_sites`, normalized to a probability measure. Bin contents are exact
/// eigenvalue counts obtained from Sturm sequences at the bin edges.
pub fn dos_measure(model: &ErgodicModel, settings: &DosSettings) -> Result<SpectralMeasure> {
    model.validate()?;
    let &DosSettings {
        n_sites: n,
        n_samples,
        m_bins,
        seed,
    } = settings;
    if n < 50 {
        return Err(Error::InvalidInput(format!("DOS needs N >= 50, got {n}")));
    }
    if m_bins < 20 {
        return Err(Error::InvalidInput(format!("DOS needs at least 20 bins, got {m_bins}")));
    }
    if n_samples == 0 {
        return Err(Error::InvalidInput("n_samples must be at least 1".into()));
    }
    let sections: Vec<_> = model
        .realizations(n_samples, seed)
        .into_iter()
        .map(|r| sample_realization(model, r, n))
        .collect();

    let extremes: Vec<(f64, f64)> = sections
        .par_iter()
        .map(|p| {
            let off = &p.a[..n - 1];
            let (lo, hi) = gershgorin(&p.b, off);
            (
                kth_eigenvalue(&p.b, off, 0, lo - 1.0, hi + 1.0, EIGEN_TOL),
                kth_eigenvalue(&p.b, off, n - 1, lo - 1.0, hi + 1.0, EIGEN_TOL),
            )
        })
        .collect();
    let lo = extremes.iter().map(|e| e.0).fold(f64::INFINITY, f64::min);
    let hi = extremes.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
    let pad = 1e-9 * (hi - lo).max(1.0);
    let (lo, hi) = (lo - pad, hi + pad);
    let edges: Vec<f64> = (0..=m_bins)
        .map(|k| lo + (hi - lo) * k as f64 / m_bins as f64)
        .collect();

    let counts: Vec<usize> = sections
        .par_iter()
        .map(|p| {
            let off = &p.a[..n - 1];
            edges.iter().map(|&x| sturm_count(&p.b, off, x)).collect::<Vec<_>>()
        })
        .reduce(
            || vec![0; m_bins + 1],
            |mut acc, c| {
                acc.iter_mut().zip(c).for_each(|(a, b)| *a += b);
                acc
            },
        );
    let total = n * n_samples;
    let weights = counts.windows(2).map(|w| (w[1] - w[0]) as f64 / total as f64).collect();
    SpectralMeasure::new(edges, weights, total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arcsine_ids(e: f64) -> f64 {
        if e <= -2.0 {
            0.0
        } else if e >= 2.0 {
            1.0
        } else {
            1.0 - (e / 2.0).acos() / std::f64::consts::PI
        }
    }

    #[test]
    fn free_dos_matches_arcsine_at_bin_edges() {
        let s = DosSettings {
            n_sites: 2000,
            n_samples: 1,
            m_bins: 100,
            seed: 0,
        };
        let dos = dos_measure(&ErgodicModel::Free, &s).unwrap();
        assert_eq!(dos.n_eigenvalues_total, 2000);
        let total: f64 = dos.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        let err = dos
            .bin_edges
            .iter()
            .map(|&e| (ids(&dos, e) - arcsine_ids(e)).abs())
            .fold(0.0, f64::max);
        assert!(err <= 0.01, "sup error {err}");
        assert!((ids(&dos, 0.0) - 0.5).abs() <= 0.01);
        assert!((ids(&dos, 2f64.sqrt()) - 0.75).abs() <= 0.01);
    }

    #[test]
    fn shift_translates_measure() {
        let s = DosSettings {
            n_sites: 200,
            n_samples: 1,
            m_bins: 40,
            seed: 0,
        };
        let free = dos_measure(&ErgodicModel::Free, &s).unwrap();
        let shifted = dos_measure(&ErgodicModel::periodic(vec![1.0], vec![1.5]).unwrap(), &s).unwrap();
        assert_eq!(free.weights, shifted.weights);
        for (x, y) in free.translate(1.5).bin_edges.iter().zip(&shifted.bin_edges) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn ids_limits_and_monotonicity() {
        let s = DosSettings {
            n_sites: 300,
            n_samples: 3,
            m_bins: 50,
            seed: 1,
        };
        let dos = dos_measure(&ErgodicModel::anderson(2.0, 4).unwrap(), &s).unwrap();
        let (lo, hi) = dos.support();
        assert_eq!(ids(&dos, lo - 1.0), 0.0);
        assert_eq!(ids(&dos, lo), 0.0);
        assert!((ids(&dos, hi) - 1.0).abs() < 1e-12);
        let mut prev = 0.0;
        for k in 0..=400 {
            let e = lo - 0.5 + (hi - lo + 1.0) * k as f64 / 400.0;
            let v = ids(&dos, e);
            assert!(v >= prev - 1e-15 && (0.0..=1.0).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn rejects_small_inputs() {
        let small = |n_sites, m_bins| DosSettings {
            n_sites,
            m_bins,
            ..DosSettings::default()
        };
        assert!(dos_measure(&ErgodicModel::Free, &small(10, 200)).is_err());
        assert!(dos_measure(&ErgodicModel::Free, &small(100, 5)).is_err());
        assert!(SpectralMeasure::new(vec![0.0, 1.0], vec![0.5], 1).is_err());
    }
}
