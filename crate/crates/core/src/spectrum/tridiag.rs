//! Eigenvalues of symmetric tridiagonal matrices by Sturm-sequence counting
//! and bisection.

use crate::error::{Error, Result};
use crate::models::ParameterSequence;

/// Absolute accuracy of computed eigenvalues.
pub const EIGEN_TOL: f64 = 1e-11;

const PIVOT_GUARD: f64 = 1e-300;

/// Number of eigenvalues strictly below `x` of the matrix with diagonal
/// `diag` and off-diagonal `off` (`off.len() == diag.len() - 1`).
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    let mut e2 = 0.0;
    for (i, &d) in diag.iter().enumerate() {
        q = d - x - e2 / q;
        if q.abs() < PIVOT_GUARD {
            q = -PIVOT_GUARD;
        }
        if q < 0.0 {
            count += 1;
        }
        if i < off.len() {
            e2 = off[i] * off[i];
        }
    }
    count
}

/// Gershgorin enclosure `[lo, hi]` of the spectrum.
pub fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    (lo, hi)
}

fn width_ok(lo: f64, hi: f64, tol: f64) -> bool {
    hi - lo <= tol.max(4.0 * f64::EPSILON * lo.abs().max(hi.abs()))
}

/// All eigenvalues in ascending order, each to absolute accuracy `tol`.
/// Subdivides the Gershgorin interval and only keeps halves that contain
/// eigenvalues, so clustered spectra share bisection work.
pub fn eigenvalues(diag: &[f64], off: &[f64], tol: f64) -> Vec<f64> {
    let n = diag.len();
    if n == 0 {
        return Vec::new();
    }
    let (lo, hi) = gershgorin(diag, off);
    let (lo, hi) = (lo - 1e-9, hi + 1e-9);
    let mut out = vec![0.0; n];
    let mut stack = vec![(lo, hi, 0usize, n)];
    while let Some((l, h, cl, ch)) = stack.pop() {
        if cl == ch {
            continue;
        }
        if width_ok(l, h, tol) {
            out[cl..ch].fill(0.5 * (l + h));
            continue;
        }
        let m = 0.5 * (l + h);
        let cm = sturm_count(diag, off, m).clamp(cl, ch);
        stack.push((m, h, cm, ch));
        stack.push((l, m, cl, cm));
    }
    out
}

/// The `k`-th smallest eigenvalue (0-based), searched inside `[lo, hi]`,
/// which must contain it.
pub fn kth_eigenvalue(diag: &[f64], off: &[f64], k: usize, lo: f64, hi: f64, tol: f64) -> f64 {
    let (mut l, mut h) = (lo, hi);
    while !width_ok(l, h, tol) {
        let m = 0.5 * (l + h);
        if sturm_count(diag, off, m) <= k {
            l = m;
        } else {
            h = m;
        }
    }
    0.5 * (l + h)
}

/// Eigenvalues of the `n × n` finite section (Dirichlet truncation) of the
/// Jacobi matrix, ascending.
pub fn eigenvalues_truncated(params: &ParameterSequence, n: usize) -> Result<Vec<f64>> {
    if n == 0 || n > params.len() {
        return Err(Error::InvalidInput(format!(
            "truncation size {n} must be in 1..={}",
            params.len()
        )));
    }
    params.validate()?;
    Ok(eigenvalues(&params.b[..n], &params.a[..n - 1], EIGEN_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{sample_parameters, ErgodicModel};
    use std::f64::consts::PI;

    #[test]
    fn small_free_sections() {
        let p = sample_parameters(&ErgodicModel::Free, 0.0, 3).unwrap();
        let e2 = eigenvalues_truncated(&p, 2).unwrap();
        assert!((e2[0] + 1.0).abs() < 1e-10 && (e2[1] - 1.0).abs() < 1e-10);
        let e3 = eigenvalues_truncated(&p, 3).unwrap();
        let s = 2f64.sqrt();
        for (x, y) in e3.iter().zip([-s, 0.0, s]) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn free_section_closed_form() {
        let n = 100;
        let p = sample_parameters(&ErgodicModel::Free, 0.0, n).unwrap();
        let ev = eigenvalues_truncated(&p, n).unwrap();
        assert_eq!(ev.len(), n);
        let mut exact: Vec<f64> = (1..=n)
            .map(|k| 2.0 * (k as f64 * PI / (n as f64 + 1.0)).cos())
            .collect();
        exact.sort_by(f64::total_cmp);
        for (x, y) in ev.iter().zip(&exact) {
            assert!((x - y).abs() < 1e-10);
            assert!(x.abs() < 2.0);
        }
    }

    #[test]
    fn degenerate_and_error_cases() {
        // decoupled-looking blocks with repeated eigenvalues
        let d = [1.0, 1.0, 1.0];
        let e = [1e-14, 1e-14];
        let ev = eigenvalues(&d, &e, EIGEN_TOL);
        assert!(ev.iter().all(|x| (x - 1.0).abs() < 1e-10));
        let p = sample_parameters(&ErgodicModel::Free, 0.0, 3).unwrap();
        assert!(eigenvalues_truncated(&p, 0).is_err());
        assert!(eigenvalues_truncated(&p, 4).is_err());
        let bad = ParameterSequence {
            a: vec![1.0, -1.0],
            b: vec![0.0, 0.0],
            origin: p.origin.clone(),
        };
        assert!(eigenvalues_truncated(&bad, 2).is_err());
    }

    #[test]
    fn kth_matches_full() {
        let m = ErgodicModel::anderson(3.0, 2).unwrap();
        let p = sample_parameters(&m, 0.0, 60).unwrap();
        let ev = eigenvalues_truncated(&p, 60).unwrap();
        let (lo, hi) = gershgorin(&p.b, &p.a[..59]);
        for k in [0, 17, 59] {
            let x = kth_eigenvalue(&p.b, &p.a[..59], k, lo - 1.0, hi + 1.0, EIGEN_TOL);
            assert!((x - ev[k]).abs() < 1e-10);
        }
    }
}
