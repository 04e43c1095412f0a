//! Floquet bands of periodic Jacobi matrices.
//!
//! For one period `(a_1..a_q, b_1..b_q)` extended periodically (`a_0 = a_q`),
//! the monodromy `M_q(E) = A_q ⋯ A_1` has determinant 1 and the spectrum is
//! `{E : |tr M_q(E)| ≤ 2}`. Band edges are the eigenvalues of the periodic
//! and antiperiodic Bloch matrices (`tr M_q = 2` and `tr M_q = −2`), which
//! we take from a dense symmetric eigensolver and then polish by bisection
//! on the discriminant.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::intervals::IntervalUnion;
use crate::models::ParameterSequence;

/// Absolute accuracy of polished band edges.
pub const EDGE_TOL: f64 = 1e-12;

/// `tr M_q(E)` as `sign · exp(log_abs)`, safe for long periods where the
/// trace overflows a double.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Discriminant {
    pub sign: f64,
    pub log_abs: f64,
}

impl Discriminant {
    pub fn value(&self) -> f64 {
        self.sign * self.log_abs.exp()
    }
}

/// Trace of the one-period monodromy at real energy `e`.
pub fn discriminant(period: &ParameterSequence, e: f64) -> Discriminant {
    let q = period.len();
    let mut a_prev = period.a[q - 1];
    // real 2×2 product, rescaled when it grows large
    let (mut m11, mut m12, mut m21, mut m22) = (1.0f64, 0.0f64, 0.0f64, 1.0f64);
    let mut log_scale = 0.0;
    for (&a, &b) in period.a.iter().zip(&period.b) {
        let s11 = (e - b) / a;
        let s12 = -a_prev / a;
        let n11 = s11 * m11 + s12 * m21;
        let n12 = s11 * m12 + s12 * m22;
        m21 = m11;
        m22 = m12;
        m11 = n11;
        m12 = n12;
        let big = m11.abs().max(m12.abs()).max(m21.abs()).max(m22.abs());
        if big > 1e100 {
            let inv = 1.0 / big;
            m11 *= inv;
            m12 *= inv;
            m21 *= inv;
            m22 *= inv;
            log_scale += big.ln();
        }
        a_prev = a;
    }
    let t = m11 + m22;
    Discriminant {
        sign: if t < 0.0 { -1.0 } else { 1.0 },
        log_abs: t.abs().ln() + log_scale,
    }
}

/// Eigenvalues of the Bloch matrix with boundary phase `e^{ik}`, `k ∈ {0, π}`
/// selected by `antiperiodic`.
pub fn bloch_eigenvalues(period: &ParameterSequence, antiperiodic: bool) -> Vec<f64> {
    let q = period.len();
    let s = if antiperiodic { -1.0 } else { 1.0 };
    let mut h = DMatrix::<f64>::zeros(q, q);
    for i in 0..q {
        h[(i, i)] += period.b[i];
    }
    for i in 0..q.saturating_sub(1) {
        h[(i, i + 1)] += period.a[i];
        h[(i + 1, i)] += period.a[i];
    }
    // coupling between site q and site q + 1 ≡ site 1
    h[(q - 1, 0)] += s * period.a[q - 1];
    h[(0, q - 1)] += s * period.a[q - 1];
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `{E : |D(E)| ≤ exp(log_level)}` where `D` is the discriminant of
/// `period`. The boundary of the set must be contained in `candidates`;
/// each gap between consecutive candidates is classified by its midpoint.
pub fn level_set(period: &ParameterSequence, log_level: f64, candidates: &[f64]) -> IntervalUnion {
    let mut c: Vec<f64> = candidates.iter().copied().filter(|x| x.is_finite()).collect();
    c.sort_by(f64::total_cmp);
    c.dedup();
    let inside = |e: f64| discriminant(period, e).log_abs <= log_level + 1e-12;
    let mut pieces: Vec<(f64, f64)> = c
        .windows(2)
        .filter(|w| inside(0.5 * (w[0] + w[1])))
        .map(|w| (w[0], w[1]))
        .collect();
    // isolated candidates lying in the set (zero-width bands)
    pieces.extend(c.iter().filter(|&&x| inside(x)).map(|&x| (x, x)));
    let raw = IntervalUnion::new(pieces).expect("candidates are finite");

    let f = |e: f64| discriminant(period, e).log_abs - log_level;
    let polished: Vec<(f64, f64)> = raw
        .intervals()
        .iter()
        .map(|&(l, r)| {
            let half = 0.5 * (r - l);
            (polish(&f, l, -1.0, half), polish(&f, r, 1.0, half))
        })
        .collect();
    IntervalUnion::new(polished).expect("polished edges stay finite")
}

/// Moves a band edge onto the zero of `f` if `f` changes sign across it:
/// negative just inside (direction `-outward`), positive just outside.
fn polish(f: &impl Fn(f64) -> f64, x: f64, outward: f64, inner_room: f64) -> f64 {
    if f(x).abs() <= 1e-13 {
        return x;
    }
    let delta = 1e-7 * x.abs().max(1.0);
    let inner = x - outward * delta.min(inner_room);
    let outer = x + outward * delta;
    if inner == x || !(f(inner) <= 0.0 && f(outer) > 0.0) {
        return x;
    }
    let (mut lo, mut hi) = (inner, outer);
    while (hi - lo).abs() > EDGE_TOL.max(4.0 * f64::EPSILON * x.abs()) {
        let m = 0.5 * (lo + hi);
        if f(m) <= 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

/// Spectrum `{E : |tr M_q(E)| ≤ 2}` of the periodic operator generated by
/// one period of coefficients: at most `q` disjoint closed intervals.
pub fn discriminant_bands(period: &ParameterSequence) -> Result<IntervalUnion> {
    if period.is_empty() {
        return Err(Error::InvalidInput("period must contain at least one site".into()));
    }
    period.validate()?;
    let mut candidates = bloch_eigenvalues(period, false);
    candidates.extend(bloch_eigenvalues(period, true));
    Ok(level_set(period, std::f64::consts::LN_2, &candidates))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn period(a: &[f64], b: &[f64]) -> ParameterSequence {
        ParameterSequence::new(a.to_vec(), b.to_vec()).unwrap()
    }

    #[test]
    fn single_site_bands() {
        let u = discriminant_bands(&period(&[1.0], &[0.0])).unwrap();
        assert_eq!(u.intervals(), &[(-2.0, 2.0)]);
        let u = discriminant_bands(&period(&[1.0], &[3.0])).unwrap();
        assert_eq!(u.intervals(), &[(1.0, 5.0)]);
        let u = discriminant_bands(&period(&[2.0], &[0.0])).unwrap();
        assert_eq!(u.intervals(), &[(-4.0, 4.0)]);
    }

    #[test]
    fn period_two_quadratic_oracle() {
        // tr M_2(E) = E(E − 1) − 2 for a = (1, 1), b = (0, 1); band edges are
        // the roots of E² − E − 4 = 0 (trace 2) and E² − E = 0 (trace −2).
        let u = discriminant_bands(&period(&[1.0, 1.0], &[0.0, 1.0])).unwrap();
        let s17 = 17f64.sqrt();
        let expected = [((1.0 - s17) / 2.0, 0.0), (1.0, (1.0 + s17) / 2.0)];
        assert_eq!(u.len(), 2);
        for (&(l, r), (el, er)) in u.intervals().iter().zip(expected) {
            assert!((l - el).abs() < 1e-9 && (r - er).abs() < 1e-9, "{l} {r}");
        }
    }

    #[test]
    fn trace_matches_quadratic() {
        let p = period(&[1.0, 1.0], &[0.0, 1.0]);
        for e in [-3.0, -0.5, 0.3, 2.0, 7.0] {
            let exact: f64 = e * (e - 1.0) - 2.0;
            assert!((discriminant(&p, e).value() - exact).abs() < 1e-12 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn closed_gap_is_filled() {
        // the free Laplacian written with period 3
        let u = discriminant_bands(&period(&[1.0; 3], &[0.0; 3])).unwrap();
        assert_eq!(u.len(), 1);
        let (l, r) = u.intervals()[0];
        assert!((l + 2.0).abs() < 1e-9 && (r - 2.0).abs() < 1e-9);
    }

    #[test]
    fn band_count_and_edges_for_random_period() {
        let a = [1.0, 0.5, 2.0, 1.3, 0.8];
        let b = [0.3, -1.0, 0.7, 2.0, -0.4];
        let p = period(&a, &b);
        let u = discriminant_bands(&p).unwrap();
        assert!(u.len() <= 5);
        for &(l, r) in u.intervals() {
            for e in [l, r] {
                assert!((discriminant(&p, e).value().abs() - 2.0).abs() < 1e-6);
            }
            let mid = 0.5 * (l + r);
            assert!(discriminant(&p, mid).value().abs() <= 2.0);
        }
    }

    #[test]
    fn long_period_does_not_overflow() {
        let q = 400;
        let b: Vec<f64> = (0..q).map(|n| 6.0 * (0.37 * n as f64).cos()).collect();
        let p = period(&vec![1.0; q], &b);
        let d = discriminant(&p, 9.0);
        assert!(d.log_abs.is_finite() && d.log_abs > 300.0);
    }
}
