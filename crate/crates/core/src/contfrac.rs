//! Continued-fraction expansion of a floating point frequency.
//!
//! Quasiperiodic spectra are approximated through periodic operators whose
//! frequency is a convergent `p/q` of the irrational frequency.

use serde::{Deserialize, Serialize};

/// Largest denominator we are willing to produce. Beyond this the expansion
/// of a double is dominated by its rounding error.
pub const MAX_DENOMINATOR: u64 = 1 << 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convergent {
    pub p: u64,
    pub q: u64,
}

impl Convergent {
    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

/// Partial quotients `[a0; a1, a2, ...]` of `x >= 0`, stopping when the
/// remainder vanishes or the convergent denominators would exceed
/// [`MAX_DENOMINATOR`].
pub fn partial_quotients(x: f64) -> Vec<u64> {
    let mut out = Vec::new();
    if !x.is_finite() || x < 0.0 {
        return out;
    }
    let mut rem = x;
    let (mut q_prev, mut q) = (0u64, 1u64);
    for _ in 0..64 {
        let a = rem.floor();
        if a > MAX_DENOMINATOR as f64 {
            break;
        }
        let a = a as u64;
        if !out.is_empty() {
            let q_next = a.saturating_mul(q).saturating_add(q_prev);
            if q_next > MAX_DENOMINATOR {
                break;
            }
            q_prev = q;
            q = q_next;
        }
        out.push(a);
        let frac = rem - rem.floor();
        if frac < 1e-15 {
            break;
        }
        rem = 1.0 / frac;
    }
    out
}

/// Convergents `p_k/q_k` of `x`, in order of increasing denominator.
pub fn convergents(x: f64) -> Vec<Convergent> {
    let quotients = partial_quotients(x);
    let mut out = Vec::with_capacity(quotients.len());
    let (mut p_prev, mut p) = (1u64, 0u64);
    let (mut q_prev, mut q) = (0u64, 1u64);
    for (k, &a) in quotients.iter().enumerate() {
        let (p_next, q_next) = if k == 0 {
            (a, 1)
        } else {
            (a * p + p_prev, a * q + q_prev)
        };
        if k == 0 {
            p_prev = 1;
            q_prev = 0;
        } else {
            p_prev = p;
            q_prev = q;
        }
        p = p_next;
        q = q_next;
        out.push(Convergent { p, q });
    }
    out
}

/// First convergent of `x` whose denominator is at least `q_min`, or the
/// last available one if the expansion terminates earlier.
pub fn convergent_at_least(x: f64, q_min: u64) -> Option<Convergent> {
    let all = convergents(x);
    all.iter()
        .copied()
        .find(|c| c.q >= q_min)
        .or_else(|| all.last().copied())
}

/// The convergent following `c` in the expansion of `x`, if any.
pub fn next_convergent(x: f64, c: Convergent) -> Option<Convergent> {
    let all = convergents(x);
    let pos = all.iter().position(|d| *d == c)?;
    all.get(pos + 1).copied()
}
