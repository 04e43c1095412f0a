//! Ergodic families of Jacobi operators.
//!
//! A model fixes the sampling functions and the ergodic transformation; a
//! [`Realization`] picks one point of the phase space (a phase on the circle,
//! a position in the period, or a disorder seed). Parameters are produced by
//! [`ParamIter`] for `n = 1, 2, ...`; the boundary coefficient `a_0 = 0` is
//! never stored.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::contfrac::{self, Convergent};
use crate::error::{Error, Result};

/// The built-in ergodic families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ErgodicModel {
    /// Discrete Laplacian, `a_n = 1`, `b_n = 0`.
    Free,
    /// `a_n = 1`, `b_n = 2 λ cos(2π(ω + nα))`.
    AlmostMathieu { lambda: f64, alpha: f64 },
    /// Periodic coefficients; the phase selects the list position of site 1.
    Periodic { a: Vec<f64>, b: Vec<f64> },
    /// `a_n = 1`, `b_n` i.i.d. uniform on `[-W/2, W/2]`.
    Anderson { width: f64, seed: u64 },
    /// `a_n = 1`, `b_n = V · 1[(ω + nα) mod 1 ∈ [1 - α, 1)]`.
    Sturmian { coupling: f64, alpha: f64 },
}

/// Description of `(Ω, T)` for a model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhaseSpace {
    Point,
    CircleRotation { alpha: f64 },
    CyclicShift { period: usize },
    IidShift,
}

/// One point of the phase space. `phase` is used by rotations and periodic
/// models, `seed` by the Anderson model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub phase: f64,
    pub seed: u64,
}

/// First `N` Jacobi parameters of one realization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterSequence {
    /// `a_1 .. a_N`, all positive.
    pub a: Vec<f64>,
    /// `b_1 .. b_N`.
    pub b: Vec<f64>,
    pub origin: Origin,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Origin {
    pub model: String,
    pub phase: f64,
    pub seed: u64,
}

impl ParameterSequence {
    /// Builds a sequence from raw coefficient lists, checking `a_n > 0`.
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let seq = Self {
            a,
            b,
            origin: Origin {
                model: "explicit".into(),
                phase: 0.0,
                seed: 0,
            },
        };
        seq.validate()?;
        Ok(seq)
    }

    pub fn validate(&self) -> Result<()> {
        if self.a.len() != self.b.len() {
            return Err(Error::InvalidParameters(format!(
                "a and b lengths differ ({} vs {})",
                self.a.len(),
                self.b.len()
            )));
        }
        if let Some((n, &x)) = self.a.iter().enumerate().find(|(_, &x)| !(x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidParameters(format!(
                "a_{} = {x} must be positive and finite",
                n + 1
            )));
        }
        if let Some(n) = self.b.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidParameters(format!("b_{} is not finite", n + 1)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// The first `n` entries.
    pub fn truncate(&self, n: usize) -> Self {
        Self {
            a: self.a[..n.min(self.len())].to_vec(),
            b: self.b[..n.min(self.len())].to_vec(),
            origin: self.origin.clone(),
        }
    }
}

impl ErgodicModel {
    pub fn almost_mathieu(lambda: f64, alpha: f64) -> Result<Self> {
        let m = Self::AlmostMathieu { lambda, alpha };
        m.validate()?;
        Ok(m)
    }

    pub fn periodic(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let m = Self::Periodic { a, b };
        m.validate()?;
        Ok(m)
    }

    pub fn anderson(width: f64, seed: u64) -> Result<Self> {
        let m = Self::Anderson { width, seed };
        m.validate()?;
        Ok(m)
    }

    pub fn sturmian(coupling: f64, alpha: f64) -> Result<Self> {
        let m = Self::Sturmian { coupling, alpha };
        m.validate()?;
        Ok(m)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Free => "free",
            Self::AlmostMathieu { .. } => "almost_mathieu",
            Self::Periodic { .. } => "periodic",
            Self::Anderson { .. } => "anderson",
            Self::Sturmian { .. } => "sturmian",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidModel(msg));
        match self {
            Self::Free => Ok(()),
            Self::AlmostMathieu { lambda, alpha } => {
                if !lambda.is_finite() || *lambda == 0.0 {
                    return bad("λ must be nonzero".into());
                }
                check_frequency(*alpha)
            }
            Self::Periodic { a, b } => {
                if a.is_empty() {
                    return bad("periodic model needs a period of at least 1".into());
                }
                if a.len() != b.len() {
                    return bad(format!(
                        "periodic a and b must have equal length ({} vs {})",
                        a.len(),
                        b.len()
                    ));
                }
                if a.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                    return bad("periodic a entries must be positive".into());
                }
                if b.iter().any(|x| !x.is_finite()) {
                    return bad("periodic b entries must be finite".into());
                }
                Ok(())
            }
            Self::Anderson { width, .. } => {
                if !(*width > 0.0 && width.is_finite()) {
                    return bad("Anderson disorder width W must be positive".into());
                }
                Ok(())
            }
            Self::Sturmian { coupling, alpha } => {
                if !coupling.is_finite() {
                    return bad("Sturmian coupling V must be finite".into());
                }
                check_frequency(*alpha)
            }
        }
    }

    pub fn phase_space(&self) -> PhaseSpace {
        match self {
            Self::Free => PhaseSpace::Point,
            Self::AlmostMathieu { alpha, .. } | Self::Sturmian { alpha, .. } => {
                PhaseSpace::CircleRotation { alpha: *alpha }
            }
            Self::Periodic { a, .. } => PhaseSpace::CyclicShift { period: a.len() },
            Self::Anderson { .. } => PhaseSpace::IidShift,
        }
    }

    /// Rotation frequency, for the quasiperiodic models.
    pub fn frequency(&self) -> Option<f64> {
        match self {
            Self::AlmostMathieu { alpha, .. } | Self::Sturmian { alpha, .. } => Some(*alpha),
            _ => None,
        }
    }

    /// Continued-fraction convergents of the frequency.
    pub fn convergents(&self) -> Vec<Convergent> {
        self.frequency().map(contfrac::convergents).unwrap_or_default()
    }

    /// Bounds `(min b, max b, max a)` of the coefficient ranges.
    pub fn coefficient_bounds(&self) -> (f64, f64, f64) {
        match self {
            Self::Free => (0.0, 0.0, 1.0),
            Self::AlmostMathieu { lambda, .. } => (-2.0 * lambda.abs(), 2.0 * lambda.abs(), 1.0),
            Self::Periodic { a, b } => (
                b.iter().copied().fold(f64::INFINITY, f64::min),
                b.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                a.iter().copied().fold(0.0, f64::max),
            ),
            Self::Anderson { width, .. } => (-width / 2.0, width / 2.0, 1.0),
            Self::Sturmian { coupling, .. } => (coupling.min(0.0), coupling.max(0.0), 1.0),
        }
    }

    /// The realization used by [`sample_parameters`] for phase `omega`.
    pub fn realization_at(&self, omega: f64) -> Realization {
        let seed = match self {
            Self::Anderson { seed, .. } => *seed,
            _ => 0,
        };
        Realization { phase: omega, seed }
    }

    /// `count` realizations for ensemble averages: equidistributed phases on
    /// the circle, successive positions in the period, or independent
    /// disorder seeds. Deterministic in `seed`.
    pub fn realizations(&self, count: usize, seed: u64) -> Vec<Realization> {
        let count = count.max(1);
        match self {
            Self::Free => vec![Realization { phase: 0.0, seed: 0 }; count],
            Self::AlmostMathieu { .. } | Self::Sturmian { .. } => {
                let offset = unit_interval(derive_seed(seed, 0, 0));
                (0..count)
                    .map(|j| Realization {
                        phase: (offset + j as f64 / count as f64).fract(),
                        seed: 0,
                    })
                    .collect()
            }
            Self::Periodic { a, .. } => (0..count)
                .map(|j| Realization {
                    phase: (j % a.len()) as f64,
                    seed: 0,
                })
                .collect(),
            Self::Anderson { seed: model_seed, .. } => (0..count)
                .map(|j| Realization {
                    phase: 0.0,
                    seed: derive_seed(*model_seed, seed, j as u64),
                })
                .collect(),
        }
    }

    /// Streaming parameters `(a_n, b_n)` for `n = 1, 2, ...`.
    pub fn params(&self, r: Realization) -> ParamIter<'_> {
        let state = match self {
            Self::Anderson { .. } => IterState::Stream(Box::new(ChaCha8Rng::seed_from_u64(r.seed))),
            Self::Periodic { a, .. } => IterState::Position(position(r.phase, a.len())),
            _ => IterState::Plain,
        };
        ParamIter {
            model: self,
            phase: r.phase,
            n: 0,
            state,
        }
    }
}

fn check_frequency(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidModel(format!("frequency α = {alpha} must lie in (0, 1)")));
    }
    Ok(())
}

fn position(phase: f64, period: usize) -> usize {
    let p = period as i64;
    (phase.floor() as i64).rem_euclid(p) as usize
}

enum IterState {
    Plain,
    Position(usize),
    Stream(Box<ChaCha8Rng>),
}

/// Iterator over `(a_n, b_n)`, `n = 1, 2, ...`. Never terminates.
pub struct ParamIter<'m> {
    model: &'m ErgodicModel,
    phase: f64,
    n: u64,
    state: IterState,
}

impl Iterator for ParamIter<'_> {
    type Item = (f64, f64);

    #[inline]
    fn next(&mut self) -> Option<(f64, f64)> {
        self.n += 1;
        let n = self.n as f64;
        let item = match (self.model, &mut self.state) {
            (ErgodicModel::Free, _) => (1.0, 0.0),
            (ErgodicModel::AlmostMathieu { lambda, alpha }, _) => {
                let x = n.mul_add(*alpha, self.phase).fract();
                (1.0, 2.0 * lambda * (TAU * x).cos())
            }
            (ErgodicModel::Sturmian { coupling, alpha }, _) => {
                let x = n.mul_add(*alpha, self.phase).rem_euclid(1.0);
                (1.0, if x >= 1.0 - alpha { *coupling } else { 0.0 })
            }
            (ErgodicModel::Periodic { a, b }, IterState::Position(pos)) => {
                let item = (a[*pos], b[*pos]);
                *pos = (*pos + 1) % a.len();
                item
            }
            (ErgodicModel::Anderson { width, .. }, IterState::Stream(rng)) => {
                (1.0, width * (unit_interval(rng.next_u64()) - 0.5))
            }
            _ => unreachable!("iterator state does not match model"),
        };
        Some(item)
    }
}

/// `T^n ω`: the fractional part of `ω + nα` for rotations, the shifted index
/// for periodic and i.i.d. models, `ω` itself for the one-point space.
pub fn orbit(model: &ErgodicModel, omega: f64, n: u64) -> f64 {
    match model.phase_space() {
        PhaseSpace::Point => omega,
        PhaseSpace::CircleRotation { alpha } => (n as f64).mul_add(alpha, omega).rem_euclid(1.0),
        PhaseSpace::CyclicShift { period } => ((position(omega, period) as u64 + n) % period as u64) as f64,
        PhaseSpace::IidShift => omega + n as f64,
    }
}

/// The first `n` Jacobi parameters of the realization at phase `omega`
/// (the Anderson model uses its own seed and ignores `omega`).
pub fn sample_parameters(model: &ErgodicModel, omega: f64, n: usize) -> Result<ParameterSequence> {
    model.validate()?;
    if n == 0 {
        return Err(Error::InvalidInput("N must be at least 1".into()));
    }
    let r = model.realization_at(omega);
    Ok(sample_realization(model, r, n))
}

/// Like [`sample_parameters`] for an explicit realization; the model must
/// already be valid.
pub fn sample_realization(model: &ErgodicModel, r: Realization, n: usize) -> ParameterSequence {
    let (a, b) = model.params(r).take(n).unzip();
    ParameterSequence {
        a,
        b,
        origin: Origin {
            model: model.name().into(),
            phase: r.phase,
            seed: r.seed,
        },
    }
}

/// Anderson potential at site `n >= 1` as a pure function of `(seed, n)`.
pub fn anderson_site(width: f64, seed: u64, n: u64) -> f64 {
    assert!(n >= 1, "sites are numbered from 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // one u64 is two 32-bit words of the block stream
    rng.set_word_pos(2 * (n as u128 - 1));
    width * (unit_interval(rng.next_u64()) - 0.5)
}

#[inline]
fn unit_interval(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Mixes `(base, stream, index)` into an independent 64-bit seed.
pub fn derive_seed(base: u64, stream: u64, index: u64) -> u64 {
    let mut h = splitmix(base ^ 0x6a09_e667_f3bc_c909);
    h = splitmix(h ^ stream);
    splitmix(h ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `(√5 − 1)/2`, the default irrational frequency.
pub fn golden_mean() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_parameters() {
        let p = sample_parameters(&ErgodicModel::Free, 0.0, 3).unwrap();
        assert_eq!(p.a, vec![1.0; 3]);
        assert_eq!(p.b, vec![0.0; 3]);
    }

    #[test]
    fn almost_mathieu_half_period() {
        let m = ErgodicModel::almost_mathieu(1.0, 0.5).unwrap();
        let p = sample_parameters(&m, 0.0, 2).unwrap();
        assert_eq!(p.a, vec![1.0, 1.0]);
        assert!((p.b[0] + 2.0).abs() < 1e-12);
        assert!((p.b[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn almost_mathieu_golden_first_site() {
        let m = ErgodicModel::almost_mathieu(1.0, golden_mean()).unwrap();
        let p = sample_parameters(&m, 0.0, 1).unwrap();
        // 30-digit evaluation of 2cos(π(√5−1))
        let reference = -1.474_737_756_156_639_8;
        assert!((p.b[0] - reference).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_models() {
        assert!(ErgodicModel::almost_mathieu(0.0, 0.3).is_err());
        let err = ErgodicModel::almost_mathieu(0.0, 0.3).unwrap_err().to_string();
        assert!(err.contains("λ must be nonzero"));
        assert!(ErgodicModel::periodic(vec![1.0, 0.0], vec![0.0, 0.0]).is_err());
        assert!(ErgodicModel::periodic(vec![1.0, -2.0], vec![0.0, 0.0]).is_err());
        assert!(ErgodicModel::periodic(vec![], vec![]).is_err());
        assert!(ErgodicModel::anderson(0.0, 1).is_err());
        assert!(ErgodicModel::sturmian(1.0, 1.5).is_err());
        let bad = ErgodicModel::AlmostMathieu {
            lambda: 0.0,
            alpha: 0.3,
        };
        assert!(sample_parameters(&bad, 0.0, 4).is_err());
        assert!(sample_parameters(&ErgodicModel::Free, 0.0, 0).is_err());
    }

    #[test]
    fn orbit_examples() {
        let rot = ErgodicModel::almost_mathieu(1.0, 0.25).unwrap();
        assert!((orbit(&rot, 0.9, 1) - 0.15).abs() < 1e-12);
        for m in [ErgodicModel::Free, rot.clone()] {
            assert_eq!(orbit(&m, 0.3, 0), 0.3);
        }
        let per = ErgodicModel::periodic(vec![1.0, 1.0], vec![0.0, 1.0]).unwrap();
        assert_eq!(orbit(&per, 1.0, 3), 0.0);
        assert_eq!(orbit(&per, 1.0, 0), 1.0);
    }

    #[test]
    fn periodic_blocks_repeat() {
        let m = ErgodicModel::periodic(vec![1.0, 2.0, 0.5], vec![0.1, -0.3, 2.0]).unwrap();
        let p = sample_parameters(&m, 0.0, 12).unwrap();
        for k in 1..4 {
            assert_eq!(p.a[3 * k..3 * k + 3], p.a[..3]);
            assert_eq!(p.b[3 * k..3 * k + 3], p.b[..3]);
        }
        assert_eq!(p.a[..3], [1.0, 2.0, 0.5]);
        // the phase selects the starting position
        let q = sample_parameters(&m, 1.0, 3).unwrap();
        assert_eq!(q.a, vec![2.0, 0.5, 1.0]);
    }

    #[test]
    fn anderson_is_counter_based() {
        let m = ErgodicModel::anderson(1.0, 42).unwrap();
        let p = sample_parameters(&m, 0.0, 50).unwrap();
        for n in [1u64, 2, 17, 50] {
            assert_eq!(p.b[n as usize - 1], anderson_site(1.0, 42, n));
        }
        assert!(p.a.iter().all(|&a| a == 1.0));
        // phase is ignored
        assert_eq!(p.b, sample_parameters(&m, 0.7, 50).unwrap().b);
    }

    #[test]
    fn anderson_statistics() {
        let w = 1.0;
        let m = ErgodicModel::anderson(w, 7).unwrap();
        let n = 1_000_000;
        let p = sample_parameters(&m, 0.0, n).unwrap();
        let mean = p.b.iter().sum::<f64>() / n as f64;
        let sigma = w / 12f64.sqrt() / (n as f64).sqrt();
        assert!(mean.abs() < 3.0 * sigma, "mean {mean}");
        assert!(p.b.iter().all(|&x| (-w / 2.0..=w / 2.0).contains(&x)));
    }

    #[test]
    fn sturmian_frequency() {
        let alpha = golden_mean();
        let m = ErgodicModel::sturmian(1.0, alpha).unwrap();
        for n in [100usize, 1000, 10_000] {
            let p = sample_parameters(&m, 0.2, n).unwrap();
            let ones = p.b.iter().filter(|&&x| x == 1.0).count() as f64;
            // discrepancy of a rotation orbit on an interval is O(log N)
            assert!((ones - alpha * n as f64).abs() <= 2.0, "n={n} ones={ones}");
        }
    }

    #[test]
    fn deterministic() {
        let models = [
            ErgodicModel::almost_mathieu(2.0, golden_mean()).unwrap(),
            ErgodicModel::anderson(2.0, 3).unwrap(),
            ErgodicModel::sturmian(1.0, golden_mean()).unwrap(),
        ];
        for m in &models {
            let x = sample_parameters(m, 0.123, 1000).unwrap();
            let y = sample_parameters(m, 0.123, 1000).unwrap();
            assert!(x.b.iter().zip(&y.b).all(|(u, v)| u.to_bits() == v.to_bits()));
            assert_eq!(m.realizations(5, 9), m.realizations(5, 9));
        }
    }

    #[test]
    fn realizations_are_distinct() {
        let m = ErgodicModel::anderson(1.0, 3).unwrap();
        let rs = m.realizations(4, 11);
        let seeds: std::collections::HashSet<u64> = rs.iter().map(|r| r.seed).collect();
        assert_eq!(seeds.len(), 4);
        let am = ErgodicModel::almost_mathieu(1.0, golden_mean()).unwrap();
        let phases: Vec<f64> = am.realizations(4, 11).iter().map(|r| r.phase).collect();
        assert!(phases.iter().all(|p| (0.0..1.0).contains(p)));
    }
}
