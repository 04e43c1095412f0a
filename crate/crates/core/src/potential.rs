//! Logarithmic potentials, energies, equilibrium measures and capacities of
//! finite unions of real intervals.
//!
//! Measures are discretized as atoms carrying a cell width `δ`. Whenever the
//! log kernel has to be evaluated inside a cell, the atom is smeared
//! uniformly over `[x − δ/2, x + δ/2]`; the same convention gives the finite
//! self-energy `3/2 − log δ` of a cell.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::intervals::IntervalUnion;
use crate::spectrum::SpectralMeasure;

const WEIGHT_SUM_TOL: f64 = 1e-10;

/// Probability measure made of atoms `w_i` at `x_i`, each representing a
/// cell of width `δ_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    points: Vec<f64>,
    weights: Vec<f64>,
    cell_widths: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(points: Vec<f64>, weights: Vec<f64>, cell_widths: Vec<f64>) -> Result<Self> {
        let m = points.len();
        if m == 0 || weights.len() != m || cell_widths.len() != m {
            return Err(Error::InvalidInput(format!(
                "measure needs equally many points, weights and widths ({}, {}, {})",
                m,
                weights.len(),
                cell_widths.len()
            )));
        }
        if points.iter().any(|x| !x.is_finite()) || points.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::InvalidInput(
                "points must be finite and strictly increasing".into(),
            ));
        }
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidInput("weights must be nonnegative".into()));
        }
        if cell_widths.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(Error::InvalidInput("cell widths must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidInput(format!("weights sum to {total}, not 1")));
        }
        Ok(Self {
            points,
            weights,
            cell_widths,
        })
    }

    /// Histogram bins as cells: atoms at bin centers, `δ` = bin width.
    pub fn from_spectral(measure: &SpectralMeasure) -> Result<Self> {
        Self::new(measure.centers(), measure.weights.clone(), measure.widths())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cell_widths(&self) -> &[f64] {
        &self.cell_widths
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.points
            .iter()
            .zip(&self.weights)
            .zip(&self.cell_widths)
            .map(|((&x, &w), &d)| (x, w, d))
    }

    /// `Σ w_i h(x_i)`.
    pub fn integrate(&self, h: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(x, w, _)| w * h(x)).sum()
    }
}

/// Mean of `log(1/|z − t|)` over `t` uniform on `[x − δ/2, x + δ/2]`.
fn cell_average_kernel(z: Complex64, x: f64, delta: f64) -> f64 {
    let y = z.im.abs();
    // antiderivative of log|s + i y| in s
    let f = |s: f64| {
        let mut v = -s;
        if s != 0.0 || y != 0.0 {
            v += 0.5 * s * (s * s + y * y).ln();
        }
        if y > 0.0 {
            v += y * (s / y).atan();
        }
        v
    };
    let (lo, hi) = (x - 0.5 * delta - z.re, x + 0.5 * delta - z.re);
    -(f(hi) - f(lo)) / delta
}

/// `U^μ(z) = Σ w_i log(1/|z − x_i|)`, smearing any atom whose cell is
/// within half a width of `z`.
pub fn log_potential(measure: &DiscreteMeasure, z: Complex64) -> f64 {
    measure
        .iter()
        .filter(|&(_, w, _)| w > 0.0)
        .map(|(x, w, d)| {
            let dist = (z - x).norm();
            if dist < 0.5 * d {
                w * cell_average_kernel(z, x, d)
            } else {
                -w * dist.ln()
            }
        })
        .sum()
}

/// `I(μ) = Σ_{i≠j} w_i w_j log(1/|x_i − x_j|) + Σ_i w_i² (3/2 − log δ_i)`.
pub fn log_energy(measure: &DiscreteMeasure) -> f64 {
    let x = &measure.points;
    let w = &measure.weights;
    // rows in parallel, summed in a fixed order so results are reproducible
    let rows: Vec<f64> = (0..x.len())
        .into_par_iter()
        .map(|i| {
            let mut s = 0.0;
            for j in i + 1..x.len() {
                s -= w[j] * (x[j] - x[i]).ln();
            }
            2.0 * w[i] * s
        })
        .collect();
    let off: f64 = rows.iter().sum();
    let diag: f64 = measure.iter().map(|(_, w, d)| w * w * (1.5 - d.ln())).sum();
    off + diag
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EquilibriumSettings {
    pub m_points: usize,
    /// Required spread of the potential over the support.
    pub flat_tol: f64,
    /// Required bound on the energy excess `I(w) − min I`.
    pub energy_tol: f64,
    pub max_iter: usize,
}

impl Default for EquilibriumSettings {
    fn default() -> Self {
        Self {
            m_points: 2000,
            flat_tol: 0.02,
            energy_tol: 1e-3,
            max_iter: 5000,
        }
    }
}

impl EquilibriumSettings {
    pub fn with_points(m_points: usize) -> Self {
        Self {
            m_points,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.m_points < 50 {
            return Err(Error::InvalidInput(format!(
                "m_points = {} must be at least 50",
                self.m_points
            )));
        }
        if !(self.flat_tol > 0.0 && self.energy_tol > 0.0) {
            return Err(Error::InvalidInput("solver tolerances must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// Result of the energy minimization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub measure: DiscreteMeasure,
    /// Discretized `I(μ_K)`.
    pub energy: f64,
    /// `max − min` of the potential over cells with positive weight.
    pub flatness: f64,
    /// Certified upper bound on the energy excess over the discrete optimum.
    pub energy_gap: f64,
    pub iterations: usize,
}

impl Equilibrium {
    pub fn capacity(&self) -> f64 {
        (-self.energy).exp()
    }
}

/// Cell layout: per-interval Chebyshev cells whose walls sit at
/// `c − h cos(jπ/m_k)`, so each interval is tiled exactly. Returns points,
/// widths and the initial arcsine weights.
pub fn chebyshev_grid(k: &IntervalUnion, m_points: usize) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let k = k.without_points();
    if k.is_empty() {
        return Err(Error::InvalidInput("set has no interior".into()));
    }
    let (lo, hi) = (k.min().unwrap(), k.max().unwrap());
    let hull_mass = |x: f64| ((2.0 * x - lo - hi) / (hi - lo)).clamp(-1.0, 1.0).asin() / PI;
    let arcsine: Vec<f64> = k
        .intervals()
        .iter()
        .map(|&(l, r)| hull_mass(r) - hull_mass(l))
        .collect();
    let arcsine_total: f64 = arcsine.iter().sum();
    let length_total = k.measure();

    let mut points = Vec::with_capacity(m_points + 4 * k.len());
    let mut widths = Vec::with_capacity(points.capacity());
    let mut weights = Vec::with_capacity(points.capacity());
    for (&(l, r), &mass) in k.intervals().iter().zip(&arcsine) {
        let share = 0.5 * mass / arcsine_total + 0.5 * (r - l) / length_total;
        let m_k = ((share * m_points as f64).round() as usize).max(4);
        let (c, h) = (0.5 * (l + r), 0.5 * (r - l));
        let walls: Vec<f64> = (0..=m_k)
            .map(|j| match j {
                0 => l,
                j if j == m_k => r,
                j => c - h * (j as f64 * PI / m_k as f64).cos(),
            })
            .collect();
        for w in walls.windows(2) {
            points.push(0.5 * (w[0] + w[1]));
            widths.push(w[1] - w[0]);
            weights.push(mass / arcsine_total / m_k as f64);
        }
    }
    Ok((points, widths, weights))
}

/// Dense discretized kernel: `log(1/|x_i − x_j|)` off the diagonal and the
/// cell self-energy on it.
struct Kernel {
    m: usize,
    data: Vec<f64>,
}

impl Kernel {
    fn new(points: &[f64], widths: &[f64]) -> Self {
        let m = points.len();
        let mut data = vec![0.0; m * m];
        data.par_chunks_mut(m).enumerate().for_each(|(i, row)| {
            for (j, v) in row.iter_mut().enumerate() {
                *v = if i == j {
                    1.5 - widths[i].ln()
                } else {
                    -(points[i] - points[j]).abs().ln()
                };
            }
        });
        Self { m, data }
    }

    fn apply(&self, w: &[f64], out: &mut [f64]) {
        out.par_iter_mut()
            .zip(self.data.par_chunks(self.m))
            .for_each(|(o, row)| *o = row.iter().zip(w).map(|(k, x)| k * x).sum());
    }
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &mut [f64]) {
    let mut u: Vec<f64> = v.to_vec();
    u.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (i, &x) in u.iter().enumerate() {
        cumsum += x;
        let t = (cumsum - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            tau = t;
        } else {
            break;
        }
    }
    v.iter_mut().for_each(|x| *x = (*x - tau).max(0.0));
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Spread of the potential over the support and the Frank–Wolfe gap
/// `2 (Σ w_i U_i − min_i U_i)`, which bounds `I(w) − min I` from above.
fn optimality(w: &[f64], u: &[f64]) -> (f64, f64) {
    let support = u.iter().zip(w).filter(|(_, &w)| w > 0.0).map(|(&u, _)| u);
    let (lo, hi) = support.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    let u_min = u.iter().copied().fold(f64::INFINITY, f64::min);
    (hi - lo, 2.0 * (dot(w, u) - u_min))
}

/// Minimizes the discretized energy over probability weights on a grid
/// filling `k`, by accelerated projected gradient descent with adaptive
/// restarts and a backtracking step size.
pub fn equilibrium_measure(k: &IntervalUnion, settings: &EquilibriumSettings) -> Result<Equilibrium> {
    settings.validate()?;
    let (points, widths, mut w) = chebyshev_grid(k, settings.m_points)?;
    let m = points.len();
    let kernel = Kernel::new(&points, &widths);

    let mut u = vec![0.0; m];
    kernel.apply(&w, &mut u);
    let (mut flatness, mut gap) = optimality(&w, &u);
    let mut energy = dot(&w, &u);
    let mut iterations = 0;

    // y = extrapolated point, uy = K y
    let mut y = w.clone();
    let mut uy = u.clone();
    let mut t = 1.0f64;
    let mut lipschitz = 1.0;
    let mut trial = vec![0.0; m];
    let mut u_trial = vec![0.0; m];
    while !(flatness <= settings.flat_tol && gap <= settings.energy_tol) {
        if iterations == settings.max_iter {
            return Err(Error::NotConverged {
                iterations,
                flatness,
                target: settings.flat_tol,
            });
        }
        iterations += 1;
        let fy = dot(&y, &uy);
        // backtracking on the step 1/L for f(w) = wᵀKw, ∇f = 2Kw
        loop {
            for i in 0..m {
                trial[i] = y[i] - 2.0 * uy[i] / lipschitz;
            }
            project_simplex(&mut trial);
            kernel.apply(&trial, &mut u_trial);
            let ft = dot(&trial, &u_trial);
            let mut lin = 0.0;
            let mut quad = 0.0;
            for i in 0..m {
                let d = trial[i] - y[i];
                lin += 2.0 * uy[i] * d;
                quad += d * d;
            }
            if ft <= fy + lin + 0.5 * lipschitz * quad + 1e-15 * fy.abs() {
                break;
            }
            lipschitz *= 2.0;
        }
        let f_new = dot(&trial, &u_trial);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let restart = f_new > energy;
        let beta = if restart { 0.0 } else { (t - 1.0) / t_next };
        for i in 0..m {
            y[i] = trial[i] + beta * (trial[i] - w[i]);
            uy[i] = u_trial[i] + beta * (u_trial[i] - u[i]);
        }
        t = if restart { 1.0 } else { t_next };
        std::mem::swap(&mut w, &mut trial);
        std::mem::swap(&mut u, &mut u_trial);
        energy = f_new;
        (flatness, gap) = optimality(&w, &u);
        lipschitz *= 0.9;
    }

    let measure = DiscreteMeasure::new(points, normalized(w), widths)?;
    let energy = log_energy(&measure);
    Ok(Equilibrium {
        measure,
        energy,
        flatness,
        energy_gap: gap,
        iterations,
    })
}

fn normalized(mut w: Vec<f64>) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}

/// `Cap(K) = exp(−I(μ_K))`. A single interval is answered exactly with
/// `(b − a)/4`, and a set without interior has capacity zero.
pub fn capacity(k: &IntervalUnion, settings: &EquilibriumSettings) -> Result<f64> {
    let body = k.without_points();
    match body.intervals() {
        [] => Ok(0.0),
        [(a, b)] => Ok((b - a) / 4.0),
        _ => capacity_numeric(&body, settings),
    }
}

/// Capacity through the energy minimization, also for single intervals.
pub fn capacity_numeric(k: &IntervalUnion, settings: &EquilibriumSettings) -> Result<f64> {
    Ok(equilibrium_measure(k, settings)?.capacity())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, LN_2};

    fn atoms(points: &[f64], weights: &[f64]) -> DiscreteMeasure {
        DiscreteMeasure::new(points.to_vec(), weights.to_vec(), vec![1e-6; points.len()]).unwrap()
    }

    fn arcsine(l: f64, r: f64, m: usize) -> DiscreteMeasure {
        let (x, d, w) = chebyshev_grid(&IntervalUnion::interval(l, r).unwrap(), m).unwrap();
        DiscreteMeasure::new(x, w, d).unwrap()
    }

    #[test]
    fn potentials_of_atoms() {
        assert!((log_potential(&atoms(&[0.0], &[1.0]), Complex64::new(E, 0.0)) + 1.0).abs() < 1e-15);
        assert!(log_potential(&atoms(&[-1.0, 1.0], &[0.5, 0.5]), Complex64::new(0.0, 0.0)).abs() < 1e-15);
    }

    #[test]
    fn self_cell_is_averaged() {
        // a single uniform cell of width 1 seen from its center: 1 + ln 2
        let m = DiscreteMeasure::new(vec![0.0], vec![1.0], vec![1.0]).unwrap();
        let u = log_potential(&m, Complex64::new(0.0, 0.0));
        assert!((u - (1.0 + LN_2)).abs() < 1e-14);
        // at the cell wall the segment average is 1 − log δ
        let wall = log_potential(&m, Complex64::new(0.5 - 1e-12, 0.0));
        assert!((wall - 1.0).abs() < 1e-9);
        let off_axis = log_potential(&m, Complex64::new(0.1, 1e-3));
        let on_axis = log_potential(&m, Complex64::new(0.1, 0.0));
        assert!((off_axis - on_axis).abs() < 1e-2);
    }

    #[test]
    fn uniform_cell_energy() {
        let m = DiscreteMeasure::new(vec![0.5], vec![1.0], vec![1.0]).unwrap();
        assert_eq!(log_energy(&m), 1.5);
    }

    #[test]
    fn arcsine_energies() {
        assert!(log_energy(&arcsine(-2.0, 2.0, 2000)).abs() < 0.01);
        assert!((log_energy(&arcsine(-1.0, 1.0, 2000)) - LN_2).abs() < 0.01);
        let u = log_potential(&arcsine(-1.0, 1.0, 2000), Complex64::new(0.0, 0.0));
        assert!((u - LN_2).abs() < 0.01);
    }

    #[test]
    fn rejects_bad_measures() {
        assert!(DiscreteMeasure::new(vec![0.0, 0.0], vec![0.5, 0.5], vec![1.0, 1.0]).is_err());
        assert!(DiscreteMeasure::new(vec![0.0, 1.0], vec![0.7, 0.5], vec![1.0, 1.0]).is_err());
        assert!(DiscreteMeasure::new(vec![0.0, 1.0], vec![1.5, -0.5], vec![1.0, 1.0]).is_err());
        assert!(DiscreteMeasure::new(vec![0.0], vec![1.0], vec![0.0]).is_err());
    }

    #[test]
    fn simplex_projection() {
        let mut v = vec![0.3, 0.9, -0.2];
        project_simplex(&mut v);
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(v.iter().all(|&x| x >= 0.0));
        assert!((v[0] - 0.2).abs() < 1e-15 && (v[1] - 0.8).abs() < 1e-15 && v[2] == 0.0);
    }

    #[test]
    fn grid_tiles_each_interval() {
        let k = IntervalUnion::new(vec![(-3.0, -1.0), (0.5, 0.6), (2.0, 5.0)]).unwrap();
        let (x, d, w) = chebyshev_grid(&k, 300).unwrap();
        assert!((d.iter().sum::<f64>() - k.measure()).abs() < 1e-12);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
        assert!(x.iter().all(|&p| k.contains(p)));
    }

    #[test]
    fn exact_interval_capacity() {
        let s = EquilibriumSettings::default();
        let k = IntervalUnion::interval(0.0, 4.0).unwrap();
        assert_eq!(capacity(&k, &s).unwrap(), 1.0);
        let small = IntervalUnion::interval(0.0, 1.0).unwrap();
        assert_eq!(capacity(&small, &s).unwrap(), 0.25);
        assert_eq!(
            capacity(&IntervalUnion::new(vec![(1.0, 1.0)]).unwrap(), &s).unwrap(),
            0.0
        );
    }

    #[test]
    fn solver_recovers_arcsine() {
        let k = IntervalUnion::interval(-1.0, 1.0).unwrap();
        let eq = equilibrium_measure(&k, &EquilibriumSettings::with_points(400)).unwrap();
        assert!((eq.capacity() - 0.5).abs() < 0.005);
        for (x, w, d) in eq.measure.iter() {
            let exact = ((x + 0.5 * d).min(1.0).asin() - (x - 0.5 * d).max(-1.0).asin()) / PI;
            assert!((w - exact).abs() / exact < 0.05, "x = {x}");
        }
    }

    #[test]
    fn two_symmetric_intervals() {
        let k = IntervalUnion::new(vec![(-2.0, -1.0), (1.0, 2.0)]).unwrap();
        let eq = equilibrium_measure(&k, &EquilibriumSettings::with_points(1000)).unwrap();
        let cap = eq.capacity();
        assert!((cap - 3f64.sqrt() / 2.0).abs() / cap < 0.01, "{cap}");
        assert!(eq.flatness <= 0.02);
        let c = -cap.ln();
        for &x in eq.measure.points() {
            let u = log_potential(&eq.measure, Complex64::new(x, 0.0));
            assert!((u - c).abs() <= 0.04);
        }
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let k = IntervalUnion::new(vec![(-2.0, -1.5), (0.0, 0.1), (1.0, 3.0)]).unwrap();
        let s = EquilibriumSettings {
            m_points: 200,
            max_iter: 1,
            energy_tol: 1e-12,
            ..Default::default()
        };
        match equilibrium_measure(&k, &s) {
            Err(Error::NotConverged { iterations, .. }) => assert_eq!(iterations, 1),
            other => panic!("unexpected {other:?}"),
        }
    }
}
