//! Independent reference computations whose results are frozen as constants
//! in the acceptance suite. They are slow, so they only run on request:
//! `cargo test -p ergodic-jacobi --test oracles -- --ignored --nocapture`.

use nalgebra::{DMatrix, DVector};

/// Capacity of `[-2,-1] ∪ [1,2]` from a uniform grid of `m` cells and a
/// direct solve of the discrete Frostman system `K w = V 1`, `Σ w = 1`.
/// Mirror symmetry halves the system: only the right interval is unknown.
fn two_interval_capacity(m: usize) -> f64 {
    let half = m / 2;
    let delta = 1.0 / half as f64;
    let x: Vec<f64> = (0..half).map(|i| 1.0 + (i as f64 + 0.5) * delta).collect();
    let kernel = |d: f64| -d.abs().ln();
    let k = DMatrix::from_fn(half, half, |i, j| {
        let mirror = kernel(x[i] + x[j]);
        let direct = if i == j { 1.5 - delta.ln() } else { kernel(x[i] - x[j]) };
        direct + mirror
    });
    // w = K⁻¹1 / (1ᵀK⁻¹1) on the full grid; each half carries its mirror image
    let v = k.lu().solve(&DVector::from_element(half, 1.0)).expect("nonsingular");
    let total = 2.0 * v.sum();
    let energy = 1.0 / total;
    assert!(v.iter().all(|&w| w > 0.0), "Frostman solution must be positive");
    (-energy).exp()
}

#[test]
#[ignore]
fn two_interval_reference() {
    for m in [2000, 4000, 8000] {
        println!("m = {m}: capacity = {:.12}", two_interval_capacity(m));
    }
}

#[test]
fn two_interval_reference_coarse() {
    // cheap version of the above, against the value known in closed form
    let cap = two_interval_capacity(800);
    assert!((cap - 3f64.sqrt() / 2.0).abs() < 5e-3, "{cap}");
}
