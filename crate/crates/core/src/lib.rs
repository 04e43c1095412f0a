#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Numerical toolkit for ergodic Jacobi operators: transfer-matrix Lyapunov
//! exponents, density of states, spectra of finite sections and periodic
//! approximants, logarithmic potential theory on interval unions, and checks
//! of the spectral bounds that tie these quantities together.

pub mod bounds;
pub mod cocycle;
pub mod contfrac;
pub mod error;
pub mod intervals;
pub mod io;
pub mod models;
pub mod potential;
pub mod spectrum;

pub use error::{Error, Result};
