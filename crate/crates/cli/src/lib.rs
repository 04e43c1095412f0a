#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Command-line driver: reads a JSON run configuration, computes the
//! requested quantities and writes CSV/JSON artifacts.

pub mod config;
pub mod run;

pub use config::RunConfig;
pub use run::{run, Command, Outcome};
