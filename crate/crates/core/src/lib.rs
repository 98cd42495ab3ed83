//! Multistable steady states, hysteresis sweeps and weak-probe transmission
//! spectra for one or two Kerr-nonlinear YIG spheres coupled to a driven
//! single-mode microwave cavity.

// `!(x >= 0.0)` style guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod model;
pub mod output;
pub mod poly;
pub mod probe;
pub mod roots;
pub mod steady;
pub mod sweep;

pub use error::{Error, Result};
