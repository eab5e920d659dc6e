//! Fermionic signature operators on two-dimensional globally hyperbolic
//! domains: construction, spectra, trace formulas and inverse problems.

pub mod cli;
pub mod dirac;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod inverse;
pub mod quad;
pub mod rng;
pub mod sigop;
pub mod spectral;

pub use error::{Error, Result};
