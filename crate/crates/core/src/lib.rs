//! Padé approximants of deterministic and random power series.
//!
//! The crate builds the Toeplitz systems that define an `[m,n]` Padé pair,
//! solves them with pivoted LU, locates the zeros of the resulting
//! polynomials with a simultaneous (Aberth–Ehrlich) iteration, and measures
//! how tightly those zeros cluster around a circle. The [`experiments`]
//! module wires these pieces into reproducible Monte Carlo protocols.

pub mod cluster;
pub mod error;
pub mod experiments;
pub mod pade;
pub mod poly;
pub mod sampler;
pub mod stats;
pub mod toeplitz;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use poly::{ComplexPolynomial, Precision, RootOptions, RootSet};
