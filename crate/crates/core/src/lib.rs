//! Toeplitz quantization on flag manifolds of U(n) and SU(n).
//!
//! Module map:
//! - [`weights`]: type-A weights, Weyl dimensions, parabolic blocks, growth checks
//! - [`group`]: unitary elements, Haar and subgroup sampling, SU(2) Euler angles
//! - [`quadrature`]: Haar integration (exact SU(2) product rules, Monte Carlo)
//! - [`repr`]: orthonormal highest-weight representations
//! - [`conical`]: conical functions, Berezin kernels, multi-point kernels
//! - [`toeplitz`]: symbols and Toeplitz operators
//! - [`berezin`]: Berezin transforms, multiplicities, isotypic projections
//! - [`spectra`]: spectra, counting functions, level measures
//! - [`experiments`]: configurable experiment drivers behind the `flagq` CLI

// `!(x <= tol)` makes NaN fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod berezin;
pub mod conical;
pub mod error;
pub mod experiments;
pub mod group;
pub mod linalg;
pub mod par;
pub mod quadrature;
pub mod repr;
pub mod spectra;
pub mod toeplitz;
pub mod weights;

pub use error::{Error, Result};
