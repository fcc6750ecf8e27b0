//! Growth-rate analysis of a two-dimensional stochastic max-plus linear
//! system whose transition matrix is diagonal with independent exponential
//! entries (rates `mu` and `nu`) and zero off-diagonal entries.
//!
//! The state recursion is `z(k) = A(k) ⊗ z(k-1)` in the max-plus semiring,
//! with `z(0) = (0, 0)`. Three mutually cross-validating computation paths
//! are provided:
//!
//! * [`analytic`] — exact closed forms: the coefficient recursion for the
//!   CDF of the component difference `Y(k) = y(k) - x(k)`, its stationary
//!   limit, the limiting increment distribution `Phi` with density `phi`,
//!   and the closed-form mean growth rate `lambda`.
//! * [`fixedpoint`] — an ansatz-free grid solver for the same integral
//!   recursion, tabulating the CDF on a uniform grid and extracting
//!   `lambda` by quadrature.
//! * [`montecarlo`] — seeded, reproducible simulation of the recursion with
//!   per-trial independent random streams, growth-rate estimates with
//!   standard errors, and Kolmogorov-Smirnov comparison against the
//!   analytic distributions.
//!
//! The max-plus primitives live in [`maxplus`]; the command-line front end
//! is in [`cli`] (binary `maxplus-growth`). See the crate `examples/`
//! directory for one runnable example per capability.

pub mod analytic;
pub mod cli;
mod error;
pub mod fixedpoint;
pub mod maxplus;
pub mod montecarlo;

pub use error::{Error, Result};
