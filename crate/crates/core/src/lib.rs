//! Explicit eigenvalue bounds and Galerkin spectra for transfer operators
//! `L f = sum_i w_i * (f o T_i)` with holomorphic data on a ball in `C^d`.
//!
//! - [`hardy_basis`]: multi-indices, the orthonormal monomial basis of the
//!   Hardy space `H^2(B_1)` and its reproducing kernel.
//! - [`bounds`]: approximation-number bounds, the Weyl geometric-mean bound,
//!   and the closed-form eigenvalue bounds in every dimension.
//! - [`operator`]: branch families, the Gauss map operator, estimation of
//!   the constants `W` and `r`.
//! - [`galerkin`]: the truncated matrix of `L` in the monomial basis (d = 1).
//! - [`spectrum`]: ordered eigenvalues, singular values, Weyl checks and
//!   convergence studies.
//! - [`report`]: run configuration, the `bounds`/`spectrum`/`verify`/`converge`
//!   commands and their CSV/JSON output.

pub mod bounds;
pub mod error;
pub mod galerkin;
pub mod hardy_basis;
pub mod operator;
pub mod report;
pub mod spectrum;

pub use error::{Error, Result};
