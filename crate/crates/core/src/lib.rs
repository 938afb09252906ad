//! Numerical workbench for a Hermitian time operator `t = (hbar m / i p^2) d/dx`.
//!
//! Operators are realized as dense matrices on uniform 1D grids (periodic or
//! closed with vanishing ghost points) and as truncated number-basis matrices
//! for the harmonic oscillator. The [`experiment`] module wires them into
//! reproducible experiments with CSV/JSON reports.

pub mod canonical;
pub mod error;
pub mod experiment;
pub mod fock;
pub mod grid;
pub mod matrix;
pub mod operator;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
