//! Structure-preserving time integrators for the fourth-order DLSS quantum
//! diffusion equation on the one-dimensional unit torus.
//!
//! The crate provides
//!
//! * [`grid`]: the periodic grid, grid functions and finite-difference operators,
//! * [`functionals`]: discrete entropies, the discrete Fisher information and
//!   related constants,
//! * [`bdf`]: backward differentiation formulas and trajectory histories,
//! * [`newton`]: a damped Newton solver with finite-difference Jacobians,
//! * [`fd_scheme`]: the BDF2 central finite-difference scheme,
//! * [`dvd`]: the discrete variational derivative schemes of order 1 to 3,
//! * [`experiments`]: simulation driver, decay fits, convergence studies and CSV output,
//! * [`cli`] and [`selfcheck`]: the command-line front end.

pub mod bdf;
pub mod cli;
pub mod dvd;
pub mod error;
pub mod experiments;
pub mod fd_scheme;
pub mod functionals;
pub mod grid;
pub mod newton;
pub mod selfcheck;

pub use error::{Error, Result};
pub use grid::{GridFunction, InitialProfile, PeriodicGrid1D};
