//! Fourier interpolation bases built from modular integrals for the theta group.

pub mod acceptance;
pub mod alpha_coeffs;
pub mod analytic_nt;
pub mod dirichlet_kernels;
pub mod domain_stats;
pub mod error;
pub mod interp_engine;
pub mod kernel_forms;
pub mod modforms;
pub mod modint;
pub mod qseries;
pub mod quad;
pub mod rv_basis;

pub use error::{Result, ZiError};
pub use num_complex::Complex64 as C;
