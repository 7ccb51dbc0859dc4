//! Koopman analysis of the viscous Burgers flow on `[0, 1]`.
//!
//! The Burgers equation `u_t = -u u_x + u_xx` with homogeneous Dirichlet data is
//! conjugated to the Neumann heat equation by the Cole-Hopf pair. Expanding the
//! Cole map around the constant heat state gives a closed-form Koopman series
//!
//! ```text
//! u(t, x) = sum_nu  exp(lambda_nu t) * phi_nu(u0) * a_nu(x)
//! ```
//!
//! indexed by multi-indices `nu = (n0, n1, ..., n_alpha)`. This crate evaluates
//! every piece of that series, checks it against an independent finite
//! difference solver, and compares its spectrum with exact DMD.
//!
//! Modules:
//! - [`grid`]: uniform mesh, quadrature, finite differences, cosine basis.
//! - [`colehopf`]: the transforms `H` and `C`, region and estimate checks.
//! - [`heatflow`]: cosine-series heat states and the exact heat propagator.
//! - [`koopman`]: multi-indices, eigenvalues, modes, eigenfunctionals, series.
//! - [`oracle`]: semi-implicit finite difference Burgers solver.
//! - [`dmd`]: snapshot matrices and SVD-based exact DMD.

pub mod colehopf;
pub mod dmd;
pub mod error;
pub mod grid;
pub mod heatflow;
pub mod koopman;
pub mod oracle;

pub use error::{Error, Result};
pub use grid::{GridFunction, Mesh};
pub use heatflow::CosineSeries;
pub use koopman::{Decomposition, MultiIndex};
