//! Solver for the discrete fractional-power elliptic problem
//! `u = A^(-alpha) b` on a 2D rectangular grid.
//!
//! `A` is the 5-point finite-difference discretization of a second-order
//! elliptic operator with Dirichlet boundary conditions. Its fractional
//! inverse is represented through the operator semigroup,
//!
//! ```text
//! A^(-alpha) = 1/Gamma(alpha + p) * A^p int_0^inf theta^(alpha+p-1) e^(-theta A) dtheta,
//! ```
//!
//! and the integral is evaluated with an m-point generalized Gauss-Laguerre
//! rule matched to the weight `xi^(alpha+p-1) e^(-xi)`. The shift `p >= 0`
//! removes the integrand singularity at `theta -> 0`. The semigroup itself is
//! applied exactly through the eigenpairs of `A`, so the only error under
//! study is the quadrature error.
//!
//! Modules:
//!
//! - [`grid`]: rectangular grids, grid functions, the discrete inner product.
//! - [`operator`]: the variable-coefficient 5-point operator `A`.
//! - [`spectral`]: eigenpairs of `A`, sine/dense transforms, exact semigroup
//!   and fractional inverse.
//! - [`quadrature`]: generalized Gauss-Laguerre rules and the scalar error
//!   functional.
//! - [`solver`]: assembly of the approximate solution from the rule, in both
//!   coefficient-space and snapshot form.
//! - [`tables`]: parameter sweeps reproducing the reference accuracy tables.
//! - [`cli`]: the `fracpow` command-line frontend.
//!
//! See the crate examples for runnable entry points into each capability.

pub mod cli;
pub mod error;
pub mod grid;
pub mod operator;
pub mod quadrature;
pub mod solver;
pub mod spectral;
pub mod tables;

pub use error::{Error, Result};
pub use grid::{rhs_f1, rhs_f2, Grid2D, GridFunction};
pub use operator::{CoefficientField, EllipticOperator};
pub use quadrature::{default_kappa_samples, quad_error_study, s_exact, LaguerreRule};
pub use solver::{solution_report, solve_snapshot, solve_spectral, SolveReport, SolverConfig};
pub use spectral::{SpectralBasis, SpectralCoefficients};
pub use tables::{diff_against_reference, figure_anchors, run_table, RhsKind, SweepSpec, Table};
