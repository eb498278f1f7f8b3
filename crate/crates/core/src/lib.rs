//! Numerical toolkit for the fractional g-Laplacian: Young-function calculus,
//! grid discretizations of the nonlocal operator and its modular energy, a
//! constrained eigen-solver, a semilinear solver, and the De Giorgi
//! truncation diagnostic.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod degiorgi;
mod descent;
pub mod eigen;
pub mod error;
pub mod grid;
pub mod interp;
pub mod operator;
pub mod parallel;
pub mod quadrature;
pub mod reference;
pub mod regularity;
mod roots;
pub mod semilinear;
pub mod young;

pub use degiorgi::{check_recursive_bound, degiorgi_trace, DeGiorgiTrace, TraceScaling};
pub use descent::{Preconditioner, AUTO_DENSE_LIMIT};
pub use eigen::{solve_eigen, EigenOptions, EigenResult};
pub use error::{Error, Result};
pub use grid::{DiscreteFunction, Grid, GridSpec};
pub use operator::{NonlocalOperator, OperatorParams};
pub use parallel::Execution;
pub use semilinear::{solve_semilinear, SemilinearOptions, SemilinearRhs, Source};
pub use young::{Provenance, WeightedSamples, YoungDescriptor, YoungFunction};
