//! Green's function, Lyapunov-type inequality and numerical cross-checks for
//! the Dirichlet problem
//!
//! ```text
//! D^sigma x(t) + D^kappa (q x)(t) = 0,  t1 < t < t2,  x(t1) = x(t2) = 0
//! ```
//!
//! built from left-sided Hadamard fractional operators, with
//! `1 < sigma <= 2` and `0 < kappa < sigma - 1`.

// `!(x > y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod bounds;
pub mod cli;
pub mod coefficient;
pub mod error;
pub mod fredholm;
pub mod green;
pub mod hadamard;
pub mod params;
pub mod quadrature;
pub mod report;
pub mod selftest;
pub mod special;

pub use coefficient::{eval_coefficient, parse_expr, Coefficient, ExprNode, Table};
pub use error::{Error, Result};
pub use params::{validate, FracParams, Verdict, VerdictKind};
