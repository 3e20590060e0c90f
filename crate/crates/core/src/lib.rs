//! Exact polyhedral toolkit for the complementarity knapsack problem
//!
//! ```text
//! max  sum c_ij x_ij
//! s.t. sum a_ij x_ij <= b,  x_ij * x_ij' = 0 within each group,  0 <= x <= 1
//! ```
//!
//! The crate generates lifted cover and pack inequalities, checks validity and
//! facet status against an exhaustive vertex oracle, separates fractional
//! points, builds partition-reduction instances, and solves instances exactly
//! with a rational-simplex branch-and-cut using SOS1 branching.
//!
//! All arithmetic is exact; [`Rational`] is the scalar everywhere.

pub mod cli;
pub mod cuts;
pub mod error;
pub mod format;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod separation;
pub mod solver;

/// Arbitrary-precision rational in lowest terms.
pub type Rational = num_rational::BigRational;

pub use error::{Error, Result};
pub use model::{Instance, LinearInequality, Point, VarRef};
