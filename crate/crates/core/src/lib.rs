//! Exponential Taylor expansions.
//!
//! For a smooth function `a` and a nonzero complex `λ`, the operators
//! `D^{λ,(0)} = Id`, `D^{λ,(j+1)} = (λ^{-1} d/dx - j) D^{λ,(j)}` give the
//! expansion
//!
//! ```text
//! a(x) = Σ_{j<N} D^{λ,(j)}a(x0) / j! · (e^{λ(x-x0)} - 1)^j + R_N(x, x0)
//! ```
//!
//! with an explicit integral remainder. This crate computes the operator
//! values, partial sums, remainders and their bounds, convergence diagnostics,
//! and the multivariate version over multi-indices.

pub mod error;
pub mod expr;
pub mod identities;
pub mod jet;
pub mod multi_index;
pub mod operator;
pub mod quadrature;
pub mod series1d;
pub mod seriesnd;
pub mod stirling;

pub use error::{Error, Result};
pub use expr::{parse, ExprAst};
pub use multi_index::MultiIndex;
