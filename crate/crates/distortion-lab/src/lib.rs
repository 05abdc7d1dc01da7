//! Numerical toolkit for distortion analysis of mappings in `ℝⁿ`.
//!
//! The crate has three layers:
//!
//! * an algebra of nondecreasing growth functions on `[0, ∞]`
//!   ([`growth`]): evaluation, generalized inverses, convexity analysis,
//!   Calderón-type integrals and the slow-growth decomposition;
//! * a dilatation engine ([`field`]) that turns mappings of box domains
//!   into per-cell Jacobians and the outer dilatations `K` and `P`,
//!   plus integral functionals of those fields ([`functional`]);
//! * generators for explicit mapping sequences ([`construct`]) and
//!   numeric checkers for integral admissibility conditions
//!   ([`criteria`]), tied together by a CLI front end ([`cli`]).
//!
//! The long-form guide lives in the `book/` directory of the repository;
//! its code snippets are compiled as doc-tests through the hidden
//! [`book`] module.

pub mod construct;
pub mod criteria;
pub mod field;
pub mod functional;
pub mod growth;
pub mod linalg;
pub mod quad;
pub mod xreal;

pub mod cli;

#[doc(hidden)]
pub mod book;

pub use growth::GrowthFunction;
