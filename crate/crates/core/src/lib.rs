//! Exact-rational laboratory for k-sparse closures of polytopes.
//!
//! The k-sparse closure `P^k` of a polytope `P ⊆ ℝⁿ` is the intersection of
//! all valid inequalities with at most `k` nonzero coefficients, equivalently
//! `⋂_{|I|=k} (P + ℝ^Ī)` where `ℝ^Ī` frees every coordinate outside `I`.
//! The crate builds `P^k` exactly, measures `dist(P, P^k)` and its
//! directional lower bounds, generates the standard instance families, and
//! evaluates the associated upper/lower bound formulas and probabilistic
//! checks.

pub mod bounds;
pub mod closure;
pub mod distance;
pub mod error;
pub mod extform;
pub mod instances;
pub mod kernel;
pub mod lab;
pub mod lp;
pub mod rat;
pub mod rng;
pub mod sparsify;
pub mod surd;

pub use error::{Error, Result};
pub use kernel::{Constraint, HRep, VRep};
pub use rat::{Rat, RatVec};
