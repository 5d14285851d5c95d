//! Exact enumerative geometry of rational curves in projective space.
//!
//! The crate computes the Schubert degrees `N_{d,n}(a_1, …, a_k)`, the number
//! of degree-`d` rational curves in `P^n` meeting general linear subspaces of
//! codimensions `a_i`, together with the canonical degree of the
//! one-dimensional incidence families. All arithmetic is exact.
//!
//! Entry points:
//!
//! * [`Engine`] evaluates counts, section self-intersections and the
//!   boundary sums, memoizing every canonical count.
//! * [`schubert::line_count`] is the `d = 1` floor (Schubert calculus on the
//!   Grassmannian of lines).
//! * [`genera`] computes `deg K_B` for one-dimensional families.
//! * [`gw::GwOracle`] is an independent associativity-based oracle used for
//!   cross-validation.

pub mod boundary;
pub mod degrees;
pub mod error;
pub mod genera;
pub mod gw;
pub mod model;
pub mod schubert;
pub mod selfcheck;
pub mod trace;

pub use degrees::{Engine, MemoKey, MemoStore};
pub use error::{Error, Result};
pub use model::{
    canonicalize, excess_dimension, moduli_dimension, Canonical, ConditionVector, CountValue,
    Problem,
};
