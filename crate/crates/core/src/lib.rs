//! Exact computer algebra for the family of Heisenberg-invariant quartic
//! surfaces in P^3 and the 320 conics carried by their hyperplane sections.
//!
//! The toolkit is organised bottom-up:
//!
//! * [`arith`] — square classes of rationals and F_2 linear algebra on them.
//! * [`tower`] — multiquadratic field towers Q(√d_1, …, √d_n) with exact
//!   arithmetic, sign automorphisms and an in-tower square root.
//! * [`poly`] — sparse multivariate polynomials over a pluggable exact field.
//! * [`geometry`] — the parameter space: Segre cubic, its ten nodes, the
//!   sixteen degeneration forms, Kummer points and third intersections.
//! * [`groups`] — the projective symmetry group of the family (order 11520),
//!   its Heisenberg kernel of order 16, and induced permutation actions.
//! * [`conics`] — construction and verification of the 32 conics per node,
//!   320 in total, over the per-node field towers.
//! * [`galois`] — the square-class fields attached to each node, the global
//!   degree-1024 field, and its action on the conic set.
//! * [`monodromy`] — the stored sign tables, their re-derivation from the
//!   symmetry group, loop-to-class bookkeeping and floating-point loop
//!   tracking that reproduces the same permutations numerically.
//!
//! Everything except the explicit numeric tracker is exact: rationals of
//! arbitrary size, Gaussian rationals, or tower elements.

pub mod arith;
pub mod conics;
pub mod error;
pub mod galois;
pub mod gauss;
pub mod geometry;
pub mod groups;
pub mod monodromy;
pub mod parallel;
pub mod poly;
pub mod tower;

pub use error::{Error, Result};
