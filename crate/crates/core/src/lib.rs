//! Combinatorial encoding of closed 4-dimensional non-singular graph-manifolds.
//!
//! A graph-manifold is assembled from *blocks* (T²-bundles over compact
//! surfaces with boundary of negative Euler characteristic) glued along their
//! boundary torus bundles over the circle. This crate provides:
//!
//! * [`gl2z`]: exact GL(2,Z)/SL(2,Z) arithmetic, conjugacy classification and
//!   conjugacy witnesses;
//! * [`meyer`]: the Meyer cocycle, the Meyer function Ψ and signatures;
//! * [`bundles`]: surfaces, monodromy representations, blocks, π₁ of torus
//!   bundles over the circle, glueing isomorphisms and fibration criteria;
//! * [`assembly`]: whole structures, reducedness, reduction, invariants and
//!   bounded isomorphism search;
//! * [`manifest`]: the `.gm` text format.

pub mod assembly;
pub mod bundles;
pub mod gl2z;
pub mod intlin;
pub mod manifest;
pub mod meyer;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
