//! Exact span-dimension calculus for Minkowski products of finite sets in
//! division rings and associative algebras.
//!
//! The crate computes with linear spans of finite sets: given sets `A`, `B`
//! in an algebra over a base field, it forms the span of the pairwise
//! product set, measures dimensions exactly, and checks additive-
//! combinatorics style inequalities (Kneser, Plünnecke, Ruzsa, and their
//! relatives) on those dimensions. All arithmetic is exact; there are no
//! floating point scalars anywhere.
//!
//! Organization:
//! - [`field`], [`poly`], [`frac`]: exact base coefficient fields.
//! - [`linalg`]: canonical reduced echelon forms, kernels, subspace lattice.
//! - [`scalars`]: the ambient algebras (finite fields, extensions, rational
//!   functions, quaternions, group algebras) and their element arithmetic.
//! - [`spans`]: sets, coordinatizations, subspaces, and product spans.
//! - [`structure`]: stabilizers, periodicity, coset decompositions.
//! - [`theorems`]: the inequality checkers.
//! - [`connectivity`]: span-connectivity constants and atoms.
//! - [`groups`]: finite and finitely generated abelian groups, and the
//!   bridge from set sizes to span dimensions.

pub mod connectivity;
pub mod enumerate;
pub mod error;
pub mod field;
pub mod frac;
pub mod groups;
pub mod linalg;
pub mod poly;
pub mod scalars;
pub mod seeded;
pub mod spans;
pub mod structure;
pub mod theorems;

pub use error::{Error, Result};

/// Matrix over a prime field GF(p).
pub type GfMatrix = linalg::Matrix<field::PrimeField>;
/// Matrix over the rationals.
pub type QMatrix = linalg::Matrix<field::Rationals>;
/// Matrix over a dynamically chosen base coefficient field.
pub type KMatrix = linalg::Matrix<field::CoeffField>;
/// Polynomial over a dynamically chosen base coefficient field.
pub type KPoly = poly::Poly<field::Coeff>;
