//! Truncated Toeplitz and Hankel operators on finite-dimensional model spaces
//! `K_u = H^2 ⊖ u H^2` generated by finite Blaschke products.
//!
//! Every operator is a dense matrix in the Takenaka-Malmquist basis of its
//! space; every pairing is an adaptive trapezoid mean on the unit circle.
//! On top of that the crate decides class membership (Toeplitz, Hankel,
//! Sedlock classes) and checks the product-closure criteria numerically.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod blaschke;
pub mod classify;
pub mod error;
pub mod harness;
pub mod json;
pub mod linalg;
pub mod modelspace;
pub mod operators;
pub mod poly;
pub mod products;
pub mod quadrature;

pub use blaschke::{ClarkData, ExtendedScalar, InnerFunction};
pub use error::{Error, Result};
pub use linalg::CMatrix;
pub use modelspace::{ConjugateLinearMap, ModelSpace, RationalSymbol, SpaceElement};
pub use operators::OperatorMatrix;
pub use quadrature::Quadrature;
