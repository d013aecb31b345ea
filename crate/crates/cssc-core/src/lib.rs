//! Nielsen circuit complexity of coherent spin state (CSS) operators.
//!
//! The library computes the geodesic ("circuit") complexity of rotation
//! operators that create coherent spin states, using a right-invariant
//! metric on the space of unitaries with isotropic penalty factors.
//! Everything closed-form — the chart metrics, their diagonalising
//! coordinate transforms, the geodesics and the complexity values for
//! several driven-spin models — is backed by independent numerical
//! machinery: a finite-difference metric builder, a shooting solver for
//! the geodesic boundary-value problem, and dense exact evolution in the
//! spin-j representation.
//!
//! Module map:
//! - [`so3`] — generator algebra, rotation parametrisations, CSS states;
//! - [`metric`] — control functions, metric construction, closed forms
//!   and the polar/spherical coordinate transforms;
//! - [`geodesic`] — closed-form geodesics, conservation-law checks and
//!   the shooting oracle;
//! - [`complexity`] — every closed-form complexity expression;
//! - [`dynamics`] — frozen-spin solutions, squeezing reports and the
//!   exact dense-evolution oracle.

pub mod complexity;
pub mod dynamics;
pub mod error;
pub mod geodesic;
pub mod metric;
pub mod so3;

pub use error::{Error, Result};

/// Complex scalar used throughout the matrix representations.
pub type C64 = nalgebra::Complex<f64>;
/// Dynamically-sized complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dynamically-sized complex column vector.
pub type CVector = nalgebra::DVector<C64>;
