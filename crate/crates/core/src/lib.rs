//! Elliptic Selberg integrals, conformal blocks of the KZB heat equation and
//! mechanical checks of the theta-function identities they satisfy.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blocks;
pub mod error;
pub mod gamma;
pub mod macdonald;
pub mod qseries;
pub mod quadrature;
pub mod selberg;
pub mod specfun;
pub mod suite;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
