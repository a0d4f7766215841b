//! Bergman-ball geometry for nearly spherical domains in `C^2` and a
//! numerical verifier for their quantitative isoperimetric inequality.

// `!(x < y)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ball_geometry;
pub mod barycenter;
pub mod cli;
pub mod domain;
pub mod error;
pub mod fuglede;
pub mod hopf_sphere;

pub use error::{Error, Result};
