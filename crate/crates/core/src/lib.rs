//! Local activity and passivity of linear port systems `x' = A x + P u`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::assign_op_pattern)]

pub mod activity;
pub mod complexity;
pub mod error;
pub mod genericity;
pub mod linsys;
pub mod nonlinear;
pub mod quadrature;
pub mod scalar;
pub mod serde_ext;
pub mod signals;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Matrix64 = linsys::Matrix<f64>;
pub type System = linsys::LinearPortSystem<f64>;
pub type Signal64 = signals::Signal<f64>;
pub type Trajectory64 = linsys::Trajectory<f64>;
