// Guards such as `!(x > 0.0)` are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod grid;
pub mod harness;
pub mod nonlinearity;
pub mod pfunction;
pub mod quadrature;
pub mod solvers;

pub use error::{Error, Result};
