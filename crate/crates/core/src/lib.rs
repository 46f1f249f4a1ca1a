//! Hyperbolic fillings of finite metric measure spaces, weak-type sequence norms and
//! the boundary Sobolev seminorms they induce, plus grid experiments on the upper
//! half-space.

pub mod error;
pub mod euclidean;
pub mod filling;
pub mod metric_space;
pub mod seq_norms;
pub mod sobolev;
pub mod transfer;

pub use error::{Error, Result};
