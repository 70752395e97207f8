//! Kaleidoscope (BB*) matrices and the arithmetic-circuit machinery around
//! them: circuit evaluation and reverse-mode differentiation, transposition,
//! compilation of linear circuits into sparse products and K-matrices, Beneš
//! routing, and gradient-descent fitting of K-matrix parameters.
//!
//! Every structured representation can be densified, and the dense forms in
//! [`numfield`] act as the reference for all of them.

pub mod autodiff;
pub mod butterfly;
pub mod circuit;
pub mod compile;
pub mod error;
pub mod format;
pub mod kfactor;
pub mod numfield;
pub mod trainer;

pub use circuit::{Circuit, Gate};
pub use error::{Error, Result};
pub use numfield::{DenseMatrix, Scalar, SparseMatrix};
