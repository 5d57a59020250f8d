//! Algebra on third-order hypermatrices: the ternary product and its
//! transposes, orthogonality, symmetrization SVD, maps, block operations and
//! orbit counting over prime fields.

pub mod block_ops;
pub mod bm_algebra;
pub mod cli_io;
pub mod error;
pub mod hypermatrix_core;
pub mod linalg;
pub mod maps_actions;
pub mod orbits;
pub mod orthogonal_gen;
pub mod symmetrization_svd;

pub use error::{BmxError, Result};
pub use hypermatrix_core::{Hypermatrix3, Matrix, C64};
