//! Discretization substrate shared by every other module.

pub(crate) mod dense;
mod field;
mod grid;
pub mod krylov;
mod lowrank;
pub(crate) mod spectral;

pub use dense::{DenseOperator, OperatorNorms};
pub use field::{apply_kinetic, inner, ComplexField, ScaledParams};
pub use grid::{Grid, DENSE_SIDE_CAP, FIELD_SITE_CAP};
pub use lowrank::LowRankOperator;
pub use spectral::{fft_axes, ifft_axes};
