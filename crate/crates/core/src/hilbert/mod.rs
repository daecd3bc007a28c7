//! Dense complex linear algebra over labeled register layouts.
//!
//! Amplitudes are stored register-major: the first register in a layout is
//! the slowest-varying index of the flat vector.

mod layout;
mod linalg;
mod operator;
mod state;

pub use layout::{Owner, Register, RegisterLayout};
pub use linalg::{eigh, max_abs, sqrtm_psd, svd, unitarity_deviation, Svd};
pub use operator::Operator;
pub use state::{partial_trace, DensityOperator, JointPureState, PartialTrace, Tensor};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Numerical tolerances shared by the whole crate.
pub mod tol {
    pub const NORM: f64 = 1e-10;
    pub const HERM: f64 = 1e-10;
    pub const UNIT: f64 = 1e-9;
    pub const SVD: f64 = 1e-9;
    pub const PSD: f64 = 1e-10;
    pub const SQRT: f64 = 1e-9;
    /// Hard cap on the joint Hilbert-space dimension.
    pub const MAX_JOINT_DIM: usize = 4096;
}

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
