use super::{tol, unitarity_deviation, CMatrix, RegisterLayout};
use crate::error::{Error, Result};

/// Linear operator on the registers of `layout`.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    layout: RegisterLayout,
    matrix: CMatrix,
    unitary: bool,
}

impl Operator {
    pub fn new(layout: RegisterLayout, matrix: CMatrix) -> Result<Self> {
        let dim = layout.total_dim();
        if matrix.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Operator {
            layout,
            matrix,
            unitary: false,
        })
    }

    /// Builds an operator and checks `‖U†U − I‖_max ≤ εunit`.
    pub fn unitary(layout: RegisterLayout, matrix: CMatrix) -> Result<Self> {
        let mut op = Self::new(layout, matrix)?;
        let dev = unitarity_deviation(&op.matrix);
        if dev > tol::UNIT {
            return Err(Error::NotUnitary { deviation: dev });
        }
        op.unitary = true;
        Ok(op)
    }

    pub fn identity(layout: RegisterLayout) -> Self {
        let d = layout.total_dim();
        Operator {
            layout,
            matrix: CMatrix::identity(d, d),
            unitary: true,
        }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Operator {
            layout: self.layout.clone(),
            matrix: self.matrix.adjoint(),
            unitary: self.unitary,
        }
    }

    /// Fails unless the unitarity flag is set and still holds numerically.
    pub fn ensure_unitary(&self) -> Result<()> {
        let dev = unitarity_deviation(&self.matrix);
        if !self.unitary || dev > tol::UNIT {
            return Err(Error::NotUnitary { deviation: dev });
        }
        Ok(())
    }
}
