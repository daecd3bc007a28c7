use super::{c, eigh, max_abs, tol, CMatrix, CVector, Operator, RegisterLayout, C64};
use crate::error::{Error, Result};

/// Normalized pure state over a register layout.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPureState {
    layout: RegisterLayout,
    amplitudes: CVector,
}

/// Hermitian, PSD, unit-trace operator over the retained registers.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    layout: RegisterLayout,
    matrix: CMatrix,
}

/// Kronecker composition respecting register order.
pub trait Tensor: Sized {
    fn tensor(&self, other: &Self) -> Result<Self>;
}

/// Reduction to a subset of registers.
pub trait PartialTrace {
    fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityOperator>;
}

pub fn partial_trace<T: PartialTrace, S: AsRef<str>>(s: &T, keep: &[S]) -> Result<DensityOperator> {
    s.partial_trace(keep)
}

fn check_len(layout: &RegisterLayout, len: usize) -> Result<()> {
    if layout.total_dim() != len {
        return Err(Error::DimensionMismatch {
            expected: layout.total_dim(),
            found: len,
        });
    }
    Ok(())
}

impl JointPureState {
    pub fn new(layout: RegisterLayout, amplitudes: CVector) -> Result<Self> {
        check_len(&layout, amplitudes.len())?;
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > tol::NORM {
            return Err(Error::NotNormalized { norm });
        }
        Ok(JointPureState { layout, amplitudes })
    }

    /// Normalizes `amplitudes` before wrapping them.
    pub fn normalized(layout: RegisterLayout, amplitudes: CVector) -> Result<Self> {
        check_len(&layout, amplitudes.len())?;
        let norm = amplitudes.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(layout, amplitudes.unscale(norm))
    }

    pub fn basis(layout: RegisterLayout, index: usize) -> Result<Self> {
        let d = layout.total_dim();
        if index >= d {
            return Err(Error::OutOfRange(format!("basis index {index} >= {d}")));
        }
        let mut v = CVector::zeros(d);
        v[index] = c(1.0, 0.0);
        Ok(JointPureState {
            layout,
            amplitudes: v,
        })
    }

    pub(crate) fn from_trusted(layout: RegisterLayout, amplitudes: CVector) -> Self {
        debug_assert_eq!(layout.total_dim(), amplitudes.len());
        JointPureState { layout, amplitudes }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &JointPureState) -> Result<C64> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch(format!(
                "{:?} vs {:?}",
                self.layout.names(),
                other.layout.names()
            )));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `min_θ ‖self − e^{iθ} other‖`.
    pub fn phase_distance(&self, other: &JointPureState) -> Result<f64> {
        let ov = self.inner(other)?.norm();
        Ok((2.0 - 2.0 * ov).max(0.0).sqrt())
    }

    /// Matrix with the registers `rows` (in the given order) as row index and
    /// the remaining registers (layout order) as column index.
    pub fn bipartite_matrix<S: AsRef<str>>(&self, rows: &[S]) -> Result<CMatrix> {
        let idx = self.layout.resolve(rows)?;
        let (r, k, map) = self.layout.bipartition(&idx);
        let mut m = CMatrix::zeros(r, k);
        for (flat, &(i, j)) in map.iter().enumerate() {
            m[(i, j)] = self.amplitudes[flat];
        }
        Ok(m)
    }

    fn unflatten_bipartite(&self, rows: &[usize], m: &CMatrix) -> CVector {
        let (_, _, map) = self.layout.bipartition(rows);
        CVector::from_iterator(map.len(), map.iter().map(|&(i, j)| m[(i, j)]))
    }

    /// `(op ⊗ I)|self⟩` for a unitary `op` on a subset of the registers.
    pub fn apply(&self, op: &Operator) -> Result<JointPureState> {
        op.ensure_unitary()?;
        let names = op.layout().names();
        let idx = self.layout.resolve(&names)?;
        for (reg, &i) in op.layout().registers().iter().zip(&idx) {
            let here = &self.layout.registers()[i];
            if here.dim != reg.dim {
                return Err(Error::DimensionMismatch {
                    expected: here.dim,
                    found: reg.dim,
                });
            }
        }
        let m = self.bipartite_matrix(&names)?;
        let out = op.matrix() * m;
        Ok(JointPureState::from_trusted(
            self.layout.clone(),
            self.unflatten_bipartite(&idx, &out),
        ))
    }

    /// `|self⟩⟨self|`.
    pub fn density(&self) -> DensityOperator {
        DensityOperator::from_trusted(
            self.layout.clone(),
            &self.amplitudes * self.amplitudes.adjoint(),
        )
    }

    /// Projects register `name` onto basis state `outcome`.
    ///
    /// Returns the outcome probability and the renormalized state on the
    /// remaining registers.
    pub fn condition_on(&self, name: &str, outcome: usize) -> Result<(f64, JointPureState)> {
        let reg = self.layout.get(name)?;
        if outcome >= reg.dim {
            return Err(Error::OutOfRange(format!(
                "outcome {outcome} on register `{name}` of dim {}",
                reg.dim
            )));
        }
        let rest = self.layout.complement(&[name])?;
        let m = self.bipartite_matrix(&[name])?;
        let row = m.row(outcome).transpose();
        let prob = row.norm_squared();
        if prob < 1e-24 {
            return Err(Error::ZeroProbability { index: outcome });
        }
        let state = JointPureState::from_trusted(rest, row.unscale(prob.sqrt()));
        Ok((prob, state))
    }
}

impl Tensor for JointPureState {
    fn tensor(&self, other: &Self) -> Result<Self> {
        let layout = self.layout.concat(&other.layout)?;
        Ok(JointPureState::from_trusted(
            layout,
            self.amplitudes.kronecker(&other.amplitudes),
        ))
    }
}

impl Tensor for Operator {
    fn tensor(&self, other: &Self) -> Result<Self> {
        let layout = self.layout().concat(other.layout())?;
        let m = self.matrix().kronecker(other.matrix());
        if self.is_unitary() && other.is_unitary() {
            Operator::unitary(layout, m)
        } else {
            Operator::new(layout, m)
        }
    }
}

impl PartialTrace for JointPureState {
    fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityOperator> {
        if keep.is_empty() {
            return Err(Error::OutOfRange("partial trace keeps no register".into()));
        }
        let kept = self.layout.subset(keep)?;
        let names = kept.names();
        let m = self.bipartite_matrix(&names)?;
        Ok(DensityOperator::from_trusted(kept.clone(), &m * m.adjoint()))
    }
}

impl DensityOperator {
    pub fn new(layout: RegisterLayout, matrix: CMatrix) -> Result<Self> {
        let d = layout.total_dim();
        if matrix.shape() != (d, d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let dev = max_abs(&(&matrix - matrix.adjoint()));
        if dev > tol::HERM {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > tol::NORM {
            return Err(Error::BadTrace { trace });
        }
        let (vals, _) = eigh(&matrix)?;
        if vals[0] < -tol::PSD {
            return Err(Error::NotPsd {
                min_eigenvalue: vals[0],
            });
        }
        Ok(DensityOperator { layout, matrix })
    }

    /// Wraps a matrix known to be a density operator, symmetrizing roundoff.
    pub(crate) fn from_trusted(layout: RegisterLayout, matrix: CMatrix) -> Self {
        let matrix = (&matrix + matrix.adjoint()) * c(0.5, 0.0);
        DensityOperator { layout, matrix }
    }

    pub fn maximally_mixed(layout: RegisterLayout) -> Self {
        let d = layout.total_dim();
        let matrix = CMatrix::identity(d, d) * c(1.0 / d as f64, 0.0);
        DensityOperator { layout, matrix }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Eigenvalues, ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        eigh(&self.matrix).map(|(v, _)| v).unwrap_or_default()
    }
}

impl PartialTrace for DensityOperator {
    fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityOperator> {
        if keep.is_empty() {
            return Err(Error::OutOfRange("partial trace keeps no register".into()));
        }
        let kept = self.layout.subset(keep)?;
        let idx = self.layout.resolve(&kept.names())?;
        let (r, k, map) = self.layout.bipartition(&idx);
        let mut flat_of = vec![vec![0usize; k]; r];
        for (flat, &(i, j)) in map.iter().enumerate() {
            flat_of[i][j] = flat;
        }
        let mut out = CMatrix::zeros(r, r);
        for i in 0..r {
            for i2 in 0..r {
                let mut acc = c(0.0, 0.0);
                for (&a, &b) in flat_of[i].iter().zip(&flat_of[i2]) {
                    acc += self.matrix[(a, b)];
                }
                out[(i, i2)] = acc;
            }
        }
        Ok(DensityOperator::from_trusted(kept, out))
    }
}
