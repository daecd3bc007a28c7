use super::{c, tol, CMatrix, CVector};
use crate::error::{Error, Result};

/// Full singular value decomposition `m = u · diag(σ) · v†`.
///
/// `u` is `rows × rows`, `v` is `cols × cols`, and `singular_values` holds the
/// `min(rows, cols)` values in nonincreasing order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> CMatrix {
        let (r, cdim) = (self.u.nrows(), self.v.nrows());
        let mut s = CMatrix::zeros(r, cdim);
        for (i, &x) in self.singular_values.iter().enumerate() {
            s[(i, i)] = c(x, 0.0);
        }
        &self.u * s * self.v.adjoint()
    }

    pub fn nuclear_norm(&self) -> f64 {
        self.singular_values.iter().sum()
    }
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `‖U†U − I‖_max`; infinite for non-square input.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let g = u.adjoint() * u;
    max_abs(&(g - CMatrix::identity(u.nrows(), u.ncols())))
}

fn check_finite(m: &CMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

fn hermitian_deviation(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Hermitian eigendecomposition with eigenvalues ascending.
///
/// The input is symmetrized first; callers are expected to have checked
/// hermiticity to whatever tolerance they need.
pub fn eigh(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    check_finite(m)?;
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    Ok((values, vectors))
}

/// Extends orthonormal columns to a full unitary basis of the ambient space.
fn complete_basis(thin: &CMatrix) -> CMatrix {
    let n = thin.nrows();
    let mut cols: Vec<CVector> = thin.column_iter().map(|c| c.into_owned()).collect();
    while cols.len() < n {
        // pick the standard basis vector with the largest residual
        let mut best: Option<(f64, CVector)> = None;
        for k in 0..n {
            let mut v = CVector::zeros(n);
            v[k] = c(1.0, 0.0);
            for _ in 0..2 {
                for q in &cols {
                    let proj = q.dotc(&v);
                    v -= q * proj;
                }
            }
            let norm = v.norm();
            if best.as_ref().is_none_or(|(b, _)| norm > *b) {
                best = Some((norm, v));
            }
        }
        let (norm, v) = best.expect("n > 0");
        cols.push(v.unscale(norm));
    }
    CMatrix::from_columns(&cols)
}

/// One-sided (Hestenes) Jacobi SVD of a tall matrix, `rows >= cols`.
///
/// Returns the orthogonalized columns `A·V` and the accumulated rotations `V`.
fn jacobi_columns(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.ncols();
    let mut w = a.clone();
    let mut v = CMatrix::identity(n, n);
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dotc(&w.column(q));
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                // [x_p, x_q] <- [x_p, x_q] · [[c, s·e^{iφ}], [-s·e^{-iφ}, c]]
                for mat in [&mut w, &mut v] {
                    for i in 0..mat.nrows() {
                        let xp = mat[(i, p)];
                        let xq = mat[(i, q)];
                        mat[(i, p)] = xp * cs - xq * phase.conj() * sn;
                        mat[(i, q)] = xp * phase * sn + xq * cs;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (w, v)
}

/// Full complex SVD by one-sided Jacobi rotations.
pub fn svd(m: &CMatrix) -> Result<Svd> {
    check_finite(m)?;
    let (rows, cols) = m.shape();
    if rows < cols {
        let t = svd(&m.adjoint())?;
        return Ok(Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        });
    }
    if cols == 0 {
        return Ok(Svd {
            u: CMatrix::identity(rows, rows),
            singular_values: Vec::new(),
            v: CMatrix::identity(0, 0),
        });
    }
    let (w, v) = jacobi_columns(m);
    let norms: Vec<f64> = w.column_iter().map(|col| col.norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let largest = norms[order[0]];

    let mut u_cols: Vec<CVector> = Vec::with_capacity(cols);
    for &j in &order {
        // directions of numerically null columns come from basis completion
        if norms[j] <= largest * 1e-13 || norms[j] == 0.0 {
            break;
        }
        u_cols.push(w.column(j).unscale(norms[j]));
    }
    let mut thin = CMatrix::zeros(rows, u_cols.len());
    for (j, col) in u_cols.iter().enumerate() {
        thin.set_column(j, col);
    }
    let u = complete_basis(&thin);
    let v_sorted = CMatrix::from_columns(
        &order.iter().map(|&j| v.column(j).into_owned()).collect::<Vec<_>>(),
    );
    Ok(Svd {
        u,
        singular_values: order.iter().map(|&j| norms[j]).collect(),
        v: v_sorted,
    })
}

/// Principal square root of a Hermitian PSD matrix.
///
/// Eigenvalues in `[-εpsd, 0)` are clamped to zero; anything more negative
/// is rejected.
pub fn sqrtm_psd(m: &CMatrix) -> Result<CMatrix> {
    check_finite(m)?;
    let dev = hermitian_deviation(m);
    if dev > tol::HERM {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let (values, vectors) = eigh(m)?;
    if let Some(&min) = values.first() {
        if min < -tol::PSD {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
    }
    let mut scaled = vectors.clone();
    for (j, &lam) in values.iter().enumerate() {
        let s = lam.max(0.0).sqrt();
        scaled.column_mut(j).scale_mut(s);
    }
    let root = &scaled * vectors.adjoint();
    Ok((&root + root.adjoint()) * c(0.5, 0.0))
}
