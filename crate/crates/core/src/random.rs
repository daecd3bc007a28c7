//! Seeded sampling of states, unitaries, and distributions.

use rand::Rng;
use rand_distr::{Distribution as _, Exp1, StandardNormal};

use crate::hilbert::{c, CMatrix, CVector, JointPureState, RegisterLayout, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(re, im)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of R's
/// diagonal divided out.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = random_matrix(dim, dim, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        let col = q.column(j) * phase;
        q.set_column(j, &col);
    }
    q
}

/// Haar-random pure state on `layout`.
pub fn random_state<R: Rng + ?Sized>(layout: &RegisterLayout, rng: &mut R) -> JointPureState {
    let d = layout.total_dim();
    let v = CVector::from_fn(d, |_, _| gaussian(rng));
    JointPureState::normalized(layout.clone(), v).expect("gaussian vector is nonzero")
}

/// Random full-rank density matrix `GG†/tr(GG†)`.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = random_matrix(dim, dim, rng);
    let rho = &g * g.adjoint();
    let t = rho.trace().re;
    rho.unscale(t)
}

/// Uniform sample from the probability simplex (flat Dirichlet), drawn as
/// normalized unit exponentials.
pub fn sample_simplex<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<f64> {
    let draws: Vec<f64> = (0..m).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|x| x / total).collect()
}
