//! Uhlmann fidelity, canonical purifications, and the maximal overlap between
//! two purifications under Alice-local unitaries.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{
    c, eigh, sqrtm_psd, svd, tol, CVector, DensityOperator, JointPureState, Operator,
    Owner, Register, RegisterLayout, C64,
};

/// Fidelity value together with its deficit `δ = 1 − F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityResult {
    pub value: f64,
    pub deficit: f64,
}

impl FidelityResult {
    pub fn from_value(value: f64) -> Self {
        FidelityResult {
            value,
            deficit: 1.0 - value,
        }
    }
}

fn same_shape(a: &DensityOperator, b: &DensityOperator) -> Result<()> {
    if a.layout().dims() != b.layout().dims() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// `F(ρ₁, ρ₀) = ‖√ρ₁ √ρ₀‖₁`.
pub fn uhlmann_fidelity(rho1: &DensityOperator, rho0: &DensityOperator) -> Result<FidelityResult> {
    same_shape(rho1, rho0)?;
    let s1 = sqrtm_psd(rho1.matrix())?;
    let s0 = sqrtm_psd(rho0.matrix())?;
    let value = svd(&(s1 * s0))?.nuclear_norm();
    Ok(FidelityResult::from_value(value))
}

/// `½‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_shape(rho, sigma)?;
    let (vals, _) = eigh(&(rho.matrix() - sigma.matrix()))?;
    Ok(0.5 * vals.iter().map(|v| v.abs()).sum::<f64>())
}

/// Purifies `rho` as `Σᵢ √λᵢ |eᵢ⟩|i⟩` with eigenvalues in nonincreasing order.
///
/// The purifying register is owned by Alice and named `purifier` (with a
/// numeric suffix if that name is taken). Its dimension equals `dim(ρ)`.
pub fn canonical_purification(rho: &DensityOperator) -> Result<JointPureState> {
    let (vals, vecs) = eigh(rho.matrix())?;
    if vals[0] < -tol::PSD {
        return Err(Error::NotPsd {
            min_eigenvalue: vals[0],
        });
    }
    let d = rho.dim();
    let mut name = String::from("purifier");
    let mut k = 1;
    while rho.layout().index_of(&name).is_ok() {
        name = format!("purifier{k}");
        k += 1;
    }
    let anc = RegisterLayout::single(name, d, Owner::Alice)?;
    let layout = rho.layout().concat(&anc)?;

    let mut amps = CVector::zeros(d * d);
    for (slot, col) in (0..d).rev().enumerate() {
        let w = vals[col].max(0.0).sqrt();
        for i in 0..d {
            amps[i * d + slot] += vecs[(i, col)] * w;
        }
    }
    JointPureState::normalized(layout, amps)
}

/// Maximal overlap over Alice-local unitaries and a unitary attaining it.
#[derive(Debug, Clone)]
pub struct PurificationOverlap {
    /// `max_U |⟨Ψ₁|(U ⊗ I)|Ψ₀⟩|`.
    pub value: f64,
    /// Maximizer, acting on Alice's registers in layout order.
    pub unitary: Operator,
}

/// Maximizes `|⟨Ψ₁|(U ⊗ I)|Ψ₀⟩|` over unitaries `U` on `alice_regs`.
///
/// With `M_b` the `alice × rest` reshape of `Ψ_b`, the overlap is
/// `tr(U·M₀M₁†)`; writing `M₀M₁† = WΣV†`, the maximum is `tr Σ` and is
/// attained at `U = V W†` with a real nonnegative overlap.
pub fn max_purification_overlap<S: AsRef<str>>(
    psi1: &JointPureState,
    psi0: &JointPureState,
    alice_regs: &[S],
) -> Result<PurificationOverlap> {
    if psi1.layout() != psi0.layout() {
        return Err(Error::LayoutMismatch(
            "purifications live on different layouts".into(),
        ));
    }
    let layout = psi0.layout();
    let alice = layout.subset(alice_regs)?;
    if alice.is_empty() || alice.len() == layout.len() {
        return Err(Error::LayoutMismatch(
            "Alice registers must be a nonempty proper subset".into(),
        ));
    }
    let names = alice.names();
    let m0 = psi0.bipartite_matrix(&names)?;
    let m1 = psi1.bipartite_matrix(&names)?;
    let cross = &m0 * m1.adjoint();
    let dec = svd(&cross)?;
    let u = &dec.v * dec.u.adjoint();
    Ok(PurificationOverlap {
        value: dec.nuclear_norm(),
        unitary: Operator::unitary(alice, u)?,
    })
}

/// `⟨Ψ₁|(U ⊗ I)|Ψ₀⟩`.
pub fn transition_amplitude(
    psi1: &JointPureState,
    op: &Operator,
    psi0: &JointPureState,
) -> Result<C64> {
    psi1.inner(&psi0.apply(op)?)
}

/// Bell-type state `Σᵢ |i⟩|i⟩/√d` on two registers of equal dimension.
pub fn maximally_entangled(a: Register, b: Register) -> Result<JointPureState> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        });
    }
    let d = a.dim;
    let layout = RegisterLayout::new(vec![a, b])?;
    let mut v = CVector::zeros(d * d);
    for i in 0..d {
        v[i * d + i] = c(1.0 / (d as f64).sqrt(), 0.0);
    }
    JointPureState::new(layout, v)
}
