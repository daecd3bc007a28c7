//! Alice's cheating unitaries: the per-distribution optimum `U_A(ω)` and the
//! distribution-independent `U'_A` obtained from the uniform purification over
//! the point-mass distributions, together with the quantities bounding its
//! success probability.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fidelity::{
    max_purification_overlap, transition_amplitude, uhlmann_fidelity, FidelityResult,
};
use crate::hilbert::{c, CVector, JointPureState, Operator, Owner, PartialTrace, C64};
use crate::protocol::{Bit, Distribution, MetaPurification, ProtocolInstance, ALICE, BOB, XI};

/// Below this `δ'` an instance is treated as perfectly concealing.
pub const PERFECT_THRESHOLD: f64 = 1e-12;
/// Slack on the algebraic identities `δ' = mean(α)` and `Σβ = 0`.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Slack on the success-probability bounds.
pub const BOUND_TOL: f64 = 1e-9;

/// The point-mass distributions `ω*_1 … ω*_m`.
#[derive(Debug, Clone)]
pub struct ExtremeSet {
    members: Vec<Distribution>,
}

impl ExtremeSet {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::OutOfRange("extreme set needs m >= 1".into()));
        }
        let members = (0..m)
            .map(|j| Distribution::point_mass(m, j))
            .collect::<Result<_>>()?;
        Ok(ExtremeSet { members })
    }

    pub fn m(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[Distribution] {
        &self.members
    }
}

fn check_len(p: &ProtocolInstance, omega: &Distribution) -> Result<()> {
    if omega.len() != p.m() {
        return Err(Error::LengthMismatch {
            expected: p.m(),
            found: omega.len(),
        });
    }
    Ok(())
}

/// `|Ψ^(b)(ω)⟩ = Σ_j √q_j (I ⊗ V_j)|φ^(b)⟩ ⊗ |ξ_j⟩` on `A ⊗ B ⊗ ξ`.
pub fn committed_state(p: &ProtocolInstance, b: Bit, omega: &Distribution) -> Result<JointPureState> {
    check_len(p, omega)?;
    let m = p.m();
    let layout = p.committed_layout()?;
    let mut amps = CVector::zeros(layout.total_dim());
    for (j, v) in p.actions().iter().enumerate() {
        let w = omega.amplitude(j);
        if w == 0.0 {
            continue;
        }
        let acted = p.phi(b).apply(v)?;
        for (i, z) in acted.amplitudes().iter().enumerate() {
            amps[i * m + j] = z * w;
        }
    }
    JointPureState::normalized(layout, amps)
}

fn bob_side(s: &JointPureState) -> Result<crate::hilbert::DensityOperator> {
    s.partial_trace(&[BOB, XI])
}

/// Fidelity between Bob's views `ρ^(1)_{Bξ}(ω)` and `ρ^(0)_{Bξ}(ω)`; its
/// deficit is the protocol's `δ` at `ω`.
pub fn concealment_deficit(p: &ProtocolInstance, omega: &Distribution) -> Result<FidelityResult> {
    let rho0 = bob_side(&committed_state(p, Bit::Zero, omega)?)?;
    let rho1 = bob_side(&committed_state(p, Bit::One, omega)?)?;
    uhlmann_fidelity(&rho1, &rho0)
}

/// The ω-specific optimal cheating unitary and its overlap `1 − δ(ω)`.
pub fn optimal_cheat(p: &ProtocolInstance, omega: &Distribution) -> Result<(Operator, f64)> {
    let psi0 = committed_state(p, Bit::Zero, omega)?;
    let psi1 = committed_state(p, Bit::One, omega)?;
    let o = max_purification_overlap(&psi1, &psi0, &[ALICE])?;
    Ok((o.unitary, o.value))
}

/// `|Ψ'^(b)⟩ = (1/√m) Σ_j |Ψ^(b)(ω*_j)⟩|ξ_j⟩`.
///
/// `|Ψ^(b)(ω*_j)⟩` already carries `|ξ_j⟩` on its ξ register, so that
/// register doubles as the label of the extreme point.
pub fn uniform_purification(p: &ProtocolInstance, b: Bit) -> Result<JointPureState> {
    let extremes = ExtremeSet::new(p.m())?;
    let layout = p.committed_layout()?;
    let scale = c(1.0 / (p.m() as f64).sqrt(), 0.0);
    let mut amps = CVector::zeros(layout.total_dim());
    for omega in extremes.members() {
        amps += committed_state(p, b, omega)?.amplitudes() * scale;
    }
    JointPureState::new(layout, amps)
}

/// `U'_A` and `δ'`, with `⟨Ψ'^(1)|(U'_A ⊗ I)|Ψ'^(0)⟩ = 1 − δ'`.
#[derive(Debug, Clone)]
pub struct UniversalCheat {
    pub unitary: Operator,
    pub delta_prime: f64,
}

pub fn universal_cheat(p: &ProtocolInstance) -> Result<UniversalCheat> {
    let psi0 = uniform_purification(p, Bit::Zero)?;
    let psi1 = uniform_purification(p, Bit::One)?;
    let o = max_purification_overlap(&psi1, &psi0, &[ALICE])?;
    Ok(UniversalCheat {
        unitary: o.unitary,
        delta_prime: 1.0 - o.value,
    })
}

/// Per-extreme-point decomposition
/// `⟨Ψ^(1)(ω*_j)|U'_A|Ψ^(0)(ω*_j)⟩ = (1 − α_j) + iβ_j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheatReport {
    pub delta_prime: f64,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    /// `max_j α_j / δ'`, or 0 when `δ' ≤ PERFECT_THRESHOLD`.
    pub c_estimate: f64,
}

impl CheatReport {
    pub fn m(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_perfect(&self) -> bool {
        self.delta_prime <= PERFECT_THRESHOLD
    }

    /// `1 − 2cδ'`.
    pub fn bound(&self) -> f64 {
        1.0 - 2.0 * self.c_estimate * self.delta_prime
    }

    pub fn alpha_mean(&self) -> f64 {
        self.alphas.iter().sum::<f64>() / self.m() as f64
    }

    pub fn beta_sum(&self) -> f64 {
        self.betas.iter().sum()
    }

    /// `|⟨Ψ^(1)(ω*_j)|U'_A|Ψ^(0)(ω*_j)⟩|² = 1 − 2α_j + α_j² + β_j²`.
    pub fn extreme_success(&self, j: usize) -> f64 {
        let (a, b) = (self.alphas[j], self.betas[j]);
        (1.0 - a) * (1.0 - a) + b * b
    }
}

/// Decomposes the action of `U'_A` on every extreme point and checks
/// `δ' = (1/m)Σα_j` and `Σβ_j = 0`.
///
/// `δ'` is read off the uniform purification directly; it must also agree
/// with the fidelity deficit of Bob's uniform-purification views, which is
/// only the case when `U'_A` is the phase-absorbed maximizer.
pub fn alpha_beta_decomposition(p: &ProtocolInstance, u: &Operator) -> Result<CheatReport> {
    let report = raw_decomposition(p, u)?;
    check_decomposition(p, &report)?;
    Ok(report)
}

/// [`alpha_beta_decomposition`] without the identity checks.
pub fn raw_decomposition(p: &ProtocolInstance, u: &Operator) -> Result<CheatReport> {
    u.ensure_unitary()?;
    if u.layout() != &p.alice_layout()? {
        return Err(Error::LayoutMismatch("U'_A must act on Alice's register".into()));
    }
    let extremes = ExtremeSet::new(p.m())?;
    let mut alphas = Vec::with_capacity(p.m());
    let mut betas = Vec::with_capacity(p.m());
    for omega in extremes.members() {
        let amp = transition_amplitude(
            &committed_state(p, Bit::One, omega)?,
            u,
            &committed_state(p, Bit::Zero, omega)?,
        )?;
        alphas.push(1.0 - amp.re);
        betas.push(amp.im);
    }
    let uniform: C64 = transition_amplitude(
        &uniform_purification(p, Bit::One)?,
        u,
        &uniform_purification(p, Bit::Zero)?,
    )?;
    let delta_prime = 1.0 - uniform.re;
    Ok(CheatReport {
        delta_prime,
        c_estimate: if delta_prime > PERFECT_THRESHOLD {
            alphas.iter().cloned().fold(f64::NEG_INFINITY, f64::max) / delta_prime
        } else {
            0.0
        },
        alphas,
        betas,
    })
}

/// The three identities tying `δ'` to the α/β decomposition and to the
/// fidelity deficit, each within [`IDENTITY_TOL`].
pub fn check_decomposition(p: &ProtocolInstance, report: &CheatReport) -> Result<()> {
    let mean_gap = (report.delta_prime - report.alpha_mean()).abs();
    if mean_gap > IDENTITY_TOL {
        return Err(Error::IdentityViolation(format!(
            "delta' - mean(alpha) = {mean_gap:e}"
        )));
    }
    if report.beta_sum().abs() > IDENTITY_TOL {
        return Err(Error::IdentityViolation(format!(
            "sum(beta) = {:e}",
            report.beta_sum()
        )));
    }
    let fidelity_deficit = concealment_deficit(p, &Distribution::uniform(p.m())?)?.deficit;
    if (fidelity_deficit - report.delta_prime).abs() > IDENTITY_TOL {
        return Err(Error::IdentityViolation(format!(
            "overlap deficit {:e} differs from fidelity deficit {fidelity_deficit:e}",
            report.delta_prime
        )));
    }
    Ok(())
}

/// `|⟨Ψ^(1)(ω)|(U ⊗ I)|Ψ^(0)(ω)⟩|²`: the probability that Bob's projection
/// onto the honest bit-1 state accepts Alice's rotated bit-0 commitment.
pub fn cheat_success(p: &ProtocolInstance, omega: &Distribution, u: &Operator) -> Result<f64> {
    let amp = transition_amplitude(
        &committed_state(p, Bit::One, omega)?,
        u,
        &committed_state(p, Bit::Zero, omega)?,
    )?;
    Ok(amp.norm_sqr())
}

/// Success of `U` against Bob's meta-purification, with `χ` left untouched.
pub fn meta_cheat_success(mp: &MetaPurification, u: &Operator) -> Result<f64> {
    let amp = transition_amplitude(mp.state(Bit::One), u, mp.state(Bit::Zero))?;
    Ok(amp.norm_sqr())
}

/// `(ᾱ, β̄) = (Σ q_j α_j, Σ q_j β_j)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedMoments {
    pub alpha_bar: f64,
    pub beta_bar: f64,
}

impl WeightedMoments {
    /// `1 − 2ᾱ + ᾱ² + β̄²`.
    pub fn success(&self) -> f64 {
        let (a, b) = (self.alpha_bar, self.beta_bar);
        (1.0 - a) * (1.0 - a) + b * b
    }
}

/// Averages the report over `ω` and checks `ᾱ ≤ cδ'` and
/// `(ᾱ² + β̄²)/2 ≤ ᾱ`.
pub fn weighted_moments(report: &CheatReport, omega: &Distribution) -> Result<WeightedMoments> {
    if omega.len() != report.m() {
        return Err(Error::LengthMismatch {
            expected: report.m(),
            found: omega.len(),
        });
    }
    let q = omega.weights();
    let alpha_bar: f64 = q.iter().zip(&report.alphas).map(|(q, a)| q * a).sum();
    let beta_bar: f64 = q.iter().zip(&report.betas).map(|(q, b)| q * b).sum();
    let cap = report.c_estimate * report.delta_prime;
    if alpha_bar > cap + BOUND_TOL {
        return Err(Error::BoundViolation(format!(
            "alpha_bar {alpha_bar:e} > c*delta' {cap:e}"
        )));
    }
    let lhs = 0.5 * (alpha_bar * alpha_bar + beta_bar * beta_bar);
    if lhs > alpha_bar + BOUND_TOL {
        return Err(Error::BoundViolation(format!(
            "(alpha_bar^2 + beta_bar^2)/2 = {lhs:e} > alpha_bar {alpha_bar:e}"
        )));
    }
    Ok(WeightedMoments {
        alpha_bar,
        beta_bar,
    })
}

/// `|P_after − P_before|` when a Bob-side unitary is applied to both honest
/// committed states.
pub fn bob_unitary_invariance(
    p: &ProtocolInstance,
    omega: &Distribution,
    u_a: &Operator,
    u_b: &Operator,
) -> Result<f64> {
    let psi0 = committed_state(p, Bit::Zero, omega)?;
    let psi1 = committed_state(p, Bit::One, omega)?;
    for reg in u_b.layout().registers() {
        if psi0.layout().get(&reg.name)?.owner == Owner::Alice {
            return Err(Error::AliceRegister(reg.name.clone()));
        }
    }
    let before = transition_amplitude(&psi1, u_a, &psi0)?.norm_sqr();
    let after = transition_amplitude(&psi1.apply(u_b)?, u_a, &psi0.apply(u_b)?)?.norm_sqr();
    Ok((after - before).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{max_abs, CMatrix, RegisterLayout, Register, Tensor};
    use crate::protocol::{cyclic_shift, make_family, meta_purify, Family};
    use crate::random::{random_unitary, sample_simplex};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dist(w: &[f64]) -> Distribution {
        Distribution::new(w.to_vec()).unwrap()
    }

    fn revealing() -> ProtocolInstance {
        // b written directly on B: |0⟩_A|b⟩_B
        let zero = vec![c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)];
        let one = vec![c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)];
        ProtocolInstance::custom(2, 2, zero, one, vec![CMatrix::identity(2, 2)], 1).unwrap()
    }

    #[test]
    fn committed_state_point_mass_and_single_action() {
        let p = make_family(Family::Near, 3, 3, 2).unwrap();
        let s = committed_state(&p, Bit::One, &Distribution::point_mass(3, 0).unwrap()).unwrap();
        let xi0 = JointPureState::basis(RegisterLayout::single(XI, 3, Owner::BobAncilla).unwrap(), 0).unwrap();
        let expect = p.phi(Bit::One).apply(&p.actions()[0]).unwrap().tensor(&xi0).unwrap();
        assert!(max_abs(&CMatrix::from_column_slice(12, 1, (s.amplitudes() - expect.amplitudes()).as_slice())) < 1e-15);

        let single = make_family(Family::Near, 3, 1, 2).unwrap();
        let s = committed_state(&single, Bit::Zero, &dist(&[1.0])).unwrap();
        assert_eq!(s.layout().get(XI).unwrap().dim, 1);
        assert!((s.inner(&single.phi(Bit::Zero).tensor(&JointPureState::basis(
            RegisterLayout::single(XI, 1, Owner::BobAncilla).unwrap(), 0).unwrap()).unwrap()).unwrap().norm() - 1.0).abs() < 1e-14);
        assert!(matches!(
            committed_state(&p, Bit::Zero, &dist(&[0.5, 0.5])),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn committed_state_uniform_overlap_with_point_mass() {
        // V_j = I, m = 2: overlap with the ω*_1 state is √(1/2)
        let phi = vec![c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)];
        let p = ProtocolInstance::custom(
            2,
            2,
            phi.clone(),
            phi,
            vec![CMatrix::identity(2, 2), CMatrix::identity(2, 2)],
            1,
        )
        .unwrap();
        let u = committed_state(&p, Bit::Zero, &Distribution::uniform(2).unwrap()).unwrap();
        let e = committed_state(&p, Bit::Zero, &Distribution::point_mass(2, 0).unwrap()).unwrap();
        assert!((u.inner(&e).unwrap().norm() - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn concealment_deficit_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let perfect = make_family(Family::Perfect, 5, 3, 2).unwrap();
        for _ in 0..10 {
            let w = dist(&sample_simplex(3, &mut rng));
            assert!(concealment_deficit(&perfect, &w).unwrap().deficit.abs() <= 1e-9);
        }
        for n in 1..=8 {
            let near = make_family(Family::Near, n, 2, 2).unwrap();
            let w = dist(&sample_simplex(2, &mut rng));
            let d = concealment_deficit(&near, &w).unwrap().deficit;
            assert!(d <= 0.5f64.powi(n as i32) + 1e-12, "N={n}: {d}");
            assert!(d > 0.0);
        }
        let r = concealment_deficit(&revealing(), &dist(&[1.0])).unwrap();
        assert!((r.deficit - 1.0).abs() < 1e-12);
    }

    #[test]
    fn optimal_cheat_examples() {
        let perfect = make_family(Family::Perfect, 2, 2, 3).unwrap();
        let (_, ov) = optimal_cheat(&perfect, &dist(&[0.3, 0.7])).unwrap();
        assert!((ov - 1.0).abs() < 1e-9);

        let single = make_family(Family::Near, 4, 1, 2).unwrap();
        let (_, ov) = optimal_cheat(&single, &dist(&[1.0])).unwrap();
        let delta = concealment_deficit(&single, &dist(&[1.0])).unwrap().deficit;
        assert!((ov - (1.0 - delta)).abs() < 1e-9);

        let near = make_family(Family::Near, 4, 3, 2).unwrap();
        let (_, ov) = optimal_cheat(&near, &Distribution::uniform(3).unwrap()).unwrap();
        assert!(ov >= 1.0 - 0.0625);
    }

    #[test]
    fn universal_cheat_recovers_shift_in_perfect_family() {
        for d in [2, 3] {
            for m in 1..=3 {
                let p = make_family(Family::Perfect, 1, m, d).unwrap();
                let uc = universal_cheat(&p).unwrap();
                assert!(uc.delta_prime.abs() < 1e-12);
                // oracle: (U ⊗ I)|Λ⟩ = (X ⊗ I)|Λ⟩ has the unique solution U = X
                assert!(max_abs(&(uc.unitary.matrix() - cyclic_shift(d))) < 1e-8);
                assert_eq!(uc.unitary.dim(), d);
            }
        }
    }

    #[test]
    fn universal_cheat_single_action_matches_optimal() {
        let p = make_family(Family::Near, 5, 1, 3).unwrap();
        let uc = universal_cheat(&p).unwrap();
        let (_, ov) = optimal_cheat(&p, &dist(&[1.0])).unwrap();
        assert!((1.0 - uc.delta_prime - ov).abs() < 1e-12);
    }

    #[test]
    fn universal_cheat_near_bound() {
        let p = make_family(Family::Near, 6, 3, 2).unwrap();
        let uc = universal_cheat(&p).unwrap();
        assert!(uc.delta_prime <= 0.5f64.powi(6) + 1e-9);
        assert!(uc.delta_prime > 0.0);
    }

    #[test]
    fn decomposition_examples() {
        let perfect = make_family(Family::Perfect, 1, 3, 2).unwrap();
        let r = alpha_beta_decomposition(&perfect, &universal_cheat(&perfect).unwrap().unitary).unwrap();
        assert!(r.alphas.iter().chain(&r.betas).all(|x| x.abs() < 1e-12));
        assert_eq!(r.c_estimate, 0.0);
        assert!(r.is_perfect());

        let single = make_family(Family::Near, 4, 1, 2).unwrap();
        let uc = universal_cheat(&single).unwrap();
        let r = alpha_beta_decomposition(&single, &uc.unitary).unwrap();
        assert!((r.alphas[0] - uc.delta_prime).abs() < 1e-12);
        assert!(r.betas[0].abs() < 1e-12);

        let near = make_family(Family::Near, 5, 3, 2).unwrap();
        let r = alpha_beta_decomposition(&near, &universal_cheat(&near).unwrap().unitary).unwrap();
        assert!(r.c_estimate > 0.0 && r.c_estimate <= 3.0);
    }

    #[test]
    fn decomposition_rejects_non_maximizer() {
        let near = make_family(Family::Near, 3, 2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = Operator::unitary(near.alice_layout().unwrap(), random_unitary(2, &mut rng)).unwrap();
        assert!(matches!(
            alpha_beta_decomposition(&near, &u),
            Err(Error::IdentityViolation(_))
        ));
        let not_unitary = Operator::new(near.alice_layout().unwrap(), CMatrix::identity(2, 2) * c(2., 0.)).unwrap();
        assert!(matches!(
            alpha_beta_decomposition(&near, &not_unitary),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn cheat_success_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let perfect = make_family(Family::Perfect, 1, 2, 3).unwrap();
        let u = universal_cheat(&perfect).unwrap().unitary;
        for _ in 0..10 {
            let w = dist(&sample_simplex(2, &mut rng));
            assert!((cheat_success(&perfect, &w, &u).unwrap() - 1.0).abs() < 1e-9);
        }
        let rev = revealing();
        let id = Operator::identity(rev.alice_layout().unwrap());
        assert!(cheat_success(&rev, &dist(&[1.0]), &id).unwrap().abs() < 1e-15);

        let near = make_family(Family::Near, 6, 3, 2).unwrap();
        let u = universal_cheat(&near).unwrap().unitary;
        let report = alpha_beta_decomposition(&near, &u).unwrap();
        let mut worst = f64::INFINITY;
        for _ in 0..50 {
            let w = dist(&sample_simplex(3, &mut rng));
            worst = worst.min(cheat_success(&near, &w, &u).unwrap());
        }
        assert!(worst > report.bound());
    }

    #[test]
    fn weighted_moments_examples() {
        let near = make_family(Family::Near, 4, 3, 2).unwrap();
        let u = universal_cheat(&near).unwrap().unitary;
        let r = alpha_beta_decomposition(&near, &u).unwrap();
        let wm = weighted_moments(&r, &Distribution::point_mass(3, 1).unwrap()).unwrap();
        assert_eq!((wm.alpha_bar, wm.beta_bar), (r.alphas[1], r.betas[1]));
        let wm = weighted_moments(&r, &Distribution::uniform(3).unwrap()).unwrap();
        assert!((wm.alpha_bar - r.delta_prime).abs() < 1e-9);
        assert!(wm.beta_bar.abs() < 1e-9);

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let w = dist(&sample_simplex(3, &mut rng));
            let wm = weighted_moments(&r, &w).unwrap();
            // |⟨Ψ1(ω)|U|Ψ0(ω)⟩|² = 1 − 2ᾱ + ᾱ² + β̄²
            assert!((wm.success() - cheat_success(&near, &w, &u).unwrap()).abs() < 1e-12);
        }
        assert!(weighted_moments(&r, &Distribution::uniform(2).unwrap()).is_err());
    }

    #[test]
    fn bob_unitaries_do_not_change_success() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let near = make_family(Family::Near, 5, 3, 2).unwrap();
        let u = universal_cheat(&near).unwrap().unitary;
        let w = dist(&sample_simplex(3, &mut rng));
        let layout = near.committed_layout().unwrap();

        let id = Operator::identity(layout.subset(&[BOB]).unwrap());
        assert_eq!(bob_unitary_invariance(&near, &w, &u, &id).unwrap(), 0.0);

        let on_xi = Operator::unitary(layout.subset(&[XI]).unwrap(), random_unitary(3, &mut rng)).unwrap();
        assert!(bob_unitary_invariance(&near, &w, &u, &on_xi).unwrap() <= 1e-10);

        let on_both = Operator::unitary(layout.subset(&[BOB, XI]).unwrap(), random_unitary(6, &mut rng)).unwrap();
        assert!(bob_unitary_invariance(&near, &w, &u, &on_both).unwrap() <= 1e-10);

        let alice = Operator::identity(RegisterLayout::new(vec![Register::new(ALICE, 2, Owner::Alice)]).unwrap());
        assert!(matches!(
            bob_unitary_invariance(&near, &w, &u, &alice),
            Err(Error::AliceRegister(_))
        ));
    }

    #[test]
    fn meta_success_reduces_to_effective_distribution() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let near = make_family(Family::Near, 3, 3, 2).unwrap();
        let u = universal_cheat(&near).unwrap().unitary;
        let omegas: Vec<_> = (0..4).map(|_| dist(&sample_simplex(3, &mut rng))).collect();
        let pk = dist(&sample_simplex(4, &mut rng));
        let mp = meta_purify(&near, &omegas, &pk).unwrap();
        let eff = mp.effective().unwrap();
        let direct = cheat_success(&near, &eff, &u).unwrap();
        assert!((meta_cheat_success(&mp, &u).unwrap() - direct).abs() <= 1e-12);
    }

    #[test]
    fn joint_actions_spread_the_alphas() {
        // Alice-side rotations R_j ⊗ I keep ⟨φ1|V_j†V_j|φ0⟩ = 1 − ε but make
        // the per-extreme amplitudes of U'_A differ.
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let near = make_family(Family::Near, 4, 3, 2).unwrap();
        let ab = near.phi(Bit::Zero).layout().clone();
        let actions = (0..3)
            .map(|_| {
                let r = random_unitary(2, &mut rng).kronecker(&CMatrix::identity(2, 2));
                Operator::unitary(ab.clone(), r).unwrap()
            })
            .collect();
        let p = near.with_actions(actions).unwrap();
        let eps = 2f64.powi(-4);
        for j in 0..3 {
            let w = Distribution::point_mass(3, j).unwrap();
            assert!(concealment_deficit(&p, &w).unwrap().deficit <= eps + 1e-12);
        }
        let uc = universal_cheat(&p).unwrap();
        let r = alpha_beta_decomposition(&p, &uc.unitary).unwrap();
        assert!(r.c_estimate > 1.0 + 1e-6 && r.c_estimate <= 3.0);
        for _ in 0..20 {
            let w = dist(&sample_simplex(3, &mut rng));
            let wm = weighted_moments(&r, &w).unwrap();
            let s = cheat_success(&p, &w, &uc.unitary).unwrap();
            assert!((wm.success() - s).abs() < 1e-12);
            assert!(s > r.bound() - 1e-9);
        }
    }
}
