//! Commitment protocol instances in which Bob applies one of `m` actions
//! `V_j` to his share, chosen from a distribution Alice does not know, and
//! Bob's freedom to substitute a purified mixture of distributions.

use std::f64::consts::PI;

use serde::Serialize;

use crate::attack::committed_state;
use crate::error::{Error, Result};
use crate::fidelity::maximally_entangled;
use crate::hilbert::{
    c, tol, unitarity_deviation, CMatrix, CVector, DensityOperator, JointPureState, Operator,
    Owner, PartialTrace, Register, RegisterLayout, Tensor, C64,
};

/// Register holding Alice's share.
pub const ALICE: &str = "A";
/// Register holding Bob's share.
pub const BOB: &str = "B";
/// Bob's ancilla purifying his choice of action.
pub const XI: &str = "xi";
/// Bob's ancilla purifying his choice among several distributions.
pub const CHI: &str = "chi";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub const BOTH: [Bit; 2] = [Bit::Zero, Bit::One];

    pub fn index(self) -> usize {
        match self {
            Bit::Zero => 0,
            Bit::One => 1,
        }
    }
}

/// Probability vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    weights: Vec<f64>,
}

impl Distribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("no outcomes".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < -tol::NORM) {
            return Err(Error::InvalidDistribution(format!("weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > tol::NORM {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
        }
        Ok(Distribution { weights })
    }

    /// `ω*_j`: all weight on outcome `j` (zero-based).
    pub fn point_mass(m: usize, j: usize) -> Result<Self> {
        if j >= m {
            return Err(Error::OutOfRange(format!("point mass {j} of {m}")));
        }
        let mut w = vec![0.0; m];
        w[j] = 1.0;
        Ok(Distribution { weights: w })
    }

    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDistribution("no outcomes".into()));
        }
        Ok(Distribution {
            weights: vec![1.0 / m as f64; m],
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Amplitude `√q_j`, clamping tolerated negative roundoff to zero.
    pub(crate) fn amplitude(&self, j: usize) -> f64 {
        self.weights[j].max(0.0).sqrt()
    }

    pub fn max_abs_diff(&self, other: &Distribution) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Perfect,
    Near,
    Custom,
}

/// Built-in concealing families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `|φ^(b)⟩ = (X^b ⊗ I)|Λ⟩`; Bob's marginals coincide.
    Perfect,
    /// `|φ^(b)⟩ = √(1−ε)|Λ⟩ + √ε|λ_b⟩` with `ε = 2^(−N)`.
    Near,
}

/// A commitment protocol in the action model: the honest pre-action states
/// `|φ^(0)⟩, |φ^(1)⟩` on `A ⊗ B` and Bob's unitary actions `V_j`.
///
/// Actions normally act on `B`. An action may also act on `A ⊗ B`, standing
/// for a protocol step in which Bob's choice reaches Alice's side (for
/// instance a system he prepares according to `j` and sends to her). With
/// `B`-local actions every extreme point sees the same overlap, so only
/// joint actions make the per-extreme-point `α_j` differ.
#[derive(Debug, Clone)]
pub struct ProtocolInstance {
    phi: [JointPureState; 2],
    actions: Vec<Operator>,
    security: u32,
    flavor: Flavor,
}

fn ab_layout(d_a: usize, d_b: usize) -> Result<RegisterLayout> {
    RegisterLayout::new(vec![
        Register::new(ALICE, d_a, Owner::Alice),
        Register::new(BOB, d_b, Owner::Bob),
    ])
}

impl ProtocolInstance {
    pub fn new(
        phi0: JointPureState,
        phi1: JointPureState,
        actions: Vec<Operator>,
        security: u32,
        flavor: Flavor,
    ) -> Result<Self> {
        let layout = phi0.layout().clone();
        let regs = layout.registers();
        if regs.len() != 2
            || regs[0].name != ALICE
            || regs[0].owner != Owner::Alice
            || regs[1].name != BOB
            || regs[1].owner != Owner::Bob
        {
            return Err(Error::LayoutMismatch(format!(
                "protocol states must live on [{ALICE}, {BOB}], got {:?}",
                layout.names()
            )));
        }
        if phi1.layout() != &layout {
            return Err(Error::LayoutMismatch("phi0 and phi1 differ in layout".into()));
        }
        for phi in [&phi0, &phi1] {
            let norm = phi.norm();
            if (norm - 1.0).abs() > tol::NORM {
                return Err(Error::NotNormalized { norm });
            }
        }
        if actions.is_empty() {
            return Err(Error::OutOfRange("protocol needs at least one action".into()));
        }
        let bob = layout.subset(&[BOB])?;
        for (index, v) in actions.iter().enumerate() {
            if v.layout() != &bob && v.layout() != &layout {
                return Err(Error::LayoutMismatch(format!(
                    "action {index} must act on {BOB} or on {ALICE}{BOB}"
                )));
            }
            let deviation = unitarity_deviation(v.matrix());
            if !v.is_unitary() || deviation > tol::UNIT {
                return Err(Error::NonUnitaryAction { index, deviation });
            }
        }
        Ok(ProtocolInstance {
            phi: [phi0, phi1],
            actions,
            security,
            flavor,
        })
    }

    /// Builds a protocol from raw amplitudes and action matrices, checking
    /// every invariant. A `d_b × d_b` action acts on `B`; a
    /// `d_a·d_b × d_a·d_b` action is a joint step on `A ⊗ B`.
    pub fn custom(
        d_a: usize,
        d_b: usize,
        phi0: Vec<C64>,
        phi1: Vec<C64>,
        actions: Vec<CMatrix>,
        security: u32,
    ) -> Result<Self> {
        let layout = ab_layout(d_a, d_b)?;
        let phi0 = JointPureState::new(layout.clone(), CVector::from_vec(phi0))?;
        let phi1 = JointPureState::new(layout.clone(), CVector::from_vec(phi1))?;
        let bob = layout.subset(&[BOB])?;
        let mut ops = Vec::with_capacity(actions.len());
        for (index, m) in actions.into_iter().enumerate() {
            let target = if m.nrows() == d_b { bob.clone() } else { layout.clone() };
            let op = Operator::new(target.clone(), m)?;
            let deviation = unitarity_deviation(op.matrix());
            if deviation > tol::UNIT {
                return Err(Error::NonUnitaryAction { index, deviation });
            }
            ops.push(Operator::unitary(target, op.matrix().clone())?);
        }
        Self::new(phi0, phi1, ops, security, Flavor::Custom)
    }

    /// Same honest states with a different action set; the result is a
    /// custom instance.
    pub fn with_actions(&self, actions: Vec<Operator>) -> Result<Self> {
        Self::new(
            self.phi[0].clone(),
            self.phi[1].clone(),
            actions,
            self.security,
            Flavor::Custom,
        )
    }

    pub fn d_a(&self) -> usize {
        self.phi[0].layout().registers()[0].dim
    }

    pub fn d_b(&self) -> usize {
        self.phi[0].layout().registers()[1].dim
    }

    /// Number of Bob actions.
    pub fn m(&self) -> usize {
        self.actions.len()
    }

    pub fn security(&self) -> u32 {
        self.security
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn phi(&self, b: Bit) -> &JointPureState {
        &self.phi[b.index()]
    }

    pub fn actions(&self) -> &[Operator] {
        &self.actions
    }

    /// Layout `A ⊗ B ⊗ ξ` of committed states.
    pub fn committed_layout(&self) -> Result<RegisterLayout> {
        self.phi[0]
            .layout()
            .concat(&RegisterLayout::single(XI, self.m(), Owner::BobAncilla)?)
    }

    pub fn alice_layout(&self) -> Result<RegisterLayout> {
        self.phi[0].layout().subset(&[ALICE])
    }
}

/// Cyclic shift `X|i⟩ = |i+1 mod d⟩`.
pub fn cyclic_shift(d: usize) -> CMatrix {
    let mut x = CMatrix::zeros(d, d);
    for i in 0..d {
        x[((i + 1) % d, i)] = c(1.0, 0.0);
    }
    x
}

/// `V_j = diag(exp(2πi·j·k/(m·d)))`, k = 0..d.
fn phase_action(j: usize, m: usize, d: usize) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        d,
        (0..d).map(|k| C64::from_polar(1.0, 2.0 * PI * (j * k) as f64 / (m * d) as f64)),
    ))
}

/// Constructs a witness protocol of the given family.
///
/// Both families share the maximally entangled reference `|Λ⟩` on `d × d`
/// and `m` distinct diagonal phase actions. In the near family the
/// perturbations `|λ_0⟩ = |0⟩|1⟩` and `|λ_1⟩ = |1⟩|0⟩` are orthogonal to each
/// other and to `|Λ⟩`, so `⟨Ψ^(1)(ω)|Ψ^(0)(ω)⟩ = 1 − ε` for every `ω` and the
/// concealment deficit never exceeds `ε = 2^(−N)`.
pub fn make_family(family: Family, n: u32, m: usize, d: usize) -> Result<ProtocolInstance> {
    if n < 1 {
        return Err(Error::OutOfRange(format!("security parameter N = {n} < 1")));
    }
    if m < 1 {
        return Err(Error::OutOfRange("m must be at least 1".into()));
    }
    if !(2..=16).contains(&d) {
        return Err(Error::OutOfRange(format!("d = {d} outside [2, 16]")));
    }
    let layout = ab_layout(d, d)?;
    // committed states carry the ξ register too
    layout.concat(&RegisterLayout::single(XI, m, Owner::BobAncilla)?)?;

    let lambda = maximally_entangled(
        Register::new(ALICE, d, Owner::Alice),
        Register::new(BOB, d, Owner::Bob),
    )?;
    let (phi0, phi1, flavor) = match family {
        Family::Perfect => {
            let x = Operator::unitary(layout.subset(&[ALICE])?, cyclic_shift(d))?;
            (lambda.clone(), lambda.apply(&x)?, Flavor::Perfect)
        }
        Family::Near => {
            let eps = 0.5f64.powi(n as i32);
            let perturbed = |a: usize, b: usize| {
                let mut v = lambda.amplitudes() * c((1.0 - eps).sqrt(), 0.0);
                v[a * d + b] += c(eps.sqrt(), 0.0);
                JointPureState::new(layout.clone(), v)
            };
            (perturbed(0, 1)?, perturbed(1, 0)?, Flavor::Near)
        }
    };
    let bob = layout.subset(&[BOB])?;
    let actions = (0..m)
        .map(|j| Operator::unitary(bob.clone(), phase_action(j, m, d)))
        .collect::<Result<Vec<_>>>()?;
    ProtocolInstance::new(phi0, phi1, actions, n, flavor)
}

/// `|ψ(ω₀)⟩ = Σ_j √q⁰_j |ξ_j⟩ V_j|φ^(b)⟩`, laid out as `A ⊗ B ⊗ ξ`.
pub fn honest_state(p: &ProtocolInstance, omega0: &Distribution, b: Bit) -> Result<JointPureState> {
    committed_state(p, b, omega0)
}

/// `q''_j = Σ_k p_k q^k_j`.
pub fn effective_distribution(omegas: &[Distribution], pk: &Distribution) -> Result<Distribution> {
    if omegas.len() != pk.len() {
        return Err(Error::LengthMismatch {
            expected: pk.len(),
            found: omegas.len(),
        });
    }
    let m = omegas[0].len();
    let mut q = vec![0.0; m];
    for (omega, &p) in omegas.iter().zip(pk.weights()) {
        if omega.len() != m {
            return Err(Error::LengthMismatch {
                expected: m,
                found: omega.len(),
            });
        }
        for (acc, &w) in q.iter_mut().zip(omega.weights()) {
            *acc += p * w;
        }
    }
    Distribution::new(q)
}

/// Bob's purification over several distributions,
/// `Σ_k √p_k |Ψ^(b)(ω_k)⟩|χ_k⟩`, for both bit values.
#[derive(Debug, Clone)]
pub struct MetaPurification {
    omegas: Vec<Distribution>,
    pk: Distribution,
    states: [JointPureState; 2],
}

impl MetaPurification {
    pub fn omegas(&self) -> &[Distribution] {
        &self.omegas
    }

    pub fn pk(&self) -> &Distribution {
        &self.pk
    }

    pub fn state(&self, b: Bit) -> &JointPureState {
        &self.states[b.index()]
    }

    pub fn effective(&self) -> Result<Distribution> {
        effective_distribution(&self.omegas, &self.pk)
    }
}

pub fn meta_purify(
    p: &ProtocolInstance,
    omegas: &[Distribution],
    pk: &Distribution,
) -> Result<MetaPurification> {
    if omegas.len() != pk.len() {
        return Err(Error::LengthMismatch {
            expected: pk.len(),
            found: omegas.len(),
        });
    }
    let n = omegas.len();
    let chi = RegisterLayout::single(CHI, n, Owner::BobAncilla)?;
    let layout = p.committed_layout()?.concat(&chi)?;
    let mut states = Vec::with_capacity(2);
    for b in Bit::BOTH {
        let mut acc = CVector::zeros(layout.total_dim());
        for (k, omega) in omegas.iter().enumerate() {
            let branch = committed_state(p, b, omega)?
                .tensor(&JointPureState::basis(chi.clone(), k)?)?;
            acc += branch.amplitudes() * c(pk.amplitude(k), 0.0);
        }
        states.push(JointPureState::new(layout.clone(), acc)?);
    }
    let [s0, s1]: [JointPureState; 2] = states.try_into().expect("two bit values");
    Ok(MetaPurification {
        omegas: omegas.to_vec(),
        pk: pk.clone(),
        states: [s0, s1],
    })
}

/// Measures `χ` in its basis and keeps outcome `k`: returns `p_k` and the
/// post-measurement state on `A ⊗ B ⊗ ξ`.
pub fn collapse_ancilla(mp: &MetaPurification, b: Bit, k: usize) -> Result<(f64, JointPureState)> {
    let n = mp.omegas.len();
    if k >= n {
        return Err(Error::OutOfRange(format!("ancilla outcome {k} of {n}")));
    }
    if mp.pk.weights()[k] <= 0.0 {
        return Err(Error::ZeroProbability { index: k });
    }
    mp.state(b).condition_on(CHI, k)
}

/// State on every register except Bob's private ancillas: the most any
/// check by Alice can probe.
pub fn alice_visible(s: &JointPureState) -> Result<DensityOperator> {
    let layout = s.layout();
    if layout.owned_by(Owner::BobAncilla).is_empty() {
        return Err(Error::LayoutMismatch("state carries no Bob ancilla".into()));
    }
    let keep: Vec<&str> = layout
        .registers()
        .iter()
        .filter(|r| r.owner != Owner::BobAncilla)
        .map(|r| r.name.as_str())
        .collect();
    s.partial_trace(&keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fidelity::trace_distance;
    use crate::hilbert::max_abs;

    fn h() -> f64 {
        std::f64::consts::FRAC_1_SQRT_2
    }

    #[test]
    fn distribution_validation() {
        assert!(Distribution::new(vec![0.5, 0.5]).is_ok());
        assert!(Distribution::new(vec![0.6, 0.5]).is_err());
        assert!(Distribution::new(vec![1.2, -0.2]).is_err());
        assert!(Distribution::new(vec![]).is_err());
        assert!(Distribution::new(vec![1.0 + 5e-11, -5e-11]).is_ok());
        assert_eq!(Distribution::point_mass(3, 1).unwrap().weights(), &[0.0, 1.0, 0.0]);
        assert!(Distribution::point_mass(2, 2).is_err());
    }

    #[test]
    fn family_parameter_ranges() {
        assert!(make_family(Family::Near, 0, 2, 2).is_err());
        assert!(make_family(Family::Near, 3, 0, 2).is_err());
        assert!(make_family(Family::Near, 3, 2, 1).is_err());
        assert!(make_family(Family::Near, 3, 2, 17).is_err());
        assert!(matches!(
            make_family(Family::Perfect, 1, 17, 16),
            Err(Error::DimensionCap { .. })
        ));
        let p = make_family(Family::Near, 3, 2, 2).unwrap();
        assert_eq!((p.d_a(), p.d_b(), p.m(), p.security()), (2, 2, 2, 3));
        assert_eq!(p.flavor(), Flavor::Near);
    }

    #[test]
    fn family_actions_are_distinct_unitaries() {
        let p = make_family(Family::Perfect, 1, 3, 3).unwrap();
        for (i, a) in p.actions().iter().enumerate() {
            assert!(a.is_unitary());
            for b in &p.actions()[i + 1..] {
                assert!(max_abs(&(a.matrix() - b.matrix())) > 1e-3);
            }
        }
    }

    #[test]
    fn near_family_perturbations_are_orthogonal() {
        let p = make_family(Family::Near, 4, 2, 3).unwrap();
        let ov = p.phi(Bit::One).inner(p.phi(Bit::Zero)).unwrap();
        assert!((ov - c(1.0 - 0.0625, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn custom_rejects_non_unitary_action() {
        let phi = vec![c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)];
        let bad = CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(1., 0.), c(0., 0.), c(1., 0.)]);
        let err = ProtocolInstance::custom(2, 2, phi.clone(), phi.clone(), vec![CMatrix::identity(2, 2), bad], 1)
            .unwrap_err();
        assert!(matches!(err, Error::NonUnitaryAction { index: 1, .. }));
        let unnormalized = vec![c(1., 0.), c(1., 0.), c(0., 0.), c(0., 0.)];
        assert!(matches!(
            ProtocolInstance::custom(2, 2, unnormalized, phi, vec![CMatrix::identity(2, 2)], 1),
            Err(Error::NotNormalized { .. })
        ));
    }

    /// `|φ⟩ = |+⟩` on B with a trivial Alice register and actions {I, Z}.
    fn plus_with_z() -> ProtocolInstance {
        let plus = vec![c(h(), 0.), c(h(), 0.)];
        let z = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1., 0.), c(-1., 0.)]));
        ProtocolInstance::custom(1, 2, plus.clone(), plus, vec![CMatrix::identity(2, 2), z], 1).unwrap()
    }

    #[test]
    fn honest_state_examples() {
        let p = plus_with_z();
        let s = honest_state(&p, &Distribution::uniform(2).unwrap(), Bit::Zero).unwrap();
        let visible = alice_visible(&s).unwrap();
        let half = CMatrix::identity(2, 2) * c(0.5, 0.);
        assert!(max_abs(&(visible.matrix() - half)) < 1e-14);

        let w = Distribution::new(vec![0.25, 0.75]).unwrap();
        let s = honest_state(&p, &w, Bit::Zero).unwrap();
        let anc = s.partial_trace(&[XI]).unwrap();
        assert!((anc.matrix()[(0, 0)].re - 0.25).abs() < 1e-14);
        assert!((anc.matrix()[(1, 1)].re - 0.75).abs() < 1e-14);

        // point mass: V_j|φ⟩ ⊗ |ξ_j⟩
        let s = honest_state(&p, &Distribution::point_mass(2, 1).unwrap(), Bit::One).unwrap();
        let expect = [0., h(), 0., -h()];
        for (z, e) in s.amplitudes().iter().zip(expect) {
            assert!((z - c(e, 0.)).norm() < 1e-14);
        }
    }

    #[test]
    fn effective_distribution_examples() {
        let e1 = Distribution::point_mass(2, 0).unwrap();
        let e2 = Distribution::point_mass(2, 1).unwrap();
        let single = effective_distribution(std::slice::from_ref(&e1), &Distribution::new(vec![1.0]).unwrap()).unwrap();
        assert_eq!(single, e1);
        let half = effective_distribution(&[e1.clone(), e2.clone()], &Distribution::uniform(2).unwrap()).unwrap();
        assert_eq!(half.weights(), &[0.5, 0.5]);
        let q = effective_distribution(&[e1.clone(), e2], &Distribution::new(vec![0.25, 0.75]).unwrap()).unwrap();
        assert_eq!(q.weights(), &[0.25, 0.75]);
        assert!(effective_distribution(&[e1], &Distribution::uniform(2).unwrap()).is_err());
    }

    #[test]
    fn meta_purification_single_branch_reduces_to_committed_state() {
        let p = make_family(Family::Near, 3, 2, 2).unwrap();
        let w = Distribution::new(vec![0.3, 0.7]).unwrap();
        let mp = meta_purify(&p, std::slice::from_ref(&w), &Distribution::new(vec![1.0]).unwrap()).unwrap();
        let (prob, post) = collapse_ancilla(&mp, Bit::One, 0).unwrap();
        assert!((prob - 1.0).abs() < 1e-14);
        let direct = committed_state(&p, Bit::One, &w).unwrap();
        assert!(post.phase_distance(&direct).unwrap() < 1e-10);
    }

    #[test]
    fn meta_purification_over_extremes_is_uniform_purification() {
        let p = make_family(Family::Near, 3, 2, 2).unwrap();
        let extremes = [Distribution::point_mass(2, 0).unwrap(), Distribution::point_mass(2, 1).unwrap()];
        let mp = meta_purify(&p, &extremes, &Distribution::uniform(2).unwrap()).unwrap();
        let uni = committed_state(&p, Bit::Zero, &Distribution::uniform(2).unwrap()).unwrap();
        let d = trace_distance(
            &alice_visible(mp.state(Bit::Zero)).unwrap(),
            &alice_visible(&uni).unwrap(),
        )
        .unwrap();
        assert!(d < 1e-12);
        // χ is perfectly correlated with ξ: Bob's ancillas carry the same label
        let anc = mp.state(Bit::Zero).partial_trace(&[XI, CHI]).unwrap();
        assert!((anc.matrix()[(0, 0)].re - 0.5).abs() < 1e-12);
        assert!((anc.matrix()[(3, 3)].re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn collapse_uniform_three_way() {
        let p = make_family(Family::Perfect, 2, 3, 2).unwrap();
        let omegas = [
            Distribution::new(vec![0.2, 0.3, 0.5]).unwrap(),
            Distribution::point_mass(3, 2).unwrap(),
            Distribution::uniform(3).unwrap(),
        ];
        let mp = meta_purify(&p, &omegas, &Distribution::uniform(3).unwrap()).unwrap();
        for b in Bit::BOTH {
            let mut total = 0.0;
            for (k, omega) in omegas.iter().enumerate() {
                let (prob, post) = collapse_ancilla(&mp, b, k).unwrap();
                assert!((prob - 1.0 / 3.0).abs() < 1e-12);
                assert!((post.norm() - 1.0).abs() < 1e-12);
                let direct = committed_state(&p, b, omega).unwrap();
                assert!(post.phase_distance(&direct).unwrap() < 1e-10);
                total += prob;
            }
            assert!((total - 1.0).abs() < 1e-10);
        }
        assert!(matches!(collapse_ancilla(&mp, Bit::Zero, 3), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn collapse_zero_probability_branch_errors() {
        let p = make_family(Family::Perfect, 2, 2, 2).unwrap();
        let omegas = [Distribution::point_mass(2, 0).unwrap(), Distribution::point_mass(2, 1).unwrap()];
        let mp = meta_purify(&p, &omegas, &Distribution::new(vec![1.0, 0.0]).unwrap()).unwrap();
        assert_eq!(
            collapse_ancilla(&mp, Bit::Zero, 1).unwrap_err(),
            Error::ZeroProbability { index: 1 }
        );
    }

    #[test]
    fn alice_visible_requires_ancilla_and_keeps_product_part() {
        let p = make_family(Family::Near, 2, 2, 2).unwrap();
        assert!(alice_visible(p.phi(Bit::Zero)).is_err());
        let with_anc = p
            .phi(Bit::Zero)
            .tensor(&JointPureState::basis(RegisterLayout::single(XI, 2, Owner::BobAncilla).unwrap(), 1).unwrap())
            .unwrap();
        let v = alice_visible(&with_anc).unwrap();
        assert!(max_abs(&(v.matrix() - p.phi(Bit::Zero).density().matrix())) < 1e-14);
    }

    #[test]
    fn mismatched_effective_distributions_are_visible() {
        let p = make_family(Family::Near, 3, 2, 2).unwrap();
        let extremes = [Distribution::point_mass(2, 0).unwrap(), Distribution::point_mass(2, 1).unwrap()];
        let a = meta_purify(&p, &extremes, &Distribution::new(vec![0.9, 0.1]).unwrap()).unwrap();
        let b = meta_purify(&p, &extremes, &Distribution::new(vec![0.1, 0.9]).unwrap()).unwrap();
        let d = trace_distance(
            &alice_visible(a.state(Bit::Zero)).unwrap(),
            &alice_visible(b.state(Bit::Zero)).unwrap(),
        )
        .unwrap();
        assert!(d > 1e-3, "distance {d}");
    }
}
