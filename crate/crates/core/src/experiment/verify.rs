use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::commands::{collapse_gap, evaluate_attack, family_guarantee, internal, omega_grid};
use super::config::{ExperimentConfig, ProtocolSpec};
use super::{Check, CliError, Outcome};
use crate::attack::{
    cheat_success, committed_state, concealment_deficit, meta_cheat_success, universal_cheat,
};
use crate::fidelity::{max_purification_overlap, trace_distance, uhlmann_fidelity};
use crate::hilbert::{
    max_abs, sqrtm_psd, svd, tol, unitarity_deviation, CMatrix, PartialTrace, C64,
};
use crate::protocol::{
    alice_visible, honest_state, cyclic_shift, meta_purify, Bit, Distribution, Family,
    ProtocolInstance, ALICE, BOB,
};
use crate::random::{random_density, random_matrix, random_state, sample_simplex};
use crate::Error;

/// Random inputs per linear-algebra and fidelity check.
const TRIALS: usize = 10;

/// Built-in sizes checked when no config is given.
pub fn default_matrix() -> Vec<ExperimentConfig> {
    let family = |protocol| ExperimentConfig {
        protocol,
        omega_samples: 20,
        seed: 0,
        sweep: None,
        output: None,
        bob_sub: None,
    };
    vec![
        family(ProtocolSpec::Perfect { n: 1, m: 2, d: 2 }),
        family(ProtocolSpec::Perfect { n: 1, m: 3, d: 3 }),
        family(ProtocolSpec::Near { n: 4, m: 3, d: 2 }),
        family(ProtocolSpec::Near { n: 6, m: 2, d: 3 }),
    ]
}

#[derive(Debug, Serialize)]
struct SuiteReport {
    instance: String,
    suite: &'static str,
    checks: Vec<Check>,
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    seed: u64,
    passed: bool,
    suites: &'a [SuiteReport],
}

fn label(cfg: &ExperimentConfig) -> String {
    match &cfg.protocol {
        ProtocolSpec::Perfect { n, m, d } => format!("perfect N={n} m={m} d={d}"),
        ProtocolSpec::Near { n, m, d } => format!("near N={n} m={m} d={d}"),
        ProtocolSpec::Custom { n, d_a, d_b, actions, .. } => {
            format!("custom N={n} m={} d_a={d_a} d_b={d_b}", actions.len())
        }
    }
}

/// Runs every module suite on each configuration. Instance construction
/// failures that break a protocol invariant are reported as failed checks;
/// anything else in the config is a config error.
pub fn cmd_verify(cfg: Option<&ExperimentConfig>, seed: u64) -> Result<Outcome, CliError> {
    let configs = match cfg {
        Some(c) => vec![c.clone()],
        None => default_matrix(),
    };
    let mut suites = Vec::new();
    for c in &configs {
        let instance = label(c);
        let p = match c.instance(c.security()) {
            Ok(p) => p,
            Err(e) => {
                let id = match e {
                    Error::NonUnitaryAction { .. } | Error::NotUnitary { .. } => {
                        "protocol.action_unitarity"
                    }
                    Error::NotNormalized { .. } => "protocol.normalization",
                    other => return Err(CliError::Config(other.to_string())),
                };
                suites.push(SuiteReport {
                    instance,
                    suite: "protocol",
                    checks: vec![Check::new(id, false, e.to_string())],
                });
                continue;
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let runs: [(&'static str, Vec<Check>); 4] = [
            ("hilbert", hilbert_suite(&p, &mut rng)?),
            ("fidelity", fidelity_suite(&p, &mut rng)?),
            ("protocol", protocol_suite(c, &p, &mut rng)?),
            ("attack", attack_suite(c, &p, seed)?),
        ];
        for (suite, checks) in runs {
            suites.push(SuiteReport {
                instance: instance.clone(),
                suite,
                checks,
            });
        }
    }

    let mut summary = Vec::new();
    let mut checks = Vec::new();
    for s in &suites {
        let failed = s.checks.iter().filter(|c| !c.passed).count();
        summary.push(format!(
            "{} [{}] {}/{} passed",
            s.suite,
            s.instance,
            s.checks.len() - failed,
            s.checks.len()
        ));
        checks.extend(s.checks.iter().cloned());
    }
    let passed = checks.iter().all(|c| c.passed);
    let mut text = serde_json::to_string_pretty(&VerifyReport {
        seed,
        passed,
        suites: &suites,
    })
    .expect("report serializes");
    text.push('\n');
    Ok(Outcome {
        text,
        checks,
        summary,
    })
}

fn hilbert_suite(p: &ProtocolInstance, rng: &mut ChaCha8Rng) -> Result<Vec<Check>, CliError> {
    let (da, db, m) = (p.d_a(), p.d_b(), p.m());
    let mut svd_err: f64 = 0.0;
    let mut sqrt_err: f64 = 0.0;
    for _ in 0..TRIALS {
        for (r, c) in [(da, db * m), (da * db, m)] {
            let a = random_matrix(r, c, rng);
            let s = svd(&a).map_err(internal)?;
            svd_err = svd_err
                .max(max_abs(&(s.reconstruct() - &a)))
                .max(unitarity_deviation(&s.u))
                .max(unitarity_deviation(&s.v));
        }
        let rho = random_density(db * m, rng);
        let root = sqrtm_psd(&rho).map_err(internal)?;
        sqrt_err = sqrt_err.max(max_abs(&(&root * &root - &rho)));
    }

    let layout = p.committed_layout().map_err(internal)?;
    let mut norm_err: f64 = 0.0;
    let mut trace_err: f64 = 0.0;
    for _ in 0..TRIALS {
        let w = Distribution::new(sample_simplex(m, rng)).map_err(internal)?;
        for b in Bit::BOTH {
            let s = committed_state(p, b, &w).map_err(internal)?;
            norm_err = norm_err.max((s.norm() - 1.0).abs());
            let reduced = s.partial_trace(&[BOB]).map_err(internal)?;
            trace_err = trace_err.max((reduced.trace() - 1.0).abs());
        }
    }
    let random = random_state(&layout, rng);
    let full = random.partial_trace(&layout.names()).map_err(internal)?;
    let full_err = max_abs(&(full.matrix() - random.density().matrix()));

    Ok(vec![
        Check::new("hilbert.svd", svd_err <= tol::SVD, format!("max error {svd_err:e}")),
        Check::new("hilbert.sqrtm", sqrt_err <= tol::SQRT, format!("max error {sqrt_err:e}")),
        Check::new(
            "hilbert.normalization",
            norm_err <= tol::NORM,
            format!("max | |psi| - 1 | = {norm_err:e}"),
        ),
        Check::new(
            "hilbert.partial_trace",
            trace_err <= tol::NORM && full_err <= tol::HERM,
            format!("trace error {trace_err:e}, keep-all error {full_err:e}"),
        ),
    ])
}

fn fidelity_suite(p: &ProtocolInstance, rng: &mut ChaCha8Rng) -> Result<Vec<Check>, CliError> {
    let layout = p.phi(Bit::Zero).layout().clone();
    let mut gap: f64 = 0.0;
    let mut range_err: f64 = 0.0;
    for _ in 0..TRIALS {
        let a = random_state(&layout, rng);
        let b = random_state(&layout, rng);
        let (ra, rb) = (
            a.partial_trace(&[BOB]).map_err(internal)?,
            b.partial_trace(&[BOB]).map_err(internal)?,
        );
        let f = uhlmann_fidelity(&ra, &rb).map_err(internal)?.value;
        let f_rev = uhlmann_fidelity(&rb, &ra).map_err(internal)?.value;
        let o = max_purification_overlap(&a, &b, &[ALICE]).map_err(internal)?;
        gap = gap.max((o.value - f).abs());
        range_err = range_err
            .max((f - f_rev).abs())
            .max((-f).max(0.0))
            .max((f - 1.0).max(0.0));
    }
    Ok(vec![
        Check::new("fidelity.uhlmann_overlap", gap <= 1e-8, format!("max gap {gap:e}")),
        Check::new(
            "fidelity.range_symmetry",
            range_err <= tol::PSD,
            format!("max violation {range_err:e}"),
        ),
    ])
}

fn protocol_suite(
    cfg: &ExperimentConfig,
    p: &ProtocolInstance,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Check>, CliError> {
    let m = p.m();
    let mut checks = Vec::new();

    let unit = p
        .actions()
        .iter()
        .map(|v| unitarity_deviation(v.matrix()))
        .fold(0.0, f64::max);
    checks.push(Check::new(
        "protocol.action_unitarity",
        unit <= tol::UNIT,
        format!("max deviation {unit:e}"),
    ));

    let grid = omega_grid(m, cfg.omega_samples, rng)?;
    if let Some(g) = family_guarantee(cfg.family(), cfg.security()) {
        let mut worst: f64 = 0.0;
        for (_, w) in &grid {
            worst = worst.max(concealment_deficit(p, w).map_err(internal)?.deficit);
        }
        checks.push(Check::new(
            "protocol.family_guarantee",
            worst <= g,
            format!("max deficit {worst:e} vs {g:e}"),
        ));
    }

    let u = universal_cheat(p).map_err(internal)?.unitary;
    let mut visible: f64 = 0.0;
    let mut reduction: f64 = 0.0;
    let mut collapse: f64 = 0.0;
    let mut plans = vec![(
        (0..m).map(|j| Distribution::point_mass(m, j)).collect::<Result<Vec<_>, _>>().map_err(internal)?,
        Distribution::uniform(m).map_err(internal)?,
    )];
    for _ in 0..3 {
        let n = 3;
        let omegas = (0..n)
            .map(|_| Distribution::new(sample_simplex(m, rng)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(internal)?;
        plans.push((omegas, Distribution::new(sample_simplex(n, rng)).map_err(internal)?));
    }
    for (omegas, pk) in &plans {
        let mp = meta_purify(p, omegas, pk).map_err(internal)?;
        let eff = mp.effective().map_err(internal)?;
        for b in Bit::BOTH {
            let honest = honest_state(p, &eff, b).map_err(internal)?;
            let td = trace_distance(
                &alice_visible(mp.state(b)).map_err(internal)?,
                &alice_visible(&honest).map_err(internal)?,
            )
            .map_err(internal)?;
            visible = visible.max(td);
            collapse = collapse.max(collapse_gap(p, &mp, b)?);
        }
        let gap = (meta_cheat_success(&mp, &u).map_err(internal)?
            - cheat_success(p, &eff, &u).map_err(internal)?)
        .abs();
        reduction = reduction.max(gap);
    }
    checks.push(Check::new(
        "protocol.bob_substitution",
        visible <= 1e-10,
        format!("max trace distance {visible:e}"),
    ));
    checks.push(Check::new(
        "protocol.reduction_identity",
        reduction <= 1e-10,
        format!("max success gap {reduction:e}"),
    ));
    checks.push(Check::new(
        "protocol.collapse",
        collapse <= 1e-10,
        format!("max collapse gap {collapse:e}"),
    ));
    Ok(checks)
}

/// `min_θ ‖a − e^{iθ} b‖_max`, with `θ` taken from `tr(b†a)`.
fn phase_aligned_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let t: C64 = (b.adjoint() * a).trace();
    let phase = if t.norm() > 0.0 { t / t.norm() } else { C64::new(1.0, 0.0) };
    max_abs(&(a - b * phase))
}

fn attack_suite(cfg: &ExperimentConfig, p: &ProtocolInstance, seed: u64) -> Result<Vec<Check>, CliError> {
    let (_, mut checks) = evaluate_attack(p, cfg.security(), cfg.omega_samples, seed)?;
    if cfg.family() == Some(Family::Perfect) {
        let u = universal_cheat(p).map_err(internal)?.unitary;
        let dist = phase_aligned_distance(u.matrix(), &cyclic_shift(p.d_a()));
        checks.push(Check::new(
            "attack.perfect_unitary",
            dist <= 1e-8,
            format!("max |U' - X| up to phase {dist:e}"),
        ));
    }
    Ok(checks)
}
