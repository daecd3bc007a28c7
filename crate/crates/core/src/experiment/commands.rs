use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, Format};
use super::report::{render, BobSubRow, ConcealRow, ReportRow};
use super::{Check, CliError, Outcome};
use crate::attack::{
    bob_unitary_invariance, check_decomposition, cheat_success, committed_state,
    concealment_deficit, meta_cheat_success, raw_decomposition, universal_cheat,
    weighted_moments, ExtremeSet, BOUND_TOL,
};
use crate::fidelity::trace_distance;
use crate::hilbert::{tol, Operator};
use crate::protocol::{
    alice_visible, honest_state, collapse_ancilla, meta_purify, Bit, Distribution, Family,
    ProtocolInstance, BOB, XI,
};
use crate::random::{random_unitary, sample_simplex};
use crate::Error;

/// Largest change in success allowed under a Bob-side unitary.
const BOB_INVARIANCE_TOL: f64 = 1e-10;
/// Trace-distance, collapse and reduction tolerance.
const STATE_TOL: f64 = 1e-10;
/// Slack on the nonincreasing `δ'` sweep check.
const MONOTONE_TOL: f64 = 1e-12;

pub(super) fn internal(e: Error) -> CliError {
    CliError::Invariant(e.to_string())
}

pub(super) fn build(cfg: &ExperimentConfig, n: u32) -> Result<ProtocolInstance, CliError> {
    cfg.instance(n).map_err(|e| CliError::Config(e.to_string()))
}

/// Extreme points first, then `samples` flat-simplex draws.
pub(super) fn omega_grid(
    m: usize,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(&'static str, Distribution)>, CliError> {
    let mut out: Vec<_> = ExtremeSet::new(m)
        .map_err(internal)?
        .members()
        .iter()
        .map(|w| ("extreme", w.clone()))
        .collect();
    for _ in 0..samples {
        out.push(("sample", Distribution::new(sample_simplex(m, rng)).map_err(internal)?));
    }
    Ok(out)
}

/// The deficit each built-in family promises for every `ω`.
pub(super) fn family_guarantee(family: Option<Family>, n: u32) -> Option<f64> {
    match family? {
        Family::Perfect => Some(STATE_TOL),
        Family::Near => Some(2f64.powi(-(n as i32)) + MONOTONE_TOL),
    }
}

/// Synthesizes `U'_A` once and evaluates it over the extreme points and
/// `samples` random `ω`, reseeding from `seed`.
pub fn evaluate_attack(
    p: &ProtocolInstance,
    n: u32,
    samples: usize,
    seed: u64,
) -> Result<(ReportRow, Vec<Check>), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = p.m();
    let omegas = omega_grid(m, samples, &mut rng)?;
    let uc = universal_cheat(p).map_err(internal)?;
    let u = &uc.unitary;
    let report = raw_decomposition(p, u).map_err(internal)?;
    let bound = report.bound();
    let mut checks = Vec::new();

    checks.push(match check_decomposition(p, &report) {
        Ok(()) => Check::new("attack.identities", true, format!("delta' = {:e}", report.delta_prime)),
        Err(e) => Check::new("attack.identities", false, e.to_string()),
    });

    let c = report.c_estimate;
    let c_ok = if report.is_perfect() {
        c == 0.0
    } else {
        c > 0.0 && c <= m as f64 * (1.0 + 1e-9)
    };
    checks.push(Check::new("attack.c_range", c_ok, format!("c = {c}, m = {m}")));

    let mut successes = Vec::with_capacity(omegas.len());
    let mut moments_gap: f64 = 0.0;
    let mut moments_err = None;
    for (_, w) in &omegas {
        let s = cheat_success(p, w, u).map_err(internal)?;
        match weighted_moments(&report, w) {
            Ok(wm) => moments_gap = moments_gap.max((wm.success() - s).abs()),
            Err(e) => moments_err = moments_err.or(Some(e.to_string())),
        }
        successes.push(s);
    }
    let min_success = successes.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean_success = successes.iter().sum::<f64>() / successes.len() as f64;
    checks.push(match moments_err {
        Some(e) => Check::new("attack.moments", false, e),
        None => Check::new(
            "attack.moments",
            moments_gap <= BOUND_TOL,
            format!("max |moment success - success| = {moments_gap:e}"),
        ),
    });
    checks.push(Check::new(
        "attack.success_bound",
        min_success > bound - BOUND_TOL,
        format!("min success {min_success} vs bound {bound}"),
    ));
    if report.is_perfect() {
        checks.push(Check::new(
            "attack.perfect_success",
            min_success >= 1.0 - BOUND_TOL,
            format!("min success {min_success}"),
        ));
    }

    let bob = p.committed_layout().map_err(internal)?.subset(&[BOB, XI]).map_err(internal)?;
    let u_b = Operator::unitary(bob.clone(), random_unitary(bob.total_dim(), &mut rng))
        .map_err(internal)?;
    let probe = &omegas.last().expect("at least one extreme point").1;
    let change = bob_unitary_invariance(p, probe, u, &u_b).map_err(internal)?;
    checks.push(Check::new(
        "attack.bob_invariance",
        change <= BOB_INVARIANCE_TOL,
        format!("success change {change:e}"),
    ));

    let row = ReportRow {
        n,
        m,
        d: p.d_a(),
        delta_prime: report.delta_prime,
        c_estimate: c,
        min_success,
        mean_success,
        bound,
        margin: min_success - bound,
        all_bounds_hold: checks.iter().all(|c| c.passed),
    };
    Ok((row, checks))
}

pub fn cmd_conceal(cfg: &ExperimentConfig, seed: u64, format: Format) -> Result<Outcome, CliError> {
    let n = cfg.security();
    let p = build(cfg, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for (index, (kind, w)) in omega_grid(p.m(), cfg.omega_samples, &mut rng)?.into_iter().enumerate() {
        let f = concealment_deficit(&p, &w).map_err(internal)?;
        rows.push(ConcealRow {
            index,
            kind,
            omega: w.weights().to_vec(),
            fidelity: f.value,
            deficit: f.deficit,
        });
    }
    let max_deficit = rows.iter().map(|r| r.deficit).fold(0.0, f64::max);
    let mut checks = Vec::new();
    let mut summary = vec![format!("max deficit {max_deficit:e} over {} distributions", rows.len())];
    if let Some(g) = family_guarantee(cfg.family(), n) {
        checks.push(Check::new(
            "protocol.family_guarantee",
            max_deficit <= g,
            format!("max deficit {max_deficit:e} vs guarantee {g:e}"),
        ));
        summary.push(format!("family guarantee {g:e}"));
    }
    Ok(Outcome {
        text: render(&rows, seed, format),
        checks,
        summary,
    })
}

pub fn cmd_attack(cfg: &ExperimentConfig, seed: u64, format: Format) -> Result<Outcome, CliError> {
    let n = cfg.security();
    let p = build(cfg, n)?;
    let (row, checks) = evaluate_attack(&p, n, cfg.omega_samples, seed)?;
    let summary = vec![format!(
        "delta' {:e}, c {}, min success {}, bound {}",
        row.delta_prime, row.c_estimate, row.min_success, row.bound
    )];
    Ok(Outcome {
        text: render(&[row], seed, format),
        checks,
        summary,
    })
}

/// One attack row per `N`, computed in parallel. Every row reseeds from
/// the same seed, so rows differ only through `N`.
pub fn cmd_sweep(cfg: &ExperimentConfig, seed: u64, format: Format) -> Result<Outcome, CliError> {
    let range = cfg
        .sweep
        .ok_or_else(|| CliError::Config("sweep needs a [sweep] table with N_min and N_max".into()))?;
    let ns: Vec<u32> = (range.n_min..=range.n_max).collect();
    for &n in &ns {
        build(cfg, n)?;
    }
    let results: Vec<(ReportRow, Vec<Check>)> = ns
        .par_iter()
        .map(|&n| evaluate_attack(&build(cfg, n)?, n, cfg.omega_samples, seed))
        .collect::<Result<_, _>>()?;

    let mut checks = Vec::new();
    for (row, row_checks) in &results {
        for c in row_checks.iter().filter(|c| !c.passed) {
            checks.push(Check::new(c.id, false, format!("N = {}: {}", row.n, c.detail)));
        }
    }
    let rows: Vec<ReportRow> = results.into_iter().map(|(r, _)| r).collect();
    if cfg.family().is_some() {
        let delta_ok = rows
            .windows(2)
            .all(|w| w[1].delta_prime <= w[0].delta_prime + MONOTONE_TOL);
        checks.push(Check::new("sweep.delta_monotone", delta_ok, "delta' nonincreasing in N"));
        let success_ok = rows
            .windows(2)
            .all(|w| w[1].min_success >= w[0].min_success - BOUND_TOL);
        checks.push(Check::new(
            "sweep.success_monotone",
            success_ok,
            "min success nondecreasing in N",
        ));
    }
    let summary = vec![format!("{} rows, N = {}..={}", rows.len(), range.n_min, range.n_max)];
    Ok(Outcome {
        text: render(&rows, seed, format),
        checks,
        summary,
    })
}

/// Largest collapse error over the branches: `|prob − p_k|` and
/// `1 − |⟨post|Ψ(ω_k)⟩|`.
pub(super) fn collapse_gap(
    p: &ProtocolInstance,
    mp: &crate::protocol::MetaPurification,
    b: Bit,
) -> Result<f64, CliError> {
    let mut gap: f64 = 0.0;
    for (k, w) in mp.omegas().iter().enumerate() {
        let pk = mp.pk().weights()[k];
        if pk <= 0.0 {
            continue;
        }
        let (prob, state) = collapse_ancilla(mp, b, k).map_err(internal)?;
        let honest = committed_state(p, b, w).map_err(internal)?;
        gap = gap
            .max((prob - pk).abs())
            .max(1.0 - state.inner(&honest).map_err(internal)?.norm());
    }
    Ok(gap)
}

pub fn cmd_bob_sub(cfg: &ExperimentConfig, seed: u64, format: Format) -> Result<Outcome, CliError> {
    let plan = cfg.bob_sub_plan()?;
    let p = build(cfg, cfg.security())?;
    let mp = meta_purify(&p, &plan.omegas, &plan.p).map_err(internal)?;
    let eff = mp.effective().map_err(internal)?;
    let effective_gap = eff.max_abs_diff(&plan.target).map_err(internal)?;
    let matched = effective_gap <= tol::NORM;
    let u = universal_cheat(&p).map_err(internal)?.unitary;
    let reduction_gap = (meta_cheat_success(&mp, &u).map_err(internal)?
        - cheat_success(&p, &eff, &u).map_err(internal)?)
    .abs();

    let mut rows = Vec::new();
    let mut checks = vec![Check::new(
        "protocol.effective_match",
        matched,
        format!("max |q'' - target| = {effective_gap:e}"),
    )];
    for b in Bit::BOTH {
        let visible = alice_visible(mp.state(b)).map_err(internal)?;
        let honest = alice_visible(&honest_state(&p, &plan.target, b).map_err(internal)?)
            .map_err(internal)?;
        let td = trace_distance(&visible, &honest).map_err(internal)?;
        let cg = collapse_gap(&p, &mp, b)?;
        let b_idx = b.index() as u8;
        if matched {
            checks.push(Check::new(
                "protocol.bob_substitution",
                td <= STATE_TOL,
                format!("b = {b_idx}: trace distance {td:e}"),
            ));
        }
        checks.push(Check::new(
            "protocol.collapse",
            cg <= STATE_TOL,
            format!("b = {b_idx}: collapse gap {cg:e}"),
        ));
        rows.push(BobSubRow {
            b: b_idx,
            trace_distance: td,
            effective: eff.weights().to_vec(),
            target: plan.target.weights().to_vec(),
            effective_gap,
            collapse_gap: cg,
            reduction_gap,
            all_bounds_hold: matched && td <= STATE_TOL && cg <= STATE_TOL && reduction_gap <= STATE_TOL,
        });
    }
    checks.push(Check::new(
        "protocol.reduction_identity",
        reduction_gap <= STATE_TOL,
        format!("success gap {reduction_gap:e}"),
    ));
    let summary = vec![format!(
        "trace distances {:e} / {:e}, effective gap {effective_gap:e}",
        rows[0].trace_distance, rows[1].trace_distance
    )];
    Ok(Outcome {
        text: render(&rows, seed, format),
        checks,
        summary,
    })
}
