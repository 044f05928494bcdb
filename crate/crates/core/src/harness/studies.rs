use std::time::Instant;

use rand::Rng;

use super::config::{ExperimentConfig, ExperimentKind};
use super::qubit::UNITARY_STREAM;
use super::records::{Method, TrialRecord};
use crate::circuit::{probe_state, sample_counts, BasisTag};
use crate::error::{Error, Result};
use crate::estimation::{
    average_relative_error, closeness_measure, estimate_close_identity_probabilities,
    gm_first_order_estimate_probabilities, phase_errors, reconstruct_coefficients, select_phase_candidate,
};
use crate::fisher::{
    cfi_numeric, control_probabilities, fisher_trace_distance, hamiltonian_unitary, qfi_numeric, ParamSet,
};
use crate::par::{self, Execution};
use crate::qudit::linalg::C64;
use crate::qudit::{
    exp_hamiltonian, gell_mann_basis, wh_expand, HamiltonianParams, UnitaryMatrix, WHCoefficients, WHIndex,
};
use crate::seed;
use crate::sqpt::agf_between_unitaries;

fn check_kind(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<()> {
    cfg.validate()?;
    if cfg.experiment != kind {
        return Err(Error::InvalidConfig(format!("expected {}, got {}", kind.name(), cfg.experiment.name())));
    }
    Ok(())
}

fn unitary_rng(cfg: &ExperimentConfig, unitary_id: usize) -> rand_chacha::ChaCha8Rng {
    seed::rng(seed::derive(cfg.seed, &[cfg.experiment.seed_key(), UNITARY_STREAM, unitary_id as u64]))
}

/// `λ_j ~ U(−λ_max, λ_max)`.
fn symmetric_lambda(cfg: &ExperimentConfig, unitary_id: usize) -> Result<HamiltonianParams> {
    let mut rng = unitary_rng(cfg, unitary_id);
    let m = cfg.lambda_max;
    HamiltonianParams::new(cfg.d, (0..cfg.d * cfg.d - 1).map(|_| rng.random_range(-m..=m)).collect())
}

/// Scale log-uniform in `[λ_min, λ_max]`, then `λ_j ~ U(0, scale)`.
fn scanned_lambda(cfg: &ExperimentConfig, unitary_id: usize) -> Result<HamiltonianParams> {
    let mut rng = unitary_rng(cfg, unitary_id);
    let (lo, hi) = (cfg.lambda_min.ln(), cfg.lambda_max.ln());
    let scale = if hi > lo { rng.random_range(lo..hi).exp() } else { cfg.lambda_max };
    HamiltonianParams::new(cfg.d, (0..cfg.d * cfg.d - 1).map(|_| rng.random_range(0.0..scale)).collect())
}

fn trial_seed(cfg: &ExperimentConfig, unitary_id: usize, rep: usize, method: Method, shots: u64) -> u64 {
    seed::derive(cfg.seed, &[cfg.experiment.seed_key(), unitary_id as u64, rep as u64, method.seed_key(), shots])
}

fn blank(cfg: &ExperimentConfig, method: Method, unitary_id: usize, rep: usize, shots: u64, seed: u64) -> TrialRecord {
    TrialRecord {
        experiment: cfg.experiment.name().into(),
        scenario: cfg.scenarios[0].clone(),
        method: method.name().into(),
        d: cfg.d,
        unitary_id,
        repetition: rep,
        shots,
        agf: None,
        err_amp: None,
        err_phase: None,
        one_minus_r0: None,
        seed,
        error: None,
        wall_time_s: 0.0,
    }
}

fn finish(mut rec: TrialRecord, start: Instant, result: Result<()>) -> TrialRecord {
    if let Err(e) = result {
        rec.agf = None;
        rec.err_amp = None;
        rec.err_phase = None;
        rec.error = Some(format!("{}: {e}", e.kind()));
    }
    rec.wall_time_s = start.elapsed().as_secs_f64();
    rec
}

/// Probabilities at `shots` (exact for `0`).
fn observed(p: &[f64], shots: u64, seed: u64, tag: BasisTag) -> Result<Vec<f64>> {
    if shots == 0 {
        Ok(p.to_vec())
    } else {
        Ok(sample_counts(p, shots, seed, tag)?.frequencies())
    }
}

/// Runs `trial` for every (unitary, repetition, shots) item; exact-probability
/// items (`shots = 0`) run for repetition 0 only.
fn sweep<C, F>(cfg: &ExperimentConfig, exec: Execution, cases: &[C], trial: F) -> Vec<TrialRecord>
where
    C: Sync,
    F: Fn(&C, usize, usize, u64) -> Vec<TrialRecord> + Send + Sync,
{
    let items: Vec<(usize, usize)> =
        (0..cases.len()).flat_map(|i| (0..cfg.n_repetitions).map(move |r| (i, r))).collect();
    par::map(exec, items, |(i, rep)| {
        cfg.shots.iter().filter(|&&s| s > 0 || rep == 0).flat_map(|&s| trial(&cases[i], i, rep, s)).collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Fidelity `(d |⟨v, u⟩|² + 1)/(d + 1)` between coefficient vectors, which
/// for unitaries equals the average gate fidelity.
fn coefficient_fidelity(v: &WHCoefficients, u: &WHCoefficients) -> f64 {
    let d = u.dim() as f64;
    let nv = v.norm_sqr().sqrt();
    let overlap: C64 = v.as_slice().iter().zip(u.as_slice()).map(|(a, b)| a.conj() * b).sum();
    let o = if nv > 0.0 { overlap.norm_sqr() / (nv * nv) } else { 0.0 };
    ((d * o + 1.0) / (d + 1.0)).clamp(0.0, 1.0)
}

struct CloseIdCase {
    u: UnitaryMatrix,
    truth: WHCoefficients,
    probs: Vec<f64>,
    one_minus_r0: f64,
}

/// Close-to-identity unitaries estimated from tilde-H statistics, phases
/// resolved against the truth. `err_amp` is the largest amplitude error,
/// `err_phase` the largest circular phase error and `agf` the coefficient
/// fidelity of the reconstruction.
pub fn run_close_identity_study(cfg: &ExperimentConfig, exec: Execution) -> Result<Vec<TrialRecord>> {
    check_kind(cfg, ExperimentKind::CloseIdentityStudy)?;
    let d = cfg.d;
    let cases = par::map_range(exec, cfg.n_unitaries, |i| -> Result<CloseIdCase> {
        let u = exp_hamiltonian(&symmetric_lambda(cfg, i)?)?;
        Ok(CloseIdCase {
            truth: wh_expand(u.matrix())?,
            probs: control_probabilities(&u, BasisTag::TildeH)?,
            one_minus_r0: closeness_measure(&u),
            u,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(sweep(cfg, exec, &cases, |case, i, rep, shots| {
        let s = trial_seed(cfg, i, rep, Method::Procedure, shots);
        let start = Instant::now();
        let mut rec = blank(cfg, Method::Procedure, i, rep, shots, s);
        rec.one_minus_r0 = Some(case.one_minus_r0);
        let result = (|| {
            let p = observed(&case.probs, shots, s, BasisTag::TildeH)?;
            let est = estimate_close_identity_probabilities(&p, d)?;
            let phases = select_phase_candidate(&est, &case.truth)?;
            let rebuilt = reconstruct_coefficients(&est, &phases)?;
            let amp = WHIndex::all(d).map(|n| (est.amplitude(n) - case.truth.amplitude(n)).abs()).fold(0.0, f64::max);
            rec.err_amp = Some(amp);
            rec.err_phase = Some(phase_errors(&phases, &case.truth).into_iter().fold(0.0, f64::max));
            rec.agf = Some(coefficient_fidelity(&rebuilt, &case.truth.phase_fixed()));
            debug_assert_eq!(case.u.dim(), d);
            Ok(())
        })();
        vec![finish(rec, start, result)]
    }))
}

struct GmCase {
    u: UnitaryMatrix,
    lambda: HamiltonianParams,
    probs: Vec<f64>,
    one_minus_r0: f64,
}

/// First-order Hamiltonian estimates from Gell-Mann basis statistics.
/// `err_amp` is the average relative error of `λ̂`, `agf` the fidelity of
/// `exp(iĤ)` to the truth.
pub fn run_gm_accuracy_study(cfg: &ExperimentConfig, exec: Execution) -> Result<Vec<TrialRecord>> {
    check_kind(cfg, ExperimentKind::GmAccuracyStudy)?;
    let d = cfg.d;
    let cases = par::map_range(exec, cfg.n_unitaries, |i| -> Result<GmCase> {
        let lambda = scanned_lambda(cfg, i)?;
        let u = exp_hamiltonian(&lambda)?;
        Ok(GmCase {
            probs: control_probabilities(&u, BasisTag::GmBasis)?,
            one_minus_r0: closeness_measure(&u),
            u,
            lambda,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(sweep(cfg, exec, &cases, |case, i, rep, shots| {
        let s = trial_seed(cfg, i, rep, Method::GmFirstOrder, shots);
        let start = Instant::now();
        let mut rec = blank(cfg, Method::GmFirstOrder, i, rep, shots, s);
        rec.one_minus_r0 = Some(case.one_minus_r0);
        let result = (|| {
            let p = observed(&case.probs, shots, s, BasisTag::GmBasis)?;
            let est = gm_first_order_estimate_probabilities(&p, d)?;
            rec.err_amp = Some(average_relative_error(&est, &case.lambda));
            rec.agf = Some(agf_between_unitaries(&exp_hamiltonian(&est)?, &case.u)?);
            Ok(())
        })();
        vec![finish(rec, start, result)]
    }))
}

/// Trace distance between the QFI of the Hamiltonian parameters and the CFI
/// of the computational (`cfi-wh`) and Gell-Mann (`cfi-gm`) control
/// measurements, stored in `err_amp`. Exact probabilities only: one row pair
/// per unitary at `shots = 0`.
pub fn run_fisher_distance_study(cfg: &ExperimentConfig, exec: Execution) -> Result<Vec<TrialRecord>> {
    check_kind(cfg, ExperimentKind::FisherDistanceStudy)?;
    let d = cfg.d;
    let basis = gell_mann_basis(d)?;
    let psi: Vec<C64> = (0..d).map(|k| C64::new(if k == 0 { 1.0 } else { 0.0 }, 0.0)).collect();
    let probe = probe_state(&psi, d)?;
    let nested = par::map_range(exec, cfg.n_unitaries, |i| {
        let start = Instant::now();
        let lambda = scanned_lambda(cfg, i);
        let closeness = lambda.as_ref().ok().and_then(|l| exp_hamiltonian(l).ok()).map(|u| closeness_measure(&u));
        let dists = (|| -> Result<[f64; 2]> {
            let at = ParamSet::hamiltonian(&lambda?.lambda);
            let u_map = |x: &[f64]| hamiltonian_unitary(x, &basis);
            let q = qfi_numeric(u_map, &at, &probe, cfg.fd_step)?;
            let mut out = [0.0; 2];
            for (k, tag) in [BasisTag::Computational, BasisTag::GmBasis].into_iter().enumerate() {
                let c = cfi_numeric(|x: &[f64]| control_probabilities(&u_map(x)?, tag), &at, cfg.fd_step)?;
                out[k] = fisher_trace_distance(&c, &q, cfg.trace_convention)?;
            }
            Ok(out)
        })();
        let elapsed = start.elapsed().as_secs_f64() / 2.0;
        [Method::CfiWh, Method::CfiGm]
            .into_iter()
            .enumerate()
            .map(|(k, m)| {
                let mut rec = blank(cfg, m, i, 0, 0, trial_seed(cfg, i, 0, m, 0));
                rec.one_minus_r0 = closeness;
                match &dists {
                    Ok(v) => rec.err_amp = Some(v[k]),
                    Err(e) => rec.error = Some(format!("{}: {e}", e.kind())),
                }
                rec.wall_time_s = elapsed;
                rec
            })
            .collect::<Vec<_>>()
    });
    Ok(nested.into_iter().flatten().collect())
}
