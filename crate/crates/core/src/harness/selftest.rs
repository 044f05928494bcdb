//! Fast invariant checks run by the `selftest` subcommand.

use std::f64::consts::PI;

use rand::Rng;

use crate::circuit::{run_estimation, sample_counts, BasisTag};
use crate::error::Result;
use crate::estimation::{
    estimate_qubit_no_prior_probabilities, estimate_qubit_with_octant, qubit_probabilities, Octant, QubitAngles,
};
use crate::fisher::{
    cfi_close_identity, cfi_numeric, qfi_close_identity, qfi_numeric, qfi_qubit, qubit_procedure_probabilities,
    qubit_unitary, CloseIdParams, ParamSet, DEFAULT_STEP,
};
use crate::noise::{apply_readout_confusion, mitigate_probabilities, Confusion};
use crate::qudit::linalg::C64;
use crate::qudit::{haar_random_unitary, wh_expand};
use crate::sqpt::{agf_between_unitaries, average_gate_fidelity, exact_bloch, sqpt_from_bloch};
use crate::{circuit, estimation, seed};

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn ket0(d: usize) -> Vec<C64> {
    (0..d).map(|k| C64::new(if k == 0 { 1.0 } else { 0.0 }, 0.0)).collect()
}

fn circuit_amplitudes() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    let mut fid = 1.0f64;
    for d in 2..=5 {
        for s in 0..5 {
            let u = haar_random_unitary(d, seed::derive(1, &[d as u64, s]));
            let out = run_estimation(&u, &ket0(d))?;
            let w = wh_expand(u.matrix())?;
            for (a, b) in out.control.amplitudes().iter().zip(w.as_slice()) {
                worst = worst.max((a - b).norm());
            }
            fid = fid.min(out.target_fidelity);
        }
    }
    Ok((
        worst <= 1e-10 && fid >= 1.0 - 1e-12,
        format!("max amplitude error {worst:.2e}, min target fidelity {fid:.15}"),
    ))
}

fn qubit_estimators() -> Result<(bool, String)> {
    let mut rng = seed::rng(2);
    let mut octant_err = 0.0f64;
    for _ in 0..20 {
        let a = QubitAngles::new(
            rng.random_range(0.05..PI / 2.0 - 0.05),
            rng.random_range(0.05..PI - 0.05),
            rng.random_range(0.0..2.0 * PI),
        );
        let est = estimate_qubit_with_octant(&qubit_probabilities(&a), Octant::of_axis(a.axis()))?;
        octant_err = octant_err.max(agf_between_unitaries(&est.unitary(), &a.unitary()).map(|f| 1.0 - f)?);
    }
    let mut worst = 1.0f64;
    for s in 0..50 {
        let u = haar_random_unitary(2, seed::derive(3, &[s]));
        let noiseless = crate::noise::NoiseParams::noiseless();
        let probs = [circuit::QubitBasis::Z, circuit::QubitBasis::X, circuit::QubitBasis::Y].map(|b| {
            circuit::noisy_control_probabilities(
                &circuit::build_qubit_measurement_circuit(&u, b)?,
                &ket0(2),
                &noiseless,
            )
        });
        let [pz, px, py] = probs;
        let est = estimate_qubit_no_prior_probabilities(&pz?, &px?, &py?, &mut rng)?;
        worst = worst.min(agf_between_unitaries(&est.unitary(), &u)?);
    }
    Ok((
        octant_err <= 1e-10 && worst >= 1.0 - 1e-9,
        format!("octant 1−AGF {octant_err:.1e}, no-prior min AGF {worst:.12}"),
    ))
}

fn fisher_identities() -> Result<(bool, String)> {
    let mut rng = seed::rng(4);
    let mut worst = 0.0f64;
    for d in 2..=5 {
        let parts = estimation::partition_indices(d)?;
        for _ in 0..20 {
            let p = CloseIdParams::new(
                d,
                (0..parts.unpaired.len()).map(|_| rng.random_range(0.0..0.05)).collect(),
                (0..parts.plus.len()).map(|_| rng.random_range(0.0..0.05)).collect(),
                (0..parts.plus.len()).map(|_| rng.random_range(0.0..2.0 * PI)).collect(),
            )?;
            worst = worst.max(qfi_close_identity(&p)?.max_abs_diff(&cfi_close_identity(&p)?)?);
        }
    }
    let probe = circuit::probe_state(&ket0(2), 2)?;
    let at = ParamSet::qubit(0.7, 1.1, 0.4);
    let want = qfi_qubit(0.7, 1.1, 0.4);
    let q = qfi_numeric(qubit_unitary, &at, &probe, DEFAULT_STEP)?.max_abs_diff(&want)? / 4.0;
    let c = cfi_numeric(qubit_procedure_probabilities, &at, DEFAULT_STEP)?.max_abs_diff(&want)? / 4.0;
    Ok((
        worst <= 1e-12 && q <= 1e-4 && c <= 1e-4,
        format!("CFI−QFI block {worst:.1e}, qubit numeric rel {q:.1e} / {c:.1e}"),
    ))
}

fn sampling_and_mitigation() -> Result<(bool, String)> {
    let p = [0.1, 0.2, 0.3, 0.4];
    let a = sample_counts(&p, 10_000, 99, BasisTag::Computational)?;
    let b = sample_counts(&p, 10_000, 99, BasisTag::Computational)?;
    let cs = [Confusion::flip(0.04), Confusion::flip(0.08)];
    let noisy = apply_readout_confusion(&p, &cs)?;
    let back = mitigate_probabilities(&noisy, &cs)?;
    let err = back.iter().zip(&p).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Ok((a == b && err < 1e-12, format!("seeded sampling reproducible: {}, mitigation error {err:.1e}", a == b)))
}

fn tomography() -> Result<(bool, String)> {
    let mut worst = 1.0f64;
    for s in 0..20 {
        let u = haar_random_unitary(2, seed::derive(5, &[s]));
        worst = worst.min(average_gate_fidelity(&sqpt_from_bloch(&exact_bloch(&u)), &u)?);
    }
    Ok((worst >= 1.0 - 1e-9, format!("exact-data min AGF {worst:.12}")))
}

type Check = (&'static str, fn() -> Result<(bool, String)>);

/// Runs every check; never panics.
pub fn selftest() -> Vec<SelftestResult> {
    let checks: [Check; 5] = [
        ("circuit-amplitudes", circuit_amplitudes),
        ("qubit-estimators", qubit_estimators),
        ("fisher-identities", fisher_identities),
        ("sampling-and-mitigation", sampling_and_mitigation),
        ("tomography", tomography),
    ];
    checks
        .into_iter()
        .map(|(name, f)| match f() {
            Ok((passed, detail)) => SelftestResult { name, passed, detail },
            Err(e) => SelftestResult { name, passed: false, detail: format!("{}: {e}", e.kind()) },
        })
        .collect()
}
