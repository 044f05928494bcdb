use std::time::Instant;

use super::config::{ExperimentConfig, ExperimentKind};
use super::records::{Method, TrialRecord};
use crate::circuit::{
    build_qubit_measurement_circuit, noisy_control_probabilities, sample_counts, MeasurementCounts, QubitBasis,
    CONTROL_1, CONTROL_2, TARGET,
};
use crate::error::{Error, Result};
use crate::estimation::{closeness_measure, estimate_qubit_no_prior_probabilities, QubitCoefficients};
use crate::noise::{
    apply_readout_confusion, depolarizing_channel, mitigate_probabilities, Confusion, KrausChannel, NoiseParams,
};
use crate::par::{self, Execution};
use crate::qudit::linalg::{CMatrix, C64};
use crate::qudit::{haar_random_unitary, UnitaryMatrix};
use crate::seed;
use crate::sqpt::{
    agf_between_unitaries, average_gate_fidelity, sqpt_from_bloch, sqpt_reconstruct_with, ChannelSampler, InputState,
    PauliBasis, ProcessMatrix, QuantumChannel,
};

pub(crate) const UNITARY_STREAM: u64 = 0x5EED_0001;
const PROCEDURE_BASES: [QubitBasis; 3] = [QubitBasis::Z, QubitBasis::X, QubitBasis::Y];

/// Single-qubit gate as executed on the device qubit carrying the target
/// wire: the unitary is compiled to two native single-qubit layers, state
/// preparation and the measurement rotation to one layer each. Every layer is
/// followed by depolarizing noise and relaxation over the layer duration;
/// relaxation over the readout window and readout confusion close the run.
#[derive(Debug, Clone)]
pub struct DeviceQubitGate {
    u: UnitaryMatrix,
    layer_noise: Option<KrausChannel>,
    readout_relaxation: Option<KrausChannel>,
    readout: Confusion,
}

fn conj(m: &CMatrix, rho: &CMatrix) -> CMatrix {
    m * rho * m.adjoint()
}

impl DeviceQubitGate {
    pub fn new(u: &UnitaryMatrix, noise: &NoiseParams) -> Result<Self> {
        if u.dim() != 2 {
            return Err(Error::Shape("device gate model needs a 2x2 unitary".into()));
        }
        noise.validate()?;
        let q = noise.qubit_of_wire(TARGET)?;
        let mut layer = depolarizing_channel(q.p_sx, 2)?;
        if let Some(r) = noise.relaxation(TARGET, noise.durations.single_ns)? {
            layer = layer.then(&r)?;
        }
        let layer_noise = if layer.is_identity() { None } else { Some(layer) };
        Ok(DeviceQubitGate {
            u: u.clone(),
            layer_noise,
            readout_relaxation: noise.relaxation(TARGET, noise.durations.measure_ns)?,
            readout: q.readout,
        })
    }

    pub fn readout(&self) -> Confusion {
        self.readout
    }

    fn layer(&self, rho: CMatrix) -> CMatrix {
        match &self.layer_noise {
            Some(k) => k.apply(&rho),
            None => rho,
        }
    }

    /// Recorded outcome probabilities `(p₊, p₋)` for one tomography setting.
    pub fn probabilities(&self, input: InputState, basis: PauliBasis) -> Result<[f64; 2]> {
        let mut rho = input.density();
        if input != InputState::Zero {
            rho = self.layer(rho);
        }
        rho = self.layer(self.layer(conj(self.u.matrix(), &rho)));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h =
            CMatrix::from_row_slice(2, 2, &[C64::new(s, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0)]);
        let rotation = match basis {
            PauliBasis::Z => None,
            PauliBasis::X => Some(h),
            PauliBasis::Y => Some(
                h * CMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&[
                    C64::new(1.0, 0.0),
                    C64::new(0.0, -1.0),
                ])),
            ),
        };
        if let Some(r) = rotation {
            rho = self.layer(conj(&r, &rho));
        }
        if let Some(k) = &self.readout_relaxation {
            rho = k.apply(&rho);
        }
        let p0 = rho[(0, 0)].re.clamp(0.0, 1.0);
        let p = apply_readout_confusion(&[p0, 1.0 - p0], &[self.readout])?;
        Ok([p[0], p[1]])
    }
}

impl ChannelSampler for DeviceQubitGate {
    fn sample(&self, input: InputState, basis: PauliBasis, shots: u64, seed: u64) -> Result<MeasurementCounts> {
        sample_counts(&self.probabilities(input, basis)?, shots, seed, basis.tag())
    }
}

/// Everything a trial needs about one (unitary, scenario) pair.
struct QubitCase {
    unitary_id: usize,
    scenario: String,
    u: UnitaryMatrix,
    truth: QubitCoefficients,
    ideal_chi: ProcessMatrix,
    one_minus_r0: f64,
    procedure_probs: Vec<Vec<f64>>,
    control_readout: Vec<Confusion>,
    gate: DeviceQubitGate,
}

fn build_case(cfg: &ExperimentConfig, unitary_id: usize, scenario: &str) -> Result<QubitCase> {
    let noise = cfg.noise(scenario)?;
    let u = haar_random_unitary(
        2,
        seed::derive(cfg.seed, &[ExperimentKind::QubitComparison.seed_key(), UNITARY_STREAM, unitary_id as u64]),
    );
    let psi = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let procedure_probs = PROCEDURE_BASES
        .iter()
        .map(|&b| noisy_control_probabilities(&build_qubit_measurement_circuit(&u, b)?, &psi, &noise))
        .collect::<Result<Vec<_>>>()?;
    Ok(QubitCase {
        unitary_id,
        scenario: scenario.into(),
        truth: QubitCoefficients::from_unitary(&u)?,
        ideal_chi: ProcessMatrix::of_channel(&u)?,
        one_minus_r0: closeness_measure(&u),
        control_readout: noise.readout_for_wires(&[CONTROL_1, CONTROL_2])?,
        gate: DeviceQubitGate::new(&u, &noise)?,
        procedure_probs,
        u,
    })
}

fn coefficient_error(est: &QubitCoefficients, truth: &QubitCoefficients) -> f64 {
    let (e, t) = (est.as_array(), truth.as_array());
    let plus: f64 = e.iter().zip(&t).map(|(a, b)| (a - b).powi(2)).sum();
    let minus: f64 = e.iter().zip(&t).map(|(a, b)| (a + b).powi(2)).sum();
    plus.min(minus).sqrt()
}

/// `(agf, err_amp)`: fidelity of the estimated gate and Euclidean distance of
/// the coefficient vector (up to the global sign).
fn procedure_trial(cfg: &ExperimentConfig, case: &QubitCase, shots: u64, trial_seed: u64) -> Result<(f64, f64)> {
    let mut probs = Vec::with_capacity(3);
    for (bi, (p, b)) in case.procedure_probs.iter().zip(PROCEDURE_BASES).enumerate() {
        let freq = if shots == 0 {
            p.clone()
        } else {
            let n = cfg.shot_accounting.per_circuit(shots, 3)?;
            let tag = match b {
                QubitBasis::Z => crate::circuit::BasisTag::Computational,
                QubitBasis::X => crate::circuit::BasisTag::QubitX,
                QubitBasis::Y => crate::circuit::BasisTag::QubitY,
            };
            sample_counts(p, n, seed::derive(trial_seed, &[bi as u64]), tag)?.frequencies()
        };
        probs.push(if cfg.mitigation { mitigate_probabilities(&freq, &case.control_readout)? } else { freq });
    }
    let mut rng = seed::rng(seed::derive(trial_seed, &[3]));
    let est = estimate_qubit_no_prior_probabilities(&probs[0], &probs[1], &probs[2], &mut rng)?;
    Ok((agf_between_unitaries(&est.unitary(), &case.u)?, coefficient_error(&est, &case.truth)))
}

/// `(agf, err_amp)`: fidelity of the reconstructed process and Frobenius
/// distance of its χ matrix to the ideal one.
fn sqpt_trial(cfg: &ExperimentConfig, case: &QubitCase, shots: u64, trial_seed: u64) -> Result<(f64, f64)> {
    let mitigate =
        |freq: Vec<f64>| if cfg.mitigation { mitigate_probabilities(&freq, &[case.gate.readout()]) } else { Ok(freq) };
    let chi = if shots == 0 {
        let mut data = [[0.0; 3]; 4];
        for (si, s) in InputState::ALL.iter().enumerate() {
            for (bi, b) in PauliBasis::ALL.iter().enumerate() {
                let p = mitigate(case.gate.probabilities(*s, *b)?.to_vec())?;
                data[si][bi] = p[0] - p[1];
            }
        }
        sqpt_from_bloch(&data)
    } else {
        let n = cfg.shot_accounting.per_circuit(shots, 12)?;
        sqpt_reconstruct_with(&case.gate, n, trial_seed, |c| mitigate(c.frequencies()))?
    };
    Ok((average_gate_fidelity(&chi, &case.u)?, chi.distance(&case.ideal_chi)))
}

/// Haar-random qubit gates estimated by the three-basis procedure and by
/// tomography, at every shot budget and scenario of `cfg`.
pub fn run_qubit_comparison(cfg: &ExperimentConfig, exec: Execution) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    if cfg.experiment != ExperimentKind::QubitComparison {
        return Err(Error::InvalidConfig(format!("expected qubit-comparison, got {}", cfg.experiment.name())));
    }
    let keys: Vec<(usize, String)> =
        (0..cfg.n_unitaries).flat_map(|i| cfg.scenarios.iter().map(move |s| (i, s.clone()))).collect();
    let cases = par::map(exec, keys, |(i, s)| build_case(cfg, i, &s)).into_iter().collect::<Result<Vec<_>>>()?;
    let items: Vec<(&QubitCase, usize)> =
        cases.iter().flat_map(|c| (0..cfg.n_repetitions).map(move |r| (c, r))).collect();
    let nested = par::map(exec, items, |(case, rep)| {
        let mut out = Vec::new();
        for &shots in &cfg.shots {
            if shots == 0 && rep > 0 {
                continue;
            }
            for method in [Method::Procedure, Method::Sqpt] {
                let trial_seed = seed::derive(
                    cfg.seed,
                    &[
                        ExperimentKind::QubitComparison.seed_key(),
                        case.unitary_id as u64,
                        rep as u64,
                        method.seed_key(),
                        shots,
                    ],
                );
                let start = Instant::now();
                let result = match method {
                    Method::Procedure => procedure_trial(cfg, case, shots, trial_seed),
                    _ => sqpt_trial(cfg, case, shots, trial_seed),
                };
                let mut rec = TrialRecord {
                    experiment: ExperimentKind::QubitComparison.name().into(),
                    scenario: case.scenario.clone(),
                    method: method.name().into(),
                    d: 2,
                    unitary_id: case.unitary_id,
                    repetition: rep,
                    shots,
                    agf: None,
                    err_amp: None,
                    err_phase: None,
                    one_minus_r0: Some(case.one_minus_r0),
                    seed: trial_seed,
                    error: None,
                    wall_time_s: 0.0,
                };
                match result {
                    Ok((agf, err)) => {
                        rec.agf = Some(agf);
                        rec.err_amp = Some(err);
                    }
                    Err(e) => rec.error = Some(format!("{}: {e}", e.kind())),
                }
                rec.wall_time_s = start.elapsed().as_secs_f64();
                out.push(rec);
            }
        }
        out
    });
    Ok(nested.into_iter().flatten().collect())
}
