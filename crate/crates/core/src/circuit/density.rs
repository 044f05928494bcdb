use super::gates::Circuit;
use super::state::{DensityState, PureState};
use crate::error::{Error, Result};
use crate::noise::{apply_readout_confusion, depolarizing_channel, NoiseParams};
use crate::qudit::linalg::C64;

/// Applies `c` gate by gate: ideal conjugation, then depolarizing noise on the
/// acted wires, then thermal relaxation of those wires for the gate duration.
/// Relaxation is only defined for qubit wires and is skipped otherwise.
pub fn apply_circuit_density(c: &Circuit, rho: &DensityState, noise: &NoiseParams) -> Result<DensityState> {
    if c.layout() != rho.layout() {
        return Err(Error::LayoutMismatch(format!(
            "circuit {:?} vs state {:?}",
            c.layout().dims(),
            rho.layout().dims()
        )));
    }
    noise.validate()?;
    let dims = c.layout().dims();
    let mut out = rho.clone();
    for op in c.ops() {
        let wires = op.wires();
        out.conjugate(&wires, &op.operator(c.layout())?);
        let (p, t) = match wires.as_slice() {
            [w] => (noise.qubit_of_wire(*w)?.p_sx, noise.durations.single_ns),
            [a, b] => (noise.pair_error(*a, *b)?, noise.durations.two_ns),
            _ => (0.0, 0.0),
        };
        if p > 0.0 {
            let dim: usize = wires.iter().map(|&w| dims[w]).product();
            out.apply_kraus(&wires, depolarizing_channel(p, dim)?.ops());
        }
        relax(&mut out, noise, &wires, t)?;
    }
    Ok(out)
}

fn relax(rho: &mut DensityState, noise: &NoiseParams, wires: &[usize], t: f64) -> Result<()> {
    if t == 0.0 {
        return Ok(());
    }
    for &w in wires {
        if rho.layout().dims()[w] != 2 {
            continue;
        }
        if let Some(ch) = noise.relaxation(w, t)? {
            rho.apply_kraus(&[w], ch.ops());
        }
    }
    Ok(())
}

/// Computational-basis outcome probabilities of the control wires after a
/// noisy run of `c` on `|ψ⟩|00⟩`, including relaxation during readout and
/// readout confusion (qubit wires only).
pub fn noisy_control_probabilities(c: &Circuit, psi: &[C64], noise: &NoiseParams) -> Result<Vec<f64>> {
    let dims = c.layout().dims().to_vec();
    let zero: Vec<Vec<C64>> =
        dims[1..].iter().map(|&d| (0..d).map(|k| C64::new(if k == 0 { 1.0 } else { 0.0 }, 0.0)).collect()).collect();
    let mut factors: Vec<&[C64]> = vec![psi];
    factors.extend(zero.iter().map(|v| v.as_slice()));
    let input = PureState::product(&factors)?;
    if input.layout() != c.layout() {
        return Err(Error::LayoutMismatch("target state does not fit the circuit".into()));
    }
    let mut rho = apply_circuit_density(c, &input.density(), noise)?;
    let controls: Vec<usize> = (1..dims.len()).collect();
    relax(&mut rho, noise, &controls, noise.durations.measure_ns)?;
    let p: Vec<f64> = rho.reduce(&controls).diagonal().iter().map(|v| v.max(0.0)).collect();
    let total: f64 = p.iter().sum();
    let p: Vec<f64> = p.iter().map(|v| v / total).collect();
    if controls.iter().all(|&w| dims[w] == 2) {
        apply_readout_confusion(&p, &noise.readout_for_wires(&controls)?)
    } else {
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{
        build_estimation_circuit, build_qubit_measurement_circuit, run_estimation, QubitBasis, WireLayout,
    };
    use crate::noise::{noise_scenario, NoiseParams, PairNoise, QubitNoise};
    use crate::qudit::haar_random_unitary;
    use crate::qudit::linalg::max_abs_diff;

    fn ket0(d: usize) -> Vec<C64> {
        (0..d).map(|k| C64::new(if k == 0 { 1.0 } else { 0.0 }, 0.0)).collect()
    }

    #[test]
    fn zero_noise_matches_pure_backend() {
        for d in [2, 3] {
            let u = haar_random_unitary(d, 4);
            let c = build_estimation_circuit(d, &u).unwrap();
            let out = run_estimation(&u, &ket0(d)).unwrap();
            let input = PureState::product(&[&ket0(d), &ket0(d), &ket0(d)]).unwrap();
            let rho = apply_circuit_density(&c, &input.density(), &NoiseParams::noiseless()).unwrap();
            assert!(max_abs_diff(rho.matrix(), out.full.density().matrix()) < 1e-10);
        }
    }

    #[test]
    fn full_depolarization_mixes_controls() {
        let mut noise = NoiseParams::noiseless();
        noise.qubits = vec![QubitNoise { p_sx: 1.0, ..QubitNoise::ideal() }; 3];
        noise.pairs = vec![
            PairNoise { qubits: [0, 1], p_cx: 1.0 },
            PairNoise { qubits: [1, 2], p_cx: 1.0 },
            PairNoise { qubits: [0, 2], p_cx: 1.0 },
        ];
        let u = haar_random_unitary(2, 1);
        let c = build_estimation_circuit(2, &u).unwrap();
        let input = PureState::product(&[&ket0(2), &ket0(2), &ket0(2)]).unwrap();
        let rho = apply_circuit_density(&c, &input.density(), &noise).unwrap();
        let ctrl = rho.reduce(&[1, 2]);
        let mixed = crate::qudit::CMatrix::identity(4, 4).map(|z| z * 0.25);
        assert!(max_abs_diff(ctrl.matrix(), &mixed) < 1e-6);
    }

    #[test]
    fn device_noise_keeps_a_valid_state() {
        let noise = noise_scenario("full").unwrap();
        let u = haar_random_unitary(2, 2);
        for b in [QubitBasis::Z, QubitBasis::X, QubitBasis::Y] {
            let c = build_qubit_measurement_circuit(&u, b).unwrap();
            let input = PureState::product(&[&ket0(2), &ket0(2), &ket0(2)]).unwrap();
            let rho = apply_circuit_density(&c, &input.density(), &noise).unwrap();
            assert!((rho.trace() - 1.0).abs() < 1e-10);
            assert!(rho.min_eigenvalue() > -1e-8);
            let p = noisy_control_probabilities(&c, &ket0(2), &noise).unwrap();
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn noise_lowers_signal() {
        let u = haar_random_unitary(2, 3);
        let c = build_qubit_measurement_circuit(&u, QubitBasis::Z).unwrap();
        let clean = noisy_control_probabilities(&c, &ket0(2), &NoiseParams::noiseless()).unwrap();
        let noisy = noisy_control_probabilities(&c, &ket0(2), &noise_scenario("full").unwrap()).unwrap();
        let tv: f64 = clean.iter().zip(&noisy).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0;
        assert!(tv > 1e-3 && tv < 0.3, "{tv}");
    }

    #[test]
    fn layout_mismatch_rejected() {
        let c = build_estimation_circuit(2, &haar_random_unitary(2, 0)).unwrap();
        let rho = PureState::basis(WireLayout::new(vec![2, 2]).unwrap(), &[0, 0]).unwrap().density();
        assert!(matches!(apply_circuit_density(&c, &rho, &NoiseParams::noiseless()), Err(Error::LayoutMismatch(_))));
    }
}
