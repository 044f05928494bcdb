use super::gates::{Circuit, GateOp, WireLayout};
use super::state::{apply_circuit, PureState};
use crate::error::{Error, Result};
use crate::qudit::linalg::{root_of_unity, C64};
use crate::qudit::UnitaryMatrix;

pub const TARGET: usize = 0;
pub const CONTROL_1: usize = 1;
pub const CONTROL_2: usize = 2;

/// Gates up to and including the unknown unitary's predecessor: the four gates
/// preparing the probe state.
fn probe_ops() -> Vec<GateOp> {
    vec![
        GateOp::Fourier { wire: CONTROL_1 },
        GateOp::Fourier { wire: CONTROL_2 },
        GateOp::controlled_shift(TARGET, CONTROL_2, 0),
        GateOp::controlled_phase_dagger(TARGET, CONTROL_1, 1),
    ]
}

/// Everything after `U`, except the final shift on control 2.
fn decoding_ops() -> Vec<GateOp> {
    vec![
        GateOp::controlled_phase(TARGET, CONTROL_1, 0),
        GateOp::controlled_shift_dagger(TARGET, CONTROL_2, 1),
        GateOp::InverseFourier { wire: CONTROL_1 },
        GateOp::InverseFourier { wire: CONTROL_2 },
        // Σ_k X^{1−k} ⊗ |k⟩⟨k| on control 1
        GateOp::controlled_shift_dagger(TARGET, CONTROL_1, -1),
        GateOp::controlled_phase_dagger(TARGET, CONTROL_2, 0),
    ]
}

fn estimation_ops(u: &UnitaryMatrix, final_shift: bool) -> Vec<GateOp> {
    let mut ops = probe_ops();
    ops.push(GateOp::Local { wire: TARGET, matrix: u.matrix().clone() });
    ops.extend(decoding_ops());
    if final_shift {
        ops.push(GateOp::Shift { wire: CONTROL_2 });
    }
    ops
}

/// Full estimation circuit: after it, the controls hold `Σ u_{m,n} |m⟩|n⟩`.
pub fn build_estimation_circuit(d: usize, u: &UnitaryMatrix) -> Result<Circuit> {
    if u.dim() != d {
        return Err(Error::Shape(format!("unitary is {}x{}, circuit dimension is {d}", u.dim(), u.dim())));
    }
    Circuit::from_ops(WireLayout::estimation(d)?, estimation_ops(u, true))
}

/// Measurement basis for the qubit circuits without final shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitBasis {
    Z,
    X,
    Y,
}

/// Qubit circuit without the final shift, followed by the basis change on both
/// controls: nothing (Z), `H` (X) or `S` then `H` (Y).
pub fn build_qubit_measurement_circuit(u: &UnitaryMatrix, basis: QubitBasis) -> Result<Circuit> {
    if u.dim() != 2 {
        return Err(Error::Shape("qubit measurement circuits need a 2x2 unitary".into()));
    }
    let mut ops = estimation_ops(u, false);
    for w in [CONTROL_1, CONTROL_2] {
        match basis {
            QubitBasis::Z => {}
            QubitBasis::X => ops.push(GateOp::QubitH { wire: w }),
            QubitBasis::Y => {
                ops.push(GateOp::QubitS { wire: w });
                ops.push(GateOp::QubitH { wire: w });
            }
        }
    }
    Circuit::from_ops(WireLayout::estimation(2)?, ops)
}

fn check_target_state(psi: &[C64], d: usize) -> Result<()> {
    if psi.len() != d {
        return Err(Error::Shape(format!("target state has {} amplitudes, expected {d}", psi.len())));
    }
    let n = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (n - 1.0).abs() > super::state::NORM_TOL {
        return Err(Error::Normalization(n));
    }
    Ok(())
}

/// Output of [`run_estimation`].
#[derive(Debug, Clone)]
pub struct EstimationOutput {
    /// Target factor recovered from the output state.
    pub target: Vec<C64>,
    /// Two-qudit control state.
    pub control: PureState,
    /// `⟨ψ|ρ_0|ψ⟩` of the output's reduced target state.
    pub target_fidelity: f64,
    pub full: PureState,
}

/// Runs the estimation circuit on `|ψ⟩|00⟩` and factors the output.
pub fn run_estimation(u: &UnitaryMatrix, psi: &[C64]) -> Result<EstimationOutput> {
    let d = u.dim();
    check_target_state(psi, d)?;
    let circuit = build_estimation_circuit(d, u)?;
    let zero: Vec<C64> = (0..d).map(|k| if k == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).collect();
    let input = PureState::product(&[psi, &zero, &zero])?;
    let full = apply_circuit(&circuit, &input)?;

    let reduced = full.reduced_first_wire();
    let target_fidelity = (0..d)
        .flat_map(|i| (0..d).map(move |k| (i, k)))
        .map(|(i, k)| psi[i].conj() * reduced[(i, k)] * psi[k])
        .sum::<C64>()
        .re;
    let control_amps = full.project_first_wire(psi);
    let control = PureState::new_unchecked(WireLayout::new(vec![d, d])?, control_amps.clone());
    // target factor = ⟨c|Φ⟩ over the controls, normalized
    let rest = d * d;
    let mut target: Vec<C64> =
        (0..d).map(|i| (0..rest).map(|j| control_amps[j].conj() * full.amplitudes()[i * rest + j]).sum()).collect();
    crate::qudit::linalg::normalize(&mut target);
    Ok(EstimationOutput { target, control, target_fidelity, full })
}

/// Runs `c` on `|ψ⟩|00⟩` and returns the control register, assuming the
/// circuit restores the target to `|ψ⟩`.
pub fn control_output(c: &Circuit, psi: &[C64]) -> Result<PureState> {
    let d = c.layout().dims()[TARGET];
    check_target_state(psi, d)?;
    let zero: Vec<C64> = (0..d).map(|k| if k == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).collect();
    let full = apply_circuit(c, &PureState::product(&[psi, &zero, &zero])?)?;
    let dims = c.layout().dims()[1..].to_vec();
    Ok(PureState::new_unchecked(WireLayout::new(dims)?, full.project_first_wire(psi)))
}

/// `(1/d) Σ_{j₁,j₂} Z^{−j₁−1} X^{j₂} |ψ⟩ ⊗ |j₁⟩ ⊗ |j₂⟩`, built in closed form.
pub fn probe_state(psi: &[C64], d: usize) -> Result<PureState> {
    check_target_state(psi, d)?;
    let layout = WireLayout::estimation(d)?;
    let mut amps = vec![C64::new(0.0, 0.0); layout.size()];
    let inv_d = 1.0 / d as f64;
    for j1 in 0..d {
        for j2 in 0..d {
            // (Z^{−j1−1} X^{j2} ψ)_t = ω^{−(j1+1)t} ψ_{t−j2}
            for t in 0..d {
                let src = (t + d - j2) % d;
                let amp = root_of_unity(-((j1 as i64 + 1) * t as i64), d) * psi[src] * inv_d;
                amps[(t * d + j1) * d + j2] = amp;
            }
        }
    }
    Ok(PureState::new_unchecked(layout, amps))
}

/// Circuit made of the four probe-preparing gates only.
pub fn probe_circuit(d: usize) -> Result<Circuit> {
    Circuit::from_ops(WireLayout::estimation(d)?, probe_ops())
}
