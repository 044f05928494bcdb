//! Parametrized families and their outcome distributions, as fed to the
//! numeric Fisher routines.

use super::CloseIdParams;
use crate::circuit::{born_probabilities, BasisTag, ControlState, PureState, WireLayout};
use crate::error::{Error, Result};
use crate::estimation::{qubit_probabilities, QubitAngles};
use crate::qudit::{exp_hamiltonian_with, wh_expand, GellMannBasis, HamiltonianParams, UnitaryMatrix, WHCoefficients};

fn angles(x: &[f64]) -> Result<QubitAngles> {
    match x {
        [alpha, theta, phi] => Ok(QubitAngles::new(*alpha, *theta, *phi)),
        _ => Err(Error::Shape(format!("qubit family takes 3 parameters, got {}", x.len()))),
    }
}

/// `cos α I − i sin α n̂(θ, φ)·σ`.
pub fn qubit_unitary(x: &[f64]) -> Result<UnitaryMatrix> {
    Ok(angles(x)?.unitary())
}

/// Computational-basis outcome distribution of the qubit procedure.
pub fn qubit_procedure_probabilities(x: &[f64]) -> Result<Vec<f64>> {
    Ok(qubit_probabilities(&angles(x)?).to_vec())
}

/// `exp(i Σ λ_j T_j)` over the given Gell-Mann basis.
pub fn hamiltonian_unitary(x: &[f64], basis: &GellMannBasis) -> Result<UnitaryMatrix> {
    exp_hamiltonian_with(&HamiltonianParams::new(basis.dim(), x.to_vec())?, basis)
}

fn coefficient_probabilities(c: &WHCoefficients, tag: BasisTag) -> Result<Vec<f64>> {
    let d = c.dim();
    let state = PureState::new(WireLayout::new(vec![d, d])?, c.as_slice().to_vec())?;
    born_probabilities(&ControlState::Pure(state), tag)
}

/// Outcome distribution of the control register, measured in `tag`, after
/// the estimation circuit on `U`.
pub fn control_probabilities(u: &UnitaryMatrix, tag: BasisTag) -> Result<Vec<f64>> {
    coefficient_probabilities(&wh_expand(u.matrix())?, tag)
}

/// Tilde-H outcome distribution over the constrained close-to-identity
/// family, parameters ordered `({r_f}, {r_a}, {φ_a})`.
pub fn close_identity_probabilities(x: &[f64], d: usize) -> Result<Vec<f64>> {
    coefficient_probabilities(&CloseIdParams::from_values(d, x)?.coefficients()?, BasisTag::TildeH)
}
