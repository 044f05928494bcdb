use nalgebra::DMatrix;

use super::{FisherMatrix, ParamSet};
use crate::circuit::{validate_distribution, PureState};
use crate::error::{Error, Result};
use crate::qudit::linalg::{unitarity_deviation, vdot, CMatrix, C64, I};
use crate::qudit::UnitaryMatrix;

pub const DEFAULT_STEP: f64 = 1e-6;
/// Outcomes below this probability (rounding level of a squared amplitude)
/// are left out of the classical sum; anything larger can carry a finite
/// share of the information.
pub const MIN_PROBABILITY: f64 = 1e-30;
const MAX_STEP_HALVINGS: usize = 30;
const UNITARITY_SLACK: f64 = 1e-6;

fn shifted(x: &[f64], a: usize, h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[a] += h;
    y
}

fn valid_probabilities<F>(prob_map: &F, x: &[f64], n: usize) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let p = prob_map(x)?;
    if p.len() != n {
        return Err(Error::InvalidModel(format!("outcome count changed from {n} to {}", p.len())));
    }
    validate_distribution(&p)?;
    Ok(p)
}

/// `I_ab = Σ_y ∂_a P_y ∂_b P_y / P_y` with central differences. The step is
/// halved whenever a perturbed point leaves the model's domain or the simplex.
pub fn cfi_numeric<F>(prob_map: F, at: &ParamSet, step: f64) -> Result<FisherMatrix>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let x = at.values();
    let p0 = prob_map(x)?;
    validate_distribution(&p0).map_err(|e| Error::InvalidModel(format!("at evaluation point: {e}")))?;
    let n = p0.len();
    let mut grads = Vec::with_capacity(x.len());
    for a in 0..x.len() {
        let mut h = step;
        let mut found = None;
        for _ in 0..MAX_STEP_HALVINGS {
            let plus = valid_probabilities(&prob_map, &shifted(x, a, h), n);
            let minus = valid_probabilities(&prob_map, &shifted(x, a, -h), n);
            if let (Ok(pp), Ok(pm)) = (plus, minus) {
                found = Some(pp.iter().zip(&pm).map(|(u, v)| (u - v) / (2.0 * h)).collect::<Vec<f64>>());
                break;
            }
            h *= 0.5;
        }
        grads.push(found.ok_or_else(|| {
            Error::InvalidModel(format!("probabilities leave the simplex around parameter {}", at.labels()[a]))
        })?);
    }
    let m = DMatrix::from_fn(x.len(), x.len(), |a, b| {
        p0.iter().enumerate().filter(|(_, &p)| p >= MIN_PROBABILITY).map(|(y, &p)| grads[a][y] * grads[b][y] / p).sum()
    });
    FisherMatrix::new(at.clone(), m)
}

fn checked_unitary<F>(u_map: &F, x: &[f64]) -> Result<CMatrix>
where
    F: Fn(&[f64]) -> Result<UnitaryMatrix>,
{
    let u = u_map(x)?.into_matrix();
    let dev = unitarity_deviation(&u);
    if dev > UNITARITY_SLACK {
        return Err(Error::InvalidModel(format!("parametrization is not unitary (deviation {dev:.2e})")));
    }
    Ok(u)
}

/// `F_ab = 2⟨{H_a, H_b}⟩ − 4⟨H_a⟩⟨H_b⟩` with `H_a = i(∂_a U†)U` acting on
/// wire 0 of `probe`, derivatives by central differences.
pub fn qfi_numeric<F>(u_map: F, at: &ParamSet, probe: &PureState, step: f64) -> Result<FisherMatrix>
where
    F: Fn(&[f64]) -> Result<UnitaryMatrix>,
{
    let x = at.values();
    let u = checked_unitary(&u_map, x)?;
    let d = u.nrows();
    if probe.layout().dims()[0] != d {
        return Err(Error::LayoutMismatch(format!(
            "probe wire 0 has dimension {}, U has {d}",
            probe.layout().dims()[0]
        )));
    }
    let phi = probe.amplitudes();
    let mut images = Vec::with_capacity(x.len());
    let mut means = Vec::with_capacity(x.len());
    for a in 0..x.len() {
        let up = checked_unitary(&u_map, &shifted(x, a, step))?;
        let um = checked_unitary(&u_map, &shifted(x, a, -step))?;
        let du = (up - um) / C64::new(2.0 * step, 0.0);
        let h = du.adjoint() * &u * I;
        let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
        let mut v = probe.clone();
        v.apply_operator(&[0], &h);
        means.push(vdot(phi, v.amplitudes()).re);
        images.push(v);
    }
    let m = DMatrix::from_fn(x.len(), x.len(), |a, b| {
        4.0 * vdot(images[a].amplitudes(), images[b].amplitudes()).re - 4.0 * means[a] * means[b]
    });
    FisherMatrix::new(at.clone(), m)
}
