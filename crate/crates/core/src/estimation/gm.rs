use crate::circuit::{BasisTag, MeasurementCounts};
use crate::error::{Error, Result};
use crate::qudit::HamiltonianParams;

/// First-order Hamiltonian estimate `λ_j = √(d p_j / 2)` from Gell-Mann
/// basis probabilities (index 0 is the identity direction).
pub fn gm_first_order_estimate_probabilities(p: &[f64], d: usize) -> Result<HamiltonianParams> {
    crate::qudit::check_dim(d)?;
    if p.len() != d * d {
        return Err(Error::InvalidDistribution(format!("expected {} outcomes, got {}", d * d, p.len())));
    }
    let lambda = p[1..].iter().map(|&pj| (d as f64 * pj.max(0.0) / 2.0).sqrt()).collect();
    HamiltonianParams::new(d, lambda)
}

pub fn gm_first_order_estimate(counts: &MeasurementCounts, d: usize) -> Result<HamiltonianParams> {
    if counts.basis != BasisTag::GmBasis {
        return Err(Error::InvalidDistribution(format!("expected gm-basis counts, got {}", counts.basis.name())));
    }
    if counts.shots == 0 {
        return Err(Error::InsufficientData("zero shots".into()));
    }
    gm_first_order_estimate_probabilities(&counts.frequencies(), d)
}

/// Mean of `|λ̂_j − λ_j| / λ_j` over components with `λ_j > 0`; zero when
/// every `λ_j` vanishes.
pub fn average_relative_error(estimate: &HamiltonianParams, truth: &HamiltonianParams) -> f64 {
    let errs: Vec<f64> =
        estimate.lambda.iter().zip(&truth.lambda).filter(|(_, t)| **t > 0.0).map(|(e, t)| (e - t).abs() / t).collect();
    if errs.is_empty() {
        0.0
    } else {
        errs.iter().sum::<f64>() / errs.len() as f64
    }
}
