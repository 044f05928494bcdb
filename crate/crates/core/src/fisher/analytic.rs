use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{FisherMatrix, ParamSet};
use crate::error::{Error, Result};
use crate::estimation::{conjugate_phase, partition_indices, unpaired_phase, CloseIdEstimate, PartitionSets};
use crate::qudit::linalg::C64;
use crate::qudit::{WHCoefficients, WHIndex};

/// `diag(4, 4 sin²α, 4 sin²α sin²θ)` over `(α, θ, φ)`.
pub fn qfi_qubit(alpha: f64, theta: f64, phi: f64) -> FisherMatrix {
    let s2a = alpha.sin().powi(2);
    let d = nalgebra::DVector::from_row_slice(&[4.0, 4.0 * s2a, 4.0 * s2a * theta.sin().powi(2)]);
    FisherMatrix { params: ParamSet::qubit(alpha, theta, phi), entries: DMatrix::from_diagonal(&d) }
}

/// Point of the constrained close-to-identity family: free amplitudes
/// `{r_f}` on `S_u`, `{r_a}` and phases `{φ_a}` on `S₊`. The conjugate
/// entries follow from `r_{⊖a} = r_a` and the first-order phase pairing,
/// unpaired phases are fixed, and `r₀` is eliminated by normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloseIdParams {
    pub dim: usize,
    pub r_unpaired: Vec<f64>,
    pub r_paired: Vec<f64>,
    pub phi_paired: Vec<f64>,
}

impl CloseIdParams {
    pub fn new(dim: usize, r_unpaired: Vec<f64>, r_paired: Vec<f64>, phi_paired: Vec<f64>) -> Result<Self> {
        let parts = partition_indices(dim)?;
        if r_unpaired.len() != parts.unpaired.len()
            || r_paired.len() != parts.plus.len()
            || phi_paired.len() != parts.plus.len()
        {
            return Err(Error::Shape(format!(
                "d = {dim} needs {} unpaired and {} paired parameters",
                parts.unpaired.len(),
                parts.plus.len()
            )));
        }
        if r_unpaired.iter().chain(&r_paired).chain(&phi_paired).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameters("non-finite parameter".into()));
        }
        Ok(CloseIdParams { dim, r_unpaired, r_paired, phi_paired })
    }

    /// Splits a flat `({r_f}, {r_a}, {φ_a})` vector.
    pub fn from_values(dim: usize, v: &[f64]) -> Result<Self> {
        let parts = partition_indices(dim)?;
        let (nu, np) = (parts.unpaired.len(), parts.plus.len());
        if v.len() != nu + 2 * np {
            return Err(Error::Shape(format!("expected {} parameters, got {}", nu + 2 * np, v.len())));
        }
        Self::new(dim, v[..nu].to_vec(), v[nu..nu + np].to_vec(), v[nu + np..].to_vec())
    }

    /// Reads amplitudes at `S_u` and `S₊` and phases at `S₊` (after `φ₀₀ = 0`).
    pub fn from_coefficients(c: &WHCoefficients) -> Result<Self> {
        let d = c.dim();
        let parts = partition_indices(d)?;
        let c = c.phase_fixed();
        Self::new(
            d,
            parts.unpaired.iter().map(|&f| c.amplitude(f)).collect(),
            parts.plus.iter().map(|&a| c.amplitude(a)).collect(),
            parts.plus.iter().map(|&a| c.phase(a)).collect(),
        )
    }

    /// Amplitudes of an estimate; phases default to the first candidate.
    pub fn from_estimate(est: &CloseIdEstimate) -> Result<Self> {
        Self::new(
            est.dim,
            est.unpaired.iter().map(|(_, r)| *r).collect(),
            est.paired.iter().map(|p| p.r).collect(),
            est.paired.iter().map(|p| p.candidates[0]).collect(),
        )
    }

    pub fn partition(&self) -> PartitionSets {
        partition_indices(self.dim).expect("dimension validated at construction")
    }

    /// `r₀² = 1 − Σ r_f² − 2 Σ r_a²`.
    pub fn r0_sq(&self) -> f64 {
        1.0 - self.r_unpaired.iter().map(|r| r * r).sum::<f64>()
            - 2.0 * self.r_paired.iter().map(|r| r * r).sum::<f64>()
    }

    pub fn values(&self) -> Vec<f64> {
        self.r_unpaired.iter().chain(&self.r_paired).chain(&self.phi_paired).copied().collect()
    }

    pub fn param_set(&self) -> ParamSet {
        let parts = self.partition();
        let label = |p: &str, n: &WHIndex| format!("{p}({},{})", n.x, n.z);
        let labels = parts
            .unpaired
            .iter()
            .map(|n| label("r", n))
            .chain(parts.plus.iter().map(|n| label("r", n)))
            .chain(parts.plus.iter().map(|n| label("phi", n)))
            .collect();
        ParamSet { labels, values: self.values() }
    }

    /// Coefficient vector of the family member; out-of-regime when `r₀² ≤ 0`.
    pub fn coefficients(&self) -> Result<WHCoefficients> {
        let d = self.dim;
        let r0_sq = self.r0_sq();
        if r0_sq <= 0.0 {
            return Err(Error::OutOfRegime(r0_sq));
        }
        let parts = self.partition();
        let mut u = vec![C64::new(0.0, 0.0); d * d];
        u[0] = C64::new(r0_sq.sqrt(), 0.0);
        for (&f, &r) in parts.unpaired.iter().zip(&self.r_unpaired) {
            u[f.linear(d)] = C64::from_polar(r, unpaired_phase(f, d));
        }
        for ((&a, &r), &phi) in parts.plus.iter().zip(&self.r_paired).zip(&self.phi_paired) {
            u[a.linear(d)] = C64::from_polar(r, phi);
            u[a.neg(d).linear(d)] = C64::from_polar(r, conjugate_phase(a, phi, d));
        }
        WHCoefficients::from_vec(d, u)
    }
}

/// Block matrix over `({r_f}, {r_a}, {φ_a})`:
/// `A = 4 r r̃ᵀ/r₀² + 4I`, `B = 8 r_f r_a/r₀²`, `C = 16 r r̃ᵀ/r₀² + 8I`,
/// `D = 8 diag(r_a²)`; amplitude–phase blocks vanish. Empty `S_u` (odd d)
/// leaves only C and D, empty `S₊` (d = 2) only A.
fn close_identity_blocks(p: &CloseIdParams) -> Result<FisherMatrix> {
    let r0_sq = p.r0_sq();
    if r0_sq <= 0.0 {
        return Err(Error::OutOfRegime(r0_sq));
    }
    let (nu, np) = (p.r_unpaired.len(), p.r_paired.len());
    let mut m = DMatrix::zeros(nu + 2 * np, nu + 2 * np);
    for (i, &rf) in p.r_unpaired.iter().enumerate() {
        for (j, &rg) in p.r_unpaired.iter().enumerate() {
            m[(i, j)] = 4.0 * rf * rg / r0_sq + if i == j { 4.0 } else { 0.0 };
        }
        for (j, &ra) in p.r_paired.iter().enumerate() {
            let b = 8.0 * rf * ra / r0_sq;
            m[(i, nu + j)] = b;
            m[(nu + j, i)] = b;
        }
    }
    for (i, &ra) in p.r_paired.iter().enumerate() {
        for (j, &rb) in p.r_paired.iter().enumerate() {
            m[(nu + i, nu + j)] = 16.0 * ra * rb / r0_sq + if i == j { 8.0 } else { 0.0 };
        }
        m[(nu + np + i, nu + np + i)] = 8.0 * ra * ra;
    }
    Ok(FisherMatrix { params: p.param_set(), entries: m })
}

pub fn qfi_close_identity(p: &CloseIdParams) -> Result<FisherMatrix> {
    close_identity_blocks(p)
}

/// The tilde-H measurement is optimal on the family: its Fisher matrix has
/// exactly the quantum blocks.
pub fn cfi_close_identity(p: &CloseIdParams) -> Result<FisherMatrix> {
    close_identity_blocks(p)
}
