use super::linalg::{CMatrix, C64};
use super::{gell_mann_basis, GellMannBasis, UnitaryMatrix};
use crate::error::{Error, Result};

/// Real coefficients `λ_j` of `H = Σ_j λ_j T_j` over the Gell-Mann basis.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianParams {
    pub dim: usize,
    pub lambda: Vec<f64>,
}

impl HamiltonianParams {
    pub fn new(dim: usize, lambda: Vec<f64>) -> Result<Self> {
        super::check_dim(dim)?;
        if lambda.len() != dim * dim - 1 {
            return Err(Error::Shape(format!("expected {} parameters, got {}", dim * dim - 1, lambda.len())));
        }
        if lambda.iter().any(|l| !l.is_finite()) {
            return Err(Error::InvalidParameters("non-finite Hamiltonian parameter".into()));
        }
        Ok(HamiltonianParams { dim, lambda })
    }

    pub fn zeros(dim: usize) -> Self {
        HamiltonianParams { dim, lambda: vec![0.0; dim * dim - 1] }
    }

    pub fn hamiltonian(&self, basis: &GellMannBasis) -> CMatrix {
        let d = self.dim;
        basis.matrices().iter().zip(&self.lambda).fold(CMatrix::zeros(d, d), |acc, (t, &l)| acc + t.map(|z| z * l))
    }
}

/// `U = exp(iH)` through the Hermitian eigendecomposition of `H`.
pub fn exp_hamiltonian(p: &HamiltonianParams) -> Result<UnitaryMatrix> {
    let basis = gell_mann_basis(p.dim)?;
    exp_hamiltonian_with(p, &basis)
}

pub fn exp_hamiltonian_with(p: &HamiltonianParams, basis: &GellMannBasis) -> Result<UnitaryMatrix> {
    if p.lambda.len() != basis.len() {
        return Err(Error::Shape(format!("expected {} parameters, got {}", basis.len(), p.lambda.len())));
    }
    let h = p.hamiltonian(basis);
    Ok(UnitaryMatrix::new_unchecked(exp_i_hermitian(&h)))
}

/// `exp(iH)` for Hermitian `H`.
pub fn exp_i_hermitian(h: &CMatrix) -> CMatrix {
    let sym = (h + h.adjoint()).map(|z| z * 0.5);
    let eig = sym.symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = CMatrix::from_diagonal(&eig.eigenvalues.map(|e| C64::from_polar(1.0, e)));
    v * phases * v.adjoint()
}
