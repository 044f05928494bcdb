//! Qudit operator algebra: Weyl-Heisenberg and Gell-Mann bases, Fourier
//! matrix, Haar sampling and Hamiltonian exponentials.

mod gell_mann;
mod haar;
mod hamiltonian;
pub mod linalg;
mod weyl;

pub use gell_mann::{gell_mann_basis, gm_expand, gm_to_wh_vector, GellMannBasis};
pub use haar::haar_random_unitary;
pub use hamiltonian::{exp_hamiltonian, exp_hamiltonian_with, exp_i_hermitian, HamiltonianParams};
pub use linalg::{CMatrix, C64};
pub use weyl::{
    fourier_matrix, phase_matrix, shift_matrix, unitarity_residual, wh_expand, wh_operator, wh_reconstruct, Residual,
};

use crate::error::{Error, Result};

/// Tolerance on `U U^† = I` (max-abs entry deviation).
pub const UNITARITY_TOL: f64 = 1e-10;

pub(crate) fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::InvalidDimension(d))
    } else {
        Ok(())
    }
}

/// Index `(n_x, n_z)` into Z_d x Z_d.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct WHIndex {
    pub x: usize,
    pub z: usize,
}

impl WHIndex {
    pub const ZERO: WHIndex = WHIndex { x: 0, z: 0 };

    /// Builds an index with both components reduced mod `d`.
    pub fn new(x: usize, z: usize, d: usize) -> Self {
        WHIndex { x: x % d, z: z % d }
    }

    /// The conjugate index `⊖p = ((d - p_x) mod d, (d - p_z) mod d)`.
    pub fn neg(self, d: usize) -> Self {
        WHIndex { x: (d - self.x % d) % d, z: (d - self.z % d) % d }
    }

    pub fn add(self, other: WHIndex, d: usize) -> Self {
        WHIndex::new(self.x + other.x, self.z + other.z, d)
    }

    pub fn is_zero(self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Position of `|x⟩_1 ⊗ |z⟩_2` in a two-qudit computational basis.
    pub fn linear(self, d: usize) -> usize {
        self.x * d + self.z
    }

    pub fn from_linear(i: usize, d: usize) -> Self {
        WHIndex { x: i / d, z: i % d }
    }

    /// All `d²` indices in row-major `(x, z)` order.
    pub fn all(d: usize) -> impl Iterator<Item = WHIndex> {
        (0..d * d).map(move |i| WHIndex::from_linear(i, d))
    }
}

impl std::fmt::Display for WHIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.x, self.z)
    }
}

/// A square complex matrix known to be unitary within [`UNITARITY_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(CMatrix);

impl UnitaryMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Shape(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
        }
        let dev = linalg::unitarity_deviation(&m);
        if dev > UNITARITY_TOL {
            return Err(Error::Shape(format!("matrix is not unitary (deviation {dev:.3e})")));
        }
        Ok(UnitaryMatrix(m))
    }

    /// Wraps `m` without checking; callers guarantee unitarity by construction.
    pub(crate) fn new_unchecked(m: CMatrix) -> Self {
        UnitaryMatrix(m)
    }

    pub fn identity(d: usize) -> Self {
        UnitaryMatrix(CMatrix::identity(d, d))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn adjoint(&self) -> UnitaryMatrix {
        UnitaryMatrix(self.0.adjoint())
    }

    pub fn mul(&self, other: &UnitaryMatrix) -> UnitaryMatrix {
        UnitaryMatrix(&self.0 * &other.0)
    }

    /// Multiplies by the global phase that makes `Tr U` real and non-negative,
    /// i.e. enforces `φ_{0,0} = 0`.
    pub fn phase_normalized(&self) -> UnitaryMatrix {
        let tr = self.0.trace();
        if tr.norm() < 1e-300 {
            return self.clone();
        }
        let phase = tr.conj() / tr.norm();
        UnitaryMatrix(self.0.map(|z| z * phase))
    }
}

impl AsRef<CMatrix> for UnitaryMatrix {
    fn as_ref(&self) -> &CMatrix {
        &self.0
    }
}

/// Coefficients `u_n = r_n e^{iφ_n}` of an operator in the Weyl-Heisenberg
/// basis, stored densely in row-major `(n_x, n_z)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct WHCoefficients {
    dim: usize,
    u: Vec<C64>,
}

impl WHCoefficients {
    pub fn from_vec(dim: usize, u: Vec<C64>) -> Result<Self> {
        check_dim(dim)?;
        if u.len() != dim * dim {
            return Err(Error::Shape(format!("expected {} coefficients, got {}", dim * dim, u.len())));
        }
        Ok(WHCoefficients { dim, u })
    }

    /// Builds coefficients from a sparse map; every index of Z_d² must be present.
    pub fn from_map(dim: usize, map: &std::collections::HashMap<WHIndex, C64>) -> Result<Self> {
        check_dim(dim)?;
        let u = WHIndex::all(dim)
            .map(|n| map.get(&n).copied().ok_or(Error::IncompleteCoefficients(n.x, n.z)))
            .collect::<Result<Vec<_>>>()?;
        Ok(WHCoefficients { dim, u })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, n: WHIndex) -> C64 {
        self.u[n.linear(self.dim)]
    }

    pub fn amplitude(&self, n: WHIndex) -> f64 {
        self.get(n).norm()
    }

    /// Phase in (−π, π].
    pub fn phase(&self, n: WHIndex) -> f64 {
        linalg::arg(self.get(n))
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.u
    }

    /// `Σ r_n²`.
    pub fn norm_sqr(&self) -> f64 {
        self.u.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Same coefficients with the global phase chosen so that `φ_{0,0} = 0`.
    pub fn phase_fixed(&self) -> WHCoefficients {
        let u0 = self.u[0];
        if u0.norm() < 1e-300 {
            return self.clone();
        }
        let phase = u0.conj() / u0.norm();
        WHCoefficients { dim: self.dim, u: self.u.iter().map(|z| z * phase).collect() }
    }
}
