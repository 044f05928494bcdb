//! Single-qubit standard process tomography and average gate fidelity.

use serde::{Deserialize, Serialize};

use crate::circuit::{BasisTag, MeasurementCounts};
use crate::error::{Error, Result};
use crate::qudit::linalg::{hermitian_eigenvalues, CMatrix, C64};
use crate::qudit::{wh_operator, UnitaryMatrix, WHIndex};

/// Linear map on `d×d` operators.
pub trait QuantumChannel {
    fn dim(&self) -> usize;
    fn apply(&self, m: &CMatrix) -> CMatrix;
}

impl QuantumChannel for UnitaryMatrix {
    fn dim(&self) -> usize {
        UnitaryMatrix::dim(self)
    }

    fn apply(&self, m: &CMatrix) -> CMatrix {
        self.matrix() * m * self.matrix().adjoint()
    }
}

/// Tomography input states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InputState {
    Zero,
    One,
    Plus,
    PlusI,
}

impl InputState {
    pub const ALL: [InputState; 4] = [InputState::Zero, InputState::One, InputState::Plus, InputState::PlusI];

    pub fn vector(self) -> [C64; 2] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            InputState::Zero => [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            InputState::One => [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            InputState::Plus => [C64::new(s, 0.0), C64::new(s, 0.0)],
            InputState::PlusI => [C64::new(s, 0.0), C64::new(0.0, s)],
        }
    }

    pub fn density(self) -> CMatrix {
        let v = self.vector();
        CMatrix::from_fn(2, 2, |i, j| v[i] * v[j].conj())
    }
}

/// Measured Pauli observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PauliBasis {
    X,
    Y,
    Z,
}

impl PauliBasis {
    pub const ALL: [PauliBasis; 3] = [PauliBasis::X, PauliBasis::Y, PauliBasis::Z];

    pub fn tag(self) -> BasisTag {
        match self {
            PauliBasis::X => BasisTag::QubitX,
            PauliBasis::Y => BasisTag::QubitY,
            PauliBasis::Z => BasisTag::Computational,
        }
    }

    pub fn matrix(self) -> CMatrix {
        pauli(match self {
            PauliBasis::X => 1,
            PauliBasis::Y => 2,
            PauliBasis::Z => 3,
        })
    }
}

/// `I, X, Y, Z` for `k = 0..4`.
pub fn pauli(k: usize) -> CMatrix {
    let (o, z, i) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0));
    let e = match k {
        0 => [o, z, z, o],
        1 => [z, o, o, z],
        2 => [z, -i, i, z],
        _ => [o, z, z, -o],
    };
    CMatrix::from_row_slice(2, 2, &e)
}

/// Source of tomography data: counts of the `±1` eigen-outcomes (index 0 is
/// `+1`) for one input state and one measured Pauli.
pub trait ChannelSampler {
    fn sample(&self, input: InputState, basis: PauliBasis, shots: u64, seed: u64) -> Result<MeasurementCounts>;
}

/// Outcome probabilities `(p₊, p₋)` of measuring `basis` on `rho`.
pub fn pauli_probabilities(rho: &CMatrix, basis: PauliBasis) -> [f64; 2] {
    let e = (basis.matrix() * rho).trace().re.clamp(-1.0, 1.0);
    [(1.0 + e) / 2.0, (1.0 - e) / 2.0]
}

/// Process matrix in the Pauli basis: `E(ρ) = Σ χ_mn P_m ρ P_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessMatrix {
    chi: CMatrix,
}

fn choi_vectors() -> Vec<Vec<C64>> {
    (0..4)
        .map(|m| {
            let p = pauli(m);
            let mut v = vec![C64::new(0.0, 0.0); 4];
            for i in 0..2 {
                for k in 0..2 {
                    v[i * 2 + k] = p[(k, i)];
                }
            }
            v
        })
        .collect()
}

impl ProcessMatrix {
    pub fn new(chi: CMatrix) -> Result<Self> {
        if chi.nrows() != 4 || chi.ncols() != 4 {
            return Err(Error::Shape(format!("chi must be 4x4, got {}x{}", chi.nrows(), chi.ncols())));
        }
        Ok(ProcessMatrix { chi })
    }

    pub fn chi(&self) -> &CMatrix {
        &self.chi
    }

    /// From the Choi operator `J = Σ |i⟩⟨j| ⊗ E(|i⟩⟨j|)`.
    pub fn from_choi(j: &CMatrix) -> Self {
        let vs = choi_vectors();
        let chi = CMatrix::from_fn(4, 4, |m, n| {
            let jv: C64 = (0..4).map(|a| (0..4).map(|b| vs[m][a].conj() * j[(a, b)] * vs[n][b]).sum::<C64>()).sum();
            jv / 4.0
        });
        ProcessMatrix { chi }
    }

    pub fn choi(&self) -> CMatrix {
        let vs = choi_vectors();
        CMatrix::from_fn(4, 4, |a, b| {
            (0..4).map(|m| (0..4).map(|n| self.chi[(m, n)] * vs[m][a] * vs[n][b].conj()).sum::<C64>()).sum()
        })
    }

    /// Exact process matrix of a single-qubit channel.
    pub fn of_channel(e: &dyn QuantumChannel) -> Result<Self> {
        if e.dim() != 2 {
            return Err(Error::Shape(format!("process matrices are single-qubit, got dimension {}", e.dim())));
        }
        let mut j = CMatrix::zeros(4, 4);
        for i in 0..2 {
            for k in 0..2 {
                let mut unit = CMatrix::zeros(2, 2);
                unit[(i, k)] = C64::new(1.0, 0.0);
                let out = e.apply(&unit);
                for a in 0..2 {
                    for b in 0..2 {
                        j[(i * 2 + a, k * 2 + b)] = out[(a, b)];
                    }
                }
            }
        }
        Ok(ProcessMatrix::from_choi(&j))
    }

    /// Frobenius distance between process matrices.
    pub fn distance(&self, other: &ProcessMatrix) -> f64 {
        (&self.chi - &other.chi).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl QuantumChannel for ProcessMatrix {
    fn dim(&self) -> usize {
        2
    }

    fn apply(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(2, 2);
        for m in 0..4 {
            let left = pauli(m) * rho;
            for n in 0..4 {
                if self.chi[(m, n)] != C64::new(0.0, 0.0) {
                    out += &left * pauli(n) * self.chi[(m, n)];
                }
            }
        }
        out
    }
}

/// Output Bloch vectors `(⟨X⟩, ⟨Y⟩, ⟨Z⟩)` for the four inputs in
/// [`InputState::ALL`] order.
pub type BlochData = [[f64; 3]; 4];

fn bloch_density(r: [f64; 3]) -> CMatrix {
    let c = |v: f64| C64::new(v, 0.0);
    (pauli(0) + pauli(1) * c(r[0]) + pauli(2) * c(r[1]) + pauli(3) * c(r[2])) * c(0.5)
}

/// Closest positive semidefinite matrix with trace `target` obtained by
/// clipping negative eigenvalues of the Hermitian part.
pub fn project_psd(m: &CMatrix, target: f64) -> CMatrix {
    let h = (m + m.adjoint()).map(|z| z * 0.5);
    let eig = h.symmetric_eigen();
    let vals: Vec<f64> = eig.eigenvalues.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = vals.iter().sum();
    if total <= 0.0 {
        return CMatrix::identity(m.nrows(), m.ncols()).map(|z| z * (target / m.nrows() as f64));
    }
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (k, v) in vals.iter().enumerate() {
        let col = eig.eigenvectors.column(k);
        out += col * col.adjoint() * C64::new(v * target / total, 0.0);
    }
    out
}

/// Linear-inversion reconstruction from output Bloch vectors, then projection
/// of the Choi operator onto the positive cone with trace 2.
pub fn sqpt_from_bloch(data: &BlochData) -> ProcessMatrix {
    let [e0, e1, ep, epi] = data.map(bloch_density);
    let i = C64::new(0.0, 1.0);
    let half = C64::new(0.5, 0.5);
    let e01 = &ep + &epi * i - (&e0 + &e1) * half;
    let e10 = e01.adjoint();
    let blocks = [[&e0, &e01], [&e10, &e1]];
    let mut j = CMatrix::zeros(4, 4);
    for r in 0..2 {
        for c in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    j[(r * 2 + a, c * 2 + b)] = blocks[r][c][(a, b)];
                }
            }
        }
    }
    ProcessMatrix::from_choi(&project_psd(&j, 2.0))
}

/// Exact output Bloch vectors of a single-qubit channel.
pub fn exact_bloch(e: &dyn QuantumChannel) -> BlochData {
    InputState::ALL.map(|s| {
        let out = e.apply(&s.density());
        PauliBasis::ALL.map(|b| (b.matrix() * &out).trace().re)
    })
}

/// Standard tomography with `shots` per (input, basis) setting; the seed of
/// each setting is derived from `seed` and the setting's position.
pub fn sqpt_reconstruct(sampler: &dyn ChannelSampler, shots: u64, seed: u64) -> Result<ProcessMatrix> {
    sqpt_reconstruct_with(sampler, shots, seed, |c| Ok(c.frequencies()))
}

/// As [`sqpt_reconstruct`], with each setting's counts mapped to outcome
/// probabilities by `post` (for instance readout mitigation).
pub fn sqpt_reconstruct_with<F>(sampler: &dyn ChannelSampler, shots: u64, seed: u64, post: F) -> Result<ProcessMatrix>
where
    F: Fn(&MeasurementCounts) -> Result<Vec<f64>>,
{
    if shots == 0 {
        return Err(Error::InsufficientData("zero shots per setting".into()));
    }
    let mut data = [[0.0; 3]; 4];
    for (si, s) in InputState::ALL.iter().enumerate() {
        for (bi, b) in PauliBasis::ALL.iter().enumerate() {
            let c = sampler.sample(*s, *b, shots, crate::seed::derive(seed, &[si as u64, bi as u64]))?;
            if c.counts.len() != 2 || c.shots == 0 {
                return Err(Error::InvalidDistribution(format!(
                    "tomography counts must have 2 outcomes, got {}",
                    c.counts.len()
                )));
            }
            let p = post(&c)?;
            data[si][bi] = p[0] - p[1];
        }
    }
    Ok(sqpt_from_bloch(&data))
}

/// `(Σ_j Tr[U D_j^† U^† E(D_j)] + d²) / (d²(d+1))` over the Weyl-Heisenberg
/// operator basis.
pub fn average_gate_fidelity(e: &dyn QuantumChannel, u: &UnitaryMatrix) -> Result<f64> {
    let d = u.dim();
    if e.dim() != d {
        return Err(Error::Shape(format!("channel dimension {} vs unitary dimension {d}", e.dim())));
    }
    let um = u.matrix();
    let mut acc = C64::new(0.0, 0.0);
    for n in WHIndex::all(d) {
        let dn = wh_operator(n, d)?.into_matrix();
        let ideal = um * dn.adjoint() * um.adjoint();
        acc += (ideal * e.apply(&dn)).trace();
    }
    let dd = (d * d) as f64;
    Ok(((acc.re + dd) / (dd * (d as f64 + 1.0))).clamp(0.0, 1.0))
}

/// `(|Tr(U^† V)|²/d + 1)/(d+1)`.
pub fn agf_between_unitaries(v: &UnitaryMatrix, u: &UnitaryMatrix) -> Result<f64> {
    let d = u.dim();
    if v.dim() != d {
        return Err(Error::Shape(format!("dimensions {} and {d} differ", v.dim())));
    }
    let t = (u.matrix().adjoint() * v.matrix()).trace().norm_sqr();
    Ok(((t / d as f64 + 1.0) / (d as f64 + 1.0)).clamp(0.0, 1.0))
}

/// Smallest eigenvalue of the Choi operator.
pub fn choi_min_eigenvalue(p: &ProcessMatrix) -> f64 {
    hermitian_eigenvalues(&p.choi())[0]
}
