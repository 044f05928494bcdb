use super::linalg::{hs_inner, CMatrix, C64};
use super::{check_dim, wh_operator, WHIndex};
use crate::error::{Error, Result};

/// Generalized Gell-Mann matrices `T_1 … T_{d²−1}` with `Tr[T_i^† T_j] = 2δ_ij`.
///
/// Order: symmetric pairs `(j<k)`, then antisymmetric pairs, then diagonal
/// matrices, each family in lexicographic order. For `d = 2` this is `(X, Y, Z)`.
#[derive(Debug, Clone)]
pub struct GellMannBasis {
    dim: usize,
    matrices: Vec<CMatrix>,
}

impl GellMannBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    /// `T_k`, 1-based.
    pub fn get(&self, k: usize) -> Result<&CMatrix> {
        if k == 0 || k > self.matrices.len() {
            return Err(Error::Index { index: k, max: self.matrices.len() });
        }
        Ok(&self.matrices[k - 1])
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    /// `T̃_k = √(d/2) T_k`, 1-based.
    pub fn normalized(&self, k: usize) -> Result<CMatrix> {
        let s = (self.dim as f64 / 2.0).sqrt();
        Ok(self.get(k)?.map(|z| z * s))
    }
}

pub fn gell_mann_basis(d: usize) -> Result<GellMannBasis> {
    check_dim(d)?;
    let mut matrices = Vec::with_capacity(d * d - 1);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    for j in 0..d {
        for k in j + 1..d {
            let mut m = CMatrix::zeros(d, d);
            m[(j, k)] = one;
            m[(k, j)] = one;
            matrices.push(m);
        }
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut m = CMatrix::zeros(d, d);
            m[(j, k)] = -i;
            m[(k, j)] = i;
            matrices.push(m);
        }
    }
    for l in 1..d {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut m = CMatrix::zeros(d, d);
        for j in 0..l {
            m[(j, j)] = C64::new(norm, 0.0);
        }
        m[(l, l)] = C64::new(-(l as f64) * norm, 0.0);
        matrices.push(m);
    }
    Ok(GellMannBasis { dim: d, matrices })
}

/// Components of `T̃_k` in the Weyl-Heisenberg basis: `t̃_i = Tr[D_i^† T̃_k] / d`,
/// ordered like [`WHIndex::all`].
pub fn gm_to_wh_vector(basis: &GellMannBasis, k: usize) -> Result<Vec<C64>> {
    let d = basis.dim();
    let t = basis.normalized(k)?;
    WHIndex::all(d).map(|n| Ok(hs_inner(wh_operator(n, d)?.matrix(), &t) / d as f64)).collect()
}

/// Coefficients of `m` in the basis `{T_1, …, T_{d²−1}, √(2/d) I}`
/// (`m = Σ_k c_k T_k`), identity direction last.
pub fn gm_expand(basis: &GellMannBasis, m: &CMatrix) -> Result<Vec<C64>> {
    let d = basis.dim();
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::Shape(format!("expected {d}x{d}, got {}x{}", m.nrows(), m.ncols())));
    }
    let mut out: Vec<C64> = basis.matrices().iter().map(|t| hs_inner(t, m) / 2.0).collect();
    out.push(m.trace() * (2.0 / d as f64).sqrt() / 2.0);
    Ok(out)
}
