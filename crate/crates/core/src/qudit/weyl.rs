use super::linalg::{root_of_unity, CMatrix, C64, ZERO};
use super::{check_dim, UnitaryMatrix, WHCoefficients, WHIndex};
use crate::error::{Error, Result};

/// `X^power` with `X|k⟩ = |k⊕1⟩`. Negative powers are reduced mod d.
pub fn shift_matrix(d: usize, power: i64) -> CMatrix {
    let p = power.rem_euclid(d as i64) as usize;
    let mut m = CMatrix::zeros(d, d);
    for k in 0..d {
        m[((k + p) % d, k)] = C64::new(1.0, 0.0);
    }
    m
}

/// `Z^power` with `Z|k⟩ = ω^k|k⟩`.
pub fn phase_matrix(d: usize, power: i64) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    for k in 0..d {
        m[(k, k)] = root_of_unity(power * k as i64, d);
    }
    m
}

/// `D_n = X^{n_x} Z^{n_z}`.
pub fn wh_operator(n: WHIndex, d: usize) -> Result<UnitaryMatrix> {
    check_dim(d)?;
    let n = WHIndex::new(n.x, n.z, d);
    let mut m = CMatrix::zeros(d, d);
    for k in 0..d {
        m[((k + n.x) % d, k)] = root_of_unity((n.z * k) as i64, d);
    }
    Ok(UnitaryMatrix::new_unchecked(m))
}

/// `F_{jk} = ω^{jk}/√d`.
pub fn fourier_matrix(d: usize) -> Result<UnitaryMatrix> {
    check_dim(d)?;
    let s = 1.0 / (d as f64).sqrt();
    let m = CMatrix::from_fn(d, d, |j, k| root_of_unity((j * k) as i64, d) * s);
    Ok(UnitaryMatrix::new_unchecked(m))
}

/// Expands an arbitrary square operator: `u_n = Tr[D_n^† U] / d`.
///
/// No global-phase normalization is applied, so `wh_reconstruct` inverts this
/// exactly; use [`WHCoefficients::phase_fixed`] for the `φ_{0,0} = 0` view.
pub fn wh_expand(u: &CMatrix) -> Result<WHCoefficients> {
    if u.nrows() != u.ncols() {
        return Err(Error::Shape(format!("{}x{} matrix is not square", u.nrows(), u.ncols())));
    }
    let d = u.nrows();
    check_dim(d)?;
    let inv_d = 1.0 / d as f64;
    let coeffs = WHIndex::all(d)
        .map(|n| {
            // D_n has a single nonzero per column: row (k + n_x) mod d, value ω^{n_z k}.
            (0..d).map(|k| root_of_unity(-((n.z * k) as i64), d) * u[((k + n.x) % d, k)]).sum::<C64>() * inv_d
        })
        .collect();
    WHCoefficients::from_vec(d, coeffs)
}

/// `Σ_n u_n D_n`. Unitarity of the result is not checked.
pub fn wh_reconstruct(c: &WHCoefficients) -> CMatrix {
    let d = c.dim();
    let mut m = CMatrix::zeros(d, d);
    for n in WHIndex::all(d) {
        let un = c.get(n);
        if un == ZERO {
            continue;
        }
        for k in 0..d {
            m[((k + n.x) % d, k)] += un * root_of_unity((n.z * k) as i64, d);
        }
    }
    m
}

/// Value of a unitarity condition on a coefficient map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Residual {
    /// `Σ_m r_m r_{p⊕m} e^{i(φ_{p⊕m}−φ_m)} ω^{−m_x p_z}` for `p ≠ 0`.
    Orthogonality(C64),
    /// `Σ r_m² − 1`, reported for `p = 0`.
    Normalization(f64),
}

impl Residual {
    pub fn magnitude(&self) -> f64 {
        match *self {
            Residual::Orthogonality(z) => z.norm(),
            Residual::Normalization(x) => x.abs(),
        }
    }
}

/// Evaluates the unitarity condition of index `p`; vanishes for every `p`
/// iff the coefficients describe a unitary.
pub fn unitarity_residual(c: &WHCoefficients, p: WHIndex) -> Residual {
    let d = c.dim();
    let p = WHIndex::new(p.x, p.z, d);
    if p.is_zero() {
        return Residual::Normalization(c.norm_sqr() - 1.0);
    }
    let sum =
        WHIndex::all(d).map(|m| c.get(m).conj() * c.get(p.add(m, d)) * root_of_unity(-((m.x * p.z) as i64), d)).sum();
    Residual::Orthogonality(sum)
}

#[cfg(test)]
mod tests {
    use super::super::linalg::{hs_inner, max_abs_diff};
    use super::super::{haar_random_unitary, UnitaryMatrix};
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn identity_index_is_identity() {
        let d0 = wh_operator(WHIndex::ZERO, 3).unwrap();
        assert_eq!(d0.matrix(), &CMatrix::identity(3, 3));
    }

    #[test]
    fn xz_for_qubit_matches_direct_product() {
        let xz = wh_operator(WHIndex { x: 1, z: 1 }, 2).unwrap();
        let direct = shift_matrix(2, 1) * phase_matrix(2, 1);
        assert!(max_abs_diff(xz.matrix(), &direct) < 1e-15);
        // column 0 -> |1⟩, column 1 -> −|0⟩
        assert!((xz.matrix()[(1, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((xz.matrix()[(0, 1)] - C64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn invalid_dimension_rejected() {
        assert!(matches!(wh_operator(WHIndex::ZERO, 1), Err(Error::InvalidDimension(1))));
        assert!(matches!(fourier_matrix(0), Err(Error::InvalidDimension(0))));
    }

    #[test]
    fn hilbert_schmidt_orthogonality() {
        for d in 2..=7 {
            for n in WHIndex::all(d) {
                let dn = wh_operator(n, d).unwrap();
                for m in WHIndex::all(d) {
                    let dm = wh_operator(m, d).unwrap();
                    let ip = hs_inner(dn.matrix(), dm.matrix());
                    let expect = if n == m { d as f64 } else { 0.0 };
                    assert!((ip - C64::new(expect, 0.0)).norm() < 1e-10, "d={d} n={n} m={m}");
                }
            }
        }
    }

    #[test]
    fn shift_phase_commutation() {
        for d in 2..=6 {
            for j in 0..d as i64 {
                for k in 0..d as i64 {
                    let lhs = phase_matrix(d, j) * shift_matrix(d, k);
                    let rhs = (shift_matrix(d, k) * phase_matrix(d, j)).map(|z| z * root_of_unity(j * k, d));
                    assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn fourier_properties() {
        let h = fourier_matrix(2).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let expect = CMatrix::from_row_slice(2, 2, &[s.into(), s.into(), s.into(), (-s).into()]);
        assert!(max_abs_diff(h.matrix(), &expect) < 1e-15);
        for d in 2..=8 {
            let f = fourier_matrix(d).unwrap();
            assert!(super::super::linalg::unitarity_deviation(f.matrix()) < 1e-12);
        }
        let f3 = fourier_matrix(3).unwrap();
        for j in 0..3 {
            assert!((f3.matrix()[(j, 0)] - C64::new(1.0 / 3f64.sqrt(), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn expand_identity_and_rotation() {
        for d in 2..=5 {
            let c = wh_expand(&CMatrix::identity(d, d)).unwrap();
            for n in WHIndex::all(d) {
                let e = if n.is_zero() { 1.0 } else { 0.0 };
                assert!((c.get(n) - C64::new(e, 0.0)).norm() < 1e-15);
            }
        }
        // exp(−iαX) = cos α I − i sin α X
        let a = std::f64::consts::PI / 3.0;
        let m = CMatrix::identity(2, 2).map(|z| z * a.cos()) - shift_matrix(2, 1).map(|z| z * C64::new(0.0, a.sin()));
        let c = wh_expand(&m).unwrap();
        assert!((c.get(WHIndex { x: 0, z: 0 }) - C64::new(a.cos(), 0.0)).norm() < 1e-15);
        assert!((c.get(WHIndex { x: 1, z: 0 }) - C64::new(0.0, -a.sin())).norm() < 1e-15);
        assert!(c.get(WHIndex { x: 1, z: 1 }).norm() < 1e-15);
        assert!(c.get(WHIndex { x: 0, z: 1 }).norm() < 1e-15);
    }

    #[test]
    fn expand_rejects_non_square() {
        assert!(matches!(wh_expand(&CMatrix::zeros(2, 3)), Err(Error::Shape(_))));
    }

    #[test]
    fn round_trip_and_normalization() {
        for d in 2..=5 {
            for seed in 0..5 {
                let u = haar_random_unitary(d, seed);
                let c = wh_expand(u.matrix()).unwrap();
                assert!((c.norm_sqr() - 1.0).abs() < 1e-10);
                assert!(max_abs_diff(&wh_reconstruct(&c), u.matrix()) < 1e-12);
            }
        }
        let x3 = shift_matrix(3, 1);
        assert!(max_abs_diff(&wh_reconstruct(&wh_expand(&x3).unwrap()), &x3) < 1e-15);
    }

    #[test]
    fn reconstruct_requires_complete_map() {
        let mut map = HashMap::new();
        map.insert(WHIndex::ZERO, C64::new(1.0, 0.0));
        assert!(matches!(WHCoefficients::from_map(2, &map), Err(Error::IncompleteCoefficients(..))));
        for n in WHIndex::all(2).skip(1) {
            map.insert(n, C64::new(0.0, 0.0));
        }
        let c = WHCoefficients::from_map(2, &map).unwrap();
        assert_eq!(wh_reconstruct(&c), CMatrix::identity(2, 2));
    }

    #[test]
    fn residuals_vanish_for_unitaries() {
        for d in 2..=5 {
            for seed in 10..14 {
                let c = wh_expand(haar_random_unitary(d, seed).matrix()).unwrap();
                for p in WHIndex::all(d) {
                    assert!(unitarity_residual(&c, p).magnitude() < 1e-10, "d={d} p={p}");
                }
            }
        }
        let id = wh_expand(UnitaryMatrix::identity(3).matrix()).unwrap();
        assert!(unitarity_residual(&id, WHIndex { x: 0, z: 1 }).magnitude() < 1e-15);
    }

    #[test]
    fn residual_flags_non_unitary_map() {
        let s = 1.0 / 2f64.sqrt();
        let c = WHCoefficients::from_vec(2, vec![s.into(), 0.0.into(), s.into(), 0.0.into()]).unwrap();
        // u_{0,0} = u_{1,0} = 1/√2 : conj(u00) u10 + conj(u10) u00 = 1
        match unitarity_residual(&c, WHIndex { x: 1, z: 0 }) {
            Residual::Orthogonality(z) => assert!((z - C64::new(1.0, 0.0)).norm() < 1e-12),
            r => panic!("unexpected {r:?}"),
        }
        assert!(matches!(unitarity_residual(&c, WHIndex::ZERO), Residual::Normalization(x) if x.abs() < 1e-12));
    }
}
