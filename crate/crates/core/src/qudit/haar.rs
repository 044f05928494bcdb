use rand_distr::{Distribution, StandardNormal};

use super::linalg::{CMatrix, C64};
use super::UnitaryMatrix;
use crate::seed;

/// Haar-distributed `d×d` unitary: QR of a complex Ginibre matrix with the
/// phases of `diag(R)` moved into `Q`. Deterministic in `seed`.
pub fn haar_random_unitary(d: usize, seed: u64) -> UnitaryMatrix {
    let mut rng = seed::rng(seed);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let g = CMatrix::from_fn(d, d, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        C64::new(re * s, im * s)
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let ph = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        q.column_mut(j).iter_mut().for_each(|z| *z *= ph);
    }
    UnitaryMatrix::new_unchecked(q)
}

#[cfg(test)]
mod tests {
    use super::super::linalg::unitarity_deviation;
    use super::super::wh_expand;
    use super::*;

    #[test]
    fn unitary_and_deterministic() {
        let u = haar_random_unitary(1, 3);
        assert!((u.matrix()[(0, 0)].norm() - 1.0).abs() < 1e-12);
        for seed in 0..20 {
            let u = haar_random_unitary(4, seed);
            assert!(unitarity_deviation(u.matrix()) < 1e-10);
            assert_eq!(u, haar_random_unitary(4, seed));
        }
        assert_ne!(haar_random_unitary(3, 1), haar_random_unitary(3, 2));
    }

    #[test]
    fn second_moment_of_identity_component() {
        // E|u_{0,0}|² = 1/4 for d=2 (four WH components share unit norm by symmetry).
        let n = 10_000;
        let xs: Vec<f64> = (0..n)
            .map(|s| wh_expand(haar_random_unitary(2, s).matrix()).unwrap().get(Default::default()).norm_sqr())
            .collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        assert!((mean - 0.25).abs() < 3.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn left_invariance_of_first_entry_distribution() {
        // |V U|_{00}|² has the same law as |U_{00}|² (Beta(1, d−1), mean 1/d).
        let d = 3;
        let v = haar_random_unitary(d, 999);
        let n = 5000;
        let stat = |f: &dyn Fn(&UnitaryMatrix) -> f64| {
            (0..n).map(|s| f(&haar_random_unitary(d, 5000 + s))).sum::<f64>() / n as f64
        };
        let plain = stat(&|u| u.matrix()[(0, 0)].norm_sqr());
        let rotated = stat(&|u| v.mul(u).matrix()[(0, 0)].norm_sqr());
        // var of Beta(1,2) = 1/18 ⇒ se ≈ 0.0033
        assert!((plain - 1.0 / 3.0).abs() < 0.012);
        assert!((rotated - 1.0 / 3.0).abs() < 0.012);
    }
}
