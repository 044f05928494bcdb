use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::gates::{hadamard, phase_gate};
use super::state::{DensityState, PureState};
use crate::error::{Error, Result};
use crate::estimation::partition_indices;
use crate::qudit::linalg::{kron, CMatrix, C64};
use crate::qudit::{gell_mann_basis, gm_to_wh_vector, WHIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisTag {
    Computational,
    TildeH,
    QubitX,
    QubitY,
    GmBasis,
}

impl BasisTag {
    pub fn name(&self) -> &'static str {
        match self {
            BasisTag::Computational => "computational",
            BasisTag::TildeH => "tildeH",
            BasisTag::QubitX => "qubit-X",
            BasisTag::QubitY => "qubit-Y",
            BasisTag::GmBasis => "gm-basis",
        }
    }
}

/// Block-Hadamard on the two-qudit control space: identity on `S₀ ∪ S_u`,
/// `|n⟩ ↦ (|n⟩+|⊖n⟩)/√2` on `S₊` and `|n⟩ ↦ (|⊖n⟩−|n⟩)/√2` on `S₋`.
pub fn tilde_h_operator(d: usize) -> Result<CMatrix> {
    let parts = partition_indices(d)?;
    let n = d * d;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = CMatrix::identity(n, n);
    for (a, b) in parts.plus.iter().zip(&parts.minus) {
        let (ia, ib) = (a.linear(d), b.linear(d));
        m[(ia, ia)] = C64::new(s, 0.0);
        m[(ib, ia)] = C64::new(s, 0.0);
        m[(ia, ib)] = C64::new(s, 0.0);
        m[(ib, ib)] = C64::new(-s, 0.0);
    }
    Ok(m)
}

/// Basis vectors of the Gell-Mann-induced measurement: the identity direction
/// followed by the `d²−1` vectors `t̃^{(k)}`.
pub fn gm_measurement_vectors(d: usize) -> Result<Vec<Vec<C64>>> {
    let basis = gell_mann_basis(d)?;
    let mut e0 = vec![C64::new(0.0, 0.0); d * d];
    e0[0] = C64::new(1.0, 0.0);
    let mut out = vec![e0];
    for k in 1..=basis.len() {
        out.push(gm_to_wh_vector(&basis, k)?);
    }
    Ok(out)
}

/// Unitary `M` such that outcome probabilities are `|M φ|²` on the control
/// state `φ` (indices `m·d + n`).
pub fn basis_change(tag: BasisTag, d: usize) -> Result<CMatrix> {
    let n = d * d;
    match tag {
        BasisTag::Computational => Ok(CMatrix::identity(n, n)),
        BasisTag::TildeH => tilde_h_operator(d),
        BasisTag::QubitX | BasisTag::QubitY if d != 2 => {
            Err(Error::BasisUnavailable { basis: tag.name().into(), dim: d })
        }
        BasisTag::QubitX => Ok(kron(&hadamard(), &hadamard())),
        BasisTag::QubitY => {
            let hs = hadamard() * phase_gate();
            Ok(kron(&hs, &hs))
        }
        BasisTag::GmBasis => {
            let vs = gm_measurement_vectors(d)?;
            Ok(CMatrix::from_fn(n, n, |k, i| vs[k][i].conj()))
        }
    }
}

/// Control-register state fed to a measurement.
#[derive(Debug, Clone)]
pub enum ControlState {
    Pure(PureState),
    Mixed(DensityState),
}

impl ControlState {
    fn dim(&self) -> Result<usize> {
        let dims = match self {
            ControlState::Pure(s) => s.layout().dims(),
            ControlState::Mixed(r) => r.layout().dims(),
        };
        if dims.len() != 2 || dims[0] != dims[1] {
            return Err(Error::LayoutMismatch(format!("control state must be two equal qudits, got {dims:?}")));
        }
        Ok(dims[0])
    }
}

pub fn born_probabilities(state: &ControlState, tag: BasisTag) -> Result<Vec<f64>> {
    let d = state.dim()?;
    let m = basis_change(tag, d)?;
    let probs: Vec<f64> = match state {
        ControlState::Pure(s) => {
            crate::qudit::linalg::mat_vec(&m, s.amplitudes()).iter().map(|z| z.norm_sqr()).collect()
        }
        ControlState::Mixed(r) => {
            let rot = &m * r.matrix() * m.adjoint();
            (0..rot.nrows()).map(|i| rot[(i, i)].re.max(0.0)).collect()
        }
    };
    Ok(probs)
}

/// Outcome counts of one measured basis. `counts[k]` is the number of shots
/// giving outcome `k` (control index `m·d + n`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementCounts {
    pub basis: BasisTag,
    pub counts: Vec<u64>,
    pub shots: u64,
}

impl MeasurementCounts {
    pub fn new(basis: BasisTag, counts: Vec<u64>) -> Result<Self> {
        let shots: u64 = counts.iter().sum();
        if shots == 0 {
            return Err(Error::InsufficientData("zero shots".into()));
        }
        Ok(MeasurementCounts { basis, counts, shots })
    }

    /// Plug-in frequencies `counts / shots`.
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.shots as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// Label of outcome `k` as `"m,n"` for a `d×d` control register.
    pub fn label(k: usize, d: usize) -> String {
        let i = WHIndex::from_linear(k, d);
        format!("{},{}", i.x, i.z)
    }
}

pub const SIMPLEX_TOL: f64 = 1e-8;

pub fn validate_distribution(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution("empty".into()));
    }
    if let Some(x) = p.iter().find(|x| !x.is_finite() || **x < -SIMPLEX_TOL) {
        return Err(Error::InvalidDistribution(format!("entry {x}")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::InvalidDistribution(format!("sums to {s}")));
    }
    Ok(())
}

/// Multinomial draw of `shots` outcomes as a chain of conditional binomials,
/// seeded per call; cost is independent of `shots`.
pub fn sample_counts(probabilities: &[f64], shots: u64, seed: u64, basis: BasisTag) -> Result<MeasurementCounts> {
    if shots == 0 {
        return Err(Error::InsufficientData("shots must be positive".into()));
    }
    validate_distribution(probabilities)?;
    let mut rng = crate::seed::rng(seed);
    let mut counts = vec![0u64; probabilities.len()];
    let mut remaining = shots;
    let mut mass: f64 = probabilities.iter().map(|p| p.max(0.0)).sum();
    let last = probabilities.len() - 1;
    for (k, p) in probabilities.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let p = p.max(0.0);
        if k == last {
            counts[k] = remaining;
            break;
        }
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let n = Binomial::new(remaining, q).map_err(|e| Error::InvalidDistribution(e.to_string()))?.sample(&mut rng);
        counts[k] = n;
        remaining -= n;
        mass -= p;
    }
    Ok(MeasurementCounts { basis, counts, shots })
}

#[cfg(test)]
mod tests {
    use super::super::estimation_circuit::run_estimation;
    use super::super::gates::WireLayout;
    use super::*;
    use crate::qudit::linalg::{max_abs_diff, unitarity_deviation};
    use crate::qudit::{exp_hamiltonian, wh_expand, HamiltonianParams, UnitaryMatrix};

    #[test]
    fn tilde_h_structure() {
        assert!(max_abs_diff(&tilde_h_operator(2).unwrap(), &CMatrix::identity(4, 4)) < 1e-15);
        let h3 = tilde_h_operator(3).unwrap();
        // one fixed point (0,0) and four 2x2 blocks
        assert_eq!(h3[(0, 0)], C64::new(1.0, 0.0));
        let fixed = (0..9).filter(|&i| (h3[(i, i)] - C64::new(1.0, 0.0)).norm() < 1e-15).count();
        assert_eq!(fixed, 1);
        for d in 2..=6 {
            assert!(unitarity_deviation(&tilde_h_operator(d).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn every_basis_change_is_unitary() {
        for d in 2..=4 {
            for tag in [BasisTag::Computational, BasisTag::TildeH, BasisTag::GmBasis] {
                assert!(unitarity_deviation(&basis_change(tag, d).unwrap()) < 1e-10);
            }
        }
        for tag in [BasisTag::QubitX, BasisTag::QubitY] {
            assert!(unitarity_deviation(&basis_change(tag, 2).unwrap()) < 1e-12);
            assert!(matches!(basis_change(tag, 3), Err(Error::BasisUnavailable { .. })));
        }
    }

    fn control(u: &UnitaryMatrix) -> ControlState {
        let d = u.dim();
        let psi: Vec<C64> = (0..d).map(|k| C64::new(if k == 0 { 1.0 } else { 0.0 }, 0.0)).collect();
        ControlState::Pure(run_estimation(u, &psi).unwrap().control)
    }

    #[test]
    fn computational_probabilities_are_squared_amplitudes() {
        let u = crate::qudit::haar_random_unitary(3, 4);
        let p = born_probabilities(&control(&u), BasisTag::Computational).unwrap();
        let c = wh_expand(u.matrix()).unwrap();
        for (pi, ci) in p.iter().zip(c.as_slice()) {
            assert!((pi - ci.norm_sqr()).abs() < 1e-12);
        }
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gm_probabilities_near_identity() {
        let d = 3;
        let lambda = vec![0.004, 0.0, 0.002, 0.0, 0.0, 0.003, 0.0, 0.001];
        let u = exp_hamiltonian(&HamiltonianParams::new(d, lambda.clone()).unwrap()).unwrap();
        let p = born_probabilities(&control(&u), BasisTag::GmBasis).unwrap();
        for (j, l) in lambda.iter().enumerate() {
            let approx = 2.0 * l * l / d as f64;
            assert!((p[j + 1] - approx).abs() < 1e-7, "j={j} p={} approx={approx}", p[j + 1]);
        }
    }

    #[test]
    fn tilde_h_on_identity() {
        let p = born_probabilities(&control(&UnitaryMatrix::identity(3)), BasisTag::TildeH).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_and_pure_agree() {
        let u = crate::qudit::haar_random_unitary(2, 8);
        let ControlState::Pure(s) = control(&u) else { unreachable!() };
        let mixed = ControlState::Mixed(s.density());
        let _ = WireLayout::new(vec![2, 2]).unwrap();
        for tag in [BasisTag::Computational, BasisTag::QubitX, BasisTag::QubitY] {
            let a = born_probabilities(&ControlState::Pure(s.clone()), tag).unwrap();
            let b = born_probabilities(&mixed, tag).unwrap();
            assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12));
        }
    }

    #[test]
    fn sampling_contracts() {
        let c = sample_counts(&[0.0, 1.0, 0.0], 1000, 1, BasisTag::Computational).unwrap();
        assert_eq!(c.counts, vec![0, 1000, 0]);
        let a = sample_counts(&[0.25; 4], 5000, 42, BasisTag::Computational).unwrap();
        let b = sample_counts(&[0.25; 4], 5000, 42, BasisTag::Computational).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.counts.iter().sum::<u64>(), 5000);
        assert!(sample_counts(&[0.5, 0.6], 10, 0, BasisTag::Computational).is_err());
        assert!(sample_counts(&[1.2, -0.2], 10, 0, BasisTag::Computational).is_err());
        assert!(sample_counts(&[1.0], 0, 0, BasisTag::Computational).is_err());
    }

    #[test]
    fn uniform_sampling_within_binomial_bound() {
        let n = 1_000_000u64;
        let c = sample_counts(&[0.25; 4], n, 2024, BasisTag::Computational).unwrap();
        let sigma = (n as f64 * 0.25 * 0.75).sqrt();
        for k in c.counts {
            assert!((k as f64 - 250_000.0).abs() < 5.0 * sigma);
        }
    }
}
