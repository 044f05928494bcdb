use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::partition::partition_indices;
use crate::circuit::{BasisTag, MeasurementCounts};
use crate::error::{Error, Result};
use crate::qudit::linalg::{arg, C64};
use crate::qudit::{UnitaryMatrix, WHCoefficients, WHIndex};

/// Estimate for one conjugate pair `{a, ⊖a}` with `a ∈ S₊`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedEstimate {
    pub index: WHIndex,
    pub r: f64,
    pub cos_delta: f64,
    /// The four phase candidates for `φ_a`, in `[0, 2π)`.
    pub candidates: [f64; 4],
    /// False when `P_a + P_{⊖a} = 0`, so that the phase carries no information.
    pub phase_defined: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloseIdEstimate {
    pub dim: usize,
    pub r0: f64,
    pub unpaired: Vec<(WHIndex, f64)>,
    pub paired: Vec<PairedEstimate>,
}

impl CloseIdEstimate {
    /// `r₀² + Σ r_f² + 2 Σ r_a²`, equal to one on exact data.
    pub fn normalization(&self) -> f64 {
        self.r0 * self.r0
            + self.unpaired.iter().map(|(_, r)| r * r).sum::<f64>()
            + 2.0 * self.paired.iter().map(|p| p.r * p.r).sum::<f64>()
    }

    /// Amplitude estimate for any index (`r_{⊖a} = r_a`).
    pub fn amplitude(&self, n: WHIndex) -> f64 {
        if n.is_zero() {
            return self.r0;
        }
        if let Some((_, r)) = self.unpaired.iter().find(|(f, _)| *f == n) {
            return *r;
        }
        let neg = n.neg(self.dim);
        self.paired.iter().find(|p| p.index == n || p.index == neg).map(|p| p.r).unwrap_or(0.0)
    }
}

/// Phase fixed by unitarity for a self-conjugate index, up to `π`.
pub fn unpaired_phase(f: WHIndex, d: usize) -> f64 {
    PI * (f.x * f.z) as f64 / d as f64 + PI / 2.0
}

/// `φ_{⊖a}` implied by `φ_a` to first order in the off-identity amplitudes.
pub fn conjugate_phase(a: WHIndex, phi_a: f64, d: usize) -> f64 {
    -phi_a + 2.0 * PI * (a.x * a.z) as f64 / d as f64 + PI
}

fn candidates(a: WHIndex, cos_delta: f64, d: usize) -> [f64; 4] {
    let half = 0.5 * cos_delta.clamp(-1.0, 1.0).acos();
    let base = PI * (a.x * a.z) as f64 / d as f64 + PI / 2.0;
    [base + half, base - half, base + half + PI, base - half + PI].map(|p| p.rem_euclid(2.0 * PI))
}

/// Estimator on the tilde-H basis probabilities, indexed by `n.linear(d)`.
pub fn estimate_close_identity_probabilities(p: &[f64], d: usize) -> Result<CloseIdEstimate> {
    let parts = partition_indices(d)?;
    if p.len() != d * d {
        return Err(Error::InvalidDistribution(format!("expected {} outcomes, got {}", d * d, p.len())));
    }
    let at = |n: WHIndex| p[n.linear(d)].max(0.0);
    let unpaired = parts.unpaired.iter().map(|&f| (f, at(f).sqrt())).collect();
    let paired = parts
        .plus
        .iter()
        .zip(&parts.minus)
        .map(|(&a, &b)| {
            let (pa, pb) = (at(a), at(b));
            let sum = pa + pb;
            if sum > 0.0 {
                let cos_delta = ((pa - pb) / sum).clamp(-1.0, 1.0);
                PairedEstimate {
                    index: a,
                    r: (sum / 2.0).sqrt(),
                    cos_delta,
                    candidates: candidates(a, cos_delta, d),
                    phase_defined: true,
                }
            } else {
                PairedEstimate {
                    index: a,
                    r: 0.0,
                    cos_delta: 0.0,
                    candidates: candidates(a, 0.0, d),
                    phase_defined: false,
                }
            }
        })
        .collect();
    Ok(CloseIdEstimate { dim: d, r0: at(WHIndex::ZERO).sqrt(), unpaired, paired })
}

pub fn estimate_close_identity(counts: &MeasurementCounts, d: usize) -> Result<CloseIdEstimate> {
    if counts.basis != BasisTag::TildeH {
        return Err(Error::InvalidDistribution(format!("expected tildeH counts, got {}", counts.basis.name())));
    }
    if counts.shots == 0 {
        return Err(Error::InsufficientData("zero shots".into()));
    }
    estimate_close_identity_probabilities(&counts.frequencies(), d)
}

/// Circular distance between two angles, in `[0, π]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let x = (a - b).rem_euclid(2.0 * PI);
    x.min(2.0 * PI - x)
}

/// Phases resolved against a reference: for every `f ∈ S_u` the branch of
/// `unpaired_phase` (mod π) and for every `a ∈ S₊` the candidate closest to
/// the reference phase (after the `φ₀₀ = 0` fix).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedPhases {
    pub unpaired: Vec<(WHIndex, f64)>,
    pub paired: Vec<(WHIndex, f64)>,
}

pub fn select_phase_candidate(est: &CloseIdEstimate, reference: &WHCoefficients) -> Result<ResolvedPhases> {
    let d = est.dim;
    if reference.dim() != d {
        return Err(Error::Shape(format!("reference has dimension {}, estimate {d}", reference.dim())));
    }
    let r = reference.phase_fixed();
    let closest = |opts: &[f64], target: f64| {
        opts.iter()
            .copied()
            .min_by(|x, y| circular_distance(*x, target).total_cmp(&circular_distance(*y, target)))
            .unwrap_or(0.0)
    };
    let unpaired = est
        .unpaired
        .iter()
        .map(|&(f, _)| {
            let base = unpaired_phase(f, d);
            (f, closest(&[base.rem_euclid(2.0 * PI), (base + PI).rem_euclid(2.0 * PI)], r.phase(f)))
        })
        .collect();
    let paired = est.paired.iter().map(|p| (p.index, closest(&p.candidates, r.phase(p.index)))).collect();
    Ok(ResolvedPhases { unpaired, paired })
}

/// Coefficient map assembled from amplitudes and resolved phases; `⊖a`
/// entries follow from the pairing relations.
pub fn reconstruct_coefficients(est: &CloseIdEstimate, phases: &ResolvedPhases) -> Result<WHCoefficients> {
    let d = est.dim;
    let mut u = vec![C64::new(0.0, 0.0); d * d];
    u[0] = C64::new(est.r0, 0.0);
    for &(f, phi) in &phases.unpaired {
        u[f.linear(d)] = C64::from_polar(est.amplitude(f), phi);
    }
    for p in &est.paired {
        let phi = phases.paired.iter().find(|(a, _)| *a == p.index).map(|(_, v)| *v).unwrap_or(p.candidates[0]);
        u[p.index.linear(d)] = C64::from_polar(p.r, phi);
        u[p.index.neg(d).linear(d)] = C64::from_polar(p.r, conjugate_phase(p.index, phi, d));
    }
    WHCoefficients::from_vec(d, u)
}

/// `1 − r₀` with `r₀ = |u₀₀|`.
pub fn closeness_measure(u: &UnitaryMatrix) -> f64 {
    let d = u.dim() as f64;
    (1.0 - u.matrix().trace().norm() / d).max(0.0)
}

/// Circular error of every resolved phase, unpaired indices first.
pub fn phase_errors(phases: &ResolvedPhases, reference: &WHCoefficients) -> Vec<f64> {
    let r = reference.phase_fixed();
    phases.unpaired.iter().chain(&phases.paired).map(|&(n, phi)| circular_distance(phi, arg(r.get(n)))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{born_probabilities, run_estimation, ControlState};
    use crate::qudit::{exp_hamiltonian, shift_matrix, wh_expand, HamiltonianParams};
    use rand::Rng;

    fn tilde_h_probs(u: &UnitaryMatrix) -> Vec<f64> {
        let d = u.dim();
        let psi: Vec<C64> = (0..d).map(|k| C64::new(if k == 0 { 1.0 } else { 0.0 }, 0.0)).collect();
        born_probabilities(&ControlState::Pure(run_estimation(u, &psi).unwrap().control), BasisTag::TildeH).unwrap()
    }

    fn small_unitary(d: usize, scale: f64, seed: u64) -> UnitaryMatrix {
        let mut rng = crate::seed::rng(seed);
        let lambda = (0..d * d - 1).map(|_| rng.random_range(-scale..scale)).collect();
        exp_hamiltonian(&HamiltonianParams::new(d, lambda).unwrap()).unwrap()
    }

    #[test]
    fn identity_estimate() {
        let mut p = vec![0.0; 9];
        p[0] = 1.0;
        let e = estimate_close_identity_probabilities(&p, 3).unwrap();
        assert_eq!(e.r0, 1.0);
        assert!(e.paired.iter().all(|q| q.r == 0.0 && !q.phase_defined));
    }

    #[test]
    fn balanced_pair_gives_quarter_turn_candidates() {
        let d = 3;
        let parts = partition_indices(d).unwrap();
        let (a, b) = (parts.plus[0], parts.minus[0]);
        let mut p = vec![0.0; 9];
        p[0] = 0.9;
        p[a.linear(d)] = 0.05;
        p[b.linear(d)] = 0.05;
        let e = estimate_close_identity_probabilities(&p, d).unwrap();
        let q = &e.paired[0];
        assert!(q.cos_delta.abs() < 1e-15);
        // Δ = ±π/2  ⇒  2φ_a − 2π a_x a_z / d − π = ±π/2
        for c in q.candidates {
            let delta = (2.0 * c - 2.0 * PI * (a.x * a.z) as f64 / d as f64 - PI).rem_euclid(2.0 * PI);
            assert!((delta - PI / 2.0).abs() < 1e-12 || (delta - 3.0 * PI / 2.0).abs() < 1e-12);
        }
        assert!((e.normalization() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn probabilities_follow_pairing_model() {
        let d = 3;
        let u = small_unitary(d, 0.01, 3);
        let p = tilde_h_probs(&u);
        let c = wh_expand(u.matrix()).unwrap().phase_fixed();
        for (a, b) in partition_indices(d).unwrap().plus.iter().zip(&partition_indices(d).unwrap().minus) {
            let delta = c.phase(*a) - c.phase(*b);
            let ra = c.amplitude(*a);
            assert!((p[a.linear(d)] - ra * ra * (1.0 + delta.cos())).abs() < 1e-6);
            assert!((p[b.linear(d)] - ra * ra * (1.0 - delta.cos())).abs() < 1e-6);
        }
    }

    #[test]
    fn amplitudes_recovered_near_identity() {
        for d in [2, 3, 4] {
            for seed in 0..10 {
                let u = small_unitary(d, 0.01, 100 + seed);
                let e = estimate_close_identity_probabilities(&tilde_h_probs(&u), d).unwrap();
                let c = wh_expand(u.matrix()).unwrap();
                for n in WHIndex::all(d) {
                    assert!((e.amplitude(n) - c.amplitude(n)).abs() < 1e-4, "d={d} n={n}");
                }
                assert!((e.normalization() - 1.0).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn select_examples() {
        let d = 3;
        let a = partition_indices(d).unwrap().plus[0];
        let est = CloseIdEstimate {
            dim: d,
            r0: 1.0,
            unpaired: vec![],
            paired: vec![PairedEstimate {
                index: a,
                r: 0.1,
                cos_delta: 0.0,
                candidates: [0.3, 1.0, 2.0, 4.0],
                phase_defined: true,
            }],
        };
        let mut u = vec![C64::new(0.0, 0.0); 9];
        u[0] = C64::new(1.0, 0.0);
        u[a.linear(d)] = C64::from_polar(0.1, 2.0);
        let r = select_phase_candidate(&est, &WHCoefficients::from_vec(d, u.clone()).unwrap()).unwrap();
        assert_eq!(r.paired[0].1, 2.0);

        let q = PI / 2.0;
        let est2 = CloseIdEstimate {
            paired: vec![PairedEstimate { candidates: [q, -q + 2.0 * PI, q + PI, 0.1], ..est.paired[0].clone() }],
            ..est
        };
        u[a.linear(d)] = C64::from_polar(0.1, q - 0.01);
        let r = select_phase_candidate(&est2, &WHCoefficients::from_vec(d, u).unwrap()).unwrap();
        assert_eq!(r.paired[0].1, q);
    }

    #[test]
    fn resolved_phases_reproduce_reference() {
        // the pairing relations hold to first order, so phase errors shrink
        // linearly with the distance from the identity
        let d = 4;
        let mean_err = |scale: f64| {
            let mut all = Vec::new();
            for seed in 0..10 {
                let u = small_unitary(d, scale, 200 + seed);
                let e = estimate_close_identity_probabilities(&tilde_h_probs(&u), d).unwrap();
                let c = wh_expand(u.matrix()).unwrap();
                let r = select_phase_candidate(&e, &c).unwrap();
                all.extend(phase_errors(&r, &c));
                let rebuilt = reconstruct_coefficients(&e, &r).unwrap();
                let diff = rebuilt
                    .as_slice()
                    .iter()
                    .zip(c.phase_fixed().as_slice())
                    .map(|(x, y)| (x - y).norm())
                    .fold(0.0, f64::max);
                assert!(diff < scale, "seed {seed}: {diff}");
            }
            all.iter().sum::<f64>() / all.len() as f64
        };
        let coarse = mean_err(0.01);
        let fine = mean_err(0.001);
        assert!(coarse < 0.05, "{coarse}");
        assert!(fine < 0.2 * coarse, "{fine} vs {coarse}");
    }

    #[test]
    fn closeness_examples() {
        assert!(closeness_measure(&UnitaryMatrix::identity(3)).abs() < 1e-15);
        let x = UnitaryMatrix::new(shift_matrix(2, 1)).unwrap();
        assert!((closeness_measure(&x) - 1.0).abs() < 1e-15);
        let mut last = 0.0;
        for t in [0.001, 0.01, 0.05, 0.1] {
            let u = exp_hamiltonian(&HamiltonianParams::new(3, vec![t, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap())
                .unwrap();
            let m = closeness_measure(&u);
            assert!(m > last);
            assert!((m - t * t / 3.0).abs() < 0.1 * t * t);
            last = m;
        }
    }

    #[test]
    fn wrong_basis_rejected() {
        let c = MeasurementCounts::new(BasisTag::Computational, vec![1, 0, 0, 0]).unwrap();
        assert!(estimate_close_identity(&c, 2).is_err());
    }
}
