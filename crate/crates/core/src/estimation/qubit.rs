use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{validate_distribution, BasisTag, MeasurementCounts};
use crate::error::{Error, Result};
use crate::qudit::linalg::{CMatrix, C64};
use crate::qudit::{wh_expand, UnitaryMatrix, WHIndex};

/// Denominators below this are treated as zero by the octant estimator.
pub const DEGENERATE_TOL: f64 = 1e-12;
/// Probabilities at or below this count as a vanishing magnitude.
pub const ZERO_PROB_TOL: f64 = 1e-12;
/// Both `s_x` denominators below this trigger the numerator tie-break.
pub const SX_DENOM_TOL: f64 = 1e-9;

/// Sign triple `(s_x, s_y, s_z)` of the rotation axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Octant {
    pub x: bool,
    pub y: bool,
    pub z: bool,
}

impl Octant {
    /// `true` means non-negative component.
    pub fn new(x: bool, y: bool, z: bool) -> Self {
        Octant { x, y, z }
    }

    pub fn of_axis(n: [f64; 3]) -> Self {
        Octant { x: n[0] >= 0.0, y: n[1] >= 0.0, z: n[2] >= 0.0 }
    }
}

fn sign(positive: bool) -> f64 {
    if positive {
        1.0
    } else {
        -1.0
    }
}

/// `U = exp(−iα n̂·σ)` with `n̂ = (sinθ cosφ, sinθ sinφ, cosθ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitAngles {
    pub alpha: f64,
    pub theta: f64,
    pub phi: f64,
    pub octant: Option<Octant>,
    /// Set when θ or φ is undetermined because the unitary does not depend on it.
    pub degenerate: bool,
}

impl QubitAngles {
    pub fn new(alpha: f64, theta: f64, phi: f64) -> Self {
        QubitAngles { alpha, theta, phi, octant: None, degenerate: false }
    }

    pub fn axis(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn coefficients(&self) -> QubitCoefficients {
        let n = self.axis();
        let s = self.alpha.sin();
        QubitCoefficients { c_i: self.alpha.cos(), c_x: s * n[0], c_y: s * n[1], c_z: s * n[2] }
    }

    pub fn unitary(&self) -> UnitaryMatrix {
        self.coefficients().unitary()
    }
}

/// Outcome probabilities `(P₀₀, P₀₁, P₁₀, P₁₁)` of the full circuit in the
/// computational basis: `(c_I², c_z², c_x², c_y²)`.
pub fn qubit_probabilities(angles: &QubitAngles) -> [f64; 4] {
    let c = angles.coefficients();
    [c.c_i * c.c_i, c.c_z * c.c_z, c.c_x * c.c_x, c.c_y * c.c_y]
}

/// `U = c_I I − i(c_x X + c_y Y + c_z Z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitCoefficients {
    pub c_i: f64,
    pub c_x: f64,
    pub c_y: f64,
    pub c_z: f64,
}

impl QubitCoefficients {
    pub fn as_array(&self) -> [f64; 4] {
        [self.c_i, self.c_x, self.c_y, self.c_z]
    }

    pub fn from_array(c: [f64; 4]) -> Self {
        QubitCoefficients { c_i: c[0], c_x: c[1], c_y: c[2], c_z: c[3] }
    }

    pub fn norm(&self) -> f64 {
        self.as_array().iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return QubitCoefficients { c_i: 1.0, c_x: 0.0, c_y: 0.0, c_z: 0.0 };
        }
        QubitCoefficients::from_array(self.as_array().map(|v| v / n))
    }

    /// Coefficients of a 2×2 unitary, with the global phase chosen so that the
    /// first non-vanishing of `(c_I, c_x, c_y, c_z)` is real and positive.
    pub fn from_unitary(u: &UnitaryMatrix) -> Result<Self> {
        if u.dim() != 2 {
            return Err(Error::Shape(format!("qubit coefficients need a 2x2 unitary, got {0}x{0}", u.dim())));
        }
        let w = wh_expand(u.matrix())?;
        let i = C64::new(0.0, 1.0);
        let raw = [
            w.get(WHIndex { x: 0, z: 0 }),
            i * w.get(WHIndex { x: 1, z: 0 }),
            w.get(WHIndex { x: 1, z: 1 }),
            i * w.get(WHIndex { x: 0, z: 1 }),
        ];
        let lead = raw.iter().find(|z| z.norm() > 1e-9).copied().unwrap_or(C64::new(1.0, 0.0));
        let fix = lead.conj() / lead.norm();
        Ok(QubitCoefficients::from_array(raw.map(|z| (z * fix).re)))
    }

    pub fn unitary(&self) -> UnitaryMatrix {
        let i = C64::new(0.0, 1.0);
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(self.c_i, 0.0) - i * self.c_z,
                -i * self.c_x - self.c_y,
                -i * self.c_x + self.c_y,
                C64::new(self.c_i, 0.0) + i * self.c_z,
            ],
        );
        let n = self.norm();
        UnitaryMatrix::new_unchecked(m / C64::new(n, 0.0))
    }
}

/// Recovers `(α, θ, φ)` from the computational-basis probabilities of the
/// full circuit, with the quadrants fixed by the octant prior.
pub fn estimate_qubit_with_octant(p: &[f64], octant: Octant) -> Result<QubitAngles> {
    if p.len() != 4 {
        return Err(Error::InvalidDistribution(format!("expected 4 outcomes, got {}", p.len())));
    }
    validate_distribution(p)?;
    let p: Vec<f64> = p.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let alpha = p[0].sqrt().min(1.0).acos();
    let mut out = QubitAngles { alpha, theta: 0.0, phi: 0.0, octant: Some(octant), degenerate: false };

    let s2 = 1.0 - p[0];
    if s2 < DEGENERATE_TOL {
        out.degenerate = true;
        return Ok(out);
    }
    let cos_theta = sign(octant.z) * (p[1] / s2).clamp(0.0, 1.0).sqrt();
    out.theta = cos_theta.acos();

    let xy = p[2] + p[3];
    if xy < DEGENERATE_TOL {
        out.degenerate = true;
        return Ok(out);
    }
    let c2 = (p[2] / xy).clamp(0.0, 1.0);
    let cos_phi = sign(octant.x) * c2.sqrt();
    let sin_phi = sign(octant.y) * (1.0 - c2).sqrt();
    out.phi = sin_phi.atan2(cos_phi).rem_euclid(2.0 * PI);
    Ok(out)
}

fn sgn_or_random<R: Rng + ?Sized>(x: f64, rng: &mut R) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}

fn frequencies(counts: &MeasurementCounts, expect: BasisTag) -> Result<Vec<f64>> {
    if counts.basis != expect {
        return Err(Error::InvalidDistribution(format!(
            "expected {} counts, got {}",
            expect.name(),
            counts.basis.name()
        )));
    }
    if counts.counts.len() != 4 {
        return Err(Error::InvalidDistribution(format!("expected 4 outcomes, got {}", counts.counts.len())));
    }
    if counts.shots == 0 {
        return Err(Error::InsufficientData("zero shots".into()));
    }
    Ok(counts.frequencies())
}

/// Sign discrimination from the three qubit circuits without final shift,
/// measured in the Z, X and Y bases of the controls.
pub fn estimate_qubit_no_prior<R: Rng + ?Sized>(
    z: &MeasurementCounts,
    x: &MeasurementCounts,
    y: &MeasurementCounts,
    rng: &mut R,
) -> Result<QubitCoefficients> {
    let pz = frequencies(z, BasisTag::Computational)?;
    let px = frequencies(x, BasisTag::QubitX)?;
    let py = frequencies(y, BasisTag::QubitY)?;
    estimate_qubit_no_prior_probabilities(&pz, &px, &py, rng)
}

/// Same as [`estimate_qubit_no_prior`] on probability vectors `(P₀₀, P₀₁, P₁₀, P₁₁)`.
pub fn estimate_qubit_no_prior_probabilities<R: Rng + ?Sized>(
    pz: &[f64],
    px: &[f64],
    py: &[f64],
    rng: &mut R,
) -> Result<QubitCoefficients> {
    for p in [pz, px, py] {
        if p.len() != 4 {
            return Err(Error::InvalidDistribution(format!("expected 4 outcomes, got {}", p.len())));
        }
    }
    // Z outcomes 00, 01, 10, 11 carry c_z, c_I, c_y, c_x
    let prob = [pz[1], pz[3], pz[2], pz[0]].map(|v| v.max(0.0));
    let r = prob.map(f64::sqrt);
    let [r_i, r_x, r_y, r_z] = r;
    let zero = prob.map(|v| v <= ZERO_PROB_TOL);

    let xz_stat = px[0] + px[3] - py[0] - py[3];
    let y_stat = px[0] + px[3] + py[0] + py[3] - 1.0;

    let c = if zero.iter().filter(|&&b| b).count() >= 3 {
        // a Pauli operator (or the identity) up to phase
        let k = (0..4).max_by(|&a, &b| prob[a].total_cmp(&prob[b])).unwrap_or(0);
        let mut c = [0.0; 4];
        c[k] = 1.0;
        c
    } else if zero[1] && zero[3] {
        let s_y = sgn_or_random(y_stat, rng);
        [r_i, 0.0, s_y * r_y, 0.0]
    } else if zero[0] && zero[2] {
        // global phase freedom: s_x is arbitrary
        let s_xz = sgn_or_random(xz_stat, rng);
        let s_x = sgn_or_random(0.0, rng);
        [0.0, s_x * r_x, 0.0, s_xz * s_x * r_z]
    } else {
        let s_xz = sgn_or_random(xz_stat, rng);
        let s_y = sgn_or_random(y_stat, rng);
        let num1 = py[2] + py[3] - 0.5;
        let den1 = s_xz * s_y * r_z * r_y - r_x * r_i;
        let num2 = py[2] - py[3] + s_y * r_i * r_y - s_xz * r_x * r_z;
        let den2 = s_y * r_y * r_x - s_xz * r_i * r_z;
        let s_x = if den1.abs().max(den2.abs()) < SX_DENOM_TOL {
            sgn_or_random(num2, rng)
        } else if den1.abs() >= den2.abs() {
            sgn_or_random(num1 / den1, rng)
        } else {
            sgn_or_random(num2 / den2, rng)
        };
        [r_i, s_x * r_x, s_y * r_y, s_xz * s_x * r_z]
    };
    Ok(QubitCoefficients::from_array(c).normalized())
}
