//! Gate, relaxation and readout noise approximating a small superconducting
//! device, plus readout-error mitigation.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::circuit::MeasurementCounts;
use crate::error::{Error, Result};
use crate::qudit::linalg::{CMatrix, C64};
use crate::qudit::{wh_operator, WHIndex};
use crate::sqpt::QuantumChannel;

pub const KRAUS_TOL: f64 = 1e-10;
const PROB_TOL: f64 = 1e-12;

/// Completely positive map given by Kraus operators on one subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim: usize,
    ops: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        let dim = ops.first().map(|k| k.nrows()).ok_or_else(|| Error::InvalidModel("empty Kraus list".into()))?;
        if ops.iter().any(|k| k.nrows() != dim || k.ncols() != dim) {
            return Err(Error::Shape("Kraus operators must share one square shape".into()));
        }
        let sum = ops.iter().fold(CMatrix::zeros(dim, dim), |acc, k| acc + k.adjoint() * k);
        let dev = crate::qudit::linalg::max_abs_diff(&sum, &CMatrix::identity(dim, dim));
        if dev > KRAUS_TOL {
            return Err(Error::InvalidModel(format!("Kraus completeness violated by {dev:e}")));
        }
        Ok(KrausChannel { dim, ops })
    }

    pub fn identity(dim: usize) -> Self {
        KrausChannel { dim, ops: vec![CMatrix::identity(dim, dim)] }
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &KrausChannel) -> Result<KrausChannel> {
        if self.dim != next.dim {
            return Err(Error::Shape(format!("cannot compose channels of dimension {} and {}", self.dim, next.dim)));
        }
        let ops = next.ops.iter().flat_map(|b| self.ops.iter().map(move |a| b * a)).collect();
        Ok(KrausChannel { dim: self.dim, ops })
    }

    pub fn is_identity(&self) -> bool {
        self.ops.len() == 1
            && crate::qudit::linalg::max_abs_diff(&self.ops[0], &CMatrix::identity(self.dim, self.dim)) < 1e-15
    }
}

impl QuantumChannel for KrausChannel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, rho: &CMatrix) -> CMatrix {
        self.ops.iter().fold(CMatrix::zeros(self.dim, self.dim), |acc, k| acc + k * rho * k.adjoint())
    }
}

fn check_probability(p: f64, what: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::InvalidParameters(format!("{what} = {p} is not a probability")));
    }
    Ok(())
}

/// `ρ ↦ (1−p)ρ + p I/dim`, written with Weyl-Heisenberg Kraus operators.
pub fn depolarizing_channel(p: f64, dim: usize) -> Result<KrausChannel> {
    check_probability(p, "depolarizing probability")?;
    crate::qudit::check_dim(dim)?;
    if p == 0.0 {
        return Ok(KrausChannel::identity(dim));
    }
    let dd = (dim * dim) as f64;
    let ops = WHIndex::all(dim)
        .map(|n| {
            let w = if n.is_zero() { 1.0 - p + p / dd } else { p / dd };
            wh_operator(n, dim).map(|u| u.into_matrix() * C64::new(w.sqrt(), 0.0))
        })
        .collect::<Result<Vec<_>>>()?;
    KrausChannel::new(ops)
}

/// Amplitude damping with `γ = 1 − e^{−t/T1}` followed by pure dephasing so
/// that coherences decay as `e^{−t/T2}`.
pub fn thermal_relaxation_channel(t1: f64, t2: f64, t: f64) -> Result<KrausChannel> {
    if t1 <= 0.0 || t2 <= 0.0 || t < 0.0 || t1.is_nan() || t2.is_nan() || t.is_nan() {
        return Err(Error::InvalidParameters(format!(
            "relaxation needs T1, T2 > 0 and t ≥ 0 (T1={t1}, T2={t2}, t={t})"
        )));
    }
    if t2 > 2.0 * t1 {
        return Err(Error::InvalidParameters(format!("T2 = {t2} exceeds 2·T1 = {}", 2.0 * t1)));
    }
    if t == 0.0 {
        return Ok(KrausChannel::identity(2));
    }
    let (gamma, lambda) =
        if t.is_finite() { (1.0 - (-t / t1).exp(), (-t / t2 + t / (2.0 * t1)).exp().min(1.0)) } else { (1.0, 0.0) };
    let c = |v: f64| C64::new(v, 0.0);
    let z = c(0.0);
    let damping = KrausChannel {
        dim: 2,
        ops: vec![
            CMatrix::from_row_slice(2, 2, &[c(1.0), z, z, c((1.0 - gamma).sqrt())]),
            CMatrix::from_row_slice(2, 2, &[z, c(gamma.sqrt()), z, z]),
        ],
    };
    let dephasing = KrausChannel {
        dim: 2,
        ops: vec![
            CMatrix::identity(2, 2) * c(((1.0 + lambda) / 2.0).sqrt()),
            CMatrix::from_row_slice(2, 2, &[c(1.0), z, z, c(-1.0)]) * c(((1.0 - lambda) / 2.0).sqrt()),
        ],
    };
    let out = damping.then(&dephasing)?;
    KrausChannel::new(out.ops)
}

/// Row-stochastic readout matrix: `m[true][observed]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Confusion(pub [[f64; 2]; 2]);

impl Confusion {
    pub fn identity() -> Self {
        Confusion([[1.0, 0.0], [0.0, 1.0]])
    }

    /// Symmetric bit flip with probability `p`.
    pub fn flip(p: f64) -> Self {
        Confusion([[1.0 - p, p], [p, 1.0 - p]])
    }

    pub fn validate(&self) -> Result<()> {
        for row in &self.0 {
            if row.iter().any(|v| !(-PROB_TOL..=1.0 + PROB_TOL).contains(v)) || (row[0] + row[1] - 1.0).abs() > 1e-10 {
                return Err(Error::NonStochastic(format!("row {row:?}")));
            }
        }
        Ok(())
    }

    pub fn is_identity(&self) -> bool {
        self.0 == [[1.0, 0.0], [0.0, 1.0]]
    }
}

/// Transition matrix `T[observed][true]` of independent per-qubit confusions,
/// first qubit most significant.
fn transition(confusions: &[Confusion]) -> Result<DMatrix<f64>> {
    let mut t = DMatrix::from_element(1, 1, 1.0);
    for c in confusions {
        c.validate()?;
        let m = DMatrix::from_fn(2, 2, |obs, tru| c.0[tru][obs]);
        t = t.kronecker(&m);
    }
    Ok(t)
}

/// `P'(observed) = Σ_true C[true][observed] P(true)`, tensored over qubits.
pub fn apply_readout_confusion(p: &[f64], confusions: &[Confusion]) -> Result<Vec<f64>> {
    let t = transition(confusions)?;
    if p.len() != t.nrows() {
        return Err(Error::Shape(format!("{} outcomes for {} qubits", p.len(), confusions.len())));
    }
    crate::circuit::validate_distribution(p)?;
    let out = &t * nalgebra::DVector::from_column_slice(p);
    Ok(out.iter().map(|v| v.max(0.0)).collect())
}

/// Solves the confusion model for the true probabilities without projecting.
pub fn invert_readout(freq: &[f64], confusions: &[Confusion]) -> Result<Vec<f64>> {
    let t = transition(confusions)?;
    if freq.len() != t.nrows() {
        return Err(Error::Shape(format!("{} outcomes for {} qubits", freq.len(), confusions.len())));
    }
    let lu = t.lu();
    let det = lu.determinant();
    if det.abs() < 1e-12 {
        return Err(Error::MitigationUnavailable);
    }
    let x = lu.solve(&nalgebra::DVector::from_column_slice(freq)).ok_or(Error::MitigationUnavailable)?;
    Ok(x.iter().copied().collect())
}

/// Linear inversion of the readout model followed by Euclidean projection
/// onto the probability simplex.
pub fn mitigate_readout(counts: &MeasurementCounts, confusions: &[Confusion]) -> Result<Vec<f64>> {
    if counts.shots == 0 {
        return Err(Error::InsufficientData("zero shots".into()));
    }
    mitigate_probabilities(&counts.frequencies(), confusions)
}

pub fn mitigate_probabilities(freq: &[f64], confusions: &[Confusion]) -> Result<Vec<f64>> {
    if confusions.iter().all(Confusion::is_identity) {
        transition(confusions)?;
        return Ok(project_simplex(freq));
    }
    Ok(project_simplex(&invert_readout(freq, confusions)?))
}

/// Euclidean projection onto `{x ≥ 0, Σx = 1}`.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    if v.is_empty() {
        return Vec::new();
    }
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (k, x) in u.iter().enumerate() {
        acc += x;
        let t = (acc - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitNoise {
    /// `null` in JSON for an infinite time.
    #[serde(with = "infinite_as_null")]
    pub t1_ns: f64,
    #[serde(with = "infinite_as_null")]
    pub t2_ns: f64,
    pub p_sx: f64,
    pub readout: Confusion,
}

mod infinite_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_none()
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

impl QubitNoise {
    pub fn ideal() -> Self {
        QubitNoise { t1_ns: f64::INFINITY, t2_ns: f64::INFINITY, p_sx: 0.0, readout: Confusion::identity() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairNoise {
    pub qubits: [usize; 2],
    pub p_cx: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateDurations {
    pub single_ns: f64,
    pub two_ns: f64,
    pub measure_ns: f64,
}

impl GateDurations {
    pub const DEFAULT: GateDurations = GateDurations { single_ns: 35.0, two_ns: 300.0, measure_ns: 700.0 };
    pub const ZERO: GateDurations = GateDurations { single_ns: 0.0, two_ns: 0.0, measure_ns: 0.0 };
}

/// Device noise description. `wire_map[w]` is the device qubit that carries
/// circuit wire `w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub name: String,
    pub qubits: Vec<QubitNoise>,
    pub pairs: Vec<PairNoise>,
    pub durations: GateDurations,
    pub wire_map: Vec<usize>,
}

impl NoiseParams {
    pub fn noiseless() -> Self {
        NoiseParams {
            name: "noiseless".into(),
            qubits: vec![QubitNoise::ideal(); 3],
            pairs: Vec::new(),
            durations: GateDurations::ZERO,
            wire_map: DEVICE_WIRE_MAP.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (k, q) in self.qubits.iter().enumerate() {
            check_probability(q.p_sx, &format!("p_sx of qubit {k}"))?;
            q.readout.validate()?;
            if q.t1_ns <= 0.0 || q.t2_ns <= 0.0 || q.t1_ns.is_nan() || q.t2_ns.is_nan() {
                return Err(Error::InvalidParameters(format!("qubit {k}: relaxation times must be positive")));
            }
            if q.t1_ns.is_finite() && q.t2_ns > 2.0 * q.t1_ns {
                return Err(Error::InvalidParameters(format!("qubit {k}: T2 exceeds 2·T1")));
            }
        }
        for p in &self.pairs {
            check_probability(p.p_cx, "p_cx")?;
            if p.qubits.iter().any(|&q| q >= self.qubits.len()) {
                return Err(Error::InvalidParameters(format!("pair {:?} refers to an unknown qubit", p.qubits)));
            }
        }
        if self.wire_map.iter().any(|&q| q >= self.qubits.len()) {
            return Err(Error::InvalidParameters("wire map refers to an unknown qubit".into()));
        }
        let d = self.durations;
        if [d.single_ns, d.two_ns, d.measure_ns].iter().any(|t| *t < 0.0 || !t.is_finite()) {
            return Err(Error::InvalidParameters("gate durations must be finite and non-negative".into()));
        }
        Ok(())
    }

    pub fn qubit_of_wire(&self, wire: usize) -> Result<&QubitNoise> {
        let q = *self.wire_map.get(wire).ok_or_else(|| Error::Wiring(format!("wire {wire} has no device qubit")))?;
        self.qubits.get(q).ok_or_else(|| Error::Wiring(format!("device qubit {q} missing")))
    }

    /// Two-qubit gate error for the device pair carrying `(wa, wb)`; zero for
    /// unlisted pairs.
    pub fn pair_error(&self, wa: usize, wb: usize) -> Result<f64> {
        let (qa, qb) = (self.wire_map.get(wa), self.wire_map.get(wb));
        let (Some(&qa), Some(&qb)) = (qa, qb) else {
            return Err(Error::Wiring(format!("wires ({wa},{wb}) have no device qubits")));
        };
        Ok(self.pairs.iter().find(|p| p.qubits == [qa, qb] || p.qubits == [qb, qa]).map(|p| p.p_cx).unwrap_or(0.0))
    }

    pub fn readout_for_wires(&self, wires: &[usize]) -> Result<Vec<Confusion>> {
        wires.iter().map(|&w| self.qubit_of_wire(w).map(|q| q.readout)).collect()
    }

    /// Relaxation over `t` on the qubit carrying `wire`, or `None` if it is
    /// the identity.
    pub fn relaxation(&self, wire: usize, t: f64) -> Result<Option<KrausChannel>> {
        let q = self.qubit_of_wire(wire)?;
        if t == 0.0 || (q.t1_ns.is_infinite() && q.t2_ns.is_infinite()) {
            return Ok(None);
        }
        Ok(Some(thermal_relaxation_channel(q.t1_ns, q.t2_ns, t)?))
    }

    pub fn is_noiseless(&self) -> bool {
        let q_ok = self.qubits.iter().all(|q| q.p_sx == 0.0 && q.readout.is_identity());
        let relax = self.qubits.iter().all(|q| q.t1_ns.is_infinite() && q.t2_ns.is_infinite())
            || (self.durations.single_ns == 0.0 && self.durations.two_ns == 0.0 && self.durations.measure_ns == 0.0);
        q_ok && relax && self.pairs.iter().all(|p| p.p_cx == 0.0)
    }
}

/// Target wire on device qubit 1, controls on qubits 0 and 2.
pub const DEVICE_WIRE_MAP: [usize; 3] = [1, 0, 2];

pub const SCENARIOS: [(&str, &str); 4] = [
    ("noiseless", "ideal gates and readout"),
    ("full", "per-qubit relaxation, single-qubit and two-qubit gate errors, readout errors"),
    ("cnot-only", "two-qubit gate error 0.0142 only; zero gate durations"),
    ("full-ideal-cnot", "full noise with ideal two-qubit gates"),
];

fn full_device() -> NoiseParams {
    let q =
        |t1: f64, t2: f64, p_sx: f64, ro: f64| QubitNoise { t1_ns: t1, t2_ns: t2, p_sx, readout: Confusion::flip(ro) };
    NoiseParams {
        name: "full".into(),
        qubits: vec![
            q(87.49953e3, 121.65781e3, 0.00045, 0.0406),
            q(86.63249e3, 97.53323e3, 0.0004, 0.0444),
            q(83.6549e3, 72.867e3, 0.00027, 0.0841),
        ],
        pairs: vec![PairNoise { qubits: [0, 1], p_cx: 0.01021 }, PairNoise { qubits: [1, 2], p_cx: 0.00861 }],
        durations: GateDurations::DEFAULT,
        wire_map: DEVICE_WIRE_MAP.to_vec(),
    }
}

pub fn noise_scenario(name: &str) -> Result<NoiseParams> {
    let p = match name {
        "noiseless" => NoiseParams::noiseless(),
        "full" => full_device(),
        "cnot-only" => {
            let q = QubitNoise { t1_ns: 110e3, t2_ns: 147e3, p_sx: 0.0, readout: Confusion::identity() };
            NoiseParams {
                name: name.into(),
                qubits: vec![q; 3],
                pairs: vec![PairNoise { qubits: [0, 1], p_cx: 0.0142 }, PairNoise { qubits: [1, 2], p_cx: 0.0142 }],
                durations: GateDurations::ZERO,
                wire_map: DEVICE_WIRE_MAP.to_vec(),
            }
        }
        "full-ideal-cnot" => {
            let mut p = full_device();
            p.name = name.into();
            p.pairs.iter_mut().for_each(|x| x.p_cx = 0.0);
            p
        }
        other => return Err(Error::UnknownScenario(other.into())),
    };
    Ok(p)
}
