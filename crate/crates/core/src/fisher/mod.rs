//! Quantum and classical Fisher information: analytic block forms, central
//! finite-difference counterparts and a trace distance between matrices.

mod analytic;
mod models;
mod numeric;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qudit::linalg::real_symmetric_eigenvalues;

pub use analytic::{cfi_close_identity, qfi_close_identity, qfi_qubit, CloseIdParams};
pub use models::{
    close_identity_probabilities, control_probabilities, hamiltonian_unitary, qubit_procedure_probabilities,
    qubit_unitary,
};
pub use numeric::{cfi_numeric, qfi_numeric, DEFAULT_STEP, MIN_PROBABILITY};

pub const SYMMETRY_TOL: f64 = 1e-9;
pub const PSD_TOL: f64 = 1e-8;

/// Ordered, uniquely labelled real parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    labels: Vec<String>,
    values: Vec<f64>,
}

impl ParamSet {
    pub fn new(labels: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if labels.len() != values.len() {
            return Err(Error::Shape(format!("{} labels for {} values", labels.len(), values.len())));
        }
        let mut sorted = labels.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameters("duplicate parameter label".into()));
        }
        Ok(ParamSet { labels, values })
    }

    /// `(α, θ, φ)` of `U = cos α I − i sin α n̂·σ`.
    pub fn qubit(alpha: f64, theta: f64, phi: f64) -> Self {
        ParamSet { labels: vec!["alpha".into(), "theta".into(), "phi".into()], values: vec![alpha, theta, phi] }
    }

    /// `{λ_j}` of `U = exp(i Σ λ_j T_j)`.
    pub fn hamiltonian(lambda: &[f64]) -> Self {
        ParamSet { labels: (1..=lambda.len()).map(|j| format!("lambda{j}")).collect(), values: lambda.to_vec() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Real symmetric Fisher matrix over a parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct FisherMatrix {
    params: ParamSet,
    entries: DMatrix<f64>,
}

impl FisherMatrix {
    /// Rejects asymmetry beyond `SYMMETRY_TOL` (relative to the largest entry)
    /// and stores the symmetrized matrix.
    pub fn new(params: ParamSet, entries: DMatrix<f64>) -> Result<Self> {
        let n = params.len();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::Shape(format!("Fisher matrix must be {n}x{n}")));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidModel("non-finite Fisher matrix entry".into()));
        }
        let scale = entries.amax().max(1.0);
        let asym = (&entries - entries.transpose()).amax();
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::InvalidModel(format!("Fisher matrix asymmetric by {asym:.3e}")));
        }
        let entries = (&entries + entries.transpose()) * 0.5;
        Ok(FisherMatrix { params, entries })
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.entries.diagonal().iter().copied().collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        real_symmetric_eigenvalues(&self.entries).into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.params.is_empty() || self.min_eigenvalue() >= -tol
    }

    pub fn max_abs_diff(&self, other: &FisherMatrix) -> Result<f64> {
        check_labels(self, other)?;
        Ok((&self.entries - &other.entries).amax())
    }
}

/// Normalization of the trace norm of `F₁ − F₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceConvention {
    /// `½ Σ|μ_i|`, the density-matrix convention.
    #[default]
    Halved,
    /// `Σ|μ_i|`.
    Full,
}

/// Trace distance between two Fisher matrices over the same labels.
pub fn fisher_trace_distance(f1: &FisherMatrix, f2: &FisherMatrix, convention: TraceConvention) -> Result<f64> {
    check_labels(f1, f2)?;
    let diff = &f1.entries - &f2.entries;
    let sym = (&diff + diff.transpose()) * 0.5;
    let norm: f64 = real_symmetric_eigenvalues(&sym).iter().map(|m| m.abs()).sum();
    Ok(match convention {
        TraceConvention::Halved => 0.5 * norm,
        TraceConvention::Full => norm,
    })
}

fn check_labels(a: &FisherMatrix, b: &FisherMatrix) -> Result<()> {
    if a.params.labels != b.params.labels {
        return Err(Error::LabelMismatch);
    }
    Ok(())
}
