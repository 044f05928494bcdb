use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fisher::TraceConvention;
use crate::noise::{noise_scenario, NoiseParams};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SHOTS: [u64; 7] = [128, 256, 512, 1024, 2048, 4096, 16384];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    QubitComparison,
    CloseIdentityStudy,
    GmAccuracyStudy,
    FisherDistanceStudy,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 4] = [
        ExperimentKind::QubitComparison,
        ExperimentKind::CloseIdentityStudy,
        ExperimentKind::GmAccuracyStudy,
        ExperimentKind::FisherDistanceStudy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::QubitComparison => "qubit-comparison",
            ExperimentKind::CloseIdentityStudy => "close-identity-study",
            ExperimentKind::GmAccuracyStudy => "gm-accuracy-study",
            ExperimentKind::FisherDistanceStudy => "fisher-distance-study",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown experiment `{s}`")))
    }

    pub(crate) fn seed_key(self) -> u64 {
        self as u64 + 1
    }

    /// Column summarized per (shots, method, scenario) group.
    pub fn metric(self) -> Metric {
        match self {
            ExperimentKind::QubitComparison | ExperimentKind::CloseIdentityStudy => Metric::Agf,
            ExperimentKind::GmAccuracyStudy | ExperimentKind::FisherDistanceStudy => Metric::ErrAmp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Agf,
    ErrAmp,
}

/// How a trial's `shots` value is spread over circuits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShotAccounting {
    /// `shots` is the total budget: the qubit procedure gets `shots/3` per
    /// circuit, tomography `shots/12` per setting.
    #[default]
    Total,
    /// Every circuit or setting gets `shots`.
    PerCircuit,
}

impl ShotAccounting {
    pub fn per_circuit(self, shots: u64, circuits: u64) -> Result<u64> {
        let n = match self {
            ShotAccounting::Total => shots / circuits,
            ShotAccounting::PerCircuit => shots,
        };
        if n == 0 {
            return Err(Error::InsufficientData(format!("{shots} shots cannot cover {circuits} circuits")));
        }
        Ok(n)
    }
}

fn default_d() -> usize {
    2
}
fn default_unitaries() -> usize {
    20
}
fn default_repetitions() -> usize {
    50
}
fn default_shots() -> Vec<u64> {
    DEFAULT_SHOTS.to_vec()
}
fn default_scenarios() -> Vec<String> {
    vec!["noiseless".into()]
}
fn default_true() -> bool {
    true
}
fn default_output() -> PathBuf {
    PathBuf::from("results")
}
fn default_lambda_min() -> f64 {
    1e-3
}
fn default_lambda_max() -> f64 {
    0.01
}
fn default_step() -> f64 {
    crate::fisher::DEFAULT_STEP
}

/// Experiment description read from JSON. A `0` in the shot grid stands for
/// exact outcome probabilities (the infinite-ensemble limit).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub experiment: ExperimentKind,
    #[serde(default = "default_d")]
    pub d: usize,
    #[serde(default = "default_unitaries")]
    pub n_unitaries: usize,
    #[serde(default = "default_repetitions")]
    pub n_repetitions: usize,
    #[serde(default = "default_shots")]
    pub shots: Vec<u64>,
    #[serde(default = "default_scenarios")]
    pub scenarios: Vec<String>,
    /// Extra scenarios, referenced by name from `scenarios`.
    #[serde(default)]
    pub custom_scenarios: Vec<NoiseParams>,
    #[serde(default = "default_true")]
    pub mitigation: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub shot_accounting: ShotAccounting,
    #[serde(default)]
    pub trace_convention: TraceConvention,
    /// Close-identity study: `λ_j ~ U(−λ_max, λ_max)`. Gell-Mann and Fisher
    /// studies: per-sample scale log-uniform in `[λ_min, λ_max]`, then
    /// `λ_j ~ U(0, scale)`.
    #[serde(default = "default_lambda_min")]
    pub lambda_min: f64,
    #[serde(default = "default_lambda_max")]
    pub lambda_max: f64,
    #[serde(default = "default_step")]
    pub fd_step: f64,
}

impl ExperimentConfig {
    /// Desk-scale defaults for `kind`.
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            experiment: kind,
            d: default_d(),
            n_unitaries: default_unitaries(),
            n_repetitions: default_repetitions(),
            shots: default_shots(),
            scenarios: default_scenarios(),
            custom_scenarios: Vec::new(),
            mitigation: true,
            seed: 0,
            output: default_output(),
            shot_accounting: ShotAccounting::Total,
            trace_convention: TraceConvention::Halved,
            lambda_min: default_lambda_min(),
            lambda_max: default_lambda_max(),
            fd_step: default_step(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn noise(&self, name: &str) -> Result<NoiseParams> {
        match self.custom_scenarios.iter().find(|s| s.name == name) {
            Some(p) => Ok(p.clone()),
            None => noise_scenario(name),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("unsupported schema_version {} (expected {SCHEMA_VERSION})", self.schema_version));
        }
        if self.n_unitaries == 0 || self.n_repetitions == 0 {
            return bad("n_unitaries and n_repetitions must be positive".into());
        }
        if self.shots.is_empty() {
            return bad("shot grid is empty".into());
        }
        if self.shots.windows(2).any(|w| w[0] >= w[1]) {
            return bad("shot grid must be strictly increasing".into());
        }
        if self.scenarios.is_empty() {
            return bad("no noise scenario given".into());
        }
        for (i, s) in self.scenarios.iter().enumerate() {
            if self.scenarios[..i].contains(s) {
                return bad(format!("scenario `{s}` listed twice"));
            }
            self.noise(s)?.validate()?;
        }
        let d_ok = match self.experiment {
            ExperimentKind::QubitComparison => self.d == 2,
            ExperimentKind::CloseIdentityStudy => (2..=8).contains(&self.d),
            ExperimentKind::GmAccuracyStudy | ExperimentKind::FisherDistanceStudy => (2..=5).contains(&self.d),
        };
        if !d_ok {
            return bad(format!("d = {} not supported by {}", self.d, self.experiment.name()));
        }
        if self.experiment != ExperimentKind::QubitComparison && self.scenarios.iter().any(|s| s != "noiseless") {
            return bad(format!("{} runs noiseless only", self.experiment.name()));
        }
        let lam_ok = self.lambda_min.is_finite()
            && self.lambda_max.is_finite()
            && self.lambda_max > 0.0
            && (self.experiment == ExperimentKind::CloseIdentityStudy
                || (self.lambda_min > 0.0 && self.lambda_min <= self.lambda_max));
        if !lam_ok {
            return bad("need 0 < lambda_min <= lambda_max".into());
        }
        if !(self.fd_step > 0.0 && self.fd_step < 1e-2) {
            return bad("fd_step must lie in (0, 0.01)".into());
        }
        Ok(())
    }
}
