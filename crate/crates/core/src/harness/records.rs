use serde::{Deserialize, Serialize};

use super::config::Metric;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// The estimation procedure of the experiment (no-prior qubit estimator
    /// or close-to-identity estimator).
    Procedure,
    Sqpt,
    GmFirstOrder,
    /// Fisher distance study: CFI of the computational control measurement.
    CfiWh,
    /// Fisher distance study: CFI of the Gell-Mann-induced measurement.
    CfiGm,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Procedure => "procedure",
            Method::Sqpt => "sqpt",
            Method::GmFirstOrder => "gm-first-order",
            Method::CfiWh => "cfi-wh",
            Method::CfiGm => "cfi-gm",
        }
    }

    pub(crate) fn seed_key(self) -> u64 {
        self as u64 + 1
    }
}

/// One trial. Metric columns are empty when they do not apply or when the
/// trial failed; failures carry their message in `error`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub experiment: String,
    pub scenario: String,
    pub method: String,
    pub d: usize,
    pub unitary_id: usize,
    pub repetition: usize,
    pub shots: u64,
    pub agf: Option<f64>,
    pub err_amp: Option<f64>,
    pub err_phase: Option<f64>,
    pub one_minus_r0: Option<f64>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default)]
    pub wall_time_s: f64,
}

impl TrialRecord {
    pub fn metric(&self, m: Metric) -> Option<f64> {
        match m {
            Metric::Agf => self.agf,
            Metric::ErrAmp => self.err_amp,
        }
    }
}

/// Sort key `(unitary_id, repetition, method, shots)`, then scenario
/// position in the configuration.
pub fn sort_records(records: &mut [TrialRecord], scenario_order: &[String]) {
    let pos = |s: &str| scenario_order.iter().position(|x| x == s).unwrap_or(usize::MAX);
    records.sort_by(|a, b| {
        (a.unitary_id, a.repetition, &a.method, a.shots, pos(&a.scenario), &a.scenario).cmp(&(
            b.unitary_id,
            b.repetition,
            &b.method,
            b.shots,
            pos(&b.scenario),
            &b.scenario,
        ))
    });
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub shots: u64,
    pub method: String,
    pub scenario: String,
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub q25: f64,
    pub q75: f64,
    pub n: usize,
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample standard deviation (`n − 1` denominator); zero for one value.
pub fn std_dev(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

/// Linear-interpolation quantile of sorted data (`h = (n−1) q`).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    quantile_sorted(&s, 0.5)
}

/// Statistics of `metric` per `(shots, method, scenario)` over successful
/// trials, ordered by scenario, method and shots.
pub fn summarize(records: &[TrialRecord], metric: Metric, scenario_order: &[String]) -> Vec<SummaryRow> {
    let mut groups: std::collections::BTreeMap<(usize, String, String, u64), Vec<f64>> = Default::default();
    let pos = |s: &str| scenario_order.iter().position(|x| x == s).unwrap_or(usize::MAX);
    for r in records {
        if let Some(v) = r.metric(metric) {
            groups.entry((pos(&r.scenario), r.scenario.clone(), r.method.clone(), r.shots)).or_default().push(v);
        }
    }
    groups
        .into_iter()
        .map(|((_, scenario, method, shots), mut v)| {
            let m = mean(&v);
            let s = std_dev(&v);
            v.sort_by(f64::total_cmp);
            SummaryRow {
                shots,
                method,
                scenario,
                mean: m,
                median: quantile_sorted(&v, 0.5),
                std: s,
                q25: quantile_sorted(&v, 0.25),
                q75: quantile_sorted(&v, 0.75),
                n: v.len(),
            }
        })
        .collect()
}
