use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentKind, Metric};
use super::records::{quantile_sorted, summarize, SummaryRow, TrialRecord};
use crate::error::{Error, Result};

pub const TRIAL_COLUMNS: [&str; 12] = [
    "experiment",
    "scenario",
    "method",
    "d",
    "unitary_id",
    "repetition",
    "shots",
    "agf",
    "err_amp",
    "err_phase",
    "one_minus_r0",
    "seed",
];
pub const SUMMARY_COLUMNS: [&str; 9] = ["shots", "method", "scenario", "mean", "median", "std", "q25", "q75", "n"];
pub const PLOT_COLUMNS: [&str; 4] = ["x", "y", "y_lo", "y_hi"];
const PLOT_BINS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidConfig(format!("unknown output format `{other}`"))),
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_trials_csv<W: Write>(records: &[TrialRecord], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(TRIAL_COLUMNS)?;
    for r in records {
        wr.write_record([
            r.experiment.clone(),
            r.scenario.clone(),
            r.method.clone(),
            r.d.to_string(),
            r.unitary_id.to_string(),
            r.repetition.to_string(),
            r.shots.to_string(),
            opt(r.agf),
            opt(r.err_amp),
            opt(r.err_phase),
            opt(r.one_minus_r0),
            r.seed.to_string(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(SUMMARY_COLUMNS)?;
    for r in rows {
        wr.write_record([
            r.shots.to_string(),
            r.method.clone(),
            r.scenario.clone(),
            r.mean.to_string(),
            r.median.to_string(),
            r.std.to_string(),
            r.q25.to_string(),
            r.q75.to_string(),
            r.n.to_string(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

fn parse<T: FromStr>(field: &str, col: &str) -> Result<T> {
    field.parse().map_err(|_| Error::InvalidConfig(format!("cannot parse `{field}` in column {col}")))
}

fn parse_opt(field: &str, col: &str) -> Result<Option<f64>> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse(field, col).map(Some)
    }
}

/// Reads a trial CSV written by [`write_trials_csv`].
pub fn read_trials_csv(path: &Path) -> Result<Vec<TrialRecord>> {
    let mut rd = csv::Reader::from_path(path)?;
    let header: Vec<String> = rd.headers()?.iter().map(String::from).collect();
    if header != TRIAL_COLUMNS {
        return Err(Error::InvalidConfig(format!("unexpected trial columns {header:?}")));
    }
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let f = |i: usize| row.get(i).unwrap_or("");
        out.push(TrialRecord {
            experiment: f(0).into(),
            scenario: f(1).into(),
            method: f(2).into(),
            d: parse(f(3), "d")?,
            unitary_id: parse(f(4), "unitary_id")?,
            repetition: parse(f(5), "repetition")?,
            shots: parse(f(6), "shots")?,
            agf: parse_opt(f(7), "agf")?,
            err_amp: parse_opt(f(8), "err_amp")?,
            err_phase: parse_opt(f(9), "err_phase")?,
            one_minus_r0: parse_opt(f(10), "one_minus_r0")?,
            seed: parse(f(11), "seed")?,
            error: None,
            wall_time_s: 0.0,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub x: f64,
    pub y: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSeries {
    pub scenario: String,
    pub method: String,
    /// Set for series over `1 − r₀`, which are split by shot count.
    pub shots: Option<u64>,
    pub points: Vec<PlotPoint>,
}

impl PlotSeries {
    pub fn file_stem(&self) -> String {
        match self.shots {
            Some(s) => format!("plot_{}_{}_s{s}", self.scenario, self.method),
            None => format!("plot_{}_{}", self.scenario, self.method),
        }
    }
}

/// Series per (scenario, method): mean ± std versus shots for the qubit and
/// close-identity experiments; median with interquartile band over
/// log-spaced `1 − r₀` bins for the Gell-Mann and Fisher studies.
pub fn plot_series(records: &[TrialRecord], kind: ExperimentKind, summary: &[SummaryRow]) -> Vec<PlotSeries> {
    match kind {
        ExperimentKind::QubitComparison | ExperimentKind::CloseIdentityStudy => {
            let mut out: Vec<PlotSeries> = Vec::new();
            for r in summary {
                let p = PlotPoint { x: r.shots as f64, y: r.mean, y_lo: r.mean - r.std, y_hi: r.mean + r.std };
                match out.iter_mut().find(|s| s.scenario == r.scenario && s.method == r.method) {
                    Some(s) => s.points.push(p),
                    None => out.push(PlotSeries {
                        scenario: r.scenario.clone(),
                        method: r.method.clone(),
                        shots: None,
                        points: vec![p],
                    }),
                }
            }
            out
        }
        ExperimentKind::GmAccuracyStudy | ExperimentKind::FisherDistanceStudy => binned_series(records, kind.metric()),
    }
}

fn binned_series(records: &[TrialRecord], metric: Metric) -> Vec<PlotSeries> {
    let mut groups: std::collections::BTreeMap<(String, String, u64), Vec<(f64, f64)>> = Default::default();
    for r in records {
        if let (Some(x), Some(y)) = (r.one_minus_r0, r.metric(metric)) {
            if x > 0.0 {
                groups.entry((r.scenario.clone(), r.method.clone(), r.shots)).or_default().push((x, y));
            }
        }
    }
    groups
        .into_iter()
        .map(|((scenario, method, shots), pts)| {
            let lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min).ln();
            let hi = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max).ln();
            let width = ((hi - lo) / PLOT_BINS as f64).max(f64::MIN_POSITIVE);
            let mut bins = vec![Vec::new(); PLOT_BINS];
            for (x, y) in pts {
                let k = (((x.ln() - lo) / width) as usize).min(PLOT_BINS - 1);
                bins[k].push(y);
            }
            let points = bins
                .into_iter()
                .enumerate()
                .filter(|(_, b)| !b.is_empty())
                .map(|(k, mut b)| {
                    b.sort_by(f64::total_cmp);
                    PlotPoint {
                        x: (lo + (k as f64 + 0.5) * width).exp(),
                        y: quantile_sorted(&b, 0.5),
                        y_lo: quantile_sorted(&b, 0.25),
                        y_hi: quantile_sorted(&b, 0.75),
                    }
                })
                .collect();
            PlotSeries { scenario, method, shots: Some(shots), points }
        })
        .collect()
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, std::io::BufWriter<std::fs::File>)> {
    let path = dir.join(name);
    let f = std::fs::File::create(&path)?;
    Ok((path, std::io::BufWriter::new(f)))
}

/// Writes `trials`, `summary` and one plot-data file per series into `dir`
/// (created if missing) and returns the written paths.
pub fn emit_results(
    records: &[TrialRecord],
    kind: ExperimentKind,
    scenario_order: &[String],
    dir: &Path,
    format: OutputFormat,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let summary = summarize(records, kind.metric(), scenario_order);
    let series = plot_series(records, kind, &summary);
    let mut written = Vec::new();
    match format {
        OutputFormat::Csv => {
            let (p, w) = create(dir, "trials.csv")?;
            write_trials_csv(records, w)?;
            written.push(p);
            let (p, w) = create(dir, "summary.csv")?;
            write_summary_csv(&summary, w)?;
            written.push(p);
            for s in &series {
                let (p, w) = create(dir, &format!("{}.csv", s.file_stem()))?;
                let mut wr = csv::Writer::from_writer(w);
                wr.write_record(PLOT_COLUMNS)?;
                for q in &s.points {
                    wr.write_record([q.x, q.y, q.y_lo, q.y_hi].map(|v| v.to_string()))?;
                }
                wr.flush()?;
                written.push(p);
            }
        }
        OutputFormat::Json => {
            for (name, value) in [
                ("trials.json", serde_json::to_value(records)?),
                ("summary.json", serde_json::to_value(&summary)?),
                ("plot.json", serde_json::to_value(&series)?),
            ] {
                let (p, mut w) = create(dir, name)?;
                serde_json::to_writer_pretty(&mut w, &value)?;
                w.write_all(b"\n")?;
                w.flush()?;
                written.push(p);
            }
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(unitary_id: usize, agf: Option<f64>) -> TrialRecord {
        TrialRecord {
            experiment: "qubit-comparison".into(),
            scenario: "noiseless".into(),
            method: "procedure".into(),
            d: 2,
            unitary_id,
            repetition: 0,
            shots: 128,
            agf,
            err_amp: Some(0.125),
            err_phase: None,
            one_minus_r0: Some(0.3),
            seed: 42,
            error: None,
            wall_time_s: 1.5,
        }
    }

    #[test]
    fn empty_records_give_header_only_files() {
        let dir = tempfile::tempdir().unwrap();
        let files = emit_results(&[], ExperimentKind::QubitComparison, &[], dir.path(), OutputFormat::Csv).unwrap();
        assert_eq!(files.len(), 2);
        assert_eq!(std::fs::read_to_string(&files[0]).unwrap().trim(), TRIAL_COLUMNS.join(","));
        assert_eq!(std::fs::read_to_string(&files[1]).unwrap().trim(), SUMMARY_COLUMNS.join(","));
    }

    #[test]
    fn csv_round_trip_and_one_row_summary() {
        let dir = tempfile::tempdir().unwrap();
        let recs = vec![rec(0, Some(0.987654321))];
        emit_results(&recs, ExperimentKind::QubitComparison, &[], dir.path(), OutputFormat::Csv).unwrap();
        let back = read_trials_csv(&dir.path().join("trials.csv")).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].agf, recs[0].agf);
        assert_eq!(back[0].err_phase, None);
        let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert_eq!(
            summary.lines().nth(1).unwrap(),
            "128,procedure,noiseless,0.987654321,0.987654321,0,0.987654321,0.987654321,1"
        );
        let plot = std::fs::read_to_string(dir.path().join("plot_noiseless_procedure.csv")).unwrap();
        assert!(plot.starts_with("x,y,y_lo,y_hi\n128,"));
    }

    #[test]
    fn error_rows_have_empty_metrics() {
        let mut buf = Vec::new();
        write_trials_csv(&[rec(3, None)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "qubit-comparison,noiseless,procedure,2,3,0,128,,0.125,,0.3,42");
    }

    #[test]
    fn json_mirrors_records() {
        let dir = tempfile::tempdir().unwrap();
        let recs = vec![rec(0, Some(0.5)), rec(1, Some(0.7))];
        emit_results(&recs, ExperimentKind::QubitComparison, &[], dir.path(), OutputFormat::Json).unwrap();
        let back: Vec<TrialRecord> =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("trials.json")).unwrap()).unwrap();
        assert_eq!(back, recs);
        let s: Vec<SummaryRow> =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
        assert_eq!(s[0].n, 2);
    }

    #[test]
    fn binned_plot_for_studies() {
        let recs: Vec<TrialRecord> = (0..50)
            .map(|i| TrialRecord {
                experiment: "gm-accuracy-study".into(),
                method: "gm-first-order".into(),
                shots: 0,
                one_minus_r0: Some(10f64.powf(-4.0 + i as f64 / 20.0)),
                err_amp: Some(i as f64),
                ..rec(i, None)
            })
            .collect();
        let series = plot_series(&recs, ExperimentKind::GmAccuracyStudy, &[]);
        assert_eq!(series.len(), 1);
        assert_eq!(series[0].file_stem(), "plot_noiseless_gm-first-order_s0");
        let ys: Vec<f64> = series[0].points.iter().map(|p| p.y).collect();
        assert!(ys.windows(2).all(|w| w[0] < w[1]));
        assert!(series[0].points.iter().all(|p| p.y_lo <= p.y && p.y <= p.y_hi));
    }
}
