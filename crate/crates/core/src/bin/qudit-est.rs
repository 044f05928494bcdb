use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use qudit_estimation::harness::{
    emit_results, read_trials_csv, run_experiment, selftest, summarize, write_summary_csv, ExperimentConfig,
    ExperimentKind, OutputFormat,
};
use qudit_estimation::noise::{noise_scenario, SCENARIOS};
use qudit_estimation::par::{self, Execution};
use qudit_estimation::{Error, Result};

#[derive(Parser)]
#[command(name = "qudit-est", version, about = "Unitary estimation experiments on a simulated qudit device")]
struct Cli {
    /// Master seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads; 0 uses all cores, 1 runs sequentially.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run { config: PathBuf },
    /// Recompute summary statistics from a trial CSV.
    Summarize { trials: PathBuf },
    /// List the built-in noise scenarios.
    Scenarios,
    /// Run the fast invariant checks.
    Selftest,
}

fn run(cli: &Cli, config: &Path) -> Result<()> {
    let mut cfg = ExperimentConfig::load(config)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.output = o.clone();
    }
    cfg.validate()?;
    let exec = if cli.threads == 1 { Execution::Sequential } else { Execution::available() };
    let records = par::with_threads(cli.threads, || run_experiment(&cfg, exec))?;
    let files = emit_results(&records, cfg.experiment, &cfg.scenarios, &cfg.output, cli.format.into())?;
    let failed = records.iter().filter(|r| r.error.is_some()).count();
    let report = json!({
        "experiment": cfg.experiment.name(),
        "records": records.len(),
        "failed_trials": failed,
        "files": files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn summarize_file(cli: &Cli, path: &Path) -> Result<()> {
    let records = read_trials_csv(path)?;
    let Some(first) = records.first() else {
        return Err(Error::InsufficientData("trial file has no rows".into()));
    };
    let kind = ExperimentKind::from_name(&first.experiment)?;
    if records.iter().any(|r| r.experiment != first.experiment) {
        return Err(Error::InvalidConfig("trial file mixes experiments".into()));
    }
    let mut order: Vec<String> = Vec::new();
    for r in &records {
        if !order.contains(&r.scenario) {
            order.push(r.scenario.clone());
        }
    }
    let rows = summarize(&records, kind.metric(), &order);
    let mut buf = Vec::new();
    match cli.format {
        Format::Csv => write_summary_csv(&rows, &mut buf)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, &rows)?;
            buf.push(b'\n');
        }
    }
    match &cli.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let name = match cli.format {
                Format::Csv => "summary.csv",
                Format::Json => "summary.json",
            };
            std::fs::write(dir.join(name), &buf)?;
        }
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(())
}

fn scenarios(cli: &Cli) -> Result<()> {
    match cli.format {
        Format::Csv => {
            for (name, desc) in SCENARIOS {
                println!("{name:<16} {desc}");
            }
        }
        Format::Json => {
            let all = SCENARIOS.iter().map(|(n, _)| noise_scenario(n)).collect::<Result<Vec<_>>>()?;
            println!("{}", serde_json::to_string_pretty(&all)?);
        }
    }
    Ok(())
}

fn run_selftest() -> Result<()> {
    let results = selftest();
    for r in &results {
        println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!("selftest failed: {}", failed.join(", "))))
    }
}

fn report(kind: &str, message: &str) {
    eprintln!("{}", json!({ "error": kind, "message": message }));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report("usage", e.to_string().trim());
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::Run { config } => run(&cli, config),
        Command::Summarize { trials } => summarize_file(&cli, trials),
        Command::Scenarios => scenarios(&cli),
        Command::Selftest => run_selftest(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(e.kind(), &e.to_string());
            ExitCode::FAILURE
        }
    }
}
