//! Acceptance criteria 1–10. Runs as a plain binary so every criterion
//! prints one PASS/FAIL line; the process fails if any criterion fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;

use qudit_estimation::circuit::{
    build_qubit_measurement_circuit, noisy_control_probabilities, probe_state, run_estimation, BasisTag, QubitBasis,
};
use qudit_estimation::estimation::{
    estimate_close_identity_probabilities, estimate_qubit_no_prior_probabilities, estimate_qubit_with_octant,
    partition_indices, phase_errors, qubit_probabilities, select_phase_candidate, Octant, QubitAngles,
};
use qudit_estimation::fisher::{
    cfi_close_identity, cfi_numeric, close_identity_probabilities, control_probabilities, qfi_close_identity,
    qfi_numeric, qfi_qubit, qubit_procedure_probabilities, qubit_unitary, CloseIdParams, FisherMatrix, ParamSet,
    DEFAULT_STEP,
};
use qudit_estimation::harness::{
    emit_results, mean, median, run_experiment, ExperimentConfig, Metric, OutputFormat, ShotAccounting, TrialRecord,
};
use qudit_estimation::noise::NoiseParams;
use qudit_estimation::par::Execution;
use qudit_estimation::qudit::linalg::C64;
use qudit_estimation::qudit::{exp_hamiltonian, haar_random_unitary, wh_expand, HamiltonianParams, WHIndex};
use qudit_estimation::seed;
use qudit_estimation::sqpt::agf_between_unitaries;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn config(name: &str) -> ExperimentConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    ExperimentConfig::load(&path).expect("shipped config loads")
}

fn ket0(d: usize) -> Vec<C64> {
    (0..d).map(|k| C64::new(if k == 0 { 1.0 } else { 0.0 }, 0.0)).collect()
}

fn haar_state(d: usize, s: u64) -> Vec<C64> {
    let u = haar_random_unitary(d, s);
    (0..d).map(|i| u.matrix()[(i, 0)]).collect()
}

fn run(cfg: &ExperimentConfig) -> Vec<TrialRecord> {
    run_experiment(cfg, Execution::available()).expect("experiment runs")
}

fn mean_of(records: &[TrialRecord], method: &str, scenario: &str, shots: u64, metric: Metric) -> f64 {
    let v: Vec<f64> = records
        .iter()
        .filter(|r| r.method == method && r.scenario == scenario && r.shots == shots)
        .filter_map(|r| r.metric(metric))
        .collect();
    assert!(!v.is_empty(), "no {method}/{scenario} rows at {shots} shots");
    mean(&v)
}

/// Least-squares slope of `log10 y` against `log10 x`.
fn log_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.log10(), y.log10())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Entrywise error scaled by the diagonal: `|a_ij − b_ij| / √(b_ii b_jj)`.
fn scaled_error(a: &FisherMatrix, b: &FisherMatrix) -> f64 {
    let n = b.params().len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let scale = (b.get(i, i) * b.get(j, j)).sqrt().max(1e-300);
            worst = worst.max((a.get(i, j) - b.get(i, j)).abs() / scale);
        }
    }
    worst
}

fn circuit_correctness() -> Outcome {
    let (mut amp_err, mut fid_min): (f64, f64) = (0.0, 1.0);
    for d in 2..=5 {
        for k in 0..50u64 {
            let u = haar_random_unitary(d, seed::derive(1, &[d as u64, k]));
            let psi = haar_state(d, seed::derive(2, &[d as u64, k]));
            let out = run_estimation(&u, &psi).expect("circuit runs");
            let coeffs = wh_expand(u.matrix()).expect("expansion");
            // control amplitudes carry u_n with global phase fixed by the target factor
            let amps = out.control.amplitudes();
            let phase = {
                let (i, _) = amps.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).unwrap();
                let want = coeffs.as_slice()[i];
                want / amps[i] * (amps[i].norm() / want.norm())
            };
            for n in WHIndex::all(d) {
                let got = amps[n.linear(d)] * phase;
                amp_err = amp_err.max((got - coeffs.get(n)).norm());
            }
            fid_min = fid_min.min(out.target_fidelity);
        }
    }
    check(
        amp_err <= 1e-10 && fid_min >= 1.0 - 1e-12,
        format!(
            "d=2..5, 200 Haar unitaries: max amplitude error {amp_err:.2e}, min target fidelity 1-{:.1e}",
            1.0 - fid_min
        ),
    )
}

fn qubit_fisher_grid() -> Outcome {
    let probe = probe_state(&ket0(2), 2).expect("probe");
    let (mut q_err, mut c_err): (f64, f64) = (0.0, 0.0);
    for i in 0..10 {
        for j in 0..10 {
            for k in 0..10 {
                let alpha = (i as f64 + 0.5) * PI / 20.0;
                let theta = (j as f64 + 0.5) * PI / 10.0;
                let phi = (k as f64 + 0.3) * PI / 5.0;
                let want = qfi_qubit(alpha, theta, phi);
                let at = ParamSet::qubit(alpha, theta, phi);
                let q = qfi_numeric(qubit_unitary, &at, &probe, DEFAULT_STEP).expect("numeric QFI");
                let c = cfi_numeric(qubit_procedure_probabilities, &at, DEFAULT_STEP).expect("numeric CFI");
                q_err = q_err.max(scaled_error(&q, &want));
                c_err = c_err.max(scaled_error(&c, &want));
            }
        }
    }
    check(
        q_err <= 1e-3 && c_err <= 1e-3,
        format!("1000 grid points: numeric QFI rel. error {q_err:.2e}, numeric CFI {c_err:.2e}"),
    )
}

fn random_close_params<R: Rng>(d: usize, rng: &mut R, r_max: f64) -> CloseIdParams {
    let parts = partition_indices(d).expect("partition");
    let ru = (0..parts.unpaired.len()).map(|_| rng.random_range(0.0..r_max)).collect();
    let rp = (0..parts.plus.len()).map(|_| rng.random_range(0.0..r_max)).collect();
    let ph = (0..parts.plus.len()).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
    CloseIdParams::new(d, ru, rp, ph).expect("parameters in regime")
}

fn close_identity_fisher() -> Outcome {
    let mut eq_err: f64 = 0.0;
    let mut psd = true;
    let mut num_err: f64 = 0.0;
    for d in 2..=5 {
        let mut rng = seed::rng(seed::derive(3, &[d as u64]));
        for _ in 0..100 {
            let p = random_close_params(d, &mut rng, 0.05);
            let q = qfi_close_identity(&p).expect("QFI");
            let c = cfi_close_identity(&p).expect("CFI");
            eq_err = eq_err.max(q.max_abs_diff(&c).expect("same labels"));
            psd &= q.is_psd(1e-8);
        }
        for _ in 0..20 {
            let lambda: Vec<f64> = (0..d * d - 1).map(|_| rng.random_range(-0.01..0.01)).collect();
            let u = exp_hamiltonian(&HamiltonianParams::new(d, lambda).expect("λ")).expect("U");
            let p = CloseIdParams::from_coefficients(&wh_expand(u.matrix()).expect("expansion")).expect("regime");
            let analytic = cfi_close_identity(&p).expect("CFI");
            let numeric = cfi_numeric(|x: &[f64]| close_identity_probabilities(x, d), &p.param_set(), DEFAULT_STEP)
                .expect("numeric");
            for (a, n) in analytic.diagonal().iter().zip(numeric.diagonal()) {
                num_err = num_err.max((a - n).abs() / a.abs().max(1e-300));
            }
        }
    }
    check(
        eq_err <= 1e-12 && psd && num_err <= 5e-3,
        format!("d=2..5: |QFI-CFI| {eq_err:.1e}, PSD {psd}, numeric diagonal rel. error {num_err:.2e} (|λ|≤0.01)"),
    )
}

fn estimator_round_trips() -> Outcome {
    let mut rng = seed::rng(4);
    let mut octant_err: f64 = 0.0;
    for _ in 0..500 {
        let a = QubitAngles::new(
            rng.random_range(0.01..PI / 2.0),
            rng.random_range(0.01..PI - 0.01),
            rng.random_range(0.0..2.0 * PI),
        );
        let truth = a.coefficients();
        let est = estimate_qubit_with_octant(&qubit_probabilities(&a), Octant::of_axis(a.axis())).expect("estimate");
        let got = est.coefficients();
        let diff = truth.as_array().iter().zip(got.as_array()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        octant_err = octant_err.max(diff);
    }

    let mut agf_min: f64 = 1.0;
    for k in 0..500u64 {
        let u = haar_random_unitary(2, seed::derive(5, &[k]));
        let probs = |basis| {
            let c = build_qubit_measurement_circuit(&u, basis).expect("circuit");
            noisy_control_probabilities(&c, &ket0(2), &NoiseParams::noiseless()).expect("probabilities")
        };
        let (pz, px, py) = (probs(QubitBasis::Z), probs(QubitBasis::X), probs(QubitBasis::Y));
        let est = estimate_qubit_no_prior_probabilities(&pz, &px, &py, &mut rng).expect("estimate");
        agf_min = agf_min.min(agf_between_unitaries(&est.unitary(), &u).expect("agf"));
    }

    let d = 3;
    let (mut amp_err, mut phase_err): (f64, f64) = (0.0, 0.0);
    for k in 0..100u64 {
        let mut r = seed::rng(seed::derive(6, &[k]));
        let mut lambda: Vec<f64> = (0..d * d - 1).map(|_| r.random_range(-0.01..0.01)).collect();
        let j = r.random_range(0..lambda.len());
        lambda[j] = if r.random::<bool>() { 0.01 } else { -0.01 };
        let u = exp_hamiltonian(&HamiltonianParams::new(d, lambda).expect("λ")).expect("U");
        let truth = wh_expand(u.matrix()).expect("expansion");
        let p = control_probabilities(&u, BasisTag::TildeH).expect("probabilities");
        let est = estimate_close_identity_probabilities(&p, d).expect("estimate");
        for n in WHIndex::all(d) {
            amp_err = amp_err.max((est.amplitude(n) - truth.amplitude(n)).abs());
        }
        let phases = select_phase_candidate(&est, &truth).expect("candidates");
        phase_err = phase_err.max(phase_errors(&phases, &truth).into_iter().fold(0.0, f64::max));
    }
    check(
        octant_err <= 1e-10 && agf_min >= 1.0 - 1e-9 && amp_err <= 1e-4 && phase_err <= 1e-3,
        format!(
            "octant coefficient error {octant_err:.1e}; no-prior min AGF 1-{:.1e}; close-identity d=3 |λ|∞=0.01: amplitude error {amp_err:.1e}, best phase candidate error {phase_err:.1e}",
            1.0 - agf_min
        ),
    )
}

fn qubit_comparison_noiseless() -> Outcome {
    let recs = run(&config("qubit_noiseless.json"));
    let mut lines = Vec::new();
    let mut ok = true;
    for shots in [256, 1024, 4096] {
        let p = mean_of(&recs, "procedure", "noiseless", shots, Metric::Agf);
        let s = mean_of(&recs, "sqpt", "noiseless", shots, Metric::Agf);
        ok &= p >= s;
        lines.push(format!("{shots}: {p:.4} vs {s:.4}"));
    }
    let at2048 = mean_of(&recs, "procedure", "noiseless", 2048, Metric::Agf);
    ok &= at2048 >= 0.985;
    check(ok, format!("mean AGF procedure vs SQPT {}; procedure at 2048 shots {at2048:.4}", lines.join(", ")))
}

fn qubit_comparison_noisy() -> Outcome {
    let recs = run(&config("qubit_noisy.json"));
    let top = 16384;
    let m = |sc: &str, shots| mean_of(&recs, "procedure", sc, shots, Metric::Agf);
    let (clean, ideal_cx, full) = (m("noiseless", top), m("full-ideal-cnot", top), m("full", top));
    let plateau = (m("full", top) - m("full", 4096)).abs();
    check(
        clean >= ideal_cx && ideal_cx >= full && plateau <= 0.005,
        format!(
            "procedure AGF at {top}: noiseless {clean:.5} >= full-ideal-cnot {ideal_cx:.5} >= full {full:.5} (cnot-only {:.5}); full plateau 4096->{top} {plateau:.4}",
            m("cnot-only", top)
        ),
    )
}

fn gm_accuracy() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for d in 2..=5 {
        let mut cfg = config("gm_accuracy.json");
        cfg.d = d;
        let recs = run(&cfg);
        let pairs: Vec<(f64, f64)> = recs.iter().filter_map(|r| Some((r.one_minus_r0?, r.err_amp?))).collect();
        assert_eq!(pairs.len(), cfg.n_unitaries, "every GM trial succeeds");
        if d == 2 {
            let worst = pairs.iter().map(|p| p.1).fold(0.0, f64::max);
            ok &= worst < 0.01;
            parts.push(format!("d=2 max relative error {:.3}%", 100.0 * worst));
        } else {
            let bucket: Vec<f64> = pairs.iter().filter(|p| p.0 > 1e-3 && p.0 <= 1e-2).map(|p| p.1).collect();
            let med = if bucket.is_empty() { f64::NAN } else { median(&bucket) };
            ok &= med > 0.01;
            parts.push(format!("d={d} median in 1-r0 (1e-3,1e-2] {:.3}% (n={})", 100.0 * med, bucket.len()));
        }
    }
    check(ok, parts.join("; "))
}

fn fisher_distances() -> Outcome {
    let recs = run(&config("fisher_distance.json"));
    let series = |method: &str| {
        let mut v: Vec<(f64, f64)> =
            recs.iter().filter(|r| r.method == method).filter_map(|r| Some((r.one_minus_r0?, r.err_amp?))).collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        v
    };
    let deciles = |v: &[(f64, f64)]| {
        let n = v.len() / 10;
        let first: Vec<f64> = v[..n].iter().map(|p| p.1).collect();
        let last: Vec<f64> = v[v.len() - n..].iter().map(|p| p.1).collect();
        (median(&first), median(&last))
    };
    let (gm_first, gm_last) = deciles(&series("cfi-gm"));
    let (wh_first, wh_last) = deciles(&series("cfi-wh"));

    let mut qubit = config("fisher_distance.json");
    qubit.d = 2;
    qubit.n_unitaries = 100;
    let q = run(&qubit);
    let gap = q
        .chunks(2)
        .map(|p| (p[0].err_amp.expect("distance") - p[1].err_amp.expect("distance")).abs())
        .fold(0.0, f64::max);
    check(
        gm_first / gm_last < 0.2 && wh_last / wh_first >= 0.5 && gap <= 1e-9,
        format!(
            "d=3 median distance first/last decile: GM {gm_first:.2e}/{gm_last:.2e}, WH {wh_first:.3}/{wh_last:.3}; d=2 basis gap {gap:.1e}"
        ),
    )
}

fn shot_scaling() -> Outcome {
    let mut cfg = config("qubit_noiseless.json");
    cfg.shots = vec![1_000, 10_000, 100_000, 1_000_000];
    cfg.shot_accounting = ShotAccounting::PerCircuit;
    let recs = run(&cfg);
    let slope = |method: &str| {
        let pts: Vec<(f64, f64)> =
            cfg.shots.iter().map(|&s| (s as f64, mean_of(&recs, method, "noiseless", s, Metric::ErrAmp))).collect();
        log_slope(&pts)
    };
    let (p, s) = (slope("procedure"), slope("sqpt"));
    let ok = |x: f64| (x + 0.5).abs() <= 0.1;
    check(ok(p) && ok(s), format!("log-log error slope: procedure {p:.3}, SQPT {s:.3}"))
}

fn determinism() -> Outcome {
    let mut qubit = config("qubit_noisy.json");
    qubit.n_unitaries = 3;
    qubit.n_repetitions = 4;
    let mut close = config("close_identity.json");
    close.n_unitaries = 3;
    close.n_repetitions = 3;
    let dir = tempfile::tempdir().expect("tempdir");
    let mut same = true;
    for (k, cfg) in [qubit, close].iter().enumerate() {
        let mut bytes = Vec::new();
        for (run, exec) in
            [Execution::available(), Execution::available(), Execution::Sequential].into_iter().enumerate()
        {
            let out = dir.path().join(format!("{k}-{run}"));
            let recs = run_experiment(cfg, exec).expect("experiment runs");
            emit_results(&recs, cfg.experiment, &cfg.scenarios, &out, OutputFormat::Csv).expect("emit");
            let files: Vec<Vec<u8>> = ["trials.csv", "summary.csv"]
                .iter()
                .map(|f| std::fs::read(out.join(f)).expect("output file"))
                .collect();
            bytes.push(files);
        }
        same &= bytes.windows(2).all(|w| w[0] == w[1]);
    }
    check(
        same,
        format!("trials.csv and summary.csv byte-identical across 3 runs (parallel, parallel, sequential): {same}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("circuit correctness", circuit_correctness),
        ("qubit Fisher information", qubit_fisher_grid),
        ("close-identity Fisher information", close_identity_fisher),
        ("estimator round trips", estimator_round_trips),
        ("qubit comparison, noiseless", qubit_comparison_noiseless),
        ("qubit comparison, noise scenarios", qubit_comparison_noisy),
        ("Gell-Mann first-order accuracy", gm_accuracy),
        ("Fisher distance study", fisher_distances),
        ("shot-noise scaling", shot_scaling),
        ("byte-deterministic output", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
