//! Acceptance criteria 1–11. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use typical_clt::distributions::{kolmogorov_distance, Cdf, Kernel, MixtureCdf, StepCdf};
use typical_clt::experiments::{run_sweep, run_verify, Suite, SweepConfig, SweepOutcome, VerifyOptions};
use typical_clt::report::BoundCheckReport;
use typical_clt::sphere_law::{gap_report, GapGrid, GapReport, ENVELOPE_TOLERANCE};

const SPHERE_DIMS: [usize; 6] = [4, 8, 16, 64, 256, 1024];
const REFERENCE_N: usize = 64;

struct Outcome {
    pass: bool,
    detail: String,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn within_time(elapsed: Duration, limit_secs: u64) -> (bool, String) {
    let ok = elapsed.as_secs_f64() < limit_secs as f64;
    (ok, format!("{:.1}s (limit {limit_secs}s)", elapsed.as_secs_f64()))
}

/// Largest ratio between any value and the reference value, in either direction.
fn spread_against(values: &[(usize, f64)], reference: f64) -> f64 {
    values.iter().map(|&(_, v)| (v / reference).max(reference / v)).fold(0.0, f64::max)
}

fn criterion_density_gap(report: &GapReport, elapsed: Duration) -> Outcome {
    let scaled: Vec<(usize, f64)> = report.rows.iter().filter_map(|r| r.scaled_density_gap().map(|d| (r.n, d))).collect();
    let reference = report.row(REFERENCE_N).and_then(|r| r.scaled_density_gap()).unwrap();
    let spread = spread_against(&scaled, reference);
    let (fast, time) = within_time(elapsed, 10);
    let values: Vec<String> = scaled.iter().map(|(n, d)| format!("{n}:{d:.4}")).collect();
    Outcome {
        pass: spread <= 4.0 && scaled.len() == SPHERE_DIMS.len() && fast,
        detail: format!("n*D_n = [{}], max ratio to n=64 {spread:.3} (<= 4), {time}", values.join(" ")),
    }
}

fn criterion_charfn_gap(report: &GapReport, elapsed: Duration) -> Outcome {
    let scaled: Vec<(usize, f64)> = report.rows.iter().map(|r| (r.n, r.scaled_charfn_gap())).collect();
    let reference = report.row(REFERENCE_N).unwrap().scaled_charfn_gap();
    let spread = spread_against(&scaled, reference);
    let (fast, time) = within_time(elapsed, 30);
    let values: Vec<String> = scaled.iter().map(|(n, k)| format!("{n}:{k:.4}")).collect();
    Outcome {
        pass: spread <= 4.0 && fast,
        detail: format!("n*K_n = [{}], max ratio to n=64 {spread:.3} (<= 4), {time}", values.join(" ")),
    }
}

fn criterion_envelope(report: &GapReport) -> Outcome {
    let violations: usize = report.rows.iter().map(|r| r.envelope_violations).sum();
    let worst = report.rows.iter().map(|r| r.envelope_margin.0).fold(f64::INFINITY, f64::min);
    Outcome {
        pass: violations == 0 && worst >= -ENVELOPE_TOLERANCE,
        detail: format!("{violations} violations, smallest margin {worst:.3e}"),
    }
}

fn report_outcome(report: &BoundCheckReport, elapsed: Duration, limit_secs: u64, label: &str) -> (bool, String) {
    let failed = report.failures().count();
    let (fast, time) = within_time(elapsed, limit_secs);
    let mut detail = format!("{label}: {}/{} checks pass, {time}", report.checks.len() - failed, report.checks.len());
    for f in report.failures().take(3) {
        detail.push_str(&format!("; FAIL {} {} n={} lhs={:.4e} rhs={:.4e}", f.check, f.spec, f.n, f.lhs, f.rhs));
    }
    (failed == 0 && fast, detail)
}

fn criterion_functionals() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for seed in [42, 43] {
        let (report, elapsed) = timed(|| run_verify(VerifyOptions { suite: Suite::Functionals, seed, budget_scale: 1.0 }));
        let (ok, detail) = report_outcome(&report.expect("functionals suite"), elapsed, 120, &format!("seed {seed}"));
        pass &= ok;
        parts.push(detail);
    }
    Outcome { pass, detail: parts.join(" | ") }
}

fn criterion_charfn() -> Outcome {
    let (report, elapsed) = timed(|| run_verify(VerifyOptions { suite: Suite::Charfn, seed: 42, budget_scale: 1.0 }));
    let (pass, detail) = report_outcome(&report.expect("charfn suite"), elapsed, 120, "seed 42");
    Outcome { pass, detail }
}

fn criterion_lower_tail() -> Outcome {
    let (report, elapsed) = timed(|| run_verify(VerifyOptions { suite: Suite::LowerTail, seed: 42, budget_scale: 1.0 }));
    let report = report.expect("lower-tail suite");
    let (pass, mut detail) = report_outcome(&report, elapsed, 30, "seed 42");
    for c in &report.checks {
        detail.push_str(&format!("; {} P={:.3e} bound={:.3e}", c.spec, c.lhs, c.rhs));
    }
    Outcome { pass, detail }
}

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn sweep(name: &str) -> (SweepOutcome, Duration) {
    let mut cfg = SweepConfig::load(&config_path(name)).expect("sweep config");
    cfg.sweep.output = None;
    let (outcome, elapsed) = timed(|| run_sweep(&cfg));
    (outcome.expect("sweep"), elapsed)
}

fn describe_rows(outcome: &SweepOutcome) -> String {
    let rows: Vec<String> = outcome.rows.iter().map(|r| format!("{}:{:.5}", r.n, r.mean)).collect();
    format!("mean rho [{}], floor {:.5}", rows.join(" "), outcome.rows[0].noise_floor)
}

fn slope_in(outcome: &SweepOutcome, lo: f64, hi: f64) -> (bool, String) {
    match &outcome.fit {
        Some(fit) => (
            (lo..=hi).contains(&fit.slope),
            format!("slope {:.4} over {} rows (window [{lo}, {hi}])", fit.slope, fit.rows.len()),
        ),
        None => (false, format!("fit unavailable: {} admissible rows (window [{lo}, {hi}])", outcome.admissible)),
    }
}

fn criterion_trigonometric_rate() -> Outcome {
    let (outcome, elapsed) = sweep("trigonometric.toml");
    let (slope_ok, slope) = slope_in(&outcome, -0.65, -0.35);
    let first = outcome.rows.first().unwrap().mean;
    let last = outcome.rows.last().unwrap().mean;
    let (fast, time) = within_time(elapsed, 600);
    Outcome {
        pass: slope_ok && first / last >= 2.5 && fast,
        detail: format!("{slope}, rho(16)/rho(256) {:.3} (>= 2.5), {}, {time}", first / last, describe_rows(&outcome)),
    }
}

fn criterion_uniform_rate() -> Outcome {
    let (outcome, elapsed) = sweep("uniform.toml");
    let (slope_ok, slope) = slope_in(&outcome, -0.65, -0.35);
    let scaled: Vec<f64> = outcome
        .rows
        .iter()
        .map(|r| {
            let n = r.n as f64;
            (n / n.ln()).sqrt() * r.mean
        })
        .collect();
    let hi = scaled.iter().cloned().fold(f64::MIN, f64::max);
    let lo = scaled.iter().cloned().fold(f64::MAX, f64::min);
    Outcome {
        pass: slope_ok && hi / lo < 3.0,
        detail: format!(
            "{slope}, sqrt(n/log n)*rho varies by {:.3} (< 3), {}, {:.1}s",
            hi / lo,
            describe_rows(&outcome),
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_exponential_rate() -> Outcome {
    let (outcome, elapsed) = sweep("exponential.toml");
    let (pass, slope) = slope_in(&outcome, -0.70, -0.30);
    Outcome { pass, detail: format!("{slope}, {}, {:.1}s", describe_rows(&outcome), elapsed.as_secs_f64()) }
}

fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// CDF of `r·U` with `U` uniform on `[−√3, √3]`, the sphere marginal at n = 3.
fn sphere3_cdf(y: f64) -> f64 {
    let s = 3f64.sqrt();
    ((y + s) / (2.0 * s)).clamp(0.0, 1.0)
}

/// Brute-force `sup_x |S(x) − M(x)|` from the raw sample and atoms: a uniform
/// grid plus every sample point from both sides.
fn brute_force_distance(samples: &[f64], atoms: &[(f64, f64)], gaussian: bool, grid_points: usize) -> f64 {
    let m = |x: f64| -> f64 {
        atoms
            .iter()
            .map(|&(r, w)| {
                let c = if r == 0.0 {
                    if x >= 0.0 { 1.0 } else { 0.0 }
                } else if gaussian {
                    normal_cdf(x / r)
                } else {
                    sphere3_cdf(x / r)
                };
                w * c
            })
            .sum()
    };
    let m_left = |x: f64| -> f64 {
        let zero: f64 = atoms.iter().filter(|a| a.0 == 0.0).map(|a| a.1).sum();
        if x == 0.0 { m(x) - zero } else { m(x) }
    };
    let len = samples.len() as f64;
    let step = |x: f64| samples.iter().filter(|&&s| s <= x).count() as f64 / len;
    let step_left = |x: f64| samples.iter().filter(|&&s| s < x).count() as f64 / len;

    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let count_le = |x: f64| sorted.partition_point(|&s| s <= x) as f64 / len;
    let lo = sorted[0].min(-12.0);
    let hi = sorted[sorted.len() - 1].max(12.0);
    let mut best = 0.0f64;
    for i in 0..grid_points {
        let x = lo + (hi - lo) * i as f64 / (grid_points - 1) as f64;
        best = best.max((count_le(x) - m(x)).abs());
    }
    let mut points = samples.to_vec();
    points.push(0.0);
    for x in points {
        best = best.max((step(x) - m(x)).abs()).max((step_left(x) - m_left(x)).abs());
    }
    best
}

fn criterion_distance_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_611);
    let sphere3 = Kernel::sphere(3).unwrap();
    let mut worst = 0.0f64;
    for case in 0..50 {
        let gaussian = case % 3 != 2;
        let k = rng.random_range(1..=4usize);
        let mut atoms: Vec<(f64, f64)> = (0..k)
            .map(|_| {
                let r = if rng.random_bool(0.1) { 0.0 } else { rng.random_range(0.2..2.5) };
                (r, rng.random_range(0.1..1.0))
            })
            .collect();
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        atoms.iter_mut().for_each(|a| a.1 /= total);
        let size = rng.random_range(1..=40usize);
        let mut samples: Vec<f64> = (0..size).map(|_| rng.random_range(-3.0f64..3.0)).collect();
        if size > 3 {
            // ties and a point at the origin
            samples[1] = samples[0];
            samples[2] = 0.0;
        }
        let kernel = if gaussian { Kernel::Gaussian } else { sphere3.clone() };
        let mixture = MixtureCdf::new(atoms.clone(), kernel).unwrap();
        let step = StepCdf::from_vec(samples.clone()).unwrap();
        let fast = kolmogorov_distance(&step, &mixture).rho;
        let oracle = brute_force_distance(&samples, &atoms, gaussian, 1_000_000);
        worst = worst.max((fast - oracle).abs());
    }
    let rademacher = StepCdf::from_vec(vec![-1.0, 1.0]).unwrap();
    let rho = kolmogorov_distance(&rademacher, &MixtureCdf::standard_normal()).rho;
    let expected = normal_cdf(1.0) - 0.5;
    let rademacher_err = (rho - expected).abs();
    // the two-sided sup is symmetric in its arguments
    let swapped = kolmogorov_distance(&MixtureCdf::standard_normal() as &dyn Cdf, &rademacher).rho;
    Outcome {
        pass: worst <= 1e-9 && rademacher_err <= 1e-9 && (swapped - rho).abs() <= 1e-15,
        detail: format!(
            "50 cases, max |fast - brute force| {worst:.2e}; Rademacher vs Phi {rho:.14} (Phi(1) - 1/2 = {expected:.14})"
        ),
    }
}

fn run_binary(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_typical-clt")).args(args).output().expect("run typical-clt");
    assert!(out.status.success(), "typical-clt {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn criterion_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = config_path("trigonometric.toml");
    let config = config.to_str().unwrap();
    let mut verify = Vec::new();
    let mut sweeps = Vec::new();
    let (_, elapsed) = timed(|| {
        for threads in ["1", "8"] {
            verify.push(run_binary(&["--threads", threads, "verify", "--suite", "all", "--seed", "42"]));
            let path = dir.path().join(format!("sweep-{threads}.csv"));
            run_binary(&["--threads", threads, "sweep", "--config", config, "--output", path.to_str().unwrap()]);
            sweeps.push(std::fs::read(&path).unwrap());
        }
    });
    let verify_same = verify[0] == verify[1] && !verify[0].is_empty();
    let sweep_same = sweeps[0] == sweeps[1] && !sweeps[0].is_empty();
    Outcome {
        pass: verify_same && sweep_same,
        detail: format!(
            "verify {} bytes identical={verify_same}, sweep {} bytes identical={sweep_same}, threads 1 vs 8, {:.1}s",
            verify[0].len(),
            sweeps[0].len(),
            elapsed.as_secs_f64()
        ),
    }
}

fn main() -> ExitCode {
    let mut results: Vec<(usize, Outcome)> = Vec::new();
    let mut record = |k: usize, outcome: Outcome| {
        println!("criterion {k:>2}: {} {}", if outcome.pass { "PASS" } else { "FAIL" }, outcome.detail);
        results.push((k, outcome));
    };

    let (report, elapsed) = timed(|| gap_report(&SPHERE_DIMS, GapGrid::default()).expect("gap report"));
    record(1, criterion_density_gap(&report, elapsed));
    record(2, criterion_charfn_gap(&report, elapsed));
    record(3, criterion_envelope(&report));
    record(4, criterion_functionals());
    record(5, criterion_charfn());
    record(6, criterion_trigonometric_rate());
    record(7, criterion_uniform_rate());
    record(8, criterion_exponential_rate());
    record(9, criterion_lower_tail());
    record(10, criterion_distance_oracle());
    record(11, criterion_determinism());

    let failed: Vec<String> = results.iter().filter(|r| !r.1.pass).map(|r| r.0.to_string()).collect();
    println!("acceptance: {}/{} criteria pass", results.len() - failed.len(), results.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
