use clap::{Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use typical_clt::charfn::charfn_typical;
use typical_clt::distributions::Budgets;
use typical_clt::experiments::{
    run_sweep, run_verify, BudgetSection, Suite, SweepConfig, SweepSection, SystemSection, VerifyOptions,
};
use typical_clt::functionals::{functionals_report, DEFAULT_BUDGET};
use typical_clt::systems::SystemSpec;
use typical_clt::{Error, Result};

#[derive(Parser)]
#[command(name = "typical-clt", version, about = "Typical distributions of weighted sums over random directions")]
struct Cli {
    /// Worker threads (defaults to all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run inequality checks and write one CSV row per check.
    Verify {
        #[arg(long, default_value = "all", value_parser = Suite::NAMES)]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        budget_scale: f64,
        /// CSV destination; standard output when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Mean Kolmogorov distance over a list of dimensions and its rate fit.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the output path of the config file.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Moment functionals of one system.
    Functionals {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        p: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Per-direction distances to F, phi or G at one dimension.
    Distance {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = ["F", "phi", "G"])]
        target: String,
        #[arg(long, default_value_t = Budgets::default().theta)]
        theta: usize,
        #[arg(long, default_value_t = Budgets::default().per_theta)]
        per_theta: usize,
        #[arg(long, default_value_t = Budgets::default().radial)]
        radial: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Characteristic function of the typical law on [0, tmax].
    Charfn {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        tmax: f64,
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[arg(long, default_value_t = Budgets::default().radial)]
        radial: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Verify { suite, seed, budget_scale, output } => {
            let report = run_verify(VerifyOptions { suite: Suite::from_name(&suite)?, seed, budget_scale })?;
            let mut csv = Vec::new();
            report.write_csv(&mut csv)?;
            emit(output.as_ref(), &String::from_utf8_lossy(&csv))?;
            let failures: Vec<_> = report.failures().collect();
            for f in &failures {
                eprintln!(
                    "FAIL {} [{}] {} n={} {:?}: lhs={} rhs={} slack={}",
                    f.check, f.anchor, f.spec, f.n, f.param, f.lhs, f.rhs, f.slack
                );
            }
            eprintln!("{} checks, {} failed", report.checks.len(), failures.len());
            Ok(if failures.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Sweep { config, output } => {
            let mut cfg = SweepConfig::load(&config)?;
            if output.is_some() {
                cfg.sweep.output = output;
            }
            let outcome = run_sweep(&cfg)?;
            if cfg.sweep.output.is_none() {
                emit(None, &outcome.csv)?;
            }
            for row in &outcome.rows {
                eprintln!("n={:<6} mean rho={:.6} se={:.6} floor={:.6}", row.n, row.mean, row.se, row.noise_floor);
            }
            let fit = outcome.require_fit()?;
            eprintln!("slope={:.4} intercept={:.4} residual={:.4}", fit.slope, fit.intercept, fit.residual);
            Ok(ExitCode::SUCCESS)
        }
        Command::Functionals { spec, n, p, budget, seed } => {
            let spec = SystemSpec::from_name(&spec, n)?;
            let report = functionals_report(&spec, &p, budget, seed)?;
            let mut csv = Vec::new();
            report.write_csv(&mut csv)?;
            emit(None, &String::from_utf8_lossy(&csv))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Distance { spec, n, target, theta, per_theta, radial, seed } => {
            let cfg = SweepConfig {
                system: SystemSection { spec, eigenvalues: None },
                sweep: SweepSection { n: vec![n], target, seed, output: None },
                budgets: BudgetSection { theta, per_theta, radial },
                smoothing: None,
            };
            let outcome = run_sweep(&cfg)?;
            emit(None, &outcome.csv)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Charfn { spec, n, tmax, points, radial, seed } => {
            if !(tmax > 0.0 && tmax.is_finite()) || points < 2 {
                return Err(Error::Config("need tmax > 0 and at least 2 points".into()));
            }
            let spec = SystemSpec::from_name(&spec, n)?;
            let t: Vec<f64> = (0..points).map(|i| tmax * i as f64 / (points - 1) as f64).collect();
            let est = charfn_typical(&spec, &t, radial, seed)?;
            let mut csv = Vec::new();
            est.write_csv(&mut csv)?;
            emit(None, &String::from_utf8_lossy(&csv))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
