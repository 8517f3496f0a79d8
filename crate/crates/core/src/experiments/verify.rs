use crate::charfn::charfn_checks;
use crate::error::{Error, Result};
use crate::functionals::{functional_suite, lower_tail_suite, DEFAULT_BUDGET, MIN_BUDGET};
use crate::report::BoundCheckReport;
use crate::rng::derive_seed;
use crate::sphere_law::{gap_report, GapGrid};
use crate::systems::{builtin_catalog, BaseDistribution, SystemSpec};

/// Groups of inequality checks run by `verify`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Density and characteristic-function gaps of the sphere marginal, and
    /// the Gaussian envelope of `J_n`.
    Sphere,
    /// Moment inequalities, the norm-variance chain and small-ball bounds
    /// over the built-in catalog.
    Functionals,
    /// Poincaré gap and decay of `E_θ|f_θ|`.
    Charfn,
    /// Simulated lower tails of nonnegative sums.
    LowerTail,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 5] = ["sphere", "functionals", "charfn", "lower-tail", "all"];

    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "sphere" => Suite::Sphere,
            "functionals" => Suite::Functionals,
            "charfn" => Suite::Charfn,
            "lower-tail" => Suite::LowerTail,
            "all" => Suite::All,
            _ => {
                return Err(Error::config(format!(
                    "unknown suite `{name}` (expected one of {})",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }

    fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Sphere, Suite::Functionals, Suite::Charfn, Suite::LowerTail],
            s => vec![s],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub suite: Suite,
    pub seed: u64,
    /// Multiplies every Monte Carlo budget.
    pub budget_scale: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { suite: Suite::All, seed: 42, budget_scale: 1.0 }
    }
}

/// Dimensions of the sphere gap table; rates are compared against n = 64.
pub const SPHERE_DIMS: [usize; 6] = [4, 8, 16, 64, 256, 1024];
pub const THETA_BUDGET: usize = 64;
pub const CHARFN_SAMPLES: usize = 100_000;
pub const LOWER_TAIL_SIMS: usize = 1_000_000;

/// Systems exercised by the characteristic-function suite.
pub fn charfn_catalog() -> Vec<SystemSpec> {
    vec![
        SystemSpec::trigonometric(64).unwrap(),
        SystemSpec::walsh(63).unwrap(),
        SystemSpec::iid(BaseDistribution::Uniform, 64).unwrap(),
    ]
}

fn scaled(base: usize, scale: f64) -> usize {
    ((base as f64 * scale).round() as usize).max(MIN_BUDGET)
}

/// Run the selected suites. Check failures are reported in the returned
/// rows; only kernel and configuration problems are errors.
pub fn run_verify(opts: VerifyOptions) -> Result<BoundCheckReport> {
    if !(opts.budget_scale > 0.0 && opts.budget_scale.is_finite()) {
        return Err(Error::config(format!("budget scale {} must be positive", opts.budget_scale)));
    }
    let mut out = BoundCheckReport::new();
    for (tag, suite) in opts.suite.members().into_iter().enumerate() {
        let seed = derive_seed(opts.seed, &[tag as u64]);
        match suite {
            Suite::Sphere => out.extend(gap_report(&SPHERE_DIMS, GapGrid::default())?.to_checks(64)),
            Suite::Functionals => {
                out.extend(functional_suite(&builtin_catalog(), scaled(DEFAULT_BUDGET, opts.budget_scale), seed)?)
            }
            Suite::Charfn => {
                for (k, spec) in charfn_catalog().iter().enumerate() {
                    out.extend(charfn_checks(
                        spec,
                        THETA_BUDGET,
                        scaled(CHARFN_SAMPLES, opts.budget_scale),
                        derive_seed(seed, &[k as u64]),
                    )?);
                }
            }
            Suite::LowerTail => out.extend(lower_tail_suite(100, scaled(LOWER_TAIL_SIMS, opts.budget_scale), seed)?),
            Suite::All => unreachable!("expanded above"),
        }
    }
    Ok(out)
}
