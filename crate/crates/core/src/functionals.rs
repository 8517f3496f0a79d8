//! Moment functionals of X, small-ball probabilities and lower-tail bounds
//! for sums of nonnegative variables.

use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use std::io::Write;

use crate::error::{Error, Result};
use crate::report::{csv_field, BoundCheck, BoundCheckReport, CSV_VERSION_LINE};
use crate::rng::{derive_seed, derived, stream, SimRng};
use crate::sphere_law::{sample_direction, Direction};
use crate::stats::{
    bootstrap_se, mean, mean_se, normal_abs_moment, std_normal_pdf, std_normal_sf, variance, Estimate,
};
use crate::systems::{dot, sample_vector, sharded_draws, BaseDistribution, SystemSpec};

/// Bootstrap replicates behind every standard error in this module.
pub const BOOTSTRAP_REPS: usize = 200;
/// Smallest sample accepted by the Monte Carlo estimators.
pub const MIN_BUDGET: usize = 100;
/// Pair and norm draws per system in the verification suite.
pub const DEFAULT_BUDGET: usize = 100_000;
/// Slack, in standard errors, granted to every empirical inequality.
pub const SE_SLACK: f64 = 3.0;

#[inline]
fn abs_pow(x: f64, p: f64) -> f64 {
    let a = x.abs();
    if p == 2.0 {
        a * a
    } else if p == 3.0 {
        a * a * a
    } else if p == 1.0 {
        a
    } else {
        a.powf(p)
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::domain(format!("moment order p = {p} must be a finite number ≥ 1")));
    }
    Ok(())
}

fn check_budget(budget: usize) -> Result<()> {
    if budget < MIN_BUDGET {
        return Err(Error::insufficient(format!(
            "budget {budget} is below the minimum of {MIN_BUDGET} draws"
        )));
    }
    Ok(())
}

/// `(mean |x|^p)^{1/p}` with a delta-method standard error.
fn lp_norm(values: &[f64], p: f64) -> Estimate {
    let powers: Vec<f64> = values.iter().map(|&v| abs_pow(v, p)).collect();
    let m = mean_se(&powers);
    if m.value <= 0.0 {
        return Estimate::exact(0.0);
    }
    let value = m.value.powf(1.0 / p);
    Estimate { value, se: value / (p * m.value) * m.se }
}

/// How [`maximal_lp_norm`] evaluates `M_p = sup_θ ‖⟨X, θ⟩‖_p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MpStrategy {
    /// Closed form where known, otherwise search.
    Analytic,
    Search(SearchOptions),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub random_directions: usize,
    /// Directions `X_i/|X_i|` taken from the sample itself.
    pub data_directions: usize,
    pub samples: usize,
    pub max_sweeps: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { random_directions: 64, data_directions: 64, samples: 20_000, max_sweeps: 3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpEstimate {
    pub p: f64,
    pub value: f64,
    pub se: f64,
    /// Search results only bound `M_p` from below.
    pub lower_bound: bool,
    /// Set when the analytic strategy had no closed form and searched instead.
    pub fell_back: bool,
    pub argmax: Option<Direction>,
}

/// Closed form of `M_p` when one is known for this system.
pub fn analytic_maximal_lp_norm(spec: &SystemSpec, p: f64) -> Option<f64> {
    let lmax = spec.exact_covariance_eigenvalues().into_iter().fold(0.0, f64::max);
    if p == 2.0 {
        Some(lmax.sqrt())
    } else if spec.is_gaussian() {
        Some(lmax.sqrt() * normal_abs_moment(p).powf(1.0 / p))
    } else {
        None
    }
}

/// Maximal `L^p` norm of `⟨X, θ⟩` over directions θ.
pub fn maximal_lp_norm(spec: &SystemSpec, p: f64, strategy: MpStrategy, seed: u64) -> Result<MpEstimate> {
    check_p(p)?;
    spec.validate()?;
    let (opts, fell_back) = match strategy {
        MpStrategy::Analytic => match analytic_maximal_lp_norm(spec, p) {
            Some(value) => {
                return Ok(MpEstimate { p, value, se: 0.0, lower_bound: false, fell_back: false, argmax: None })
            }
            None => (SearchOptions::default(), true),
        },
        MpStrategy::Search(opts) => (opts, false),
    };
    let batch = sample_vector(spec, opts.samples.max(MIN_BUDGET), derive_seed(seed, &[stream::SAMPLES]))?;
    let mut rng = derived(seed, &[stream::SEARCH]);
    let (est, dir) = max_lp_search(batch.data(), spec.n(), p, &opts, &mut rng)?;
    Ok(MpEstimate { p, value: est.value, se: est.se, lower_bound: true, fell_back, argmax: Some(dir) })
}

/// Maximize the empirical `L^p` norm of `⟨x_i, θ⟩` over rows `x_i` of the
/// row-major matrix `rows`. Candidates are random directions, normalized data
/// rows, the basis and the equal-weights direction; the best one is then
/// refined by coordinate ascent with a shrinking step.
pub fn max_lp_search(
    rows: &[f64],
    n: usize,
    p: f64,
    opts: &SearchOptions,
    rng: &mut SimRng,
) -> Result<(Estimate, Direction)> {
    check_p(p)?;
    if n == 0 || rows.is_empty() || !rows.len().is_multiple_of(n) {
        return Err(Error::domain("sample matrix shape does not match the dimension"));
    }
    let mut candidates = Vec::new();
    for _ in 0..opts.random_directions {
        candidates.push(sample_direction(n, rng)?);
    }
    for row in rows.chunks_exact(n).take(opts.data_directions) {
        if let Ok(d) = Direction::from_unnormalized(row.to_vec()) {
            candidates.push(d);
        }
    }
    candidates.extend((0..n).map(|i| Direction::basis(n, i)));
    candidates.push(Direction::equal_weights(n));

    let objective = |theta: &[f64]| -> f64 {
        rows.chunks_exact(n).map(|r| abs_pow(dot(r, theta), p)).sum::<f64>()
    };
    let scores: Vec<f64> = candidates.par_iter().map(|d| objective(d.coords())).collect();
    let best = (0..scores.len())
        .max_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(b.cmp(&a)))
        .expect("candidate list is nonempty");

    let mut w = candidates[best].coords().to_vec();
    let mut norm2 = 1.0;
    let mut proj: Vec<f64> = rows.chunks_exact(n).map(|r| dot(r, &w)).collect();
    let mut score = scores[best];
    let normalized = |sum: f64, norm2: f64| sum / norm2.powf(0.5 * p);
    let mut step = 0.25;
    let mut sweeps_at_step = 0;
    while step > 1.0 / 1024.0 {
        let mut improved = false;
        for i in 0..n {
            for delta in [step, -step] {
                let cand_norm2 = norm2 + 2.0 * delta * w[i] + delta * delta;
                if cand_norm2 <= 1e-12 {
                    continue;
                }
                let sum: f64 = proj
                    .iter()
                    .zip(rows.chunks_exact(n))
                    .map(|(s, r)| abs_pow(s + delta * r[i], p))
                    .sum();
                if normalized(sum, cand_norm2) > normalized(score, norm2) * (1.0 + 1e-12) {
                    for (s, r) in proj.iter_mut().zip(rows.chunks_exact(n)) {
                        *s += delta * r[i];
                    }
                    w[i] += delta;
                    norm2 = cand_norm2;
                    score = sum;
                    improved = true;
                    break;
                }
            }
        }
        sweeps_at_step += 1;
        if !improved || sweeps_at_step >= opts.max_sweeps {
            step *= 0.5;
            sweeps_at_step = 0;
        }
    }
    let scale = norm2.sqrt();
    let sums: Vec<f64> = proj.iter().map(|s| s / scale).collect();
    Ok((lp_norm(&sums, p), Direction::from_unnormalized(w)?))
}

/// `(⟨X, Y⟩, |X − Y|²)` over independent pairs.
fn pair_draws(spec: &SystemSpec, pairs: usize, seed: u64) -> Vec<(f64, f64)> {
    let n = spec.n();
    sharded_draws(pairs, derive_seed(seed, &[stream::PAIRS]), 2 * n, |rng, scratch| {
        let (x, y) = scratch.split_at_mut(n);
        spec.fill_row(rng, x);
        spec.fill_row(rng, y);
        let d2 = x.iter().zip(y.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
        (dot(x, y), d2)
    })
}

/// `|X|²` per draw; exactly n for fixed-norm systems.
fn sq_norm_draws(spec: &SystemSpec, budget: usize, seed: u64) -> Vec<f64> {
    let n = spec.n();
    let fixed = spec.has_fixed_norm();
    sharded_draws(budget, derive_seed(seed, &[stream::SAMPLES]), n, |rng, row| {
        spec.fill_row(rng, row);
        if fixed {
            n as f64
        } else {
            dot(row, row)
        }
    })
}

/// `m_p = n^{-1/2} (E|⟨X, Y⟩|^p)^{1/p}` from precomputed pair products.
fn mp_from_products(products: &[f64], n: usize, p: f64, seed: u64) -> Estimate {
    let powers: Vec<f64> = products.iter().map(|&v| abs_pow(v, p)).collect();
    let scale = (n as f64).sqrt();
    let stat = |m: f64| m.powf(1.0 / p) / scale;
    let value = stat(mean(&powers));
    let mut rng = derived(seed, &[stream::BOOTSTRAP, 1, p.to_bits()]);
    let se = bootstrap_se(powers.len(), BOOTSTRAP_REPS, &mut rng, |idx| {
        stat(idx.iter().map(|&i| powers[i]).sum::<f64>() / idx.len() as f64)
    });
    Estimate { value, se }
}

/// `σ_2p = √n (E|r² − 1|^p)^{1/p}` with `r² = |X|²/n`.
fn sigma_from_sq_norms(sq: &[f64], n: usize, p: f64, seed: u64) -> Estimate {
    let nf = n as f64;
    let powers: Vec<f64> = sq.iter().map(|&q| abs_pow(q / nf - 1.0, p)).collect();
    if powers.iter().all(|&v| v == 0.0) {
        return Estimate::exact(0.0);
    }
    let stat = |m: f64| nf.sqrt() * m.powf(1.0 / p);
    let value = stat(mean(&powers));
    let mut rng = derived(seed, &[stream::BOOTSTRAP, 2, p.to_bits()]);
    let se = bootstrap_se(powers.len(), BOOTSTRAP_REPS, &mut rng, |idx| {
        stat(idx.iter().map(|&i| powers[i]).sum::<f64>() / idx.len() as f64)
    });
    Estimate { value, se }
}

/// Normalized moment of the inner product of two independent copies of X.
pub fn moment_mp(spec: &SystemSpec, p: f64, pairs: usize, seed: u64) -> Result<Estimate> {
    check_p(p)?;
    check_budget(pairs)?;
    spec.validate()?;
    let products: Vec<f64> = pair_draws(spec, pairs, seed).into_iter().map(|d| d.0).collect();
    Ok(mp_from_products(&products, spec.n(), p, seed))
}

/// Concentration of |X|² around n; zero for fixed-norm systems.
pub fn sigma_2p(spec: &SystemSpec, p: f64, budget: usize, seed: u64) -> Result<Estimate> {
    check_p(p)?;
    check_budget(budget)?;
    spec.validate()?;
    if spec.has_fixed_norm() {
        return Ok(Estimate::exact(0.0));
    }
    Ok(sigma_from_sq_norms(&sq_norm_draws(spec, budget, seed), spec.n(), p, seed))
}

fn base_check(check: &str, anchor: &str, spec: &SystemSpec, budget: usize, seed: u64) -> BoundCheck {
    BoundCheck {
        check: check.into(),
        anchor: anchor.into(),
        spec: spec.id(),
        n: spec.n(),
        param: None,
        lhs: 0.0,
        rhs: 0.0,
        slack: 0.0,
        budget: budget as u64,
        seed,
    }
}

fn norm_chain_checks(spec: &SystemSpec, sq: &[f64], budget: usize, seed: u64) -> BoundCheckReport {
    let nf = spec.n() as f64;
    let norms: Vec<f64> = sq.iter().map(|q| q.sqrt()).collect();
    let dev: Vec<f64> = sq.iter().map(|q| q / nf - 1.0).collect();
    // returns (Var|X|, σ₄², σ₂) over a resample
    let parts = |idx: &mut dyn Iterator<Item = usize>| -> (f64, f64, f64) {
        let (mut s, mut s2, mut d2, mut d1, mut k) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in idx {
            s += norms[i];
            s2 += norms[i] * norms[i];
            d2 += dev[i] * dev[i];
            d1 += dev[i].abs();
            k += 1.0;
        }
        let m = s / k;
        let var = ((s2 - k * m * m) / (k - 1.0)).max(0.0);
        (var, nf * d2 / k, nf.sqrt() * d1 / k)
    };
    let (var, s4sq, s2) = if spec.has_fixed_norm() {
        (0.0, 0.0, 0.0)
    } else {
        parts(&mut (0..sq.len()))
    };
    let margins: [(&str, &str, f64, f64, fn(f64, f64, f64, f64) -> f64); 3] = [
        ("norm-variance-upper", "Var|X| <= sigma_4^2", var, s4sq, |v, s4, _, _| s4 - v),
        ("norm-variance-lower", "sigma_2^2 / 4 <= Var|X|", s2 * s2 / 4.0, var, |v, _, s2, _| v - s2 * s2 / 4.0),
        ("norm-variance-sigma2", "Var|X| <= sigma_2 sqrt(n)", var, s2 * nf.sqrt(), |v, _, s2, n| s2 * n.sqrt() - v),
    ];
    let mut out = BoundCheckReport::new();
    for (k, (name, anchor, lhs, rhs, margin)) in margins.into_iter().enumerate() {
        let se = if spec.has_fixed_norm() {
            0.0
        } else {
            let mut rng = derived(seed, &[stream::BOOTSTRAP, 3, k as u64]);
            bootstrap_se(sq.len(), BOOTSTRAP_REPS, &mut rng, |idx| {
                let (v, s4, s2) = parts(&mut idx.iter().copied());
                margin(v, s4, s2, nf)
            })
        };
        out.push(BoundCheck { lhs, rhs, slack: SE_SLACK * se, ..base_check(name, anchor, spec, budget, seed) });
    }
    out
}

/// `Var|X| ≤ σ₄²` and `σ₂²/4 ≤ Var|X| ≤ σ₂√n`, each with 3 SE of slack.
pub fn norm_variance_check(spec: &SystemSpec, budget: usize, seed: u64) -> Result<BoundCheckReport> {
    check_budget(budget)?;
    spec.validate()?;
    let sq = sq_norm_draws(spec, budget, seed);
    Ok(norm_chain_checks(spec, &sq, budget, seed))
}

/// Empirical `P{|X − Y|² ≤ n/4}` against `4^q m_q^q / n^{q/2} + 4^{2p} σ_2p^{2p} / n^p`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallBall {
    pub probability: Estimate,
    pub bound: f64,
    pub p: f64,
    pub q: f64,
    pub m_q: Estimate,
    pub sigma_2p: Estimate,
}

impl SmallBall {
    pub fn pass(&self) -> bool {
        self.probability.value <= self.bound + SE_SLACK * self.probability.se
    }
}

fn small_ball_bound(n: usize, p: f64, q: f64, m_q: f64, sigma: f64) -> f64 {
    let nf = n as f64;
    4f64.powf(q) * m_q.powf(q) / nf.powf(q / 2.0) + 4f64.powf(2.0 * p) * sigma.powf(2.0 * p) / nf.powf(p)
}

fn small_ball_from(spec: &SystemSpec, pairs: &[(f64, f64)], sq: &[f64], p: f64, q: f64, seed: u64) -> SmallBall {
    let n = spec.n();
    let threshold = n as f64 / 4.0;
    let hits = pairs.iter().filter(|d| d.1 <= threshold).count() as f64;
    let count = pairs.len() as f64;
    let prob = hits / count;
    // a zero count still carries the rule-of-three uncertainty
    let se = if hits == 0.0 { 1.0 / count } else { (prob * (1.0 - prob) / count).sqrt() };
    let products: Vec<f64> = pairs.iter().map(|d| d.0).collect();
    let m_q = mp_from_products(&products, n, q, seed);
    let sigma = if spec.has_fixed_norm() { Estimate::exact(0.0) } else { sigma_from_sq_norms(sq, n, p, seed) };
    SmallBall {
        probability: Estimate { value: prob, se },
        bound: small_ball_bound(n, p, q, m_q.value, sigma.value),
        p,
        q,
        m_q,
        sigma_2p: sigma,
    }
}

pub fn small_ball(spec: &SystemSpec, budget: usize, seed: u64, p: f64, q: f64) -> Result<SmallBall> {
    check_p(p)?;
    check_p(q)?;
    check_budget(budget)?;
    spec.validate()?;
    let pairs = pair_draws(spec, budget, seed);
    let sq = sq_norm_draws(spec, budget, seed);
    Ok(small_ball_from(spec, &pairs, &sq, p, q, seed))
}

/// All functionals of one system at the orders in `ps`, sharing one set of
/// pair draws and one set of norm draws.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalsReport {
    pub spec: String,
    pub n: usize,
    pub max_norm: Vec<MpEstimate>,
    pub pair_moment: Vec<(f64, Estimate)>,
    pub norm_concentration: Vec<(f64, Estimate)>,
    pub norm_variance: Estimate,
    /// `P{|X − Y|² ≤ n/4}` with its bound at p = q = 2.
    pub small_ball: SmallBall,
    pub budget: usize,
    pub seed: u64,
}

pub fn functionals_report(spec: &SystemSpec, ps: &[f64], budget: usize, seed: u64) -> Result<FunctionalsReport> {
    check_budget(budget)?;
    spec.validate()?;
    for &p in ps {
        check_p(p)?;
    }
    let n = spec.n();
    let pairs = pair_draws(spec, budget, seed);
    let sq = sq_norm_draws(spec, budget, seed);
    let products: Vec<f64> = pairs.iter().map(|d| d.0).collect();
    let max_norm = ps
        .iter()
        .map(|&p| maximal_lp_norm(spec, p, MpStrategy::Analytic, derive_seed(seed, &[p.to_bits()])))
        .collect::<Result<Vec<_>>>()?;
    let pair_moment = ps.iter().map(|&p| (p, mp_from_products(&products, n, p, seed))).collect();
    let norm_concentration = ps
        .iter()
        .map(|&p| {
            let est = if spec.has_fixed_norm() { Estimate::exact(0.0) } else { sigma_from_sq_norms(&sq, n, p, seed) };
            (p, est)
        })
        .collect();
    let norms: Vec<f64> = sq.iter().map(|q| q.sqrt()).collect();
    let norm_variance = if spec.has_fixed_norm() {
        Estimate::exact(0.0)
    } else {
        let mut rng = derived(seed, &[stream::BOOTSTRAP, 4]);
        let se = bootstrap_se(norms.len(), BOOTSTRAP_REPS, &mut rng, |idx| {
            let v: Vec<f64> = idx.iter().map(|&i| norms[i]).collect();
            variance(&v)
        });
        Estimate { value: variance(&norms), se }
    };
    Ok(FunctionalsReport {
        spec: spec.id(),
        n,
        max_norm,
        pair_moment,
        norm_concentration,
        norm_variance,
        small_ball: small_ball_from(spec, &pairs, &sq, 2.0, 2.0, seed),
        budget,
        seed,
    })
}

impl FunctionalsReport {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{CSV_VERSION_LINE}")?;
        writeln!(out, "spec,functional,p,estimate,se,budget,seed")?;
        let mut row = |name: &str, p: Option<f64>, e: Estimate| {
            let p = p.map(|v| v.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                csv_field(&self.spec),
                name,
                p,
                e.value,
                e.se,
                self.budget,
                self.seed
            )
        };
        for m in &self.max_norm {
            let name = if m.lower_bound { "M_p_lower_bound" } else { "M_p" };
            row(name, Some(m.p), Estimate { value: m.value, se: m.se })?;
        }
        for &(p, e) in &self.pair_moment {
            row("m_p", Some(p), e)?;
        }
        for &(p, e) in &self.norm_concentration {
            row("sigma_2p", Some(p), e)?;
        }
        row("var_norm", None, self.norm_variance)?;
        row("small_ball", None, self.small_ball.probability)?;
        row("small_ball_bound", Some(self.small_ball.p), Estimate::exact(self.small_ball.bound))
    }
}

/// Inequality checks for one system: `m₂ ≥ 1` (with equality when
/// isotropic), `(E|X|^p)^{1/p} ≤ M_p √n`, `m_p ≤ M_p²`, monotonicity in p,
/// the norm-variance chain and the small-ball bound.
pub fn functional_checks(spec: &SystemSpec, budget: usize, seed: u64) -> Result<BoundCheckReport> {
    check_budget(budget)?;
    spec.validate()?;
    let n = spec.n();
    let nf = n as f64;
    let pairs = pair_draws(spec, budget, seed);
    let sq = sq_norm_draws(spec, budget, seed);
    let products: Vec<f64> = pairs.iter().map(|d| d.0).collect();
    let m: Vec<Estimate> = [2.0, 3.0].iter().map(|&p| mp_from_products(&products, n, p, seed)).collect();
    let big_m: Vec<MpEstimate> = [2.0, 3.0]
        .iter()
        .map(|&p| maximal_lp_norm(spec, p, MpStrategy::Analytic, derive_seed(seed, &[p.to_bits()])))
        .collect::<Result<_>>()?;
    let base = |check: &str, anchor: &str| base_check(check, anchor, spec, budget, seed);
    let mut out = BoundCheckReport::new();

    out.push(BoundCheck { lhs: 1.0, rhs: m[0].value, slack: SE_SLACK * m[0].se, ..base("m2-at-least-one", "m_2 >= 1") });
    if spec.is_isotropic() {
        out.push(BoundCheck {
            lhs: (m[0].value - 1.0).abs(),
            rhs: 0.0,
            slack: SE_SLACK * m[0].se,
            ..base("m2-isotropic-equality", "m_2 = 1 for isotropic X")
        });
    } else if spec.is_gaussian() {
        out.push(BoundCheck {
            lhs: 1.0 + SE_SLACK * m[0].se,
            rhs: m[0].value,
            ..base("m2-anisotropic-strict", "m_2 > 1 for non-isotropic X")
        });
    }
    for (k, p) in [2.0, 3.0].into_iter().enumerate() {
        let norm_p = if spec.has_fixed_norm() { Estimate::exact(nf.sqrt()) } else {
            let norms: Vec<f64> = sq.iter().map(|q| q.sqrt()).collect();
            lp_norm(&norms, p)
        };
        let mp = &big_m[k];
        out.push(BoundCheck {
            param: Some(("p", p)),
            lhs: norm_p.value,
            rhs: mp.value * nf.sqrt(),
            slack: SE_SLACK * (norm_p.se + mp.se * nf.sqrt()),
            ..base("norm-moment-vs-max-norm", "(E|X|^p)^(1/p) <= M_p sqrt(n)")
        });
        out.push(BoundCheck {
            param: Some(("p", p)),
            lhs: m[k].value,
            rhs: mp.value * mp.value,
            slack: SE_SLACK * (m[k].se + 2.0 * mp.value * mp.se),
            ..base("pair-moment-vs-max-norm", "m_p <= M_p^2")
        });
    }
    // Empirical power means over the same draws are exactly monotone, so the
    // slack only absorbs rounding.
    out.push(BoundCheck {
        lhs: m[0].value,
        rhs: m[1].value,
        slack: SE_SLACK * m[1].se,
        ..base("pair-moment-monotone", "m_2 <= m_3")
    });
    let sigmas: Vec<Estimate> = [1.0, 1.5, 2.0]
        .iter()
        .map(|&p| if spec.has_fixed_norm() { Estimate::exact(0.0) } else { sigma_from_sq_norms(&sq, n, p, seed) })
        .collect();
    for w in [(0, 1, "sigma_2 <= sigma_3"), (1, 2, "sigma_3 <= sigma_4")] {
        out.push(BoundCheck {
            lhs: sigmas[w.0].value,
            rhs: sigmas[w.1].value,
            slack: SE_SLACK * sigmas[w.1].se,
            ..base("norm-concentration-monotone", w.2)
        });
    }
    out.extend(norm_chain_checks(spec, &sq, budget, seed));
    let sb = small_ball_from(spec, &pairs, &sq, 2.0, 2.0, seed);
    out.push(BoundCheck {
        param: Some(("p", 2.0)),
        lhs: sb.probability.value,
        rhs: sb.bound,
        slack: SE_SLACK * sb.probability.se,
        ..base("small-ball", "P{|X-Y|^2 <= n/4} <= 16 m_2^2 / n + 256 sigma_4^4 / n^2")
    });
    Ok(out)
}

/// [`functional_checks`] over every system in `specs`.
pub fn functional_suite(specs: &[SystemSpec], budget: usize, seed: u64) -> Result<BoundCheckReport> {
    let mut out = BoundCheckReport::new();
    for (i, spec) in specs.iter().enumerate() {
        out.extend(functional_checks(spec, budget, derive_seed(seed, &[i as u64]))?);
    }
    Ok(out)
}

/// Law of a nonnegative variable ξ with Eξ = 1.
#[derive(Debug, Clone, PartialEq)]
pub enum XiLaw {
    /// ξ ≡ 1.
    Degenerate,
    /// Standard exponential.
    Exponential,
    Discrete { values: Vec<f64>, probs: Vec<f64> },
    /// `(X₁ − Y₁)²/2` for independent copies from a unit-variance base.
    SquaredDifference(BaseDistribution),
}

impl XiLaw {
    pub fn validate(&self) -> Result<()> {
        if let XiLaw::Discrete { values, probs } = self {
            if values.is_empty() || values.len() != probs.len() {
                return Err(Error::config("discrete law needs matching nonempty values and probabilities"));
            }
            if values.iter().any(|&v| !(v >= 0.0 && v.is_finite())) || probs.iter().any(|&q| !(q >= 0.0)) {
                return Err(Error::config("discrete law needs nonnegative values and probabilities"));
            }
            let total: f64 = probs.iter().sum();
            let m: f64 = values.iter().zip(probs).map(|(v, q)| v * q).sum();
            if (total - 1.0).abs() > 1e-12 || (m - 1.0).abs() > 1e-12 {
                return Err(Error::config(format!("discrete law has mass {total} and mean {m}, expected 1 and 1")));
            }
        }
        Ok(())
    }

    /// `E ξ 1{ξ > κ}`.
    pub fn tail_expectation(&self, kappa: f64) -> f64 {
        match self {
            XiLaw::Degenerate => f64::from(kappa < 1.0),
            XiLaw::Exponential => {
                if kappa <= 0.0 {
                    1.0
                } else {
                    (1.0 + kappa) * (-kappa).exp()
                }
            }
            XiLaw::Discrete { values, probs } => {
                values.iter().zip(probs).filter(|(v, _)| **v > kappa).map(|(v, q)| v * q).sum()
            }
            XiLaw::SquaredDifference(base) => {
                let a = (2.0 * kappa.max(0.0)).sqrt();
                match base {
                    BaseDistribution::Rademacher => f64::from(kappa < 2.0),
                    // X − Y has the triangular density (b − |d|)/b² on (−b, b)
                    BaseDistribution::Uniform => {
                        let b = 2.0 * 3f64.sqrt();
                        if a >= b {
                            0.0
                        } else {
                            (b.powi(4) / 12.0 - b * a.powi(3) / 3.0 + a.powi(4) / 4.0) / 12.0
                        }
                    }
                    // X − Y is Laplace with unit scale
                    BaseDistribution::CenteredExponential => (a * a + 2.0 * a + 2.0) * (-a).exp() / 2.0,
                    // ξ is χ²₁, and E ξ 1{ξ > κ} = P{χ²₃ > κ}
                    BaseDistribution::Normal => {
                        let r = kappa.max(0.0).sqrt();
                        2.0 * std_normal_sf(r) + 2.0 * r * std_normal_pdf(r)
                    }
                }
            }
        }
    }

    /// Support points of a purely atomic law.
    fn atoms(&self) -> Option<Vec<f64>> {
        match self {
            XiLaw::Degenerate => Some(vec![1.0]),
            XiLaw::Discrete { values, .. } => Some(values.clone()),
            XiLaw::SquaredDifference(BaseDistribution::Rademacher) => Some(vec![0.0, 2.0]),
            _ => None,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            XiLaw::Degenerate => 1.0,
            XiLaw::Exponential => rng.sample(Exp1),
            XiLaw::Discrete { values, probs } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (v, q) in values.iter().zip(probs) {
                    acc += q;
                    if u < acc {
                        return *v;
                    }
                }
                *values.last().unwrap()
            }
            XiLaw::SquaredDifference(base) => {
                let d = base.sample(rng) - base.sample(rng);
                0.5 * d * d
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            XiLaw::Degenerate => "degenerate".into(),
            XiLaw::Exponential => "exponential".into(),
            XiLaw::Discrete { .. } => "discrete".into(),
            XiLaw::SquaredDifference(b) => format!("squared-difference-{}", b.name()),
        }
    }
}

/// `P{S_n ≤ λn} ≤ exp(−(1−λ)² n / (8κ))` for sums of i.i.d. copies of ξ,
/// valid whenever `E ξ 1{ξ > κ} ≤ (1−λ)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerTailBound {
    pub lambda: f64,
    /// Infimum of the admissible κ.
    pub kappa: f64,
    /// Smallest admissible point of the grid `2^k · 10⁻³`.
    pub grid_kappa: f64,
}

impl LowerTailBound {
    pub fn bound(&self, n: usize) -> f64 {
        let g = 1.0 - self.lambda;
        (-g * g * n as f64 / (8.0 * self.kappa)).exp()
    }
}

/// Smallest admissible κ: the first admissible point of the geometric grid,
/// then refined down to the exact threshold inside the last grid cell.
pub fn lower_tail_bound(xi: &XiLaw, lambda: f64) -> Result<LowerTailBound> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::domain(format!("lambda = {lambda} must lie in (0, 1)")));
    }
    xi.validate()?;
    let target = 0.5 * (1.0 - lambda);
    let admissible = |k: f64| xi.tail_expectation(k) <= target;
    let mut lo = 0.0;
    let mut hi = 1e-3;
    let mut steps = 0;
    while !admissible(hi) {
        lo = hi;
        hi *= 2.0;
        steps += 1;
        if steps > 80 {
            return Err(Error::Numeric { kernel: "lower_tail_bound", detail: "no admissible kappa".into() });
        }
    }
    let grid_kappa = hi;
    let kappa = match xi.atoms() {
        // the tail expectation is a right-continuous step function, so the
        // threshold is an atom
        Some(atoms) => atoms
            .into_iter()
            .filter(|&a| a > lo && a <= hi && a > 0.0 && admissible(a))
            .fold(hi, f64::min),
        None => {
            let (mut a, mut b) = (lo, hi);
            while b - a > 1e-14 * b {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if admissible(mid) {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            b
        }
    };
    Ok(LowerTailBound { lambda, kappa, grid_kappa })
}

/// Monte Carlo `P{S_n ≤ λn}` over `sims` sums of n copies of ξ.
pub fn lower_tail_probability(xi: &XiLaw, lambda: f64, n: usize, sims: usize, seed: u64) -> Result<Estimate> {
    xi.validate()?;
    if sims == 0 || n == 0 {
        return Err(Error::domain("need at least one simulation of a nonempty sum"));
    }
    let threshold = lambda * n as f64;
    let hits: Vec<f64> = sharded_draws(sims, derive_seed(seed, &[stream::SAMPLES]), 0, |rng, _| {
        let s: f64 = (0..n).map(|_| xi.sample(rng)).sum();
        f64::from(s <= threshold)
    });
    let p = mean(&hits);
    Ok(Estimate { value: p, se: (p * (1.0 - p) / sims as f64).sqrt() })
}

/// Simulated lower tails of the exponential and two-point laws against their
/// bounds at `λ = 1/2`.
pub fn lower_tail_suite(n: usize, sims: usize, seed: u64) -> Result<BoundCheckReport> {
    let lambda = 0.5;
    let mut out = BoundCheckReport::new();
    for (k, xi) in [XiLaw::Exponential, XiLaw::SquaredDifference(BaseDistribution::Rademacher)]
        .into_iter()
        .enumerate()
    {
        let bound = lower_tail_bound(&xi, lambda)?;
        let seed = derive_seed(seed, &[k as u64]);
        let prob = lower_tail_probability(&xi, lambda, n, sims, seed)?;
        out.push(BoundCheck {
            check: "lower-tail".into(),
            anchor: "P{S_n <= lambda n} <= exp(-(1-lambda)^2 n / (8 kappa))".into(),
            spec: xi.name(),
            n,
            param: Some(("kappa", bound.kappa)),
            lhs: prob.value,
            rhs: bound.bound(n),
            slack: 0.0,
            budget: sims as u64,
            seed,
        });
    }
    Ok(out)
}
