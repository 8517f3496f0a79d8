//! Characteristic functions of weighted sums and of the typical law, the
//! bounds they satisfy, and the integrals of the smoothing inequality.

use rayon::prelude::*;
use std::io::Write;

use crate::distributions::{typical_cdf, Kernel, MixtureCdf};
use crate::error::{Error, Result};
use crate::functionals::{analytic_maximal_lp_norm, small_ball, SE_SLACK};
use crate::report::{BoundCheck, BoundCheckReport, CSV_VERSION_LINE};
use crate::rng::{derive_seed, derived, stream};
use crate::sphere_law::{sample_direction, Direction, JnTable, SphereCoordinateLaw};
use crate::stats::mean_se;
use crate::systems::{dot, sharded_draws, SystemSpec};

pub const MIN_CHARFN_BUDGET: usize = 100;

/// Values of a characteristic function on a grid of t ≥ 0. The value at
/// t = 0 is exactly 1; negative t follow from `f(−t) = conj f(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharFnEstimate {
    pub t: Vec<f64>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub se: Vec<f64>,
    pub budget: usize,
}

impl CharFnEstimate {
    pub fn modulus(&self, i: usize) -> f64 {
        self.re[i].hypot(self.im[i])
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{CSV_VERSION_LINE}")?;
        writeln!(out, "t,re,im,se")?;
        for i in 0..self.t.len() {
            writeln!(out, "{},{},{},{}", self.t[i], self.re[i], self.im[i], self.se[i])?;
        }
        Ok(())
    }
}

fn check_grid(t: &[f64]) -> Result<()> {
    if t.is_empty() {
        return Err(Error::domain("empty t grid"));
    }
    if t.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::domain("t grid must be finite and nonnegative"));
    }
    Ok(())
}

fn check_budget(budget: usize) -> Result<()> {
    if budget < MIN_CHARFN_BUDGET {
        return Err(Error::insufficient(format!(
            "characteristic function budget {budget} is below {MIN_CHARFN_BUDGET}"
        )));
    }
    Ok(())
}

/// Empirical characteristic function of a sample, sharing the sample across
/// every t.
pub fn empirical_charfn(samples: &[f64], t: &[f64]) -> Result<CharFnEstimate> {
    check_grid(t)?;
    let count = samples.len() as f64;
    let mut out = CharFnEstimate { t: t.to_vec(), re: vec![], im: vec![], se: vec![], budget: samples.len() };
    for &tk in t {
        if tk == 0.0 {
            out.re.push(1.0);
            out.im.push(0.0);
            out.se.push(0.0);
            continue;
        }
        let (mut c, mut s, mut c2, mut s2) = (0.0, 0.0, 0.0, 0.0);
        for &x in samples {
            let (sn, cs) = (tk * x).sin_cos();
            c += cs;
            s += sn;
            c2 += cs * cs;
            s2 += sn * sn;
        }
        let (mc, ms) = (c / count, s / count);
        let var = ((c2 / count - mc * mc) + (s2 / count - ms * ms)).max(0.0);
        out.re.push(mc);
        out.im.push(ms);
        out.se.push((var / (count - 1.0).max(1.0)).sqrt());
    }
    Ok(out)
}

/// `E exp(it⟨X, θ⟩)` over `budget` draws.
pub fn charfn_weighted_sum(
    spec: &SystemSpec,
    theta: &Direction,
    t: &[f64],
    budget: usize,
    seed: u64,
) -> Result<CharFnEstimate> {
    check_budget(budget)?;
    check_grid(t)?;
    if theta.dim() != spec.n() {
        return Err(Error::domain("direction and system dimensions differ"));
    }
    let sums: Vec<f64> = sharded_draws(budget, derive_seed(seed, &[stream::SAMPLES]), spec.n(), |rng, row| {
        spec.fill_row(rng, row);
        dot(row, theta.coords())
    });
    empirical_charfn(&sums, t)
}

/// `t ↦ E k̂(t r)` for a radial mixture, where k̂ is `e^{−s²/2}` or `J_n`.
/// The standard error reflects the spread of the atoms.
pub fn charfn_of_mixture(mixture: &MixtureCdf, t: &[f64]) -> Result<CharFnEstimate> {
    check_grid(t)?;
    let atoms = mixture.atoms();
    let r_max = atoms.iter().map(|a| a.0).fold(0.0, f64::max);
    let t_max = t.iter().cloned().fold(0.0, f64::max);
    let table = match mixture.kernel() {
        Kernel::Gaussian => None,
        Kernel::Sphere(table) => {
            let law = *table.law();
            let s_max = t_max * r_max * law.support();
            Some(if atoms.len() > 8 {
                Table::Tabulated(JnTable::new(law, s_max, JnTable::DEFAULT_STEP)?)
            } else {
                Table::Direct(law)
            })
        }
    };
    let rows: Vec<(f64, f64)> = t
        .par_iter()
        .map(|&tk| -> Result<(f64, f64)> {
            if tk == 0.0 {
                return Ok((1.0, 0.0));
            }
            let (mut m1, mut m2) = (0.0, 0.0);
            for &(r, w) in atoms {
                let v = match &table {
                    None => (-0.5 * tk * tk * r * r).exp(),
                    Some(tab) => tab.eval(tk * r)?,
                };
                m1 += w * v;
                m2 += w * v * v;
            }
            let var = (m2 - m1 * m1).max(0.0);
            Ok((m1, (var / atoms.len() as f64).sqrt()))
        })
        .collect::<Result<_>>()?;
    Ok(CharFnEstimate {
        t: t.to_vec(),
        re: rows.iter().map(|r| r.0).collect(),
        im: vec![0.0; t.len()],
        se: rows.iter().map(|r| r.1).collect(),
        budget: atoms.len(),
    })
}

enum Table {
    Direct(SphereCoordinateLaw),
    Tabulated(JnTable),
}

impl Table {
    /// `J_n(t r √n)`, the kernel transform at radius r.
    fn eval(&self, tr: f64) -> Result<f64> {
        match self {
            Table::Direct(law) => law.charfn_jn(tr * law.support()),
            Table::Tabulated(t) => t.eval(tr * t.law().support()),
        }
    }
}

/// Characteristic function of the typical law, `f(t) = E J_n(t|X|)`.
/// Exact for fixed-norm systems.
pub fn charfn_typical(spec: &SystemSpec, t: &[f64], radial_budget: usize, seed: u64) -> Result<CharFnEstimate> {
    check_budget(radial_budget)?;
    let mut est = charfn_of_mixture(&typical_cdf(spec, radial_budget, seed)?, t)?;
    est.budget = if spec.has_fixed_norm() { 0 } else { radial_budget };
    Ok(est)
}

/// Empirical characteristic functions of `⟨X, θ_j⟩` for `theta_budget`
/// random directions, one shared grid.
pub fn theta_charfns(
    spec: &SystemSpec,
    t: &[f64],
    theta_budget: usize,
    sample_budget: usize,
    seed: u64,
) -> Result<Vec<CharFnEstimate>> {
    (0..theta_budget)
        .into_par_iter()
        .map(|j| {
            let s = derive_seed(seed, &[j as u64]);
            let theta = sample_direction(spec.n(), &mut derived(s, &[stream::DIRECTION]))?;
            charfn_weighted_sum(spec, &theta, t, sample_budget, s)
        })
        .collect()
}

fn check_row(check: &str, anchor: &str, spec: &SystemSpec, t: f64, budget: usize, seed: u64) -> BoundCheck {
    BoundCheck {
        check: check.into(),
        anchor: anchor.into(),
        spec: spec.id(),
        n: spec.n(),
        param: Some(("t", t)),
        lhs: 0.0,
        rhs: 0.0,
        slack: 0.0,
        budget: budget as u64,
        seed,
    }
}

/// `E_θ |f_θ(t) − f(t)|² ≤ t² M₁² / (n − 1)` at every grid t, with `M₁`
/// replaced by its upper bound `M₂` from the exact covariance.
pub fn poincare_gap_check(
    spec: &SystemSpec,
    t: &[f64],
    theta_budget: usize,
    sample_budget: usize,
    seed: u64,
) -> Result<BoundCheckReport> {
    let per_theta = theta_charfns(spec, t, theta_budget, sample_budget, seed)?;
    let typical = charfn_typical(spec, t, sample_budget, derive_seed(seed, &[stream::RADIAL]))?;
    Ok(poincare_rows(spec, &per_theta, &typical, sample_budget, seed))
}

fn poincare_rows(
    spec: &SystemSpec,
    per_theta: &[CharFnEstimate],
    typical: &CharFnEstimate,
    budget: usize,
    seed: u64,
) -> BoundCheckReport {
    let m2 = analytic_maximal_lp_norm(spec, 2.0).expect("M_2 has a closed form for every system");
    let nf = spec.n() as f64;
    let mut out = BoundCheckReport::new();
    for (i, &tk) in typical.t.iter().enumerate() {
        let sq: Vec<f64> = per_theta
            .iter()
            .map(|f| (f.re[i] - typical.re[i]).powi(2) + (f.im[i] - typical.im[i]).powi(2))
            .collect();
        let est = mean_se(&sq);
        out.push(BoundCheck {
            lhs: est.value,
            rhs: tk * tk * m2 * m2 / (nf - 1.0),
            slack: SE_SLACK * est.se,
            ..check_row("poincare-gap", "E_theta |f_theta(t) - f(t)|^2 <= t^2 M_1^2 / (n-1)", spec, tk, budget, seed)
        });
    }
    out
}

/// `E_θ |f_θ(t)| ≤ 2.1 (e^{−t²/16} + e^{−n/24} + √P{|X − Y|² ≤ n/4})`.
pub fn decay_bound_check(
    spec: &SystemSpec,
    t: &[f64],
    theta_budget: usize,
    sample_budget: usize,
    seed: u64,
) -> Result<BoundCheckReport> {
    let per_theta = theta_charfns(spec, t, theta_budget, sample_budget, seed)?;
    let sb = small_ball(spec, sample_budget, derive_seed(seed, &[stream::PAIRS]), 2.0, 2.0)?;
    Ok(decay_rows(spec, &per_theta, sb.probability.value, sample_budget, seed))
}

fn decay_rows(spec: &SystemSpec, per_theta: &[CharFnEstimate], p_small: f64, budget: usize, seed: u64) -> BoundCheckReport {
    let nf = spec.n() as f64;
    let mut out = BoundCheckReport::new();
    for (i, &tk) in per_theta[0].t.iter().enumerate() {
        let mods: Vec<f64> = per_theta.iter().map(|f| f.modulus(i)).collect();
        let est = mean_se(&mods);
        out.push(BoundCheck {
            lhs: est.value,
            rhs: 2.1 * ((-tk * tk / 16.0).exp() + (-nf / 24.0).exp() + p_small.sqrt()),
            slack: SE_SLACK * est.se,
            ..check_row(
                "charfn-decay",
                "E_theta |f_theta(t)| <= 2.1 (exp(-t^2/16) + exp(-n/24) + sqrt(P{|X-Y|^2 <= n/4}))",
                spec,
                tk,
                budget,
                seed,
            )
        });
    }
    out
}

/// Default t grid for the verification suite.
pub const CHECK_GRID: [f64; 10] = [0.0, 0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0];

/// Poincaré and decay checks sharing one set of per-direction estimates.
pub fn charfn_checks(spec: &SystemSpec, theta_budget: usize, sample_budget: usize, seed: u64) -> Result<BoundCheckReport> {
    let t = CHECK_GRID;
    let per_theta = theta_charfns(spec, &t, theta_budget, sample_budget, seed)?;
    let typical = charfn_typical(spec, &t, sample_budget, derive_seed(seed, &[stream::RADIAL]))?;
    let sb = small_ball(spec, sample_budget, derive_seed(seed, &[stream::PAIRS]), 2.0, 2.0)?;
    let mut out = poincare_rows(spec, &per_theta, &typical, sample_budget, seed);
    out.extend(decay_rows(spec, &per_theta, sb.probability.value, sample_budget, seed));
    Ok(out)
}

/// The three terms on the right of the smoothing inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingTerms {
    /// `∫_0^{T₀} |u − v| / t dt`.
    pub close: f64,
    /// `∫_{T₀}^{T} |u| / t dt`.
    pub mid: f64,
    /// `(1/T) ∫_0^T |v| dt`.
    pub tail: f64,
}

impl SmoothingTerms {
    pub fn total(&self) -> f64 {
        self.close + self.mid + self.tail
    }
}

/// `T₀ = 5√(log n)` and `T = 5n`.
pub fn default_smoothing_window(n: usize) -> (f64, f64) {
    let nf = n as f64;
    (5.0 * nf.ln().sqrt(), 5.0 * nf)
}

/// `0` followed by `points` log-spaced values on `[10⁻³, t_max]`.
pub fn log_grid(t_max: f64, points: usize) -> Vec<f64> {
    let (a, b) = (1e-3f64.ln(), t_max.ln());
    let mut g = vec![0.0];
    g.extend((0..points).map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp()));
    if let Some(last) = g.last_mut() {
        *last = t_max;
    }
    g
}

/// Trapezoid integral of the sampled function `g` over `[a, b]`, with linear
/// interpolation at the cut points.
fn trapezoid(t: &[f64], g: &[f64], a: f64, b: f64) -> f64 {
    let at = |x: f64| -> f64 {
        let k = t.partition_point(|&v| v <= x).clamp(1, t.len() - 1);
        let (t0, t1) = (t[k - 1], t[k]);
        g[k - 1] + (g[k] - g[k - 1]) * (x - t0) / (t1 - t0)
    };
    let mut pts: Vec<(f64, f64)> = vec![(a, at(a))];
    pts.extend(t.iter().zip(g).filter(|(x, _)| **x > a && **x < b).map(|(x, y)| (*x, *y)));
    pts.push((b, at(b)));
    pts.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum()
}

/// `|u − v|/t` on the grid, with the t → 0 value extrapolated linearly from
/// the two smallest positive grid points.
fn ratio_integrand(t: &[f64], diff: &[f64]) -> Vec<f64> {
    let mut g: Vec<f64> = t.iter().zip(diff).map(|(tk, d)| if *tk > 0.0 { d / tk } else { f64::NAN }).collect();
    let pos: Vec<usize> = (0..t.len()).filter(|&i| t[i] > 0.0).take(2).collect();
    for i in 0..t.len() {
        if t[i] == 0.0 {
            g[i] = match pos.as_slice() {
                [a, b] => g[*a] - t[*a] * (g[*b] - g[*a]) / (t[*b] - t[*a]),
                [a] => g[*a],
                _ => 0.0,
            };
        }
    }
    g
}

fn check_window(t: &[f64], t0: f64, t_end: f64) -> Result<()> {
    if !(t0 > 0.0 && t_end >= t0) {
        return Err(Error::domain(format!("need T ≥ T0 > 0, got T0 = {t0}, T = {t_end}")));
    }
    if t.len() < 2 || t[0] != 0.0 || *t.last().unwrap() < t_end || t.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("t grid must be increasing, start at 0 and reach T"));
    }
    Ok(())
}

/// Smoothing integrals for a single pair `u = f_θ`, `v = f`.
pub fn smoothing_rhs(u: &CharFnEstimate, v: &CharFnEstimate, t0: f64, t_end: f64) -> Result<SmoothingTerms> {
    smoothing_rhs_averaged(std::slice::from_ref(u), v, t0, t_end)
}

/// Smoothing integrals with `|u − v|` and `|u|` averaged over directions.
pub fn smoothing_rhs_averaged(
    us: &[CharFnEstimate],
    v: &CharFnEstimate,
    t0: f64,
    t_end: f64,
) -> Result<SmoothingTerms> {
    let t = &v.t;
    check_window(t, t0, t_end)?;
    if us.is_empty() || us.iter().any(|u| u.t != *t) {
        return Err(Error::domain("characteristic functions must share one t grid"));
    }
    let k = us.len() as f64;
    let diff: Vec<f64> = (0..t.len())
        .map(|i| us.iter().map(|u| (u.re[i] - v.re[i]).hypot(u.im[i] - v.im[i])).sum::<f64>() / k)
        .collect();
    let modu: Vec<f64> = (0..t.len())
        .map(|i| us.iter().map(|u| u.modulus(i)).sum::<f64>() / k / t[i].max(f64::MIN_POSITIVE))
        .collect();
    let modv: Vec<f64> = (0..t.len()).map(|i| v.modulus(i)).collect();
    Ok(SmoothingTerms {
        close: trapezoid(t, &ratio_integrand(t, &diff), 0.0, t0),
        mid: trapezoid(t, &modu, t0, t_end),
        tail: trapezoid(t, &modv, 0.0, t_end) / t_end,
    })
}
