//! Empirical and mixture distribution functions and distances between them.

use rayon::prelude::*;
use std::borrow::Cow;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::rng::{derive_seed, derived, stream};
use crate::sphere_law::{hermite, sample_direction, SphereCdfTable, SphereCoordinateLaw};
use crate::stats::{mean_se, std_normal_cdf, std_normal_pdf, std_normal_sf, Estimate, KOLMOGOROV_MEAN};
use crate::systems::SystemSpec;

/// A distribution function on ℝ.
pub trait Cdf: Sync {
    /// `P{X ≤ x}`.
    fn eval(&self, x: f64) -> f64;

    /// `P{X < x}`.
    fn eval_left(&self, x: f64) -> f64 {
        self.eval(x)
    }

    /// Sorted points carrying positive mass. May contain repeats.
    fn jump_points(&self) -> Cow<'_, [f64]> {
        Cow::Borrowed(&[])
    }

    /// True for purely atomic laws, constant between jump points.
    fn is_step(&self) -> bool {
        false
    }

    /// An interval outside of which the law has negligible mass.
    fn effective_range(&self) -> (f64, f64);
}

/// Empirical distribution function of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCdf {
    sorted: Vec<f64>,
}

/// Sorted copy of the sample; ties are kept.
pub fn empirical_cdf(samples: &[f64]) -> Result<StepCdf> {
    StepCdf::from_vec(samples.to_vec())
}

impl StepCdf {
    pub fn from_vec(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::domain("empirical CDF of an empty sample"));
        }
        if samples.iter().any(|v| v.is_nan()) {
            return Err(Error::domain("sample contains NaN"));
        }
        samples.sort_unstable_by(f64::total_cmp);
        Ok(StepCdf { sorted: samples })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }
}

impl Cdf for StepCdf {
    fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    fn eval_left(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v < x) as f64 / self.sorted.len() as f64
    }

    fn jump_points(&self) -> Cow<'_, [f64]> {
        Cow::Borrowed(&self.sorted)
    }

    fn is_step(&self) -> bool {
        true
    }

    fn effective_range(&self) -> (f64, f64) {
        (self.sorted[0], *self.sorted.last().unwrap())
    }
}

/// Scale family used inside a mixture.
#[derive(Debug, Clone)]
pub enum Kernel {
    /// Standard normal Φ.
    Gaussian,
    /// The sphere marginal Φ_n.
    Sphere(Arc<SphereCdfTable>),
}

impl Kernel {
    pub fn sphere(n: usize) -> Result<Self> {
        Ok(Kernel::Sphere(Arc::new(SphereCdfTable::new(SphereCoordinateLaw::new(n)?))))
    }

    fn cdf(&self, y: f64) -> f64 {
        match self {
            Kernel::Gaussian => std_normal_cdf(y),
            Kernel::Sphere(t) => t.cdf(y),
        }
    }

    fn density(&self, y: f64) -> f64 {
        match self {
            Kernel::Gaussian => std_normal_pdf(y),
            Kernel::Sphere(t) => t.density(y),
        }
    }

    /// Half-width of the kernel support, truncated at 12.
    fn reach(&self) -> f64 {
        match self {
            Kernel::Gaussian => 12.0,
            Kernel::Sphere(t) => t.law().support().min(12.0),
        }
    }

    /// `∫_{|y| > a} (1 + r² y²) k(y) dy`, or an upper bound for it.
    fn weighted_tail(&self, a: f64, r: f64) -> f64 {
        // ∫_a^∞ e^{−y²/(2s²)} and ∫_a^∞ y² e^{−y²/(2s²)}, both over √(2π)
        let moments = |s: f64| {
            let z = a / s;
            (s * std_normal_sf(z), s * s * s * (std_normal_sf(z) + z * std_normal_pdf(z)))
        };
        match self {
            Kernel::Gaussian => {
                let (m0, m2) = moments(1.0);
                2.0 * (m0 + r * r * m2)
            }
            Kernel::Sphere(t) => {
                let law = t.law();
                if a >= law.support() {
                    return 0.0;
                }
                // φ_n(y) ≤ c'_n exp(−(n−3) y² / (2n)) since ln(1 − u) ≤ −u
                let n = law.n() as f64;
                if n <= 3.0 {
                    return f64::INFINITY;
                }
                let s = (n / (n - 3.0)).sqrt();
                let (m0, m2) = moments(s);
                2.0 * law.norm_const() * (2.0 * PI).sqrt() * (m0 + r * r * m2)
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            Kernel::Gaussian => "gaussian".into(),
            Kernel::Sphere(t) => format!("sphere-{}", t.law().n()),
        }
    }
}

/// `x ↦ E K(x/r)` over a discrete law of `r ≥ 0`; an atom at `r = 0`
/// contributes a unit step at the origin.
#[derive(Debug, Clone)]
pub struct MixtureCdf {
    atoms: Vec<(f64, f64)>,
    kernel: Kernel,
}

impl MixtureCdf {
    pub fn new(atoms: Vec<(f64, f64)>, kernel: Kernel) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::domain("mixture needs at least one atom"));
        }
        if atoms.iter().any(|&(r, w)| !(r >= 0.0 && r.is_finite() && w >= 0.0 && w.is_finite())) {
            return Err(Error::domain("mixture atoms need finite r ≥ 0 and weights ≥ 0"));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::domain(format!("mixture weights sum to {total}, expected 1")));
        }
        Ok(MixtureCdf { atoms, kernel })
    }

    pub fn standard_normal() -> Self {
        MixtureCdf { atoms: vec![(1.0, 1.0)], kernel: Kernel::Gaussian }
    }

    /// Equal weights on each radius.
    pub fn from_radii(radii: &[f64], kernel: Kernel) -> Result<Self> {
        let w = 1.0 / radii.len() as f64;
        Self::new(radii.iter().map(|&r| (r, w)).collect(), kernel)
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    fn zero_mass(&self) -> f64 {
        self.atoms.iter().filter(|a| a.0 == 0.0).map(|a| a.1).sum()
    }

    fn max_radius(&self) -> f64 {
        self.atoms.iter().map(|a| a.0).fold(0.0, f64::max)
    }

    /// Mass of the continuous part at or below x.
    fn continuous_cdf(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.0 > 0.0)
            .map(|&(r, w)| w * self.kernel.cdf(x / r))
            .sum()
    }

    /// `E k(x/r)/r` over the atoms with r > 0.
    pub fn density(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.0 > 0.0)
            .map(|&(r, w)| w * self.kernel.density(x / r) / r)
            .sum()
    }

    /// Replace runs of sorted radii by their weighted mean so that at most
    /// `max_atoms` remain. The first two moments of r change only by the
    /// within-group spread, which is negligible for concentrated radii.
    pub fn compressed(&self, max_atoms: usize) -> MixtureCdf {
        if self.atoms.len() <= max_atoms || max_atoms == 0 {
            return self.clone();
        }
        let mut sorted = self.atoms.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut atoms = Vec::with_capacity(max_atoms + 1);
        let zero: f64 = sorted.iter().filter(|a| a.0 == 0.0).map(|a| a.1).sum();
        if zero > 0.0 {
            atoms.push((0.0, zero));
        }
        let positive: Vec<(f64, f64)> = sorted.into_iter().filter(|a| a.0 > 0.0).collect();
        let per_group = positive.len().div_ceil(max_atoms);
        for group in positive.chunks(per_group) {
            let w: f64 = group.iter().map(|a| a.1).sum();
            if w > 0.0 {
                let r = group.iter().map(|a| a.0 * a.1).sum::<f64>() / w;
                atoms.push((r, w));
            }
        }
        MixtureCdf { atoms, kernel: self.kernel.clone() }
    }
}

impl Cdf for MixtureCdf {
    fn eval(&self, x: f64) -> f64 {
        let step = if x >= 0.0 { self.zero_mass() } else { 0.0 };
        (self.continuous_cdf(x) + step).clamp(0.0, 1.0)
    }

    fn eval_left(&self, x: f64) -> f64 {
        let step = if x > 0.0 { self.zero_mass() } else { 0.0 };
        (self.continuous_cdf(x) + step).clamp(0.0, 1.0)
    }

    fn jump_points(&self) -> Cow<'_, [f64]> {
        if self.zero_mass() > 0.0 {
            Cow::Owned(vec![0.0])
        } else {
            Cow::Borrowed(&[])
        }
    }

    fn is_step(&self) -> bool {
        self.atoms.iter().all(|a| a.0 == 0.0)
    }

    fn effective_range(&self) -> (f64, f64) {
        let h = (self.kernel.reach() * self.max_radius()).max(1e-300);
        (-h, h)
    }
}

/// `E Φ(x/r)` over the given radial atoms.
pub fn gaussian_mixture_cdf(atoms: Vec<(f64, f64)>) -> Result<MixtureCdf> {
    MixtureCdf::new(atoms, Kernel::Gaussian)
}

/// Radii `r = |X|/√n` drawn from the system.
pub fn radial_samples(spec: &SystemSpec, budget: usize, seed: u64) -> Result<Vec<f64>> {
    if budget == 0 {
        return Err(Error::insufficient("radial budget must be positive"));
    }
    let scale = (spec.n() as f64).sqrt();
    let mut rng = derived(seed, &[stream::RADIAL]);
    Ok(spec.norms(budget, &mut rng).into_iter().map(|v| v / scale).collect())
}

/// The typical distribution `F(x) = E Φ_n(x/r)`. Fixed-norm systems give the
/// single atom r = 1.
pub fn typical_cdf(spec: &SystemSpec, radial_budget: usize, seed: u64) -> Result<MixtureCdf> {
    spec.validate()?;
    let kernel = Kernel::sphere(spec.n())?;
    if spec.has_fixed_norm() {
        return MixtureCdf::new(vec![(1.0, 1.0)], kernel);
    }
    MixtureCdf::from_radii(&radial_samples(spec, radial_budget, seed)?, kernel)
}

/// A mixture CDF tabulated on a uniform grid with cubic Hermite
/// interpolation of (CDF, density). An atom at 0 is kept exact.
#[derive(Debug, Clone)]
pub struct TabulatedCdf {
    lo: f64,
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
    zero_mass: f64,
}

impl TabulatedCdf {
    pub const DEFAULT_POINTS: usize = 8193;
    /// Atoms kept when tabulating a large empirical mixture.
    pub const MAX_ATOMS: usize = 4096;

    pub fn from_mixture(mixture: &MixtureCdf, points: usize) -> Result<Self> {
        if let Kernel::Sphere(t) = mixture.kernel() {
            if t.law().n() < 3 {
                return Err(Error::Unsupported("tabulating a mixture of arcsine kernels".into()));
            }
        }
        if points < 3 {
            return Err(Error::domain("a table needs at least 3 points"));
        }
        let m = mixture.compressed(Self::MAX_ATOMS);
        let (lo, hi) = m.effective_range();
        let step = (hi - lo) / (points - 1) as f64;
        let rows: Vec<(f64, f64)> = (0..points)
            .into_par_iter()
            .map(|i| {
                let x = lo + i as f64 * step;
                (m.continuous_cdf(x), m.density(x))
            })
            .collect();
        let (values, slopes) = rows.into_iter().unzip();
        Ok(TabulatedCdf { lo, step, values, slopes, zero_mass: m.zero_mass() })
    }

    fn continuous(&self, x: f64) -> f64 {
        let pos = (x - self.lo) / self.step;
        if pos <= 0.0 {
            return self.values[0];
        }
        let i = pos.floor() as usize;
        if i + 1 >= self.values.len() {
            return *self.values.last().unwrap();
        }
        hermite(pos - i as f64, self.step, self.values[i], self.values[i + 1], self.slopes[i], self.slopes[i + 1])
    }
}

impl Cdf for TabulatedCdf {
    fn eval(&self, x: f64) -> f64 {
        let step = if x >= 0.0 { self.zero_mass } else { 0.0 };
        (self.continuous(x) + step).clamp(0.0, 1.0)
    }

    fn eval_left(&self, x: f64) -> f64 {
        let step = if x > 0.0 { self.zero_mass } else { 0.0 };
        (self.continuous(x) + step).clamp(0.0, 1.0)
    }

    fn jump_points(&self) -> Cow<'_, [f64]> {
        if self.zero_mass > 0.0 {
            Cow::Owned(vec![0.0])
        } else {
            Cow::Borrowed(&[])
        }
    }

    fn effective_range(&self) -> (f64, f64) {
        (self.lo, self.lo + self.step * (self.values.len() - 1) as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistanceMethod {
    /// Both one-sided limits at every jump point; exact when either side is
    /// a step function.
    JumpPoints { candidates: usize },
    /// Uniform grid over the joint effective range, then two rounds of local
    /// refinement around the best point.
    Grid { points: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceReport {
    pub rho: f64,
    pub argmax: f64,
    pub method: DistanceMethod,
}

/// Points on the first-pass grid used between two continuous laws.
pub const DISTANCE_GRID_POINTS: usize = 20_001;

/// `sup_x |U(x) − V(x)|`.
pub fn kolmogorov_distance(u: &dyn Cdf, v: &dyn Cdf) -> DistanceReport {
    let ju = u.jump_points();
    let jv = v.jump_points();
    let mut best = (0.0f64, 0.0f64);
    let mut consider = |x: f64| {
        for d in [(u.eval(x) - v.eval(x)).abs(), (u.eval_left(x) - v.eval_left(x)).abs()] {
            if d > best.0 {
                best = (d, x);
            }
        }
    };
    if u.is_step() || v.is_step() {
        // between consecutive jumps one side is constant and the other
        // monotone, so the sup sits at a jump from one side or the other
        for &x in ju.iter().chain(jv.iter()) {
            consider(x);
        }
        return DistanceReport {
            rho: best.0.min(1.0),
            argmax: best.1,
            method: DistanceMethod::JumpPoints { candidates: ju.len() + jv.len() },
        };
    }
    for &x in ju.iter().chain(jv.iter()) {
        consider(x);
    }
    let (a0, b0) = u.effective_range();
    let (a1, b1) = v.effective_range();
    let (lo, hi) = (a0.min(a1), b0.max(b1));
    let mut points = 0;
    let mut grid = |lo: f64, hi: f64, count: usize, best: &mut (f64, f64)| {
        let h = (hi - lo) / (count - 1) as f64;
        for i in 0..count {
            let x = lo + i as f64 * h;
            let d = (u.eval(x) - v.eval(x)).abs();
            if d > best.0 {
                *best = (d, x);
            }
        }
        points += count;
        h
    };
    let mut h = grid(lo, hi, DISTANCE_GRID_POINTS, &mut best);
    for _ in 0..2 {
        let c = best.1;
        h = grid(c - h, c + h, 2001, &mut best);
    }
    DistanceReport { rho: best.0.min(1.0), argmax: best.1, method: DistanceMethod::Grid { points } }
}

/// `∫(1 + x²)|a(x) − b(x)| dx` over the truncation window, with a bound on
/// the weighted mass the window leaves out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedTv {
    pub value: f64,
    pub tail_bound: f64,
    pub window: f64,
}

/// GL20 panels across the truncation window.
pub const TV_PANELS: usize = 2400;

pub fn weighted_total_variation(a: &MixtureCdf, b: &MixtureCdf) -> Result<WeightedTv> {
    if a.zero_mass() > 0.0 || b.zero_mass() > 0.0 {
        return Err(Error::Unsupported("weighted total variation with an atom at r = 0".into()));
    }
    let a = a.compressed(TabulatedCdf::MAX_ATOMS);
    let b = b.compressed(TabulatedCdf::MAX_ATOMS);
    let window = a.effective_range().1.max(b.effective_range().1);
    let rule = GaussLegendre::order20();
    let h = 2.0 * window / TV_PANELS as f64;
    let panels: Vec<f64> = (0..TV_PANELS)
        .into_par_iter()
        .map(|k| {
            let x0 = -window + k as f64 * h;
            rule.integrate(x0, x0 + h, |x| (1.0 + x * x) * (a.density(x) - b.density(x)).abs())
        })
        .collect();
    let tail = |m: &MixtureCdf| -> f64 {
        m.atoms.iter().map(|&(r, w)| w * m.kernel.weighted_tail(window / r, r)).sum()
    };
    Ok(WeightedTv { value: panels.iter().sum(), tail_bound: tail(&a) + tail(&b), window })
}

/// Reference law for [`mean_theta_distance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    /// The typical distribution F.
    Typical,
    /// Standard normal Φ.
    Normal,
    /// The Gaussian mixture G, the law of rZ.
    GaussianMixture,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Typical => "F",
            Target::Normal => "phi",
            Target::GaussianMixture => "G",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "F" => Ok(Target::Typical),
            "phi" | "Phi" => Ok(Target::Normal),
            "G" => Ok(Target::GaussianMixture),
            _ => Err(Error::config(format!("unknown target `{name}` (expected F, phi or G)"))),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Target CDF, tabulated when it is an empirical radial mixture.
pub fn target_cdf(spec: &SystemSpec, target: Target, radial_budget: usize, seed: u64) -> Result<Box<dyn Cdf + Send>> {
    Ok(match target {
        Target::Normal => Box::new(MixtureCdf::standard_normal()),
        Target::Typical => {
            let f = typical_cdf(spec, radial_budget, seed)?;
            if f.atoms().len() == 1 {
                Box::new(f)
            } else {
                Box::new(TabulatedCdf::from_mixture(&f, TabulatedCdf::DEFAULT_POINTS)?)
            }
        }
        Target::GaussianMixture => {
            if spec.has_fixed_norm() {
                Box::new(MixtureCdf::standard_normal())
            } else {
                let g = MixtureCdf::from_radii(&radial_samples(spec, radial_budget, seed)?, Kernel::Gaussian)?;
                Box::new(TabulatedCdf::from_mixture(&g, TabulatedCdf::DEFAULT_POINTS)?)
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budgets {
    pub theta: usize,
    pub per_theta: usize,
    pub radial: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { theta: 64, per_theta: 100_000, radial: 100_000 }
    }
}

/// Distance for one direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaDistance {
    pub index: usize,
    pub rho: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaDistances {
    pub mean: Estimate,
    pub per_theta: Vec<ThetaDistance>,
    /// `≈ 0.87/√N`, the expected distance of an N-sample empirical CDF from
    /// its own law. Not subtracted from the distances.
    pub noise_floor: f64,
    pub budgets: Budgets,
}

/// Seed of the θ-th direction in the cell of dimension n.
pub fn theta_seed(master: u64, n: usize, index: usize) -> u64 {
    derive_seed(master, &[n as u64, index as u64])
}

/// Mean over random directions θ of the Kolmogorov distance between the
/// empirical law of `⟨X, θ⟩` and the target. Direction θ_i and its samples
/// come from [`theta_seed`], so the result is independent of threading.
pub fn mean_theta_distance(spec: &SystemSpec, target: Target, budgets: Budgets, master: u64) -> Result<ThetaDistances> {
    spec.validate()?;
    if budgets.theta < 2 || budgets.per_theta < 2 || budgets.radial == 0 {
        return Err(Error::insufficient(format!(
            "need at least 2 directions and 2 samples per direction, got {} and {}",
            budgets.theta, budgets.per_theta
        )));
    }
    let n = spec.n();
    let cdf = target_cdf(spec, target, budgets.radial, derive_seed(master, &[n as u64, stream::RADIAL]))?;
    let per_theta: Vec<ThetaDistance> = (0..budgets.theta)
        .into_par_iter()
        .map(|index| {
            let seed = theta_seed(master, n, index);
            let theta = sample_direction(n, &mut derived(seed, &[stream::DIRECTION]))?;
            let sums = spec.weighted_sums(&theta, budgets.per_theta, &mut derived(seed, &[stream::SAMPLES]))?;
            let step = StepCdf::from_vec(sums)?;
            Ok(ThetaDistance { index, rho: kolmogorov_distance(&step, cdf.as_ref()).rho, seed })
        })
        .collect::<Result<_>>()?;
    let rhos: Vec<f64> = per_theta.iter().map(|d| d.rho).collect();
    Ok(ThetaDistances {
        mean: mean_se(&rhos),
        per_theta,
        noise_floor: noise_floor(budgets.per_theta),
        budgets,
    })
}

pub fn noise_floor(samples: usize) -> f64 {
    KOLMOGOROV_MEAN / (samples as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::systems::BaseDistribution;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn step_examples() {
        let f = empirical_cdf(&[1.0, 0.0, 1.0]).unwrap();
        assert_eq!(f.eval(-0.1), 0.0);
        assert_abs_diff_eq!(f.eval(0.0), 1.0 / 3.0);
        assert_eq!(f.eval_left(0.0), 0.0);
        assert_abs_diff_eq!(f.eval_left(1.0), 1.0 / 3.0);
        assert_eq!(f.eval(1.0), 1.0);
        let g = empirical_cdf(&[5.0]).unwrap();
        assert_eq!((g.eval(4.999), g.eval(5.0)), (0.0, 1.0));
        assert!(matches!(empirical_cdf(&[]), Err(Error::Domain(_))));
        assert!(matches!(empirical_cdf(&[f64::NAN]), Err(Error::Domain(_))));
    }

    #[test]
    fn empirical_normal_within_critical_value() {
        let n = 100_000;
        let crit = 1.36 / (n as f64).sqrt();
        let phi = MixtureCdf::standard_normal();
        let hits = (0..200)
            .into_par_iter()
            .filter(|&rep| {
                let mut rng = seeded(1000 + rep);
                let draws: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                kolmogorov_distance(&StepCdf::from_vec(draws).unwrap(), &phi).rho <= crit
            })
            .count();
        assert!(hits >= 190, "{hits} of 200 within the 95% critical value");
    }

    #[test]
    fn mixture_examples() {
        let g = gaussian_mixture_cdf(vec![(1.0, 1.0)]).unwrap();
        for x in [-2.0, 0.3, 1.7] {
            assert_eq!(g.eval(x), std_normal_cdf(x));
        }
        let g = gaussian_mixture_cdf(vec![(0.5, 0.5), (1.5, 0.5)]).unwrap();
        assert_abs_diff_eq!(g.eval(0.0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(g.eval(1.0), 0.5 * (0.977_249_868_051_820_8 + 0.747_507_462_453_077_2), epsilon = 1e-12);
        assert!(matches!(gaussian_mixture_cdf(vec![(1.0, 0.7)]), Err(Error::Domain(_))));
        assert!(matches!(gaussian_mixture_cdf(vec![(-1.0, 1.0)]), Err(Error::Domain(_))));

        let z = gaussian_mixture_cdf(vec![(0.0, 0.25), (1.0, 0.75)]).unwrap();
        assert_abs_diff_eq!(z.eval(0.0) - z.eval_left(0.0), 0.25, epsilon = 1e-15);
        assert_eq!(z.jump_points().as_ref(), &[0.0]);
    }

    #[test]
    fn typical_cdf_examples() {
        let trig = SystemSpec::trigonometric(16).unwrap();
        let f = typical_cdf(&trig, 1000, 1).unwrap();
        assert_eq!(f.atoms(), &[(1.0, 1.0)]);
        let law = SphereCoordinateLaw::new(16).unwrap();
        for x in [-3.0, -0.5, 0.2, 2.2] {
            assert_abs_diff_eq!(f.eval(x), law.cdf(x), epsilon = 1e-10);
        }
        let normal = SystemSpec::iid(BaseDistribution::Normal, 64).unwrap();
        let f = typical_cdf(&normal, 5000, 2).unwrap();
        assert_abs_diff_eq!(f.eval(0.0), 0.5, epsilon = 1e-12);
        for spec in [normal, SystemSpec::iid(BaseDistribution::CenteredExponential, 16).unwrap()] {
            let f = typical_cdf(&spec, 3000, 3).unwrap();
            let t = TabulatedCdf::from_mixture(&f, 4097).unwrap();
            let mut prev = 0.0;
            for i in 0..10_000 {
                let x = -12.0 + 24.0 * i as f64 / 9999.0;
                let v = f.eval(x);
                assert!(v >= prev - 1e-15);
                prev = v;
                assert_abs_diff_eq!(t.eval(x), v, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn distance_examples() {
        let phi = MixtureCdf::standard_normal();
        assert_eq!(kolmogorov_distance(&phi, &phi).rho, 0.0);
        let step = empirical_cdf(&[-1.0, 1.0, 2.0]).unwrap();
        assert_eq!(kolmogorov_distance(&step, &step).rho, 0.0);

        let rademacher = empirical_cdf(&[-1.0, 1.0]).unwrap();
        let d = kolmogorov_distance(&rademacher, &phi);
        assert_abs_diff_eq!(d.rho, std_normal_cdf(1.0) - 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(d.argmax.abs(), 1.0);

        // sup |Φ(x) − Φ(x/2)| sits where φ(x) = φ(x/2)/2, i.e. x² = 8 ln 2 / 3
        let wide = gaussian_mixture_cdf(vec![(2.0, 1.0)]).unwrap();
        let d = kolmogorov_distance(&phi, &wide);
        let xs = (8.0 * 2f64.ln() / 3.0).sqrt();
        let exact = std_normal_cdf(xs) - std_normal_cdf(xs / 2.0);
        assert_abs_diff_eq!(d.rho, exact, epsilon = 1e-10);
        assert_abs_diff_eq!(d.argmax.abs(), xs, epsilon = 1e-3);
        let fine = (0..400_001)
            .map(|i| -8.0 + 16.0 * i as f64 / 400_000.0)
            .map(|x| (std_normal_cdf(x) - std_normal_cdf(x / 2.0)).abs())
            .fold(0.0, f64::max);
        assert_abs_diff_eq!(d.rho, fine, epsilon = 1e-9);
    }

    #[test]
    fn distance_is_scale_invariant_and_triangular() {
        let mut rng = seeded(5);
        for _ in 0..20 {
            let a: Vec<f64> = (0..30).map(|_| rng.random_range(-3.0..3.0)).collect();
            let b: Vec<f64> = (0..17).map(|_| rng.random::<f64>() * 2.0).collect();
            let r: f64 = rng.random_range(0.3..3.0);
            let u = empirical_cdf(&a).unwrap();
            let v = empirical_cdf(&b).unwrap();
            let w = gaussian_mixture_cdf(vec![(r, 1.0)]).unwrap();
            let duv = kolmogorov_distance(&u, &v).rho;
            let dvw = kolmogorov_distance(&v, &w).rho;
            let duw = kolmogorov_distance(&u, &w).rho;
            assert!(duw <= duv + dvw + 1e-12);
            let s: f64 = rng.random_range(0.1..10.0);
            let us = empirical_cdf(&a.iter().map(|x| x * s).collect::<Vec<_>>()).unwrap();
            let ws = gaussian_mixture_cdf(vec![(r * s, 1.0)]).unwrap();
            assert_abs_diff_eq!(kolmogorov_distance(&us, &ws).rho, duw, epsilon = 1e-12);
        }
    }

    #[test]
    fn weighted_tv_examples() {
        let phi = MixtureCdf::standard_normal();
        let tv = weighted_total_variation(&phi, &phi).unwrap();
        assert_eq!(tv.value, 0.0);
        assert!(tv.tail_bound < 1e-25);

        let sphere = MixtureCdf::new(vec![(1.0, 1.0)], Kernel::sphere(64).unwrap()).unwrap();
        let tv = weighted_total_variation(&sphere, &phi).unwrap();
        assert!(tv.value > 0.0 && tv.value * 64.0 < 10.0, "{tv:?}");
        let sphere256 = MixtureCdf::new(vec![(1.0, 1.0)], Kernel::sphere(256).unwrap()).unwrap();
        let tv256 = weighted_total_variation(&sphere256, &phi).unwrap();
        assert!((tv.value / tv256.value - 4.0).abs() < 1.0, "{} {}", tv.value, tv256.value);

        let v = |d: f64| {
            let m = gaussian_mixture_cdf(vec![(1.0 - d, 0.5), (1.0 + d, 0.5)]).unwrap();
            weighted_total_variation(&m, &phi).unwrap().value
        };
        let ratio = v(0.1) / v(0.05);
        assert!((2.0..=8.0).contains(&ratio), "{ratio}");

        let zero = gaussian_mixture_cdf(vec![(0.0, 0.5), (1.0, 0.5)]).unwrap();
        assert!(matches!(weighted_total_variation(&zero, &phi), Err(Error::Unsupported(_))));
    }

    #[test]
    fn gaussian_directions_give_pure_noise() {
        let spec = SystemSpec::iid(BaseDistribution::Normal, 12).unwrap();
        let budgets = Budgets { theta: 40, per_theta: 4000, radial: 100 };
        let r = mean_theta_distance(&spec, Target::Normal, budgets, 3).unwrap();
        // the mean of the Kolmogorov law is 0.8687/√N
        assert!((r.mean.value - r.noise_floor).abs() <= 4.0 * r.mean.se, "{:?} {}", r.mean, r.noise_floor);
        assert_eq!(r.per_theta.len(), 40);
        assert!(matches!(
            mean_theta_distance(&spec, Target::Normal, Budgets { theta: 1, ..budgets }, 3),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn theta_distances_are_thread_independent() {
        let spec = SystemSpec::iid(BaseDistribution::Uniform, 16).unwrap();
        let budgets = Budgets { theta: 8, per_theta: 2000, radial: 2000 };
        let a = mean_theta_distance(&spec, Target::GaussianMixture, budgets, 11).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| mean_theta_distance(&spec, Target::GaussianMixture, budgets, 11).unwrap());
        assert_eq!(a, b);
    }
}
