//! The first coordinate of a uniform point on the sphere S^{n-1}.
//!
//! `Z_n = √n·θ_1` has density `c'_n (1 − x²/n)_+^{(n−3)/2}` on `[−√n, √n]`.
//! Everything that integrates this density goes through the substitution
//! `x = √n cos φ`, under which the integrand becomes `c_n sin^{n−2} φ` and is
//! smooth on `[0, π]` for every n ≥ 2, including the endpoint singularity of n = 2.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use libm::lgamma as ln_gamma;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::quadrature::{adaptive, GaussLegendre};
use crate::report::{BoundCheck, BoundCheckReport};
use crate::stats::std_normal_pdf;

/// Absolute tolerance of the CDF quadrature.
pub const CDF_TOLERANCE: f64 = 1e-12;
/// Convergence tolerance of the characteristic-function quadrature.
pub const CHARFN_TOLERANCE: f64 = 1e-9;
/// Angles with `(n−2)·ln sin φ < −CUTOFF_LOG` carry no visible mass.
const CUTOFF_LOG: f64 = 50.0;

/// `c'_n = Γ(n/2) / (√(πn) Γ((n−1)/2))`.
pub fn norm_const(n: usize) -> Result<f64> {
    Ok(log_norm_const(n)?.exp())
}

fn log_norm_const(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain(format!("sphere dimension n = {n} must be at least 2")));
    }
    let nf = n as f64;
    Ok(ln_gamma(0.5 * nf) - ln_gamma(0.5 * (nf - 1.0)) - 0.5 * (PI * nf).ln())
}

/// Law of `Z_n = √n θ_1` for θ uniform on `S^{n−1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereCoordinateLaw {
    n: usize,
    log_norm_const: f64,
}

impl SphereCoordinateLaw {
    pub fn new(n: usize) -> Result<Self> {
        Ok(SphereCoordinateLaw {
            n,
            log_norm_const: log_norm_const(n)?,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Natural log of `c'_n`.
    pub fn log_norm_const(&self) -> f64 {
        self.log_norm_const
    }

    pub fn norm_const(&self) -> f64 {
        self.log_norm_const.exp()
    }

    /// Half-width `√n` of the support.
    pub fn support(&self) -> f64 {
        (self.n as f64).sqrt()
    }

    /// ln c_n, the constant of the angular integrand `c_n sin^{n−2} φ`.
    fn log_angular_const(&self) -> f64 {
        self.log_norm_const + 0.5 * (self.n as f64).ln()
    }

    fn angular_weight(&self, phi: f64) -> f64 {
        if self.n == 2 {
            return self.log_angular_const().exp();
        }
        let s = phi.sin();
        if s <= 0.0 {
            return 0.0;
        }
        (self.log_angular_const() + (self.n as f64 - 2.0) * s.ln()).exp()
    }

    /// Smallest angle worth integrating from; below it the weight is < e^{−50}.
    fn angular_cutoff(&self) -> f64 {
        if self.n <= 2 {
            return 0.0;
        }
        (-CUTOFF_LOG / (self.n as f64 - 2.0)).exp().asin()
    }

    /// Density φ_n(x), evaluated in log space. Returns +∞ at x = ±√2 for n = 2.
    pub fn density(&self, x: f64) -> f64 {
        let nf = self.n as f64;
        let u = x.abs();
        let s = self.support();
        if u > s || (u == s && self.n > 3) {
            return 0.0;
        }
        if self.n == 3 {
            return self.norm_const();
        }
        if u == s {
            // n = 2 at the endpoint of the support
            return f64::INFINITY;
        }
        let ratio = u * u / nf;
        (self.log_norm_const + 0.5 * (nf - 3.0) * (-ratio).ln_1p()).exp()
    }

    /// `P{Z_n > u}` for u ≥ 0, as `c_n ∫_0^{acos(u/√n)} sin^{n−2} φ dφ`.
    fn upper_tail(&self, u: f64) -> f64 {
        let s = self.support();
        if u >= s {
            return 0.0;
        }
        let phi0 = (u / s).acos();
        if self.n == 2 {
            return phi0 / PI;
        }
        let lo = self.angular_cutoff().min(phi0);
        match adaptive(|p| self.angular_weight(p), lo, phi0, CDF_TOLERANCE, 0.0) {
            Ok(q) => q.value.clamp(0.0, 0.5),
            // smooth integrand; fall back to a fine fixed rule rather than fail
            Err(_) => GaussLegendre::order20()
                .composite(lo, phi0, 256, |p| self.angular_weight(p))
                .clamp(0.0, 0.5),
        }
    }

    /// Distribution function Φ_n(x). Symmetric by construction:
    /// `cdf(x) + cdf(−x) == 1` holds exactly in floating point.
    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x == 0.0 {
            return 0.5;
        }
        let upper = 1.0 - self.upper_tail(x.abs());
        if x > 0.0 {
            upper
        } else {
            // exact by Sterbenz since upper ∈ [1/2, 1]
            1.0 - upper
        }
    }

    /// `J_n(t) = E e^{itθ_1}`; the characteristic function of `Z_n` is `J_n(t√n)`.
    ///
    /// Quadrature of `2 c_n ∫_{φ_lo}^{π/2} cos(t cos φ) sin^{n−2} φ dφ` with
    /// Gauss-Legendre panels proportional to the number of oscillations, doubled
    /// until two successive panel counts agree to `CHARFN_TOLERANCE`.
    pub fn charfn_jn(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(1.0);
        }
        self.angular_transform(t.abs(), |arg, _| arg.cos())
    }

    /// Derivative `J_n'(t) = −E θ_1 sin(tθ_1)`.
    pub fn charfn_jn_derivative(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        let d = self.angular_transform(t.abs(), |arg, c| -c * arg.sin())?;
        Ok(if t < 0.0 { -d } else { d })
    }

    fn angular_transform<K>(&self, t: f64, kernel: K) -> Result<f64>
    where
        K: Fn(f64, f64) -> f64,
    {
        let lo = self.angular_cutoff();
        let xmax = lo.cos();
        let rule = GaussLegendre::order20();
        let integrand = |p: f64| {
            let c = p.cos();
            kernel(t * c, c) * self.angular_weight(p)
        };
        let mut panels = 4 + (t * xmax / PI).ceil() as usize;
        let mut prev = 2.0 * rule.composite(lo, FRAC_PI_2, panels, integrand);
        for _ in 0..8 {
            panels *= 2;
            let next = 2.0 * rule.composite(lo, FRAC_PI_2, panels, integrand);
            if (next - prev).abs() <= CHARFN_TOLERANCE {
                return Ok(next);
            }
            prev = next;
        }
        Err(Error::Numeric {
            kernel: "charfn_jn",
            detail: format!(
                "n = {}, t = {t}: quadrature did not converge to {CHARFN_TOLERANCE:e} with {panels} panels (last value {prev:e})",
                self.n
            ),
        })
    }
}

/// A unit vector θ ∈ S^{n−1}.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    coords: Vec<f64>,
}

impl Direction {
    /// Normalizes `coords`; fails on the zero vector.
    pub fn from_unnormalized(mut coords: Vec<f64>) -> Result<Self> {
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::domain("cannot normalize a zero or non-finite vector"));
        }
        coords.iter_mut().for_each(|c| *c /= norm);
        Ok(Direction { coords })
    }

    /// Accepts a vector that is already of unit length (to within 1e−12).
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let sq: f64 = coords.iter().map(|c| c * c).sum();
        if (sq - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("|θ|² = {sq} is not 1")));
        }
        Ok(Direction { coords })
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut coords = vec![0.0; n];
        coords[i] = 1.0;
        Direction { coords }
    }

    /// (1/√n, …, 1/√n)
    pub fn equal_weights(n: usize) -> Self {
        Direction {
            coords: vec![1.0 / (n as f64).sqrt(); n],
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Uniform direction on S^{n−1} by normalizing a standard Gaussian vector.
pub fn sample_direction<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Direction> {
    if n < 2 {
        return Err(Error::domain(format!("sphere dimension n = {n} must be at least 2")));
    }
    loop {
        let g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        if let Ok(d) = Direction::from_unnormalized(g) {
            return Ok(d);
        }
    }
}

/// `J_n` tabulated on `[0, s_max]` with cubic Hermite interpolation.
/// Used where `J_n` is needed at very many arguments (radial averages).
#[derive(Debug, Clone)]
pub struct JnTable {
    law: SphereCoordinateLaw,
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl JnTable {
    pub const DEFAULT_STEP: f64 = 0.1;

    pub fn new(law: SphereCoordinateLaw, s_max: f64, step: f64) -> Result<Self> {
        let len = (s_max / step).ceil() as usize + 2;
        let rows: Result<Vec<(f64, f64)>> = (0..len)
            .into_par_iter()
            .map(|i| {
                let s = i as f64 * step;
                Ok((law.charfn_jn(s)?, law.charfn_jn_derivative(s)?))
            })
            .collect();
        let (values, slopes) = rows?.into_iter().unzip();
        Ok(JnTable { law, step, values, slopes })
    }

    pub fn law(&self) -> &SphereCoordinateLaw {
        &self.law
    }

    pub fn s_max(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.step
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        let s = s.abs();
        let pos = s / self.step;
        let i = pos.floor() as usize;
        if i + 1 >= self.values.len() {
            return self.law.charfn_jn(s);
        }
        Ok(hermite(
            pos - i as f64,
            self.step,
            self.values[i],
            self.values[i + 1],
            self.slopes[i],
            self.slopes[i + 1],
        ))
    }
}

/// Cubic Hermite interpolation on one interval of width `h`, `u ∈ [0, 1]`.
pub(crate) fn hermite(u: f64, h: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> f64 {
    let u2 = u * u;
    let u3 = u2 * u;
    (2.0 * u3 - 3.0 * u2 + 1.0) * y0
        + (u3 - 2.0 * u2 + u) * h * d0
        + (-2.0 * u3 + 3.0 * u2) * y1
        + (u3 - u2) * h * d1
}

/// Φ_n tabulated in the angle `φ_0 = acos(|x|/√n)`, where the tail
/// `c_n ∫_0^{φ_0} sin^{n−2}` is smooth; interpolation error is far below 1e−10.
#[derive(Debug, Clone)]
pub struct SphereCdfTable {
    law: SphereCoordinateLaw,
    step: f64,
    tails: Vec<f64>,
}

impl SphereCdfTable {
    pub fn new(law: SphereCoordinateLaw) -> Self {
        const INTERVALS: usize = 4096;
        let step = FRAC_PI_2 / INTERVALS as f64;
        let rule = GaussLegendre::order20();
        let mut tails = Vec::with_capacity(INTERVALS + 1);
        let mut acc = 0.0;
        tails.push(0.0);
        for k in 0..INTERVALS {
            let a = k as f64 * step;
            acc += rule.integrate(a, a + step, |p| law.angular_weight(p));
            tails.push(acc);
        }
        // anchor the φ_0 = π/2 end at exactly one half
        let total = tails[INTERVALS];
        if law.n > 2 {
            for t in tails.iter_mut() {
                *t *= 0.5 / total;
            }
        }
        SphereCdfTable { law, step, tails }
    }

    pub fn law(&self) -> &SphereCoordinateLaw {
        &self.law
    }

    fn upper_tail(&self, u: f64) -> f64 {
        let s = self.law.support();
        if u >= s {
            return 0.0;
        }
        let phi0 = (u / s).acos();
        let pos = phi0 / self.step;
        let i = (pos.floor() as usize).min(self.tails.len() - 2);
        let a = i as f64 * self.step;
        hermite(
            pos - i as f64,
            self.step,
            self.tails[i],
            self.tails[i + 1],
            self.law.angular_weight(a),
            self.law.angular_weight(a + self.step),
        )
        .clamp(0.0, 0.5)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.5;
        }
        let upper = 1.0 - self.upper_tail(x.abs());
        if x > 0.0 {
            upper
        } else {
            1.0 - upper
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        self.law.density(x)
    }
}

/// Per-dimension result of [`gap_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct GapRow {
    pub n: usize,
    /// `sup_x |φ_n(x) − φ(x)| e^{x²/8}` and its location; `None` for n < 3.
    pub density_gap: Option<(f64, f64)>,
    /// `sup_t |J_n(t√n) − e^{−t²/2}|` over `t ∈ [0, 3√n]` and its location.
    pub charfn_gap: (f64, f64),
    /// Smallest value of `4.1 e^{−t²/2} + 4 e^{−n/12} − |J_n(t√n)|` over the grid.
    pub envelope_margin: (f64, f64),
    /// Grid points where the envelope margin is below `−ENVELOPE_TOLERANCE`.
    pub envelope_violations: usize,
}

impl GapRow {
    pub fn scaled_density_gap(&self) -> Option<f64> {
        self.density_gap.map(|(d, _)| d * self.n as f64)
    }

    pub fn scaled_charfn_gap(&self) -> f64 {
        self.charfn_gap.0 * self.n as f64
    }
}

/// Sampling grids for [`gap_report`].
#[derive(Debug, Clone, Copy)]
pub struct GapGrid {
    pub x_points: usize,
    pub t_points: usize,
}

impl Default for GapGrid {
    fn default() -> Self {
        GapGrid { x_points: 4096, t_points: 2048 }
    }
}

/// Quadrature error allowed when testing the Gaussian envelope of J_n.
pub const ENVELOPE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub rows: Vec<GapRow>,
}

impl GapReport {
    pub fn row(&self, n: usize) -> Option<&GapRow> {
        self.rows.iter().find(|r| r.n == n)
    }

    /// Pass/fail rows: the envelope check at every n, and boundedness of
    /// `n·D_n`, `n·K_n` within a factor 4 of their value at `reference_n`.
    pub fn to_checks(&self, reference_n: usize) -> BoundCheckReport {
        let mut out = BoundCheckReport::new();
        for row in &self.rows {
            out.push(BoundCheck {
                check: "charfn-envelope".into(),
                anchor: "|J_n(t sqrt n)| <= 4.1 exp(-t^2/2) + 4 exp(-n/12)".into(),
                spec: "sphere".into(),
                n: row.n,
                param: Some(("t", row.envelope_margin.1)),
                lhs: -row.envelope_margin.0,
                rhs: 0.0,
                slack: ENVELOPE_TOLERANCE,
                budget: 0,
                seed: 0,
            });
        }
        if let Some(reference) = self.row(reference_n) {
            let ref_d = reference.scaled_density_gap();
            let ref_k = reference.scaled_charfn_gap();
            for row in &self.rows {
                if let (Some(d), Some(rd)) = (row.scaled_density_gap(), ref_d) {
                    out.push(BoundCheck {
                        check: "density-gap-rate".into(),
                        anchor: "n sup |phi_n - phi| e^{x^2/8} within factor 4 of reference n".into(),
                        spec: "sphere".into(),
                        n: row.n,
                        param: Some(("x", row.density_gap.unwrap().1)),
                        lhs: (d / rd).max(rd / d),
                        rhs: 4.0,
                        slack: 0.0,
                        budget: 0,
                        seed: 0,
                    });
                }
                let k = row.scaled_charfn_gap();
                out.push(BoundCheck {
                    check: "charfn-gap-rate".into(),
                    anchor: "n sup |J_n(t sqrt n) - exp(-t^2/2)| within factor 4 of reference n".into(),
                    spec: "sphere".into(),
                    n: row.n,
                    param: Some(("t", row.charfn_gap.1)),
                    lhs: (k / ref_k).max(ref_k / k),
                    rhs: 4.0,
                    slack: 0.0,
                    budget: 0,
                    seed: 0,
                });
            }
        }
        out
    }
}

/// Density gap, characteristic-function gap and Gaussian envelope of `J_n`
/// over each dimension in `dims`.
pub fn gap_report(dims: &[usize], grid: GapGrid) -> Result<GapReport> {
    let rows: Result<Vec<GapRow>> = dims.par_iter().map(|&n| gap_row(n, grid)).collect();
    Ok(GapReport { rows: rows? })
}

fn gap_row(n: usize, grid: GapGrid) -> Result<GapRow> {
    let law = SphereCoordinateLaw::new(n)?;
    let root = law.support();

    let density_gap = if n >= 3 {
        // x ∈ [0, √n] by symmetry, plus points accumulating at the endpoint
        let mut xs: Vec<f64> = (0..grid.x_points)
            .map(|i| root * i as f64 / (grid.x_points - 1) as f64)
            .collect();
        xs.extend((1..=30).map(|k| root * (1.0 - 0.5f64.powi(k))));
        let best = xs
            .iter()
            .map(|&x| {
                let gap = (law.density(x) - std_normal_pdf(x)).abs() * (x * x / 8.0).exp();
                (gap, x)
            })
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .unwrap();
        Some(best)
    } else {
        None
    };

    let t_max = 3.0 * root;
    let ts: Vec<f64> = (0..grid.t_points)
        .map(|i| t_max * i as f64 / (grid.t_points - 1) as f64)
        .collect();
    let values: Result<Vec<(f64, f64)>> = ts
        .par_iter()
        .map(|&t| Ok((t, law.charfn_jn(t * root)?)))
        .collect();
    let values = values?;
    let tail = 4.0 * (-(n as f64) / 12.0).exp();
    let mut charfn_gap = (0.0, 0.0);
    let mut envelope_margin = (f64::INFINITY, 0.0);
    let mut envelope_violations = 0;
    for &(t, j) in &values {
        let g = (-0.5 * t * t).exp();
        let gap = (j - g).abs();
        if gap > charfn_gap.0 {
            charfn_gap = (gap, t);
        }
        let margin = 4.1 * g + tail - j.abs();
        if margin < envelope_margin.0 {
            envelope_margin = (margin, t);
        }
        if margin < -ENVELOPE_TOLERANCE {
            envelope_violations += 1;
        }
    }
    Ok(GapRow {
        n,
        density_gap,
        charfn_gap,
        envelope_margin,
        envelope_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use crate::rng::seeded;

    #[test]
    fn norm_const_values() {
        assert_abs_diff_eq!(norm_const(3).unwrap(), 1.0 / (2.0 * 3f64.sqrt()), epsilon = 1e-14);
        let limit = 1.0 / (2.0 * PI).sqrt();
        assert!((norm_const(1000).unwrap() - limit).abs() < 0.01);
        for n in 2..=1024 {
            assert!(norm_const(n).unwrap() < limit, "n = {n}");
        }
        assert!(matches!(norm_const(1), Err(Error::Domain(_))));
        assert!(matches!(SphereCoordinateLaw::new(0), Err(Error::Domain(_))));
    }

    #[test]
    fn norm_const_increases_to_limit() {
        let mut prev = 0.0;
        for n in 2..=512 {
            let c = norm_const(n).unwrap();
            assert!(c > prev);
            prev = c;
        }
    }

    #[test]
    fn density_examples() {
        let law3 = SphereCoordinateLaw::new(3).unwrap();
        assert_abs_diff_eq!(law3.density(0.5), 1.0 / (2.0 * 3f64.sqrt()), epsilon = 1e-14);
        assert_eq!(law3.density(2.0), 0.0);
        let law100 = SphereCoordinateLaw::new(100).unwrap();
        assert_eq!(law100.density(0.0), norm_const(100).unwrap());
        let law5 = SphereCoordinateLaw::new(5).unwrap();
        assert_eq!(law5.density(5f64.sqrt()), 0.0);
        assert_eq!(law5.density(-7.0), 0.0);
        let law2 = SphereCoordinateLaw::new(2).unwrap();
        assert!(law2.density(2f64.sqrt()).is_infinite());
        for &x in &[0.1, 1.3, 2.7, 9.9] {
            assert_eq!(law100.density(x), law100.density(-x));
        }
    }

    #[test]
    fn cdf_examples() {
        let law3 = SphereCoordinateLaw::new(3).unwrap();
        assert_eq!(law3.cdf(0.0), 0.5);
        assert_abs_diff_eq!(law3.cdf(1.0), 0.5 * (1.0 + 1.0 / 3f64.sqrt()), epsilon = 1e-11);
        let law50 = SphereCoordinateLaw::new(50).unwrap();
        assert_eq!(law50.cdf(10.0), 1.0);
        assert_eq!(law50.cdf(-10.0), 0.0);
        // n = 2: arcsine law of √2 cos φ
        let law2 = SphereCoordinateLaw::new(2).unwrap();
        assert_abs_diff_eq!(law2.cdf(1.0), 1.0 - (1.0 / 2f64.sqrt()).acos() / PI, epsilon = 1e-14);
    }

    #[test]
    fn cdf_is_exactly_symmetric() {
        for n in [2, 3, 4, 7, 64, 1000] {
            let law = SphereCoordinateLaw::new(n).unwrap();
            for i in 0..200 {
                let x = -3.0 + 0.0371 * i as f64;
                assert_eq!(law.cdf(x) + law.cdf(-x), 1.0, "n = {n}, x = {x}");
            }
        }
    }

    #[test]
    fn cdf_matches_density_quadrature_in_x() {
        for n in [4, 9, 64, 300] {
            let law = SphereCoordinateLaw::new(n).unwrap();
            let root = law.support();
            for &x in &[-1.7f64, -0.2, 0.4, 1.1, 2.5] {
                let x = x.max(-root);
                let q = adaptive(|y| law.density(y), -root, x, 1e-13, 0.0).unwrap();
                assert_abs_diff_eq!(law.cdf(x), q.value, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn charfn_examples() {
        let law3 = SphereCoordinateLaw::new(3).unwrap();
        assert_eq!(law3.charfn_jn(0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(law3.charfn_jn(2.0).unwrap(), 2f64.sin() / 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(law3.charfn_jn(-35.0).unwrap(), 35f64.sin() / 35.0, epsilon = 1e-10);
        let law64 = SphereCoordinateLaw::new(64).unwrap();
        let j = law64.charfn_jn(8.0).unwrap();
        assert!((j - (-0.5f64).exp()).abs() < 1.0 / 64.0);
        assert_eq!(law64.charfn_jn(3.3).unwrap(), law64.charfn_jn(-3.3).unwrap());
    }

    #[test]
    fn charfn_derivative_matches_finite_difference() {
        let law = SphereCoordinateLaw::new(10).unwrap();
        for &t in &[0.3, 2.0, 7.5] {
            let h = 1e-5;
            let fd = (law.charfn_jn(t + h).unwrap() - law.charfn_jn(t - h).unwrap()) / (2.0 * h);
            assert_abs_diff_eq!(law.charfn_jn_derivative(t).unwrap(), fd, epsilon = 1e-7);
        }
    }

    #[test]
    fn direction_sampler() {
        let mut rng = seeded(5);
        for _ in 0..100 {
            let d = sample_direction(17, &mut rng).unwrap();
            let sq: f64 = d.coords().iter().map(|c| c * c).sum();
            assert!((sq - 1.0).abs() <= 1e-12);
        }
        assert!(sample_direction(1, &mut rng).is_err());
        let a = sample_direction(8, &mut seeded(9)).unwrap();
        let b = sample_direction(8, &mut seeded(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn direction_first_coordinate_moments() {
        let mut rng = seeded(11);
        let draws = 100_000;
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..draws {
            let d = sample_direction(8, &mut rng).unwrap();
            s1 += d.coords()[0];
            s2 += d.coords()[0] * d.coords()[0];
        }
        let m1 = s1 / draws as f64;
        let m2 = s2 / draws as f64;
        assert!(m1.abs() <= 3.0 / (8.0 * draws as f64).sqrt());
        assert!((m2 / 0.125 - 1.0).abs() < 0.05);
    }

    #[test]
    fn tables_match_direct_evaluation() {
        for n in [2, 3, 5, 64, 700] {
            let law = SphereCoordinateLaw::new(n).unwrap();
            let table = SphereCdfTable::new(law);
            for i in 0..97 {
                let x = -law.support() - 0.1 + i as f64 * (2.0 * law.support() + 0.2) / 96.0;
                assert_abs_diff_eq!(table.cdf(x), law.cdf(x), epsilon = 2e-11);
            }
        }
        let law = SphereCoordinateLaw::new(16).unwrap();
        let jt = JnTable::new(law, 40.0, JnTable::DEFAULT_STEP).unwrap();
        for i in 0..300 {
            let s = 0.137 * i as f64;
            // cubic Hermite at step 0.1: error O(h⁴ max|J⁗|/384)
            assert_abs_diff_eq!(jt.eval(s).unwrap(), law.charfn_jn(s).unwrap(), epsilon = 1e-8);
        }
    }

    #[test]
    fn gap_report_small() {
        let report = gap_report(&[2, 3, 16], GapGrid { x_points: 512, t_points: 256 }).unwrap();
        let r2 = report.row(2).unwrap();
        assert!(r2.density_gap.is_none());
        assert_eq!(r2.envelope_violations, 0);
        let r3 = report.row(3).unwrap();
        // uniform density vs Gaussian, evaluated directly at the grid maximizer
        let (d, x) = r3.density_gap.unwrap();
        let direct = (1.0 / (2.0 * 3f64.sqrt()) * f64::from(x * x <= 3.0) - std_normal_pdf(x)).abs()
            * (x * x / 8.0).exp();
        assert_abs_diff_eq!(d, direct, epsilon = 1e-12);
        assert!(d.is_finite());
        assert!(report.rows.iter().all(|r| r.envelope_violations == 0));
    }
}
