//! Catalog of random vectors X ∈ ℝⁿ and their samplers.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use crate::error::{Error, Result};
use crate::rng::{derived, stream, SimRng};
use crate::sphere_law::Direction;

/// Mean-zero, unit-variance laws for the coordinates of an i.i.d. system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseDistribution {
    Rademacher,
    /// Uniform on (−√3, √3).
    Uniform,
    /// `E − 1` with E standard exponential.
    CenteredExponential,
    Normal,
}

impl BaseDistribution {
    pub const ALL: [BaseDistribution; 4] = [
        BaseDistribution::Rademacher,
        BaseDistribution::Uniform,
        BaseDistribution::CenteredExponential,
        BaseDistribution::Normal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaseDistribution::Rademacher => "rademacher",
            BaseDistribution::Uniform => "uniform",
            BaseDistribution::CenteredExponential => "centered-exponential",
            BaseDistribution::Normal => "normal",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|b| b.name() == name)
            .ok_or_else(|| Error::config(format!("unknown base distribution `{name}`")))
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            BaseDistribution::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            BaseDistribution::Uniform => 3f64.sqrt() * (2.0 * rng.random::<f64>() - 1.0),
            BaseDistribution::CenteredExponential => rng.sample::<f64, _>(Exp1) - 1.0,
            BaseDistribution::Normal => rng.sample(StandardNormal),
        }
    }

    /// E X⁴.
    pub fn fourth_moment(self) -> f64 {
        match self {
            BaseDistribution::Rademacher => 1.0,
            BaseDistribution::Uniform => 9.0 / 5.0,
            BaseDistribution::CenteredExponential => 9.0,
            BaseDistribution::Normal => 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SystemKind {
    Iid(BaseDistribution),
    /// `(√2 cos kω, √2 sin kω)_{k ≤ n/2}` with ω uniform on (−π, π).
    Trigonometric,
    /// Characters `Π_{i∈A_k} ε_i` of m Rademacher signs, stored as bit masks.
    Walsh { m: usize, masks: Vec<u64> },
    /// A uniformly shuffled vector with n/2 entries +1 and n/2 entries −1.
    FixedNormRademacher,
    /// Independent `N(0, λ_i)` coordinates.
    GaussianAnisotropic { eigenvalues: Vec<f64> },
}

/// Law of the random vector X ∈ ℝⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    kind: SystemKind,
    n: usize,
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(n={})", self.id(), self.n)
    }
}

/// The n smallest nonempty subsets of {0..m} in graded-lexicographic order,
/// with m the least integer such that 2^m − 1 ≥ n.
pub fn default_walsh_sets(n: usize) -> (usize, Vec<Vec<usize>>) {
    let mut m = 1;
    while (1usize << m) - 1 < n {
        m += 1;
    }
    let mut sets = Vec::with_capacity(n);
    'outer: for size in 1..=m {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            sets.push(combo.clone());
            if sets.len() == n {
                break 'outer;
            }
            // next combination in lexicographic order
            let mut i = size;
            while i > 0 && combo[i - 1] == m - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            combo[i - 1] += 1;
            for j in i..size {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    (m, sets)
}

impl SystemSpec {
    pub fn iid(base: BaseDistribution, n: usize) -> Result<Self> {
        Self::validated(SystemKind::Iid(base), n)
    }

    pub fn trigonometric(n: usize) -> Result<Self> {
        Self::validated(SystemKind::Trigonometric, n)
    }

    pub fn walsh(n: usize) -> Result<Self> {
        let (m, sets) = default_walsh_sets(n);
        Self::walsh_with_sets(m, &sets)
    }

    /// Walsh system on `{−1,1}^m` with explicit character index sets.
    pub fn walsh_with_sets(m: usize, sets: &[Vec<usize>]) -> Result<Self> {
        if m == 0 || m > 63 {
            return Err(Error::config(format!("Walsh cube dimension m = {m} must lie in 1..=63")));
        }
        let mut masks = Vec::with_capacity(sets.len());
        for set in sets {
            if set.is_empty() {
                return Err(Error::config("Walsh characters must be nonempty index sets"));
            }
            let mut mask = 0u64;
            for &i in set {
                if i >= m {
                    return Err(Error::config(format!("Walsh index {i} outside 0..{m}")));
                }
                mask |= 1 << i;
            }
            masks.push(mask);
        }
        Self::validated(SystemKind::Walsh { m, masks }, sets.len())
    }

    pub fn fixed_norm_rademacher(n: usize) -> Result<Self> {
        Self::validated(SystemKind::FixedNormRademacher, n)
    }

    pub fn gaussian_anisotropic(eigenvalues: Vec<f64>) -> Result<Self> {
        let n = eigenvalues.len();
        Self::validated(SystemKind::GaussianAnisotropic { eigenvalues }, n)
    }

    /// Eigenvalues 3/2 on the first half of the coordinates and 1/2 on the
    /// rest, so that E|X|² = n but X is not isotropic.
    pub fn default_anisotropic(n: usize) -> Result<Self> {
        let eig = (0..n).map(|i| if i < n / 2 { 1.5 } else { 0.5 }).collect();
        Self::gaussian_anisotropic(eig)
    }

    fn validated(kind: SystemKind, n: usize) -> Result<Self> {
        let spec = SystemSpec { kind, n };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n < 2 {
            return Err(Error::config(format!("dimension n = {n} must be at least 2")));
        }
        match &self.kind {
            SystemKind::Trigonometric | SystemKind::FixedNormRademacher if !n.is_multiple_of(2) => {
                Err(Error::config(format!("{} requires even n, got {n}", self.id())))
            }
            SystemKind::Walsh { masks, .. } => {
                let mut sorted = masks.clone();
                sorted.sort_unstable();
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::config("Walsh characters must be distinct"));
                }
                if masks.contains(&0) {
                    return Err(Error::config("Walsh characters must be nonempty index sets"));
                }
                Ok(())
            }
            SystemKind::GaussianAnisotropic { eigenvalues } => {
                if eigenvalues.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
                    return Err(Error::config("anisotropic eigenvalues must be positive and finite"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Built-in system by name, as used on the command line.
    pub fn from_name(name: &str, n: usize) -> Result<Self> {
        match name {
            "trigonometric" | "trig" => Self::trigonometric(n),
            "walsh" => Self::walsh(n),
            "fixed-norm-rademacher" => Self::fixed_norm_rademacher(n),
            "gaussian-anisotropic" => Self::default_anisotropic(n),
            other => match other.strip_prefix("iid-") {
                Some(base) => Self::iid(BaseDistribution::from_name(base)?, n),
                None => Err(Error::config(format!("unknown system `{name}`"))),
            },
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &SystemKind {
        &self.kind
    }

    pub fn id(&self) -> String {
        match &self.kind {
            SystemKind::Iid(b) => format!("iid-{}", b.name()),
            SystemKind::Trigonometric => "trigonometric".into(),
            SystemKind::Walsh { .. } => "walsh".into(),
            SystemKind::FixedNormRademacher => "fixed-norm-rademacher".into(),
            SystemKind::GaussianAnisotropic { .. } => "gaussian-anisotropic".into(),
        }
    }

    /// True when |X|² = n holds for every outcome.
    pub fn has_fixed_norm(&self) -> bool {
        matches!(
            self.kind,
            SystemKind::Iid(BaseDistribution::Rademacher)
                | SystemKind::Trigonometric
                | SystemKind::Walsh { .. }
                | SystemKind::FixedNormRademacher
        )
    }

    /// Gaussian systems admit closed-form L^p norms of every linear form.
    pub fn is_gaussian(&self) -> bool {
        matches!(
            self.kind,
            SystemKind::Iid(BaseDistribution::Normal) | SystemKind::GaussianAnisotropic { .. }
        )
    }

    /// Eigenvalues of the second-moment operator R, known in closed form for
    /// every catalog system.
    pub fn exact_covariance_eigenvalues(&self) -> Vec<f64> {
        let n = self.n;
        match &self.kind {
            SystemKind::GaussianAnisotropic { eigenvalues } => eigenvalues.clone(),
            // E X_i X_j = −1/(n−1) off the diagonal: R = n/(n−1) (I − 11ᵀ/n)
            SystemKind::FixedNormRademacher => {
                let mut e = vec![n as f64 / (n as f64 - 1.0); n];
                e[0] = 0.0;
                e
            }
            _ => vec![1.0; n],
        }
    }

    /// E|X|².
    pub fn expected_sq_norm(&self) -> f64 {
        self.exact_covariance_eigenvalues().iter().sum()
    }

    pub fn is_isotropic(&self) -> bool {
        self.exact_covariance_eigenvalues()
            .iter()
            .all(|&l| (l - 1.0).abs() < 1e-12)
    }

    /// Draw one realization of X into `row`.
    pub fn fill_row<R: Rng + ?Sized>(&self, rng: &mut R, row: &mut [f64]) {
        debug_assert_eq!(row.len(), self.n);
        match &self.kind {
            SystemKind::Iid(base) => row.iter_mut().for_each(|x| *x = base.sample(rng)),
            SystemKind::Trigonometric => {
                let omega = rng.random_range(-PI..PI);
                let (s1, c1) = omega.sin_cos();
                let (mut c, mut s) = (c1, s1);
                for pair in row.chunks_exact_mut(2) {
                    pair[0] = SQRT_2 * c;
                    pair[1] = SQRT_2 * s;
                    (c, s) = (c * c1 - s * s1, s * c1 + c * s1);
                }
            }
            SystemKind::Walsh { m, masks } => {
                let bits = rng.random::<u64>() & ((1u64 << m) - 1);
                for (x, mask) in row.iter_mut().zip(masks) {
                    *x = if (bits & mask).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
                }
            }
            SystemKind::FixedNormRademacher => {
                let half = self.n / 2;
                for (i, x) in row.iter_mut().enumerate() {
                    *x = if i < half { 1.0 } else { -1.0 };
                }
                row.shuffle(rng);
            }
            SystemKind::GaussianAnisotropic { eigenvalues } => {
                for (x, l) in row.iter_mut().zip(eigenvalues) {
                    *x = l.sqrt() * rng.sample::<f64, _>(StandardNormal);
                }
            }
        }
    }

    /// `count` samples of `⟨X, θ⟩`, generated row by row without storing X.
    pub fn weighted_sums(&self, theta: &Direction, count: usize, rng: &mut SimRng) -> Result<Vec<f64>> {
        self.check_dim(theta)?;
        let mut row = vec![0.0; self.n];
        Ok((0..count)
            .map(|_| {
                self.fill_row(rng, &mut row);
                dot(&row, theta.coords())
            })
            .collect())
    }

    /// `count` samples of |X|.
    pub fn norms(&self, count: usize, rng: &mut SimRng) -> Vec<f64> {
        let mut row = vec![0.0; self.n];
        (0..count)
            .map(|_| {
                if self.has_fixed_norm() {
                    // still consume the stream so seeds stay aligned across systems
                    self.fill_row(rng, &mut row);
                    (self.n as f64).sqrt()
                } else {
                    self.fill_row(rng, &mut row);
                    dot(&row, &row).sqrt()
                }
            })
            .collect()
    }

    fn check_dim(&self, theta: &Direction) -> Result<()> {
        if theta.dim() != self.n {
            return Err(Error::domain(format!(
                "direction has dimension {}, system has n = {}",
                theta.dim(),
                self.n
            )));
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Rows of X, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    n: usize,
    rows: usize,
    data: Vec<f64>,
    seed: u64,
}

impl SampleBatch {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Rows generated per shard; each shard has its own derived seed.
pub const SHARD_ROWS: usize = 4096;

/// `count` i.i.d. rows from the law of X. Shards are generated in parallel
/// from `hash(seed, shard index)`, so the batch does not depend on threading.
pub fn sample_vector(spec: &SystemSpec, count: usize, seed: u64) -> Result<SampleBatch> {
    spec.validate()?;
    if count == 0 {
        return Err(Error::domain("sample count must be positive"));
    }
    let n = spec.n;
    let mut data = vec![0.0; count * n];
    data.par_chunks_mut(SHARD_ROWS * n)
        .enumerate()
        .for_each(|(shard, chunk)| {
            let mut rng = derived(seed, &[stream::SHARD, shard as u64]);
            for row in chunk.chunks_exact_mut(n) {
                spec.fill_row(&mut rng, row);
            }
        });
    Ok(SampleBatch { n, rows: count, data, seed })
}

/// `count` scalar draws `f(rng, scratch)`, generated shard by shard in
/// parallel with per-shard seeds, returned in shard order.
pub fn sharded_draws<T, F>(count: usize, seed: u64, scratch_len: usize, f: F) -> Vec<T>
where
    T: Copy + Default + Send,
    F: Fn(&mut SimRng, &mut [f64]) -> T + Sync,
{
    let mut out = vec![T::default(); count];
    out.par_chunks_mut(SHARD_ROWS)
        .enumerate()
        .for_each(|(shard, chunk)| {
            let mut rng = derived(seed, &[stream::SHARD, shard as u64]);
            let mut scratch = vec![0.0; scratch_len];
            for v in chunk.iter_mut() {
                *v = f(&mut rng, &mut scratch);
            }
        });
    out
}

/// Row-wise `⟨X_i, θ⟩`.
pub fn weighted_sum(batch: &SampleBatch, theta: &Direction) -> Result<Vec<f64>> {
    if theta.dim() != batch.n {
        return Err(Error::domain(format!(
            "direction has dimension {}, batch has n = {}",
            theta.dim(),
            batch.n
        )));
    }
    Ok(batch.iter_rows().map(|r| dot(r, theta.coords())).collect())
}

/// Spectral summary of the second-moment operator `E X Xᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceSummary {
    /// `max λ_i = M_2²`.
    pub max_eigenvalue: f64,
    /// `Σ λ_i = E|X|²`.
    pub trace: f64,
    /// `Σ λ_i² / n = m_2²`.
    pub mean_square_eigenvalue: f64,
    /// True when taken from the spec rather than estimated.
    pub exact: bool,
    /// Row-major n×n matrix; empty when `exact`.
    pub matrix: Vec<f64>,
    pub budget: usize,
}

impl CovarianceSummary {
    fn from_eigenvalues(eig: &[f64], exact: bool, matrix: Vec<f64>, budget: usize) -> Self {
        let n = eig.len() as f64;
        CovarianceSummary {
            max_eigenvalue: eig.iter().cloned().fold(f64::MIN, f64::max),
            trace: eig.iter().sum(),
            mean_square_eigenvalue: eig.iter().map(|l| l * l).sum::<f64>() / n,
            exact,
            matrix,
            budget,
        }
    }
}

/// Exact for anisotropic Gaussians; otherwise the eigenvalues of the
/// empirical second-moment matrix over `budget` rows.
pub fn covariance_summary(spec: &SystemSpec, budget: usize, seed: u64) -> Result<CovarianceSummary> {
    if let SystemKind::GaussianAnisotropic { eigenvalues } = &spec.kind {
        return Ok(CovarianceSummary::from_eigenvalues(eigenvalues, true, Vec::new(), 0));
    }
    let n = spec.n;
    if budget < n {
        return Err(Error::insufficient(format!(
            "covariance needs at least n = {n} rows, budget is {budget}"
        )));
    }
    let batch = sample_vector(spec, budget, seed)?;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for row in batch.iter_rows() {
        for i in 0..n {
            let xi = row[i];
            for j in i..n {
                m[(i, j)] += xi * row[j];
            }
        }
    }
    for i in 0..n {
        for j in i..n {
            let v = m[(i, j)] / budget as f64;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    let eig = SymmetricEigen::new(m.clone()).eigenvalues;
    let matrix = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| m[(i, j)]).collect();
    Ok(CovarianceSummary::from_eigenvalues(eig.as_slice(), false, matrix, budget))
}

/// Systems exercised by the verification suites.
pub fn builtin_catalog() -> Vec<SystemSpec> {
    let n = 64;
    let mut out: Vec<SystemSpec> = BaseDistribution::ALL
        .into_iter()
        .map(|b| SystemSpec::iid(b, n).unwrap())
        .collect();
    out.push(SystemSpec::trigonometric(n).unwrap());
    out.push(SystemSpec::walsh(63).unwrap());
    out.push(SystemSpec::fixed_norm_rademacher(n).unwrap());
    out.push(SystemSpec::default_anisotropic(n).unwrap());
    out
}
