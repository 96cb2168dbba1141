//! Design matrices, sparse signals, noise and outlier generators, plus the
//! matrix qualifiers used to reason about greedy recovery.

use itertools::Itertools;
use nalgebra::SymmetricEigen;
use rand::seq::index::sample;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::linops::{select_columns, IncrementalLs};
use crate::rng::{rng_from_seed, Rng};
use crate::{Error, Matrix, Result, Vector};

/// Largest number of subsets the brute-force routines will enumerate.
pub const ENUMERATION_LIMIT: u128 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DesignKind {
    /// `[I_n, H_n/√n]` with `H_n` the Sylvester Hadamard matrix.
    HadamardIdentity,
    Gaussian,
    /// Gaussian rows with Toeplitz covariance `ρ^{|i−j|}`.
    Correlated { rho: f64 },
}

/// An `n × p` design with unit-norm columns.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    entries: Matrix,
    kind: DesignKind,
    seed: Option<u64>,
}

impl DesignMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.entries
    }

    pub fn into_matrix(self) -> Matrix {
        self.entries
    }

    pub fn kind(&self) -> DesignKind {
        self.kind
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn p(&self) -> usize {
        self.entries.ncols()
    }
}

impl AsRef<Matrix> for DesignMatrix {
    fn as_ref(&self) -> &Matrix {
        &self.entries
    }
}

fn normalize_columns(x: &mut Matrix) {
    for mut col in x.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= norm;
        }
    }
}

fn standard_normal_matrix(n: usize, p: usize, rng: &mut Rng) -> Matrix {
    Matrix::from_fn(n, p, |_, _| StandardNormal.sample(rng))
}

/// `[I_n, H_n/√n]`, an `n × 2n` dictionary with coherence `1/√n`.
pub fn hadamard_dictionary(n: usize) -> Result<DesignMatrix> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidDimension(format!("hadamard size {n} is not a power of two ≥ 2")));
    }
    let scale = 1.0 / (n as f64).sqrt();
    let entries = Matrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            if i == j { 1.0 } else { 0.0 }
        } else if ((i & (j - n)).count_ones() & 1) == 0 {
            scale
        } else {
            -scale
        }
    });
    Ok(DesignMatrix { entries, kind: DesignKind::HadamardIdentity, seed: None })
}

/// I.i.d. `N(0,1)` entries with columns normalized to unit norm.
pub fn gaussian_design(n: usize, p: usize, seed: u64) -> Result<DesignMatrix> {
    if n < 2 || p < 1 {
        return Err(Error::InvalidDimension(format!("gaussian design needs n ≥ 2, p ≥ 1 (got {n}×{p})")));
    }
    let mut rng = rng_from_seed(seed);
    let mut entries = standard_normal_matrix(n, p, &mut rng);
    normalize_columns(&mut entries);
    Ok(DesignMatrix { entries, kind: DesignKind::Gaussian, seed: Some(seed) })
}

/// Gaussian design whose columns have population correlation `ρ^{|i−j|}`
/// before renormalization: `X = G Lᵀ` with `LLᵀ = T`, `T_{ij} = ρ^{|i−j|}`.
pub fn correlated_design(n: usize, p: usize, rho: f64, seed: u64) -> Result<DesignMatrix> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!("correlation {rho} outside [0, 1)")));
    }
    if n < 2 || p < 1 {
        return Err(Error::InvalidDimension(format!("correlated design needs n ≥ 2, p ≥ 1 (got {n}×{p})")));
    }
    let toeplitz = Matrix::from_fn(p, p, |i, j| rho.powi(i.abs_diff(j) as i32));
    let chol = toeplitz
        .cholesky()
        .ok_or_else(|| Error::InvalidParameter(format!("Toeplitz matrix for ρ = {rho} is not positive definite")))?;
    let mut rng = rng_from_seed(seed);
    let g = standard_normal_matrix(n, p, &mut rng);
    let mut entries = g * chol.l().transpose();
    normalize_columns(&mut entries);
    Ok(DesignMatrix { entries, kind: DesignKind::Correlated { rho }, seed: Some(seed) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignalKind {
    /// Non-zero entries `±1` with random signs.
    PmOne,
    /// Three magnitudes `[a, aα, aα²]` scaled so that `‖β‖₂² = 3`.
    ExpDecay { alpha: f64 },
    /// I.i.d. standard normal values.
    GaussianValues,
}

/// A `k₀`-sparse vector in `ℝᵖ`; the support is sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    p: usize,
    support: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSignal {
    pub fn new(p: usize, mut entries: Vec<(usize, f64)>) -> Result<Self> {
        entries.sort_by_key(|&(i, _)| i);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidParameter("duplicate support index".into()));
        }
        if let Some(&(i, _)) = entries.iter().find(|&&(i, _)| i >= p) {
            return Err(Error::InvalidParameter(format!("support index {i} outside dimension {p}")));
        }
        if entries.iter().any(|&(_, v)| v == 0.0 || !v.is_finite()) {
            return Err(Error::InvalidParameter("support values must be finite and non-zero".into()));
        }
        let (support, values) = entries.into_iter().unzip();
        Ok(Self { p, support, values })
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    pub fn beta_min(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min)
    }

    pub fn beta_max(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Vector {
        let mut beta = Vector::zeros(self.p);
        for (&i, &v) in self.support.iter().zip(&self.values) {
            beta[i] = v;
        }
        beta
    }
}

fn random_sign(rng: &mut Rng) -> f64 {
    if rng.random::<bool>() { 1.0 } else { -1.0 }
}

/// Draws a sparse signal with a uniformly random support.
pub fn sparse_signal(p: usize, k0: usize, kind: SignalKind, seed: u64) -> Result<SparseSignal> {
    if k0 == 0 || k0 > p {
        return Err(Error::InvalidParameter(format!("sparsity {k0} outside [1, {p}]")));
    }
    let mut rng = rng_from_seed(seed);
    let support = sample(&mut rng, p, k0).into_vec();
    let values: Vec<f64> = match kind {
        SignalKind::PmOne => (0..k0).map(|_| random_sign(&mut rng)).collect(),
        SignalKind::ExpDecay { alpha } => {
            if k0 != 3 {
                return Err(Error::InvalidParameter(format!("exponential decay is defined for k0 = 3, got {k0}")));
            }
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(Error::InvalidParameter(format!("decay factor {alpha} outside (0, 1]")));
            }
            let a = (3.0 / (1.0 + alpha.powi(2) + alpha.powi(4))).sqrt();
            [a, a * alpha, a * alpha * alpha].into_iter().map(|m| m * random_sign(&mut rng)).collect()
        }
        SignalKind::GaussianValues => (0..k0)
            .map(|_| loop {
                let v: f64 = StandardNormal.sample(&mut rng);
                if v != 0.0 {
                    break v;
                }
            })
            .collect(),
    };
    SparseSignal::new(p, support.into_iter().zip(values).collect())
}

/// Noise standard deviation giving `‖clean‖₂² / (nσ²) = 10^{snr_db/10}`.
pub fn sigma_for_snr(clean: &Vector, snr_db: f64) -> Result<f64> {
    let energy = clean.norm_squared();
    if energy <= 0.0 || !energy.is_finite() {
        return Err(Error::InvalidParameter("clean signal has zero energy".into()));
    }
    Ok((energy / (clean.len() as f64 * 10f64.powf(snr_db / 10.0))).sqrt())
}

/// Draws `w ~ N(0, σ²I)` at the requested SNR; returns `(σ, w)`.
pub fn noise_for_snr(clean: &Vector, snr_db: f64, seed: u64) -> Result<(f64, Vector)> {
    let sigma = sigma_for_snr(clean, snr_db)?;
    Ok((sigma, gaussian_noise(clean.len(), sigma, seed)))
}

pub fn gaussian_noise(n: usize, sigma: f64, seed: u64) -> Vector {
    let mut rng = rng_from_seed(seed);
    Vector::from_fn(n, |_, _| {
        let z: f64 = StandardNormal.sample(&mut rng);
        sigma * z
    })
}

/// A sparse outlier vector with equal-magnitude entries and random signs.
#[derive(Debug, Clone, PartialEq)]
pub struct OutlierVector {
    n: usize,
    support: Vec<usize>,
    magnitude: f64,
    signs: Vec<f64>,
}

impl OutlierVector {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Outlier positions, sorted ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn signs(&self) -> &[f64] {
        &self.signs
    }

    pub fn to_dense(&self) -> Vector {
        let mut g = Vector::zeros(self.n);
        for (&i, &s) in self.support.iter().zip(&self.signs) {
            g[i] = s * self.magnitude;
        }
        g
    }
}

/// Outliers at `n_out` random positions with `‖g‖₂² = signal_energy / 10^{sir_db/10}`.
pub fn outliers(n: usize, n_out: usize, signal_energy: f64, sir_db: f64, seed: u64) -> Result<OutlierVector> {
    if n_out == 0 || n_out > n {
        return Err(Error::InvalidParameter(format!("outlier count {n_out} outside [1, {n}]")));
    }
    if signal_energy <= 0.0 || !signal_energy.is_finite() {
        return Err(Error::InvalidParameter("signal energy must be positive".into()));
    }
    let mut rng = rng_from_seed(seed);
    let mut support = sample(&mut rng, n, n_out).into_vec();
    support.sort_unstable();
    let signs = (0..n_out).map(|_| random_sign(&mut rng)).collect();
    let magnitude = (signal_energy / (n_out as f64 * 10f64.powf(sir_db / 10.0))).sqrt();
    Ok(OutlierVector { n, support, magnitude, signs })
}

/// Largest absolute inner product between distinct columns.
pub fn mutual_coherence(x: &Matrix) -> f64 {
    let gram = x.transpose() * x;
    let p = gram.nrows();
    let mut mu = 0.0f64;
    for j in 0..p {
        for i in 0..j {
            mu = mu.max(gram[(i, j)].abs());
        }
    }
    mu
}

/// Exact recovery coefficient `max_{j ∉ S} ‖X_S† X_j‖₁`.
pub fn erc_coefficient(x: &Matrix, support: &[usize]) -> Result<f64> {
    let mut state = IncrementalLs::new(&Vector::zeros(x.nrows()));
    for (pos, &i) in support.iter().enumerate() {
        state.append(&x.column(i).into_owned()).map_err(|_| Error::RankDeficient { column: pos })?;
    }
    Ok((0..x.ncols())
        .filter(|j| !support.contains(j))
        .map(|j| state.solve_for(&x.column(j).into_owned()).lp_norm(1))
        .fold(0.0, f64::max))
}

/// Extreme Gram eigenvalues over all `k`-column submatrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicBounds {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `max(1 − λ_min, λ_max − 1)`.
    pub delta: f64,
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k as u128).fold(1u128, |acc, i| acc * (n as u128 - i) / (i + 1))
}

/// Restricted isometry constant of order `k` by exhaustive enumeration.
pub fn ric_bruteforce(x: &Matrix, k: usize) -> Result<RicBounds> {
    let p = x.ncols();
    if k == 0 || k > p {
        return Err(Error::InvalidParameter(format!("order {k} outside [1, {p}]")));
    }
    let count = binomial(p, k);
    if count > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { count, limit: ENUMERATION_LIMIT });
    }
    let gram = x.transpose() * x;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for subset in (0..p).combinations(k) {
        let sub = Matrix::from_fn(k, k, |i, j| gram[(subset[i], subset[j])]);
        let eig = SymmetricEigen::new(sub).eigenvalues;
        lo = lo.min(eig.min());
        hi = hi.max(eig.max());
    }
    Ok(RicBounds { lambda_min: lo, lambda_max: hi, delta: (1.0 - lo).max(hi - 1.0) })
}

/// Extreme eigenvalues of `X_Sᵀ X_S`.
pub fn support_gram_extremes(x: &Matrix, support: &[usize]) -> (f64, f64) {
    let sub = select_columns(x, support);
    let eig = SymmetricEigen::new(sub.transpose() * &sub).eigenvalues;
    (eig.min(), eig.max())
}
