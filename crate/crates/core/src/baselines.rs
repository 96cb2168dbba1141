//! Reference estimators: LASSO with least-squares debiasing, oracle LS,
//! exhaustive best subset, and the LMMSE / QPSK pieces of the MIMO pipeline.

use itertools::Itertools;
use nalgebra::{Complex, DMatrix};

use crate::designs::{binomial, ENUMERATION_LIMIT};
use crate::linops::{least_squares, ortho_residual, select_columns, IncrementalLs};
use crate::{Error, Matrix, Result, Vector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LassoOptions {
    /// Stop once the largest coordinate change in a sweep is below this.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for LassoOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_sweeps: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LassoSolution {
    pub beta: Vector,
    pub lambda: f64,
    pub sweeps: usize,
    /// Largest coordinate change in the final sweep.
    pub max_change: f64,
    /// False when `max_sweeps` ran out first; `beta` is then the last iterate.
    pub converged: bool,
}

impl LassoSolution {
    pub fn support(&self) -> Vec<usize> {
        self.beta.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, _)| i).collect()
    }
}

fn soft_threshold(z: f64, lambda: f64) -> f64 {
    if z > lambda {
        z - lambda
    } else if z < -lambda {
        z + lambda
    } else {
        0.0
    }
}

/// `λ = 2σ√(2 ln p)`.
pub fn lasso_lambda(sigma: f64, p: usize) -> f64 {
    2.0 * sigma * (2.0 * (p as f64).ln()).sqrt()
}

/// Minimizes `½‖y − Xb‖₂² + λ‖b‖₁` by cyclic coordinate descent.
pub fn lasso(x: &Matrix, y: &Vector, lambda: f64, opts: LassoOptions) -> Result<LassoSolution> {
    let (n, p) = x.shape();
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: y.len() });
    }
    if !(lambda >= 0.0) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} must be non-negative")));
    }
    let col_sq: Vec<f64> = x.column_iter().map(|c| c.norm_squared()).collect();
    let mut beta = Vector::zeros(p);
    let mut resid = y.clone();
    let mut sweeps = 0;
    let mut max_change = f64::INFINITY;

    // A zero start is optimal as soon as λ ≥ ‖Xᵀy‖∞.
    if x.tr_mul(y).amax() <= lambda {
        return Ok(LassoSolution { beta, lambda, sweeps: 0, max_change: 0.0, converged: true });
    }

    while sweeps < opts.max_sweeps {
        sweeps += 1;
        max_change = 0.0f64;
        for j in 0..p {
            if col_sq[j] == 0.0 {
                continue;
            }
            let col = x.column(j);
            let old = beta[j];
            let rho = col.dot(&resid) + col_sq[j] * old;
            let new = soft_threshold(rho, lambda) / col_sq[j];
            let delta = new - old;
            if delta != 0.0 {
                resid.axpy(-delta, &col, 1.0);
                beta[j] = new;
                max_change = max_change.max(delta.abs());
            }
        }
        if max_change < opts.tol {
            return Ok(LassoSolution { beta, lambda, sweeps, max_change, converged: true });
        }
    }
    Ok(LassoSolution { beta, lambda, sweeps, max_change, converged: false })
}

/// Least squares on `support`, zeros elsewhere.
pub fn debias(x: &Matrix, y: &Vector, support: &[usize]) -> Result<Vector> {
    let mut beta = Vector::zeros(x.ncols());
    if support.is_empty() {
        return Ok(beta);
    }
    let coef = least_squares(&select_columns(x, support), y)?;
    for (&i, &c) in support.iter().zip(coef.iter()) {
        beta[i] = c;
    }
    Ok(beta)
}

/// LASSO at `lambda` followed by least squares on its support.
#[derive(Debug, Clone, PartialEq)]
pub struct DebiasedLasso {
    pub solution: LassoSolution,
    pub support: Vec<usize>,
    pub beta: Vector,
}

pub fn lasso_debiased(x: &Matrix, y: &Vector, lambda: f64) -> Result<DebiasedLasso> {
    let solution = lasso(x, y, lambda, LassoOptions::default())?;
    let support = solution.support();
    let beta = debias(x, y, &support)?;
    Ok(DebiasedLasso { solution, support, beta })
}

/// Least squares with knowledge of the true support.
pub fn oracle_ls(x: &Matrix, y: &Vector, true_support: &[usize]) -> Result<Vector> {
    if true_support.is_empty() {
        return Err(Error::InvalidParameter("oracle support is empty".into()));
    }
    debias(x, y, true_support)
}

/// Exhaustive minimizer of `‖y − X_S b‖₂` over supports of size `k`.
///
/// Rank-deficient subsets are skipped; ties keep the lexicographically
/// smallest support.
pub fn best_subset(x: &Matrix, y: &Vector, k: usize) -> Result<(Vec<usize>, Vector)> {
    let p = x.ncols();
    if k == 0 || k > p {
        return Err(Error::InvalidParameter(format!("subset size {k} outside [1, {p}]")));
    }
    let count = binomial(p, k);
    if count > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { count, limit: ENUMERATION_LIMIT });
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    for subset in (0..p).combinations(k) {
        let Ok(r) = ortho_residual(y, &select_columns(x, &subset)) else {
            continue;
        };
        let obj = r.norm_squared();
        if best.as_ref().is_none_or(|(_, b)| obj < *b) {
            best = Some((subset, obj));
        }
    }
    let (support, _) = best.ok_or(Error::RankDeficient { column: 0 })?;
    let beta = debias(x, y, &support)?;
    Ok((support, beta))
}

/// `(HᵀH + (σ²/E_s) I)⁻¹ Hᵀy`. With `σ² = 0` this is least squares.
pub fn lmmse(h: &Matrix, y: &Vector, sigma2: f64, symbol_energy: f64) -> Result<Vector> {
    if !(sigma2 >= 0.0) || !(symbol_energy > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lmmse needs σ² ≥ 0 and positive symbol energy (got {sigma2}, {symbol_energy})"
        )));
    }
    if h.nrows() != y.len() {
        return Err(Error::DimensionMismatch { expected: h.nrows(), actual: y.len() });
    }
    let mut gram = h.transpose() * h;
    gram += Matrix::identity(h.ncols(), h.ncols()) * (sigma2 / symbol_energy);
    let chol = gram.cholesky().ok_or(Error::RankDeficient { column: 0 })?;
    Ok(chol.solve(&h.tr_mul(y)))
}

/// Residual variance `‖(I − P_X)y‖₂² / (n − p)`.
pub fn sigma_ml(x: &Matrix, y: &Vector) -> Result<f64> {
    let (n, p) = x.shape();
    if n <= p {
        return Err(Error::InvalidDimension(format!("variance estimate needs n > p (got {n}×{p})")));
    }
    let mut state = IncrementalLs::new(y);
    for j in 0..p {
        state.append(&x.column(j).into_owned())?;
    }
    Ok(state.residual_norm_sq() / (n - p) as f64)
}

/// Elementwise sign with `0 ↦ +1`.
pub fn qpsk_quantize(x: &Vector) -> Vector {
    x.map(|v| if v < 0.0 { -1.0 } else { 1.0 })
}

/// `[[Re H, −Im H], [Im H, Re H]]`.
pub fn real_equivalent(h: &DMatrix<Complex<f64>>) -> Matrix {
    let (r, c) = h.shape();
    Matrix::from_fn(2 * r, 2 * c, |i, j| {
        let z = h[(i % r, j % c)];
        match (i < r, j < c) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// `[Re v; Im v]`.
pub fn stack_complex(v: &nalgebra::DVector<Complex<f64>>) -> Vector {
    let n = v.len();
    Vector::from_fn(2 * n, |i, _| if i < n { v[i].re } else { v[i - n].im })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{gaussian_design, gaussian_noise, hadamard_dictionary, sparse_signal, SignalKind};
    use crate::omp::omp_fixed;
    use crate::rng::rng_from_seed;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand_distr::{Distribution, StandardNormal};

    fn randn(n: usize, seed: u64) -> Vector {
        let mut rng = rng_from_seed(seed);
        Vector::from_fn(n, |_, _| StandardNormal.sample(&mut rng))
    }

    fn assert_stationary(x: &Matrix, y: &Vector, sol: &LassoSolution) {
        let grad = x.tr_mul(&(y - x * &sol.beta));
        for (i, g) in grad.iter().enumerate() {
            assert!(g.abs() <= sol.lambda + 1e-6, "coordinate {i}: |g| = {}", g.abs());
            if sol.beta[i] != 0.0 {
                assert!((g.abs() - sol.lambda).abs() <= 1e-6);
                assert_eq!(g.signum(), sol.beta[i].signum());
            }
        }
    }

    #[test]
    fn lasso_zero_lambda_is_least_squares() {
        let x = gaussian_design(20, 5, 1).unwrap().into_matrix();
        let y = randn(20, 2);
        let sol = lasso(&x, &y, 0.0, LassoOptions::default()).unwrap();
        assert!(sol.converged);
        assert_relative_eq!(sol.beta, least_squares(&x, &y).unwrap(), epsilon = 1e-6);
    }

    #[test]
    fn lasso_large_lambda_kills_everything() {
        let x = gaussian_design(20, 40, 3).unwrap().into_matrix();
        let y = randn(20, 4);
        let lam = x.tr_mul(&y).amax();
        let sol = lasso(&x, &y, lam, LassoOptions::default()).unwrap();
        assert_eq!(sol.beta, Vector::zeros(40));
        assert!(lasso(&x, &y, -1.0, LassoOptions::default()).is_err());
    }

    #[test]
    fn lasso_orthonormal_closed_form() {
        let q = gaussian_design(12, 6, 5).unwrap().into_matrix().qr().q();
        let y = randn(12, 6);
        let lam = 0.4;
        let sol = lasso(&q, &y, lam, LassoOptions::default()).unwrap();
        let z = q.tr_mul(&y);
        for i in 0..6 {
            let expected = z[i].signum() * (z[i].abs() - lam).max(0.0);
            assert!((sol.beta[i] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn lasso_stationarity_and_debias() {
        let x = gaussian_design(32, 64, 7).unwrap().into_matrix();
        let s = sparse_signal(64, 3, SignalKind::PmOne, 7).unwrap();
        let y = &x * s.to_dense() + gaussian_noise(32, 0.05, 8);
        let lam = lasso_lambda(0.05, 64);
        let sol = lasso(&x, &y, lam, LassoOptions::default()).unwrap();
        assert!(sol.converged);
        assert_stationary(&x, &y, &sol);

        let deb = lasso_debiased(&x, &y, lam).unwrap();
        let fitted = |b: &Vector| (&y - &x * b).norm();
        assert!(fitted(&deb.beta) <= fitted(&sol.beta) + 1e-12);
    }

    #[test]
    fn lasso_lambda_formula() {
        assert_relative_eq!(lasso_lambda(1.0, 500), 2.0 * (2.0 * 500f64.ln()).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn lasso_budget_exhaustion_is_flagged() {
        let x = gaussian_design(20, 40, 9).unwrap().into_matrix();
        let y = randn(20, 10);
        let sol = lasso(&x, &y, 0.01, LassoOptions { tol: 1e-14, max_sweeps: 2 }).unwrap();
        assert!(!sol.converged);
        assert_eq!(sol.sweeps, 2);
    }

    #[test]
    fn debias_cases() {
        let y = Vector::from_vec(vec![1.0, 2.0, 3.0]);
        let i3 = Matrix::identity(3, 3);
        assert_eq!(debias(&i3, &y, &[0, 2]).unwrap(), Vector::from_vec(vec![1.0, 0.0, 3.0]));
        assert_eq!(debias(&i3, &y, &[]).unwrap(), Vector::zeros(3));
        let x = gaussian_design(10, 6, 1).unwrap().into_matrix();
        let y = randn(10, 2);
        let b = debias(&x, &y, &[1, 4]).unwrap();
        let ls = least_squares(&select_columns(&x, &[1, 4]), &y).unwrap();
        assert_eq!((b[1], b[4]), (ls[0], ls[1]));
    }

    #[test]
    fn oracle_ls_cases() {
        let x = hadamard_dictionary(8).unwrap().into_matrix();
        let s = sparse_signal(16, 3, SignalKind::PmOne, 2).unwrap();
        let y = &x * s.to_dense();
        assert_relative_eq!(oracle_ls(&x, &y, s.support()).unwrap(), s.to_dense(), epsilon = 1e-12);
        assert!(oracle_ls(&x, &y, &[]).is_err());
    }

    #[test]
    fn oracle_ls_variance_matches_covariance_trace() {
        let x = hadamard_dictionary(32).unwrap().into_matrix();
        let s = sparse_signal(64, 3, SignalKind::PmOne, 1).unwrap();
        let clean = &x * s.to_dense();
        let sigma = 0.3;
        let sub = select_columns(&x, s.support());
        let expected = sigma * sigma * (sub.transpose() * &sub).try_inverse().unwrap().trace();
        let trials = 10_000;
        let mse: f64 = (0..trials)
            .map(|t| {
                let y = &clean + gaussian_noise(32, sigma, 1000 + t);
                (oracle_ls(&x, &y, s.support()).unwrap() - s.to_dense()).norm_squared()
            })
            .sum::<f64>()
            / trials as f64;
        assert!((mse / expected - 1.0).abs() < 0.1, "mse {mse} vs {expected}");
    }

    #[test]
    fn best_subset_cases() {
        let x = gaussian_design(10, 4, 3).unwrap().into_matrix();
        let y = randn(10, 4);
        let (s, b) = best_subset(&x, &y, 4).unwrap();
        assert_eq!(s, vec![0, 1, 2, 3]);
        assert_relative_eq!(b, least_squares(&x, &y).unwrap(), epsilon = 1e-12);

        let x = gaussian_design(10, 12, 5).unwrap().into_matrix();
        let y = randn(10, 6);
        let (s, _) = best_subset(&x, &y, 1).unwrap();
        let corr = x.tr_mul(&y);
        assert_eq!(s, vec![corr.iamax()]);

        let sig = sparse_signal(12, 2, SignalKind::PmOne, 9).unwrap();
        let (s, b) = best_subset(&x, &(&x * sig.to_dense()), 2).unwrap();
        assert_eq!(s, sig.support());
        assert_relative_eq!(b, sig.to_dense(), epsilon = 1e-10);

        let big = gaussian_design(10, 200, 1).unwrap().into_matrix();
        assert!(matches!(best_subset(&big, &randn(10, 1), 4), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn lmmse_limits_and_oracle() {
        let h = Matrix::from_row_slice(4, 2, &[1.0, 0.5, -0.3, 2.0, 0.7, 0.1, 1.2, -1.0]);
        let y = Vector::from_vec(vec![0.3, -1.0, 2.0, 0.5]);
        let ls = least_squares(&h, &y).unwrap();
        assert_relative_eq!(lmmse(&h, &y, 0.0, 1.0).unwrap(), ls, epsilon = 1e-12);
        assert_relative_eq!(lmmse(&h, &y, 1e-12, 1.0).unwrap(), ls, epsilon = 1e-9);
        assert!(lmmse(&h, &y, 1e12, 1.0).unwrap().norm() < 1e-10);

        // explicit 2×2 inverse
        let s2 = 0.5;
        let g = h.transpose() * &h;
        let (a, b, c, d) = (g[(0, 0)] + s2 / 2.0, g[(0, 1)], g[(1, 0)], g[(1, 1)] + s2 / 2.0);
        let det = a * d - b * c;
        let hy = h.tr_mul(&y);
        let expected = Vector::from_vec(vec![(d * hy[0] - b * hy[1]) / det, (-c * hy[0] + a * hy[1]) / det]);
        assert_relative_eq!(lmmse(&h, &y, s2, 2.0).unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn sigma_ml_cases() {
        let x = gaussian_design(10, 3, 1).unwrap().into_matrix();
        let y = &x * Vector::from_vec(vec![1.0, -2.0, 0.5]);
        assert!(sigma_ml(&x, &y).unwrap() < 1e-25);
        let e1 = Matrix::from_column_slice(2, 1, &[1.0, 0.0]);
        assert_relative_eq!(sigma_ml(&e1, &Vector::from_vec(vec![3.0, 1.5])).unwrap(), 2.25, epsilon = 1e-15);

        let x = gaussian_design(40, 8, 2).unwrap().into_matrix();
        let sigma = 0.8;
        let draws = 10_000;
        let mean = (0..draws).map(|t| sigma_ml(&x, &gaussian_noise(40, sigma, t)).unwrap()).sum::<f64>() / draws as f64;
        assert!((mean / (sigma * sigma) - 1.0).abs() < 0.05, "mean variance {mean}");
    }

    #[test]
    fn qpsk_quantize_cases() {
        let q = qpsk_quantize(&Vector::from_vec(vec![0.3, -2.0, 0.0, -0.0]));
        assert_eq!(q, Vector::from_vec(vec![1.0, -1.0, 1.0, 1.0]));
        assert_eq!(qpsk_quantize(&q), q);
    }

    #[test]
    fn real_equivalent_preserves_products() {
        let h = DMatrix::from_fn(3, 2, |i, j| Complex::new(i as f64 - j as f64, 0.5 * (i + j) as f64));
        let x = nalgebra::DVector::from_vec(vec![Complex::new(1.0, -1.0), Complex::new(-1.0, 1.0)]);
        let direct = stack_complex(&(&h * &x));
        let via_real = real_equivalent(&h) * stack_complex(&x);
        assert_relative_eq!(direct, via_real, epsilon = 1e-14);
    }

    proptest! {
        #[test]
        fn best_subset_never_worse_than_omp(seed in 0u64..2000, k in 1usize..4) {
            let x = gaussian_design(10, 14, seed).unwrap().into_matrix();
            let y = randn(10, seed + 17);
            let (s, _) = best_subset(&x, &y, k).unwrap();
            let best_obj = ortho_residual(&y, &select_columns(&x, &s)).unwrap().norm_squared();
            let omp = omp_fixed(&x, &y, k).unwrap();
            let omp_obj = omp.trace().residual_norms_sq()[omp.k_star()];
            prop_assert!(best_obj <= omp_obj + 1e-10);
        }
    }
}
