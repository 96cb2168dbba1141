//! Greedy robust regression under sparse outliers.
//!
//! GARD starts from the least-squares fit on `X` and repeatedly augments the
//! design with the unit vector `e_j` at the largest residual entry, so that
//! each step absorbs one suspected outlier. TF-GARD reads the same trace with
//! the residual-ratio rule.

use crate::linops::IncrementalLs;
use crate::omp::{argmin_ratio, noise_norm_bound, HaltReason, ZERO_RESIDUAL_TOL};
use crate::{Error, Matrix, Result, Vector};

#[derive(Debug, Clone, PartialEq)]
pub struct GardTrace {
    outliers: Vec<usize>,
    /// `‖r^(0)‖², …, ‖r^(K)‖²` with `r^(0) = (I − P_X)y`.
    residual_sq: Vec<f64>,
    halt: HaltReason,
    k_max: usize,
}

impl GardTrace {
    /// Outlier positions in selection order.
    pub fn outliers(&self) -> &[usize] {
        &self.outliers
    }

    pub fn residual_norms_sq(&self) -> &[f64] {
        &self.residual_sq
    }

    pub fn halt_reason(&self) -> HaltReason {
        self.halt
    }

    pub fn len(&self) -> usize {
        self.outliers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outliers.is_empty()
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn t_statistic(&self) -> Result<Vec<f64>> {
        if self.is_empty() {
            return Err(Error::EmptyTrace);
        }
        Ok(self.residual_sq.windows(2).map(|w| w[1] / w[0]).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustEstimate {
    beta: Vector,
    outlier_support: Vec<usize>,
    outlier_values: Vec<f64>,
    k_f: usize,
    trace: GardTrace,
}

impl RobustEstimate {
    pub fn beta(&self) -> &Vector {
        &self.beta
    }

    /// Identified outlier positions in selection order.
    pub fn outlier_support(&self) -> &[usize] {
        &self.outlier_support
    }

    pub fn outlier_support_sorted(&self) -> Vec<usize> {
        let mut s = self.outlier_support.clone();
        s.sort_unstable();
        s
    }

    /// Estimated outlier values, aligned with [`outlier_support`](Self::outlier_support).
    pub fn outlier_values(&self) -> &[f64] {
        &self.outlier_values
    }

    pub fn outlier_estimate(&self, n: usize) -> Vector {
        let mut g = Vector::zeros(n);
        for (&j, &v) in self.outlier_support.iter().zip(&self.outlier_values) {
            g[j] = v;
        }
        g
    }

    pub fn k_f(&self) -> usize {
        self.k_f
    }

    pub fn trace(&self) -> &GardTrace {
        &self.trace
    }
}

fn unit(n: usize, j: usize) -> Vector {
    let mut e = Vector::zeros(n);
    e[j] = 1.0;
    e
}

fn gard_loop(x: &Matrix, y: &Vector, k_max: usize, threshold: Option<f64>) -> Result<(GardTrace, IncrementalLs)> {
    let (n, p) = x.shape();
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: y.len() });
    }
    if n <= p {
        return Err(Error::InvalidDimension(format!("GARD needs n > p (got {n}×{p})")));
    }
    if k_max > n - p {
        return Err(Error::InvalidParameter(format!("k_max = {k_max} exceeds n − p = {}", n - p)));
    }
    let mut state = IncrementalLs::new(y);
    for j in 0..p {
        state.append(&x.column(j).into_owned())?;
    }
    let y_norm = y.norm();
    let mut outliers = Vec::new();
    let mut residual_sq = vec![state.residual_norm_sq()];
    let mut chosen = vec![false; n];

    let halt = loop {
        if state.residual_norm_sq().sqrt() <= ZERO_RESIDUAL_TOL * y_norm {
            break HaltReason::ZeroResidual;
        }
        if threshold.is_some_and(|t| state.residual_norm_sq().sqrt() <= t) {
            break HaltReason::BelowThreshold;
        }
        if outliers.len() >= k_max {
            break HaltReason::ReachedKmax;
        }
        let mut best: Option<(usize, f64)> = None;
        for (j, r) in state.residual().iter().enumerate() {
            if !chosen[j] && best.is_none_or(|(_, b)| r.abs() > b) {
                best = Some((j, r.abs()));
            }
        }
        let Some((j, _)) = best else {
            break HaltReason::ReachedKmax;
        };
        if state.append(&unit(n, j)).is_err() {
            break HaltReason::RankDeficient;
        }
        chosen[j] = true;
        outliers.push(j);
        residual_sq.push(state.residual_norm_sq());
    };
    Ok((GardTrace { outliers, residual_sq, halt, k_max }, state))
}

/// Runs GARD for at most `k_max ≤ n − p` augmentations.
pub fn run_gard(x: &Matrix, y: &Vector, k_max: usize) -> Result<GardTrace> {
    Ok(gard_loop(x, y, k_max, None)?.0)
}

fn estimate(trace: GardTrace, state: &IncrementalLs, p: usize, k_f: usize) -> RobustEstimate {
    let coef = state.prefix_coefficients(p + k_f);
    let beta = coef.rows(0, p).into_owned();
    let outlier_support = trace.outliers[..k_f].to_vec();
    let outlier_values = coef.iter().skip(p).copied().collect();
    RobustEstimate { beta, outlier_support, outlier_values, k_f, trace }
}

/// TF-GARD cap `⌊(n − p + 1)/2⌋`.
pub fn tf_gard_kmax(n: usize, p: usize) -> usize {
    (n + 1).saturating_sub(p) / 2
}

/// Tuning-free GARD: `k_f = argmin t(k)` over `1 ≤ k ≤ k_max`.
pub fn tf_gard(x: &Matrix, y: &Vector) -> Result<RobustEstimate> {
    let (n, p) = x.shape();
    let k_max = tf_gard_kmax(n, p).min(n.saturating_sub(p));
    let (trace, state) = gard_loop(x, y, k_max, None)?;
    let k_f = match trace.halt {
        _ if trace.is_empty() => 0,
        HaltReason::ZeroResidual => trace.len(),
        _ => argmin_ratio(&trace.t_statistic()?, trace.len()),
    };
    Ok(estimate(trace, &state, p, k_f))
}

/// GARD(n_out): exactly `n_out` augmentations, then the joint estimate.
pub fn gard_fixed(x: &Matrix, y: &Vector, n_out: usize) -> Result<RobustEstimate> {
    let p = x.ncols();
    let (trace, state) = gard_loop(x, y, n_out, None)?;
    let k_f = trace.len();
    Ok(estimate(trace, &state, p, k_f))
}

/// GARD(σ²): augment until `‖r^(k)‖₂ ≤ σ√(n + 2√(n ln n))`.
pub fn gard_sigma(x: &Matrix, y: &Vector, sigma: f64) -> Result<RobustEstimate> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!("noise level {sigma} must be positive")));
    }
    let (n, p) = x.shape();
    let bound = noise_norm_bound(n, sigma);
    let (trace, state) = gard_loop(x, y, n.saturating_sub(p), Some(bound))?;
    let k_f = trace.len();
    Ok(estimate(trace, &state, p, k_f))
}
