//! Design qualifiers and recovery thresholds for a single generated instance.

use std::fmt;
use std::str::FromStr;

use crate::designs::{
    correlated_design, erc_coefficient, gaussian_design, hadamard_dictionary, mutual_coherence, sparse_signal,
    DesignMatrix, SignalKind, SparseSignal,
};
use crate::omp::{recovery_thresholds, run_omp, t_statistic, tf_kmax, RecoveryThresholds};
use crate::rng::{derive_seed, stream};
use crate::{Error, Matrix, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignChoice {
    Hadamard,
    Gaussian,
    Correlated,
}

impl FromStr for DesignChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hadamard" => Ok(DesignChoice::Hadamard),
            "gaussian" => Ok(DesignChoice::Gaussian),
            "correlated" => Ok(DesignChoice::Correlated),
            _ => Err(Error::Config(format!("unknown design `{s}` (hadamard, gaussian, correlated)"))),
        }
    }
}

/// Builds the requested design; the Hadamard dictionary is always `n × 2n`.
pub fn build_design(kind: DesignChoice, n: usize, p: Option<usize>, rho: f64, seed: u64) -> Result<DesignMatrix> {
    let need_p = || p.ok_or_else(|| Error::Config("--p is required for this design".into()));
    let ds = derive_seed(seed, &[stream::DESIGN]);
    match kind {
        DesignChoice::Hadamard => {
            if let Some(p) = p.filter(|&p| p != 2 * n) {
                return Err(Error::Config(format!("the Hadamard dictionary has p = 2n = {}, not {p}", 2 * n)));
            }
            hadamard_dictionary(n)
        }
        DesignChoice::Gaussian => gaussian_design(n, need_p()?, ds),
        DesignChoice::Correlated => correlated_design(n, need_p()?, rho, ds),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceReport {
    pub n: usize,
    pub p: usize,
    pub mu: f64,
    /// `√((p − n)/(n(p − 1)))`, the smallest coherence any `n × p` frame can have.
    pub welch: f64,
    /// Largest `k₀` with `μ < 1/(2k₀ − 1)`.
    pub mic_max_k0: usize,
}

pub fn coherence_report(x: &Matrix) -> CoherenceReport {
    let (n, p) = x.shape();
    let mu = mutual_coherence(x);
    let welch = if p > n { ((p - n) as f64 / (n as f64 * (p - 1) as f64)).sqrt() } else { 0.0 };
    let mic_max_k0 = if mu == 0.0 { p } else { (1..=p).take_while(|&k| mu * ((2 * k - 1) as f64) < 1.0).count() };
    CoherenceReport { n, p, mu, welch, mic_max_k0 }
}

impl fmt::Display for CoherenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "design          {} x {}", self.n, self.p)?;
        writeln!(f, "coherence       {:.6}", self.mu)?;
        writeln!(f, "welch bound     {:.6}", self.welch)?;
        write!(f, "MIC holds for   k0 <= {}", self.mic_max_k0)
    }
}

/// A random `k₀`-sparse `±1` signal drawn from the diagnostic seed.
pub fn diagnostic_signal(p: usize, k0: usize, seed: u64) -> Result<SparseSignal> {
    sparse_signal(p, k0, SignalKind::PmOne, derive_seed(seed, &[stream::SIGNAL]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErcReport {
    pub support: Vec<usize>,
    pub erc: f64,
}

pub fn erc_report(x: &Matrix, k0: usize, seed: u64) -> Result<ErcReport> {
    let signal = diagnostic_signal(x.ncols(), k0, seed)?;
    let erc = erc_coefficient(x, signal.support())?;
    Ok(ErcReport { support: signal.support().to_vec(), erc })
}

impl fmt::Display for ErcReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "support         {:?}", self.support)?;
        write!(f, "erc             {:.6} ({})", self.erc, if self.erc < 1.0 { "holds" } else { "violated" })
    }
}

/// Thresholds for the diagnostic signal. ERC violation is reported, not fatal.
pub fn thresholds_report(x: &Matrix, k0: usize, seed: u64) -> Result<(SparseSignal, RecoveryThresholds)> {
    let signal = diagnostic_signal(x.ncols(), k0, seed)?;
    let th = recovery_thresholds(x, &signal)?;
    Ok((signal, th))
}

pub fn format_thresholds(signal: &SparseSignal, th: &RecoveryThresholds) -> String {
    let gated = |v: f64| if th.erc_holds() { format!("{v:.6}") } else { "n/a (erc violated)".to_string() };
    format!(
        "support         {:?}\n\
         lambda_min      {:.6}\n\
         lambda_max      {:.6}\n\
         erc             {:.6}\n\
         eps_a           {}\n\
         eps_b           {:.6}\n\
         min(eps_a, eps_b) {}",
        signal.support(),
        th.lambda_min,
        th.lambda_max,
        th.erc,
        gated(th.eps_a),
        th.eps_b,
        gated(th.noise_bound()),
    )
}

/// Monte Carlo estimate of the smallest post-recovery residual ratio.
///
/// Over `draws` noise realizations at level `sigma`, OMP is run to
/// `⌊n/2⌋` and the minimum of `‖r^(k)‖/‖r^(k−1)‖` over `k > k₀` is
/// recorded. The minimum over draws is only an upper estimate of the true
/// infimum, which ranges over every realizable selection sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaEstimate {
    pub gamma: f64,
    /// `λ_min β_min Γ/(1 + Γ)` evaluated at the estimate.
    pub eps_c: f64,
    pub draws: usize,
}

pub fn gamma_estimate(x: &Matrix, signal: &SparseSignal, sigma: f64, draws: usize, seed: u64) -> Result<GammaEstimate> {
    if draws == 0 || !(sigma > 0.0) {
        return Err(Error::InvalidParameter("need at least one draw and σ > 0".into()));
    }
    let n = x.nrows();
    let k0 = signal.sparsity();
    let clean = x * signal.to_dense();
    let th = recovery_thresholds(x, signal)?;
    let mut gamma = f64::INFINITY;
    for d in 0..draws {
        let w = crate::designs::gaussian_noise(n, sigma, derive_seed(seed, &[stream::NOISE, d as u64]));
        let trace = run_omp(x, &(&clean + w), tf_kmax(n))?;
        let t = t_statistic(&trace)?;
        if let Some(m) = t.iter().skip(k0).map(|v| v.sqrt()).reduce(f64::min) {
            gamma = gamma.min(m);
        }
    }
    if !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!("no iterations beyond k0 = {k0} were observed")));
    }
    let eps_c = th.lambda_min * th.beta_min * gamma / (1.0 + gamma);
    Ok(GammaEstimate { gamma, eps_c, draws })
}
