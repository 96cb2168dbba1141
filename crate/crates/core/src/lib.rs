//! Tuning-free greedy sparse recovery.
//!
//! The crate implements orthogonal matching pursuit (OMP) with a
//! residual-ratio model-order rule that needs neither the sparsity level nor
//! the noise variance, the analogous tuning-free variant of GARD for robust
//! regression under sparse outliers, the baselines these are compared
//! against, and a Monte Carlo harness that runs the standard experiment
//! catalog.
//!
//! Module map:
//!
//! - [`linops`]: least squares, projection residuals and the incremental
//!   Gram–Schmidt state shared by the greedy solvers.
//! - [`designs`]: design matrices, sparse signals, noise, outliers and
//!   matrix qualifiers (coherence, ERC, brute-force RIC).
//! - [`omp`]: the OMP engine, the `t(k)` statistic, TF-OMP, QTF caps,
//!   OMP(k₀)/OMP(σ²) and the recovery-threshold diagnostics.
//! - [`gard`]: GARD, TF-GARD and the GARD(n_out)/GARD(σ²) rules.
//! - [`baselines`]: LASSO with debiasing, oracle LS, best subset, LMMSE,
//!   the residual variance estimator and QPSK quantization.
//! - [`harness`]: experiment configs, the Monte Carlo driver, metrics and
//!   CSV / plot-data output.
//!
//! Indices are 0-based everywhere.

pub mod baselines;
pub mod designs;
pub mod error;
pub mod gard;
pub mod harness;
pub mod linops;
pub mod omp;
pub mod rng;

pub use error::{Error, Result};

/// Dense real matrix used throughout the crate.
pub type Matrix = nalgebra::DMatrix<f64>;
/// Dense real vector used throughout the crate.
pub type Vector = nalgebra::DVector<f64>;
