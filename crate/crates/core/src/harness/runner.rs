//! Monte Carlo driver.
//!
//! Every trial gets its own seed derived from `(master seed, grid index,
//! trial index)`, so results do not depend on how trials are scheduled.
//! Trials run in parallel and are collected by index before reduction.

use std::time::Instant;

use rayon::prelude::*;

use crate::baselines::{lasso_debiased, lasso_lambda, oracle_ls};
use crate::designs::{
    correlated_design, gaussian_design, hadamard_dictionary, noise_for_snr, outliers, sparse_signal, SignalKind,
};
use crate::gard::{gard_fixed, gard_sigma, tf_gard, RobustEstimate};
use crate::linops::least_squares;
use crate::omp::{omp_fixed, omp_sigma, qtf_omp1, qtf_omp2, tf_omp, RecoveryResult};
use crate::rng::{derive_seed, stream};
use crate::{Error, Matrix, Result, Vector};

use super::config::{Algorithm, ExperimentConfig, ExperimentId, Family};
use super::metrics::{complex_ser, mse, pe, Accumulator};
use super::mimo::{mimo_instance, mimo_pipeline, CorrectionStage};

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses rayon's default.
    pub threads: Option<usize>,
    /// Measure per-algorithm wall time. Off by default so that output files
    /// are byte-identical across runs.
    pub timing: bool,
}

/// One point of the sweep. Parameters that do not apply are `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub n: usize,
    pub p: usize,
    pub k0: Option<usize>,
    pub rho: Option<f64>,
    pub alpha: Option<f64>,
    pub snr_db: f64,
    pub sir_db: Option<f64>,
    pub n_out: Option<usize>,
}

/// Aggregated metrics for one (grid point, algorithm) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub experiment: String,
    pub point: GridPoint,
    pub algorithm: String,
    /// Trials in which the algorithm produced an estimate.
    pub trials: usize,
    pub failures: usize,
    pub mse_linear: Option<f64>,
    pub mse_stderr: Option<f64>,
    pub pe: Option<f64>,
    pub pe_stderr: Option<f64>,
    pub ser: Option<f64>,
    pub ser_stderr: Option<f64>,
    pub iters_mean: Option<f64>,
    pub wall_ms_mean: f64,
}

impl MetricsRow {
    pub fn mse_db(&self) -> Option<f64> {
        self.mse_linear.map(|m| 10.0 * m.log10())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrialMetrics {
    pub rows: Vec<MetricsRow>,
}

impl TrialMetrics {
    pub fn find(&self, algorithm: Algorithm, pred: impl Fn(&GridPoint) -> bool) -> Option<&MetricsRow> {
        self.rows.iter().find(|r| r.algorithm == algorithm.name() && pred(&r.point))
    }

    pub fn for_algorithm(&self, algorithm: Algorithm) -> impl Iterator<Item = &MetricsRow> {
        self.rows.iter().filter(move |r| r.algorithm == algorithm.name())
    }

    pub fn total_failures(&self) -> usize {
        self.rows.iter().map(|r| r.failures).sum()
    }
}

/// Enumerates the sweep: outer parameter list, then SNR.
pub fn grid(config: &ExperimentConfig) -> Vec<GridPoint> {
    let c = config;
    let base = |snr_db: f64| GridPoint {
        n: c.n,
        p: c.dictionary_p(),
        k0: Some(c.k0.k0(c.n)),
        rho: None,
        alpha: None,
        snr_db,
        sir_db: None,
        n_out: None,
    };
    let mut points = Vec::new();
    for_each_outer(c, |outer| {
        for &snr in &c.snr_db {
            points.push(outer(base(snr)));
        }
    });
    points
}

fn for_each_outer(c: &ExperimentConfig, mut f: impl FnMut(&dyn Fn(GridPoint) -> GridPoint)) {
    match c.experiment {
        ExperimentId::HadamardSmall => f(&|g| g),
        ExperimentId::GaussianFixedK0 | ExperimentId::GaussianScalingK0 | ExperimentId::QtfCompare => {
            for &n in &c.n_list {
                f(&|g| GridPoint { n, k0: Some(c.k0.k0(n)), ..g });
            }
        }
        ExperimentId::ExpDecay => {
            for &a in &c.alpha_list {
                f(&|g| GridPoint { alpha: Some(a), ..g });
            }
        }
        ExperimentId::Correlated => {
            for &r in &c.rho_list {
                f(&|g| GridPoint { rho: Some(r), ..g });
            }
        }
        ExperimentId::MimoOverdetermined => f(&|g| GridPoint { k0: None, ..g }),
        ExperimentId::GardSnrSweep | ExperimentId::GardNoutSweep => {
            for &k in &c.n_out_list {
                f(&|g| GridPoint { k0: None, sir_db: Some(c.sir_db), n_out: Some(k), ..g });
            }
        }
    }
}

/// What one algorithm produced in one trial.
#[derive(Debug, Clone, Copy, Default)]
struct Sample {
    mse: Option<f64>,
    pe: Option<f64>,
    ser: Option<f64>,
    iters: Option<f64>,
    wall_ms: f64,
}

type TrialOutcome = Vec<Option<Sample>>;

fn timed<T>(timing: bool, f: impl FnOnce() -> Result<T>) -> (Result<T>, f64) {
    if !timing {
        return (f(), 0.0);
    }
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64() * 1e3)
}

fn recovery_sample(fit: &RecoveryResult, beta: &Vector, support: &[usize], wall_ms: f64) -> Result<Sample> {
    Ok(Sample {
        mse: Some(mse(fit.beta(), beta)?),
        pe: Some(pe(fit.support(), support)),
        ser: None,
        iters: Some(fit.iterations() as f64),
        wall_ms,
    })
}

fn robust_sample(est: &RobustEstimate, beta: &Vector, support: &[usize], wall_ms: f64) -> Result<Sample> {
    Ok(Sample {
        mse: Some(mse(est.beta(), beta)?),
        pe: Some(pe(est.outlier_support(), support)),
        ser: None,
        iters: Some(est.trace().len() as f64),
        wall_ms,
    })
}

fn sparse_trial(c: &ExperimentConfig, g: &GridPoint, fixed: Option<&Matrix>, seed: u64, timing: bool) -> Result<TrialOutcome> {
    let k0 = g.k0.expect("sparse grid points carry k0");
    let owned;
    let x = match fixed {
        Some(x) => x,
        None => {
            let ds = derive_seed(seed, &[stream::DESIGN]);
            owned = match c.experiment {
                ExperimentId::Correlated => correlated_design(g.n, g.p, g.rho.unwrap_or(0.0), ds)?,
                _ => gaussian_design(g.n, g.p, ds)?,
            }
            .into_matrix();
            &owned
        }
    };
    let kind = match g.alpha {
        Some(alpha) => SignalKind::ExpDecay { alpha },
        None => SignalKind::PmOne,
    };
    let signal = sparse_signal(g.p, k0, kind, derive_seed(seed, &[stream::SIGNAL]))?;
    let beta = signal.to_dense();
    let support = signal.support();
    let clean = x * &beta;
    let (sigma, w) = noise_for_snr(&clean, g.snr_db, derive_seed(seed, &[stream::NOISE]))?;
    let y = if c.noiseless { clean } else { clean + w };

    Ok(c.algorithms
        .iter()
        .map(|&alg| {
            let sample = match alg {
                Algorithm::TfOmp | Algorithm::QtfOmp1 | Algorithm::QtfOmp2 | Algorithm::OmpK0 | Algorithm::OmpSigma => {
                    let (fit, ms) = timed(timing, || match alg {
                        Algorithm::TfOmp => tf_omp(x, &y),
                        Algorithm::QtfOmp1 => qtf_omp1(x, &y),
                        Algorithm::QtfOmp2 => qtf_omp2(x, &y),
                        Algorithm::OmpK0 => omp_fixed(x, &y, k0),
                        _ => omp_sigma(x, &y, sigma),
                    });
                    fit.and_then(|f| recovery_sample(&f, &beta, support, ms))
                }
                Algorithm::Lasso => {
                    let (fit, ms) = timed(timing, || lasso_debiased(x, &y, lasso_lambda(sigma, g.p)));
                    fit.and_then(|f| {
                        Ok(Sample {
                            mse: Some(mse(&f.beta, &beta)?),
                            pe: Some(pe(&f.support, support)),
                            ser: None,
                            iters: Some(f.solution.sweeps as f64),
                            wall_ms: ms,
                        })
                    })
                }
                Algorithm::OracleLs => {
                    let (fit, ms) = timed(timing, || oracle_ls(x, &y, support));
                    fit.and_then(|b| Ok(Sample { mse: Some(mse(&b, &beta)?), pe: Some(0.0), wall_ms: ms, ..Sample::default() }))
                }
                other => Err(Error::Config(format!("`{other}` is not a sparse regression algorithm"))),
            };
            sample.ok()
        })
        .collect())
}

fn robust_trial(c: &ExperimentConfig, g: &GridPoint, seed: u64, timing: bool) -> Result<TrialOutcome> {
    let n_out = g.n_out.expect("robust grid points carry n_out");
    let x = gaussian_design(g.n, g.p, derive_seed(seed, &[stream::DESIGN]))?.into_matrix();
    let signal = sparse_signal(g.p, g.p, SignalKind::GaussianValues, derive_seed(seed, &[stream::SIGNAL]))?;
    let beta = signal.to_dense();
    let clean = &x * &beta;
    let (sigma, w) = noise_for_snr(&clean, g.snr_db, derive_seed(seed, &[stream::NOISE]))?;
    let out = outliers(g.n, n_out, clean.norm_squared(), c.sir_db, derive_seed(seed, &[stream::OUTLIERS]))?;
    let y_wo = if c.noiseless { clean } else { clean + w };
    let y = &y_wo + out.to_dense();

    Ok(c.algorithms
        .iter()
        .map(|&alg| {
            let sample = match alg {
                Algorithm::Ls | Algorithm::LsWithoutOutliers => {
                    let obs = if alg == Algorithm::Ls { &y } else { &y_wo };
                    let (fit, ms) = timed(timing, || least_squares(&x, obs));
                    fit.and_then(|b| Ok(Sample { mse: Some(mse(&b, &beta)?), wall_ms: ms, ..Sample::default() }))
                }
                Algorithm::TfGard | Algorithm::GardSigma | Algorithm::GardNout => {
                    let (fit, ms) = timed(timing, || match alg {
                        Algorithm::TfGard => tf_gard(&x, &y),
                        Algorithm::GardSigma => gard_sigma(&x, &y, sigma),
                        _ => gard_fixed(&x, &y, n_out),
                    });
                    fit.and_then(|e| robust_sample(&e, &beta, out.support(), ms))
                }
                other => Err(Error::Config(format!("`{other}` is not a robust regression algorithm"))),
            };
            sample.ok()
        })
        .collect())
}

fn mimo_trial(c: &ExperimentConfig, g: &GridPoint, seed: u64, timing: bool) -> Result<TrialOutcome> {
    let inst = mimo_instance(c.nt, c.nr, g.snr_db, seed, c.noiseless)?;
    Ok(c.algorithms
        .iter()
        .map(|&alg| {
            let stages: &[CorrectionStage] = match alg {
                Algorithm::LmmseTfOmp => &[CorrectionStage::TfOmp],
                Algorithm::LmmseOmpK0 => &[CorrectionStage::OmpK0],
                Algorithm::LmmseOmpSigma => &[CorrectionStage::OmpSigma],
                _ => &[],
            };
            let (out, ms) = timed(timing, || mimo_pipeline(&inst.h, &inst.y, &inst.x, stages));
            let sample = out.and_then(|o| {
                let (symbols, ser, iters) = match o.corrections.first() {
                    Some(cor) => (&cor.symbols, cor.ser, Some(cor.iterations as f64)),
                    None => (&o.preliminary, o.ser_before, None),
                };
                debug_assert_eq!(ser, complex_ser(symbols, &inst.x)?);
                Ok(Sample { mse: Some(mse(symbols, &inst.x)?), pe: None, ser: Some(ser), iters, wall_ms: ms })
            });
            sample.ok()
        })
        .collect())
}

/// Runs every trial at every grid point and aggregates per algorithm.
///
/// Algorithm failures inside a trial are counted per row; a trial whose
/// data generation fails counts as a failure for every algorithm.
pub fn run_experiment(config: &ExperimentConfig, opts: RunOptions) -> Result<TrialMetrics> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let family = config.experiment.family();
    let mut rows = Vec::new();

    for (gi, point) in grid(config).into_iter().enumerate() {
        let fixed = match config.experiment {
            ExperimentId::HadamardSmall | ExperimentId::ExpDecay => Some(hadamard_dictionary(point.n)?.into_matrix()),
            _ => None,
        };
        let outcomes: Vec<TrialOutcome> = pool.install(|| {
            (0..config.trials)
                .into_par_iter()
                .map(|ti| {
                    let seed = derive_seed(config.seed, &[gi as u64, ti as u64]);
                    let out = match family {
                        Family::Sparse => sparse_trial(config, &point, fixed.as_ref(), seed, opts.timing),
                        Family::Robust => robust_trial(config, &point, seed, opts.timing),
                        Family::Mimo => mimo_trial(config, &point, seed, opts.timing),
                    };
                    out.unwrap_or_else(|_| vec![None; config.algorithms.len()])
                })
                .collect()
        });
        rows.extend(reduce(config, point, &outcomes));
    }
    Ok(TrialMetrics { rows })
}

fn reduce(config: &ExperimentConfig, point: GridPoint, outcomes: &[TrialOutcome]) -> Vec<MetricsRow> {
    config
        .algorithms
        .iter()
        .enumerate()
        .map(|(ai, alg)| {
            let samples: Vec<Sample> = outcomes.iter().filter_map(|o| o[ai]).collect();
            let acc = |f: fn(&Sample) -> Option<f64>| -> Option<Accumulator> {
                let a: Accumulator = samples.iter().filter_map(f).collect();
                (a.count() > 0).then_some(a)
            };
            let m = acc(|s| s.mse);
            let e = acc(|s| s.pe);
            let s = acc(|s| s.ser);
            let it = acc(|s| s.iters);
            let wall: Accumulator = samples.iter().map(|s| s.wall_ms).collect();
            MetricsRow {
                experiment: config.experiment.name().to_string(),
                point,
                algorithm: alg.name().to_string(),
                trials: samples.len(),
                failures: outcomes.len() - samples.len(),
                mse_linear: m.and_then(|a| a.mean()),
                mse_stderr: m.and_then(|a| a.stderr()),
                pe: e.and_then(|a| a.mean()),
                pe_stderr: e.and_then(|a| a.stderr()),
                ser: s.and_then(|a| a.mean()),
                ser_stderr: s.and_then(|a| a.stderr()),
                iters_mean: it.and_then(|a| a.mean()),
                wall_ms_mean: wall.mean().unwrap_or(0.0),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(id: ExperimentId) -> ExperimentConfig {
        let mut c = ExperimentConfig::default_for(id);
        c.trials = 4;
        c
    }

    #[test]
    fn grid_shapes() {
        let c = ExperimentConfig::default_for(ExperimentId::HadamardSmall);
        assert_eq!(grid(&c).len(), 7);
        let c = ExperimentConfig::default_for(ExperimentId::GaussianScalingK0);
        let g = grid(&c);
        assert_eq!(g.len(), 8);
        assert_eq!(g[0].k0, Some(5));
        assert_eq!(g[7].k0, Some(22));
        let c = ExperimentConfig::default_for(ExperimentId::GardSnrSweep);
        assert_eq!(grid(&c).len(), 14);
    }

    #[test]
    fn every_family_runs() {
        for id in [ExperimentId::HadamardSmall, ExperimentId::Correlated, ExperimentId::MimoOverdetermined, ExperimentId::GardNoutSweep] {
            let mut c = small(id);
            c.snr_db.truncate(2);
            let m = run_experiment(&c, RunOptions::default()).unwrap();
            assert_eq!(m.rows.len(), grid(&c).len() * c.algorithms.len());
            assert_eq!(m.total_failures(), 0, "{id}");
            for r in &m.rows {
                assert!(r.mse_linear.unwrap() >= 0.0);
                assert!(r.pe.is_none_or(|v| (0.0..=1.0).contains(&v)));
                assert!(r.ser.is_none_or(|v| (0.0..=1.0).contains(&v)));
            }
        }
    }

    #[test]
    fn noiseless_hadamard_is_exact() {
        let mut c = small(ExperimentId::HadamardSmall);
        c.noiseless = true;
        c.trials = 50;
        let m = run_experiment(&c, RunOptions::default()).unwrap();
        for r in m.for_algorithm(Algorithm::TfOmp) {
            assert_eq!(r.pe, Some(0.0));
            assert!(r.mse_linear.unwrap() < 1e-20);
        }
    }

    #[test]
    fn qtf_iterations_equal_caps() {
        let mut c = small(ExperimentId::QtfCompare);
        c.trials = 1;
        c.n_list = vec![100, 450];
        let m = run_experiment(&c, RunOptions::default()).unwrap();
        let it = |a, n| m.find(a, |g| g.n == n).unwrap().iters_mean.unwrap();
        assert_eq!(it(Algorithm::TfOmp, 100), 50.0);
        assert_eq!(it(Algorithm::QtfOmp1, 100), 12.0);
        assert_eq!(it(Algorithm::QtfOmp2, 450), 72.0);
    }
}
