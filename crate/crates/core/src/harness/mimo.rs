//! LMMSE detection followed by sparse error correction.
//!
//! Works on the real-valued equivalent of an `N_r × N_t` complex channel:
//! `y_r = H_r x_r + w_r` with `x_r ∈ {±1}^{2N_t}`. The preliminary QPSK
//! decision leaves an error vector `e = x_r − x̂_r` with entries in
//! `{0, ±2}` that is sparse at moderate SNR, so `ỹ = y_r − H_r x̂_r`
//! is a sparse regression on `H_r`.

use nalgebra::{Complex, DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};

use crate::baselines::{lmmse, qpsk_quantize, real_equivalent, sigma_ml, stack_complex};
use crate::designs::noise_for_snr;
use crate::omp::{omp_fixed, omp_sigma, tf_omp, RecoveryResult};
use crate::rng::{derive_seed, rng_from_seed, stream};
use crate::{Matrix, Result, Vector};

use super::metrics::complex_ser;

/// Sparse recovery algorithm used in the correction stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrectionStage {
    TfOmp,
    /// OMP run for the true number of erroneous real entries.
    OmpK0,
    /// OMP stopped at the noise bound built from the ML variance estimate.
    OmpSigma,
}

/// One channel use of the real-equivalent model.
#[derive(Debug, Clone)]
pub struct MimoInstance {
    pub h: Matrix,
    pub x: Vector,
    pub y: Vector,
    /// Per-real-component noise standard deviation.
    pub sigma: f64,
}

/// Draws `H` with i.i.d. CN(0,1) entries and QPSK symbols, then adds
/// real Gaussian noise at `snr_db` relative to `‖H_r x_r‖²/(2N_r)`.
pub fn mimo_instance(nt: usize, nr: usize, snr_db: f64, seed: u64, noiseless: bool) -> Result<MimoInstance> {
    let mut rng = rng_from_seed(derive_seed(seed, &[stream::DESIGN]));
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let hc = DMatrix::<Complex<f64>>::from_fn(nr, nt, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex::new(scale * re, scale * im)
    });
    let h = real_equivalent(&hc);
    let mut rng = rng_from_seed(derive_seed(seed, &[stream::SYMBOLS]));
    let sign = |b: bool| if b { 1.0 } else { -1.0 };
    let xc = DVector::<Complex<f64>>::from_fn(nt, |_, _| {
        let re = sign(rand::Rng::random(&mut rng));
        let im = sign(rand::Rng::random(&mut rng));
        Complex::new(re, im)
    });
    let x = stack_complex(&xc);
    let clean = &h * &x;
    let (sigma, w) = noise_for_snr(&clean, snr_db, derive_seed(seed, &[stream::NOISE]))?;
    let y = if noiseless { clean } else { clean + w };
    Ok(MimoInstance { h, x, y, sigma })
}

/// Result of one correction stage.
#[derive(Debug, Clone)]
pub struct Correction {
    pub stage: CorrectionStage,
    pub symbols: Vector,
    pub ser: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct MimoOutcome {
    pub sigma2_estimate: f64,
    pub preliminary: Vector,
    pub ser_before: f64,
    pub corrections: Vec<Correction>,
}

fn column_norms(h: &Matrix) -> Vector {
    Vector::from_iterator(h.ncols(), h.column_iter().map(|c| c.norm()))
}

/// LMMSE with the ML variance estimate, QPSK decision, then each requested
/// correction stage on `ỹ = y − H x̂`. The corrected vector is
/// `quantize(x̂ + ê)`.
pub fn mimo_pipeline(h: &Matrix, y: &Vector, x_true: &Vector, stages: &[CorrectionStage]) -> Result<MimoOutcome> {
    let sigma2 = sigma_ml(h, y)?;
    let preliminary = qpsk_quantize(&lmmse(h, y, sigma2, 1.0)?);
    let ser_before = complex_ser(&preliminary, x_true)?;
    let y_tilde = y - h * &preliminary;

    let norms = column_norms(h);
    let hn = Matrix::from_fn(h.nrows(), h.ncols(), |i, j| h[(i, j)] / norms[j]);
    let true_errors = (x_true - &preliminary).iter().filter(|&&e| e != 0.0).count();

    let mut corrections = Vec::with_capacity(stages.len());
    for &stage in stages {
        let fit: Option<RecoveryResult> = if y_tilde.norm() == 0.0 {
            None
        } else {
            match stage {
                CorrectionStage::TfOmp => Some(tf_omp(&hn, &y_tilde)?),
                CorrectionStage::OmpK0 if true_errors == 0 => None,
                CorrectionStage::OmpK0 => Some(omp_fixed(&hn, &y_tilde, true_errors)?),
                CorrectionStage::OmpSigma if sigma2 <= 0.0 => None,
                CorrectionStage::OmpSigma => Some(omp_sigma(&hn, &y_tilde, sigma2.sqrt())?),
            }
        };
        let (symbols, iterations) = match fit {
            None => (preliminary.clone(), 0),
            Some(fit) => {
                let e_hat = fit.beta().component_div(&norms);
                (qpsk_quantize(&(&preliminary + e_hat)), fit.iterations())
            }
        };
        let ser = complex_ser(&symbols, x_true)?;
        corrections.push(Correction { stage, symbols, ser, iterations });
    }
    Ok(MimoOutcome { sigma2_estimate: sigma2, preliminary, ser_before, corrections })
}
