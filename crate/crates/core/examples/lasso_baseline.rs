//! LASSO with λ = 2σ√(2 ln p) and LS debiasing, next to OMP(σ²) and the
//! tuning-free pursuit. Only TF-OMP runs without knowing σ.

use tfpursuit::baselines::{lasso_debiased, lasso_lambda, oracle_ls};
use tfpursuit::designs::{gaussian_design, noise_for_snr, sparse_signal, SignalKind};
use tfpursuit::omp::{omp_sigma, tf_omp};

fn main() -> tfpursuit::Result<()> {
    let (n, p, k0) = (200, 500, 10);
    let x = gaussian_design(n, p, 11)?.into_matrix();
    let signal = sparse_signal(p, k0, SignalKind::PmOne, 12)?;
    let beta = signal.to_dense();
    let clean = &x * &beta;
    let (sigma, w) = noise_for_snr(&clean, 10.0, 13)?;
    let y = clean + w;

    let lambda = lasso_lambda(sigma, p);
    let lasso = lasso_debiased(&x, &y, lambda)?;
    println!(
        "lasso      lambda {lambda:.4}  sweeps {}  converged {}  |support| {:>2}  mse {:.4e}",
        lasso.solution.sweeps,
        lasso.solution.converged,
        lasso.support.len(),
        (&lasso.beta - &beta).norm_squared()
    );
    let om = omp_sigma(&x, &y, sigma)?;
    println!("omp-sigma  |support| {:>2}  mse {:.4e}", om.k_star(), (om.beta() - &beta).norm_squared());
    let tf = tf_omp(&x, &y)?;
    println!("tf-omp     |support| {:>2}  mse {:.4e}", tf.k_star(), (tf.beta() - &beta).norm_squared());
    let oracle = oracle_ls(&x, &y, signal.support())?;
    println!("oracle-ls  |support| {:>2}  mse {:.4e}", k0, (oracle - &beta).norm_squared());
    Ok(())
}
