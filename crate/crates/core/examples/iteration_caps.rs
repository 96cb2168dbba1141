//! Iteration caps of TF-OMP and the two quicker variants for p = 500, and
//! what the cheaper caps cost in accuracy on one Gaussian instance.

use std::time::Instant;

use tfpursuit::designs::{gaussian_design, noise_for_snr, sparse_signal, SignalKind};
use tfpursuit::omp::{qtf_kmax1, qtf_kmax2, qtf_omp1, qtf_omp2, tf_kmax, tf_omp, RecoveryResult};

fn main() -> tfpursuit::Result<()> {
    let p = 500;
    println!("{:>5} {:>8} {:>9} {:>9}", "n", "TF-OMP", "QTF-OMP1", "QTF-OMP2");
    for n in (100..=450).step_by(50) {
        println!("{n:>5} {:>8} {:>9} {:>9}", tf_kmax(n), qtf_kmax1(n, p)?, qtf_kmax2(n, p)?);
    }

    let n = 300;
    let x = gaussian_design(n, p, 3)?.into_matrix();
    let signal = sparse_signal(p, 10, SignalKind::PmOne, 4)?;
    let clean = &x * signal.to_dense();
    let (_, w) = noise_for_snr(&clean, 10.0, 5)?;
    let y = clean + w;
    let runs: [(&str, fn(&_, &_) -> tfpursuit::Result<RecoveryResult>); 3] =
        [("tf-omp", tf_omp), ("qtf-omp1", qtf_omp1), ("qtf-omp2", qtf_omp2)];
    println!("\nn = {n}, k0 = 10, 10 dB");
    for (name, f) in runs {
        let start = Instant::now();
        let fit = f(&x, &y)?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        let err = (fit.beta() - signal.to_dense()).norm_squared();
        println!("{name:<9} iterations {:>3}  k* {:>2}  mse {err:.3e}  {ms:.1} ms", fit.iterations(), fit.k_star());
    }
    Ok(())
}
