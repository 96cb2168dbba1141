//! TF-OMP on the [I, H]/√n dictionary: exact recovery without noise, then
//! the same support under increasing noise.
//!
//!     cargo run --example hadamard_recovery

use tfpursuit::designs::{hadamard_dictionary, mutual_coherence, noise_for_snr, sparse_signal, SignalKind};
use tfpursuit::omp::{omp_fixed, tf_omp};

fn main() -> tfpursuit::Result<()> {
    let x = hadamard_dictionary(32)?.into_matrix();
    println!("coherence {:.4} (1/sqrt(32) = {:.4})", mutual_coherence(&x), 1.0 / 32f64.sqrt());

    let signal = sparse_signal(64, 3, SignalKind::PmOne, 17)?;
    let clean = &x * signal.to_dense();
    println!("true support {:?}", signal.support());

    let fit = tf_omp(&x, &clean)?;
    println!("noiseless    k* = {}  support {:?}", fit.k_star(), fit.support_sorted());

    for snr in [30.0, 20.0, 10.0, 5.0, 0.0] {
        let (sigma, w) = noise_for_snr(&clean, snr, 5)?;
        let y = &clean + w;
        let tf = tf_omp(&x, &y)?;
        let k0 = omp_fixed(&x, &y, 3)?;
        let err = (tf.beta() - signal.to_dense()).norm_squared();
        println!(
            "{snr:>4} dB  sigma {sigma:.4}  tf-omp k* = {:>2} {:?}  mse {err:.2e}  omp(k0) {:?}",
            tf.k_star(),
            tf.support_sorted(),
            k0.support_sorted()
        );
    }
    Ok(())
}
