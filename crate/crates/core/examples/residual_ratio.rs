//! Prints t(k) = ‖r^(k)‖²/‖r^(k−1)‖² along an OMP run. The dip at k = k0
//! deepens as the SNR grows, which is what the tuning-free rule picks up.

use tfpursuit::designs::{hadamard_dictionary, noise_for_snr, sparse_signal, SignalKind};
use tfpursuit::omp::{run_omp, select_tf, t_statistic, tf_kmax};

fn main() -> tfpursuit::Result<()> {
    let x = hadamard_dictionary(32)?.into_matrix();
    let signal = sparse_signal(64, 3, SignalKind::PmOne, 1)?;
    let clean = &x * signal.to_dense();

    for snr in [10.0, 30.0] {
        let (_, w) = noise_for_snr(&clean, snr, 2)?;
        let trace = run_omp(&x, &(&clean + w), tf_kmax(32))?;
        let t = t_statistic(&trace)?;
        println!("SNR {snr} dB, k* = {}", select_tf(&trace)?);
        for (k, v) in t.iter().enumerate().take(8) {
            let bar = "#".repeat((v * 50.0).round() as usize);
            println!("  k = {:>2}  t = {v:.4}  {bar}", k + 1);
        }
    }
    Ok(())
}
