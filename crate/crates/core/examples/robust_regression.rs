//! Linear regression with a few gross outliers. TF-GARD finds them without
//! the inlier variance; GARD(σ²) needs it; plain LS is swamped.

use tfpursuit::designs::{gaussian_design, noise_for_snr, outliers, sparse_signal, SignalKind};
use tfpursuit::gard::{gard_sigma, tf_gard};
use tfpursuit::linops::least_squares;

fn main() -> tfpursuit::Result<()> {
    let (n, p, n_out) = (250, 30, 10);
    let x = gaussian_design(n, p, 1)?.into_matrix();
    let beta = sparse_signal(p, p, SignalKind::GaussianValues, 2)?.to_dense();
    let clean = &x * &beta;
    let (sigma, w) = noise_for_snr(&clean, 20.0, 3)?;
    let g = outliers(n, n_out, clean.norm_squared(), -10.0, 4)?;
    let y = &clean + &w + g.to_dense();
    println!("outliers at {:?}, magnitude {:.3}, sigma {sigma:.4}", g.support(), g.magnitude());

    let db = |b: &tfpursuit::Vector| 10.0 * (b - &beta).norm_squared().log10();
    println!("ls (no outliers) {:>7.2} dB", db(&least_squares(&x, &(&clean + &w))?));
    println!("ls               {:>7.2} dB", db(&least_squares(&x, &y)?));
    let tf = tf_gard(&x, &y)?;
    println!("tf-gard          {:>7.2} dB  k_f = {}  found {:?}", db(tf.beta()), tf.k_f(), tf.outlier_support_sorted());
    let gs = gard_sigma(&x, &y, sigma)?;
    println!("gard-sigma       {:>7.2} dB  k_f = {}", db(gs.beta()), gs.k_f());
    Ok(())
}
