//! Coherence, ERC, brute-force RIC and the noise levels below which greedy
//! recovery is guaranteed, for a few small designs.

use tfpursuit::designs::{
    correlated_design, erc_coefficient, gaussian_design, hadamard_dictionary, ric_bruteforce, sparse_signal, SignalKind,
};
use tfpursuit::harness::diagnostics::{coherence_report, gamma_estimate};
use tfpursuit::omp::recovery_thresholds;

fn main() -> tfpursuit::Result<()> {
    let designs = [
        ("hadamard 32x64", hadamard_dictionary(32)?),
        ("gaussian 32x64", gaussian_design(32, 64, 1)?),
        ("rho=0.5 32x64", correlated_design(32, 64, 0.5, 1)?),
    ];
    for (name, d) in &designs {
        let x = d.matrix();
        let c = coherence_report(x);
        let signal = sparse_signal(64, 3, SignalKind::PmOne, 9)?;
        let erc = erc_coefficient(x, signal.support())?;
        println!("{name}: mu {:.4}  welch {:.4}  MIC k0 <= {}  erc {erc:.4}", c.mu, c.welch, c.mic_max_k0);
        let th = recovery_thresholds(x, &signal)?;
        if th.erc_holds() {
            println!("    eps_a {:.4}  eps_b {:.4}", th.eps_a, th.eps_b);
            let g = gamma_estimate(x, &signal, 0.02, 200, 3)?;
            println!("    gamma (estimate over {} draws) {:.4}  eps_c {:.4}", g.draws, g.gamma, g.eps_c);
        } else {
            println!("    erc violated on this support, eps_b {:.4}", th.eps_b);
        }
    }

    let small = gaussian_design(10, 16, 5)?;
    let ric = ric_bruteforce(small.matrix(), 3)?;
    println!("10x16 gaussian: delta_3 = {:.3} (eigenvalues in [{:.3}, {:.3}])", ric.delta, ric.lambda_min, ric.lambda_max);
    Ok(())
}
