//! LMMSE detection of QPSK symbols over a 24 × 16 complex channel, then a
//! sparse correction of the decision errors. No stage is told σ².

use tfpursuit::harness::metrics::Accumulator;
use tfpursuit::harness::mimo::{mimo_instance, mimo_pipeline, CorrectionStage};

fn main() -> tfpursuit::Result<()> {
    let stages = [CorrectionStage::TfOmp, CorrectionStage::OmpK0, CorrectionStage::OmpSigma];
    println!("{:>4} {:>9} {:>9} {:>9} {:>9}", "dB", "lmmse", "+tf-omp", "+omp-k0", "+omp-sig");
    for snr in [4.0, 8.0, 12.0] {
        let mut before = Accumulator::default();
        let mut after = [Accumulator::default(); 3];
        for trial in 0..2000 {
            let inst = mimo_instance(16, 24, snr, trial, false)?;
            let out = mimo_pipeline(&inst.h, &inst.y, &inst.x, &stages)?;
            before.push(out.ser_before);
            for (acc, c) in after.iter_mut().zip(&out.corrections) {
                acc.push(c.ser);
            }
        }
        let m = |a: &Accumulator| a.mean().unwrap_or(0.0);
        println!("{snr:>4} {:>9.5} {:>9.5} {:>9.5} {:>9.5}", m(&before), m(&after[0]), m(&after[1]), m(&after[2]));
    }
    Ok(())
}
