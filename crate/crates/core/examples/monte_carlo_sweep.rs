//! Runs a small catalog experiment in parallel and writes the CSV table to
//! stdout. Same config and seed give the same bytes on any thread count.
//!
//!     cargo run --release --example monte_carlo_sweep > correlated.csv

use tfpursuit::harness::{run_experiment, write_csv, ExperimentConfig, RunOptions};

fn main() -> tfpursuit::Result<()> {
    let cfg = ExperimentConfig::from_toml(
        r#"
        experiment = "correlated"
        rho_list = [0.0, 0.5, 0.75]
        snr_db = [10, 20, 30]
        trials = 200
        seed = 42
        algorithms = ["tf-omp", "omp-k0", "omp-sigma", "lasso"]
        "#,
    )?;
    let metrics = run_experiment(&cfg, RunOptions::default())?;
    eprintln!("{} rows, {} failed runs", metrics.rows.len(), metrics.total_failures());
    write_csv(&metrics, std::io::stdout().lock())
}
