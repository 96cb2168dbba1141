use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tfpursuit::harness::diagnostics::{
    build_design, coherence_report, erc_report, format_thresholds, thresholds_report, DesignChoice,
};
use tfpursuit::harness::{emit_csv, emit_plotdata, run_experiment, ExperimentConfig, ExperimentId, RunOptions};
use tfpursuit::omp::{qtf_kmax1, qtf_kmax2, tf_kmax};
use tfpursuit::Error;

#[derive(Parser)]
#[command(name = "tfpursuit", version, about = "Tuning-free greedy sparse recovery experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        /// Record wall-clock time per algorithm (output is then not reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Print the experiment catalog with default parameters.
    List,
    /// Print design diagnostics.
    Diag {
        #[arg(value_enum)]
        what: DiagKind,
        #[arg(long)]
        design: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        rho: f64,
        #[arg(long, default_value_t = 3)]
        k0: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Print the iteration caps for p = 500.
    Table5,
}

#[derive(Clone, Copy, ValueEnum)]
enum DiagKind {
    Coherence,
    Erc,
    Thresholds,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 1,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { config, trials, seed, out, threads, timing } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            cfg.validate()?;
            if threads == Some(0) {
                return Err(Error::Config("--threads must be at least 1".into()));
            }
            std::fs::create_dir_all(&out)?;
            let metrics = run_experiment(&cfg, RunOptions { threads, timing })?;
            let csv = out.join(format!("{}.csv", cfg.experiment));
            let dat = out.join(format!("{}.dat", cfg.experiment));
            emit_csv(&metrics, &csv)?;
            emit_plotdata(&metrics, &dat)?;
            let failures = metrics.total_failures();
            println!("{} rows -> {}", metrics.rows.len(), csv.display());
            if failures > 0 {
                eprintln!("warning: {failures} algorithm runs failed and were excluded");
            }
        }
        Command::List => {
            for id in ExperimentId::ALL {
                let c = ExperimentConfig::default_for(id);
                println!("{:<22} {}", id.name(), id.description());
                let algs: Vec<_> = c.algorithms.iter().map(|a| a.name()).collect();
                println!("{:<22} trials = {}, snr_db = {:?}, algorithms = {}", "", c.trials, c.snr_db, algs.join(" "));
            }
        }
        Command::Diag { what, design, n, p, rho, k0, seed } => {
            let kind: DesignChoice = design.parse()?;
            let x = build_design(kind, n, p, rho, seed).map_err(|e| match e {
                Error::InvalidDimension(m) | Error::InvalidParameter(m) => Error::Config(m),
                other => other,
            })?;
            match what {
                DiagKind::Coherence => println!("{}", coherence_report(x.matrix())),
                DiagKind::Erc => println!("{}", erc_report(x.matrix(), k0, seed)?),
                DiagKind::Thresholds => {
                    let (sig, th) = thresholds_report(x.matrix(), k0, seed)?;
                    println!("{}", format_thresholds(&sig, &th));
                }
            }
        }
        Command::Table5 => {
            let p = 500;
            println!("{:>5} {:>8} {:>9} {:>9}", "n", "TF-OMP", "QTF-OMP1", "QTF-OMP2");
            for n in (100..=450).step_by(50) {
                println!("{n:>5} {:>8} {:>9} {:>9}", tf_kmax(n), qtf_kmax1(n, p)?, qtf_kmax2(n, p)?);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
