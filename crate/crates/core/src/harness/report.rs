//! CSV and plot-data writers.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::{Error, Result};

use super::runner::{GridPoint, MetricsRow, TrialMetrics};

pub const CSV_COLUMNS: [&str; 19] = [
    "experiment",
    "n",
    "p",
    "k0",
    "rho",
    "alpha",
    "snr_db",
    "sir_db",
    "n_out",
    "algorithm",
    "trials",
    "mse_linear",
    "mse_db",
    "mse_stderr",
    "pe",
    "pe_stderr",
    "ser",
    "iters_mean",
    "wall_ms_mean",
];

fn cell<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn record(r: &MetricsRow) -> Vec<String> {
    let g = &r.point;
    vec![
        r.experiment.clone(),
        g.n.to_string(),
        g.p.to_string(),
        cell(g.k0),
        cell(g.rho),
        cell(g.alpha),
        g.snr_db.to_string(),
        cell(g.sir_db),
        cell(g.n_out),
        r.algorithm.clone(),
        r.trials.to_string(),
        cell(r.mse_linear),
        cell(r.mse_db()),
        cell(r.mse_stderr),
        cell(r.pe),
        cell(r.pe_stderr),
        cell(r.ser),
        cell(r.iters_mean),
        r.wall_ms_mean.to_string(),
    ]
}

/// Writes the metrics table as CSV. Floats use the shortest representation
/// that parses back to the same value; inapplicable cells are empty.
pub fn write_csv<W: Write>(metrics: &TrialMetrics, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in &metrics.rows {
        w.write_record(record(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(metrics: &TrialMetrics, path: &Path) -> Result<()> {
    write_csv(metrics, BufWriter::new(File::create(path)?))
}

/// Whitespace-separated columns for gnuplot and friends; missing values are `NaN`.
pub fn write_plotdata<W: Write>(metrics: &TrialMetrics, mut out: W) -> Result<()> {
    writeln!(out, "# {}", CSV_COLUMNS.join(" "))?;
    for r in &metrics.rows {
        let line: Vec<String> = record(r)
            .into_iter()
            .map(|c| if c.is_empty() { "NaN".to_string() } else { c })
            .collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    out.flush()?;
    Ok(())
}

pub fn emit_plotdata(metrics: &TrialMetrics, path: &Path) -> Result<()> {
    write_plotdata(metrics, BufWriter::new(File::create(path)?))
}

/// Parses a file written by [`write_csv`]. Columns not stored in the CSV
/// (`failures`, `ser_stderr`) come back as zero and `None`.
pub fn read_csv<R: std::io::Read>(input: R) -> Result<TrialMetrics> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != CSV_COLUMNS {
        return Err(Error::Io(format!("unexpected CSV header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let bad = |i: usize| Error::Io(format!("bad value `{}` in column {}", &rec[i], CSV_COLUMNS[i]));
        let opt_f = |i: usize| -> Result<Option<f64>> {
            if rec[i].is_empty() { Ok(None) } else { rec[i].parse().map(Some).map_err(|_| bad(i)) }
        };
        let opt_u = |i: usize| -> Result<Option<usize>> {
            if rec[i].is_empty() { Ok(None) } else { rec[i].parse().map(Some).map_err(|_| bad(i)) }
        };
        let req_f = |i: usize| opt_f(i)?.ok_or_else(|| bad(i));
        let req_u = |i: usize| opt_u(i)?.ok_or_else(|| bad(i));
        rows.push(MetricsRow {
            experiment: rec[0].to_string(),
            point: GridPoint {
                n: req_u(1)?,
                p: req_u(2)?,
                k0: opt_u(3)?,
                rho: opt_f(4)?,
                alpha: opt_f(5)?,
                snr_db: req_f(6)?,
                sir_db: opt_f(7)?,
                n_out: opt_u(8)?,
            },
            algorithm: rec[9].to_string(),
            trials: req_u(10)?,
            failures: 0,
            mse_linear: opt_f(11)?,
            mse_stderr: opt_f(13)?,
            pe: opt_f(14)?,
            pe_stderr: opt_f(15)?,
            ser: opt_f(16)?,
            ser_stderr: None,
            iters_mean: opt_f(17)?,
            wall_ms_mean: req_f(18)?,
        });
    }
    Ok(TrialMetrics { rows })
}
