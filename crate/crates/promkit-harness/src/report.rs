//! Report emission: JSON summary, flat CSV of per-target results, and a
//! separate timings file, all with deterministic ordering.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use promkit::Result;

use crate::runner::BenchReport;

pub fn results_csv(report: &BenchReport) -> String {
    let mut out = String::from("parameter,method,total_error,max_step_error,online_seconds\n");
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{:.12e},{},{:.12e},{:.12e},{:.6e}",
            r.parameter, r.method, r.total_error, r.max_step_error, r.online_seconds
        );
    }
    out
}

/// Human-readable comparison table for the terminal.
pub fn render_table(report: &BenchReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "problem: {}  qoi: {}  train: {}  test: {}",
        report.problem, report.qoi, report.n_train, report.n_test
    );
    let _ = writeln!(out, "{:>12}  {:>8}  {:>12}  {:>12}", "parameter", "method", "total_err", "max_step");
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{:>12.5}  {:>8}  {:>12.4e}  {:>12.4e}",
            r.parameter, r.method, r.total_error, r.max_step_error
        );
    }
    let _ = writeln!(out, "mean full-order run: {:.3}s", report.mean_hfm_seconds);
    for (name, t) in &report.per_method {
        let _ = writeln!(
            out,
            "{name}: offline {:.3}s (data {:.3}s + train {:.3}s), online {:.4}s/target, speedup online {:.1}x total {:.1}x",
            t.data_generation_seconds + t.training_seconds,
            t.data_generation_seconds,
            t.training_seconds,
            t.mean_online_seconds,
            t.online_speedup,
            t.total_speedup
        );
    }
    out
}

/// Writes `report.json`, `results.csv` and `timings.json` into `dir`.
pub fn write_report(dir: impl AsRef<Path>, report: &BenchReport) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let f = std::fs::File::create(dir.join("report.json"))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(f), report)?;
    let mut csv = std::fs::File::create(dir.join("results.csv"))?;
    csv.write_all(results_csv(report).as_bytes())?;
    let f = std::fs::File::create(dir.join("timings.json"))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(f), &report.per_method)?;
    Ok(())
}
