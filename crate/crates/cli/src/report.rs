//! Report rows and their CSV/JSON writers.
//!
//! CSV files start with a single `# generated unix=<secs>` line; everything
//! after it depends only on the config and seed. JSON reports are arrays of
//! objects with the CSV column names as keys and carry no timestamp.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::Format;
use crate::CliError;

/// One solution audit: the fixed column set shared by `solve`, `mpa`,
/// `pohozaev` and `sweep`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionRow {
    pub k: f64,
    /// Empty for non-power nonlinearities.
    pub p: Option<f64>,
    /// `<nx>x<ny>`.
    pub grid: String,
    pub level: Option<f64>,
    pub grad_norm: Option<f64>,
    pub pohozaev_lhs: Option<f64>,
    pub pohozaev_rhs: Option<f64>,
    pub rel_residual: Option<f64>,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenRow {
    pub k: f64,
    pub grid: String,
    pub lambda_min: f64,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbedRow {
    pub k: f64,
    pub q: f64,
    pub grid: String,
    pub c_q_estimate: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisRow {
    pub name: String,
    pub passed: bool,
    pub witness_x: Option<f64>,
    pub witness_y: Option<f64>,
    pub witness_xi: Option<f64>,
    pub witness_value: Option<f64>,
    pub note: String,
}

pub fn grid_label(nx: usize, ny: usize) -> String {
    format!("{nx}x{ny}")
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("output: cannot write {}: {e}", path.display()))
}

pub fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut out = BufWriter::new(file);
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    writeln!(out, "# generated unix={secs}").map_err(|e| io_err(path, e))?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn write_json<R: Serialize>(path: &Path, rows: &[R]) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, rows).map_err(|e| io_err(path, e))?;
    writeln!(out)
        .and_then(|_| out.flush())
        .map_err(|e| io_err(path, e))
}

/// Writes `report.csv` or `report.json` into `dir`.
pub fn write_report<R: Serialize>(dir: &Path, format: Format, rows: &[R]) -> Result<(), CliError> {
    let path = dir.join(format!("report.{}", format.extension()));
    match format {
        Format::Csv => write_csv(&path, rows),
        Format::Json => write_json(&path, rows),
    }
}

/// Gnuplot script for `sweep.csv`: level and Pohozaev residual against the
/// swept parameter, one curve per remaining key.
pub fn sweep_script(rows: &[SolutionRow], x_is_p: bool) -> String {
    let (xcol, xlabel) = if x_is_p { (2, "p") } else { (1, "k") };
    let mut curves: Vec<(String, String)> = Vec::new();
    for r in rows {
        let (key, cond) = if x_is_p {
            (
                format!("k={} {}", r.k, r.grid),
                format!("$1=={} && strcol(3) eq \"{}\"", r.k, r.grid),
            )
        } else {
            (r.grid.clone(), format!("strcol(3) eq \"{}\"", r.grid))
        };
        if !curves.iter().any(|(k, _)| *k == key) {
            curves.push((key, cond));
        }
    }
    let plot = |col: usize| {
        curves
            .iter()
            .map(|(key, cond)| {
                format!("  'sweep.csv' using (({cond}) ? ${xcol} : NaN):{col} with linespoints title '{key}'")
            })
            .collect::<Vec<_>>()
            .join(", \\\n")
    };
    format!(
        "# gnuplot -p sweep.gp\n\
         set datafile separator ','\n\
         set datafile missing ''\n\
         set multiplot layout 1,2\n\
         set xlabel '{xlabel}'\n\
         set ylabel 'level'\n\
         set logscale y\n\
         plot \\\n{}\n\
         set ylabel 'rel_residual'\n\
         plot \\\n{}\n\
         unset multiplot\n",
        plot(4),
        plot(8)
    )
}
