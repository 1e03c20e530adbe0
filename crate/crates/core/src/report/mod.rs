//! Configuration, subcommands and report emission.

pub mod cli;
pub mod config;

use std::io::Write;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{
    eigenvalue_bound_d1, eigenvalue_bound_explicit, BoundKind, BoundParams, BoundSequence,
};
use crate::error::{Error, Result};
use crate::galerkin::assemble;
use crate::spectrum::{
    convergence_study, eigenvalues, spectrum_with_doubling, SpectrumReport,
};

pub use config::{Format, ParamsOverride, RunConfig};

/// Relative slack allowed when comparing an eigenvalue with its bound.
pub const VERIFY_TOLERANCE: f64 = 1e-9;
/// Environment variable read for the worker thread count.
pub const THREADS_ENV: &str = "TRANSFER_SPECTRA_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    ConfigError = 2,
    NumericalFailure = 3,
    BoundViolation = 4,
}

impl ExitStatus {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn of_error(error: &Error) -> Self {
        match error {
            Error::InvalidParameter { .. }
            | Error::Config(_)
            | Error::Json(_)
            | Error::Io(_)
            | Error::MissingTailBound
            | Error::ContractionViolated { .. } => ExitStatus::ConfigError,
            Error::Overflow { .. }
            | Error::OutsideUnitBall { .. }
            | Error::NonFinite { .. }
            | Error::Assembly { .. }
            | Error::EigenSolver { .. } => ExitStatus::NumericalFailure,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:e}"),
            Cell::Bool(v) => v.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(v) => json!(v.to_string()),
            Cell::Bool(v) => json!(v),
            Cell::Empty => Value::Null,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Float(v) => Some(v),
            Cell::Int(v) => Some(v as f64),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match *self {
            Cell::Bool(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Cell in row `row` of the named column.
    pub fn get(&self, row: usize, name: &str) -> Option<&Cell> {
        self.rows.get(row)?.get(self.column(name)?)
    }

    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn to_json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    Value::Object(
                        self.columns
                            .iter()
                            .cloned()
                            .zip(row.iter().map(Cell::json))
                            .collect(),
                    )
                })
                .collect(),
        )
    }
}

/// Result of one subcommand.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub table: Table,
    pub summary: Value,
    pub status: ExitStatus,
    pub seconds: f64,
}

impl Report {
    pub fn to_json(&self, config: &RunConfig) -> Value {
        json!({
            "meta": {
                "version": env!("CARGO_PKG_VERSION"),
                "command": self.command,
                "config_version": config.version,
                "config_hash": config.hash(),
                "timings": { "total_seconds": self.seconds },
            },
            "summary": self.summary,
            "rows": self.table.to_json_rows(),
        })
    }

    /// CSV carries the table only; JSON adds meta and summary.
    pub fn write(&self, config: &RunConfig, format: Format, mut out: impl Write) -> Result<()> {
        match format {
            Format::Csv => self.table.write_csv(out),
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, &self.to_json(config))?;
                writeln!(out)?;
                Ok(())
            }
        }
    }
}

/// Sizes the global worker pool from [`THREADS_ENV`]; returns the count
/// applied, if any.
pub fn configure_threads() -> Result<Option<usize>> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::Config(format!("{THREADS_ENV}: expected a positive integer, got `{value}`")))?;
    // a second initialisation in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(Some(threads))
}

/// Bound table for `n = 1..=n_max`.
pub fn cmd_bounds(config: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let resolved = config.resolve_params()?;
    let p = resolved.params;
    let n_max = config.n_max;
    let d1 = p.d == 1;
    let mut kinds = vec![BoundKind::ExplicitGeneral];
    if d1 {
        kinds.push(BoundKind::ExplicitD1);
    }
    kinds.extend([BoundKind::GeommeanWeyl, BoundKind::ApproxNumber]);
    let sequences: Vec<BoundSequence> = kinds
        .iter()
        .map(|&k| BoundSequence::generate(k, p, n_max as u64))
        .collect::<Result<_>>()?;

    let mut table = Table::new(&[
        "n",
        "explicit_general",
        "explicit_d1",
        "geommean_weyl",
        "approx_number",
    ]);
    for n in 1..=n_max {
        let mut row = vec![Cell::Int(n as u64)];
        let mut seq = sequences.iter();
        row.push(Cell::Float(seq.next().unwrap().values[n - 1]));
        row.push(if d1 {
            Cell::Float(seq.next().unwrap().values[n - 1])
        } else {
            Cell::Empty
        });
        row.push(Cell::Float(seq.next().unwrap().values[n - 1]));
        row.push(Cell::Float(seq.next().unwrap().values[n - 1]));
        table.rows.push(row);
    }
    Ok(Report {
        command: "bounds",
        table,
        summary: json!({
            "params": p,
            "r_source": resolved.r_source,
            "W_source": resolved.w_source,
            "n_max": n_max,
        }),
        status: ExitStatus::Success,
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn require_d1(p: &BoundParams) -> Result<()> {
    if p.d != 1 {
        return Err(Error::Config(format!(
            "params.d: spectra are computed only for d = 1, got d = {}",
            p.d
        )));
    }
    Ok(())
}

fn spectrum_table(report: &SpectrumReport, p: &BoundParams) -> Result<Table> {
    let mut table = Table::new(&[
        "n",
        "re",
        "im",
        "modulus",
        "bound_d1",
        "bound_explicit",
        "pass",
        "significant",
    ]);
    for (i, l) in report.eigenvalues.iter().enumerate() {
        let n = i + 1;
        let bound = eigenvalue_bound_d1(n as u64, p.r, p.w)?;
        table.rows.push(vec![
            Cell::Int(n as u64),
            Cell::Float(l.re),
            Cell::Float(l.im),
            Cell::Float(l.norm()),
            Cell::Float(bound),
            Cell::Float(eigenvalue_bound_explicit(n as u64, p)),
            Cell::Bool(l.norm() <= bound * (1.0 + VERIFY_TOLERANCE)),
            Cell::Bool(report.is_significant(n)),
        ]);
    }
    Ok(table)
}

/// Assembles at the configured size and reports the spectrum against the
/// bounds. Writes the matrix as JSON when `output.matrix_path` is set.
pub fn cmd_spectrum(config: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let p = config.resolve_params()?.params;
    require_d1(&p)?;
    let family = config.family()?;
    let matrix = assemble(&family, &p, &config.numerics.assembly_options())?;
    let report = eigenvalues(&matrix)?;
    if let Some(path) = &config.output.matrix_path {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer(std::io::BufWriter::new(file), &matrix.to_json())?;
    }
    let table = spectrum_table(&report, &p)?;
    Ok(Report {
        command: "spectrum",
        table,
        summary: json!({
            "params": p,
            "size": matrix.size(),
            "samples": matrix.meta.samples,
            "rho": matrix.meta.rho,
            "branch_cut": matrix.meta.branch_cut,
            "significance_floor": report.significance_floor,
            "significant": report.significant_count(),
        }),
        status: ExitStatus::Success,
        seconds: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifySummary {
    pub checked: usize,
    pub passed: usize,
    pub skipped_insignificant: usize,
    pub skipped_unstable: usize,
    pub failed: Vec<usize>,
}

/// Checks `|lambda_n| <= bound_d1(n) (1 + 1e-9)` for every significant
/// index whose eigenvalue is stable against a larger truncation.
pub fn verify_report(report: &SpectrumReport, p: &BoundParams) -> Result<(Table, VerifySummary)> {
    let mut table = spectrum_table(report, p)?;
    table.columns.extend(["stable".to_string(), "checked".to_string()]);
    let mut summary = VerifySummary {
        checked: 0,
        passed: 0,
        skipped_insignificant: 0,
        skipped_unstable: 0,
        failed: Vec::new(),
    };
    for (i, row) in table.rows.iter_mut().enumerate() {
        let n = i + 1;
        let significant = report.is_significant(n);
        let stable = report.is_stable(n);
        let checked = significant && stable;
        if !significant {
            summary.skipped_insignificant += 1;
        } else if !stable {
            summary.skipped_unstable += 1;
        } else {
            summary.checked += 1;
            if row[6] == Cell::Bool(true) {
                summary.passed += 1;
            } else {
                summary.failed.push(n);
            }
        }
        row.push(Cell::Bool(stable));
        row.push(Cell::Bool(checked));
    }
    Ok((table, summary))
}

pub fn cmd_verify(config: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let p = config.resolve_params()?.params;
    require_d1(&p)?;
    let family = config.family()?;
    let (report, _) = spectrum_with_doubling(&family, &p, &config.numerics.assembly_options())?;
    let (table, summary) = verify_report(&report, &p)?;
    let status = if summary.failed.is_empty() {
        ExitStatus::Success
    } else {
        ExitStatus::BoundViolation
    };
    Ok(Report {
        command: "verify",
        table,
        summary: json!({ "params": p, "size": config.numerics.size, "result": summary }),
        status,
        seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn cmd_converge(config: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let p = config.resolve_params()?.params;
    require_d1(&p)?;
    let family = config.family()?;
    let sizes = &config.numerics.sizes;
    let mut base = config.numerics.assembly_options();
    base.size = sizes[0];
    let study = convergence_study(&family, &p, sizes, &base)?;

    let mut columns = vec!["n".to_string()];
    for s in sizes {
        columns.push(format!("re_{s}"));
        columns.push(format!("im_{s}"));
    }
    for w in sizes.windows(2) {
        columns.push(format!("delta_{}_{}", w[0], w[1]));
    }
    columns.push("stable".into());
    let mut table = Table {
        columns,
        rows: Vec::new(),
    };
    for row in &study.rows {
        let mut cells = vec![Cell::Int(row.n as u64)];
        for v in &row.values {
            match v {
                Some(v) => cells.extend([Cell::Float(v.re), Cell::Float(v.im)]),
                None => cells.extend([Cell::Empty, Cell::Empty]),
            }
        }
        cells.extend(row.deltas.iter().map(|d| d.map_or(Cell::Empty, Cell::Float)));
        cells.push(Cell::Bool(row.stable));
        table.rows.push(cells);
    }
    Ok(Report {
        command: "converge",
        table,
        summary: json!({
            "params": p,
            "sizes": study.sizes,
            "branch_cuts": study.branch_cuts,
            "stable": study.stable_indices(),
        }),
        status: ExitStatus::Success,
        seconds: start.elapsed().as_secs_f64(),
    })
}
