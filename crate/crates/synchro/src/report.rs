//! CSV and JSON output. Every CSV starts with one `#` metadata line so runs
//! can be told apart; readers skip it with `comment(Some(b'#'))`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spec::{ExperimentSpec, RuleName};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub name: String,
    pub model: String,
    pub tau: f64,
    pub period_steps: u64,
    pub k: u64,
    pub epsilon: f64,
    pub r0: f64,
    pub radius_rule: RuleName,
    pub lambda_stride: u64,
    pub record_stride: u64,
    pub seed: u64,
    /// How balls cross a guard, for models with jumps.
    pub jump_rule: Option<&'static str>,
    pub version: &'static str,
}

impl Metadata {
    pub fn of(spec: &ExperimentSpec) -> Self {
        Metadata {
            name: spec.name.clone(),
            model: spec.model.clone(),
            tau: spec.config.tau,
            period_steps: spec.config.period_steps,
            k: spec.config.k,
            epsilon: spec.config.epsilon,
            r0: spec.config.r0,
            radius_rule: spec.tube.radius_rule,
            lambda_stride: spec.tube.lambda_stride,
            record_stride: spec.tube.record_stride,
            seed: spec.seed,
            jump_rule: (spec.model == "biped").then_some("center-crossing+jacobian-inflation"),
            version: VERSION,
        }
    }

    pub fn header_line(&self) -> String {
        let rule = match self.radius_rule {
            RuleName::LogNorm => "log-norm",
            RuleName::Variational => "variational",
            RuleName::Compounded => "compounded",
        };
        let jump = self.jump_rule.map(|j| format!(" jump={j}")).unwrap_or_default();
        format!(
            "# synchro {} name={} model={} tau={} T={} k={} epsilon={} r0={} rule={} lambda_stride={} record_stride={} seed={}{jump}",
            self.version,
            self.name,
            self.model,
            num(self.tau),
            self.period_steps,
            self.k,
            num(self.epsilon),
            num(self.r0),
            rule,
            self.lambda_stride,
            self.record_stride,
            self.seed
        )
    }
}

/// Shortest round-trip form, scientific outside `[1e-3, 1e6)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-3..1e6).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Writes a CSV table preceded by the metadata line.
pub fn write_csv(path: &Path, meta: &Metadata, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{}", meta.header_line()).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<PathBuf> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out).map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}

pub fn write_text(path: &Path, text: &str) -> Result<PathBuf> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}

/// Data rows of a CSV written by [`write_csv`], header excluded.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(file);
    let header = r.headers()?.iter().map(str::to_string).collect();
    let rows = r.records().map(|rec| rec.map(|r| r.iter().map(str::to_string).collect())).collect::<Result<_, _>>()?;
    Ok((header, rows))
}

/// One line of a comparison against reference values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub tolerance: String,
    pub pass: bool,
}

impl Check {
    /// `|actual − expected| ≤ tol`.
    pub fn close(name: impl Into<String>, expected: f64, actual: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            expected: num(expected),
            actual: num(actual),
            tolerance: format!("±{}", num(tol)),
            pass: (actual - expected).abs() <= tol,
        }
    }

    /// `actual ≤ bound`.
    pub fn at_most(name: impl Into<String>, bound: f64, actual: f64) -> Self {
        Check {
            name: name.into(),
            expected: format!("<= {}", num(bound)),
            actual: num(actual),
            tolerance: String::from("hard"),
            pass: actual <= bound,
        }
    }

    /// `lo ≤ actual ≤ hi`.
    pub fn within(name: impl Into<String>, lo: f64, hi: f64, actual: f64) -> Self {
        Check {
            name: name.into(),
            expected: format!("[{}, {}]", num(lo), num(hi)),
            actual: num(actual),
            tolerance: String::from("range"),
            pass: lo <= actual && actual <= hi,
        }
    }

    pub fn flag(name: impl Into<String>, actual: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            expected: String::from("true"),
            actual: format!("{actual}"),
            tolerance: detail.into(),
            pass: actual,
        }
    }
}

pub fn write_checks(path: &Path, meta: &Metadata, checks: &[Check]) -> Result<PathBuf> {
    let rows: Vec<Vec<String>> = checks
        .iter()
        .map(|c| vec![c.name.clone(), c.expected.clone(), c.actual.clone(), c.tolerance.clone(), c.pass.to_string()])
        .collect();
    write_csv(path, meta, &["check", "expected", "actual", "tolerance", "pass"], &rows)
}
