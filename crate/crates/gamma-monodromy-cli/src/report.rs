//! Report envelopes, complex-number encoding and exit codes.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use gamma_monodromy::numerics::CVector;
use gamma_monodromy::GmError;
use num_complex::Complex64 as Cx;
use serde::Serialize;

pub const SCHEMA: &str = "gamma-monodromy/1";

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    Breach = 1,
    Numeric = 2,
    Usage = 64,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
}

impl From<GmError> for CliError {
    fn from(e: GmError) -> Self {
        match e {
            GmError::InvalidArgument(m) => CliError::Usage(m),
            GmError::UnsupportedSpace(m) => CliError::Usage(format!("operation not supported for {m}")),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Numeric(format!("i/o error: {e}"))
    }
}

impl CliError {
    pub fn exit(&self) -> Exit {
        match self {
            CliError::Usage(_) => Exit::Usage,
            CliError::Numeric(_) => Exit::Numeric,
        }
    }
}

/// `[re, im]`.
pub fn cx(z: Cx) -> [f64; 2] {
    [z.re, z.im]
}

pub fn cvec(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|&z| cx(z)).collect()
}

/// A measured quantity, its tolerance and whether it is within it.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub tol: f64,
    pub passed: bool,
}

impl Check {
    pub fn below(label: impl Into<String>, value: f64, tol: f64) -> Self {
        Check { label: label.into(), value, tol, passed: value.is_finite() && value < tol }
    }

    /// A count or flag check that passes when `ok` holds; `value` is reported as is.
    pub fn flag(label: impl Into<String>, value: f64, ok: bool) -> Self {
        Check { label: label.into(), value, tol: 0.0, passed: ok }
    }
}

/// Top-level JSON document.
#[derive(Debug, Serialize)]
pub struct Envelope<T: Serialize> {
    pub schema: &'static str,
    pub command: &'static str,
    pub passed: bool,
    pub report: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(command: &'static str, passed: bool, report: T) -> Self {
        Envelope { schema: SCHEMA, command, passed, report }
    }
}

/// Open the output destination: a file when a path is given, stdout otherwise.
pub fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_json<T: Serialize>(path: Option<&Path>, doc: &T) -> Result<(), CliError> {
    let mut out = sink(path)?;
    serde_json::to_writer_pretty(&mut out, doc).map_err(|e| CliError::Numeric(format!("serialization failed: {e}")))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}
