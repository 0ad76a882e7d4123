//! Artifact emission and failure classification.

use std::io::Write;
use std::path::{Path, PathBuf};

use commutant_core::Error;
use serde_json::json;

use crate::args::Format;
use crate::commands::Outcome;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_AMBIGUOUS_RANK: i32 = 2;
pub const EXIT_UNSTABLE: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_VALIDATION: i32 = 5;

#[derive(Debug)]
pub enum CliError {
    Core { stage: &'static str, err: Error },
    Io { stage: &'static str, path: PathBuf, err: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => EXIT_IO,
            CliError::Core { err, .. } => match err {
                Error::AmbiguousRank { .. } => EXIT_AMBIGUOUS_RANK,
                Error::UnstableDimension { .. } => EXIT_UNSTABLE,
                Error::InvarianceViolated { .. } | Error::StructureViolation { .. } => EXIT_CHECK_FAILED,
                _ => EXIT_VALIDATION,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core { stage, err } => write!(f, "error [{stage}]: {err}"),
            CliError::Io { stage, path, err } => write!(f, "error [{stage}]: {}: {err}", path.display()),
        }
    }
}

pub fn render(o: &Outcome, format: Format) -> String {
    match format {
        Format::Json => {
            let doc = json!({ "config": o.config, "result": o.result });
            let mut s = serde_json::to_string_pretty(&doc).expect("serialisable");
            s.push('\n');
            s
        }
        Format::Text => {
            let header = serde_json::to_string(&o.config).expect("serialisable");
            format!("# config {header}\n{}", o.text)
        }
    }
}

pub fn emit(o: &Outcome, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let body = render(o, format);
    match out {
        Some(path) => std::fs::write(path, body).map_err(|err| CliError::Io { stage: "write output", path: path.into(), err }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes()).map_err(|err| CliError::Io { stage: "write output", path: "<stdout>".into(), err })
        }
    }
}

pub fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<(), CliError> {
    let io = |err: std::io::Error| CliError::Io { stage: "write csv", path: path.into(), err };
    let mut w = csv::Writer::from_path(path).map_err(|e| io(e.into()))?;
    w.write_record(header).map_err(|e| io(e.into()))?;
    for r in rows {
        w.write_record(&r).map_err(|e| io(e.into()))?;
    }
    w.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(err: Error) -> i32 {
        CliError::Core { stage: "t", err }.exit_code()
    }

    #[test]
    fn taxonomy() {
        assert_eq!(code(Error::AmbiguousRank { gap: 1.0, required: 1e6 }), EXIT_AMBIGUOUS_RANK);
        assert_eq!(code(Error::UnstableDimension { observed: vec![1, 2] }), EXIT_UNSTABLE);
        assert_eq!(code(Error::InvarianceViolated { element: 0, residual: 1.0 }), EXIT_CHECK_FAILED);
        assert_eq!(code(Error::DimMissing("U".into())), EXIT_VALIDATION);
        assert_eq!(code(Error::Parse { position: 0, message: String::new() }), EXIT_VALIDATION);
        let io = CliError::Io { stage: "t", path: "x".into(), err: std::io::Error::other("x") };
        assert_eq!(io.exit_code(), EXIT_IO);
        assert_eq!(EXIT_OK, 0);
    }
}
