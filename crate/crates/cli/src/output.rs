//! JSON and CSV writers.

use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as clap::ValueEnum>::from_str(s, true)
    }
}

#[derive(Serialize)]
struct Document<'a, C: Serialize, R: Serialize> {
    schema_version: u32,
    command: &'a str,
    config: &'a C,
    result: &'a R,
}

/// The JSON document `{schema_version, command, config, result}`.
pub fn json<C: Serialize, R: Serialize>(
    command: &str,
    config: &C,
    result: &R,
) -> Result<Vec<u8>, CliError> {
    let doc = Document {
        schema_version: SCHEMA_VERSION,
        command,
        config,
        result,
    };
    let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

/// One CSV record per row, with a header from the field names.
pub fn csv<R: Serialize>(rows: &[R]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Io(e.to_string())),
    }
}
