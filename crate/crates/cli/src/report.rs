//! Experiment reports, input handling and output formats.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: joints_core::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub trait Context<T> {
    fn context(self, what: &str) -> CliResult<T>;
}

impl<T> Context<T> for joints_core::Result<T> {
    fn context(self, what: &str) -> CliResult<T> {
        self.map_err(|source| CliError::Core {
            context: what.to_string(),
            source,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictEntry {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

/// A plot-ready table emitted with `--format csv`.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<I: IntoIterator<Item = S>, S: ToString>(&mut self, row: I) {
        self.rows.push(row.into_iter().map(|s| s.to_string()).collect());
    }

    pub fn to_csv(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Usage(format!("csv: {e}"));
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Usage(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// What a command hands back: its payload, verdicts and optional table.
#[derive(Debug, Default)]
pub struct Outcome {
    pub payload: BTreeMap<String, Value>,
    pub verdicts: Vec<VerdictEntry>,
    pub table: Option<Table>,
    /// Raw artifact written instead of a report (`generate`).
    pub artifact: Option<String>,
}

impl Outcome {
    pub fn put<T: Serialize>(&mut self, key: &str, v: T) {
        self.payload.insert(key.to_string(), serde_json::to_value(v).expect("serializable"));
    }

    pub fn verdict(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.verdicts.push(VerdictEntry {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

#[derive(Debug, Serialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub command: Vec<String>,
    /// SHA-256 of every input read, by role.
    pub input_hashes: BTreeMap<String, String>,
    /// Wall-clock time; the only field that varies between identical runs.
    pub elapsed_ms: u64,
    pub payload: BTreeMap<String, Value>,
    pub verdicts: Vec<VerdictEntry>,
    pub pass: bool,
}

/// Inputs read during a run, with their hashes.
#[derive(Debug, Default)]
pub struct Inputs {
    pub hashes: BTreeMap<String, String>,
    stdin_used: bool,
}

impl Inputs {
    /// Reads `path`, or standard input for `None` and `-`.
    pub fn read(&mut self, role: &str, path: Option<&Path>) -> CliResult<String> {
        let text = match path {
            Some(p) if p != Path::new("-") => std::fs::read_to_string(p).map_err(|source| CliError::Io {
                path: p.display().to_string(),
                source,
            })?,
            _ => {
                if self.stdin_used {
                    return Err(CliError::Usage(format!("standard input already consumed; pass --{role} FILE")));
                }
                self.stdin_used = true;
                let mut s = String::new();
                std::io::stdin().read_to_string(&mut s).map_err(|source| CliError::Io {
                    path: "<stdin>".into(),
                    source,
                })?;
                s
            }
        };
        self.hashes.insert(role.to_string(), hex::encode(Sha256::digest(text.as_bytes())));
        Ok(text)
    }
}

/// Writes `text` to `path`, or standard output for `None` and `-`.
pub fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) if p != Path::new("-") => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

pub fn to_pretty_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}
