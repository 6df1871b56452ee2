//! Report rendering. CSV floats carry 17 significant digits so a re-parse
//! reproduces the in-memory value exactly.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Flag(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match *self {
            Cell::Num(x) => format_float(x),
            Cell::Int(n) => n.to_string(),
            Cell::Flag(b) => u8::from(b).to_string(),
        }
    }

    fn json(&self) -> Value {
        match *self {
            Cell::Num(x) => json!(x),
            Cell::Int(n) => json!(n),
            Cell::Flag(b) => json!(b),
        }
    }
}

/// Scientific notation with 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))
                .expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    /// Rows as objects keyed by column name.
    pub fn to_json(&self) -> Value {
        self.rows
            .iter()
            .map(|row| {
                self.header
                    .iter()
                    .zip(row)
                    .map(|(k, c)| (k.to_string(), c.json()))
                    .collect::<serde_json::Map<_, _>>()
                    .into()
            })
            .collect::<Vec<Value>>()
            .into()
    }
}

/// The JSON envelope shared by every command.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub inputs: Value,
    pub outputs: Value,
    pub tolerances: Value,
}

impl Report {
    pub fn to_json(&self, wall_clock_seconds: f64) -> Vec<u8> {
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "tolerances": self.tolerances,
            "wall_clock_seconds": wall_clock_seconds,
        });
        let mut bytes = serde_json::to_vec_pretty(&doc).expect("serializable report");
        bytes.push(b'\n');
        bytes
    }
}

/// Where a report goes. The file is created before any work starts so an
/// unwritable path fails fast.
pub enum Sink {
    Stdout,
    File { path: PathBuf, file: File },
}

impl Sink {
    pub fn open(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Sink::Stdout),
            Some(p) => File::create(p)
                .map(|file| Sink::File {
                    path: p.to_path_buf(),
                    file,
                })
                .map_err(|source| CliError::Io {
                    path: p.to_path_buf(),
                    source,
                }),
        }
    }

    pub fn write(self, bytes: &[u8]) -> Result<(), CliError> {
        match self {
            Sink::Stdout => {
                let mut out = io::stdout().lock();
                out.write_all(bytes)
                    .and_then(|_| out.flush())
                    .map_err(|source| CliError::Io {
                        path: PathBuf::from("<stdout>"),
                        source,
                    })
            }
            Sink::File { path, mut file } => file
                .write_all(bytes)
                .and_then(|_| file.sync_all())
                .map_err(|source| CliError::Io { path, source }),
        }
    }

    /// Removes a file that was created but never written.
    pub fn discard(self) {
        if let Sink::File { path, file } = self {
            drop(file);
            let _ = std::fs::remove_file(path);
        }
    }
}
