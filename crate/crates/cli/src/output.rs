//! CSV and JSON emitters.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A float that serializes as a number when finite and as `"inf"`, `"-inf"`
/// or `"nan"` otherwise, so that CSV and JSON agree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_finite() {
            s.serialize_f64(v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

impl From<f64> for Num {
    fn from(v: f64) -> Self {
        Num(v)
    }
}

/// Where the output goes; the file is opened before any work is done so an
/// unwritable path fails fast.
pub enum Sink {
    Stdout,
    File(PathBuf, BufWriter<File>),
}

impl Sink {
    pub fn open(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Sink::Stdout),
            Some(p) => {
                let f = File::create(p).map_err(|e| CliError::Output(format!("cannot write {}: {e}", p.display())))?;
                Ok(Sink::File(p.to_path_buf(), BufWriter::new(f)))
            }
        }
    }

    fn write_all(&mut self, bytes: &[u8]) -> Result<(), CliError> {
        let res = match self {
            Sink::Stdout => {
                let mut out = io::stdout().lock();
                out.write_all(bytes).and_then(|_| out.flush())
            }
            Sink::File(_, w) => w.write_all(bytes).and_then(|_| w.flush()),
        };
        res.map_err(|e| CliError::Output(format!("{}: {e}", self.describe())))
    }

    fn describe(&self) -> String {
        match self {
            Sink::Stdout => "stdout".into(),
            Sink::File(p, _) => p.display().to_string(),
        }
    }
}

/// Serializes `records` as CSV (header row, LF endings) or as
/// `{"meta": …, "records": […]}`.
pub fn emit<R: Serialize>(sink: &mut Sink, format: Format, meta: Value, records: &[R]) -> Result<(), CliError> {
    let bytes = match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            for r in records {
                w.serialize(r).map_err(|e| CliError::Other(e.to_string()))?;
            }
            w.into_inner().map_err(|e| CliError::Other(e.to_string()))?
        }
        Format::Json => {
            let doc = json!({ "meta": meta, "records": records });
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Other(e.to_string()))?;
            s.push('\n');
            s.into_bytes()
        }
    };
    sink.write_all(&bytes)
}
