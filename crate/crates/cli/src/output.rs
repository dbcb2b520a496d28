use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use freerep::Error;

/// A command failure with its exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad input: exit code 2.
    Validation(String),
    /// A size or regime guard refused: exit code 3.
    Guard(String),
    /// A verification ran and did not hold: exit code 1.
    Check(String),
    Other(String),
}

impl Failure {
    pub fn validation(msg: impl Into<String>) -> Self {
        Failure::Validation(msg.into())
    }

    pub fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Guard(_) => 3,
            Failure::Check(_) | Failure::Other(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Validation(m) => write!(f, "invalid input: {m}"),
            Failure::Guard(m) => write!(f, "{m}"),
            Failure::Check(m) => write!(f, "check failed: {m}"),
            Failure::Other(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Guard(_) => Failure::Guard(e.to_string()),
            Error::Invalid(msg) => Failure::Validation(msg),
            Error::GroundSetMismatch { .. } | Error::NonMultiplicative => Failure::Validation(e.to_string()),
            _ => Failure::Other(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

/// Where a command's files go: a directory, or stdout for the primary one.
pub struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<&Path>) -> Result<Self, Failure> {
        if let Some(d) = dir {
            fs::create_dir_all(d)?;
        }
        Ok(Sink {
            dir: dir.map(Path::to_path_buf),
        })
    }

    pub fn has_dir(&self) -> bool {
        self.dir.is_some()
    }

    /// Writes `name` into the output directory, or to stdout when `primary`
    /// and no directory was given. Secondary files are dropped without one.
    pub fn emit(&self, name: &str, bytes: &[u8], primary: bool) -> Result<(), Failure> {
        match &self.dir {
            Some(d) => {
                let path = d.join(name);
                fs::write(&path, bytes)?;
                println!("{}", path.display());
            }
            None if primary => {
                let mut out = std::io::stdout().lock();
                out.write_all(bytes)?;
                out.flush()?;
            }
            None => {}
        }
        Ok(())
    }
}

/// RFC-4180 table with a header row.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, Failure> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| Failure::Other(e.to_string()))
    }
}

pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        String::new()
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn json_bytes(value: &serde_json::Value) -> Result<Vec<u8>, Failure> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s.into_bytes())
}
