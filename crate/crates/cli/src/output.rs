use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use trichonet::{fmt_g9, ErrorKind};

#[derive(Debug)]
pub struct Failure {
    pub kind: ErrorKind,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            kind: ErrorKind::Usage,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Failure {
            kind: ErrorKind::Data,
            message: message.into(),
        }
    }
}

impl From<trichonet::Error> for Failure {
    fn from(e: trichonet::Error) -> Self {
        Failure {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

/// Tags an error with the pipeline phase it came from.
pub fn in_phase(phase: &'static str) -> impl Fn(trichonet::Error) -> Failure {
    move |e| Failure {
        kind: e.kind(),
        message: format!("{phase}: {e}"),
    }
}

/// Everything needed to rerun a command and get identical bytes.
#[derive(Serialize)]
pub struct RunManifest<'a, C: Serialize> {
    pub command: &'a str,
    pub argv: Vec<String>,
    pub config: &'a C,
    pub rng_seed: Option<u64>,
    pub artifacts: Vec<PathBuf>,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub results: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl<'a, C: Serialize> RunManifest<'a, C> {
    pub fn new(command: &'a str, config: &'a C) -> Self {
        RunManifest {
            command,
            argv: std::env::args().skip(1).collect(),
            config,
            rng_seed: None,
            artifacts: Vec::new(),
            version: env!("CARGO_PKG_VERSION"),
            results: None,
            warnings: Vec::new(),
        }
    }

    /// Writes `<primary>.manifest.json` next to the first artifact.
    pub fn write_beside(&self, primary: &Path) -> Result<(), Failure> {
        let mut path = primary.as_os_str().to_owned();
        path.push(".manifest.json");
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        write_file(Path::new(&path), &(json + "\n"))
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

/// Writes to `path`, or stdout when there is none.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => write_file(p, text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::data(format!("stdout: {e}"))),
    }
}

/// CSV with a header and one row per entry, floats at nine significant digits.
pub fn csv_table<'a>(header: &str, rows: impl IntoIterator<Item = (u64, &'a [f64])>) -> String {
    let mut out = format!("{header}\n");
    for (k, values) in rows {
        out.push_str(&k.to_string());
        for v in values {
            write!(out, ",{}", fmt_g9(*v)).unwrap();
        }
        out.push('\n');
    }
    out
}
