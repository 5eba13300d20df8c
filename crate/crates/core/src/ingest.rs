//! Degree histograms from edge lists and from `degree,count` CSV files.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::DegreeHistogram;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Delimiter {
    /// Comma if the line has one, otherwise any run of whitespace.
    #[default]
    Auto,
    Whitespace,
    Comma,
    Tab,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Directedness {
    Directed,
    #[default]
    Undirected,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeMode {
    In,
    Out,
    #[default]
    Total,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelfLoopPolicy {
    Drop,
    #[default]
    Count,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeListSpec {
    pub path: PathBuf,
    pub delimiter: Delimiter,
    pub directedness: Directedness,
    pub degree_mode: DegreeMode,
    pub comment_prefix: char,
    pub self_loops: SelfLoopPolicy,
    /// Collapse repeated edges to one before counting.
    pub dedup: bool,
}

impl EdgeListSpec {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        EdgeListSpec {
            path: path.into(),
            delimiter: Delimiter::Auto,
            directedness: Directedness::Undirected,
            degree_mode: DegreeMode::Total,
            comment_prefix: '#',
            self_loops: SelfLoopPolicy::Count,
            dedup: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree_mode != DegreeMode::Total && self.directedness != Directedness::Directed {
            return Err(Error::Config(
                "in/out degree requires a directed edge list".into(),
            ));
        }
        Ok(())
    }
}

fn split_line(line: &str, delimiter: Delimiter) -> Vec<&str> {
    let delimiter = match delimiter {
        Delimiter::Auto if line.contains(',') => Delimiter::Comma,
        Delimiter::Auto => Delimiter::Whitespace,
        d => d,
    };
    match delimiter {
        Delimiter::Comma => line.split(',').map(str::trim).collect(),
        Delimiter::Tab => line.split('\t').map(str::trim).collect(),
        _ => line.split_whitespace().collect(),
    }
}

/// Parses edge-list text under `spec` (its `path` is ignored).
pub fn parse_edge_list_str(text: &str, spec: &EdgeListSpec) -> Result<DegreeHistogram> {
    spec.validate()?;
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut degree: Vec<u64> = Vec::new();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut edges = 0usize;
    let mut intern = |name: &str, degree: &mut Vec<u64>| -> usize {
        if let Some(&i) = ids.get(name) {
            return i;
        }
        let i = ids.len();
        ids.insert(name.to_string(), i);
        degree.push(0);
        i
    };
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with(spec.comment_prefix) {
            continue;
        }
        let fields = split_line(line, spec.delimiter);
        if fields.len() < 2 || fields[0].is_empty() || fields[1].is_empty() {
            return Err(Error::Malformed {
                line: n + 1,
                message: format!("expected two node identifiers, got {line:?}"),
            });
        }
        let a = intern(fields[0], &mut degree);
        let b = intern(fields[1], &mut degree);
        edges += 1;
        if a == b && spec.self_loops == SelfLoopPolicy::Drop {
            continue;
        }
        if spec.dedup {
            let key = match spec.directedness {
                Directedness::Directed => (a, b),
                Directedness::Undirected => (a.min(b), a.max(b)),
            };
            if !seen.insert(key) {
                continue;
            }
        }
        match spec.degree_mode {
            DegreeMode::Out => degree[a] += 1,
            DegreeMode::In => degree[b] += 1,
            DegreeMode::Total => {
                degree[a] += 1;
                degree[b] += 1;
            }
        }
    }
    if edges == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(DegreeHistogram::from_degrees(degree.into_iter().filter(|d| *d > 0)))
}

pub fn parse_edge_list(spec: &EdgeListSpec) -> Result<DegreeHistogram> {
    let text = std::fs::read_to_string(&spec.path).map_err(|e| Error::io(&spec.path, e))?;
    parse_edge_list_str(&text, spec)
}

pub const HISTOGRAM_HEADER: &str = "degree,count";

/// Parses `degree,count` CSV text. Zero counts are accepted and dropped.
pub fn parse_histogram_str(text: &str) -> Result<DegreeHistogram> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Error::Malformed {
        line: 1,
        message: e.to_string(),
    })?;
    if header.iter().collect::<Vec<_>>() != ["degree", "count"] {
        return Err(Error::Malformed {
            line: 1,
            message: format!("expected header {HISTOGRAM_HEADER:?}"),
        });
    }
    let mut hist = DegreeHistogram::default();
    let mut seen = HashSet::new();
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| Error::Malformed {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize, name: &str| -> Result<u64> {
            let raw = record.get(i).ok_or_else(|| Error::Malformed {
                line,
                message: format!("missing {name}"),
            })?;
            let v: i128 = raw.parse().map_err(|_| Error::Malformed {
                line,
                message: format!("{name} {raw:?} is not an integer"),
            })?;
            u64::try_from(v).map_err(|_| Error::Malformed {
                line,
                message: format!("{name} must be non-negative, got {v}"),
            })
        };
        let (degree, count) = (field(0, "degree")?, field(1, "count")?);
        if !seen.insert(degree) {
            return Err(Error::DuplicateDegree { degree });
        }
        hist.add(degree, count);
        rows += 1;
    }
    if rows == 0 || hist.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(hist)
}

pub fn parse_histogram(path: &Path) -> Result<DegreeHistogram> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_histogram_str(&text)
}

/// Canonical `degree,count` text: header, ascending degrees, one row per
/// occupied bin, newline-terminated.
pub fn emit_histogram(hist: &DegreeHistogram) -> String {
    let mut out = format!("{HISTOGRAM_HEADER}\n");
    for (k, c) in hist.counts() {
        writeln!(out, "{k},{c}").unwrap();
    }
    out
}

pub fn write_histogram(path: &Path, hist: &DegreeHistogram) -> Result<()> {
    std::fs::write(path, emit_histogram(hist)).map_err(|e| Error::io(path, e))
}
