//! Dataset, piecewise-linear and network file formats.
//!
//! Datasets are CSV (`x,y` per line, `#` comments, no header) or JSON
//! `{"points": [[x, y], ...]}`; the format follows the file extension. Saving writes the
//! shortest decimal that parses back to the same bits.

use std::fs;
use std::path::{Path, PathBuf};

use ridgeless_core::{Breakpoint, Dataset, DatasetError, PiecewiseLinear, PlError, ReluNetwork, ReluUnit};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid dataset: {0}")]
    Dataset(#[from] DatasetError),
    #[error("invalid piecewise-linear function: {0}")]
    Pl(#[from] PlError),
    #[error("non-finite network parameter")]
    NonFiniteNetwork,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Csv,
    Json,
}

impl DataFormat {
    /// `.json` means JSON, anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Self::Json,
            _ => Self::Csv,
        }
    }
}

fn read(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), FormatError> {
    fs::write(path, contents).map_err(|source| FormatError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn parse_csv(text: &str) -> Result<Dataset, FormatError> {
    // the reader reports where it started scanning, before any skipped blank or
    // comment lines, so step over those to reach the physical line of the record
    let lines: Vec<&str> = text.lines().collect();
    let line_of = |byte: u64| {
        let mut line = text.as_bytes()[..byte as usize].iter().filter(|&&b| b == b'\n').count();
        while lines
            .get(line)
            .is_some_and(|l| l.trim().is_empty() || l.starts_with('#'))
        {
            line += 1;
        }
        line as u64 + 1
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| FormatError::Csv {
            line: e.position().map_or(0, |p| line_of(p.byte())),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| line_of(p.byte()));
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != 2 {
            return Err(FormatError::Csv {
                line,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let field = |k: usize| {
            record[k].parse::<f64>().map_err(|e| FormatError::Csv {
                line,
                message: format!("field {}: {e} ({:?})", k + 1, &record[k]),
            })
        };
        points.push((field(0)?, field(1)?));
    }
    Ok(Dataset::new(points)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct PointsJson {
    points: Vec<[f64; 2]>,
}

pub fn parse_dataset_json(text: &str) -> Result<Dataset, FormatError> {
    let parsed: PointsJson = serde_json::from_str(text)?;
    Ok(Dataset::new(parsed.points.into_iter().map(|[x, y]| (x, y)).collect())?)
}

pub fn load_dataset(path: &Path) -> Result<Dataset, FormatError> {
    let text = read(path)?;
    match DataFormat::from_path(path) {
        DataFormat::Csv => parse_csv(&text),
        DataFormat::Json => parse_dataset_json(&text),
    }
}

pub fn dataset_to_csv(d: &Dataset) -> String {
    d.points().iter().map(|(x, y)| format!("{x:?},{y:?}\n")).collect()
}

pub fn dataset_to_json(d: &Dataset) -> String {
    let points = d.points().iter().map(|&(x, y)| [x, y]).collect();
    serde_json::to_string(&PointsJson { points }).expect("finite points serialize")
}

pub fn save_dataset(path: &Path, d: &Dataset) -> Result<(), FormatError> {
    let text = match DataFormat::from_path(path) {
        DataFormat::Csv => dataset_to_csv(d),
        DataFormat::Json => dataset_to_json(d),
    };
    write_file(path, &text)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlJson {
    pub anchor: [f64; 2],
    pub left_slope: f64,
    pub breakpoints: Vec<[f64; 2]>,
}

impl From<&PiecewiseLinear> for PlJson {
    fn from(f: &PiecewiseLinear) -> Self {
        let (x0, v0) = f.anchor();
        Self {
            anchor: [x0, v0],
            left_slope: f.left_slope(),
            breakpoints: f.breakpoints().iter().map(|b| [b.at, b.jump]).collect(),
        }
    }
}

impl TryFrom<PlJson> for PiecewiseLinear {
    type Error = PlError;

    fn try_from(j: PlJson) -> Result<Self, PlError> {
        let bps = j
            .breakpoints
            .into_iter()
            .map(|[at, jump]| Breakpoint { at, jump })
            .collect();
        PiecewiseLinear::new((j.anchor[0], j.anchor[1]), j.left_slope, bps)
    }
}

pub fn pl_to_json(f: &PiecewiseLinear) -> String {
    serde_json::to_string(&PlJson::from(f)).expect("finite function serializes")
}

pub fn parse_pl(text: &str) -> Result<PiecewiseLinear, FormatError> {
    let j: PlJson = serde_json::from_str(text)?;
    Ok(PiecewiseLinear::try_from(j)?)
}

pub fn load_pl(path: &Path) -> Result<PiecewiseLinear, FormatError> {
    parse_pl(&read(path)?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkJson {
    pub a: f64,
    pub b: f64,
    pub units: Vec<[f64; 3]>,
}

pub fn network_to_json(net: &ReluNetwork) -> String {
    let j = NetworkJson {
        a: net.a,
        b: net.b,
        units: net.units.iter().map(|u| [u.w1, u.b1, u.w2]).collect(),
    };
    serde_json::to_string(&j).expect("finite network serializes")
}

pub fn parse_network(text: &str) -> Result<ReluNetwork, FormatError> {
    let j: NetworkJson = serde_json::from_str(text)?;
    let units: Vec<ReluUnit> = j
        .units
        .into_iter()
        .map(|[w1, b1, w2]| ReluUnit { w1, b1, w2 })
        .collect();
    let finite = [j.a, j.b].iter().all(|v| v.is_finite())
        && units
            .iter()
            .all(|u| u.w1.is_finite() && u.b1.is_finite() && u.w2.is_finite());
    if !finite {
        return Err(FormatError::NonFiniteNetwork);
    }
    Ok(ReluNetwork { a: j.a, b: j.b, units })
}

pub fn load_network(path: &Path) -> Result<ReluNetwork, FormatError> {
    parse_network(&read(path)?)
}
