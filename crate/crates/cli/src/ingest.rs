use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bglfrps::data::FOOTBALL;
use bglfrps::fitting::BivariateSample;

/// Where observations come from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    EmbeddedFootball,
    CsvPath(PathBuf),
}

impl FromStr for DataSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err("empty data source".into());
        }
        if s == "embedded" {
            Ok(Self::EmbeddedFootball)
        } else {
            Ok(Self::CsvPath(PathBuf::from(s)))
        }
    }
}

impl fmt::Display for DataSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EmbeddedFootball => f.write_str("embedded"),
            Self::CsvPath(p) => write!(f, "{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub source: DataSource,
    pub scale: f64,
}

impl DatasetSpec {
    /// Reads, scales and partitions the observations.
    pub fn load(&self, tie_tol: Option<f64>) -> Result<BivariateSample, String> {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(format!("scale must be positive, got {}", self.scale));
        }
        let raw = match &self.source {
            DataSource::EmbeddedFootball => FOOTBALL.to_vec(),
            DataSource::CsvPath(path) => read_pairs(path)?,
        };
        let pairs: Vec<(f64, f64)> = raw
            .into_iter()
            .map(|(a, b)| (a * self.scale, b * self.scale))
            .collect();
        let sample = match tie_tol {
            Some(tol) => BivariateSample::with_tie_tolerance(pairs, tol),
            None => BivariateSample::new(pairs),
        };
        sample.map_err(|e| e.to_string())
    }
}

pub fn read_pairs(path: &Path) -> Result<Vec<(f64, f64)>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_pairs(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Two numeric columns per line, separated by a comma and/or whitespace.
/// Blank lines and `#` comments are skipped; a non-numeric first record is a header.
pub fn parse_pairs(text: &str) -> Result<Vec<(f64, f64)>, String> {
    let mut pairs = Vec::new();
    let mut seen_record = false;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        let first_record = !seen_record;
        seen_record = true;
        if fields.len() != 2 {
            if first_record && fields.iter().any(|f| f.parse::<f64>().is_err()) {
                continue;
            }
            return Err(format!(
                "line {line_no}: expected 2 columns, found {}",
                fields.len()
            ));
        }
        match (fields[0].parse::<f64>(), fields[1].parse::<f64>()) {
            (Ok(a), Ok(b)) => pairs.push((a, b)),
            _ if first_record => continue,
            _ => {
                return Err(format!(
                    "line {line_no}: cannot parse `{line}` as two numbers"
                ))
            }
        }
    }
    if pairs.is_empty() {
        return Err("no observations".into());
    }
    Ok(pairs)
}
