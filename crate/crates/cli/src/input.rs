//! File and argument ingestion.

use std::path::Path;

use harnack_core::{Domain, HarnackError, Point, PointSet};
use serde::Deserialize;

use crate::CliError;

fn read(path: &Path, what: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {what} file {}: {e}", path.display())))
}

/// Loads a domain file; the id is the file stem.
pub fn load_domain(path: &Path) -> Result<(Domain, String), CliError> {
    let text = read(path, "domain")?;
    let domain: Domain = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("cannot parse domain file {}: {e}", path.display())))?;
    let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok((domain, id))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SetFile {
    Wrapped(PointSet),
    Bare(Vec<Point>),
}

/// Loads a point set, either `{"points": [...]}` or a bare array of points.
pub fn load_set(path: &Path) -> Result<PointSet, CliError> {
    let text = read(path, "set")?;
    let parsed: SetFile = serde_json::from_str(&text).map_err(|e| {
        CliError::Input(format!("cannot parse set file {}: expected an array of points ({e})", path.display()))
    })?;
    let set = match parsed {
        SetFile::Wrapped(s) => s,
        SetFile::Bare(points) => PointSet::new(points),
    };
    if set.is_empty() {
        return Err(CliError::Core(HarnackError::EmptySet));
    }
    Ok(set)
}

/// Parses `"x,y[,z...]"`.
pub fn parse_point(text: &str) -> Result<Point, CliError> {
    let coords = text
        .split(',')
        .map(|c| c.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Input(format!("bad point {text:?}: {e}")))?;
    Point::new(coords).map_err(|e| CliError::Input(format!("bad point {text:?}: {e}")))
}

/// Parses `"x1,y1;x2,y2"`.
pub fn parse_pair(text: &str) -> Result<(Point, Point), CliError> {
    match text.split(';').collect::<Vec<_>>().as_slice() {
        [a, b] => Ok((parse_point(a)?, parse_point(b)?)),
        _ => Err(CliError::Input(format!("bad pair {text:?}: expected two points separated by ';'"))),
    }
}
