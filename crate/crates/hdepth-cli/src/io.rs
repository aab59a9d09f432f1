//! Point-set input: CSV and JSON readers plus query parsing.
//!
//! CSV is one point per line, comma-separated coordinates; blank lines and
//! `#` comments are skipped. JSON is an object `{"dim": 2, "points":
//! [[x, y], ...]}` where `dim` is optional. Errors carry the file name and
//! line they came from.

use std::fs;
use std::path::Path;

use clap::ValueEnum;
use hdepth::PointSet;
use nalgebra::DVector;
use serde::Deserialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Deserialize)]
struct JsonPoints {
    dim: Option<usize>,
    points: Vec<Vec<f64>>,
}

fn parse_csv(text: &str, source: &str) -> Result<Vec<Vec<f64>>, String> {
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        for field in line.split(',') {
            row.push(
                field
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| format!("{source}:{}: not a number: {field:?}", idx + 1))?,
            );
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Reads a point set, inferring the format from the extension unless one is
/// given. `dim_override` takes precedence over anything in the file.
pub fn load_points(
    path: &Path,
    format: Option<Format>,
    dim_override: Option<usize>,
) -> Result<PointSet, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let format = format.unwrap_or_else(|| {
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            Format::Json
        } else {
            Format::Csv
        }
    });
    let source = path.display().to_string();
    let (rows, file_dim) = match format {
        Format::Csv => (parse_csv(&text, &source)?, None),
        Format::Json => {
            let parsed: JsonPoints =
                serde_json::from_str(&text).map_err(|e| format!("{source}: {e}"))?;
            (parsed.points, parsed.dim)
        }
    };
    let dim = dim_override
        .or(file_dim)
        .or_else(|| rows.first().map(Vec::len))
        .ok_or_else(|| format!("{source}: no points"))?;
    PointSet::new(dim, rows).map_err(|e| format!("{source}: {e}"))
}

/// Parses a comma-separated coordinate list such as `"0.5,0.5"`.
pub fn parse_query(text: &str, dim: usize) -> Result<DVector<f64>, String> {
    let coords: Vec<f64> = text
        .split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|_| format!("query: not a number: {f:?}"))
        })
        .collect::<Result<_, _>>()?;
    if coords.len() != dim {
        return Err(format!(
            "query has {} coordinates but the point set is {dim}-dimensional",
            coords.len()
        ));
    }
    Ok(DVector::from_vec(coords))
}
