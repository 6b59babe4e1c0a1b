//! Fan files: `{"dim": n, "rays": [[...], ...], "max_cones": [[...], ...]}`.
//!
//! Writing emits the canonical form on one line, so equal fans give equal bytes.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fan::{Fan, Ray};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FanFile {
    dim: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
}

/// Parses a fan, reporting rays by their position in the input.
pub fn parse_fan(text: &str) -> Result<Fan> {
    let file: FanFile = serde_json::from_str(text).map_err(|e| {
        let line = text
            .lines()
            .nth(e.line().saturating_sub(1))
            .unwrap_or("")
            .trim();
        let context = if line.chars().count() > 60 {
            format!("{}...", line.chars().take(60).collect::<String>())
        } else {
            line.to_string()
        };
        Error::Parse(format!(
            "line {} column {}: {e} near `{context}`",
            e.line(),
            e.column()
        ))
    })?;
    for (i, r) in file.rays.iter().enumerate() {
        if r.len() != file.dim {
            return Err(Error::Parse(format!(
                "ray {i} has {} coordinates, expected {}",
                r.len(),
                file.dim
            )));
        }
        if !Ray::new(r.clone()).is_primitive() {
            return Err(Error::Parse(format!("ray {i} not primitive")));
        }
        if let Some(j) = file.rays[..i].iter().position(|s| s == r) {
            return Err(Error::Parse(format!("ray {i} duplicates ray {j}")));
        }
    }
    Fan::new(file.dim, file.rays, file.max_cones).map_err(|e| match e {
        Error::Argument(msg) => Error::Parse(msg),
        other => other,
    })
}

/// Canonical single-line JSON followed by a newline.
pub fn serialize_fan(fan: &Fan) -> String {
    let file = FanFile {
        dim: fan.dim(),
        rays: fan.rays().iter().map(|r| r.coords().to_vec()).collect(),
        max_cones: fan
            .max_cones()
            .iter()
            .map(|c| c.indices().to_vec())
            .collect(),
    };
    let mut text = serde_json::to_string(&file).expect("fan serializes");
    text.push('\n');
    text
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

pub fn read_fan(path: impl AsRef<Path>) -> Result<Fan> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    parse_fan(&text)
}

pub fn write_fan(fan: &Fan, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, serialize_fan(fan)).map_err(|e| io_error(path, e))
}
