//! Dataset loading: JSON-lines intersection records.
//!
//! One record per line:
//! `{"g":1,"n":1,"d":[0],"num":"1","den":"6","pi_exp":1,"src":["..",".."]}`
//! with `pi_exp` required to equal `3g-3+n-|d|` and `src` non-empty. Pure
//! volumes use `"n":0,"d":[]`. The bundled dataset is embedded in the
//! binary; `--data` and the `WPSPECTRUM_DATA` environment variable override
//! it, in that order.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::Deserialize;
use wpspectrum_core::volumes::{IntersectionTable, RawRecord, TableBuilder};

/// Bundled intersection dataset (see `data/intersections.jsonl`).
pub const EMBEDDED_DATASET: &str = include_str!("../data/intersections.jsonl");

#[derive(Debug)]
pub struct DataError {
    pub line: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for DataError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for DataError {}

#[derive(Deserialize)]
struct RecordJson {
    g: u32,
    n: u32,
    d: Vec<u32>,
    num: String,
    den: String,
    pi_exp: u32,
    src: Vec<String>,
}

/// Parse and validate a JSON-lines dataset.
pub fn load_intersection_table(source: &str) -> Result<IntersectionTable, DataError> {
    let mut builder = TableBuilder::new();
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let rec: RecordJson = serde_json::from_str(trimmed).map_err(|e| DataError {
            line: Some(line_no),
            message: format!("malformed record: {e}"),
        })?;
        let num = BigInt::from_str(&rec.num).map_err(|e| DataError {
            line: Some(line_no),
            message: format!("bad numerator: {e}"),
        })?;
        let den = BigInt::from_str(&rec.den).map_err(|e| DataError {
            line: Some(line_no),
            message: format!("bad denominator: {e}"),
        })?;
        builder
            .insert(RawRecord {
                g: rec.g,
                n: rec.n,
                d: rec.d,
                num,
                den,
                pi_exp: rec.pi_exp,
                src: rec.src,
            })
            .map_err(|e| DataError { line: Some(line_no), message: e.to_string() })?;
    }
    builder.finish().map_err(|e| DataError { line: None, message: e.to_string() })
}

/// Resolve the dataset: explicit path, then `WPSPECTRUM_DATA`, then bundled.
pub fn resolve_table(data_flag: Option<&Path>) -> Result<IntersectionTable, DataError> {
    if let Some(path) = data_flag {
        let text = fs::read_to_string(path).map_err(|e| DataError {
            line: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        return load_intersection_table(&text);
    }
    if let Ok(path) = std::env::var("WPSPECTRUM_DATA") {
        let text = fs::read_to_string(&path).map_err(|e| DataError {
            line: None,
            message: format!("cannot read {path}: {e}"),
        })?;
        return load_intersection_table(&text);
    }
    load_intersection_table(EMBEDDED_DATASET)
}
