//! Flag values are inline JSON or a path to a JSON file. Each reader accepts
//! the bare form (an array) as well as the schema object of the matching
//! library type, and returns raw values so that domain checks stay in the
//! library constructors.

use std::fs;
use std::path::Path;

use cellmat::{Matrix, Permutation, PositiveVector};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::failure::Failure;

/// Largest order accepted at the command line.
pub const MAX_ORDER: usize = 200;

fn load(flag: &str, raw: &str) -> Result<Value, Failure> {
    let trimmed = raw.trim();
    match serde_json::from_str::<Value>(trimmed) {
        Ok(v) => Ok(v),
        Err(e) if trimmed.starts_with('[') || trimmed.starts_with('{') => {
            Err(Failure::parse(format!("--{flag}: {e}")))
        }
        Err(_) => {
            let path = Path::new(trimmed);
            if !path.is_file() {
                return Err(Failure::parse(format!(
                    "--{flag}: neither valid JSON nor a readable file: {trimmed}"
                )));
            }
            let text = fs::read_to_string(path).map_err(|e| Failure::parse(format!("--{flag}: {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| Failure::parse(format!("--{flag}: {}: {e}", path.display())))
        }
    }
}

fn decode<T: DeserializeOwned>(flag: &str, v: Value) -> Result<T, Failure> {
    serde_json::from_value(v).map_err(|e| Failure::parse(format!("--{flag}: {e}")))
}

pub fn check_order(n: usize) -> Result<(), Failure> {
    if n > MAX_ORDER {
        return Err(cellmat::Error::OrderTooLarge { order: n, max: MAX_ORDER }.into());
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum VectorIn {
    Bare(Vec<f64>),
    Object { x: Vec<f64> },
}

pub fn vector(raw: &str) -> Result<PositiveVector, Failure> {
    let x = match decode("vector", load("vector", raw)?)? {
        VectorIn::Bare(x) | VectorIn::Object { x } => x,
    };
    check_order(x.len())?;
    Ok(PositiveVector::new(x)?)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixIn {
    Bare(Vec<Vec<f64>>),
    Object { n: usize, rows: Vec<Vec<f64>> },
}

pub fn matrix(raw: &str) -> Result<Matrix, Failure> {
    let rows = match decode("matrix", load("matrix", raw)?)? {
        MatrixIn::Bare(rows) => rows,
        MatrixIn::Object { n, rows } => {
            if rows.len() != n {
                return Err(cellmat::Error::DimensionMismatch {
                    expected: n,
                    found: rows.len(),
                }
                .into());
            }
            rows
        }
    };
    check_order(rows.len())?;
    let m = Matrix::from_rows(&rows)?;
    m.order()?;
    Ok(m)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SpectrumIn {
    Bare(Vec<f64>),
    Object { eigenvalues: Vec<f64> },
}

pub fn spectrum(raw: &str) -> Result<Vec<f64>, Failure> {
    let values = match decode("spectrum", load("spectrum", raw)?)? {
        SpectrumIn::Bare(v) | SpectrumIn::Object { eigenvalues: v } => v,
    };
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(cellmat::Error::InvalidSpectrum(format!("{v} is not finite")).into());
    }
    check_order(values.len())?;
    Ok(values)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TailsIn {
    Bare(Vec<f64>),
    Object {
        tails: Vec<f64>,
        multiplicities: Option<Vec<usize>>,
    },
}

/// Tails and multiplicities from `--tails` and `--mult`. A `--tails` object
/// may carry the multiplicities itself, in which case `--mult` must be absent.
pub fn grouped(tails: &str, mult: Option<&str>) -> Result<(Vec<f64>, Vec<usize>), Failure> {
    let (tails, embedded) = match decode("tails", load("tails", tails)?)? {
        TailsIn::Bare(t) => (t, None),
        TailsIn::Object { tails, multiplicities } => (tails, multiplicities),
    };
    let mult = match (embedded, mult) {
        (Some(_), Some(_)) => {
            return Err(Failure::parse("multiplicities given both in --tails and --mult".into()));
        }
        (Some(m), None) => m,
        (None, Some(raw)) => decode("mult", load("mult", raw)?)?,
        (None, None) => return Err(Failure::parse("--mult is required".into())),
    };
    check_order(mult.iter().sum())?;
    Ok((tails, mult))
}

/// A permutation of `{1..n}`: `{"mapping": [...]}`, `{"cycles": "..."}`, a
/// bare mapping array, or bare cycle notation such as `(1 4)(2 5)`. Cycle
/// notation without an explicit size acts on all `n` positions.
pub fn permutation(raw: &str, n: usize) -> Result<Permutation, Failure> {
    let trimmed = raw.trim();
    if trimmed.starts_with('(') {
        return Ok(Permutation::from_cycles(trimmed, n)?);
    }
    let mut v = load("perm", raw)?;
    match &mut v {
        Value::Array(_) => {
            let mapping: Vec<usize> = decode("perm", v)?;
            return Ok(Permutation::from_one_based(&mapping)?);
        }
        Value::String(s) => return Ok(Permutation::from_cycles(s, n)?),
        Value::Object(obj) if obj.contains_key("cycles") && !obj.contains_key("n") => {
            obj.insert("n".into(), Value::from(n));
        }
        _ => {}
    }
    // Decoded as raw shapes so that invalid mappings are reported by the
    // library rather than as parse errors.
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum PermIn {
        Mapping { mapping: Vec<usize> },
        Cycles { cycles: String, n: usize },
    }
    match decode("perm", v)? {
        PermIn::Mapping { mapping } => Ok(Permutation::from_one_based(&mapping)?),
        PermIn::Cycles { cycles, n } => Ok(Permutation::from_cycles(&cycles, n)?),
    }
}
