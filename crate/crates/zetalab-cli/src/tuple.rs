//! Functional-equation tuple files.
//!
//! A tuple file is JSON with the raw data `(omega, Q, lambda_j, mu_j)`:
//!
//! ```json
//! {
//!   "omega": { "re": 1.0, "im": 0.0 },
//!   "q": 0.5641895835477563,
//!   "lambdas": [0.5],
//!   "mus": [{ "re": 0.0, "im": 0.0 }]
//! }
//! ```
//!
//! Paths are resolved directly first; a relative path that does not exist
//! is retried under the directory named by `ZETALAB_CONFIG_DIR`.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use zetalab_core::funceq::FunctionalEquationData;
use zetalab_core::{c64, C64};

use crate::{CliError, CONFIG_DIR_VAR};

#[derive(Deserialize, Clone, Copy)]
struct ComplexField {
    re: f64,
    im: f64,
}

impl From<ComplexField> for C64 {
    fn from(v: ComplexField) -> C64 {
        c64(v.re, v.im)
    }
}

#[derive(Deserialize)]
struct TupleFile {
    omega: ComplexField,
    q: f64,
    lambdas: Vec<f64>,
    mus: Vec<ComplexField>,
}

fn resolve(path: &Path) -> Result<PathBuf, CliError> {
    if path.exists() {
        return Ok(path.to_path_buf());
    }
    if path.is_relative() {
        if let Ok(dir) = std::env::var(CONFIG_DIR_VAR) {
            let candidate = Path::new(&dir).join(path);
            if candidate.exists() {
                return Ok(candidate);
            }
        }
    }
    Err(CliError::Domain(format!(
        "cannot read tuple file {}: not found (also searched ${CONFIG_DIR_VAR})",
        path.display()
    )))
}

/// Load and validate a functional-equation tuple from a JSON file.
pub fn load_tuple(path: &Path) -> Result<FunctionalEquationData, CliError> {
    let resolved = resolve(path)?;
    let text = std::fs::read_to_string(&resolved).map_err(|e| {
        CliError::Domain(format!(
            "cannot read tuple file {}: {e}",
            resolved.display()
        ))
    })?;
    let parsed: TupleFile = serde_json::from_str(&text).map_err(|e| {
        CliError::Domain(format!(
            "tuple file {} is not valid JSON: {e}",
            resolved.display()
        ))
    })?;
    let mus = parsed.mus.into_iter().map(C64::from).collect();
    FunctionalEquationData::new(parsed.omega.into(), parsed.q, parsed.lambdas, mus)
        .map_err(CliError::from)
}
