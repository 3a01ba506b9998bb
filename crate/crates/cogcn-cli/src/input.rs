//! The monolith description file format.
//!
//! A single UTF-8 JSON document:
//!
//! ```json
//! {
//!   "classes": ["com.app.A", "com.app.B"],
//!   "calls": [["com.app.A", "com.app.B"]],
//!   "inheritance": [["com.app.B", "com.app.Base"]],
//!   "entrypoints": { "GET /orders": ["com.app.A", "com.app.B"] }
//! }
//! ```
//!
//! `classes` fixes the node indices; entrypoint keys are ordered
//! lexicographically and fix the attribute columns. `calls`, `inheritance`
//! and `entrypoints` may be omitted. Unknown top-level keys are rejected.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use cogcn::graph::{GraphError, RawMonolith};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed monolith file {path} (line {line}, column {column}): {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid monolith description in {path}: {error}")]
    Invalid { path: String, error: GraphError },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MonolithFile {
    classes: Vec<String>,
    #[serde(default)]
    calls: Vec<(String, String)>,
    #[serde(default)]
    inheritance: Vec<(String, String)>,
    #[serde(default)]
    entrypoints: BTreeMap<String, Vec<String>>,
}

/// Reads and validates a monolith description file.
pub fn parse_monolith(path: &Path) -> Result<RawMonolith, InputError> {
    let display = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| InputError::Io {
        path: display.clone(),
        source,
    })?;
    let file: MonolithFile = serde_json::from_str(&text).map_err(|e| InputError::Parse {
        path: display.clone(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    RawMonolith::new(
        file.classes,
        &file.calls,
        &file.inheritance,
        &file.entrypoints,
    )
    .map_err(|error| InputError::Invalid {
        path: display,
        error,
    })
}
