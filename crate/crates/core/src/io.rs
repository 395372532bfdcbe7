//! JSON tensor documents.
//!
//! ```json
//! { "name": "A", "shape": [2, 2], "split": 1, "layout": "column-major",
//!   "entries": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]] }
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tensor::{Shape, Tensor};

/// Layout tag of the only supported linearization: first index fastest.
pub const LAYOUT: &str = "column-major";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub shape: Vec<usize>,
    pub split: usize,
    pub layout: String,
    pub entries: Vec<[f64; 2]>,
}

impl TensorDocument {
    pub fn from_tensor(t: &Tensor, name: Option<&str>) -> Self {
        Self {
            name: name.map(str::to_string),
            shape: t.shape().extents().to_vec(),
            split: t.shape().split(),
            layout: LAYOUT.to_string(),
            entries: t.entries().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_tensor(&self) -> Result<Tensor, IoError> {
        if self.layout != LAYOUT {
            return Err(IoError::UnknownLayout(self.layout.clone()));
        }
        let shape = Shape::new(self.shape.clone(), self.split)?;
        let entries = self.entries.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        Ok(Tensor::new(shape, entries)?)
    }
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("malformed tensor document at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown layout {0:?}, expected \"column-major\"")]
    UnknownLayout(String),
    #[error(transparent)]
    Invalid(#[from] crate::error::Error),
}

/// Parses a document from text.
pub fn parse_tensor(text: &str) -> Result<Tensor, IoError> {
    let doc: TensorDocument = serde_json::from_str(text).map_err(|e| IoError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    doc.to_tensor()
}

pub fn load_tensor(path: impl AsRef<Path>) -> Result<Tensor, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_tensor(&text)
}

pub fn to_json(t: &Tensor, name: Option<&str>) -> String {
    serde_json::to_string_pretty(&TensorDocument::from_tensor(t, name)).expect("documents always serialize")
}

/// Writes a document that [`load_tensor`] reads back bit for bit.
pub fn save_tensor(t: &Tensor, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    let name = path.file_stem().and_then(|s| s.to_str());
    let mut text = to_json(t, name);
    text.push('\n');
    fs::write(path, text).map_err(|source| IoError::Write {
        path: path.to_path_buf(),
        source,
    })
}
