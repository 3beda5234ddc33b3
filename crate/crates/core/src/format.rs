//! JSON documents.
//!
//! * matrix: `{"n": 3, "rows": [[1], [0], [2]]}`, each row listing the
//!   columns of its 1s in ascending order;
//! * matrix set: `{"n": 3, "matrices": [...], "meta": {...}}`, `meta` only
//!   present for generator output;
//! * automaton: `{"n": 3, "letters": [[1, 0, 2], ...]}`;
//! * verdict: `{"class": "primitive", "witness": null}`.

use std::fs;
use std::io::Read;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{BinaryMatrix, GeneratorMeta, MatrixSet};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixRepr {
    pub n: usize,
    pub rows: Vec<Vec<usize>>,
}

impl TryFrom<MatrixRepr> for BinaryMatrix {
    type Error = Error;
    fn try_from(r: MatrixRepr) -> Result<Self> {
        for (i, row) in r.rows.iter().enumerate() {
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidArgument(format!(
                    "row {i} is not strictly ascending"
                )));
            }
        }
        BinaryMatrix::from_rows(r.n, &r.rows)
    }
}

impl From<BinaryMatrix> for MatrixRepr {
    fn from(m: BinaryMatrix) -> Self {
        MatrixRepr {
            n: m.n(),
            rows: m.to_rows(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SetRepr {
    pub n: usize,
    pub matrices: Vec<BinaryMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<GeneratorMeta>,
}

impl TryFrom<SetRepr> for MatrixSet {
    type Error = Error;
    fn try_from(r: SetRepr) -> Result<Self> {
        if let Some(bad) = r.matrices.iter().find(|m| m.n() != r.n) {
            return Err(Error::DimensionMismatch {
                left: r.n,
                right: bad.n(),
            });
        }
        let set = MatrixSet::new(r.matrices)?;
        Ok(match r.meta {
            Some(meta) => set.with_meta(meta),
            None => set,
        })
    }
}

impl From<MatrixSet> for SetRepr {
    fn from(s: MatrixSet) -> Self {
        SetRepr {
            n: s.n(),
            meta: s.meta().cloned(),
            matrices: s.matrices().to_vec(),
        }
    }
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::InvalidArgument(format!("malformed JSON: {e}"))
}

pub fn from_json_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(parse_err)
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable document")
}

/// Reads a JSON document from `path`, or from stdin when `path` is `-`.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Error::InvalidArgument(format!("reading stdin: {e}")))?;
        buf
    } else {
        fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("reading {}: {e}", path.display())))?
    };
    from_json_str(&text)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = to_json_string(value);
    text.push('\n');
    fs::write(path, text)
        .map_err(|e| Error::InvalidArgument(format!("writing {}: {e}", path.display())))
}
