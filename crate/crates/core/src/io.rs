// SPDX-License-Identifier: Apache-2.0

//! JSON channel files, subspace and state specifications.
//!
//! Complex entries are `[re, im]` pairs; matrices are arrays of rows. Kets
//! are numbered from 1 in every user-facing format.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::linalg::{c64, CMatrix, SubspaceBasis};
use crate::{DensityOperator, Error, KrausMap, Result, Tolerances};

pub const CHANNEL_SCHEMA: &str = "qchan/1";

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ChannelMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// Generator that produced the file (`toy3`, `seven_level`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub schema: String,
    pub dim: usize,
    pub kraus: Vec<JsonMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<ChannelMetadata>,
}

pub fn matrix_to_json(m: &CMatrix) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// Parses a rectangular array of rows.
pub fn matrix_from_json(rows: &JsonMatrix) -> Result<CMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: bad.len(),
        });
    }
    let out = CMatrix::from_fn(n, m, |i, j| c64::new(rows[i][j][0], rows[i][j][1]));
    if !crate::linalg::is_finite(&out) {
        return Err(Error::NonFinite);
    }
    Ok(out)
}

impl ChannelFile {
    pub fn from_map(map: &KrausMap, metadata: Option<ChannelMetadata>) -> Self {
        Self {
            schema: CHANNEL_SCHEMA.to_string(),
            dim: map.dim(),
            kraus: map.kraus().iter().map(matrix_to_json).collect(),
            metadata,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: ChannelFile = serde_json::from_str(text)?;
        if file.schema != CHANNEL_SCHEMA {
            return Err(Error::InvalidParameters(format!(
                "unsupported schema {:?}, expected {CHANNEL_SCHEMA:?}",
                file.schema
            )));
        }
        Ok(file)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("channel files always serialize")
    }

    pub fn to_map(&self) -> Result<KrausMap> {
        let kraus = self
            .kraus
            .iter()
            .map(matrix_from_json)
            .collect::<Result<Vec<_>>>()?;
        for (index, m) in kraus.iter().enumerate() {
            if m.nrows() != self.dim || m.ncols() != self.dim {
                return Err(Error::RaggedKraus {
                    index,
                    rows: m.nrows(),
                    cols: m.ncols(),
                    dim: self.dim,
                });
            }
        }
        KrausMap::new(kraus)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum VectorsFile {
    Wrapped { vectors: Vec<Vec<[f64; 2]>> },
    Bare(Vec<Vec<[f64; 2]>>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixFile {
    Wrapped { matrix: JsonMatrix },
    Bare(JsonMatrix),
}

fn parse_indices(spec: &str, dim: usize) -> Result<SubspaceBasis> {
    let mut idx = Vec::new();
    for tok in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let k: usize = tok
            .parse()
            .map_err(|_| Error::InvalidParameters(format!("bad basis index {tok:?}")))?;
        if k == 0 || k > dim {
            return Err(Error::IndexOutOfRange { index: k, dim });
        }
        idx.push(k - 1);
    }
    if idx.is_empty() {
        return Err(Error::InvalidParameters("empty subspace specification".into()));
    }
    SubspaceBasis::from_indices(dim, &idx)
}

/// Spans explicit vectors, orthonormalizing them; they must be independent.
pub fn subspace_from_vectors(
    vectors: &[Vec<[f64; 2]>],
    dim: usize,
    tol: &Tolerances,
) -> Result<SubspaceBasis> {
    if vectors.is_empty() {
        return Err(Error::InvalidParameters("no vectors given".into()));
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: v.len(),
        });
    }
    let m = CMatrix::from_fn(dim, vectors.len(), |i, j| {
        c64::new(vectors[j][i][0], vectors[j][i][1])
    });
    if !crate::linalg::is_finite(&m) {
        return Err(Error::NonFinite);
    }
    let span = SubspaceBasis::span_of(&m, tol)?;
    if span.dim() != vectors.len() {
        return Err(Error::InvalidParameters(format!(
            "{} vectors span only {} dimensions",
            vectors.len(),
            span.dim()
        )));
    }
    Ok(span)
}

/// `"1,3"` (1-based kets) or `"@file.json"` holding `{"vectors": [...]}` or a
/// bare array of vectors.
pub fn parse_subspace(spec: &str, dim: usize, tol: &Tolerances) -> Result<SubspaceBasis> {
    let spec = spec.trim();
    match spec.strip_prefix('@') {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let vectors = match serde_json::from_str::<VectorsFile>(&text)? {
                VectorsFile::Wrapped { vectors } | VectorsFile::Bare(vectors) => vectors,
            };
            subspace_from_vectors(&vectors, dim, tol)
        }
        None => parse_indices(spec, dim),
    }
}

/// `;`-separated list of subspace specifications.
pub fn parse_parts(spec: &str, dim: usize, tol: &Tolerances) -> Result<Vec<SubspaceBasis>> {
    spec.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_subspace(s, dim, tol))
        .collect()
}

/// Parses a density matrix given as JSON (a bare array of rows or
/// `{"matrix": ...}`).
pub fn parse_state_json(text: &str, dim: usize, tol: &Tolerances) -> Result<DensityOperator> {
    let rows = match serde_json::from_str::<MatrixFile>(text)? {
        MatrixFile::Wrapped { matrix } | MatrixFile::Bare(matrix) => matrix,
    };
    let m = matrix_from_json(&rows)?;
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: m.nrows(),
        });
    }
    DensityOperator::new(m, tol)
}

/// `maximally-mixed` or a path (optionally `@`-prefixed) to a state file.
pub fn parse_state(spec: &str, dim: usize, tol: &Tolerances) -> Result<DensityOperator> {
    let spec = spec.trim();
    if spec == "maximally-mixed" {
        return Ok(DensityOperator::maximally_mixed(dim));
    }
    let path = spec.strip_prefix('@').unwrap_or(spec);
    parse_state_json(&std::fs::read_to_string(path)?, dim, tol)
}

/// Serializable description of a subspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceReport {
    pub dim: usize,
    /// 1-based kets, present when the subspace is spanned by basis vectors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indices: Option<Vec<usize>>,
    pub basis: JsonMatrix,
    pub projector: JsonMatrix,
}

impl SubspaceReport {
    pub fn new(h: &SubspaceBasis, tol: &Tolerances) -> Self {
        Self {
            dim: h.dim(),
            indices: h
                .axis_indices(tol)
                .map(|v| v.into_iter().map(|i| i + 1).collect()),
            basis: matrix_to_json(h.basis()),
            projector: matrix_to_json(&h.projector()),
        }
    }
}

/// `{1,3}` for axis-aligned subspaces, `⟨dim 2⟩` otherwise.
pub fn format_subspace(h: &SubspaceBasis, tol: &Tolerances) -> String {
    match h.axis_indices(tol) {
        Some(idx) => {
            let s: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
            format!("{{{}}}", s.join(","))
        }
        None => format!("⟨dim {}⟩", h.dim()),
    }
}
