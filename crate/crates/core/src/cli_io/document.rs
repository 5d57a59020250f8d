use crate::error::{BmxError, Result};
use crate::hypermatrix_core::{Hypermatrix3, Matrix, C64};
use crate::orbits::FpMatrix;
use serde::{Deserialize, Serialize};

/// Optional provenance carried along with a document.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// On-disk form of a matrix (order 2) or hypermatrix (order 3). Entries are
/// row-major `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypermatrixDocument {
    pub order: u8,
    pub shape: Vec<usize>,
    pub entries: Vec<[f64; 2]>,
    /// Field modulus for matrices over a prime field; entries are integers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

/// A parsed numeric value.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Matrix(Matrix),
    Hypermatrix(Hypermatrix3),
}

fn doc_err(field: &str, message: impl Into<String>) -> BmxError {
    BmxError::Document { field: field.to_string(), message: message.into() }
}

fn pairs(data: &[C64]) -> Vec<[f64; 2]> {
    data.iter().map(|z| [z.re, z.im]).collect()
}

impl HypermatrixDocument {
    pub fn from_matrix(m: &Matrix) -> Self {
        let (r, c) = m.shape();
        Self { order: 2, shape: vec![r, c], entries: pairs(m.data()), modulus: None, metadata: None }
    }

    pub fn from_hypermatrix(h: &Hypermatrix3) -> Self {
        Self { order: 3, shape: h.shape().to_vec(), entries: pairs(h.data()), modulus: None, metadata: None }
    }

    pub fn from_value(v: &Value) -> Self {
        match v {
            Value::Matrix(m) => Self::from_matrix(m),
            Value::Hypermatrix(h) => Self::from_hypermatrix(h),
        }
    }

    pub fn from_fp_matrix(m: &FpMatrix, p: u64) -> Self {
        Self {
            order: 2,
            shape: vec![m.rows, m.cols],
            entries: m.entries.iter().map(|&v| [v as f64, 0.0]).collect(),
            modulus: Some(p),
            metadata: None,
        }
    }

    pub fn with_metadata(mut self, metadata: Metadata) -> Self {
        self.metadata = Some(metadata);
        self
    }

    /// Parses and validates a document.
    pub fn parse(text: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(text).map_err(|e| {
            doc_err("document", format!("{e} (line {}, column {})", e.line(), e.column()))
        })?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.order != 2 && self.order != 3 {
            return Err(doc_err("order", format!("must be 2 or 3, got {}", self.order)));
        }
        if self.shape.len() != usize::from(self.order) {
            return Err(doc_err(
                "shape",
                format!("order {} needs {} dimensions, got {}", self.order, self.order, self.shape.len()),
            ));
        }
        let expected: usize = self.shape.iter().product();
        if self.entries.len() != expected {
            return Err(doc_err(
                "entries",
                format!("shape {:?} needs {expected} entries, got {}", self.shape, self.entries.len()),
            ));
        }
        if let Some(i) = self.entries.iter().position(|e| !e[0].is_finite() || !e[1].is_finite()) {
            return Err(doc_err(&format!("entries[{i}]"), "components must be finite"));
        }
        if let Some(p) = self.modulus {
            if self.order != 2 {
                return Err(doc_err("modulus", "only matrices may carry a field modulus"));
            }
            if p < 2 {
                return Err(doc_err("modulus", format!("must be at least 2, got {p}")));
            }
            if let Some(i) = self.entries.iter().position(|e| e[1] != 0.0 || e[0].fract() != 0.0) {
                return Err(doc_err(&format!("entries[{i}]"), "entries over a finite field must be real integers"));
            }
        }
        Ok(())
    }

    fn data(&self) -> Vec<C64> {
        self.entries.iter().map(|e| C64::new(e[0], e[1])).collect()
    }

    pub fn to_value(&self) -> Result<Value> {
        match self.order {
            2 => Ok(Value::Matrix(Matrix::new(self.shape[0], self.shape[1], self.data())?)),
            _ => Ok(Value::Hypermatrix(Hypermatrix3::new([self.shape[0], self.shape[1], self.shape[2]], self.data())?)),
        }
    }

    pub fn to_matrix(&self) -> Result<Matrix> {
        match self.to_value()? {
            Value::Matrix(m) => Ok(m),
            Value::Hypermatrix(_) => Err(doc_err("order", "expected a matrix (order 2)")),
        }
    }

    pub fn to_hypermatrix(&self) -> Result<Hypermatrix3> {
        match self.to_value()? {
            Value::Hypermatrix(h) => Ok(h),
            Value::Matrix(_) => Err(doc_err("order", "expected a hypermatrix (order 3)")),
        }
    }

    /// Reads a vector from an `n × 1` or `1 × n` matrix document.
    pub fn to_vector(&self) -> Result<Vec<C64>> {
        let m = self.to_matrix()?;
        if m.cols() != 1 && m.rows() != 1 {
            return Err(doc_err("shape", format!("a vector needs shape [n, 1] or [1, n], got {:?}", self.shape)));
        }
        Ok(m.data().to_vec())
    }

    /// Entries as integers modulo `p` (the document's own modulus wins).
    pub fn to_fp_matrix(&self, p: u64) -> Result<FpMatrix> {
        let p = self.modulus.unwrap_or(p);
        if self.order != 2 {
            return Err(doc_err("order", "expected a matrix (order 2)"));
        }
        if let Some(i) = self.entries.iter().position(|e| e[1] != 0.0 || e[0].fract() != 0.0) {
            return Err(doc_err(&format!("entries[{i}]"), "entries over a finite field must be real integers"));
        }
        let rows: Vec<Vec<i64>> =
            self.entries.chunks(self.shape[1]).map(|r| r.iter().map(|e| e[0] as i64).collect()).collect();
        FpMatrix::new(&rows, p)
    }

    /// Pretty JSON with a trailing newline. Numbers use the shortest
    /// representation that parses back to the same `f64`.
    pub fn to_json(&self) -> Result<String> {
        self.validate()?;
        let mut s = serde_json::to_string_pretty(self).map_err(|e| doc_err("document", e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

/// Parses a document into a matrix or hypermatrix.
pub fn parse_document(text: &str) -> Result<Value> {
    HypermatrixDocument::parse(text)?.to_value()
}

/// Serializes a matrix or hypermatrix as a document.
pub fn serialize(value: &Value) -> Result<String> {
    HypermatrixDocument::from_value(value).to_json()
}
