use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// One named residual and the tolerance it was judged against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub name: String,
    /// `null` in JSON when the residual is not finite.
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub passed: bool,
}

/// Machine-readable outcome of a check. Deterministic for identical inputs:
/// no timestamps are recorded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub tool_version: String,
    /// SHA-256 over the input files' bytes, in command-line order.
    pub input_digest: String,
    pub residuals: Vec<ResidualEntry>,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>, inputs: &[&[u8]]) -> Self {
        Self {
            check: check.into(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            input_digest: digest(inputs),
            residuals: Vec::new(),
            passed: true,
            notes: Vec::new(),
        }
    }

    /// Records a residual judged against `tolerance` (inclusive).
    pub fn judged(&mut self, name: impl Into<String>, value: f64, tolerance: f64) -> &mut Self {
        let passed = value <= tolerance;
        self.passed &= passed;
        self.residuals.push(ResidualEntry { name: name.into(), value, tolerance: Some(tolerance), passed });
        self
    }

    /// Records an informational value that does not affect the verdict.
    pub fn info(&mut self, name: impl Into<String>, value: f64) -> &mut Self {
        self.residuals.push(ResidualEntry { name: name.into(), value, tolerance: None, passed: true });
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    /// Fails the report without a numeric residual (e.g. a boolean property).
    pub fn flag(&mut self, name: impl Into<String>, ok: bool) -> &mut Self {
        self.passed &= ok;
        self.residuals.push(ResidualEntry {
            name: name.into(),
            value: if ok { 0.0 } else { 1.0 },
            tolerance: Some(0.0),
            passed: ok,
        });
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }
}

/// Hex SHA-256 over the concatenated inputs.
pub fn digest(inputs: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for i in inputs {
        h.update(i);
    }
    hex::encode(h.finalize())
}
