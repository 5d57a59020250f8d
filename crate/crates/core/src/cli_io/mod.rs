//! JSON documents, verification reports and the `bmx` command line.

mod cli;
mod document;
mod report;

pub use cli::{
    run_cli, run_cli_with, BlockDocument, MapDocument, MatrixSvdDocument, OrbitDocument, OrthoParamsDocument,
    Svd3Document, DEFAULT_TOL,
};
pub use document::{parse_document, serialize, HypermatrixDocument, Metadata, Value};
pub use report::{digest, ResidualEntry, VerificationReport};
