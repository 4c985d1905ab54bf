use std::io;

use thiserror::Error;

/// Errors surfaced by loading, validation, and the walk engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io: {0}")]
    Io(#[from] io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    Graph(String),

    #[error("invalid manifest: {0}")]
    Manifest(String),

    #[error("invalid query: {0}")]
    Query(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("layer {to} cannot be seeded from layer {from}: no cross-edge path")]
    Unreachable { from: usize, to: usize },

    #[error("layer {layer} has {nodes} nodes, above the dense materialization cap {cap}")]
    DenseCap { layer: usize, nodes: usize, cap: usize },

    #[error("sweep undefined: {0}")]
    Sweep(String),

    #[error("infeasible generator spec: {0}")]
    Synth(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }
}
