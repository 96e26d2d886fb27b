// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed card: wrong field count or unparseable number.
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },

    /// Well-formed input that violates a netlist rule (duplicate id, negative value, ...).
    #[error("{0}")]
    Semantic(String),

    /// Technology file problem.
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    /// Argument outside the domain of a formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// Netlist lacks something an analysis needs (annotation, named source, ...).
    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("no convergence after {iterations} iterations: worst residual {residual:.3e} A at node {node}")]
    Convergence {
        iterations: usize,
        node: String,
        residual: f64,
    },

    /// Zero pivot in the MNA matrix; usually a node with no DC path.
    #[error("singular matrix: floating subcircuit at node {node}")]
    Singular { node: String },

    #[error("at {context}: {source}")]
    Annotated {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("measurement error: {0}")]
    Measurement(String),

    #[error("cell is not writable: {0}")]
    NotWritable(String),

    #[error("{failed} of {total} Monte Carlo samples failed")]
    TooManyFailures { failed: usize, total: usize },
}

impl Error {
    pub(crate) fn annotate(self, context: impl Into<String>) -> Self {
        Error::Annotated {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, skipping annotation layers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Annotated { source, .. } => source.root(),
            e => e,
        }
    }

    /// True for errors caused by bad input (syntax, config, usage), as opposed to
    /// an analysis that ran and failed.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self.root(),
            Error::Syntax { .. } | Error::Semantic(_) | Error::Config { .. } | Error::Configuration(_)
        )
    }
}
