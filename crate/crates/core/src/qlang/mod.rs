// SPDX-License-Identifier: Apache-2.0

//! The query language: `Select`/`Extract` queries over benchmark datasets.

mod ast;
mod eval;
mod parser;
mod repl;

use std::path::PathBuf;

use thiserror::Error;

use crate::extractors::ExtractError;
use crate::harness::HarnessError;
use crate::predicates::PredicateError;
use crate::store::StoreError;
use crate::transforms::TransformError;

pub use ast::{Condition, OutputField, Query};
pub use eval::{benchmark_totals, match_labels, solver_predicates, Engine, Evaluation};
pub use parser::{parse_condition, parse_query};
pub use repl::{repl, report_error, run_query};

#[derive(Debug, Error)]
pub enum QlangError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("at column {column}: {source}")]
    Predicate {
        column: usize,
        #[source]
        source: PredicateError,
    },
    #[error("at column {column}: {source}")]
    Extractor {
        column: usize,
        #[source]
        source: ExtractError,
    },
    #[error("at column {column}: {source}")]
    Transform {
        column: usize,
        #[source]
        source: TransformError,
    },
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Eval(#[from] PredicateError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error("cannot create {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write output: {0}")]
    Output(#[source] std::io::Error),
}

impl QlangError {
    /// Column of the offending token for errors found while parsing.
    pub fn column(&self) -> Option<usize> {
        match self {
            QlangError::Syntax { column, .. }
            | QlangError::Predicate { column, .. }
            | QlangError::Extractor { column, .. }
            | QlangError::Transform { column, .. } => Some(*column),
            _ => None,
        }
    }
}
