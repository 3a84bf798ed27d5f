//! Readers and writers for corpus label-file formats.
//!
//! Four physical formats are supported:
//!
//! - the native arc/time table pair (tab-separated, round-trippable),
//! - end-time word files: `<seconds> <label>` rows, each row ending the
//!   segment the previous row started,
//! - point-event tone files: `<seconds> <label>` rows, each row a
//!   zero-width event,
//! - start/end files: `<start> <end> <label>` rows in samples, adjacent
//!   rows sharing a boundary node,
//! - bracketed trees whose leaves align against an existing word chain.
//!
//! Every reader either produces data that assembles into a well-formed
//! graph or reports an error with the offending row; ill-formed graphs are
//! never returned silently.

mod eq_classes;
mod labels;
mod merge;
mod native;
mod treebank;

use thiserror::Error;

use crate::graph::{Arc, BuildError, NodeId, TimePoint, ValidationReport};

pub use eq_classes::{apply_eq_classes, parse_class_file, ArcSelector, ClassAssignment};
pub use labels::{
    read_end_time_labels, read_point_events, read_start_end_labels, seconds_to_samples,
    strip_decorations,
};
pub use merge::combine_layers;
pub use native::{parse_arc_rows, parse_time_rows, read_native, write_native};
pub use treebank::{align_syntax, parse_treebank, SExprChild, SExprTree};

/// A mergeable annotation layer: arcs plus the time entries of their
/// nodes, with ids local to the layer.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Layer {
    pub arcs: Vec<Arc>,
    pub times: Vec<(NodeId, TimePoint)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IngestError {
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
    #[error("row {row}: time {time} decreases below the previous row")]
    NonMonotone { row: usize, time: String },
    #[error("row {row}: segment overlaps or reorders the previous row")]
    Overlap { row: usize },
    #[error("{0}")]
    Build(#[from] BuildError),
    #[error("ill-formed graph:\n{0}")]
    Invalid(ValidationReport),
    #[error("offset {offset}: {message}")]
    SExpr { offset: usize, message: String },
    #[error(
        "tree leaves diverge from the word chain at index {index}: leaf `{leaf}` vs word `{word}`"
    )]
    LeafMismatch {
        index: usize,
        leaf: String,
        word: String,
    },
    #[error("arcs of type `{0}` do not form a chain")]
    NotAChain(String),
}

impl IngestError {
    fn row(row: usize, message: impl Into<String>) -> Self {
        IngestError::Row {
            row,
            message: message.into(),
        }
    }
}
