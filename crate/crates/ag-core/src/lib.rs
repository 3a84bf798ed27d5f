//! Annotation graphs for multi-layer speech transcriptions.
//!
//! An annotation graph is a labelled acyclic digraph whose arcs carry a
//! three-part label (type, content, optional equivalence class) and whose
//! nodes optionally carry sample offsets into a signal. The crate provides:
//!
//! - the graph model itself with well-formedness validation ([`graph`]),
//! - derived relations over graphs: structural and temporal precedence,
//!   structural inclusion, typed dominance, rule-driven immediate dominance,
//!   association and label-homogeneous closures ([`relations`]),
//! - a small surface query language plus a suite of compiled example
//!   queries ([`query`]),
//! - readers and writers for common corpus label-file formats ([`ingest`]),
//! - time-aligned segment reports ([`report`]),
//! - a line-oriented configuration format for hierarchies, phrase-structure
//!   rules and label classes ([`config`]).

pub mod config;
pub mod graph;
pub mod ingest;
pub mod query;
pub mod relations;
pub mod report;

#[doc(hidden)]
pub mod testing;

pub use config::{Config, ConfigError, SuiteLevels};
pub use graph::{
    AnnotationGraph, Arc, ArcId, BuildError, GraphError, NodeId, ResultTable, TimePoint,
    ValidationReport, Violation, ViolationKind,
};
pub use query::{
    eval_example_suite, eval_query, mark_anchor, parse_query, Match, MatchSet, ParseError,
    QueryAst, SuiteError, SuiteOutcome, SuiteResult,
};
pub use relations::{
    assoc, dom, i_dom, in_class, kleene, s_incl, s_prec, s_prec_naive, t_prec, BinaryRelation,
    ClassError, HierarchyError, LabelClasses, LabelField, PhraseRule, QueryConfig, Relations,
    TypeHierarchy,
};
pub use report::{
    computed_count, emit_csv, emit_emu, group_report, segment_table, ReportError, SegmentRow,
    SegmentTable, TableKind,
};
