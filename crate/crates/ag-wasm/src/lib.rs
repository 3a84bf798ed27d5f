//! Browser bindings for the annotation-graph toolkit.
//!
//! A [`Session`] holds one graph and one configuration; every method takes
//! and returns plain strings (JSON for structured results), which keeps
//! the boundary with the page's JavaScript trivial. The interesting logic
//! all lives in the core crate; this one only adapts it.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use ag_core::graph::validate_tables;
use ag_core::ingest::{parse_arc_rows, parse_time_rows};
use ag_core::report::ms_string;
use ag_core::{
    emit_csv, emit_emu, eval_example_suite, eval_query, parse_query, segment_table,
    AnnotationGraph, Config, SuiteResult,
};

/// The bundled sample graph's arc table.
#[wasm_bindgen]
pub fn fixture_arcs() -> String {
    include_str!("../../../fixtures/timit.arc").to_string()
}

/// The bundled sample graph's time table.
#[wasm_bindgen]
pub fn fixture_times() -> String {
    include_str!("../../../fixtures/timit.time").to_string()
}

/// The bundled configuration matching the sample graph.
#[wasm_bindgen]
pub fn fixture_config() -> String {
    include_str!("../../../fixtures/timit.cfg").to_string()
}

#[derive(Serialize)]
struct LoadResult {
    ok: bool,
    nodes: usize,
    arcs: usize,
    violations: Vec<String>,
    error: Option<String>,
}

#[derive(Serialize)]
struct QueryResult {
    ok: bool,
    error: Option<String>,
    pos: Option<usize>,
    emu: Option<String>,
    csv: Option<String>,
    anchor_term: usize,
    matches: Vec<MatchDto>,
}

#[derive(Serialize)]
struct MatchDto {
    bindings: Vec<u32>,
    anchor: u32,
}

#[derive(Serialize)]
struct SuiteEntryDto {
    name: String,
    count: usize,
    grouped: bool,
    tables: Vec<String>,
    arcs: Vec<Vec<u32>>,
}

#[derive(Serialize)]
struct TimelineDto {
    rate: u32,
    utterance: String,
    levels: Vec<String>,
    arcs: Vec<TimelineArcDto>,
}

#[derive(Serialize)]
struct TimelineArcDto {
    id: u32,
    level: String,
    label: String,
    class: Option<String>,
    src: u32,
    dst: u32,
    start: Option<f64>,
    end: Option<f64>,
    start_ms: Option<String>,
    end_ms: Option<String>,
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).unwrap_or_else(|e| format!("{{\"error\":\"{e}\"}}"))
}

/// One graph plus one configuration, queried from the page.
#[wasm_bindgen]
pub struct Session {
    graph: Option<AnnotationGraph>,
    config: Config,
}

impl Default for Session {
    fn default() -> Self {
        Self::new()
    }
}

#[wasm_bindgen]
impl Session {
    #[wasm_bindgen(constructor)]
    pub fn new() -> Session {
        Session {
            graph: None,
            config: Config::default(),
        }
    }

    /// Parses and validates a table pair; on a clean result the graph
    /// becomes the session's current one. Violations are reported, not
    /// fatal to the session.
    pub fn load_graph(
        &mut self,
        arc_text: &str,
        time_text: &str,
        rate: u32,
        utterance: &str,
    ) -> String {
        let mut result = LoadResult {
            ok: false,
            nodes: 0,
            arcs: 0,
            violations: Vec::new(),
            error: None,
        };
        let arcs = match parse_arc_rows(arc_text) {
            Ok(arcs) => arcs,
            Err(e) => {
                result.error = Some(format!("arc table: {e}"));
                return json(&result);
            }
        };
        let times = match parse_time_rows(time_text) {
            Ok(times) => times,
            Err(e) => {
                result.error = Some(format!("time table: {e}"));
                return json(&result);
            }
        };
        let report = validate_tables(&arcs, &times);
        if !report.is_empty() {
            result.violations = report
                .violations
                .iter()
                .map(|v| format!("{}: {}", v.kind, v.message))
                .collect();
            return json(&result);
        }
        match AnnotationGraph::build(arcs, times, rate, utterance) {
            Ok(graph) => {
                result.ok = true;
                result.nodes = graph.nodes().len();
                result.arcs = graph.arcs().len();
                self.graph = Some(graph);
            }
            Err(e) => result.error = Some(e.to_string()),
        }
        json(&result)
    }

    /// Replaces the session configuration. Returns an error message or
    /// the empty string.
    pub fn load_config(&mut self, text: &str) -> String {
        match Config::parse(text) {
            Ok(config) => {
                self.config = config;
                String::new()
            }
            Err(e) => e.to_string(),
        }
    }

    /// Evaluates a query against the current graph, returning the match
    /// bindings plus rendered segment tables.
    pub fn run_query(&self, text: &str, database: &str) -> String {
        let mut result = QueryResult {
            ok: false,
            error: None,
            pos: None,
            emu: None,
            csv: None,
            anchor_term: 0,
            matches: Vec::new(),
        };
        let Some(graph) = &self.graph else {
            result.error = Some("no graph loaded".to_string());
            return json(&result);
        };
        let ast = match parse_query(text) {
            Ok(ast) => ast,
            Err(e) => {
                result.pos = Some(e.pos);
                result.error = Some(e.to_string());
                return json(&result);
            }
        };
        let mut ms = eval_query(graph, &ast, &self.config.query);
        ms.query = text.to_string();
        let table = segment_table(&ms, database);
        result.ok = true;
        result.anchor_term = ms.anchor_term;
        result.matches = ms
            .matches
            .iter()
            .map(|m| MatchDto {
                bindings: m.bindings.iter().map(|id| id.0).collect(),
                anchor: ms.anchor_arc(m).0,
            })
            .collect();
        result.emu = Some(emit_emu(&table));
        result.csv = Some(emit_csv(&table));
        json(&result)
    }

    /// Runs the built-in example queries; each entry carries its rendered
    /// tables and the matched arc ids.
    pub fn run_examples(&self, database: &str) -> String {
        let Some(graph) = &self.graph else {
            return "{\"error\":\"no graph loaded\"}".to_string();
        };
        let outcomes = match eval_example_suite(graph, &self.config.query, &self.config.levels) {
            Ok(outcomes) => outcomes,
            Err(e) => return format!("{{\"error\":{}}}", json(&e.to_string())),
        };
        let entries: Vec<SuiteEntryDto> = outcomes
            .iter()
            .map(|outcome| match &outcome.result {
                SuiteResult::Flat(ms) => SuiteEntryDto {
                    name: outcome.name.to_string(),
                    count: ms.len(),
                    grouped: false,
                    tables: vec![emit_emu(&segment_table(ms, database))],
                    arcs: ms
                        .matches
                        .iter()
                        .map(|m| m.bindings.iter().map(|id| id.0).collect())
                        .collect(),
                },
                SuiteResult::Grouped(groups) => SuiteEntryDto {
                    name: outcome.name.to_string(),
                    count: groups.len(),
                    grouped: true,
                    tables: groups
                        .iter()
                        .map(|g| emit_emu(&segment_table(g, database)))
                        .collect(),
                    arcs: groups
                        .iter()
                        .map(|g| {
                            g.matches
                                .iter()
                                .flat_map(|m| m.bindings.iter().map(|id| id.0))
                                .collect()
                        })
                        .collect(),
                },
            })
            .collect();
        json(&entries)
    }

    /// The current graph as drawable spans: every arc with its level,
    /// labels and millisecond endpoints (absent when a node is untimed).
    pub fn timeline(&self) -> String {
        let Some(graph) = &self.graph else {
            return "{\"error\":\"no graph loaded\"}".to_string();
        };
        let rate = graph.sample_rate();
        let mut levels: Vec<String> = Vec::new();
        let arcs: Vec<TimelineArcDto> = graph
            .arcs()
            .iter()
            .map(|a| {
                if !levels.contains(&a.type_label) {
                    levels.push(a.type_label.clone());
                }
                let start = graph.time(a.src);
                let end = graph.time(a.dst);
                TimelineArcDto {
                    id: a.id.0,
                    level: a.type_label.clone(),
                    label: a.content_label.clone(),
                    class: a.eq_class.clone(),
                    src: a.src.0,
                    dst: a.dst.0,
                    start: start.map(|t| t.0 as f64),
                    end: end.map(|t| t.0 as f64),
                    start_ms: start.map(|t| ms_string(t, rate)),
                    end_ms: end.map(|t| ms_string(t, rate)),
                }
            })
            .collect();
        json(&TimelineDto {
            rate,
            utterance: graph.utterance_id().to_string(),
            levels,
            arcs,
        })
    }
}
