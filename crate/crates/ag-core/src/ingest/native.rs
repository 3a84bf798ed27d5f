//! The native table pair: an arc table and a time table.
//!
//! Arc rows are `id <TAB> src <TAB> dst <TAB> type <TAB> content <TAB> class`
//! with an empty final field for an absent class; time rows are
//! `node <TAB> samples`. Lines starting with `#` are comments. A single
//! leading header line is tolerated on either table (recognized by its
//! non-numeric first field). [`write_native`] emits rows sorted by id and
//! round-trips byte-identically through [`read_native`].

use crate::graph::{AnnotationGraph, Arc, ArcId, NodeId, TimePoint};

use super::IngestError;

fn data_rows(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

fn parse_field<T: std::str::FromStr>(
    row: usize,
    field: &str,
    what: &str,
) -> Result<T, IngestError> {
    field
        .parse::<T>()
        .map_err(|_| IngestError::row(row, format!("{what} is not an integer: `{field}`")))
}

/// Parses arc rows, skipping comments and at most one header line.
pub fn parse_arc_rows(text: &str) -> Result<Vec<Arc>, IngestError> {
    let mut arcs = Vec::new();
    let mut first_data_row = true;
    for (row, line) in data_rows(text) {
        let fields: Vec<&str> = line.split('\t').collect();
        if first_data_row && fields.first().is_some_and(|f| f.parse::<u32>().is_err()) {
            first_data_row = false;
            continue;
        }
        first_data_row = false;
        if fields.len() != 6 {
            return Err(IngestError::row(
                row,
                format!("expected 6 tab-separated fields, found {}", fields.len()),
            ));
        }
        arcs.push(Arc {
            id: ArcId(parse_field(row, fields[0], "arc id")?),
            src: NodeId(parse_field(row, fields[1], "source node")?),
            dst: NodeId(parse_field(row, fields[2], "target node")?),
            type_label: fields[3].to_string(),
            content_label: fields[4].to_string(),
            eq_class: if fields[5].is_empty() {
                None
            } else {
                Some(fields[5].to_string())
            },
        });
    }
    Ok(arcs)
}

/// Parses time rows, skipping comments and at most one header line. A
/// node listed on several rows keeps the last time.
pub fn parse_time_rows(text: &str) -> Result<Vec<(NodeId, TimePoint)>, IngestError> {
    let mut times = Vec::new();
    let mut first_data_row = true;
    for (row, line) in data_rows(text) {
        let fields: Vec<&str> = line.split('\t').collect();
        if first_data_row && fields.first().is_some_and(|f| f.parse::<u32>().is_err()) {
            first_data_row = false;
            continue;
        }
        first_data_row = false;
        if fields.len() != 2 {
            return Err(IngestError::row(
                row,
                format!("expected 2 tab-separated fields, found {}", fields.len()),
            ));
        }
        times.push((
            NodeId(parse_field(row, fields[0], "node id")?),
            TimePoint(parse_field(row, fields[1], "time")?),
        ));
    }
    Ok(times)
}

/// Reads a table pair into a graph, validating it on the way in.
pub fn read_native(
    arc_text: &str,
    time_text: &str,
    sample_rate: u32,
    utterance_id: &str,
) -> Result<AnnotationGraph, IngestError> {
    let arcs = parse_arc_rows(arc_text)?;
    let times = parse_time_rows(time_text)?;
    let graph = AnnotationGraph::build(arcs, times, sample_rate, utterance_id)?;
    let report = graph.validate();
    if !report.is_empty() {
        return Err(IngestError::Invalid(report));
    }
    Ok(graph)
}

/// Serializes a graph as `(arc_text, time_text)`, rows sorted by id.
/// Labels must not contain tabs or newlines; the table format cannot
/// carry them.
pub fn write_native(g: &AnnotationGraph) -> (String, String) {
    let mut arc_text = String::new();
    for a in g.arcs() {
        arc_text.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            a.id,
            a.src,
            a.dst,
            a.type_label,
            a.content_label,
            a.eq_class.as_deref().unwrap_or("")
        ));
    }
    let mut time_text = String::new();
    for (node, time) in g.times() {
        time_text.push_str(&format!("{node}\t{time}\n"));
    }
    (arc_text, time_text)
}
