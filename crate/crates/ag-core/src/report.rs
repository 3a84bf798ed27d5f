//! Report generation: turning match sets into time-aligned segment tables.
//!
//! Rows carry millisecond times derived from the anchor arc's endpoint
//! samples. Milliseconds are rendered as the shortest exact decimal when
//! `samples * 1000 / rate` terminates (it always does at the usual
//! power-of-two-and-five rates such as 16 kHz, where the granularity is
//! 1/16 ms); otherwise the value is rounded to six decimals.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{ArcId, TimePoint};
use crate::query::MatchSet;
use crate::relations::s_prec;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReportError {
    #[error("term index {term} is out of range for a query with {n_terms} terms")]
    UnboundTerm { term: usize, n_terms: usize },
}

/// Whether a table holds proper segments or zero-width events.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Segment,
    Event,
}

impl TableKind {
    fn as_str(&self) -> &'static str {
        match self {
            TableKind::Segment => "segment",
            TableKind::Event => "event",
        }
    }
}

/// One matching token: its content label, start and end in samples, and
/// the utterance it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentRow {
    pub label: String,
    pub start: TimePoint,
    pub end: TimePoint,
    pub utterance: String,
}

/// A match that produced no row because an anchor endpoint carries no
/// time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedRow {
    pub index: usize,
    pub anchor: ArcId,
}

/// A time-aligned result table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentTable {
    pub database: String,
    pub query: String,
    pub kind: TableKind,
    pub sample_rate: u32,
    pub rows: Vec<SegmentRow>,
    pub skipped: Vec<SkippedRow>,
}

impl SegmentTable {
    /// True when some matches could not be timed and were skipped.
    pub fn is_partial(&self) -> bool {
        !self.skipped.is_empty()
    }
}

/// Renders a sample offset in milliseconds with the fewest digits that
/// are still exact: no trailing zeros, no exponent.
pub fn ms_string(samples: TimePoint, sample_rate: u32) -> String {
    assert!(sample_rate > 0, "sample rate must be positive");
    let mut num = samples.0 as u128 * 1000;
    let mut den = sample_rate as u128;
    let g = gcd(num, den);
    num /= g;
    den /= g;
    // Split powers of two and five out of the denominator; anything left
    // makes the decimal non-terminating.
    let (mut twos, mut fives, mut rest) = (0u32, 0u32, den);
    while rest % 2 == 0 {
        rest /= 2;
        twos += 1;
    }
    while rest % 5 == 0 {
        rest /= 5;
        fives += 1;
    }
    let decimals = if rest == 1 { twos.max(fives) } else { 6 };
    if decimals == 0 {
        return num.to_string();
    }
    let scaled = if rest == 1 {
        num * 10u128.pow(decimals) / den
    } else {
        (num * 10u128.pow(decimals) + den / 2) / den
    };
    let mut s = format!(
        "{}.{:0width$}",
        scaled / 10u128.pow(decimals),
        scaled % 10u128.pow(decimals),
        width = decimals as usize
    );
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.pop();
    }
    s
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Builds a segment table from a match set: one row per match, in match
/// order, timed from the anchor arc's endpoints. Matches whose anchor
/// lacks a time on either endpoint are skipped and recorded, flagging the
/// table as partial.
pub fn segment_table(ms: &MatchSet<'_>, database: &str) -> SegmentTable {
    let g = ms.graph;
    let mut rows = Vec::with_capacity(ms.matches.len());
    let mut skipped = Vec::new();
    for (index, m) in ms.matches.iter().enumerate() {
        let anchor = ms.anchor_arc(m);
        let arc = g.arc(anchor).expect("bound arcs exist in the graph");
        match (g.time(arc.src), g.time(arc.dst)) {
            (Some(start), Some(end)) => rows.push(SegmentRow {
                label: arc.content_label.clone(),
                start,
                end,
                utterance: g.utterance_id().to_string(),
            }),
            _ => skipped.push(SkippedRow { index, anchor }),
        }
    }
    let kind = if !rows.is_empty() && rows.iter().all(|r| r.start == r.end) {
        TableKind::Event
    } else {
        TableKind::Segment
    };
    SegmentTable {
        database: database.to_string(),
        query: ms.query.clone(),
        kind,
        sample_rate: g.sample_rate(),
        rows,
        skipped,
    }
}

/// Emits the four-line header (`database:`, `query:`, `type:`, `#`)
/// followed by one tab-separated row per segment.
pub fn emit_emu(table: &SegmentTable) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "database:{}", table.database);
    let _ = writeln!(out, "query:{}", table.query);
    let _ = writeln!(out, "type:{}", table.kind.as_str());
    let _ = writeln!(out, "#");
    for row in &table.rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            row.label,
            ms_string(row.start, table.sample_rate),
            ms_string(row.end, table.sample_rate),
            row.utterance
        );
    }
    out
}

/// Emits the table as CSV with a fixed `label,start_ms,end_ms,utterance`
/// header; fields containing commas, quotes or newlines are quoted with
/// doubled inner quotes.
pub fn emit_csv(table: &SegmentTable) -> String {
    let mut out = String::from("label,start_ms,end_ms,utterance\n");
    for row in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            csv_field(&row.label),
            ms_string(row.start, table.sample_rate),
            ms_string(row.end, table.sample_rate),
            csv_field(&row.utterance)
        );
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Splits a match set into one table per distinct arc bound to
/// `group_term`, in order of first appearance, so that each sub-graph of
/// the result can be reported separately.
pub fn group_report(
    ms: &MatchSet<'_>,
    group_term: usize,
    database: &str,
) -> Result<Vec<SegmentTable>, ReportError> {
    if group_term >= ms.n_terms {
        return Err(ReportError::UnboundTerm {
            term: group_term,
            n_terms: ms.n_terms,
        });
    }
    let mut order: Vec<ArcId> = Vec::new();
    for m in &ms.matches {
        let id = m.bindings[group_term];
        if !order.contains(&id) {
            order.push(id);
        }
    }
    let mut tables = Vec::with_capacity(order.len());
    for group in order {
        let sub = MatchSet {
            graph: ms.graph,
            query: ms.query.clone(),
            n_terms: ms.n_terms,
            anchor_term: ms.anchor_term,
            matches: ms
                .matches
                .iter()
                .filter(|m| m.bindings[group_term] == group)
                .cloned()
                .collect(),
        };
        tables.push(segment_table(&sub, database));
    }
    Ok(tables)
}

/// The built-in computed column: for each match, the number of arcs of
/// `counted_type` lying between the anchor and the end of the arc bound to
/// `enclosing_term`: counted arcs start at or after the anchor's source
/// and end within the enclosing arc.
pub fn computed_count(
    ms: &MatchSet<'_>,
    enclosing_term: usize,
    counted_type: &str,
) -> Result<Vec<usize>, ReportError> {
    if enclosing_term >= ms.n_terms {
        return Err(ReportError::UnboundTerm {
            term: enclosing_term,
            n_terms: ms.n_terms,
        });
    }
    let g = ms.graph;
    let prec = s_prec(g);
    let mut out = Vec::with_capacity(ms.matches.len());
    for m in &ms.matches {
        let anchor = g.arc(ms.anchor_arc(m)).expect("bound arc");
        let enclosing = g.arc(m.bindings[enclosing_term]).expect("bound arc");
        let count = g
            .arcs()
            .iter()
            .filter(|k| {
                k.type_label == counted_type
                    && prec.contains(anchor.src, k.src)
                    && prec.contains(k.dst, enclosing.dst)
            })
            .count();
        out.push(count);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::TimePoint;

    #[test]
    fn ms_rendering_matches_sixteenths() {
        assert_eq!(ms_string(TimePoint(0), 16000), "0");
        assert_eq!(ms_string(TimePoint(2360), 16000), "147.5");
        assert_eq!(ms_string(TimePoint(5200), 16000), "325");
        assert_eq!(ms_string(TimePoint(6160), 16000), "385");
        assert_eq!(ms_string(TimePoint(10173), 16000), "635.8125");
        assert_eq!(ms_string(TimePoint(3270), 16000), "204.375");
    }

    #[test]
    fn ms_rendering_other_rates() {
        assert_eq!(ms_string(TimePoint(8000), 8000), "1000");
        assert_eq!(ms_string(TimePoint(1), 40), "25");
        // 1 sample at 44.1 kHz is non-terminating; six decimals.
        assert_eq!(ms_string(TimePoint(1), 44100), "0.022676");
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }
}
