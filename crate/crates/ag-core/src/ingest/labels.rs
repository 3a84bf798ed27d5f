//! Readers for flat label files: end-time word files, point-event tone
//! files and start/end segment files.
//!
//! Times given in seconds are converted to samples exactly, using integer
//! arithmetic on the decimal digits with ties rounding up, so the result
//! never deviates from `seconds * rate` by more than half a sample.

use crate::graph::{Arc, NodeId, TimePoint};

use super::{IngestError, Layer};

/// Converts a decimal-second string to samples, rounding half-up.
pub fn seconds_to_samples(text: &str, sample_rate: u32) -> Result<u64, IngestError> {
    parse_seconds(text, sample_rate).ok_or_else(|| IngestError::Row {
        row: 0,
        message: format!("unparseable time `{text}`"),
    })
}

fn parse_seconds(text: &str, sample_rate: u32) -> Option<u64> {
    let (int_part, frac_part) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits_ok = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if !digits_ok(int_part) || !digits_ok(frac_part) || frac_part.len() > 18 {
        return None;
    }
    let mantissa: u128 = format!("{int_part}{frac_part}").parse().ok()?;
    let denominator = 10u128.pow(frac_part.len() as u32);
    let numerator = mantissa.checked_mul(sample_rate as u128)?;
    let samples = (numerator * 2 + denominator) / (denominator * 2);
    u64::try_from(samples).ok()
}

fn split_row(line: &str) -> Option<(&str, &str)> {
    let mut parts = line.trim().splitn(2, char::is_whitespace);
    let time = parts.next()?;
    let label = parts.next()?.trim();
    if label.is_empty() {
        None
    } else {
        Some((time, label))
    }
}

/// Reads an end-time word file: each row gives the end time of its
/// segment, the first segment starting at time zero. Produces one chain of
/// arcs over nodes at the segment boundaries.
pub fn read_end_time_labels(
    text: &str,
    type_label: &str,
    sample_rate: u32,
) -> Result<Layer, IngestError> {
    let mut layer = Layer::default();
    layer.times.push((NodeId(0), TimePoint(0)));
    let mut prev_samples = 0u64;
    let mut next_node = 1u32;
    let mut next_arc = 1u32;
    for (idx, line) in text.lines().enumerate() {
        let row = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (time_text, label) =
            split_row(line).ok_or_else(|| IngestError::row(row, "expected `<time> <label>`"))?;
        let samples = parse_seconds(time_text, sample_rate)
            .ok_or_else(|| IngestError::row(row, format!("unparseable time `{time_text}`")))?;
        if samples < prev_samples {
            return Err(IngestError::NonMonotone {
                row,
                time: time_text.to_string(),
            });
        }
        layer.times.push((NodeId(next_node), TimePoint(samples)));
        layer.arcs.push(Arc::new(
            next_arc,
            next_node - 1,
            next_node,
            type_label,
            label,
            None,
        ));
        next_node += 1;
        next_arc += 1;
        prev_samples = samples;
    }
    if layer.arcs.is_empty() {
        layer.times.clear();
    }
    Ok(layer)
}

/// Reads a point-event tone file: each row becomes a zero-width arc over a
/// fresh node pair carrying the same time, the standard encoding for tone
/// targets.
pub fn read_point_events(
    text: &str,
    type_label: &str,
    sample_rate: u32,
) -> Result<Layer, IngestError> {
    let mut layer = Layer::default();
    let mut prev_samples = 0u64;
    let mut first = true;
    let mut next_node = 0u32;
    let mut next_arc = 1u32;
    for (idx, line) in text.lines().enumerate() {
        let row = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (time_text, label) =
            split_row(line).ok_or_else(|| IngestError::row(row, "expected `<time> <label>`"))?;
        let samples = parse_seconds(time_text, sample_rate)
            .ok_or_else(|| IngestError::row(row, format!("unparseable time `{time_text}`")))?;
        if !first && samples < prev_samples {
            return Err(IngestError::NonMonotone {
                row,
                time: time_text.to_string(),
            });
        }
        first = false;
        prev_samples = samples;
        layer.times.push((NodeId(next_node), TimePoint(samples)));
        layer
            .times
            .push((NodeId(next_node + 1), TimePoint(samples)));
        layer.arcs.push(Arc::new(
            next_arc,
            next_node,
            next_node + 1,
            type_label,
            label,
            None,
        ));
        next_node += 2;
        next_arc += 1;
    }
    Ok(layer)
}

/// Reads a start/end segment file with boundaries in samples. Adjacent
/// rows whose end and start coincide share one node, reproducing the
/// chain topology of phone transcriptions.
pub fn read_start_end_labels(text: &str, type_label: &str) -> Result<Layer, IngestError> {
    let mut layer = Layer::default();
    let mut next_node = 0u32;
    let mut next_arc = 1u32;
    let mut prev_end: Option<(u64, u32)> = None;
    for (idx, line) in text.lines().enumerate() {
        let row = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 3 {
            return Err(IngestError::row(row, "expected `<start> <end> <label>`"));
        }
        let start: u64 = fields[0]
            .parse()
            .map_err(|_| IngestError::row(row, format!("bad start `{}`", fields[0])))?;
        let end: u64 = fields[1]
            .parse()
            .map_err(|_| IngestError::row(row, format!("bad end `{}`", fields[1])))?;
        let label = fields[2..].join(" ");
        if start > end {
            return Err(IngestError::Overlap { row });
        }
        let src = match prev_end {
            Some((prev, node)) if start == prev => node,
            Some((prev, _)) if start < prev => return Err(IngestError::Overlap { row }),
            _ => {
                let node = next_node;
                next_node += 1;
                layer.times.push((NodeId(node), TimePoint(start)));
                node
            }
        };
        let dst = next_node;
        next_node += 1;
        layer.times.push((NodeId(dst), TimePoint(end)));
        layer
            .arcs
            .push(Arc::new(next_arc, src, dst, type_label, &label, None));
        next_arc += 1;
        prev_end = Some((end, dst));
    }
    Ok(layer)
}

/// Strips decoration characters (e.g. the braces in `{hundred`) from every
/// content label of a layer.
pub fn strip_decorations(layer: &mut Layer, chars: &str) {
    if chars.is_empty() {
        return;
    }
    for arc in &mut layer.arcs {
        arc.content_label.retain(|c| !chars.contains(c));
    }
}
