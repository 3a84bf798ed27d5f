//! Sidecar equivalence-class assignment.
//!
//! Raw label files carry no equivalence classes, so associations (a word
//! and its pitch accent, say) are supplied separately: one assignment per
//! line, `<selector> <class-name>`, where a selector is either
//!
//! - `id:<arc-id>`, or
//! - `<type>:<content>` for the first arc with that type and content
//!   label, or
//! - `<type>:<content>:<k>` for the k-th such arc (1-based), counted in
//!   structural order.
//!
//! Lines starting with `#` are comments. Applying assignments returns a
//! new graph; a selector that matches nothing is an error naming its row.

use crate::graph::{AnnotationGraph, Arc, ArcId};

use super::IngestError;

/// One parsed assignment line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassAssignment {
    pub row: usize,
    pub selector: ArcSelector,
    pub class: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArcSelector {
    ById(ArcId),
    ByLabel {
        level: String,
        content: String,
        occurrence: usize,
    },
}

/// Parses a sidecar file of class assignments.
pub fn parse_class_file(text: &str) -> Result<Vec<ClassAssignment>, IngestError> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let row = idx + 1;
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (Some(selector), Some(class), None) = (fields.next(), fields.next(), fields.next())
        else {
            return Err(IngestError::row(row, "expected `<selector> <class-name>`"));
        };
        let selector = parse_selector(row, selector)?;
        out.push(ClassAssignment {
            row,
            selector,
            class: class.to_string(),
        });
    }
    Ok(out)
}

fn parse_selector(row: usize, text: &str) -> Result<ArcSelector, IngestError> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        ["id", n] => n
            .parse::<u32>()
            .map(|id| ArcSelector::ById(ArcId(id)))
            .map_err(|_| IngestError::row(row, format!("bad arc id `{n}`"))),
        [level, content] => Ok(ArcSelector::ByLabel {
            level: level.to_string(),
            content: content.to_string(),
            occurrence: 1,
        }),
        [level, content, k] => {
            let occurrence = k
                .parse::<usize>()
                .ok()
                .filter(|k| *k >= 1)
                .ok_or_else(|| IngestError::row(row, format!("bad occurrence `{k}`")))?;
            Ok(ArcSelector::ByLabel {
                level: level.to_string(),
                content: content.to_string(),
                occurrence,
            })
        }
        _ => Err(IngestError::row(
            row,
            format!("bad selector `{text}`; expected id:N, TYPE:CONTENT or TYPE:CONTENT:K"),
        )),
    }
}

/// Applies assignments, returning a new graph with the classes set.
/// Occurrences count arcs of the given type and content in structural
/// order (source position, then id), so they are stable across row
/// permutations of the arc table.
pub fn apply_eq_classes(
    g: &AnnotationGraph,
    assignments: &[ClassAssignment],
) -> Result<AnnotationGraph, IngestError> {
    let positions = g.topological_positions();
    let mut ordered: Vec<&Arc> = g.arcs().iter().collect();
    ordered.sort_by_key(|a| (positions.get(&a.src).copied().unwrap_or(usize::MAX), a.id));

    let mut arcs: Vec<Arc> = g.arcs().to_vec();
    for assignment in assignments {
        let target = match &assignment.selector {
            ArcSelector::ById(id) => {
                if g.arc(*id).is_none() {
                    return Err(IngestError::row(
                        assignment.row,
                        format!("no arc with id {id}"),
                    ));
                }
                *id
            }
            ArcSelector::ByLabel {
                level,
                content,
                occurrence,
            } => ordered
                .iter()
                .filter(|a| a.type_label == *level && a.content_label == *content)
                .nth(occurrence - 1)
                .map(|a| a.id)
                .ok_or_else(|| {
                    IngestError::row(
                        assignment.row,
                        format!("no arc matches `{level}:{content}` (occurrence {occurrence})"),
                    )
                })?,
        };
        let arc = arcs
            .iter_mut()
            .find(|a| a.id == target)
            .expect("target id came from this graph");
        arc.eq_class = Some(assignment.class.clone());
    }
    let times: Vec<_> = g.times().iter().map(|(n, t)| (*n, *t)).collect();
    AnnotationGraph::build(arcs, times, g.sample_rate(), g.utterance_id())
        .map_err(IngestError::Build)
}
