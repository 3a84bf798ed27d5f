//! The annotation-graph data model.
//!
//! A graph is a node set, an arc table and a partial map from nodes to
//! sample offsets. Nodes are never stored independently of arcs: the node
//! set is exactly the set of arc endpoints, so orphan nodes cannot be
//! produced by [`AnnotationGraph::build`]. Graphs are immutable once built
//! and safe to share across threads.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Node identifier, unique within a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

/// Arc identifier, unique within a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArcId(pub u32);

/// A time offset, in samples into the associated signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimePoint(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One labelled edge: id, endpoints and the three label fields.
///
/// `type_label` is the annotation level (word, phoneme, tone, ...),
/// `content_label` the substantive transcript element, and `eq_class` an
/// optional equivalence-class name used to model association between
/// levels. An absent `eq_class` never joins with anything, including
/// another absent one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub id: ArcId,
    pub src: NodeId,
    pub dst: NodeId,
    pub type_label: String,
    pub content_label: String,
    pub eq_class: Option<String>,
}

impl Arc {
    pub fn new(
        id: u32,
        src: u32,
        dst: u32,
        type_label: &str,
        content_label: &str,
        eq_class: Option<&str>,
    ) -> Self {
        Arc {
            id: ArcId(id),
            src: NodeId(src),
            dst: NodeId(dst),
            type_label: type_label.to_string(),
            content_label: content_label.to_string(),
            eq_class: eq_class.map(str::to_string),
        }
    }
}

/// Errors raised while assembling a graph from an arc table.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("duplicate arc id {0}")]
    DuplicateArcId(ArcId),
    #[error("time entry for node {0} which appears in no arc")]
    DanglingTime(NodeId),
}

/// Errors raised by operations over an existing graph.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown arc id {0}")]
    UnknownArcId(ArcId),
}

/// The kind of a well-formedness violation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Cycle,
    OrphanNode,
    TimeOrder,
    DuplicateId,
    DanglingNodeRef,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::Cycle => "cycle",
            ViolationKind::OrphanNode => "orphan-node",
            ViolationKind::TimeOrder => "time-order",
            ViolationKind::DuplicateId => "duplicate-id",
            ViolationKind::DanglingNodeRef => "dangling-node-ref",
        };
        f.write_str(s)
    }
}

/// One well-formedness violation with the offending node or arc ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub ids: Vec<u32>,
    pub message: String,
}

/// Accumulated well-formedness violations. Empty iff the graph satisfies
/// the model's conditions: acyclicity, no degree-zero nodes, and
/// non-decreasing times along every arc.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_kind(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("OK");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}: {}", v.kind, v.message)?;
        }
        Ok(())
    }
}

/// A materialized sub-graph: full arc records plus the time entries of
/// their endpoints, in the same tabular shape as the arc relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultTable {
    pub arcs: Vec<Arc>,
    pub times: Vec<(NodeId, TimePoint)>,
}

/// An annotation graph: labelled DAG with a partial node-to-time map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationGraph {
    nodes: BTreeSet<NodeId>,
    arcs: Vec<Arc>,
    times: BTreeMap<NodeId, TimePoint>,
    sample_rate: u32,
    utterance_id: String,
}

impl AnnotationGraph {
    /// Assembles a graph from an arc table and a time table. The node set
    /// is derived from arc endpoints. Duplicate arc ids and time entries
    /// for nodes that appear in no arc are rejected; everything else
    /// (including cycles and time-order problems) is left for
    /// [`AnnotationGraph::validate`] so that dirty corpus data can be
    /// loaded and inspected.
    pub fn build(
        arcs: Vec<Arc>,
        times: Vec<(NodeId, TimePoint)>,
        sample_rate: u32,
        utterance_id: impl Into<String>,
    ) -> Result<Self, BuildError> {
        let mut seen = BTreeSet::new();
        for arc in &arcs {
            if !seen.insert(arc.id) {
                return Err(BuildError::DuplicateArcId(arc.id));
            }
        }
        let mut nodes = BTreeSet::new();
        for arc in &arcs {
            nodes.insert(arc.src);
            nodes.insert(arc.dst);
        }
        let mut time_map = BTreeMap::new();
        for (node, time) in times {
            if !nodes.contains(&node) {
                return Err(BuildError::DanglingTime(node));
            }
            time_map.insert(node, time);
        }
        let mut arcs = arcs;
        arcs.sort_by_key(|a| a.id);
        Ok(AnnotationGraph {
            nodes,
            arcs,
            times: time_map,
            sample_rate,
            utterance_id: utterance_id.into(),
        })
    }

    /// Assembles a graph without any checking. Unlike [`AnnotationGraph::build`]
    /// this can represent orphan nodes and dangling time entries, which is
    /// occasionally useful for exercising [`AnnotationGraph::validate`].
    pub fn from_parts(
        nodes: BTreeSet<NodeId>,
        mut arcs: Vec<Arc>,
        times: BTreeMap<NodeId, TimePoint>,
        sample_rate: u32,
        utterance_id: impl Into<String>,
    ) -> Self {
        arcs.sort_by_key(|a| a.id);
        AnnotationGraph {
            nodes,
            arcs,
            times,
            sample_rate,
            utterance_id: utterance_id.into(),
        }
    }

    pub fn nodes(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    /// Arcs in ascending id order.
    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: ArcId) -> Option<&Arc> {
        self.arcs
            .binary_search_by_key(&id, |a| a.id)
            .ok()
            .map(|i| &self.arcs[i])
    }

    pub fn time(&self, node: NodeId) -> Option<TimePoint> {
        self.times.get(&node).copied()
    }

    pub fn times(&self) -> &BTreeMap<NodeId, TimePoint> {
        &self.times
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn utterance_id(&self) -> &str {
        &self.utterance_id
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Checks every model condition and reports all violations rather than
    /// failing on the first, since corpus files tend to be dirty. An empty
    /// report means the graph is well-formed.
    pub fn validate(&self) -> ValidationReport {
        let mut report = validate_parts(&self.arcs, &self.times, Some(&self.nodes));
        // Orphan nodes are only representable via from_parts.
        let mut touched = BTreeSet::new();
        for arc in &self.arcs {
            touched.insert(arc.src);
            touched.insert(arc.dst);
        }
        for node in &self.nodes {
            if !touched.contains(node) {
                report.violations.push(Violation {
                    kind: ViolationKind::OrphanNode,
                    ids: vec![node.0],
                    message: format!("node {node} has degree zero"),
                });
            }
        }
        sort_report(&mut report);
        report
    }

    /// Materializes the given arcs as a result table: the full six-field
    /// records in ascending id order plus the time entries of their
    /// endpoints.
    pub fn subgraph(&self, arc_ids: &BTreeSet<ArcId>) -> Result<ResultTable, GraphError> {
        let mut rows = Vec::with_capacity(arc_ids.len());
        let mut endpoint_times = BTreeMap::new();
        for id in arc_ids {
            let arc = self.arc(*id).ok_or(GraphError::UnknownArcId(*id))?;
            for node in [arc.src, arc.dst] {
                if let Some(t) = self.time(node) {
                    endpoint_times.insert(node, t);
                }
            }
            rows.push(arc.clone());
        }
        rows.sort_by_key(|a| a.id);
        Ok(ResultTable {
            arcs: rows,
            times: endpoint_times.into_iter().collect(),
        })
    }

    /// A canonical topological position for every node: Kahn's algorithm
    /// with the smallest-id node taken first, so the result is independent
    /// of arc-table row order. Nodes caught in cycles are appended in id
    /// order after all orderable nodes.
    pub fn topological_positions(&self) -> BTreeMap<NodeId, usize> {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;

        let mut indegree: BTreeMap<NodeId, usize> = self.nodes.iter().map(|n| (*n, 0)).collect();
        let mut succs: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        for arc in &self.arcs {
            *indegree.entry(arc.dst).or_insert(0) += 1;
            succs.entry(arc.src).or_default().push(arc.dst);
        }
        let mut ready: BinaryHeap<Reverse<NodeId>> = indegree
            .iter()
            .filter(|(_, d)| **d == 0)
            .map(|(n, _)| Reverse(*n))
            .collect();
        let mut positions = BTreeMap::new();
        let mut next = 0usize;
        while let Some(Reverse(node)) = ready.pop() {
            positions.insert(node, next);
            next += 1;
            if let Some(out) = succs.get(&node) {
                for dst in out {
                    let d = indegree.get_mut(dst).expect("endpoint in node set");
                    *d -= 1;
                    if *d == 0 {
                        ready.push(Reverse(*dst));
                    }
                }
            }
        }
        for node in &self.nodes {
            if !positions.contains_key(node) {
                positions.insert(*node, next);
                next += 1;
            }
        }
        positions
    }
}

/// Validates a raw arc/time table pair before graph assembly. Unlike
/// [`AnnotationGraph::build`] this never rejects anything: duplicate ids,
/// time entries for unused nodes, cycles and time-order problems all
/// accumulate into one report.
pub fn validate_tables(arcs: &[Arc], times: &[(NodeId, TimePoint)]) -> ValidationReport {
    let time_map: BTreeMap<NodeId, TimePoint> = times.iter().copied().collect();
    let mut report = validate_parts(arcs, &time_map, None);
    sort_report(&mut report);
    report
}

fn validate_parts(
    arcs: &[Arc],
    times: &BTreeMap<NodeId, TimePoint>,
    nodes: Option<&BTreeSet<NodeId>>,
) -> ValidationReport {
    let mut violations = Vec::new();

    let mut seen = BTreeSet::new();
    let mut reported = BTreeSet::new();
    for arc in arcs {
        if !seen.insert(arc.id) && reported.insert(arc.id) {
            violations.push(Violation {
                kind: ViolationKind::DuplicateId,
                ids: vec![arc.id.0],
                message: format!("arc id {} appears more than once", arc.id),
            });
        }
    }

    let mut endpoints = BTreeSet::new();
    for arc in arcs {
        endpoints.insert(arc.src);
        endpoints.insert(arc.dst);
    }
    let known: &BTreeSet<NodeId> = nodes.unwrap_or(&endpoints);
    for node in times.keys() {
        if !known.contains(node) {
            violations.push(Violation {
                kind: ViolationKind::DanglingNodeRef,
                ids: vec![node.0],
                message: format!("time entry references node {node} which appears in no arc"),
            });
        }
    }

    for scc in cyclic_components(arcs) {
        let ids: Vec<u32> = scc.iter().map(|n| n.0).collect();
        let listed = ids
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        violations.push(Violation {
            kind: ViolationKind::Cycle,
            ids,
            message: format!("directed cycle through nodes {listed}"),
        });
    }

    for arc in arcs {
        if let (Some(ts), Some(td)) = (times.get(&arc.src), times.get(&arc.dst)) {
            if ts > td {
                violations.push(Violation {
                    kind: ViolationKind::TimeOrder,
                    ids: vec![arc.id.0],
                    message: format!("arc {} runs from time {} down to {}", arc.id, ts, td),
                });
            }
        }
    }

    ValidationReport { violations }
}

fn sort_report(report: &mut ValidationReport) {
    report
        .violations
        .sort_by(|a, b| (a.kind as u8, &a.ids).cmp(&(b.kind as u8, &b.ids)));
}

/// Strongly connected components that constitute cycles: components with
/// more than one node, plus single nodes carrying a self-loop arc.
fn cyclic_components(arcs: &[Arc]) -> Vec<Vec<NodeId>> {
    let mut nodes: Vec<NodeId> = Vec::new();
    let mut index_of: BTreeMap<NodeId, usize> = BTreeMap::new();
    for arc in arcs {
        for n in [arc.src, arc.dst] {
            index_of.entry(n).or_insert_with(|| {
                nodes.push(n);
                nodes.len() - 1
            });
        }
    }
    let n = nodes.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut self_loop = vec![false; n];
    for arc in arcs {
        let s = index_of[&arc.src];
        let d = index_of[&arc.dst];
        if s == d {
            self_loop[s] = true;
        }
        succ[s].push(d);
    }

    // Iterative Tarjan.
    const UNSET: usize = usize::MAX;
    let mut index = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut components: Vec<Vec<NodeId>> = Vec::new();

    for start in 0..n {
        if index[start] != UNSET {
            continue;
        }
        let mut work: Vec<(usize, usize)> = vec![(start, 0)];
        while let Some(&mut (v, ref mut child)) = work.last_mut() {
            if *child == 0 {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if *child < succ[v].len() {
                let w = succ[v][*child];
                *child += 1;
                if index[w] == UNSET {
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                if low[v] == index[v] {
                    let mut component = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        component.push(nodes[w]);
                        if w == v {
                            break;
                        }
                    }
                    if component.len() > 1 || self_loop[v] {
                        component.sort();
                        components.push(component);
                    }
                }
                work.pop();
                if let Some(&(parent, _)) = work.last() {
                    low[parent] = low[parent].min(low[v]);
                }
            }
        }
    }
    components.sort();
    components
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::sample_graph;

    #[test]
    fn graphs_are_shareable_across_threads() {
        fn assert_sync<T: Send + Sync>() {}
        assert_sync::<AnnotationGraph>();
        assert_sync::<crate::relations::Relations>();
        assert_sync::<ValidationReport>();
    }

    #[test]
    fn sample_graph_counts() {
        let g = sample_graph();
        assert_eq!(g.arcs().len(), 31);
        assert_eq!(g.nodes().len(), 21);
        assert!(g.validate().is_empty());
    }

    #[test]
    fn empty_graph_is_legal() {
        let g = AnnotationGraph::build(vec![], vec![], 16000, "empty").unwrap();
        assert!(g.is_empty());
        assert!(g.validate().is_empty());
        assert_eq!(g.nodes().len(), 0);
    }

    #[test]
    fn duplicate_arc_id_rejected() {
        let arcs = vec![
            Arc::new(1, 0, 1, "P", "a", None),
            Arc::new(1, 1, 2, "P", "b", None),
        ];
        let err = AnnotationGraph::build(arcs, vec![], 16000, "u").unwrap_err();
        assert_eq!(err, BuildError::DuplicateArcId(ArcId(1)));
    }

    #[test]
    fn dangling_time_rejected() {
        let arcs = vec![Arc::new(1, 0, 1, "P", "a", None)];
        let err =
            AnnotationGraph::build(arcs, vec![(NodeId(9), TimePoint(5))], 16000, "u").unwrap_err();
        assert_eq!(err, BuildError::DanglingTime(NodeId(9)));
    }

    #[test]
    fn two_cycle_detected() {
        let arcs = vec![
            Arc::new(1, 0, 1, "P", "a", None),
            Arc::new(2, 1, 0, "P", "b", None),
        ];
        let g = AnnotationGraph::build(arcs, vec![], 16000, "u").unwrap();
        let report = g.validate();
        assert!(report.has_kind(ViolationKind::Cycle));
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].ids, vec![0, 1]);
    }

    #[test]
    fn self_loop_is_a_cycle() {
        let arcs = vec![
            Arc::new(1, 0, 0, "P", "a", None),
            Arc::new(2, 0, 1, "P", "b", None),
        ];
        let g = AnnotationGraph::build(arcs, vec![], 16000, "u").unwrap();
        assert!(g.validate().has_kind(ViolationKind::Cycle));
    }

    #[test]
    fn decreasing_time_detected() {
        let arcs = vec![Arc::new(1, 0, 1, "W", "w", None)];
        let times = vec![(NodeId(0), TimePoint(100)), (NodeId(1), TimePoint(50))];
        let g = AnnotationGraph::build(arcs, times, 16000, "u").unwrap();
        let report = g.validate();
        assert!(report.has_kind(ViolationKind::TimeOrder));
        assert_eq!(report.violations[0].ids, vec![1]);
    }

    #[test]
    fn equal_times_on_distinct_nodes_are_legal() {
        let arcs = vec![Arc::new(1, 0, 1, "T", "H*", None)];
        let times = vec![(NodeId(0), TimePoint(13650)), (NodeId(1), TimePoint(13650))];
        let g = AnnotationGraph::build(arcs, times, 16000, "u").unwrap();
        assert!(g.validate().is_empty());
    }

    #[test]
    fn table_validation_accumulates_everything() {
        let arcs = vec![
            Arc::new(1, 0, 1, "P", "a", None),
            Arc::new(1, 1, 0, "P", "b", None),
            Arc::new(2, 2, 3, "W", "w", None),
        ];
        let times = vec![
            (NodeId(2), TimePoint(10)),
            (NodeId(3), TimePoint(5)),
            (NodeId(7), TimePoint(0)),
        ];
        let report = validate_tables(&arcs, &times);
        assert!(report.has_kind(ViolationKind::DuplicateId));
        assert!(report.has_kind(ViolationKind::DanglingNodeRef));
        assert!(report.has_kind(ViolationKind::Cycle));
        assert!(report.has_kind(ViolationKind::TimeOrder));
        assert_eq!(report.violations.len(), 4);
    }

    #[test]
    fn orphan_node_via_from_parts() {
        let mut nodes = BTreeSet::new();
        nodes.extend([NodeId(0), NodeId(1), NodeId(5)]);
        let g = AnnotationGraph::from_parts(
            nodes,
            vec![Arc::new(1, 0, 1, "P", "a", None)],
            BTreeMap::new(),
            16000,
            "u",
        );
        let report = g.validate();
        assert!(report.has_kind(ViolationKind::OrphanNode));
        assert_eq!(report.violations[0].ids, vec![5]);
    }

    #[test]
    fn subgraph_single_word() {
        let g = sample_graph();
        let table = g.subgraph(&[ArcId(21)].into()).unwrap();
        assert_eq!(table.arcs.len(), 1);
        let arc = &table.arcs[0];
        assert_eq!((arc.src, arc.dst), (NodeId(8), NodeId(14)));
        assert_eq!(arc.content_label, "dark");
        assert_eq!(arc.eq_class.as_deref(), Some("1"));
        assert_eq!(
            table.times,
            vec![
                (NodeId(8), TimePoint(11077)),
                (NodeId(14), TimePoint(16626)),
            ]
        );
    }

    #[test]
    fn subgraph_word_rows() {
        let g = sample_graph();
        let ids: BTreeSet<ArcId> = [18, 19, 20, 21, 22].into_iter().map(ArcId).collect();
        let table = g.subgraph(&ids).unwrap();
        let labels: Vec<&str> = table
            .arcs
            .iter()
            .map(|a| a.content_label.as_str())
            .collect();
        assert_eq!(labels, ["she", "had", "your", "dark", "suit"]);
        assert!(table.arcs.iter().all(|a| a.type_label == "W"));
    }

    #[test]
    fn subgraph_empty_and_unknown() {
        let g = sample_graph();
        let table = g.subgraph(&BTreeSet::new()).unwrap();
        assert!(table.arcs.is_empty() && table.times.is_empty());
        let err = g.subgraph(&[ArcId(99)].into()).unwrap_err();
        assert_eq!(err, GraphError::UnknownArcId(ArcId(99)));
    }

    #[test]
    fn subgraph_of_all_arcs_reproduces_the_table() {
        let g = sample_graph();
        let all: BTreeSet<ArcId> = g.arcs().iter().map(|a| a.id).collect();
        let table = g.subgraph(&all).unwrap();
        assert_eq!(table.arcs, g.arcs());
        let times: Vec<(NodeId, TimePoint)> = g.times().iter().map(|(n, t)| (*n, *t)).collect();
        assert_eq!(table.times, times);
    }

    #[test]
    fn topological_positions_follow_the_chain() {
        let g = sample_graph();
        let pos = g.topological_positions();
        for i in 0..17 {
            assert!(pos[&NodeId(i)] < pos[&NodeId(i + 1)]);
        }
        assert!(pos[&NodeId(19)] < pos[&NodeId(20)]);
        assert_eq!(pos.len(), 21);
    }
}
