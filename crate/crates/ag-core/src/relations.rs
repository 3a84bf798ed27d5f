//! Derived relations over annotation graphs.
//!
//! Structural precedence is the reflexive-transitive closure of the arc
//! relation, computed by semi-naive bottom-up fixpoint. Everything else is
//! defined on top of it: structural inclusion between arcs, typed dominance
//! driven by a hierarchy over the type labels, phrase-structure-rule-driven
//! immediate dominance, association via the equivalence-class label, and
//! label-homogeneous closures ("kleene") returning the node pairs that
//! bound a sequence.
//!
//! Relations are materialized eagerly per graph (see [`Relations`]); graphs
//! are small enough that quadratic materialization keeps query evaluation
//! to simple joins. All results are immutable and shareable across threads.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::{AnnotationGraph, ArcId, NodeId};

/// A materialized binary relation over node or arc ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BinaryRelation<T: Ord + Copy> {
    pairs: BTreeSet<(T, T)>,
}

impl<T: Ord + Copy> BinaryRelation<T> {
    pub fn new() -> Self {
        BinaryRelation {
            pairs: BTreeSet::new(),
        }
    }

    pub fn insert(&mut self, a: T, b: T) -> bool {
        self.pairs.insert((a, b))
    }

    pub fn contains(&self, a: T, b: T) -> bool {
        self.pairs.contains(&(a, b))
    }

    pub fn iter(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

impl<T: Ord + Copy> FromIterator<(T, T)> for BinaryRelation<T> {
    fn from_iter<I: IntoIterator<Item = (T, T)>>(iter: I) -> Self {
        BinaryRelation {
            pairs: iter.into_iter().collect(),
        }
    }
}

/// A strict ordering over type labels, e.g. word above syllable above
/// segment. Constructing one takes the transitive closure of the given
/// pairs and rejects hierarchies whose closure is reflexive.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeHierarchy {
    pairs: BTreeSet<(String, String)>,
    closure: BTreeSet<(String, String)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HierarchyError {
    #[error("type hierarchy is not a strict order: {0} dominates itself")]
    NotStrict(String),
}

impl TypeHierarchy {
    pub fn new<I, S>(pairs: I) -> Result<Self, HierarchyError>
    where
        I: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let pairs: BTreeSet<(String, String)> = pairs
            .into_iter()
            .map(|(a, b)| (a.into(), b.into()))
            .collect();
        let closure = transitive_closure(&pairs);
        for (a, b) in &closure {
            if a == b {
                return Err(HierarchyError::NotStrict(a.clone()));
            }
        }
        Ok(TypeHierarchy { pairs, closure })
    }

    pub fn empty() -> Self {
        TypeHierarchy::default()
    }

    pub fn pairs(&self) -> &BTreeSet<(String, String)> {
        &self.pairs
    }

    /// True iff `upper` is above `lower` in the transitive closure.
    pub fn dominates(&self, upper: &str, lower: &str) -> bool {
        self.closure
            .contains(&(upper.to_string(), lower.to_string()))
    }
}

fn transitive_closure(pairs: &BTreeSet<(String, String)>) -> BTreeSet<(String, String)> {
    let mut closure = pairs.clone();
    loop {
        let mut added = Vec::new();
        for (a, b) in &closure {
            for (c, d) in &closure {
                if b == c && !closure.contains(&(a.clone(), d.clone())) {
                    added.push((a.clone(), d.clone()));
                }
            }
        }
        if added.is_empty() {
            return closure;
        }
        closure.extend(added);
    }
}

/// One binary-branching phrase-structure rule: parent expands to exactly
/// two child categories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhraseRule {
    pub parent: String,
    pub left_child: String,
    pub right_child: String,
}

impl PhraseRule {
    pub fn new(parent: &str, left_child: &str, right_child: &str) -> Self {
        PhraseRule {
            parent: parent.to_string(),
            left_child: left_child.to_string(),
            right_child: right_child.to_string(),
        }
    }
}

/// Named sets of content labels ("vowel", "stop", ...), usable wherever a
/// literal content label is expected in a query.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelClasses {
    classes: BTreeMap<String, BTreeSet<String>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassError {
    #[error("unknown label class `{0}`")]
    Unknown(String),
    #[error("label class `{0}` has no members")]
    Empty(String),
    #[error("label class `{0}` defined twice")]
    Duplicate(String),
}

impl LabelClasses {
    pub fn new() -> Self {
        LabelClasses::default()
    }

    pub fn define<I, S>(&mut self, name: &str, members: I) -> Result<(), ClassError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let members: BTreeSet<String> = members.into_iter().map(Into::into).collect();
        if members.is_empty() {
            return Err(ClassError::Empty(name.to_string()));
        }
        if self.classes.contains_key(name) {
            return Err(ClassError::Duplicate(name.to_string()));
        }
        self.classes.insert(name.to_string(), members);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&BTreeSet<String>> {
        self.classes.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.classes.keys().map(String::as_str)
    }
}

/// Tests whether `label` belongs to the named class.
pub fn in_class(label: &str, class_name: &str, classes: &LabelClasses) -> Result<bool, ClassError> {
    classes
        .get(class_name)
        .map(|members| members.contains(label))
        .ok_or_else(|| ClassError::Unknown(class_name.to_string()))
}

/// The configuration a query needs: type hierarchy, phrase-structure
/// rules, label classes, and aliases mapping query level names onto the
/// graph's type labels (`Phoneme` -> `P`). A level name with no alias is
/// used as the type label itself.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryConfig {
    pub hierarchy: TypeHierarchy,
    pub ps_rules: Vec<PhraseRule>,
    pub classes: LabelClasses,
    pub level_aliases: BTreeMap<String, String>,
}

impl QueryConfig {
    /// Resolves a query level name to a type label, alias-first.
    pub fn resolve_level<'a>(&'a self, name: &'a str) -> &'a str {
        self.level_aliases.get(name).map_or(name, String::as_str)
    }
}

/// Which of the three label fields a kleene closure filters on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelField {
    Type,
    Content,
    EqClass,
}

/// Structural precedence: the reflexive-transitive closure of the arc
/// relation, by semi-naive fixpoint. `(x, y)` holds iff there is a
/// (possibly empty) directed path from `x` to `y`.
pub fn s_prec(g: &AnnotationGraph) -> BinaryRelation<NodeId> {
    let succs = successors(g.arcs().iter().map(|a| (a.src, a.dst)));
    closure_from(g.nodes().iter().copied(), &succs)
}

/// Structural precedence by naive fixpoint: re-derives everything each
/// round. Kept as a reference implementation; produces exactly the same
/// relation as [`s_prec`].
pub fn s_prec_naive(g: &AnnotationGraph) -> BinaryRelation<NodeId> {
    let mut rel = BinaryRelation::new();
    for n in g.nodes() {
        rel.insert(*n, *n);
    }
    for a in g.arcs() {
        rel.insert(a.src, a.dst);
    }
    loop {
        let mut added = Vec::new();
        for (x, z) in rel.iter() {
            for a in g.arcs() {
                if a.src == z && !rel.contains(x, a.dst) {
                    added.push((x, a.dst));
                }
            }
        }
        if added.is_empty() {
            return rel;
        }
        for (x, y) in added {
            rel.insert(x, y);
        }
    }
}

/// Temporal precedence: `(x, y)` holds iff both nodes are timed and
/// `time(x) <= time(y)`. Because `<=` on sample numbers is already
/// transitive, the closure collapses to a filtered product.
pub fn t_prec(g: &AnnotationGraph) -> BinaryRelation<NodeId> {
    let timed: Vec<(NodeId, u64)> = g.times().iter().map(|(n, t)| (*n, t.0)).collect();
    let mut rel = BinaryRelation::new();
    for &(x, tx) in &timed {
        for &(y, ty) in &timed {
            if tx <= ty {
                rel.insert(x, y);
            }
        }
    }
    rel
}

/// Structural inclusion between arcs: arc `i` spanning `w -> z` includes
/// arc `j` spanning `x -> y` iff `w` structurally precedes `x` and `y`
/// structurally precedes `z`. Reflexive, since structural precedence is.
pub fn s_incl(g: &AnnotationGraph) -> BinaryRelation<ArcId> {
    s_incl_from(g, &s_prec(g))
}

fn s_incl_from(g: &AnnotationGraph, prec: &BinaryRelation<NodeId>) -> BinaryRelation<ArcId> {
    let mut rel = BinaryRelation::new();
    for i in g.arcs() {
        for j in g.arcs() {
            if prec.contains(i.src, j.src) && prec.contains(j.dst, i.dst) {
                rel.insert(i.id, j.id);
            }
        }
    }
    rel
}

/// Typed dominance: structural inclusion restricted to arc pairs whose
/// type labels are ordered by the hierarchy's transitive closure. The
/// strictness of the hierarchy makes dominance irreflexive.
pub fn dom(g: &AnnotationGraph, hierarchy: &TypeHierarchy) -> BinaryRelation<ArcId> {
    dom_from(g, hierarchy, &s_incl(g))
}

fn dom_from(
    g: &AnnotationGraph,
    hierarchy: &TypeHierarchy,
    incl: &BinaryRelation<ArcId>,
) -> BinaryRelation<ArcId> {
    let mut rel = BinaryRelation::new();
    for i in g.arcs() {
        for j in g.arcs() {
            if hierarchy.dominates(&i.type_label, &j.type_label) && incl.contains(i.id, j.id) {
                rel.insert(i.id, j.id);
            }
        }
    }
    rel
}

/// Rule-driven immediate dominance over arcs of type `syn_type`: a parent
/// arc spanning `x -> z` with category `p` immediately dominates a child
/// iff some rule `p -> c1 c2` is witnessed by a `c1` arc `x -> y` and a
/// `c2` arc `y -> z`, the child being either witness.
pub fn i_dom(g: &AnnotationGraph, rules: &[PhraseRule], syn_type: &str) -> BinaryRelation<ArcId> {
    let syn: Vec<&crate::graph::Arc> = g
        .arcs()
        .iter()
        .filter(|a| a.type_label == syn_type)
        .collect();
    let mut rel = BinaryRelation::new();
    for parent in &syn {
        for rule in rules {
            if parent.content_label != rule.parent {
                continue;
            }
            for left in &syn {
                if left.src != parent.src || left.content_label != rule.left_child {
                    continue;
                }
                for right in &syn {
                    if right.src == left.dst
                        && right.dst == parent.dst
                        && right.content_label == rule.right_child
                    {
                        rel.insert(parent.id, left.id);
                        rel.insert(parent.id, right.id);
                    }
                }
            }
        }
    }
    rel
}

/// Association: a join on the equivalence-class label. Holds iff both arcs
/// carry a class and the classes are equal, so it is an equivalence
/// relation on class-bearing arcs; an absent class never joins.
pub fn assoc(g: &AnnotationGraph) -> BinaryRelation<ArcId> {
    let mut by_class: BTreeMap<&str, Vec<ArcId>> = BTreeMap::new();
    for a in g.arcs() {
        if let Some(class) = &a.eq_class {
            by_class.entry(class).or_default().push(a.id);
        }
    }
    let mut rel = BinaryRelation::new();
    for ids in by_class.values() {
        for &i in ids {
            for &j in ids {
                rel.insert(i, j);
            }
        }
    }
    rel
}

/// Label-homogeneous closure: `(x, y)` holds iff some (possibly empty)
/// path from `x` to `y` uses only arcs carrying `label` in `field`. The
/// empty path makes the relation reflexive on every node of the graph.
pub fn kleene(g: &AnnotationGraph, field: LabelField, label: &str) -> BinaryRelation<NodeId> {
    let filtered = g.arcs().iter().filter(|a| match field {
        LabelField::Type => a.type_label == label,
        LabelField::Content => a.content_label == label,
        LabelField::EqClass => a.eq_class.as_deref() == Some(label),
    });
    let succs = successors(filtered.map(|a| (a.src, a.dst)));
    closure_from(g.nodes().iter().copied(), &succs)
}

fn successors(edges: impl Iterator<Item = (NodeId, NodeId)>) -> BTreeMap<NodeId, BTreeSet<NodeId>> {
    let mut succs: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
    for (src, dst) in edges {
        succs.entry(src).or_default().insert(dst);
    }
    succs
}

/// Semi-naive reflexive-transitive closure: each round extends only the
/// pairs discovered in the previous round by one edge, so nothing is
/// re-derived. Terminates because the pair set over a finite node set can
/// only grow.
fn closure_from(
    nodes: impl Iterator<Item = NodeId>,
    succs: &BTreeMap<NodeId, BTreeSet<NodeId>>,
) -> BinaryRelation<NodeId> {
    let mut rel = BinaryRelation::new();
    let mut delta: Vec<(NodeId, NodeId)> = Vec::new();
    for n in nodes {
        rel.insert(n, n);
        delta.push((n, n));
    }
    while !delta.is_empty() {
        let mut next = Vec::new();
        for (x, z) in delta {
            if let Some(out) = succs.get(&z) {
                for &y in out {
                    if rel.insert(x, y) {
                        next.push((x, y));
                    }
                }
            }
        }
        delta = next;
    }
    rel
}

/// Eagerly materialized relations for one graph, shared by the query
/// engine so that evaluation reduces to membership tests.
#[derive(Debug, Clone)]
pub struct Relations {
    s_prec: BinaryRelation<NodeId>,
    t_prec: BinaryRelation<NodeId>,
    s_incl: BinaryRelation<ArcId>,
    assoc: BinaryRelation<ArcId>,
    dom: BinaryRelation<ArcId>,
}

impl Relations {
    pub fn compute(g: &AnnotationGraph, hierarchy: &TypeHierarchy) -> Self {
        let prec = s_prec(g);
        let incl = s_incl_from(g, &prec);
        let dom = dom_from(g, hierarchy, &incl);
        Relations {
            t_prec: t_prec(g),
            assoc: assoc(g),
            s_prec: prec,
            s_incl: incl,
            dom,
        }
    }

    pub fn s_prec(&self) -> &BinaryRelation<NodeId> {
        &self.s_prec
    }

    pub fn t_prec(&self) -> &BinaryRelation<NodeId> {
        &self.t_prec
    }

    pub fn s_incl(&self) -> &BinaryRelation<ArcId> {
        &self.s_incl
    }

    pub fn assoc(&self) -> &BinaryRelation<ArcId> {
        &self.assoc
    }

    pub fn dom(&self) -> &BinaryRelation<ArcId> {
        &self.dom
    }
}
