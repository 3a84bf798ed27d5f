//! Fixtures, deterministic generators and reference implementations used
//! by the test suites. Not part of the public API surface.
//!
//! The reference functions deliberately avoid the production code paths:
//! reachability is plain depth-first search, query evaluation enumerates
//! term assignments exhaustively. They exist so the fixpoint engine and
//! the join-based evaluator can be checked against something independent.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{AnnotationGraph, Arc, ArcId, NodeId, TimePoint};
use crate::relations::{LabelField, QueryConfig, TypeHierarchy};

/// The TIMIT-style sample graph used throughout the tests: a phoneme
/// chain, five words, a small syntax layer, two phrase arcs and a tone
/// pair, 31 arcs over 21 nodes.
pub fn sample_arcs() -> Vec<Arc> {
    let phonemes = [
        "h#", "sh", "iy", "hv", "ae", "dcl", "y", "axr", "dcl", "d", "aa", "r", "kcl", "k", "s",
        "uw", "q",
    ];
    let mut arcs: Vec<Arc> = phonemes
        .iter()
        .enumerate()
        .map(|(i, p)| Arc::new(i as u32 + 1, i as u32, i as u32 + 1, "P", p, None))
        .collect();
    arcs.extend([
        Arc::new(18, 1, 3, "W", "she", None),
        Arc::new(19, 3, 6, "W", "had", None),
        Arc::new(20, 6, 8, "W", "your", None),
        Arc::new(21, 8, 14, "W", "dark", Some("1")),
        Arc::new(22, 14, 17, "W", "suit", None),
        Arc::new(23, 1, 18, "S", "S", None),
        Arc::new(24, 3, 18, "S", "VP", None),
        Arc::new(25, 1, 3, "S", "NP", None),
        Arc::new(26, 3, 6, "S", "V", None),
        Arc::new(27, 6, 17, "S", "NP", None),
        Arc::new(28, 1, 17, "Imt", "L-", None),
        Arc::new(29, 1, 18, "Itl", "L%", None),
        Arc::new(30, 1, 19, "T", "0", None),
        Arc::new(31, 19, 20, "T", "H*", Some("1")),
    ]);
    arcs
}

pub fn sample_times() -> Vec<(NodeId, TimePoint)> {
    [
        0, 2360, 3270, 5200, 6160, 8720, 9680, 10173, 11077, 12019, 12257, 14120, 15240, 16200,
        16626, 18480, 20685, 22179, 57040,
    ]
    .iter()
    .enumerate()
    .map(|(n, t)| (NodeId(n as u32), TimePoint(*t)))
    .chain([
        (NodeId(19), TimePoint(13650)),
        (NodeId(20), TimePoint(13650)),
    ])
    .collect()
}

pub fn sample_graph() -> AnnotationGraph {
    AnnotationGraph::build(sample_arcs(), sample_times(), 16000, "fjsp0:sa1").unwrap()
}

/// The sample graph with the object noun phrase widened to end at the
/// final node, so that `VP -> V NP` spans exhaustively and the phrase
/// query finds the intermediate phrase arc.
pub fn corrected_syntax_graph() -> AnnotationGraph {
    let mut arcs = sample_arcs();
    for arc in &mut arcs {
        if arc.id == ArcId(27) {
            arc.dst = NodeId(18);
        }
    }
    AnnotationGraph::build(arcs, sample_times(), 16000, "fjsp0:sa1").unwrap()
}

/// A three-syllable chain with an accent tone associated with the first
/// syllable and a boundary tone associated with the last.
pub fn syllable_tone_graph() -> AnnotationGraph {
    let arcs = vec![
        Arc::new(1, 0, 1, "syl", "sa", Some("x")),
        Arc::new(2, 1, 2, "syl", "sb", None),
        Arc::new(3, 2, 3, "syl", "sc", Some("y")),
        Arc::new(4, 10, 11, "T", "H*", Some("x")),
        Arc::new(5, 12, 13, "T", "L%", Some("y")),
    ];
    let times = vec![
        (NodeId(0), TimePoint(0)),
        (NodeId(1), TimePoint(1000)),
        (NodeId(2), TimePoint(2000)),
        (NodeId(3), TimePoint(3000)),
        (NodeId(10), TimePoint(0)),
        (NodeId(11), TimePoint(0)),
        (NodeId(12), TimePoint(3500)),
        (NodeId(13), TimePoint(3500)),
    ];
    AnnotationGraph::build(arcs, times, 16000, "syl-fixture").unwrap()
}

/// A strong syllable dominating a stop-vowel phoneme pair whose vowel is
/// associated with an accent tone; exercises the nested surface query.
pub fn nested_query_graph() -> AnnotationGraph {
    let arcs = vec![
        Arc::new(1, 0, 1, "Phoneme", "t", None),
        Arc::new(2, 1, 2, "Phoneme", "a", Some("c1")),
        Arc::new(3, 0, 2, "Syllable", "S", None),
        Arc::new(4, 10, 11, "Tone", "H*", Some("c1")),
        // A second syllable with no accent association.
        Arc::new(5, 2, 3, "Phoneme", "t", None),
        Arc::new(6, 3, 4, "Phoneme", "i", None),
        Arc::new(7, 2, 4, "Syllable", "S", None),
    ];
    let times = vec![
        (NodeId(0), TimePoint(0)),
        (NodeId(1), TimePoint(100)),
        (NodeId(2), TimePoint(200)),
        (NodeId(3), TimePoint(300)),
        (NodeId(4), TimePoint(400)),
        (NodeId(10), TimePoint(150)),
        (NodeId(11), TimePoint(150)),
    ];
    AnnotationGraph::build(arcs, times, 16000, "nested-fixture").unwrap()
}

/// The query configuration matching [`sample_graph`]: the usual hierarchy,
/// the two phoneme classes, and level aliases for the spelled-out names.
pub fn sample_config() -> QueryConfig {
    let hierarchy =
        TypeHierarchy::new([("Itl", "Imt"), ("Imt", "S"), ("S", "W"), ("W", "P")]).unwrap();
    let mut classes = crate::relations::LabelClasses::new();
    classes
        .define("vowel", ["iy", "ae", "axr", "aa", "uw"])
        .unwrap();
    classes
        .define("stop", ["dcl", "kcl", "d", "k", "q"])
        .unwrap();
    let level_aliases = [
        ("Phoneme", "P"),
        ("Word", "W"),
        ("Tone", "T"),
        ("Syntax", "S"),
        ("Syllable", "syl"),
    ]
    .into_iter()
    .map(|(a, l)| (a.to_string(), l.to_string()))
    .collect();
    QueryConfig {
        hierarchy,
        ps_rules: vec![
            crate::relations::PhraseRule::new("S", "NP", "VP"),
            crate::relations::PhraseRule::new("VP", "V", "NP"),
        ],
        classes,
        level_aliases,
    }
}

/// A small deterministic generator (splitmix64).
#[derive(Debug, Clone)]
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `0..n` (n > 0).
    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    /// True with probability `percent / 100`.
    pub fn chance(&mut self, percent: usize) -> bool {
        self.below(100) < percent
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len())]
    }
}

/// A random well-formed graph: arcs only run from lower to higher node
/// ids and times are non-decreasing in node id, so the result is acyclic
/// and time-monotone by construction. Some nodes stay untimed.
pub fn random_dag(rng: &mut Rng, max_nodes: usize) -> AnnotationGraph {
    let n = 2 + rng.below(max_nodes.saturating_sub(1).max(1));
    let m = 1 + rng.below(2 * n);
    let types = ["P", "W", "S"];
    let contents = ["a", "b", "c", "d"];
    let classes = ["1", "2", "3"];
    let mut arcs = Vec::with_capacity(m);
    for id in 1..=m {
        let src = rng.below(n - 1);
        let dst = src + 1 + rng.below(n - 1 - src);
        let eq = if rng.chance(25) {
            Some(*rng.pick(&classes))
        } else {
            None
        };
        arcs.push(Arc::new(
            id as u32,
            src as u32,
            dst as u32,
            rng.pick(&types),
            rng.pick(&contents),
            eq,
        ));
    }
    let mut used: BTreeSet<u32> = BTreeSet::new();
    for a in &arcs {
        used.insert(a.src.0);
        used.insert(a.dst.0);
    }
    let mut times = Vec::new();
    let mut t = 0u64;
    for node in 0..n as u32 {
        t += rng.below(50) as u64;
        if used.contains(&node) && rng.chance(70) {
            times.push((NodeId(node), TimePoint(t)));
        }
    }
    AnnotationGraph::build(arcs, times, 16000, "random").unwrap()
}

/// A random multi-level graph shaped like real annotations: a phoneme
/// chain, a word layer over a subset of the chain's boundaries, and a few
/// zero-width tones, with occasional shared equivalence classes between
/// words and tones.
pub fn random_layered_graph(rng: &mut Rng) -> AnnotationGraph {
    let phones = ["a", "e", "i", "t", "d", "s", "n"];
    let words = ["wa", "wb", "wc"];
    let n_phones = 2 + rng.below(8);
    let mut arcs = Vec::new();
    let mut times = Vec::new();
    let mut id = 1u32;
    let mut t = 0u64;
    for i in 0..n_phones {
        arcs.push(Arc::new(
            id,
            i as u32,
            i as u32 + 1,
            "P",
            rng.pick(&phones),
            None,
        ));
        id += 1;
        times.push((NodeId(i as u32), TimePoint(t)));
        t += 100 + rng.below(100) as u64;
    }
    times.push((NodeId(n_phones as u32), TimePoint(t)));

    // Word boundaries: a sorted subset of the phoneme boundaries.
    let mut boundary = 0usize;
    let mut word_spans = Vec::new();
    while boundary < n_phones {
        let next = (boundary + 1 + rng.below(3)).min(n_phones);
        word_spans.push((boundary, next));
        boundary = next;
    }
    let mut class_id = 1;
    for (from, to) in &word_spans {
        let eq = if rng.chance(30) {
            let s = class_id.to_string();
            class_id += 1;
            Some(s)
        } else {
            None
        };
        arcs.push(Arc {
            id: ArcId(id),
            src: NodeId(*from as u32),
            dst: NodeId(*to as u32),
            type_label: "W".to_string(),
            content_label: rng.pick(&words).to_string(),
            eq_class: eq.clone(),
        });
        id += 1;
        // Half the classed words get an associated tone.
        if let Some(eq) = eq {
            if rng.chance(50) {
                let a = 100 + 2 * id;
                let tone_time = times[*from].1;
                times.push((NodeId(a), tone_time));
                times.push((NodeId(a + 1), tone_time));
                arcs.push(Arc {
                    id: ArcId(id),
                    src: NodeId(a),
                    dst: NodeId(a + 1),
                    type_label: "T".to_string(),
                    content_label: "H*".to_string(),
                    eq_class: Some(eq),
                });
                id += 1;
            }
        }
    }
    AnnotationGraph::build(arcs, times, 16000, "layered").unwrap()
}

/// The configuration the random layered graphs are queried under.
pub fn layered_config() -> QueryConfig {
    let mut classes = crate::relations::LabelClasses::new();
    classes.define("vowel", ["a", "e", "i"]).unwrap();
    classes.define("stop", ["t", "d"]).unwrap();
    QueryConfig {
        hierarchy: TypeHierarchy::new([("W", "P")]).unwrap(),
        ps_rules: Vec::new(),
        classes,
        level_aliases: [("Phoneme", "P"), ("Word", "W")]
            .into_iter()
            .map(|(a, l)| (a.to_string(), l.to_string()))
            .collect(),
    }
}

/// A random query in the surface syntax, drawn from patterns that match
/// the layered generator's alphabet (including misses and wildcards).
pub fn random_query(rng: &mut Rng) -> String {
    const LEVELS: [&str; 5] = ["P", "W", "T", "Phoneme", "Word"];
    const LABELS: [&str; 12] = [
        "a", "e", "i", "t", "d", "s", "wa", "wb", "H*", "vowel", "stop", "zzz",
    ];
    fn cond(rng: &mut Rng) -> String {
        let level = rng.pick(&LEVELS);
        let op = if rng.chance(25) { "!=" } else { "=" };
        let n_alts = 1 + rng.below(3);
        let alts: Vec<String> = (0..n_alts)
            .map(|_| {
                if rng.chance(10) {
                    "*".to_string()
                } else {
                    rng.pick(&LABELS).to_string()
                }
            })
            .collect();
        format!("{level}{op}{}", alts.join("|"))
    }
    fn go(rng: &mut Rng, depth: usize) -> String {
        if depth == 0 || rng.chance(40) {
            return cond(rng);
        }
        let op = *rng.pick(&["->", "^", "=>"]);
        let left = go(rng, depth - 1);
        let right = go(rng, depth - 1);
        format!("[{left} {op} {right}]")
    }
    let mut text = go(rng, 2);
    // Occasionally mark a term by planting a hash before the first
    // condition of the right-hand side.
    if rng.chance(30) {
        if let Some(pos) = text.rfind('[') {
            let inner = &text[pos + 1..];
            if let Some(rel) = inner.find(|c: char| c.is_alphanumeric()) {
                let at = pos + 1 + rel;
                text.insert(at, '#');
            }
        }
    }
    text
}

/// Reference implementations, independent of the production engine.
pub mod reference {
    use super::*;
    use crate::query::{AltItem, BinOp, CondOp, QueryAst};

    /// Node reachability by depth-first search: `reach[x]` holds every
    /// node on some directed path from `x`, including `x` itself.
    pub fn dfs_reachability(g: &AnnotationGraph) -> BTreeMap<NodeId, BTreeSet<NodeId>> {
        let mut succs: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        for a in g.arcs() {
            succs.entry(a.src).or_default().push(a.dst);
        }
        let mut out = BTreeMap::new();
        for &start in g.nodes() {
            let mut seen = BTreeSet::new();
            let mut stack = vec![start];
            while let Some(n) = stack.pop() {
                if seen.insert(n) {
                    if let Some(next) = succs.get(&n) {
                        stack.extend(next.iter().copied());
                    }
                }
            }
            out.insert(start, seen);
        }
        out
    }

    /// Label-homogeneous reachability by explicit path enumeration over
    /// the filtered arc set.
    pub fn kleene_by_paths(
        g: &AnnotationGraph,
        field: LabelField,
        label: &str,
    ) -> BTreeSet<(NodeId, NodeId)> {
        let arcs: Vec<&Arc> = g
            .arcs()
            .iter()
            .filter(|a| match field {
                LabelField::Type => a.type_label == label,
                LabelField::Content => a.content_label == label,
                LabelField::EqClass => a.eq_class.as_deref() == Some(label),
            })
            .collect();
        let mut pairs = BTreeSet::new();
        for &n in g.nodes() {
            pairs.insert((n, n));
        }
        // Extend paths arc by arc until nothing new appears.
        loop {
            let mut added = false;
            let snapshot: Vec<(NodeId, NodeId)> = pairs.iter().copied().collect();
            for (x, y) in snapshot {
                for a in &arcs {
                    if a.src == y && pairs.insert((x, a.dst)) {
                        added = true;
                    }
                }
            }
            if !added {
                return pairs;
            }
        }
    }

    /// Transitive closure of label pairs by repeated squaring-free
    /// iteration.
    pub fn type_closure(pairs: &[(String, String)]) -> BTreeSet<(String, String)> {
        let mut closure: BTreeSet<(String, String)> = pairs.iter().cloned().collect();
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

    struct OracleRelations<'g> {
        g: &'g AnnotationGraph,
        reach: BTreeMap<NodeId, BTreeSet<NodeId>>,
        closure: BTreeSet<(String, String)>,
    }

    impl<'g> OracleRelations<'g> {
        fn incl(&self, i: &Arc, j: &Arc) -> bool {
            self.reach[&i.src].contains(&j.src) && self.reach[&j.dst].contains(&i.dst)
        }

        fn dom(&self, i: &Arc, j: &Arc) -> bool {
            self.closure
                .contains(&(i.type_label.clone(), j.type_label.clone()))
                && self.incl(i, j)
        }

        fn assoc(&self, i: &Arc, j: &Arc) -> bool {
            i.eq_class.is_some() && i.eq_class == j.eq_class
        }

        fn arc(&self, id: ArcId) -> &Arc {
            self.g.arc(id).expect("known arc")
        }
    }

    /// Evaluates a query by exhaustive assignment enumeration: every way
    /// of binding condition terms to arcs is generated and filtered by
    /// re-derived operator semantics. Returns the set of binding tuples.
    pub fn eval_by_enumeration(
        g: &AnnotationGraph,
        ast: &QueryAst,
        config: &QueryConfig,
    ) -> BTreeSet<Vec<u32>> {
        let oracle = OracleRelations {
            g,
            reach: dfs_reachability(g),
            closure: type_closure(&config.hierarchy.pairs().iter().cloned().collect::<Vec<_>>()),
        };

        // Candidate arcs per condition, by re-implementing the condition
        // test from the definitions.
        let conds = ast.conditions();
        let mut candidates: Vec<Vec<ArcId>> = Vec::new();
        for c in &conds {
            let mut this = Vec::new();
            let level = config
                .level_aliases
                .get(&c.level)
                .map_or(c.level.as_str(), String::as_str);
            for a in g.arcs() {
                if a.type_label != level {
                    continue;
                }
                let mut hit = false;
                for item in &c.alternatives {
                    match item {
                        AltItem::Wildcard => hit = true,
                        AltItem::Label(name) => match config.classes.get(name) {
                            Some(members) => hit |= members.contains(&a.content_label),
                            None => hit |= *name == a.content_label,
                        },
                    }
                }
                let keep = match c.op {
                    CondOp::Equals => hit,
                    CondOp::NotEquals => !hit,
                };
                if keep {
                    this.push(a.id);
                }
            }
            candidates.push(this);
        }

        // All assignments, then filter by the structural constraints.
        let n = conds.len();
        let mut results = BTreeSet::new();
        let mut assignment = vec![ArcId(0); n];
        enumerate(&candidates, 0, &mut assignment, &mut |bound| {
            if satisfies(ast, bound, &oracle).is_some() {
                results.insert(bound.iter().map(|id| id.0).collect());
            }
        });
        results
    }

    fn enumerate(
        candidates: &[Vec<ArcId>],
        k: usize,
        assignment: &mut Vec<ArcId>,
        sink: &mut impl FnMut(&[ArcId]),
    ) {
        if k == candidates.len() {
            sink(assignment);
            return;
        }
        for &id in &candidates[k] {
            assignment[k] = id;
            enumerate(candidates, k + 1, assignment, sink);
        }
    }

    /// Checks the compound constraints over one full assignment, returning
    /// the token list (term indices) the subtree stands for.
    fn satisfies(
        ast: &QueryAst,
        bound: &[ArcId],
        oracle: &OracleRelations<'_>,
    ) -> Option<Vec<usize>> {
        match ast {
            QueryAst::Condition(c) => Some(vec![c.term]),
            QueryAst::Compound {
                left, op, right, ..
            } => {
                let lhs = satisfies(left, bound, oracle)?;
                let rhs = satisfies(right, bound, oracle)?;
                match op {
                    BinOp::Sequence => {
                        let a = oracle.arc(bound[*lhs.last().unwrap()]);
                        let b = oracle.arc(bound[rhs[0]]);
                        if a.dst == b.src && a.type_label == b.type_label {
                            let mut tokens = lhs;
                            tokens.extend(rhs);
                            Some(tokens)
                        } else {
                            None
                        }
                    }
                    BinOp::Dominates => {
                        for &ta in &lhs {
                            for &tb in &rhs {
                                if !oracle.dom(oracle.arc(bound[ta]), oracle.arc(bound[tb])) {
                                    return None;
                                }
                            }
                        }
                        Some(lhs)
                    }
                    BinOp::Associates => {
                        for &ta in &lhs {
                            for &tb in &rhs {
                                if !oracle.assoc(oracle.arc(bound[ta]), oracle.arc(bound[tb])) {
                                    return None;
                                }
                            }
                        }
                        Some(lhs)
                    }
                }
            }
        }
    }
}
