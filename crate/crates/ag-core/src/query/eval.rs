//! Query evaluation against a graph's materialized relations.
//!
//! A match binds every condition term of the query to one arc such that
//! all operator constraints hold jointly:
//!
//! - a condition binds an arc whose type label equals the condition's
//!   level and whose content label satisfies the alternation;
//! - `[a -> b]` requires the arc bound on `a`'s side to end at the node
//!   where `b`'s side starts, both at the same level; the sides meet at
//!   their rightmost and leftmost sequence tokens respectively;
//! - `[a ^ b]` requires every token `a` stands for to dominate every token
//!   `b` stands for (dominance = hierarchy-ordered structural inclusion);
//! - `[a => b]` likewise requires pairwise association.
//!
//! A sequence stands for the concatenation of its sides' tokens; a
//! domination or association compound stands for its left-hand side. The
//! result mark only selects which bound arc anchors each match, it never
//! changes the set of binding maps.

use crate::graph::{AnnotationGraph, Arc, ArcId};
use crate::relations::{QueryConfig, Relations};

use super::{mark_anchor, AltItem, BinOp, CondOp, QueryAst};

/// One matching instance: the arc bound to each condition term, indexed by
/// the term's pre-order position.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Match {
    pub bindings: Vec<ArcId>,
}

/// An ordered set of matches over one graph. Matches are sorted by the
/// anchor arc's source-node structural position, then anchor arc id, then
/// the full binding tuple; there are no duplicate binding maps.
#[derive(Debug, Clone)]
pub struct MatchSet<'g> {
    pub graph: &'g AnnotationGraph,
    pub query: String,
    pub n_terms: usize,
    pub anchor_term: usize,
    pub matches: Vec<Match>,
}

impl<'g> MatchSet<'g> {
    pub fn anchor_arc(&self, m: &Match) -> ArcId {
        m.bindings[self.anchor_term]
    }

    pub fn len(&self) -> usize {
        self.matches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matches.is_empty()
    }

    /// The distinct arcs bound to `term` across all matches, in match
    /// order.
    pub fn arcs_for_term(&self, term: usize) -> Vec<ArcId> {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        for m in &self.matches {
            let id = m.bindings[term];
            if seen.insert(id) {
                out.push(id);
            }
        }
        out
    }
}

struct CompiledTerm {
    level: String,
    positive: bool,
    any: bool,
    labels: Vec<String>,
}

impl CompiledTerm {
    fn admits(&self, arc: &Arc) -> bool {
        if arc.type_label != self.level {
            return false;
        }
        let hit = self.any || self.labels.contains(&arc.content_label);
        if self.positive {
            hit
        } else {
            !hit
        }
    }
}

enum Constraint {
    /// Arc of `left` ends where arc of `right` starts.
    Adjacent(usize, usize),
    Dominates(usize, usize),
    Associates(usize, usize),
    /// Statically unsatisfiable (sequence across different levels).
    Never,
}

impl Constraint {
    fn latest_term(&self) -> usize {
        match self {
            Constraint::Adjacent(a, b)
            | Constraint::Dominates(a, b)
            | Constraint::Associates(a, b) => *a.max(b),
            Constraint::Never => 0,
        }
    }
}

struct Compiled {
    terms: Vec<CompiledTerm>,
    constraints: Vec<Constraint>,
}

fn compile(ast: &QueryAst, config: &QueryConfig) -> Compiled {
    let mut compiled = Compiled {
        terms: Vec::new(),
        constraints: Vec::new(),
    };
    walk(ast, config, &mut compiled);
    compiled
}

/// Compiles a subtree and returns the list of term indices the subtree
/// stands for (its token list).
fn walk(ast: &QueryAst, config: &QueryConfig, out: &mut Compiled) -> Vec<usize> {
    match ast {
        QueryAst::Condition(c) => {
            let mut any = false;
            let mut labels = Vec::new();
            for item in &c.alternatives {
                match item {
                    AltItem::Wildcard => any = true,
                    AltItem::Label(name) => match config.classes.get(name) {
                        Some(members) => labels.extend(members.iter().cloned()),
                        None => labels.push(name.clone()),
                    },
                }
            }
            out.terms.push(CompiledTerm {
                level: config.resolve_level(&c.level).to_string(),
                positive: c.op == CondOp::Equals,
                any,
                labels,
            });
            vec![c.term]
        }
        QueryAst::Compound {
            left, op, right, ..
        } => {
            let lhs = walk(left, config, out);
            let rhs = walk(right, config, out);
            match op {
                BinOp::Sequence => {
                    let a = *lhs.last().expect("non-empty token list");
                    let b = rhs[0];
                    if out.terms[a].level == out.terms[b].level {
                        out.constraints.push(Constraint::Adjacent(a, b));
                    } else {
                        out.constraints.push(Constraint::Never);
                    }
                    let mut tokens = lhs;
                    tokens.extend(rhs);
                    tokens
                }
                BinOp::Dominates => {
                    for &a in &lhs {
                        for &b in &rhs {
                            out.constraints.push(Constraint::Dominates(a, b));
                        }
                    }
                    lhs
                }
                BinOp::Associates => {
                    for &a in &lhs {
                        for &b in &rhs {
                            out.constraints.push(Constraint::Associates(a, b));
                        }
                    }
                    lhs
                }
            }
        }
    }
}

/// Evaluates a parsed query, returning every binding of arcs to condition
/// terms that jointly satisfies the operators. Levels that do not occur in
/// the graph simply yield no matches.
pub fn eval_query<'g>(
    g: &'g AnnotationGraph,
    ast: &QueryAst,
    config: &QueryConfig,
) -> MatchSet<'g> {
    let compiled = compile(ast, config);
    let relations = Relations::compute(g, &config.hierarchy);
    let n_terms = compiled.terms.len();

    if compiled
        .constraints
        .iter()
        .any(|c| matches!(c, Constraint::Never))
    {
        return finish(g, ast, n_terms, Vec::new());
    }

    let candidates: Vec<Vec<&Arc>> = compiled
        .terms
        .iter()
        .map(|t| g.arcs().iter().filter(|a| t.admits(a)).collect())
        .collect();

    // Constraints become checkable once their later term is bound.
    let mut due: Vec<Vec<&Constraint>> = vec![Vec::new(); n_terms];
    for c in &compiled.constraints {
        due[c.latest_term()].push(c);
    }

    let mut bound: Vec<&Arc> = Vec::with_capacity(n_terms);
    let mut results: Vec<Match> = Vec::new();
    assign(&relations, &candidates, &due, &mut bound, &mut results);

    finish(g, ast, n_terms, results)
}

fn assign<'a>(
    relations: &Relations,
    candidates: &[Vec<&'a Arc>],
    due: &[Vec<&Constraint>],
    bound: &mut Vec<&'a Arc>,
    results: &mut Vec<Match>,
) {
    let k = bound.len();
    if k == candidates.len() {
        results.push(Match {
            bindings: bound.iter().map(|a| a.id).collect(),
        });
        return;
    }
    'next: for arc in &candidates[k] {
        bound.push(arc);
        for c in &due[k] {
            let ok = match c {
                Constraint::Adjacent(a, b) => bound[*a].dst == bound[*b].src,
                Constraint::Dominates(a, b) => relations.dom().contains(bound[*a].id, bound[*b].id),
                Constraint::Associates(a, b) => {
                    relations.assoc().contains(bound[*a].id, bound[*b].id)
                }
                Constraint::Never => false,
            };
            if !ok {
                bound.pop();
                continue 'next;
            }
        }
        assign(relations, candidates, due, bound, results);
        bound.pop();
    }
}

fn finish<'g>(
    g: &'g AnnotationGraph,
    ast: &QueryAst,
    n_terms: usize,
    matches: Vec<Match>,
) -> MatchSet<'g> {
    let anchor_term = mark_anchor(ast);
    let mut set = MatchSet {
        graph: g,
        query: ast.to_string(),
        n_terms,
        anchor_term,
        matches,
    };
    order_matches(g, &mut set.matches, anchor_term);
    set
}

/// Sorts matches by (anchor source-node structural position, anchor arc
/// id, full binding tuple) and drops duplicate binding maps. Structural
/// position is the canonical topological position, so the order does not
/// depend on arc-table row order.
pub(crate) fn order_matches(g: &AnnotationGraph, matches: &mut Vec<Match>, anchor_term: usize) {
    let positions = g.topological_positions();
    let key = |m: &Match| -> (usize, u32, Vec<u32>) {
        let anchor = m.bindings[anchor_term];
        let src_pos = g
            .arc(anchor)
            .and_then(|a| positions.get(&a.src).copied())
            .unwrap_or(usize::MAX);
        (
            src_pos,
            anchor.0,
            m.bindings.iter().map(|id| id.0).collect(),
        )
    };
    matches.sort_by_key(key);
    matches.dedup();
}

/// A small helper for building suite match sets over explicit binding
/// tuples.
pub(crate) fn matchset_from_bindings<'g>(
    g: &'g AnnotationGraph,
    query: impl Into<String>,
    n_terms: usize,
    bindings: impl IntoIterator<Item = Vec<ArcId>>,
    anchor_term: usize,
) -> MatchSet<'g> {
    let mut matches: Vec<Match> = bindings
        .into_iter()
        .map(|b| Match { bindings: b })
        .collect();
    order_matches(g, &mut matches, anchor_term);
    MatchSet {
        graph: g,
        query: query.into(),
        n_terms,
        anchor_term,
        matches,
    }
}
