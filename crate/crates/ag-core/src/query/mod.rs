//! The surface query language and its evaluator.
//!
//! A query is either a level condition (`Phoneme=vowel`, `Word!=x`,
//! `Phonetic=A|I|O|U|E|V`, `Word=*`) or a bracketed pair of queries joined
//! by a sequence (`->`), domination (`^`) or association (`=>`) operator.
//! Compounds nest arbitrarily. Exactly one term of a query carries the
//! result mark: by default the leftmost term, overridden by prefixing a
//! term with `#`.
//!
//! Alternation items are resolved against the configured label classes
//! first and fall back to literal labels, so `Phoneme=vowel` means the
//! class where one is defined and the literal label otherwise. `*` as the
//! whole item matches any content label; inside a longer item (`H*`) it is
//! an ordinary character.

mod eval;
mod parse;
mod suite;

use std::fmt;

pub use eval::{eval_query, Match, MatchSet};
pub use parse::{parse_query, ParseError};
pub use suite::{eval_example_suite, SuiteError, SuiteOutcome, SuiteResult};

/// Comparison carried by a condition: `=` keeps arcs whose content label
/// satisfies the alternation, `!=` keeps arcs whose content label avoids
/// all of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CondOp {
    Equals,
    NotEquals,
}

/// One alternation item: a label (or class name) or the `*` wildcard.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AltItem {
    Label(String),
    Wildcard,
}

/// Binary operator joining two sub-queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Sequence,
    Dominates,
    Associates,
}

/// A level condition. `term` is the condition's pre-order index in the
/// enclosing query, which also fixes column order when matches are
/// exported.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub level: String,
    pub op: CondOp,
    pub alternatives: Vec<AltItem>,
    pub marked: bool,
    pub term: usize,
}

/// Parse tree of the surface language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryAst {
    Condition(Condition),
    Compound {
        left: Box<QueryAst>,
        op: BinOp,
        right: Box<QueryAst>,
        marked: bool,
    },
}

impl QueryAst {
    /// Number of condition terms in the tree.
    pub fn term_count(&self) -> usize {
        match self {
            QueryAst::Condition(_) => 1,
            QueryAst::Compound { left, right, .. } => left.term_count() + right.term_count(),
        }
    }

    /// Conditions in pre-order (term-index order).
    pub fn conditions(&self) -> Vec<&Condition> {
        let mut out = Vec::new();
        self.collect_conditions(&mut out);
        out
    }

    fn collect_conditions<'a>(&'a self, out: &mut Vec<&'a Condition>) {
        match self {
            QueryAst::Condition(c) => out.push(c),
            QueryAst::Compound { left, right, .. } => {
                left.collect_conditions(out);
                right.collect_conditions(out);
            }
        }
    }
}

/// Returns the term index of the result-bearing condition: the `#`-marked
/// term if any, otherwise the left-hand side of each compound down to the
/// leftmost condition. A mark on a bracketed compound resolves through the
/// same left-hand descent from there.
pub fn mark_anchor(ast: &QueryAst) -> usize {
    fn leftmost(ast: &QueryAst) -> usize {
        match ast {
            QueryAst::Condition(c) => c.term,
            QueryAst::Compound { left, .. } => leftmost(left),
        }
    }
    fn marked(ast: &QueryAst) -> Option<usize> {
        match ast {
            QueryAst::Condition(c) if c.marked => Some(c.term),
            QueryAst::Condition(_) => None,
            QueryAst::Compound {
                left,
                right,
                marked: m,
                ..
            } => {
                if *m {
                    Some(leftmost(ast))
                } else {
                    marked(left).or_else(|| marked(right))
                }
            }
        }
    }
    marked(ast).unwrap_or_else(|| leftmost(ast))
}

impl fmt::Display for BinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BinOp::Sequence => "->",
            BinOp::Dominates => "^",
            BinOp::Associates => "=>",
        };
        f.write_str(s)
    }
}

impl fmt::Display for QueryAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryAst::Condition(c) => {
                if c.marked {
                    write!(f, "#")?;
                }
                write!(
                    f,
                    "{}{}",
                    c.level,
                    match c.op {
                        CondOp::Equals => "=",
                        CondOp::NotEquals => "!=",
                    }
                )?;
                for (i, item) in c.alternatives.iter().enumerate() {
                    if i > 0 {
                        write!(f, "|")?;
                    }
                    match item {
                        AltItem::Label(s) => write!(f, "{s}")?,
                        AltItem::Wildcard => write!(f, "*")?,
                    }
                }
                Ok(())
            }
            QueryAst::Compound {
                left,
                op,
                right,
                marked,
            } => {
                if *marked {
                    write!(f, "#")?;
                }
                write!(f, "[{left} {op} {right}]")
            }
        }
    }
}
