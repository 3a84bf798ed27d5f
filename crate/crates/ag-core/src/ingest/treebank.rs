//! Bracketed-tree parsing and alignment of trees against a word chain.
//!
//! Trees are parenthesized s-expressions: the first atom of a group is the
//! node's category, the remaining elements its children. Files in the
//! common style wrap every sentence in an extra unlabelled pair of
//! parentheses; a wrapper containing a single subtree is unwrapped, one
//! containing several elements becomes a node with an empty category.

use crate::graph::{AnnotationGraph, Arc, NodeId};

use super::IngestError;

/// One tree: a category and a list of children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SExprTree {
    pub category: String,
    pub children: Vec<SExprChild>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExprChild {
    Leaf(String),
    Node(SExprTree),
}

impl SExprTree {
    /// Leaf tokens in left-to-right order.
    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        for child in &self.children {
            match child {
                SExprChild::Leaf(token) => out.push(token),
                SExprChild::Node(node) => node.collect_leaves(out),
            }
        }
    }
}

enum Form {
    Atom(String),
    List(Vec<Form>, usize),
}

fn parse_forms(text: &str) -> Result<Vec<Form>, IngestError> {
    let mut stack: Vec<(Vec<Form>, usize)> = Vec::new();
    let mut top: Vec<Form> = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c == '(' {
            stack.push((std::mem::take(&mut top), i));
            i += 1;
        } else if c == ')' {
            let (mut parent, open) = stack.pop().ok_or(IngestError::SExpr {
                offset: i,
                message: "unbalanced `)`".to_string(),
            })?;
            parent.push(Form::List(std::mem::take(&mut top), open));
            top = parent;
            i += 1;
        } else {
            let start = i;
            while i < bytes.len() {
                let c = bytes[i] as char;
                if c.is_whitespace() || c == '(' || c == ')' {
                    break;
                }
                i += 1;
            }
            top.push(Form::Atom(text[start..i].to_string()));
        }
    }
    if let Some((_, open)) = stack.last() {
        return Err(IngestError::SExpr {
            offset: *open,
            message: "unbalanced `(`".to_string(),
        });
    }
    Ok(top)
}

fn form_to_tree(form: Form) -> Result<SExprTree, IngestError> {
    match form {
        Form::Atom(_) => unreachable!("top-level atoms are rejected by the caller"),
        Form::List(forms, offset) => list_to_tree(forms, offset),
    }
}

fn list_to_tree(forms: Vec<Form>, offset: usize) -> Result<SExprTree, IngestError> {
    if forms.is_empty() {
        return Err(IngestError::SExpr {
            offset,
            message: "empty tree".to_string(),
        });
    }
    let mut forms = forms;
    let category = match forms.first() {
        Some(Form::Atom(_)) => match forms.remove(0) {
            Form::Atom(a) => a,
            Form::List(..) => unreachable!(),
        },
        // Unlabelled wrapper: unwrap a lone subtree, otherwise keep an
        // empty category.
        Some(Form::List(..)) if forms.len() == 1 => {
            return form_to_tree(forms.pop().expect("one form"));
        }
        _ => String::new(),
    };
    let mut children = Vec::new();
    for form in forms {
        match form {
            Form::Atom(token) => children.push(SExprChild::Leaf(token)),
            Form::List(sub, sub_offset) => {
                children.push(SExprChild::Node(list_to_tree(sub, sub_offset)?))
            }
        }
    }
    Ok(SExprTree { category, children })
}

/// Parses a file of bracketed trees, one per top-level group.
pub fn parse_treebank(text: &str) -> Result<Vec<SExprTree>, IngestError> {
    let forms = parse_forms(text)?;
    let mut trees = Vec::new();
    for form in forms {
        match form {
            Form::Atom(a) => {
                return Err(IngestError::SExpr {
                    offset: 0,
                    message: format!("stray atom `{a}` outside any tree"),
                })
            }
            Form::List(sub, offset) => trees.push(list_to_tree(sub, offset)?),
        }
    }
    Ok(trees)
}

fn normalize_token(token: &str) -> String {
    token
        .trim_end_matches(|c: char| c.is_ascii_punctuation())
        .to_lowercase()
}

/// Aligns trees against the graph's word chain and returns a new graph
/// with one syntax arc per labelled internal tree node, spanning the nodes
/// of the first and last word it covers. The concatenated tree leaves must
/// equal the word-arc content labels, compared verbatim or, with
/// `normalize`, case-folded and with trailing punctuation stripped.
pub fn align_syntax(
    g: &AnnotationGraph,
    trees: &[SExprTree],
    word_type: &str,
    syn_type: &str,
    normalize: bool,
) -> Result<AnnotationGraph, IngestError> {
    let positions = g.topological_positions();
    let mut words: Vec<&Arc> = g
        .arcs()
        .iter()
        .filter(|a| a.type_label == word_type)
        .collect();
    words.sort_by_key(|a| positions.get(&a.src).copied().unwrap_or(usize::MAX));
    for pair in words.windows(2) {
        if pair[0].dst != pair[1].src {
            return Err(IngestError::NotAChain(word_type.to_string()));
        }
    }

    let mut leaves: Vec<&str> = Vec::new();
    for tree in trees {
        leaves.extend(tree.leaves());
    }
    let canon = |s: &str| {
        if normalize {
            normalize_token(s)
        } else {
            s.to_string()
        }
    };
    let n = leaves.len().max(words.len());
    for index in 0..n {
        match (leaves.get(index), words.get(index)) {
            (Some(leaf), Some(word)) => {
                if canon(leaf) != canon(&word.content_label) {
                    return Err(IngestError::LeafMismatch {
                        index,
                        leaf: leaf.to_string(),
                        word: word.content_label.clone(),
                    });
                }
            }
            (Some(leaf), None) => {
                return Err(IngestError::LeafMismatch {
                    index,
                    leaf: leaf.to_string(),
                    word: "<none>".to_string(),
                })
            }
            (None, Some(word)) => {
                return Err(IngestError::LeafMismatch {
                    index,
                    leaf: "<none>".to_string(),
                    word: word.content_label.clone(),
                })
            }
            (None, None) => break,
        }
    }

    let mut next_id = g.arcs().iter().map(|a| a.id.0).max().unwrap_or(0) + 1;
    let mut new_arcs: Vec<Arc> = g.arcs().to_vec();
    let mut cursor = 0usize;
    for tree in trees {
        collect_spans(
            tree,
            &words,
            &mut cursor,
            &mut next_id,
            syn_type,
            &mut new_arcs,
        );
    }
    let times: Vec<(NodeId, crate::graph::TimePoint)> =
        g.times().iter().map(|(n, t)| (*n, *t)).collect();
    AnnotationGraph::build(new_arcs, times, g.sample_rate(), g.utterance_id())
        .map_err(IngestError::Build)
}

/// Walks a tree depth-first; each labelled node covering leaves `i..j`
/// becomes an arc from word `i`'s source to word `j`'s target. Returns the
/// node's leaf count via the cursor.
fn collect_spans(
    tree: &SExprTree,
    words: &[&Arc],
    cursor: &mut usize,
    next_id: &mut u32,
    syn_type: &str,
    out: &mut Vec<Arc>,
) {
    let start = *cursor;
    // Reserve this node's arc position before descending so spans come out
    // in pre-order.
    let slot = if tree.category.is_empty() {
        None
    } else {
        let id = *next_id;
        *next_id += 1;
        out.push(Arc::new(id, 0, 0, syn_type, &tree.category, None));
        Some(out.len() - 1)
    };
    for child in &tree.children {
        match child {
            SExprChild::Leaf(_) => *cursor += 1,
            SExprChild::Node(node) => collect_spans(node, words, cursor, next_id, syn_type, out),
        }
    }
    if let Some(slot) = slot {
        let end = *cursor;
        if end > start {
            out[slot].src = words[start].src;
            out[slot].dst = words[end - 1].dst;
        } else {
            // A labelled node with no leaves below it spans nothing; drop it.
            out.remove(slot);
            *next_id -= 1;
        }
    }
}
