//! Recursive-descent parser for the surface query language.
//!
//! Grammar:
//!
//! ```text
//! query := term
//! term  := '#'? ( cond | '[' term op term ']' )
//! op    := '->' | '^' | '=>'
//! cond  := LEVEL ('=' | '!=') alt
//! alt   := item ('|' item)*
//! item  := LABEL | '*'
//! ```
//!
//! Whitespace between tokens is insignificant. Labels may contain `*`,
//! `!`, `-`, `%` and most other punctuation (`H*`, `L-`, `!H*`, `L%` are
//! all single labels); `-` ends a label only when followed by `>`, and `!`
//! only when followed by `=`. Disjunction of compound terms and optional
//! elements are not part of the language and are rejected at parse time.

use std::fmt;

use thiserror::Error;

use super::{AltItem, BinOp, CondOp, Condition, QueryAst};

/// A syntax error with the byte offset it occurred at.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at offset {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

impl ParseError {
    fn new(pos: usize, message: impl Into<String>) -> Self {
        ParseError {
            pos,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    LBracket,
    RBracket,
    Hash,
    Pipe,
    Eq,
    Neq,
    Op(BinOp),
    Label(String),
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::LBracket => f.write_str("`[`"),
            Token::RBracket => f.write_str("`]`"),
            Token::Hash => f.write_str("`#`"),
            Token::Pipe => f.write_str("`|`"),
            Token::Eq => f.write_str("`=`"),
            Token::Neq => f.write_str("`!=`"),
            Token::Op(op) => write!(f, "`{op}`"),
            Token::Label(s) => write!(f, "label `{s}`"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            c if c.is_whitespace() => i += 1,
            '[' => {
                tokens.push((i, Token::LBracket));
                i += 1;
            }
            ']' => {
                tokens.push((i, Token::RBracket));
                i += 1;
            }
            '#' => {
                tokens.push((i, Token::Hash));
                i += 1;
            }
            '|' => {
                tokens.push((i, Token::Pipe));
                i += 1;
            }
            '^' => {
                tokens.push((i, Token::Op(BinOp::Dominates)));
                i += 1;
            }
            '=' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    tokens.push((i, Token::Op(BinOp::Associates)));
                    i += 2;
                } else {
                    tokens.push((i, Token::Eq));
                    i += 1;
                }
            }
            '-' if bytes.get(i + 1) == Some(&b'>') => {
                tokens.push((i, Token::Op(BinOp::Sequence)));
                i += 2;
            }
            '!' if bytes.get(i + 1) == Some(&b'=') => {
                tokens.push((i, Token::Neq));
                i += 2;
            }
            '>' => return Err(ParseError::new(i, "unexpected `>`")),
            _ => {
                // `#` is only the result mark at token-start position;
                // inside a label it is an ordinary character (`h#`).
                let start = i;
                while i < bytes.len() {
                    let c = bytes[i] as char;
                    if c.is_whitespace() || matches!(c, '[' | ']' | '|' | '^' | '=' | '>') {
                        break;
                    }
                    if c == '-' && bytes.get(i + 1) == Some(&b'>') {
                        break;
                    }
                    if c == '!' && bytes.get(i + 1) == Some(&b'=') {
                        break;
                    }
                    i += 1;
                }
                tokens.push((start, Token::Label(text[start..i].to_string())));
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
    next_term: usize,
    marks: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn term(&mut self) -> Result<QueryAst, ParseError> {
        let marked = if self.peek() == Some(&Token::Hash) {
            self.advance();
            self.marks += 1;
            if self.marks > 1 {
                return Err(ParseError::new(
                    self.offset(),
                    "only one term may carry the `#` result mark",
                ));
            }
            true
        } else {
            false
        };
        match self.peek() {
            Some(Token::LBracket) => {
                self.advance();
                let left = self.term()?;
                let op = match self.advance() {
                    Some(Token::Op(op)) => op,
                    Some(Token::Pipe) => {
                        return Err(ParseError::new(
                            self.tokens[self.pos - 1].0,
                            "disjunction of compound terms is not supported; \
                             use `|` inside a condition's alternation instead",
                        ))
                    }
                    other => {
                        return Err(err_expected(
                            "an operator `->`, `^` or `=>`",
                            other,
                            self.prev_offset(),
                        ))
                    }
                };
                let right = self.term()?;
                match self.advance() {
                    Some(Token::RBracket) => {}
                    other => return Err(err_expected("`]`", other, self.prev_offset())),
                }
                Ok(QueryAst::Compound {
                    left: Box::new(left),
                    op,
                    right: Box::new(right),
                    marked,
                })
            }
            Some(Token::Label(_)) => self.condition(marked),
            other => Err(err_expected(
                "a condition or `[`",
                other.cloned(),
                self.offset(),
            )),
        }
    }

    fn condition(&mut self, marked: bool) -> Result<QueryAst, ParseError> {
        let level = match self.advance() {
            Some(Token::Label(l)) => l,
            other => return Err(err_expected("a level name", other, self.prev_offset())),
        };
        let op = match self.advance() {
            Some(Token::Eq) => CondOp::Equals,
            Some(Token::Neq) => CondOp::NotEquals,
            other => return Err(err_expected("`=` or `!=`", other, self.prev_offset())),
        };
        let mut alternatives = vec![self.alt_item()?];
        while self.peek() == Some(&Token::Pipe) {
            self.advance();
            alternatives.push(self.alt_item()?);
        }
        let term = self.next_term;
        self.next_term += 1;
        Ok(QueryAst::Condition(Condition {
            level,
            op,
            alternatives,
            marked,
            term,
        }))
    }

    fn alt_item(&mut self) -> Result<AltItem, ParseError> {
        match self.advance() {
            Some(Token::Label(l)) if l == "*" => Ok(AltItem::Wildcard),
            Some(Token::Label(l)) => Ok(AltItem::Label(l)),
            other => Err(err_expected(
                "a label, class name or `*`",
                other,
                self.prev_offset(),
            )),
        }
    }

    fn prev_offset(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.tokens.get(self.pos - 1).map_or(self.end, |(o, _)| *o)
        }
    }
}

fn err_expected(what: &str, got: Option<Token>, pos: usize) -> ParseError {
    match got {
        Some(t) => ParseError::new(pos, format!("expected {what}, found {t}")),
        None => ParseError::new(pos, format!("expected {what}, found end of query")),
    }
}

/// Parses a query, assigning each condition its pre-order term index.
pub fn parse_query(text: &str) -> Result<QueryAst, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
        next_term: 0,
        marks: 0,
    };
    let ast = parser.term()?;
    if parser.peek().is_some() {
        return Err(ParseError::new(
            parser.offset(),
            "trailing input after query",
        ));
    }
    Ok(ast)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_of_classes() {
        let ast = parse_query("[Phoneme=vowel -> Phoneme=stop]").unwrap();
        match &ast {
            QueryAst::Compound {
                left, op, right, ..
            } => {
                assert_eq!(*op, BinOp::Sequence);
                let (l, r) = match (&**left, &**right) {
                    (QueryAst::Condition(l), QueryAst::Condition(r)) => (l, r),
                    _ => panic!("expected two conditions"),
                };
                assert_eq!(l.level, "Phoneme");
                assert_eq!(l.alternatives, vec![AltItem::Label("vowel".into())]);
                assert_eq!(r.alternatives, vec![AltItem::Label("stop".into())]);
                assert_eq!((l.term, r.term), (0, 1));
            }
            _ => panic!("expected a compound"),
        }
    }

    #[test]
    fn alternation_with_six_items() {
        let ast = parse_query("Phonetic=A|I|O|U|E|V").unwrap();
        match &ast {
            QueryAst::Condition(c) => {
                assert_eq!(c.level, "Phonetic");
                assert_eq!(c.op, CondOp::Equals);
                assert_eq!(c.alternatives.len(), 6);
            }
            _ => panic!("expected a condition"),
        }
    }

    #[test]
    fn unbalanced_bracket_is_an_error() {
        let err = parse_query("[Word!=x ^ Phoneme=vowel").unwrap_err();
        assert!(err.message.contains("`]`"), "{}", err.message);
    }

    #[test]
    fn tone_labels_lex_as_single_labels() {
        for (text, want) in [
            ("Tone=H*", "H*"),
            ("Tone=!H*", "!H*"),
            ("Itl=L%", "L%"),
            ("Imt=L-", "L-"),
            ("Tone=L+H*", "L+H*"),
        ] {
            let ast = parse_query(text).unwrap();
            match ast {
                QueryAst::Condition(c) => {
                    assert_eq!(c.alternatives, vec![AltItem::Label(want.into())])
                }
                _ => panic!("expected a condition"),
            }
        }
    }

    #[test]
    fn lone_star_is_the_wildcard() {
        let ast = parse_query("Word=*").unwrap();
        match ast {
            QueryAst::Condition(c) => assert_eq!(c.alternatives, vec![AltItem::Wildcard]),
            _ => panic!("expected a condition"),
        }
    }

    #[test]
    fn double_caret_reports_position() {
        let err = parse_query("[Word=w ^^ x]").unwrap_err();
        assert_eq!(err.pos, 9);
    }

    #[test]
    fn multiple_marks_rejected() {
        let err = parse_query("[#Word=w ^ #Phoneme=v]").unwrap_err();
        assert!(err.message.contains("result mark"));
    }

    #[test]
    fn empty_alternation_rejected() {
        assert!(parse_query("Word=").is_err());
        assert!(parse_query("Word=a|").is_err());
    }

    #[test]
    fn compound_disjunction_rejected_pointedly() {
        let err = parse_query("[[Word=a ^ Phoneme=b] | [Word=c ^ Phoneme=d]]").unwrap_err();
        assert!(err.message.contains("disjunction"), "{}", err.message);
    }

    #[test]
    fn hash_inside_a_label_is_ordinary() {
        let ast = parse_query("Phoneme=h#").unwrap();
        match ast {
            QueryAst::Condition(c) => {
                assert!(!c.marked);
                assert_eq!(c.alternatives, vec![AltItem::Label("h#".into())]);
            }
            _ => panic!("expected a condition"),
        }
    }
}
