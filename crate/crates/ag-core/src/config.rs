//! Line-oriented configuration: type hierarchies, phrase-structure rules,
//! label classes and a few defaults.
//!
//! The format is one whitespace-separated directive per line; lines whose
//! first non-blank character is `#` are comments (inline `#` stays part of
//! a label, as in `h#`):
//!
//! ```text
//! type_hierarchy S W
//! ps_rule S NP VP
//! class vowel iy ae axr aa uw
//! rate 16000
//! strip {}
//! level phoneme P
//! accent H*
//! boundary L%
//! category sentence S
//! ```
//!
//! `level` declares a query-level alias for a type label, so that
//! `Phoneme=ae` matches arcs typed `P`; a name matching one of the
//! example-suite roles (phoneme, word, syllable, tone, syntax, imt,
//! matched case-insensitively) also rebinds that role. `category` names the syntax
//! categories the suite's phrase queries look for (roles: sentence,
//! verb_phrase, verb, noun_phrase). `strip` lists decoration characters
//! removed from labels read out of word and tone files.

use thiserror::Error;

use crate::relations::{ClassError, HierarchyError, PhraseRule, QueryConfig, TypeHierarchy};

/// Type labels and category names the example-query suite binds to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteLevels {
    pub phoneme: String,
    pub word: String,
    pub syllable: String,
    pub tone: String,
    pub syntax: String,
    pub imt: String,
    pub accent: String,
    pub boundary: String,
    pub sentence: String,
    pub verb_phrase: String,
    pub verb: String,
    pub noun_phrase: String,
}

impl Default for SuiteLevels {
    fn default() -> Self {
        SuiteLevels {
            phoneme: "P".to_string(),
            word: "W".to_string(),
            syllable: "syl".to_string(),
            tone: "T".to_string(),
            syntax: "S".to_string(),
            imt: "Imt".to_string(),
            accent: "H*".to_string(),
            boundary: "L%".to_string(),
            sentence: "S".to_string(),
            verb_phrase: "VP".to_string(),
            verb: "V".to_string(),
            noun_phrase: "NP".to_string(),
        }
    }
}

/// A loaded configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub query: QueryConfig,
    pub sample_rate: u32,
    pub strip: String,
    pub levels: SuiteLevels,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            query: QueryConfig::default(),
            sample_rate: 16000,
            strip: String::new(),
            levels: SuiteLevels::default(),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: unknown directive `{directive}`")]
    UnknownDirective { line: usize, directive: String },
    #[error("line {line}: `{directive}` takes {expected} arguments")]
    Arity {
        line: usize,
        directive: String,
        expected: usize,
    },
    #[error("line {line}: unknown role `{role}`")]
    UnknownRole { line: usize, role: String },
    #[error("line {line}: invalid sample rate `{value}`")]
    BadRate { line: usize, value: String },
    #[error("line {line}: {source}")]
    Class {
        line: usize,
        #[source]
        source: ClassError,
    },
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let mut hierarchy_pairs: Vec<(String, String)> = Vec::new();
        let mut config = Config::default();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            // Comments are whole lines only: `#` is an ordinary character
            // inside labels (`h#`, `H*`).
            if raw.trim_start().starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = raw.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            let directive = fields[0];
            let args = &fields[1..];
            match directive {
                "type_hierarchy" => {
                    let [upper, lower] = expect_args::<2>(line, directive, args)?;
                    hierarchy_pairs.push((upper.to_string(), lower.to_string()));
                }
                "ps_rule" => {
                    let [parent, left, right] = expect_args::<3>(line, directive, args)?;
                    config
                        .query
                        .ps_rules
                        .push(PhraseRule::new(parent, left, right));
                }
                "class" => {
                    if args.len() < 2 {
                        return Err(ConfigError::Arity {
                            line,
                            directive: directive.to_string(),
                            expected: 2,
                        });
                    }
                    config
                        .query
                        .classes
                        .define(args[0], args[1..].iter().copied())
                        .map_err(|source| ConfigError::Class { line, source })?;
                }
                "rate" => {
                    let [value] = expect_args::<1>(line, directive, args)?;
                    config.sample_rate =
                        value
                            .parse::<u32>()
                            .ok()
                            .filter(|r| *r > 0)
                            .ok_or_else(|| ConfigError::BadRate {
                                line,
                                value: value.to_string(),
                            })?;
                }
                "strip" => {
                    let [chars] = expect_args::<1>(line, directive, args)?;
                    config.strip = chars.to_string();
                }
                "level" => {
                    let [name, label] = expect_args::<2>(line, directive, args)?;
                    config
                        .query
                        .level_aliases
                        .insert(name.to_string(), label.to_string());
                    // Names matching a suite role (case-insensitively) also
                    // rebind that role.
                    match name.to_ascii_lowercase().as_str() {
                        "phoneme" => config.levels.phoneme = label.to_string(),
                        "word" => config.levels.word = label.to_string(),
                        "syllable" => config.levels.syllable = label.to_string(),
                        "tone" => config.levels.tone = label.to_string(),
                        "syntax" => config.levels.syntax = label.to_string(),
                        "imt" => config.levels.imt = label.to_string(),
                        _ => {}
                    }
                }
                "accent" => {
                    let [label] = expect_args::<1>(line, directive, args)?;
                    config.levels.accent = label.to_string();
                }
                "boundary" => {
                    let [label] = expect_args::<1>(line, directive, args)?;
                    config.levels.boundary = label.to_string();
                }
                "category" => {
                    let [role, label] = expect_args::<2>(line, directive, args)?;
                    let slot = match role {
                        "sentence" => &mut config.levels.sentence,
                        "verb_phrase" => &mut config.levels.verb_phrase,
                        "verb" => &mut config.levels.verb,
                        "noun_phrase" => &mut config.levels.noun_phrase,
                        _ => {
                            return Err(ConfigError::UnknownRole {
                                line,
                                role: role.to_string(),
                            })
                        }
                    };
                    *slot = label.to_string();
                }
                _ => {
                    return Err(ConfigError::UnknownDirective {
                        line,
                        directive: directive.to_string(),
                    })
                }
            }
        }

        config.query.hierarchy = TypeHierarchy::new(hierarchy_pairs)?;
        Ok(config)
    }
}

fn expect_args<'a, const N: usize>(
    line: usize,
    directive: &str,
    args: &[&'a str],
) -> Result<[&'a str; N], ConfigError> {
    <[&str; N]>::try_from(args).map_err(|_| ConfigError::Arity {
        line,
        directive: directive.to_string(),
        expected: N,
    })
}
