//! A suite of compiled example queries that go beyond the surface
//! language: three-way joins, rule-driven immediate dominance and
//! label-homogeneous closures.
//!
//! The queries are written against level *roles* (phoneme, word, syllable,
//! tone, syntax, intermediate phrase) which [`SuiteLevels`] maps onto the
//! graph's actual type labels, and against the `vowel` and `stop` label
//! classes from the configuration. `strongWrdDomVowels` places no
//! restriction on the word's content label, so it matches every word
//! dominating a vowel.

use thiserror::Error;

use crate::config::SuiteLevels;
use crate::graph::{AnnotationGraph, Arc, ArcId};
use crate::relations::{i_dom, kleene, LabelField, QueryConfig, Relations};

use super::eval::{matchset_from_bindings, MatchSet};

/// Errors preventing the suite from running at all.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SuiteError {
    #[error("the example suite requires the label class `{0}`")]
    MissingClass(String),
}

/// The result of one suite entry: either a flat match set or, for `syls`,
/// one match set per anchoring accent/boundary pair.
#[derive(Debug)]
pub enum SuiteResult<'g> {
    Flat(MatchSet<'g>),
    Grouped(Vec<MatchSet<'g>>),
}

impl<'g> SuiteResult<'g> {
    /// Flat match count, or the number of groups.
    pub fn count(&self) -> usize {
        match self {
            SuiteResult::Flat(ms) => ms.len(),
            SuiteResult::Grouped(groups) => groups.len(),
        }
    }
}

/// One named suite entry.
#[derive(Debug)]
pub struct SuiteOutcome<'g> {
    pub name: &'static str,
    pub result: SuiteResult<'g>,
}

/// Runs the six example queries against a graph.
pub fn eval_example_suite<'g>(
    g: &'g AnnotationGraph,
    config: &QueryConfig,
    levels: &SuiteLevels,
) -> Result<Vec<SuiteOutcome<'g>>, SuiteError> {
    let vowel = config
        .classes
        .get("vowel")
        .ok_or_else(|| SuiteError::MissingClass("vowel".to_string()))?;
    let stop = config
        .classes
        .get("stop")
        .ok_or_else(|| SuiteError::MissingClass("stop".to_string()))?;
    let relations = Relations::compute(g, &config.hierarchy);

    let of_level =
        |level: &str| -> Vec<&Arc> { g.arcs().iter().filter(|a| a.type_label == level).collect() };
    let phonemes = of_level(&levels.phoneme);
    let words = of_level(&levels.word);
    let tones = of_level(&levels.tone);
    let syns = of_level(&levels.syntax);
    let imts = of_level(&levels.imt);
    let syls = of_level(&levels.syllable);

    // vowel_stop(I,J): vowel phoneme arc I meeting stop phoneme arc J at a
    // shared node.
    let mut vowel_stop: Vec<Vec<ArcId>> = Vec::new();
    for i in &phonemes {
        if !vowel.contains(&i.content_label) {
            continue;
        }
        for j in &phonemes {
            if j.src == i.dst && stop.contains(&j.content_label) {
                vowel_stop.push(vec![i.id, j.id]);
            }
        }
    }

    // strongWrdDomVowels(I): words dominating vowel phonemes.
    let mut word_dom_vowels: Vec<Vec<ArcId>> = Vec::new();
    for w in &words {
        if phonemes
            .iter()
            .any(|p| vowel.contains(&p.content_label) && relations.dom().contains(w.id, p.id))
        {
            word_dom_vowels.push(vec![w.id]);
        }
    }

    // sylHtone(I): words sharing an equivalence class with an accent tone.
    let mut syl_htone: Vec<Vec<ArcId>> = Vec::new();
    for w in &words {
        if tones
            .iter()
            .any(|t| t.content_label == levels.accent && relations.assoc().contains(w.id, t.id))
        {
            syl_htone.push(vec![w.id]);
        }
    }

    // stop_vowel_seq(I,J): stop-vowel sequences dominated by a word inside
    // a noun phrase, the word being associated with an accent tone.
    let mut stop_vowel_seq: Vec<Vec<ArcId>> = Vec::new();
    for i in &phonemes {
        if !stop.contains(&i.content_label) {
            continue;
        }
        for j in &phonemes {
            if j.src != i.dst || !vowel.contains(&j.content_label) {
                continue;
            }
            let witnessed = words.iter().any(|w| {
                relations.dom().contains(w.id, i.id)
                    && relations.dom().contains(w.id, j.id)
                    && syns.iter().any(|n| {
                        n.content_label == levels.noun_phrase
                            && relations.dom().contains(n.id, w.id)
                    })
                    && tones.iter().any(|t| {
                        t.content_label == levels.accent && relations.assoc().contains(w.id, t.id)
                    })
            });
            if witnessed {
                stop_vowel_seq.push(vec![i.id, j.id]);
            }
        }
    }

    // imt_phrase(P): the intermediate phrase containing the verb of a
    // sentence, via two steps of immediate dominance.
    let idom = i_dom(g, &config.ps_rules, &levels.syntax);
    let mut imt_phrase: Vec<Vec<ArcId>> = Vec::new();
    for p in &imts {
        let found = syns.iter().any(|k| {
            k.content_label == levels.sentence
                && syns.iter().any(|j| {
                    j.content_label == levels.verb_phrase
                        && idom.contains(k.id, j.id)
                        && syns.iter().any(|i| {
                            i.content_label == levels.verb
                                && idom.contains(j.id, i.id)
                                && relations.dom().contains(p.id, i.id)
                        })
                })
        });
        if found {
            imt_phrase.push(vec![p.id]);
        }
    }

    // syls(K): the syllables between an accent tone and a boundary tone,
    // inclusive, grouped by the anchoring syllable pair. The anchors are
    // the syllables associated with the two tones; K ranges over the
    // syllable arcs on the label-homogeneous path from one to the other.
    let syl_paths = kleene(g, LabelField::Type, &levels.syllable);
    let mut groups: Vec<(ArcId, ArcId, Vec<Vec<ArcId>>)> = Vec::new();
    for th in &tones {
        let Some(a1) = th
            .eq_class
            .as_deref()
            .filter(|_| th.content_label == levels.accent)
        else {
            continue;
        };
        for tl in &tones {
            let Some(a2) = tl
                .eq_class
                .as_deref()
                .filter(|_| tl.content_label == levels.boundary)
            else {
                continue;
            };
            for first in &syls {
                if first.eq_class.as_deref() != Some(a1) {
                    continue;
                }
                for last in &syls {
                    if last.eq_class.as_deref() != Some(a2) {
                        continue;
                    }
                    let members: Vec<Vec<ArcId>> = syls
                        .iter()
                        .filter(|k| {
                            syl_paths.contains(first.src, k.src)
                                && syl_paths.contains(k.dst, last.dst)
                        })
                        .map(|k| vec![k.id])
                        .collect();
                    if !members.is_empty()
                        && !groups
                            .iter()
                            .any(|(a, b, _)| (*a, *b) == (first.id, last.id))
                    {
                        groups.push((first.id, last.id, members));
                    }
                }
            }
        }
    }
    groups.sort_by_key(|(a, b, _)| (*a, *b));

    Ok(vec![
        SuiteOutcome {
            name: "vowel_stop",
            result: SuiteResult::Flat(matchset_from_bindings(
                g,
                "vowel_stop(I,J)",
                2,
                vowel_stop,
                0,
            )),
        },
        SuiteOutcome {
            name: "strongWrdDomVowels",
            result: SuiteResult::Flat(matchset_from_bindings(
                g,
                "strongWrdDomVowels(I)",
                1,
                word_dom_vowels,
                0,
            )),
        },
        SuiteOutcome {
            name: "sylHtone",
            result: SuiteResult::Flat(matchset_from_bindings(g, "sylHtone(I)", 1, syl_htone, 0)),
        },
        SuiteOutcome {
            name: "stop_vowel_seq",
            result: SuiteResult::Flat(matchset_from_bindings(
                g,
                "stop_vowel_seq(I,J)",
                2,
                stop_vowel_seq,
                0,
            )),
        },
        SuiteOutcome {
            name: "imt_phrase",
            result: SuiteResult::Flat(matchset_from_bindings(g, "imt_phrase(P)", 1, imt_phrase, 0)),
        },
        SuiteOutcome {
            name: "syls",
            result: SuiteResult::Grouped(
                groups
                    .into_iter()
                    .map(|(first, last, members)| {
                        matchset_from_bindings(
                            g,
                            format!("syls(K) anchored by arcs {first}..{last}"),
                            1,
                            members,
                            0,
                        )
                    })
                    .collect(),
            ),
        },
    ])
}
