//! The compiled example-query suite on the sample graph and the synthetic
//! fixtures.

use ag_core::testing;
use ag_core::{eval_example_suite, ArcId, SuiteError, SuiteLevels, SuiteResult};

fn counts<'g>(outcomes: &[ag_core::SuiteOutcome<'g>]) -> Vec<(&'static str, usize)> {
    outcomes
        .iter()
        .map(|o| (o.name, o.result.count()))
        .collect()
}

#[test]
fn sample_graph_counts() {
    let g = testing::sample_graph();
    let outcomes =
        eval_example_suite(&g, &testing::sample_config(), &SuiteLevels::default()).unwrap();
    assert_eq!(
        counts(&outcomes),
        vec![
            ("vowel_stop", 3),
            ("strongWrdDomVowels", 5),
            ("sylHtone", 1),
            ("stop_vowel_seq", 1),
            ("imt_phrase", 0),
            ("syls", 0),
        ]
    );

    let vowel_stop = match &outcomes[0].result {
        SuiteResult::Flat(ms) => ms,
        _ => panic!("flat"),
    };
    let pairs: Vec<(u32, u32)> = vowel_stop
        .matches
        .iter()
        .map(|m| (m.bindings[0].0, m.bindings[1].0))
        .collect();
    assert_eq!(pairs, vec![(5, 6), (8, 9), (16, 17)]);

    let syl_htone = match &outcomes[2].result {
        SuiteResult::Flat(ms) => ms,
        _ => panic!("flat"),
    };
    assert_eq!(syl_htone.matches[0].bindings, vec![ArcId(21)]);

    // The d-aa sequence inside "dark": the word sits in a noun phrase and
    // carries the accent association.
    let seq = match &outcomes[3].result {
        SuiteResult::Flat(ms) => ms,
        _ => panic!("flat"),
    };
    assert_eq!(seq.matches[0].bindings, vec![ArcId(10), ArcId(11)]);
}

#[test]
fn corrected_spans_make_the_phrase_query_fire() {
    let g = testing::corrected_syntax_graph();
    let outcomes =
        eval_example_suite(&g, &testing::sample_config(), &SuiteLevels::default()).unwrap();
    let imt = outcomes.iter().find(|o| o.name == "imt_phrase").unwrap();
    match &imt.result {
        SuiteResult::Flat(ms) => {
            assert_eq!(ms.len(), 1);
            assert_eq!(ms.matches[0].bindings, vec![ArcId(28)]);
        }
        _ => panic!("flat"),
    }
}

#[test]
fn syllable_fixture_returns_one_group_of_three() {
    let g = testing::syllable_tone_graph();
    let outcomes =
        eval_example_suite(&g, &testing::sample_config(), &SuiteLevels::default()).unwrap();
    let syls = outcomes.iter().find(|o| o.name == "syls").unwrap();
    match &syls.result {
        SuiteResult::Grouped(groups) => {
            assert_eq!(groups.len(), 1);
            let members: Vec<u32> = groups[0].matches.iter().map(|m| m.bindings[0].0).collect();
            assert_eq!(members, vec![1, 2, 3]);
        }
        _ => panic!("grouped"),
    }
}

#[test]
fn empty_graph_yields_empty_suites() {
    let g = ag_core::AnnotationGraph::build(vec![], vec![], 16000, "empty").unwrap();
    let outcomes =
        eval_example_suite(&g, &testing::sample_config(), &SuiteLevels::default()).unwrap();
    assert!(outcomes.iter().all(|o| o.result.count() == 0));
}

#[test]
fn missing_classes_are_reported() {
    let g = testing::sample_graph();
    let err = eval_example_suite(&g, &Default::default(), &SuiteLevels::default()).unwrap_err();
    assert_eq!(err, SuiteError::MissingClass("vowel".to_string()));
}
