//! Segment-table construction, the exact output formats, grouping and the
//! millisecond round-trip law.

use ag_core::testing::{self, Rng};
use ag_core::{
    computed_count, emit_csv, emit_emu, eval_query, group_report, parse_query, segment_table, Arc,
    ArcId, NodeId, ReportError, TableKind, TimePoint, TypeHierarchy,
};
use proptest::prelude::*;

fn phoneme_table() -> ag_core::SegmentTable {
    let g = testing::sample_graph();
    let config = testing::sample_config();
    let ms = eval_query(&g, &parse_query("P!=zzz").unwrap(), &config);
    segment_table(&ms, "timit")
}

#[test]
fn first_and_fourth_phoneme_rows_have_exact_times() {
    let table = phoneme_table();
    assert_eq!(table.rows.len(), 17);
    let emu = emit_emu(&table);
    let lines: Vec<&str> = emu.lines().collect();
    assert_eq!(lines[4], "h#\t0\t147.5\tfjsp0:sa1");
    assert_eq!(lines[7], "hv\t325\t385\tfjsp0:sa1");
}

#[test]
fn emu_header_shape_and_line_count() {
    let table = phoneme_table();
    let emu = emit_emu(&table);
    let lines: Vec<&str> = emu.lines().collect();
    assert_eq!(lines[0], "database:timit");
    assert_eq!(lines[1], "query:P!=zzz");
    assert_eq!(lines[2], "type:segment");
    assert_eq!(lines[3], "#");
    assert_eq!(lines.len(), 4 + table.rows.len());
}

#[test]
fn empty_table_is_header_only() {
    let g = testing::sample_graph();
    let config = testing::sample_config();
    let ms = eval_query(&g, &parse_query("P=nosuch").unwrap(), &config);
    let table = segment_table(&ms, "timit");
    assert_eq!(
        emit_emu(&table),
        "database:timit\nquery:P=nosuch\ntype:segment\n#\n"
    );
    assert_eq!(emit_csv(&table), "label,start_ms,end_ms,utterance\n");
}

#[test]
fn zero_width_matches_make_an_event_table() {
    let g = testing::sample_graph();
    let config = testing::sample_config();
    let ms = eval_query(&g, &parse_query("T=H*").unwrap(), &config);
    let table = segment_table(&ms, "timit");
    assert_eq!(table.kind, TableKind::Event);
    assert_eq!(
        emit_emu(&table),
        "database:timit\nquery:T=H*\ntype:event\n#\nH*\t853.125\t853.125\tfjsp0:sa1\n"
    );
}

#[test]
fn csv_escapes_awkward_labels() {
    let arcs = vec![Arc::new(1, 0, 1, "W", "a,b", None)];
    let times = vec![(NodeId(0), TimePoint(0)), (NodeId(1), TimePoint(16))];
    let g = ag_core::AnnotationGraph::build(arcs, times, 16000, "u").unwrap();
    let ms = eval_query(&g, &parse_query("W=*").unwrap(), &Default::default());
    let table = segment_table(&ms, "db");
    assert_eq!(
        emit_csv(&table),
        "label,start_ms,end_ms,utterance\n\"a,b\",0,1,u\n"
    );
}

#[test]
fn untimed_anchor_rows_are_skipped_and_flagged() {
    let arcs = vec![
        Arc::new(1, 0, 1, "W", "timed", None),
        Arc::new(2, 1, 2, "W", "untimed", None),
    ];
    let times = vec![(NodeId(0), TimePoint(0)), (NodeId(1), TimePoint(160))];
    let g = ag_core::AnnotationGraph::build(arcs, times, 16000, "u").unwrap();
    let ms = eval_query(&g, &parse_query("W=*").unwrap(), &Default::default());
    let table = segment_table(&ms, "db");
    assert!(table.is_partial());
    assert_eq!(table.rows.len(), 1);
    assert_eq!(table.skipped.len(), 1);
    assert_eq!(table.skipped[0].anchor, ArcId(2));
}

#[test]
fn grouping_splits_words_per_phrase() {
    // Two phrases dominating two and three words respectively.
    let arcs = vec![
        Arc::new(1, 0, 1, "W", "w1", None),
        Arc::new(2, 1, 2, "W", "w2", None),
        Arc::new(3, 2, 3, "W", "w3", None),
        Arc::new(4, 3, 4, "W", "w4", None),
        Arc::new(5, 4, 5, "W", "w5", None),
        Arc::new(6, 0, 2, "S", "NP", None),
        Arc::new(7, 2, 5, "S", "NP", None),
    ];
    let times = (0..=5)
        .map(|n| (NodeId(n), TimePoint(n as u64 * 160)))
        .collect();
    let g = ag_core::AnnotationGraph::build(arcs, times, 16000, "u").unwrap();
    let config = ag_core::QueryConfig {
        hierarchy: TypeHierarchy::new([("S", "W")]).unwrap(),
        ..Default::default()
    };
    let ms = eval_query(&g, &parse_query("[S=NP ^ #W=*]").unwrap(), &config);
    assert_eq!(ms.len(), 5);

    let tables = group_report(&ms, 0, "db").unwrap();
    assert_eq!(tables.len(), 2);
    assert_eq!(tables[0].rows.len(), 2);
    assert_eq!(tables[1].rows.len(), 3);
    // Concatenating the groups' rows gives the flat table's rows, up to
    // ordering.
    let mut all_rows: Vec<ag_core::SegmentRow> =
        tables.iter().flat_map(|t| t.rows.iter().cloned()).collect();
    let direct = segment_table(&ms, "db");
    let mut direct_rows = direct.rows.clone();
    let key = |r: &ag_core::SegmentRow| (r.start, r.end, r.label.clone());
    all_rows.sort_by_key(key);
    direct_rows.sort_by_key(key);
    assert_eq!(all_rows, direct_rows);

    // Grouping by the anchor itself gives singleton tables.
    let singles = group_report(&ms, 1, "db").unwrap();
    assert_eq!(singles.len(), 5);
    assert!(singles.iter().all(|t| t.rows.len() == 1));

    // Term indexes out of range are rejected.
    assert_eq!(
        group_report(&ms, 9, "db").unwrap_err(),
        ReportError::UnboundTerm {
            term: 9,
            n_terms: 2
        }
    );

    // Empty match sets group to no tables.
    let empty = eval_query(&g, &parse_query("[S=VP ^ #W=*]").unwrap(), &config);
    assert!(group_report(&empty, 0, "db").unwrap().is_empty());
}

#[test]
fn counting_arcs_to_the_end_of_the_enclosing_span() {
    // A phrase of four words; counting words from each anchor to the end
    // of the phrase.
    let arcs = vec![
        Arc::new(1, 0, 1, "W", "w1", None),
        Arc::new(2, 1, 2, "W", "w2", None),
        Arc::new(3, 2, 3, "W", "w3", None),
        Arc::new(4, 3, 4, "W", "w4", None),
        Arc::new(5, 0, 4, "Imt", "L-", None),
    ];
    let times = (0..=4)
        .map(|n| (NodeId(n), TimePoint(n as u64 * 160)))
        .collect();
    let g = ag_core::AnnotationGraph::build(arcs, times, 16000, "u").unwrap();
    let config = ag_core::QueryConfig {
        hierarchy: TypeHierarchy::new([("Imt", "W")]).unwrap(),
        ..Default::default()
    };
    let ms = eval_query(&g, &parse_query("[Imt=L- ^ #W=*]").unwrap(), &config);
    let counts = computed_count(&ms, 0, "W").unwrap();
    assert_eq!(counts, vec![4, 3, 2, 1]);
}

proptest! {
    #[test]
    fn millisecond_strings_recover_the_exact_sample(
        samples in 0u64..10_000_000,
        rate_pick in 0usize..4,
    ) {
        let rate = [16000u32, 8000, 1000, 40000][rate_pick];
        let text = ag_core::report::ms_string(TimePoint(samples), rate);
        // Parse the decimal back and convert to samples exactly.
        let (int_part, frac_part) = match text.split_once('.') {
            Some((i, f)) => (i, f),
            None => (text.as_str(), ""),
        };
        let mantissa: u128 = format!("{int_part}{frac_part}").parse().unwrap();
        let den = 10u128.pow(frac_part.len() as u32) * 1000;
        let num = mantissa * rate as u128;
        prop_assert_eq!(num % den, 0, "ms text {} not exact at rate {}", text, rate);
        prop_assert_eq!(num / den, samples as u128);
    }

    #[test]
    fn random_tables_have_consistent_emu_shape(seed in any::<u64>()) {
        let g = testing::random_dag(&mut Rng::new(seed), 30);
        let config = Default::default();
        let ms = eval_query(&g, &parse_query("P=*").unwrap(), &config);
        let table = segment_table(&ms, "db");
        let emu = emit_emu(&table);
        prop_assert_eq!(emu.lines().count(), 4 + table.rows.len());
        prop_assert_eq!(table.rows.len() + table.skipped.len(), ms.len());
    }
}
