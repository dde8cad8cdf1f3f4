//! Round-trip and rejection tests for the tab-separated landmark
//! format.

use proptest::prelude::*;
use pwshape::dataset::{Dataset, Specimen};
use pwshape::error::Error;
use nalgebra::DMatrix;

fn specimen_id() -> impl Strategy<Value = String> {
    "[A-Za-z][A-Za-z0-9_.-]{0,8}".prop_map(|s| s)
}

fn group_of_specimens(
    n_landmarks: usize,
    dim: usize,
) -> impl Strategy<Value = Vec<Specimen>> {
    proptest::collection::vec(
        (
            specimen_id(),
            proptest::collection::vec(-1e3f64..1e3, n_landmarks * dim),
        ),
        1..4,
    )
    .prop_map(move |items| {
        items
            .into_iter()
            .enumerate()
            .map(|(i, (id, coords))| Specimen {
                // Uniquify: the format allows repeated ids only across
                // groups, not within one.
                id: format!("{id}_{i}"),
                config: DMatrix::from_row_slice(n_landmarks, dim, &coords),
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn tsv_round_trips_datasets(
        g1 in group_of_specimens(4, 2),
        g2 in group_of_specimens(4, 2),
    ) {
        let ds = Dataset::from_groups(vec![
            ("control".to_string(), g1),
            ("treated".to_string(), g2),
        ]).unwrap();
        let text = ds.to_tsv();
        let back = Dataset::parse_str(&text).unwrap();
        prop_assert_eq!(back.n_landmarks, ds.n_landmarks);
        prop_assert_eq!(back.dim, ds.dim);
        prop_assert_eq!(back.group_labels(), ds.group_labels());
        for (label, specimens) in ds.groups() {
            let parsed = back.group(label).unwrap();
            prop_assert_eq!(parsed.len(), specimens.len());
            for (a, b) in specimens.iter().zip(parsed) {
                prop_assert_eq!(&a.id, &b.id);
                // Exact float round-trip through the debug formatter.
                prop_assert_eq!(&a.config, &b.config);
            }
        }
    }
}

#[test]
fn parser_reports_line_numbers() {
    let text = "group\tspecimen_id\tlandmark_index\tx\ty\n\
                a\ts1\t1\t0.0\t0.0\n\
                a\ts1\t2\t1.0\tnot_a_number\n";
    match Dataset::parse_str(text) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected a parse error with a line number, got {other:?}"),
    }
}

#[test]
fn parser_rejects_duplicate_landmark_indices() {
    let text = "a\ts1\t1\t0.0\t0.0\n\
                a\ts1\t1\t1.0\t2.0\n\
                a\ts1\t2\t3.0\t4.0\n";
    assert!(matches!(
        Dataset::parse_str(text),
        Err(Error::Parse { line: 2, .. })
    ));
}

#[test]
fn parser_rejects_mixed_dimensions() {
    let text = "a\ts1\t1\t0.0\t0.0\n\
                a\ts1\t2\t1.0\t2.0\t3.0\n";
    assert!(Dataset::parse_str(text).is_err());
}

#[test]
fn parser_rejects_gappy_indices() {
    let text = "a\ts1\t1\t0.0\t0.0\n\
                a\ts1\t3\t1.0\t2.0\n\
                a\ts1\t4\t3.0\t4.0\n";
    assert!(Dataset::parse_str(text).is_err());
}

#[test]
fn parser_needs_three_landmarks() {
    let text = "a\ts1\t1\t0.0\t0.0\n\
                a\ts1\t2\t1.0\t2.0\n";
    assert!(Dataset::parse_str(text).is_err());
}

#[test]
fn parser_accepts_zero_based_indices_and_comments() {
    let text = "# comment line\n\
                \n\
                a\ts1\t0\t0.0\t0.1\n\
                a\ts1\t1\t1.0\t2.0\n\
                a\ts1\t2\t3.0\t4.0\n\
                a\ts1\t3\t5.0\t-1.0\n";
    let ds = Dataset::parse_str(text).unwrap();
    assert_eq!(ds.n_landmarks, 4);
    assert_eq!(ds.dim, 2);
    assert_eq!(ds.total_specimens(), 1);
}

#[test]
fn groups_preserve_first_appearance_order() {
    let text = "zebra\ts1\t1\t0.0\t0.0\n\
                zebra\ts1\t2\t1.0\t0.0\n\
                zebra\ts1\t3\t0.0\t1.0\n\
                alpha\ts2\t1\t0.0\t0.0\n\
                alpha\ts2\t2\t2.0\t0.0\n\
                alpha\ts2\t3\t0.0\t2.0\n";
    let ds = Dataset::parse_str(text).unwrap();
    assert_eq!(ds.group_labels(), vec!["zebra", "alpha"]);
}
