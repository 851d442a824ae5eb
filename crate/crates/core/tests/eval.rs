use proptest::prelude::*;

use ptr_rules::eval::{evaluate, micro_f1, percent, KSummary, SweepRow, SweepTable};
use ptr_rules::train::Objective;

/// The usual relation-extraction scorer: a prediction counts as a guess
/// unless it is the negative class, a gold counts unless it is negative, and
/// a hit is a correct non-negative prediction.
fn scorer(preds: &[String], golds: &[String], neg: &str) -> (f64, f64, f64) {
    let mut correct = 0.0;
    let mut guessed = 0.0;
    let mut gold = 0.0;
    for (p, g) in preds.iter().zip(golds) {
        if p != neg {
            guessed += 1.0;
        }
        if g != neg {
            gold += 1.0;
        }
        if p != neg && p == g {
            correct += 1.0;
        }
    }
    let p = if guessed > 0.0 { correct / guessed } else { 0.0 };
    let r = if gold > 0.0 { correct / gold } else { 0.0 };
    let f = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
    (p, r, f)
}

fn labels() -> impl Strategy<Value = (Vec<String>, Vec<String>)> {
    (1usize..40).prop_flat_map(|n| {
        let l = prop_oneof![Just("no_relation"), Just("a"), Just("b"), Just("c:d")].prop_map(String::from);
        (prop::collection::vec(l.clone(), n), prop::collection::vec(l, n))
    })
}

proptest! {
    #[test]
    fn matches_the_reference_scorer((preds, golds) in labels()) {
        let r = micro_f1(&preds, &golds, Some("no_relation")).unwrap();
        let (p, rec, f) = scorer(&preds, &golds, "no_relation");
        prop_assert!((r.micro_precision - p).abs() < 1e-12);
        prop_assert!((r.micro_recall - rec).abs() < 1e-12);
        prop_assert!((r.micro_f1 - f).abs() < 1e-12);
        for x in [r.micro_precision, r.micro_recall, r.micro_f1] {
            prop_assert!((0.0..=1.0).contains(&x));
        }
    }

    #[test]
    fn permutation_invariant((preds, golds) in labels(), seed in any::<u64>()) {
        use rand::{seq::SliceRandom, SeedableRng};
        let mut idx: Vec<usize> = (0..preds.len()).collect();
        idx.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let p2: Vec<&String> = idx.iter().map(|&i| &preds[i]).collect();
        let g2: Vec<&String> = idx.iter().map(|&i| &golds[i]).collect();
        let a = micro_f1(&preds, &golds, Some("no_relation")).unwrap();
        let b = micro_f1(&p2, &g2, Some("no_relation")).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn excluding_an_absent_class_changes_nothing((preds, golds) in labels()) {
        let a = micro_f1(&preds, &golds, None).unwrap();
        let b = micro_f1(&preds, &golds, Some("never-seen")).unwrap();
        prop_assert_eq!(a.micro_f1, b.micro_f1);
        prop_assert_eq!(a.micro_precision, b.micro_precision);
        prop_assert_eq!(a.per_class, b.per_class);
    }

    #[test]
    fn no_true_positives_means_zero_f1((preds, golds) in labels()) {
        let r = micro_f1(&preds, &golds, Some("no_relation")).unwrap();
        let tp: usize = r.per_class.iter().filter(|c| c.class != "no_relation").map(|c| c.tp).sum();
        if tp == 0 {
            prop_assert_eq!(r.micro_f1, 0.0);
        }
    }
}

#[test]
fn included_variant_is_accuracy() {
    let preds = ["a", "b", "no_relation", "a"];
    let golds = ["a", "a", "no_relation", "b"];
    let e = evaluate(&preds, &golds, Some("no_relation")).unwrap();
    assert_eq!(e.included.micro_f1, 0.5);
    assert_eq!(e.excluded.micro_f1, 1.0 / 3.0);
}

#[test]
fn half_formats_as_fifty() {
    assert_eq!(percent(0.5), "50.0");
    let e = evaluate(&["a", "b"], &["a", "a"], None).unwrap();
    assert!(e.to_csv().lines().nth(1).unwrap().ends_with(",50.0"));
    assert!(e.to_csv().ends_with('\n') && !e.to_csv().contains('\r'));
}

#[test]
fn mismatched_or_empty_input_is_an_error() {
    assert!(micro_f1(&["a"], &["a", "b"], None).is_err());
    assert!(micro_f1::<&str, &str>(&[], &[], None).is_err());
}

fn summary(k: usize, mean: f64) -> KSummary {
    KSummary {
        k,
        mean,
        std: 0.0,
        finished: 5,
    }
}

#[test]
fn sweep_csv_has_one_column_per_k_plus_mean() {
    let table = SweepTable {
        ks: vec![8, 16, 32],
        rows: vec![
            SweepRow {
                method: Objective::Ptr,
                per_k: vec![summary(8, 0.515), summary(16, 0.6), summary(32, 0.7)],
                mean: 0.605,
            },
            SweepRow {
                method: Objective::ClsBaseline,
                per_k: vec![summary(8, 0.25), summary(16, 0.5), summary(32, 0.75)],
                mean: 0.5,
            },
        ],
        cells: Vec::new(),
    };
    assert_eq!(
        table.to_csv(),
        "method,8,16,32,Mean\nPTR,51.5,60.0,70.0,60.5\nCLS-head,25.0,50.0,75.0,50.0\n"
    );
}

#[test]
fn empty_sweep_is_header_only() {
    let table = SweepTable {
        ks: Vec::new(),
        rows: Vec::new(),
        cells: Vec::new(),
    };
    assert_eq!(table.to_csv(), "method\n");
}
