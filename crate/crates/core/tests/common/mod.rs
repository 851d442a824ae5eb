//! Fixtures shared by integration tests.
#![allow(dead_code)]

pub mod oracle;
pub mod tables;

use sha2::{Digest, Sha256};

use ptr_rules::corpus::{Dataset, Instance, Span};
use ptr_rules::train::few_shot_sample;

/// Unbalanced pool with labels deliberately out of byte order.
pub fn fixture_pool() -> Dataset {
    let sizes = [("per:title", 23), ("no_relation", 40), ("org:members", 17), ("per:age", 9)];
    let mut instances = Vec::new();
    for round in 0..40 {
        for (label, n) in sizes {
            if round < n {
                let id = format!("{label}#{round}");
                instances.push(Instance::new(
                    id,
                    vec!["a".into(), "b".into(), "c".into()],
                    Span::new(0, 1),
                    Span::new(2, 3),
                    label,
                ));
            }
        }
    }
    Dataset::from_instances("fixture", instances)
}

fn ids(d: &Dataset) -> Vec<String> {
    d.instances.iter().map(|i| i.id.clone()).collect()
}

/// SHA-256 of the K-shot train and dev ids, comma-joined, train `|` dev.
pub fn subset_digest(pool: &Dataset, k: usize, seed: u64) -> String {
    let s = few_shot_sample(pool, k, seed);
    let text = format!("{}|{}", ids(&s.train).join(","), ids(&s.dev).join(","));
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Digests of the K=8 subsets of [`fixture_pool`] for the default seeds.
pub const PINNED_K8: [(u64, &str); 5] = [
    (13, "2a13b026f9b8e07494793df1e5b9af7ee5f6875d8d4ccc346870af8c5df57981"),
    (21, "547513c4d9d5530721933b5c36b719f6d606cdfc708f76dc3a6353fe786c99de"),
    (42, "169d9900b960e946c316855ec8be4652d7f46fa72401f617262bc0f0d52cb30a"),
    (87, "13368ff9ce6dced8b270182fad1c923fdbfd5076316226b960291eeb4b70d054"),
    (100, "541f2531b76054b489df4d60c1c0cead461dab1c5a0e98460ba6369815946365"),
];
