//! Brute-force oracle for joint class scores over random rule sets.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ptr_rules::dsl::{Conjunct, Predicate, Role, Rule, TaskSpec, TemplateElement};
use ptr_rules::prompt::compile;
use ptr_rules::scoring::{joint_class_distribution, nll_loss, MaskDistributions};

pub struct Case {
    pub spec: TaskSpec,
    /// Phrases per position, in the order the test generated them.
    pub phrases: Vec<Vec<String>>,
    /// Class tuples as phrase indices into `phrases`.
    pub tuples: Vec<Vec<usize>>,
}

pub fn random_case(rng: &mut ChaCha8Rng) -> Case {
    let n_masks = rng.random_range(1..=4);
    let mut phrases = Vec::new();
    let mut preds = Vec::new();
    for j in 0..n_masks {
        let n = rng.random_range(1..=5);
        let words: Vec<String> = (0..n).map(|k| format!("w{j}x{k}")).collect();
        let role = if j % 2 == 0 { Role::Subj } else { Role::Obj };
        preds.push(Predicate::new(
            format!("p{j}"),
            vec![TemplateElement::word("the"), TemplateElement::Mask, TemplateElement::entity(role)],
            words.clone(),
        ));
        phrases.push(words);
    }
    let space: usize = phrases.iter().map(Vec::len).product();
    let n_classes = rng.random_range(1..=space.min(8));
    let mut all: Vec<usize> = (0..space).collect();
    all.shuffle(rng);
    let tuples: Vec<Vec<usize>> = all[..n_classes]
        .iter()
        .map(|&code| {
            let mut rest = code;
            phrases
                .iter()
                .map(|p| {
                    let k = rest % p.len();
                    rest /= p.len();
                    k
                })
                .collect()
        })
        .collect();
    let classes: Vec<String> = (0..n_classes).map(|c| format!("c{c}")).collect();
    let rules = classes
        .iter()
        .zip(&tuples)
        .map(|(c, t)| {
            Rule::new(
                c.clone(),
                t.iter()
                    .enumerate()
                    .map(|(j, &k)| Conjunct::new(format!("p{j}"), phrases[j][k].clone()))
                    .collect(),
            )
        })
        .collect();
    Case {
        spec: TaskSpec::new(preds, classes, rules),
        phrases,
        tuples,
    }
}

pub fn random_dist(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let logits: Vec<f64> = (0..n).map(|_| rng.random_range(-6.0..6.0)).collect();
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|l| (l - m).exp()).collect();
    let z: f64 = e.iter().sum();
    e.iter().map(|x| x / z).collect()
}

pub type PhraseProbs = Vec<HashMap<String, f64>>;

/// Enumerates every phrase tuple of the product space and keeps the ones
/// that are class tuples.
pub fn brute_force(probs: &PhraseProbs, tuples: &[Vec<String>]) -> Vec<f64> {
    let axes: Vec<Vec<(&String, f64)>> = probs.iter().map(|m| m.iter().map(|(k, v)| (k, *v)).collect()).collect();
    let mut table: HashMap<Vec<String>, f64> = HashMap::new();
    let mut idx = vec![0usize; axes.len()];
    loop {
        let key: Vec<String> = idx.iter().zip(&axes).map(|(&k, a)| a[k].0.clone()).collect();
        let p: f64 = idx.iter().zip(&axes).map(|(&k, a)| a[k].1).product();
        table.insert(key, p);
        let mut j = 0;
        loop {
            if j == idx.len() {
                return tuples.iter().map(|t| table[t]).collect();
            }
            idx[j] += 1;
            if idx[j] < axes[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// Random distributions over the phrases each position can take, keyed by
/// phrase.
pub fn random_probs(rng: &mut ChaCha8Rng, tuples: &[Vec<String>]) -> PhraseProbs {
    (0..tuples[0].len())
        .map(|j| {
            let mut seen: Vec<String> = tuples.iter().map(|t| t[j].clone()).collect();
            seen.sort();
            seen.dedup();
            let d = random_dist(rng, seen.len());
            seen.into_iter().zip(d).collect()
        })
        .collect()
}

pub fn schema_view(schema: &ptr_rules::prompt::PromptSchema, probs: &PhraseProbs) -> MaskDistributions {
    MaskDistributions::new(
        schema
            .mask_vocabs
            .iter()
            .zip(probs)
            .map(|(v, m)| v.iter().map(|w| m[w]).collect())
            .collect(),
    )
}

pub fn phrase_tuples(case: &Case) -> Vec<Vec<String>> {
    case.tuples
        .iter()
        .map(|t| t.iter().enumerate().map(|(j, &k)| case.phrases[j][k].clone()).collect())
        .collect()
}

/// Runs `n` random cases from `seed`: per-position sums, the score total,
/// agreement with [`brute_force`], first-wins argmax and the NLL.
pub fn check_random_cases(n: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case_no in 0..n {
        let case = random_case(&mut rng);
        let schema = compile(&case.spec).map_err(|e| format!("case {case_no}: {e}"))?;
        let tuples = phrase_tuples(&case);
        let probs = random_probs(&mut rng, &tuples);
        let dists = schema_view(&schema, &probs);
        for d in &dists.per_position {
            if (d.iter().sum::<f64>() - 1.0).abs() > 1e-6 {
                return Err(format!("case {case_no}: position does not sum to 1"));
            }
        }
        let scores = joint_class_distribution(&dists, &schema).map_err(|e| format!("case {case_no}: {e}"))?;
        let oracle = brute_force(&probs, &tuples);
        for (c, (got, want)) in scores.scores.iter().zip(&oracle).enumerate() {
            if (got - want).abs() > 1e-9 {
                return Err(format!("case {case_no} class {c}: {got} vs {want}"));
            }
        }
        if scores.scores.iter().sum::<f64>() > 1.0 + 1e-6 {
            return Err(format!("case {case_no}: class scores sum above 1"));
        }
        let best = oracle.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let first = oracle.iter().position(|&x| x == best).unwrap();
        if scores.predicted != first {
            return Err(format!("case {case_no}: argmax {} vs {first}", scores.predicted));
        }
        let y = rng.random_range(0..tuples.len());
        let nll = nll_loss(std::slice::from_ref(&dists), &[schema.classes[y].as_str()], &schema)
            .map_err(|e| format!("case {case_no}: {e}"))?;
        let want: f64 = tuples[y].iter().zip(&probs).map(|(w, m)| -m[w].max(1e-12).ln()).sum();
        if (nll - want).abs() > 1e-9 {
            return Err(format!("case {case_no}: nll {nll} vs {want}"));
        }
    }
    Ok(())
}
