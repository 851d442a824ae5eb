//! Class scores from per-mask distributions: `p(y|x)` is the product over
//! masks of the probability of the class's label phrase at that mask.
//!
//! Scores are not renormalized over classes for prediction or loss; the
//! product is used as is. [`ClassScores::normalized`] exists for reporting.

use thiserror::Error;

use crate::corpus::{Instance, InstanceError};
use crate::mlm::{Example, MlmError, Target, TinyMlm, PROB_FLOOR};
use crate::prompt::{render_oriented, Orientation, PromptSchema};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoringError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("empty batch")]
    EmptyBatch,
    #[error("class `{0}` is not in the schema")]
    UnknownClass(String),
    #[error(transparent)]
    Render(#[from] InstanceError),
    #[error(transparent)]
    Model(#[from] MlmError),
}

/// One probability vector per mask; vector `j` ranges over V_j.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskDistributions {
    pub per_position: Vec<Vec<f64>>,
}

impl MaskDistributions {
    pub fn new(per_position: Vec<Vec<f64>>) -> Self {
        MaskDistributions { per_position }
    }

    /// Uniform distribution at every mask of `schema`.
    pub fn uniform(schema: &PromptSchema) -> Self {
        MaskDistributions::new(
            schema
                .mask_vocabs
                .iter()
                .map(|v| vec![1.0 / v.len() as f64; v.len()])
                .collect(),
        )
    }

    fn check(&self, schema: &PromptSchema) -> Result<(), ScoringError> {
        if self.per_position.len() != schema.n_masks {
            return Err(ScoringError::Dimension(format!(
                "{} distributions for {} masks",
                self.per_position.len(),
                schema.n_masks
            )));
        }
        for (j, (dist, vocab)) in self.per_position.iter().zip(&schema.mask_vocabs).enumerate() {
            if dist.len() != vocab.len() {
                return Err(ScoringError::Dimension(format!(
                    "mask {} has {} probabilities for {} phrases",
                    j + 1,
                    dist.len(),
                    vocab.len()
                )));
            }
        }
        Ok(())
    }
}

/// Joint class scores in schema class order.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassScores {
    pub scores: Vec<f64>,
    /// Index of the highest score; the first class wins ties.
    pub predicted: usize,
}

impl ClassScores {
    fn from_scores(scores: Vec<f64>) -> Self {
        let predicted = argmax_first(&scores);
        ClassScores { scores, predicted }
    }

    pub fn predicted_label<'a>(&self, schema: &'a PromptSchema) -> &'a str {
        &schema.classes[self.predicted]
    }

    /// Scores divided by their sum. Reporting only.
    pub fn normalized(&self) -> Vec<f64> {
        let total: f64 = self.scores.iter().sum();
        if total > 0.0 {
            self.scores.iter().map(|s| s / total).collect()
        } else {
            vec![1.0 / self.scores.len() as f64; self.scores.len()]
        }
    }
}

/// Index of the maximum; earliest index on ties.
pub fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// `scores(y) = prod_j dists[j][phi_j(y)]`, with one set of distributions
/// shared by every class.
pub fn joint_class_distribution(
    dists: &MaskDistributions,
    schema: &PromptSchema,
) -> Result<ClassScores, ScoringError> {
    joint_class_distribution_views(dists, Some(dists), schema)
}

/// Like [`joint_class_distribution`], but reversed classes read their
/// probabilities from `reversed` (the reversed-orientation rendering).
pub fn joint_class_distribution_views(
    forward: &MaskDistributions,
    reversed: Option<&MaskDistributions>,
    schema: &PromptSchema,
) -> Result<ClassScores, ScoringError> {
    forward.check(schema)?;
    if let Some(r) = reversed {
        r.check(schema)?;
    }
    let mut scores = Vec::with_capacity(schema.n_classes());
    for entry in &schema.verbalizer {
        let dists = if entry.reversed {
            reversed.ok_or_else(|| {
                ScoringError::Dimension(format!(
                    "class `{}` is reversed but no reversed distributions were given",
                    entry.class
                ))
            })?
        } else {
            forward
        };
        let score = entry
            .phrases
            .iter()
            .zip(&dists.per_position)
            .map(|(&k, dist)| dist[k])
            .product();
        scores.push(score);
    }
    Ok(ClassScores::from_scores(scores))
}

/// `-(1/|B|) sum_x sum_j log dists_x[j][phi_j(y_x)]`, probabilities clamped
/// at [`PROB_FLOOR`].
pub fn nll_loss<S: AsRef<str>>(
    batch: &[MaskDistributions],
    gold: &[S],
    schema: &PromptSchema,
) -> Result<f64, ScoringError> {
    if batch.is_empty() {
        return Err(ScoringError::EmptyBatch);
    }
    if batch.len() != gold.len() {
        return Err(ScoringError::Dimension(format!(
            "{} distributions for {} gold labels",
            batch.len(),
            gold.len()
        )));
    }
    let mut total = 0.0;
    for (dists, y) in batch.iter().zip(gold) {
        dists.check(schema)?;
        let y = schema
            .class_index(y.as_ref())
            .ok_or_else(|| ScoringError::UnknownClass(y.as_ref().to_string()))?;
        for (&k, dist) in schema.verbalizer[y].phrases.iter().zip(&dists.per_position) {
            total -= dist[k].max(PROB_FLOOR).ln();
        }
    }
    Ok(total / batch.len() as f64)
}

/// Vocab ids of V_j for every mask of `schema`.
pub fn mask_candidates(model: &TinyMlm, schema: &PromptSchema) -> Result<Vec<Vec<usize>>, MlmError> {
    schema
        .mask_vocabs
        .iter()
        .map(|v| model.phrase_ids(v))
        .collect()
}

/// Mask distributions for `instance` rendered in one orientation.
pub fn mask_distributions(
    model: &TinyMlm,
    schema: &PromptSchema,
    instance: &Instance,
    orientation: Orientation,
) -> Result<MaskDistributions, ScoringError> {
    let rendered = render_oriented(schema, instance, orientation)?;
    let encoded = model.encode_prompt(&rendered)?;
    let candidates = mask_candidates(model, schema)?;
    Ok(MaskDistributions::new(
        model.mask_distributions(&encoded, &candidates)?,
    ))
}

/// Joint class scores, rendering once per orientation the schema uses.
pub fn class_scores(
    model: &TinyMlm,
    schema: &PromptSchema,
    instance: &Instance,
) -> Result<ClassScores, ScoringError> {
    let orientations = schema.orientations();
    let forward = if orientations.contains(&Orientation::Forward) {
        Some(mask_distributions(model, schema, instance, Orientation::Forward)?)
    } else {
        None
    };
    let reversed = if orientations.contains(&Orientation::Reversed) {
        Some(mask_distributions(model, schema, instance, Orientation::Reversed)?)
    } else {
        None
    };
    match (&forward, &reversed) {
        (Some(f), r) => joint_class_distribution_views(f, r.as_ref(), schema),
        (None, Some(r)) => joint_class_distribution_views(r, Some(r), schema),
        (None, None) => Err(ScoringError::Dimension("schema has no classes".into())),
    }
}

/// Predicted class label under the joint mask objective.
pub fn predict(
    model: &TinyMlm,
    schema: &PromptSchema,
    instance: &Instance,
) -> Result<String, ScoringError> {
    let scores = class_scores(model, schema, instance)?;
    Ok(scores.predicted_label(schema).to_string())
}

/// Training example for the joint mask objective, rendered in the gold
/// class's orientation.
pub fn prompt_example(
    model: &TinyMlm,
    schema: &PromptSchema,
    candidates: &[Vec<usize>],
    instance: &Instance,
) -> Result<Example, ScoringError> {
    let y = schema
        .class_index(&instance.label)
        .ok_or_else(|| ScoringError::UnknownClass(instance.label.clone()))?;
    let entry = &schema.verbalizer[y];
    let rendered = render_oriented(schema, instance, entry.orientation())?;
    Ok(Example {
        input: model.encode_prompt(&rendered)?,
        target: Target::Masks {
            candidates: candidates.to_vec(),
            gold: entry.phrases.clone(),
        },
    })
}

/// Training example for the `[CLS]`-head baseline.
pub fn baseline_example(model: &TinyMlm, instance: &Instance) -> Result<Example, ScoringError> {
    instance.check()?;
    let y = model
        .classes
        .iter()
        .position(|c| *c == instance.label)
        .ok_or_else(|| ScoringError::UnknownClass(instance.label.clone()))?;
    Ok(Example {
        input: model.encode_marked(instance)?,
        target: Target::Class(y),
    })
}

/// Predicted class label under the `[CLS]` head.
pub fn baseline_predict(model: &TinyMlm, instance: &Instance) -> Result<String, ScoringError> {
    instance.check()?;
    let hidden = model.encode(&model.encode_marked(instance)?)?;
    let probs = model.cls_head(hidden.row(0))?;
    Ok(model.classes[argmax_first(&probs)].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_task_spec;
    use crate::prompt::compile;
    use approx::assert_relative_eq;

    fn two_mask() -> PromptSchema {
        compile(
            &parse_task_spec(
                "predicate f { template: the [MASK] <subj>; labels: a, b; }
                 predicate g { template: the [MASK] <obj>; labels: c, d; }
                 classes { y1, y2 }
                 rule y1 = f(a) & g(c);
                 rule y2 = f(b) & g(d);",
            )
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn product_of_given_probabilities() {
        let d = MaskDistributions::new(vec![vec![0.7, 0.3], vec![0.6, 0.4]]);
        let s = joint_class_distribution(&d, &two_mask()).unwrap();
        assert_relative_eq!(s.scores[0], 0.42, epsilon = 1e-15);
        assert_relative_eq!(s.scores[1], 0.12, epsilon = 1e-15);
        assert_eq!(s.predicted, 0);
    }

    #[test]
    fn uniform_ties_go_to_first_class() {
        let schema = two_mask();
        let s = joint_class_distribution(&MaskDistributions::uniform(&schema), &schema).unwrap();
        assert_eq!(s.scores, vec![0.25, 0.25]);
        assert_eq!(s.predicted_label(&schema), "y1");
    }

    #[test]
    fn single_mask_scores_are_the_restricted_distribution() {
        let schema = compile(
            &parse_task_spec(
                "predicate f { template: [MASK] <subj>; labels: a, b, c; }
                 classes { x, y, z }
                 rule x = f(c); rule y = f(a); rule z = f(b);",
            )
            .unwrap(),
        )
        .unwrap();
        let d = MaskDistributions::new(vec![vec![0.5, 0.2, 0.3]]);
        let s = joint_class_distribution(&d, &schema).unwrap();
        // first-seen vocab order is c, a, b
        assert_eq!(schema.mask_vocabs[0], vec!["c", "a", "b"]);
        assert_eq!(s.scores, vec![0.5, 0.2, 0.3]);
    }

    #[test]
    fn dimension_mismatch() {
        let schema = two_mask();
        let d = MaskDistributions::new(vec![vec![1.0, 0.0]]);
        assert!(matches!(
            joint_class_distribution(&d, &schema),
            Err(ScoringError::Dimension(_))
        ));
        let d = MaskDistributions::new(vec![vec![1.0, 0.0], vec![1.0]]);
        assert!(joint_class_distribution(&d, &schema).is_err());
    }

    #[test]
    fn loss_values() {
        let schema = two_mask();
        let perfect = MaskDistributions::new(vec![vec![1.0, 0.0], vec![1.0, 0.0]]);
        assert_eq!(nll_loss(std::slice::from_ref(&perfect), &["y1"], &schema).unwrap(), 0.0);
        let half = MaskDistributions::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
        let l = nll_loss(std::slice::from_ref(&half), &["y2"], &schema).unwrap();
        assert_relative_eq!(l, 2.0 * 2f64.ln(), epsilon = 1e-12);
        assert_relative_eq!(l, 1.3863, epsilon = 1e-4);
        let mean = nll_loss(&[perfect, half], &["y1", "y2"], &schema).unwrap();
        assert_relative_eq!(mean, 2f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn loss_errors_and_clamp() {
        let schema = two_mask();
        let none: [MaskDistributions; 0] = [];
        assert_eq!(nll_loss::<&str>(&none, &[], &schema), Err(ScoringError::EmptyBatch));
        let zero = MaskDistributions::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let l = nll_loss(std::slice::from_ref(&zero), &["y1"], &schema).unwrap();
        assert_relative_eq!(l, -PROB_FLOOR.ln(), epsilon = 1e-9);
        assert!(matches!(
            nll_loss(&[zero], &["nope"], &schema),
            Err(ScoringError::UnknownClass(_))
        ));
    }

    #[test]
    fn reversed_classes_use_reversed_view() {
        let mut schema = two_mask();
        schema.verbalizer[1].reversed = true;
        let f = MaskDistributions::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
        let r = MaskDistributions::new(vec![vec![0.1, 0.9], vec![0.2, 0.8]]);
        let s = joint_class_distribution_views(&f, Some(&r), &schema).unwrap();
        assert_relative_eq!(s.scores[0], 0.25);
        assert_relative_eq!(s.scores[1], 0.72);
        assert_eq!(s.predicted, 1);
        assert!(joint_class_distribution_views(&f, None, &schema).is_err());
    }

    #[test]
    fn argmax_prefers_earliest() {
        assert_eq!(argmax_first(&[0.1, 0.3, 0.3]), 1);
        assert_eq!(argmax_first(&[0.2]), 0);
    }
}
