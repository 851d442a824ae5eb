use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::adam::{adam_step, AdamState};
use super::sampler::shuffle;
use super::schedule::lr_at;
use super::{Objective, TrainConfig, TrainError};
use crate::corpus::Dataset;
use crate::eval::micro_f1;
use crate::mlm::{Example, TinyMlm};
use crate::prompt::PromptSchema;
use crate::scoring::{baseline_example, baseline_predict, mask_candidates, predict, prompt_example};

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// 0-based optimizer step; the learning rate is `lr_at(step)`.
    pub step: usize,
    pub epoch: usize,
    pub lr: f64,
    /// Mean loss of the batch before the update.
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub mean_loss: f64,
    pub dev_f1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct History {
    pub steps: Vec<StepRecord>,
    pub epochs: Vec<EpochRecord>,
}

impl History {
    /// `step,lr,loss` with shortest round-trip float formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,lr,loss\n");
        for s in &self.steps {
            out.push_str(&format!("{},{},{}\n", s.step, s.lr, s.loss));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// The checkpoint with the best dev F1 (earliest epoch on ties), or the
    /// last one when there is no dev set.
    pub model: TinyMlm,
    pub history: History,
    pub best_epoch: Option<usize>,
    pub best_dev_f1: Option<f64>,
    /// Set when the dev set was empty and the last checkpoint was returned.
    pub dev_empty: bool,
}

/// Encodes every instance for the given objective.
pub fn encode_examples(
    model: &TinyMlm,
    schema: &PromptSchema,
    dataset: &Dataset,
    objective: Objective,
) -> Result<Vec<Example>, TrainError> {
    let candidates = mask_candidates(model, schema)?;
    dataset
        .instances
        .iter()
        .map(|inst| {
            Ok(match objective {
                Objective::Ptr => prompt_example(model, schema, &candidates, inst)?,
                Objective::ClsBaseline => baseline_example(model, inst)?,
            })
        })
        .collect()
}

/// Predictions for every instance, in dataset order. Instances are scored in
/// parallel; the result does not depend on the thread count.
pub fn predict_all(
    model: &TinyMlm,
    schema: &PromptSchema,
    dataset: &Dataset,
    objective: Objective,
) -> Result<Vec<String>, TrainError> {
    dataset
        .instances
        .par_iter()
        .map(|inst| {
            Ok(match objective {
                Objective::Ptr => predict(model, schema, inst)?,
                Objective::ClsBaseline => baseline_predict(model, inst)?,
            })
        })
        .collect()
}

fn dev_f1(model: &TinyMlm, schema: &PromptSchema, dev: &Dataset, cfg: &TrainConfig) -> Result<f64, TrainError> {
    let preds = predict_all(model, schema, dev, cfg.objective)?;
    Ok(micro_f1(&preds, &dev.labels(), cfg.negative_class.as_deref())?.micro_f1)
}

/// Trains a copy of `model`. Each epoch visits the training set in a fresh
/// order drawn from `cfg.seed`, in batches of `cfg.batch_size` (the last may
/// be smaller), then scores the dev set.
pub fn train(
    model: &TinyMlm,
    schema: &PromptSchema,
    train_set: &Dataset,
    dev_set: &Dataset,
    cfg: &TrainConfig,
) -> Result<TrainOutcome, TrainError> {
    cfg.check().map_err(TrainError::Config)?;
    let dev_empty = dev_set.is_empty();
    if cfg.epochs == 0 {
        return Ok(TrainOutcome {
            model: model.clone(),
            history: History::default(),
            best_epoch: None,
            best_dev_f1: None,
            dev_empty,
        });
    }
    if train_set.is_empty() {
        return Err(TrainError::EmptyTrain);
    }
    let examples = encode_examples(model, schema, train_set, cfg.objective)?;
    let n = examples.len();
    let total = cfg.epochs * n.div_ceil(cfg.batch_size);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut current = model.clone();
    let mut state = AdamState::new(&current.params);
    let mut history = History::default();
    let mut best: Option<(TinyMlm, f64, usize)> = None;
    let mut step = 0;
    for epoch in 0..cfg.epochs {
        let mut order: Vec<usize> = (0..n).collect();
        shuffle(&mut order, &mut rng);
        let mut epoch_loss = 0.0;
        let mut batches = 0;
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<Example> = chunk.iter().map(|&i| examples[i].clone()).collect();
            let (loss, grads) = current.loss_and_gradients(&batch)?;
            let lr = lr_at(step, total, cfg);
            adam_step(&mut current.params, &grads, &mut state, lr, cfg.weight_decay)?;
            history.steps.push(StepRecord { step, epoch, lr, loss });
            epoch_loss += loss;
            batches += 1;
            step += 1;
        }
        let f1 = if dev_empty {
            None
        } else {
            Some(dev_f1(&current, schema, dev_set, cfg)?)
        };
        history.epochs.push(EpochRecord {
            epoch,
            mean_loss: epoch_loss / batches as f64,
            dev_f1: f1,
        });
        if let Some(f1) = f1 {
            if best.as_ref().is_none_or(|b| f1 > b.1) {
                best = Some((current.clone(), f1, epoch));
            }
        }
    }
    Ok(match best {
        Some((model, f1, epoch)) => TrainOutcome {
            model,
            history,
            best_epoch: Some(epoch),
            best_dev_f1: Some(f1),
            dev_empty,
        },
        None => TrainOutcome {
            model: current,
            history,
            best_epoch: None,
            best_dev_f1: None,
            dev_empty,
        },
    })
}
