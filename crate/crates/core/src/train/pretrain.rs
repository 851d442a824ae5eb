//! Masked-word pretraining on unlabeled sentences.
//!
//! Each epoch re-draws the masked positions: every token of a framed
//! sentence is masked independently with probability `mask_rate` (at least
//! one per sentence), and the model predicts the original word over every
//! single-word vocabulary entry. Multi-word label phrases are not
//! candidates; [`TinyMlm::init_phrases_from_words`] can seed them from the
//! pretrained word embeddings afterwards.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamState};
use super::fit::{History, StepRecord, EpochRecord};
use super::sampler::shuffle;
use super::schedule::lr_at;
use super::{TrainConfig, TrainError};
use crate::mlm::{vocab, EncodedInput, Example, InputToken, MlmError, Target, TinyMlm};

fn default_epochs() -> usize {
    0
}
fn default_sentences() -> usize {
    4000
}
fn default_mask_rate() -> f64 {
    0.15
}
fn default_lr() -> f64 {
    1e-3
}
fn default_batch() -> usize {
    16
}
fn default_warmup() -> f64 {
    0.1
}
fn default_wd() -> f64 {
    1e-2
}

/// Settings for masked-word pretraining. Zero epochs disables it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PretrainConfig {
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    /// Sentences of synthetic text to draw when the caller generates the
    /// pretraining text from a spec.
    #[serde(default = "default_sentences")]
    pub sentences: usize,
    #[serde(default = "default_mask_rate")]
    pub mask_rate: f64,
    #[serde(default = "default_lr")]
    pub learning_rate: f64,
    #[serde(default = "default_batch")]
    pub batch_size: usize,
    #[serde(default = "default_warmup")]
    pub warmup_fraction: f64,
    #[serde(default = "default_wd")]
    pub weight_decay: f64,
}

impl Default for PretrainConfig {
    fn default() -> Self {
        PretrainConfig {
            epochs: default_epochs(),
            sentences: default_sentences(),
            mask_rate: default_mask_rate(),
            learning_rate: default_lr(),
            batch_size: default_batch(),
            warmup_fraction: default_warmup(),
            weight_decay: default_wd(),
        }
    }
}

impl PretrainConfig {
    fn schedule(&self) -> TrainConfig {
        TrainConfig {
            learning_rate: self.learning_rate,
            warmup_fraction: self.warmup_fraction,
            weight_decay: self.weight_decay,
            epochs: self.epochs,
            batch_size: self.batch_size,
            ..TrainConfig::default()
        }
    }

    pub fn check(&self) -> Result<(), String> {
        if !(self.mask_rate > 0.0 && self.mask_rate <= 1.0) {
            return Err(format!("mask_rate must be in (0, 1], got {}", self.mask_rate));
        }
        self.schedule().check()
    }
}

/// Ids of every single-word, non-reserved vocabulary entry.
pub fn word_candidates(model: &TinyMlm) -> Vec<usize> {
    (vocab::RESERVED.len()..model.vocab.len())
        .filter(|&id| !model.vocab.entry(id).contains(' '))
        .collect()
}

fn masked_example<R: Rng>(
    model: &TinyMlm,
    sentence: &[String],
    candidates: &[usize],
    mask_rate: f64,
    rng: &mut R,
) -> Result<Example, MlmError> {
    let mut ids = Vec::with_capacity(sentence.len());
    for w in sentence {
        let id = model
            .vocab
            .id(w)
            .ok_or_else(|| MlmError::OutOfVocabulary(w.clone()))?;
        let k = candidates
            .binary_search(&id)
            .map_err(|_| MlmError::OutOfVocabulary(w.clone()))?;
        ids.push((id, k));
    }
    let mut masked: Vec<bool> = (0..ids.len()).map(|_| rng.random::<f64>() < mask_rate).collect();
    if !masked.iter().any(|&m| m) {
        let i = rng.random_range(0..ids.len() as u64) as usize;
        masked[i] = true;
    }
    let mut tokens = vec![InputToken::Vocab(vocab::CLS)];
    let mut positions = Vec::new();
    let mut gold = Vec::new();
    for (i, &(id, k)) in ids.iter().enumerate() {
        if masked[i] {
            tokens.push(InputToken::Vocab(vocab::MASK));
            positions.push(i + 1);
            gold.push(k);
        } else {
            tokens.push(InputToken::Vocab(id));
        }
    }
    tokens.push(InputToken::Vocab(vocab::SEP));
    Ok(Example {
        input: EncodedInput {
            tokens,
            mask_positions: positions,
        },
        target: Target::Masks {
            candidates: vec![candidates.to_vec(); gold.len()],
            gold,
        },
    })
}

/// Pretrains a copy of `model` on `sentences`. Deterministic given `seed`.
pub fn pretrain(
    model: &TinyMlm,
    sentences: &[Vec<String>],
    cfg: &PretrainConfig,
    seed: u64,
) -> Result<(TinyMlm, History), TrainError> {
    cfg.check().map_err(TrainError::Config)?;
    let mut current = model.clone();
    let mut history = History::default();
    let sentences: Vec<&Vec<String>> = sentences.iter().filter(|s| !s.is_empty()).collect();
    if cfg.epochs == 0 || sentences.is_empty() {
        return Ok((current, history));
    }
    let candidates = word_candidates(model);
    let schedule = cfg.schedule();
    let n = sentences.len();
    let total = cfg.epochs * n.div_ceil(cfg.batch_size);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = AdamState::new(&current.params);
    let mut step = 0;
    for epoch in 0..cfg.epochs {
        let mut order: Vec<usize> = (0..n).collect();
        shuffle(&mut order, &mut rng);
        let mut epoch_loss = 0.0;
        let mut batches = 0;
        for chunk in order.chunks(cfg.batch_size) {
            let batch = chunk
                .iter()
                .map(|&i| masked_example(&current, sentences[i], &candidates, cfg.mask_rate, &mut rng))
                .collect::<Result<Vec<_>, _>>()?;
            let (loss, grads) = current.loss_and_gradients(&batch)?;
            let lr = lr_at(step, total, &schedule);
            adam_step(&mut current.params, &grads, &mut state, lr, cfg.weight_decay)?;
            history.steps.push(StepRecord { step, epoch, lr, loss });
            epoch_loss += loss;
            batches += 1;
            step += 1;
        }
        history.epochs.push(EpochRecord {
            epoch,
            mean_loss: epoch_loss / batches as f64,
            dev_f1: None,
        });
    }
    Ok((current, history))
}
