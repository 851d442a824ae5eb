//! Adam with linear warmup and decay, the training loop with dev-based
//! checkpoint selection, and few-shot sampling.

mod adam;
mod config;
mod fit;
mod pretrain;
mod sampler;
mod schedule;

use thiserror::Error;

use crate::eval::EvalError;
use crate::mlm::MlmError;
use crate::scoring::ScoringError;

pub use adam::{adam_step, adam_update, AdamState, BETA1, BETA2, EPSILON};
pub use config::{FewShotConfig, Objective, TrainConfig};
pub use fit::{encode_examples, predict_all, train, EpochRecord, History, StepRecord, TrainOutcome};
pub use pretrain::{pretrain, word_candidates, PretrainConfig};
pub use sampler::{few_shot_sample, few_shot_split, partial_shuffle, shuffle, FewShotSample};
pub use schedule::{lr_at, warmup_steps};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid training config: {0}")]
    Config(String),
    #[error("empty training set")]
    EmptyTrain,
    #[error("non-finite gradient in {tensor}")]
    NonFiniteGradient { tensor: String },
    #[error(transparent)]
    Scoring(#[from] ScoringError),
    #[error(transparent)]
    Model(#[from] MlmError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl TrainError {
    /// True for failures of the arithmetic rather than of the inputs.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            TrainError::NonFiniteGradient { .. }
                | TrainError::Model(MlmError::NonFiniteLoss { .. })
                | TrainError::Scoring(ScoringError::Model(MlmError::NonFiniteLoss { .. }))
        )
    }
}
