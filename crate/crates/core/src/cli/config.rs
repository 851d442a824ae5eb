use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::mlm::ModelConfig;
use crate::train::{FewShotConfig, PretrainConfig, TrainConfig};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PromptConfig {
    /// Classes whose relations are reversed before compiling.
    #[serde(default)]
    pub reverse: Vec<String>,
}

/// A profile file: every default a subcommand uses.
///
/// ```toml
/// [model]    # d_model, n_layers, n_heads, d_ff, max_len, init_std, layer_norm_eps
/// [train]    # learning_rate, warmup_fraction, weight_decay, epochs, batch_size,
///            # seed, objective = "ptr" | "cls-baseline", negative_class
/// [fewshot]  # ks, seeds
/// [pretrain] # epochs (0 = off), sentences, mask_rate, learning_rate,
///            # batch_size, warmup_fraction, weight_decay
/// [prompt]   # reverse = [class, ...]
/// ```
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub fewshot: FewShotConfig,
    #[serde(default)]
    pub pretrain: PretrainConfig,
    #[serde(default)]
    pub prompt: PromptConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.model.check()?;
        cfg.train.check()?;
        cfg.fewshot.check()?;
        cfg.pretrain.check()?;
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
    }
}
