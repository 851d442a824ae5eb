use serde::{Deserialize, Serialize};

/// Which head and loss a run trains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// Joint per-mask log-likelihood of the gold label phrases.
    Ptr,
    /// Cross-entropy of the `[CLS]` head over entity-marked input.
    ClsBaseline,
}

impl Objective {
    pub fn display_name(self) -> &'static str {
        match self {
            Objective::Ptr => "PTR",
            Objective::ClsBaseline => "CLS-head",
        }
    }
}

fn default_lr() -> f64 {
    1e-3
}
fn default_warmup() -> f64 {
    0.1
}
fn default_wd() -> f64 {
    1e-2
}
fn default_epochs() -> usize {
    5
}
fn default_batch() -> usize {
    16
}
fn default_objective() -> Objective {
    Objective::Ptr
}

/// Optimizer schedule and loop settings. Defaults are the desk profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    #[serde(default = "default_lr")]
    pub learning_rate: f64,
    #[serde(default = "default_warmup")]
    pub warmup_fraction: f64,
    #[serde(default = "default_wd")]
    pub weight_decay: f64,
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    #[serde(default = "default_batch")]
    pub batch_size: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_objective")]
    pub objective: Objective,
    /// Class left out of the dev F1 used for checkpoint selection.
    #[serde(default)]
    pub negative_class: Option<String>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: default_lr(),
            warmup_fraction: default_warmup(),
            weight_decay: default_wd(),
            epochs: default_epochs(),
            batch_size: default_batch(),
            seed: 0,
            objective: default_objective(),
            negative_class: None,
        }
    }
}

impl TrainConfig {
    /// The large-model schedule: lr 3e-5, batch 64.
    pub fn full_scale() -> Self {
        TrainConfig {
            learning_rate: 3e-5,
            batch_size: 64,
            ..TrainConfig::default()
        }
    }

    pub fn check(&self) -> Result<(), String> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        if !(0.0..1.0).contains(&self.warmup_fraction) {
            return Err(format!("warmup_fraction must be in [0, 1), got {}", self.warmup_fraction));
        }
        if !(self.weight_decay.is_finite() && self.weight_decay >= 0.0) {
            return Err(format!("weight_decay must be non-negative, got {}", self.weight_decay));
        }
        if self.batch_size == 0 {
            return Err("batch_size must be positive".into());
        }
        Ok(())
    }
}

fn default_ks() -> Vec<usize> {
    vec![8, 16, 32]
}

fn default_seeds() -> Vec<u64> {
    vec![13, 21, 42, 87, 100]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FewShotConfig {
    /// Instances per class drawn for training and, separately, for dev.
    #[serde(default = "default_ks")]
    pub ks: Vec<usize>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
}

impl Default for FewShotConfig {
    fn default() -> Self {
        FewShotConfig {
            ks: default_ks(),
            seeds: default_seeds(),
        }
    }
}

impl FewShotConfig {
    pub fn check(&self) -> Result<(), String> {
        if self.ks.contains(&0) {
            return Err("every K must be at least 1".into());
        }
        if self.seeds.is_empty() {
            return Err("seeds must not be empty".into());
        }
        Ok(())
    }
}
