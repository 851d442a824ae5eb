use serde::{Deserialize, Serialize};

fn default_d_model() -> usize {
    64
}
fn default_n_layers() -> usize {
    2
}
fn default_n_heads() -> usize {
    4
}
fn default_d_ff() -> usize {
    256
}
fn default_max_len() -> usize {
    64
}
fn default_init_std() -> f64 {
    0.02
}
fn default_ln_eps() -> f64 {
    1e-5
}

/// Shape and initialization of the encoder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default = "default_d_model")]
    pub d_model: usize,
    #[serde(default = "default_n_layers")]
    pub n_layers: usize,
    #[serde(default = "default_n_heads")]
    pub n_heads: usize,
    #[serde(default = "default_d_ff")]
    pub d_ff: usize,
    #[serde(default = "default_max_len")]
    pub max_len: usize,
    /// Std of the zero-mean Gaussian used for every weight matrix and embedding.
    #[serde(default = "default_init_std")]
    pub init_std: f64,
    #[serde(default = "default_ln_eps")]
    pub layer_norm_eps: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            d_model: default_d_model(),
            n_layers: default_n_layers(),
            n_heads: default_n_heads(),
            d_ff: default_d_ff(),
            max_len: default_max_len(),
            init_std: default_init_std(),
            layer_norm_eps: default_ln_eps(),
        }
    }
}

impl ModelConfig {
    pub fn check(&self) -> Result<(), String> {
        if self.d_model == 0 || self.n_heads == 0 || self.d_ff == 0 || self.max_len < 3 {
            return Err("d_model, n_heads and d_ff must be positive and max_len at least 3".into());
        }
        if !self.d_model.is_multiple_of(self.n_heads) {
            return Err(format!(
                "d_model {} is not divisible by n_heads {}",
                self.d_model, self.n_heads
            ));
        }
        if !(self.init_std.is_finite() && self.init_std >= 0.0) {
            return Err("init_std must be finite and non-negative".into());
        }
        if !(self.layer_norm_eps.is_finite() && self.layer_norm_eps > 0.0) {
            return Err("layer_norm_eps must be positive".into());
        }
        Ok(())
    }

    pub fn head_dim(&self) -> usize {
        self.d_model / self.n_heads
    }

    /// Closed-form parameter count for a vocabulary of `vocab` entries,
    /// `classes` baseline classes and `learnable` prompt tokens.
    pub fn param_count(&self, vocab: usize, classes: usize, learnable: usize) -> usize {
        let d = self.d_model;
        let ff = self.d_ff;
        let per_layer = 4 * (d * d + d) // q, k, v, output projections
            + 2 * 2 * d                  // two layer norms
            + (d * ff + ff)              // expansion
            + (ff * d + d); // contraction
        vocab * d + self.max_len * d + learnable * d + self.n_layers * per_layer + 2 * d + classes * d + classes
    }
}
