//! A desk-scale masked language model written from scratch.
//!
//! Pre-norm transformer encoder over a closed whitespace vocabulary, with
//! mask heads tied to the token embeddings, a `[CLS]` classification head
//! for the fine-tuning baseline, and hand-written reverse-mode gradients.
//!
//! Loading weights from an external pretrained transformer is not
//! supported. That adapter would map multi-word label phrases onto subword
//! pieces, which this model sidesteps by giving each phrase its own row.

pub mod checkpoint;
mod config;
mod gradcheck;
mod model;
mod params;
pub mod vocab;

pub use config::ModelConfig;
pub use gradcheck::{check_gradients, relative_error, CoordCheck, GradCheckReport};
pub use model::{softmax, EncodedInput, Example, InputToken, MlmError, Target, TinyMlm, PROB_FLOOR};
pub use params::{LayerParams, Params, TensorInfo};
pub use vocab::{Vocab, VocabBuilder};
