//! Instances, datasets, TACRED-style JSONL files and the synthetic corpus
//! generator.

mod instance;
mod jsonl;
mod synthetic;

pub use instance::{Dataset, Instance, InstanceError, Span};
pub use jsonl::{load_jsonl, parse_jsonl, to_jsonl, write_jsonl, CorpusError};
pub use synthetic::{class_profiles, entity_names, generate_synthetic, pretraining_text, synthetic_vocabulary, ClassProfile};
