//! Glue from a spec file to a compiled schema, a vocabulary and a model.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::corpus::Dataset;
use crate::dsl::{parse_task_spec_bytes, ParseError, TaskSpec};
use crate::mlm::{MlmError, ModelConfig, TinyMlm, Vocab, VocabBuilder};
use crate::prompt::{compile, reverse_relations, CompileError, PromptSchema, ReverseError};

#[derive(Debug, Error)]
pub enum TaskError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{error}")]
    Parse { path: String, error: ParseError },
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Reverse(#[from] ReverseError),
}

/// A parsed spec and its compiled schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub spec: TaskSpec,
    pub schema: PromptSchema,
}

impl Task {
    pub fn new(spec: TaskSpec) -> Result<Self, TaskError> {
        let schema = compile(&spec)?;
        Ok(Task { spec, schema })
    }

    pub fn from_source(source: &str) -> Result<Self, TaskError> {
        Self::parse(source.as_bytes(), "<input>")
    }

    fn parse(bytes: &[u8], name: &str) -> Result<Self, TaskError> {
        let spec = parse_task_spec_bytes(bytes).map_err(|error| TaskError::Parse {
            path: name.to_string(),
            error,
        })?;
        Self::new(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TaskError> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|source| TaskError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&bytes, &path.display().to_string())
    }

    /// The same task with the given classes' relations reversed.
    pub fn reversed<S: AsRef<str>>(&self, classes: &[S]) -> Result<Self, TaskError> {
        Self::new(reverse_relations(&self.spec, classes)?)
    }

    /// Vocabulary covering the schema and every word of `datasets`.
    pub fn vocab(&self, datasets: &[&Dataset]) -> Vocab {
        datasets
            .iter()
            .fold(VocabBuilder::new().schema(&self.schema), |b, d| b.dataset(d))
            .build()
    }

    /// [`vocab`](Self::vocab) plus extra words, appended in order.
    pub fn vocab_with<I: IntoIterator<Item = String>>(&self, datasets: &[&Dataset], words: I) -> Vocab {
        datasets
            .iter()
            .fold(VocabBuilder::new().schema(&self.schema), |b, d| b.dataset(d))
            .words(words)
            .build()
    }

    /// A freshly initialized model whose `[CLS]` head covers the schema's
    /// classes and whose prompt table covers its learnable tokens.
    pub fn model(&self, config: ModelConfig, vocab: Vocab, seed: u64) -> Result<TinyMlm, MlmError> {
        TinyMlm::new(
            config,
            vocab,
            self.schema.classes.clone(),
            self.schema.learnable.count,
            seed,
        )
    }
}
