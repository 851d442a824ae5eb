use serde::{Deserialize, Serialize};

/// Half-open token range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn shifted(&self, by: usize) -> Span {
        Span::new(self.start + by, self.end + by)
    }
}

/// Problems with the shape of an instance.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("empty input")]
    EmptyInput,
    #[error("{role} span {start}..{end} is empty")]
    EmptySpan {
        role: &'static str,
        start: usize,
        end: usize,
    },
    #[error("{role} span {start}..{end} is out of bounds for {len} tokens")]
    SpanOutOfBounds {
        role: &'static str,
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("subject and object spans overlap")]
    OverlappingSpans,
}

/// A sentence with marked subject and object entities and a gold class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub id: String,
    pub tokens: Vec<String>,
    pub subj: Span,
    pub obj: Span,
    pub label: String,
}

impl Instance {
    pub fn new(
        id: impl Into<String>,
        tokens: Vec<String>,
        subj: Span,
        obj: Span,
        label: impl Into<String>,
    ) -> Self {
        Instance {
            id: id.into(),
            tokens,
            subj,
            obj,
            label: label.into(),
        }
    }

    /// Builds an instance from a whitespace-separated sentence.
    pub fn from_text(
        id: impl Into<String>,
        text: &str,
        subj: Span,
        obj: Span,
        label: impl Into<String>,
    ) -> Self {
        Instance::new(
            id,
            text.split_whitespace().map(str::to_string).collect(),
            subj,
            obj,
            label,
        )
    }

    pub fn subj_tokens(&self) -> &[String] {
        &self.tokens[self.subj.start..self.subj.end]
    }

    pub fn obj_tokens(&self) -> &[String] {
        &self.tokens[self.obj.start..self.obj.end]
    }

    pub fn check(&self) -> Result<(), InstanceError> {
        if self.tokens.is_empty() {
            return Err(InstanceError::EmptyInput);
        }
        for (role, span) in [("subject", self.subj), ("object", self.obj)] {
            if span.is_empty() {
                return Err(InstanceError::EmptySpan {
                    role,
                    start: span.start,
                    end: span.end,
                });
            }
            if span.end > self.tokens.len() {
                return Err(InstanceError::SpanOutOfBounds {
                    role,
                    start: span.start,
                    end: span.end,
                    len: self.tokens.len(),
                });
            }
        }
        if self.subj.overlaps(&self.obj) {
            return Err(InstanceError::OverlappingSpans);
        }
        Ok(())
    }
}

/// A labelled split with its class inventory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub split: String,
    pub classes: Vec<String>,
    pub instances: Vec<Instance>,
}

impl Dataset {
    /// Builds a dataset whose class inventory is the labels in first-seen order.
    pub fn from_instances(split: impl Into<String>, instances: Vec<Instance>) -> Self {
        let mut classes: Vec<String> = Vec::new();
        for inst in &instances {
            if !classes.contains(&inst.label) {
                classes.push(inst.label.clone());
            }
        }
        Dataset {
            split: split.into(),
            classes,
            instances,
        }
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.instances.iter().map(|i| i.label.as_str()).collect()
    }
}
