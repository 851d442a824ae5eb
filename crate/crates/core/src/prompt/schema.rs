use serde::{Deserialize, Serialize};

use crate::dsl::{display_template, TemplateElement};

/// Which way subject and object are bound in the prompt for a class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Forward,
    Reversed,
}

impl Orientation {
    pub fn of(reversed: bool) -> Self {
        if reversed {
            Orientation::Reversed
        } else {
            Orientation::Forward
        }
    }
}

/// Per-class verbalizer tuple: one index into each mask vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerbalizerEntry {
    pub class: String,
    pub phrases: Vec<usize>,
    pub reversed: bool,
}

impl VerbalizerEntry {
    pub fn orientation(&self) -> Orientation {
        Orientation::of(self.reversed)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearnableSlots {
    /// Number of distinct learnable embeddings (highest index + 1).
    pub count: usize,
    /// Element indices of learnable tokens in `elements`.
    pub positions: Vec<usize>,
}

/// A compiled task prompt.
///
/// Serialized field order is part of the file format:
/// `format`, `version`, `classes`, `elements`, `n_masks`, `mask_vocabs`,
/// `verbalizer`, `learnable`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptSchema {
    pub format: String,
    pub version: u32,
    pub classes: Vec<String>,
    /// Full template in forward orientation.
    pub elements: Vec<TemplateElement>,
    pub n_masks: usize,
    /// Candidate phrases for each mask position, in first-seen order.
    pub mask_vocabs: Vec<Vec<String>>,
    /// One entry per class, in class order.
    pub verbalizer: Vec<VerbalizerEntry>,
    pub learnable: LearnableSlots,
}

pub const SCHEMA_FORMAT: &str = "ptr-schema";
pub const SCHEMA_VERSION: u32 = 1;

impl PromptSchema {
    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_index(&self, class: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == class)
    }

    pub fn phrase(&self, position: usize, index: usize) -> &str {
        &self.mask_vocabs[position][index]
    }

    /// Label phrases of a class, one per mask.
    pub fn class_phrases(&self, class: usize) -> Vec<&str> {
        self.verbalizer[class]
            .phrases
            .iter()
            .enumerate()
            .map(|(j, &k)| self.phrase(j, k))
            .collect()
    }

    /// Orientations used by at least one class, forward first.
    pub fn orientations(&self) -> Vec<Orientation> {
        let mut out = Vec::new();
        for o in [Orientation::Forward, Orientation::Reversed] {
            if self.verbalizer.iter().any(|v| v.orientation() == o) {
                out.push(o);
            }
        }
        out
    }

    /// Orientation used by [`render`](super::render): forward unless every class is reversed.
    pub fn default_orientation(&self) -> Orientation {
        if !self.verbalizer.is_empty() && self.verbalizer.iter().all(|v| v.reversed) {
            Orientation::Reversed
        } else {
            Orientation::Forward
        }
    }

    /// Template with entity roles swapped as seen by reversed classes.
    pub fn oriented_elements(&self, orientation: Orientation) -> Vec<TemplateElement> {
        match orientation {
            Orientation::Forward => self.elements.clone(),
            Orientation::Reversed => self
                .elements
                .iter()
                .map(|e| match e {
                    TemplateElement::Entity { role } => TemplateElement::entity(role.swapped()),
                    other => other.clone(),
                })
                .collect(),
        }
    }

    pub fn template_string(&self) -> String {
        display_template(&self.elements)
    }

    /// Every label phrase across all positions, deduplicated in first-seen order.
    pub fn all_phrases(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for vocab in &self.mask_vocabs {
            for p in vocab {
                if !out.contains(&p.as_str()) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Canonical JSON form (pretty, two-space indent, trailing newline).
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("schema serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
