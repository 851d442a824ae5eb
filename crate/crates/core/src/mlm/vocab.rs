use std::collections::{BTreeSet, HashMap};

use crate::corpus::Dataset;
use crate::dsl::TemplateElement;
use crate::prompt::PromptSchema;

/// Reserved entries and their fixed ids.
pub const PAD: usize = 0;
pub const CLS: usize = 1;
pub const SEP: usize = 2;
pub const MASK: usize = 3;
pub const SUBJ_START: usize = 4;
pub const SUBJ_END: usize = 5;
pub const OBJ_START: usize = 6;
pub const OBJ_END: usize = 7;
pub const RESERVED: [&str; 8] = [
    "[PAD]", "[CLS]", "[SEP]", "[MASK]", "[E1]", "[/E1]", "[E2]", "[/E2]",
];

/// Closed vocabulary: reserved tokens, then every surface word and label
/// phrase in byte order. A multi-word label phrase is a single entry.
///
/// Learnable prompt tokens are not entries; they index a separate table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    entries: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocab {
    pub fn from_entries<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = entries.into_iter().map(Into::into).collect();
        let mut all: Vec<String> = RESERVED.iter().map(|s| s.to_string()).collect();
        all.extend(set);
        Self::from_list(all).expect("reserved prefix present")
    }

    /// Rebuilds a vocabulary from its serialized list (reserved entries first).
    pub fn from_list(entries: Vec<String>) -> Option<Self> {
        if entries.len() < RESERVED.len()
            || entries.iter().zip(RESERVED).any(|(e, r)| e != r)
        {
            return None;
        }
        let mut index = HashMap::with_capacity(entries.len());
        for (i, e) in entries.iter().enumerate().skip(RESERVED.len()) {
            if index.insert(e.clone(), i).is_some() {
                return None;
            }
        }
        Some(Vocab { entries, index })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Id of a non-reserved word or phrase.
    pub fn id(&self, entry: &str) -> Option<usize> {
        self.index.get(entry).copied()
    }

    pub fn entry(&self, id: usize) -> &str {
        &self.entries[id]
    }

    pub fn entries(&self) -> &[String] {
        &self.entries
    }
}

/// Collects vocabulary entries from schemas and datasets.
#[derive(Debug, Default)]
pub struct VocabBuilder {
    entries: BTreeSet<String>,
}

impl VocabBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn schema(mut self, schema: &PromptSchema) -> Self {
        for el in &schema.elements {
            if let TemplateElement::Word { text } = el {
                self.entries.insert(text.clone());
            }
        }
        for vocab in &schema.mask_vocabs {
            self.entries.extend(vocab.iter().cloned());
        }
        self
    }

    pub fn dataset(mut self, dataset: &Dataset) -> Self {
        for inst in &dataset.instances {
            self.entries.extend(inst.tokens.iter().cloned());
        }
        self
    }

    pub fn words<I: IntoIterator<Item = S>, S: Into<String>>(mut self, words: I) -> Self {
        self.entries.extend(words.into_iter().map(Into::into));
        self
    }

    pub fn build(self) -> Vocab {
        Vocab::from_entries(self.entries)
    }
}
