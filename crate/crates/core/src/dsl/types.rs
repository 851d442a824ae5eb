use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Entity role an argument of a predicate is bound to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Subj,
    Obj,
}

impl Role {
    pub fn swapped(self) -> Role {
        match self {
            Role::Subj => Role::Obj,
            Role::Obj => Role::Subj,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Subj => "subj",
            Role::Obj => "obj",
        }
    }
}

/// One position of a (sub-)prompt template.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TemplateElement {
    /// A literal surface word.
    Word { text: String },
    /// Placeholder for the surface tokens of the subject or object entity.
    Entity { role: Role },
    /// A slot to be filled by one label phrase.
    Mask,
    /// A prompt token with a trainable embedding and no surface form.
    Learnable { index: usize },
    /// Placeholder for the full input sentence.
    Text,
}

impl TemplateElement {
    pub fn word(text: impl Into<String>) -> Self {
        TemplateElement::Word { text: text.into() }
    }

    pub fn entity(role: Role) -> Self {
        TemplateElement::Entity { role }
    }
}

impl fmt::Display for TemplateElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemplateElement::Word { text } => f.write_str(text),
            TemplateElement::Entity { role } => write!(f, "<{}>", role.as_str()),
            TemplateElement::Mask => f.write_str("[MASK]"),
            TemplateElement::Learnable { index } => write!(f, "[L{index}]"),
            TemplateElement::Text => f.write_str("<text>"),
        }
    }
}

/// Formats a template the way it is written in a `.ptr` file (unquoted).
pub fn display_template(elements: &[TemplateElement]) -> String {
    elements
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

/// A conditional function with its sub-prompt: a template holding exactly one
/// mask and the set of label phrases that may fill it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Predicate {
    pub name: String,
    pub arity: usize,
    /// Entity roles in order of first appearance in the template.
    pub slots: Vec<Role>,
    pub template: Vec<TemplateElement>,
    /// Label phrases; each one is an atomic unit filling the mask.
    pub label_words: Vec<String>,
}

impl Predicate {
    /// Builds a predicate, deriving `slots` and `arity` from the template.
    pub fn new(
        name: impl Into<String>,
        template: Vec<TemplateElement>,
        label_words: Vec<String>,
    ) -> Self {
        let slots = entity_slots(&template);
        Predicate {
            name: name.into(),
            arity: slots.len(),
            slots,
            template,
            label_words,
        }
    }

    pub fn has_label(&self, phrase: &str) -> bool {
        self.label_words.iter().any(|w| w == phrase)
    }
}

pub(crate) fn entity_slots(template: &[TemplateElement]) -> Vec<Role> {
    let mut slots = Vec::new();
    for el in template {
        if let TemplateElement::Entity { role } = el {
            if !slots.contains(role) {
                slots.push(*role);
            }
        }
    }
    slots
}

/// One `predicate(phrase)` term of a rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Conjunct {
    pub predicate: String,
    pub phrase: String,
}

impl Conjunct {
    pub fn new(predicate: impl Into<String>, phrase: impl Into<String>) -> Self {
        Conjunct {
            predicate: predicate.into(),
            phrase: phrase.into(),
        }
    }
}

/// Conjunction of predicate assignments implying one class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub class_label: String,
    pub conjuncts: Vec<Conjunct>,
    /// Subject and object roles are swapped when this class is prompted.
    pub reversed: bool,
}

impl Rule {
    pub fn new(class_label: impl Into<String>, conjuncts: Vec<Conjunct>) -> Self {
        Rule {
            class_label: class_label.into(),
            conjuncts,
            reversed: false,
        }
    }

    pub fn predicate_order(&self) -> Vec<&str> {
        self.conjuncts.iter().map(|c| c.predicate.as_str()).collect()
    }
}

/// 1-based source location.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Where each declaration came from. Empty for specs built in code.
#[derive(Debug, Clone, Default)]
pub struct SourceMap {
    pub predicates: BTreeMap<String, Pos>,
    pub classes: BTreeMap<String, Pos>,
    pub rules: BTreeMap<String, Pos>,
}

/// A parsed task: predicates, classes and one rule per class.
///
/// Equality ignores source positions, so a spec compares equal to the result
/// of parsing its canonical printout.
#[derive(Debug, Clone, Default)]
pub struct TaskSpec {
    /// Predicates in declaration order.
    pub predicates: Vec<Predicate>,
    pub classes: Vec<String>,
    /// Rules in declaration order.
    pub rules: Vec<Rule>,
    /// Predicate order of the first rule; every rule must share it.
    pub composition_order: Vec<String>,
    pub source: SourceMap,
}

impl PartialEq for TaskSpec {
    fn eq(&self, other: &Self) -> bool {
        self.predicates == other.predicates
            && self.classes == other.classes
            && self.rules == other.rules
            && self.composition_order == other.composition_order
    }
}

impl Eq for TaskSpec {}

impl TaskSpec {
    /// Assembles a spec and derives `composition_order` from the first rule.
    pub fn new(predicates: Vec<Predicate>, classes: Vec<String>, rules: Vec<Rule>) -> Self {
        let composition_order = rules
            .first()
            .map(|r| r.conjuncts.iter().map(|c| c.predicate.clone()).collect())
            .unwrap_or_default();
        TaskSpec {
            predicates,
            classes,
            rules,
            composition_order,
            source: SourceMap::default(),
        }
    }

    pub fn predicate(&self, name: &str) -> Option<&Predicate> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn rule(&self, class_label: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.class_label == class_label)
    }

    pub fn class_index(&self, class_label: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == class_label)
    }
}
