use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use super::types::{entity_slots, Pos, TaskSpec, TemplateElement};

/// What a finding is about. Tests and callers match on these rather than
/// on message text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FindingCode {
    EmptyTask,
    InvalidPredicateName,
    DuplicatePredicate,
    MaskCount,
    ArityMismatch,
    UnsupportedArity,
    EmptyLiteral,
    EmptyLabels,
    DuplicateLabel,
    DuplicateClass,
    ClassWithoutRule,
    RuleForUndeclaredClass,
    DuplicateRule,
    UndeclaredPredicate,
    UndeclaredPhrase,
    RepeatedPredicateInRule,
    InconsistentCompositionOrder,
    ReversedWithoutBinary,
    NonInjectiveVerbalizer,
    // warnings
    PhraseInSeveralPositions,
    UnusedPredicate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub code: FindingCode,
    pub message: String,
    pub pos: Option<Pos>,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pos {
            Some(pos) => write!(f, "{pos}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub errors: Vec<Finding>,
    pub warnings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn has(&self, code: FindingCode) -> bool {
        self.errors
            .iter()
            .chain(&self.warnings)
            .any(|f| f.code == code)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.errors {
            writeln!(f, "error: {e}")?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

struct Collector<'a> {
    spec: &'a TaskSpec,
    report: ValidationReport,
}

impl Collector<'_> {
    fn error(&mut self, code: FindingCode, pos: Option<Pos>, message: String) {
        self.report.errors.push(Finding { code, message, pos });
    }

    fn warn(&mut self, code: FindingCode, pos: Option<Pos>, message: String) {
        self.report.warnings.push(Finding { code, message, pos });
    }

    fn pred_pos(&self, name: &str) -> Option<Pos> {
        self.spec.source.predicates.get(name).copied()
    }

    fn class_pos(&self, name: &str) -> Option<Pos> {
        self.spec.source.classes.get(name).copied()
    }

    fn rule_pos(&self, name: &str) -> Option<Pos> {
        self.spec.source.rules.get(name).copied()
    }
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Checks every invariant of a task spec.
///
/// Never fails; all findings go into the returned report. Errors make the
/// spec uncompilable, warnings do not.
pub fn validate(spec: &TaskSpec) -> ValidationReport {
    let mut c = Collector {
        spec,
        report: ValidationReport::default(),
    };

    if spec.classes.is_empty() {
        c.error(FindingCode::EmptyTask, None, "task declares no classes".into());
    }

    let mut seen_preds = HashSet::new();
    for p in &spec.predicates {
        let pos = c.pred_pos(&p.name);
        if !is_identifier(&p.name) {
            c.error(
                FindingCode::InvalidPredicateName,
                pos,
                format!("predicate name `{}` is not an identifier", p.name),
            );
        }
        if !seen_preds.insert(p.name.as_str()) {
            c.error(
                FindingCode::DuplicatePredicate,
                pos,
                format!("duplicate predicate `{}`", p.name),
            );
        }
        let masks = p
            .template
            .iter()
            .filter(|e| matches!(e, TemplateElement::Mask))
            .count();
        if masks != 1 {
            c.error(
                FindingCode::MaskCount,
                pos,
                format!("predicate `{}` has {masks} mask slots, expected exactly 1", p.name),
            );
        }
        let slots = entity_slots(&p.template);
        if p.arity != slots.len() || p.slots != slots {
            c.error(
                FindingCode::ArityMismatch,
                pos,
                format!(
                    "predicate `{}` declares arity {} but its template binds {} entity role(s)",
                    p.name,
                    p.arity,
                    slots.len()
                ),
            );
        }
        if !(1..=2).contains(&slots.len()) {
            c.error(
                FindingCode::UnsupportedArity,
                pos,
                format!("predicate `{}` must mention the subject, the object, or both", p.name),
            );
        }
        for el in &p.template {
            if let TemplateElement::Word { text } = el {
                if text.trim().is_empty() || text.chars().any(char::is_whitespace) {
                    c.error(
                        FindingCode::EmptyLiteral,
                        pos,
                        format!("predicate `{}` has a literal `{text}` that is not one word", p.name),
                    );
                }
            }
        }
        if p.label_words.is_empty() {
            c.error(
                FindingCode::EmptyLabels,
                pos,
                format!("predicate `{}` has no label words", p.name),
            );
        }
        let mut seen = HashSet::new();
        for l in &p.label_words {
            if !seen.insert(l.as_str()) {
                c.error(
                    FindingCode::DuplicateLabel,
                    pos,
                    format!("predicate `{}` lists label `{l}` twice", p.name),
                );
            }
        }
    }

    let mut seen_classes = HashSet::new();
    for class in &spec.classes {
        if !seen_classes.insert(class.as_str()) {
            c.error(
                FindingCode::DuplicateClass,
                c.class_pos(class),
                format!("duplicate class `{class}`"),
            );
        }
    }

    let mut rules_per_class: HashMap<&str, usize> = HashMap::new();
    for r in &spec.rules {
        *rules_per_class.entry(r.class_label.as_str()).or_default() += 1;
    }
    for class in &spec.classes {
        match rules_per_class.get(class.as_str()).copied().unwrap_or(0) {
            0 => c.error(
                FindingCode::ClassWithoutRule,
                c.class_pos(class),
                format!("class without rule: `{class}`"),
            ),
            1 => {}
            n => c.error(
                FindingCode::DuplicateRule,
                c.rule_pos(class),
                format!("class `{class}` has {n} rules"),
            ),
        }
    }

    let expected_order: Vec<&str> = spec.composition_order.iter().map(String::as_str).collect();
    let mut used_preds = HashSet::new();
    for r in &spec.rules {
        let pos = c.rule_pos(&r.class_label);
        if !seen_classes.contains(r.class_label.as_str()) {
            c.error(
                FindingCode::RuleForUndeclaredClass,
                pos,
                format!("rule for undeclared class `{}`", r.class_label),
            );
        }
        let mut in_rule = HashSet::new();
        let mut has_binary = false;
        for conj in &r.conjuncts {
            used_preds.insert(conj.predicate.as_str());
            if !in_rule.insert(conj.predicate.as_str()) {
                c.error(
                    FindingCode::RepeatedPredicateInRule,
                    pos,
                    format!(
                        "rule for `{}` uses predicate `{}` more than once",
                        r.class_label, conj.predicate
                    ),
                );
            }
            match spec.predicate(&conj.predicate) {
                None => c.error(
                    FindingCode::UndeclaredPredicate,
                    pos,
                    format!(
                        "rule for `{}` references undeclared predicate `{}`",
                        r.class_label, conj.predicate
                    ),
                ),
                Some(p) => {
                    has_binary |= p.arity == 2;
                    if !p.has_label(&conj.phrase) {
                        c.error(
                            FindingCode::UndeclaredPhrase,
                            pos,
                            format!(
                                "rule for `{}` uses phrase `{}` which is not a label of `{}`",
                                r.class_label, conj.phrase, conj.predicate
                            ),
                        );
                    }
                }
            }
        }
        if r.predicate_order() != expected_order {
            c.error(
                FindingCode::InconsistentCompositionOrder,
                pos,
                format!(
                    "inconsistent composition order: rule for `{}` uses ({}) but the task order is ({})",
                    r.class_label,
                    r.predicate_order().join(", "),
                    expected_order.join(", ")
                ),
            );
        }
        if r.reversed && !has_binary {
            c.error(
                FindingCode::ReversedWithoutBinary,
                pos,
                format!(
                    "rule for `{}` is reversed but has no binary predicate",
                    r.class_label
                ),
            );
        }
    }
    if let Some(first) = spec.rules.first() {
        if first.predicate_order() != expected_order
            && !c.report.has(FindingCode::InconsistentCompositionOrder)
        {
            c.error(
                FindingCode::InconsistentCompositionOrder,
                None,
                "inconsistent composition order: task order differs from the first rule".into(),
            );
        }
    } else if !expected_order.is_empty() {
        c.error(
            FindingCode::InconsistentCompositionOrder,
            None,
            "inconsistent composition order: task has an order but no rules".into(),
        );
    }

    let mut tuples: BTreeMap<Vec<&str>, &str> = BTreeMap::new();
    for r in &spec.rules {
        let tuple: Vec<&str> = r.conjuncts.iter().map(|c| c.phrase.as_str()).collect();
        if let Some(other) = tuples.get(&tuple) {
            c.error(
                FindingCode::NonInjectiveVerbalizer,
                c.rule_pos(&r.class_label),
                format!(
                    "non-injective joint verbalizer: `{}` and `{}` both map to ({})",
                    other,
                    r.class_label,
                    tuple.join(", ")
                ),
            );
        } else {
            tuples.insert(tuple, &r.class_label);
        }
    }

    // Position vocabularies as the compiler will see them.
    let mut positions_of: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (j, name) in expected_order.iter().enumerate() {
        let mut vocab: Vec<&str> = Vec::new();
        for r in &spec.rules {
            if let Some(conj) = r.conjuncts.get(j).filter(|c| c.predicate == *name) {
                if !vocab.contains(&conj.phrase.as_str()) {
                    vocab.push(&conj.phrase);
                }
            }
        }
        for phrase in vocab {
            positions_of.entry(phrase).or_default().push(j + 1);
        }
    }
    for (phrase, positions) in positions_of {
        if positions.len() > 1 {
            let list: Vec<String> = positions.iter().map(ToString::to_string).collect();
            c.warn(
                FindingCode::PhraseInSeveralPositions,
                None,
                format!("phrase `{phrase}` is a candidate at mask positions {}", list.join(", ")),
            );
        }
    }

    for p in &spec.predicates {
        if !used_preds.contains(p.name.as_str()) {
            c.warn(
                FindingCode::UnusedPredicate,
                c.pred_pos(&p.name),
                format!("predicate `{}` is not used by any rule", p.name),
            );
        }
    }

    c.report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::types::{Conjunct, Predicate, Role, Rule};

    fn t(src: &str) -> Vec<TemplateElement> {
        src.split_whitespace()
            .map(|w| match w {
                "[MASK]" => TemplateElement::Mask,
                "<subj>" => TemplateElement::entity(Role::Subj),
                "<obj>" => TemplateElement::entity(Role::Obj),
                w => TemplateElement::word(w),
            })
            .collect()
    }

    fn labels(ls: &[&str]) -> Vec<String> {
        ls.iter().map(|s| s.to_string()).collect()
    }

    fn small_spec() -> TaskSpec {
        let preds = vec![
            Predicate::new("s", t("the [MASK] <subj>"), labels(&["person", "organization"])),
            Predicate::new("r", t("<subj> [MASK] <obj>"), labels(&["was born in", "'s parent was"])),
            Predicate::new("o", t("the [MASK] <obj>"), labels(&["person", "city"])),
        ];
        let rule = |class: &str, a: &str, b: &str, c: &str| {
            Rule::new(
                class,
                vec![Conjunct::new("s", a), Conjunct::new("r", b), Conjunct::new("o", c)],
            )
        };
        TaskSpec::new(
            preds,
            labels(&["per:city_of_birth", "per:parents"]),
            vec![
                rule("per:city_of_birth", "person", "was born in", "city"),
                rule("per:parents", "person", "'s parent was", "person"),
            ],
        )
    }

    #[test]
    fn valid_spec_has_no_errors_but_warns_on_shared_phrase() {
        let report = validate(&small_spec());
        assert!(report.is_valid(), "{report}");
        assert!(report.has(FindingCode::PhraseInSeveralPositions));
    }

    #[test]
    fn duplicate_tuple_is_non_injective() {
        let mut spec = small_spec();
        spec.rules[1].conjuncts = spec.rules[0].conjuncts.clone();
        let report = validate(&spec);
        assert!(report.has(FindingCode::NonInjectiveVerbalizer));
        assert!(report.errors.iter().any(|e| e.message.contains("non-injective joint verbalizer")));
    }

    #[test]
    fn order_disagreement_is_reported() {
        let mut spec = small_spec();
        spec.rules[1].conjuncts.swap(0, 2);
        let report = validate(&spec);
        assert!(report.has(FindingCode::InconsistentCompositionOrder));
        assert!(report.errors.iter().any(|e| e.message.contains("inconsistent composition order")));
    }

    #[test]
    fn predicate_invariants() {
        let mut spec = small_spec();
        spec.predicates[0].template.push(TemplateElement::Mask);
        spec.predicates[1].arity = 1;
        spec.predicates[2].label_words.push("city".into());
        let report = validate(&spec);
        assert!(report.has(FindingCode::MaskCount));
        assert!(report.has(FindingCode::ArityMismatch));
        assert!(report.has(FindingCode::DuplicateLabel));

        let mut spec = small_spec();
        spec.predicates[0].label_words.clear();
        spec.predicates[1].template.push(TemplateElement::word(" "));
        let report = validate(&spec);
        assert!(report.has(FindingCode::EmptyLabels));
        assert!(report.has(FindingCode::EmptyLiteral));
        assert!(report.has(FindingCode::UndeclaredPhrase));
    }

    #[test]
    fn class_rule_pairing() {
        let mut spec = small_spec();
        spec.rules.pop();
        assert!(validate(&spec).has(FindingCode::ClassWithoutRule));

        let mut spec = small_spec();
        let extra = spec.rules[0].clone();
        spec.rules.push(extra);
        assert!(validate(&spec).has(FindingCode::DuplicateRule));

        let mut spec = small_spec();
        spec.rules[0].class_label = "ghost".into();
        let report = validate(&spec);
        assert!(report.has(FindingCode::RuleForUndeclaredClass));
        assert!(report.has(FindingCode::ClassWithoutRule));
    }

    #[test]
    fn reversed_rule_needs_binary_predicate() {
        let spec = TaskSpec::new(
            vec![Predicate::new("s", t("the [MASK] <subj>"), labels(&["a", "b"]))],
            labels(&["x", "y"]),
            vec![
                Rule {
                    reversed: true,
                    ..Rule::new("x", vec![Conjunct::new("s", "a")])
                },
                Rule::new("y", vec![Conjunct::new("s", "b")]),
            ],
        );
        assert!(validate(&spec).has(FindingCode::ReversedWithoutBinary));
    }

    #[test]
    fn empty_task() {
        assert!(validate(&TaskSpec::default()).has(FindingCode::EmptyTask));
    }
}
