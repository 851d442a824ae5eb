use thiserror::Error;

use super::schema::{LearnableSlots, PromptSchema, VerbalizerEntry, SCHEMA_FORMAT, SCHEMA_VERSION};
use crate::dsl::{validate, TaskSpec, TemplateElement, ValidationReport};

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("task spec is invalid:\n{0}")]
    Invalid(ValidationReport),
    #[error("verbalizer tuples of `{0}` and `{1}` coincide")]
    NonInjective(String, String),
}

/// Sub-template of one predicate with input placeholders removed.
fn body(template: &[TemplateElement]) -> Vec<TemplateElement> {
    template
        .iter()
        .filter(|e| !matches!(e, TemplateElement::Text))
        .cloned()
        .collect()
}

/// Concatenates sub-prompts behind a single leading `<text>`.
///
/// Adjacent sub-prompts share entity mentions. In a binary predicate's
/// template, a leading entity placeholder is dropped when the prompt built so
/// far ends with the same placeholder, and a trailing one is dropped when the
/// next sub-prompt mentions the same entity. Unary templates are kept whole.
/// With `the [MASK] <subj>`, `<subj> [MASK] <obj>`, `the [MASK] <obj>` this
/// yields `<text> the [MASK] <subj> [MASK] the [MASK] <obj>`.
pub(crate) fn compose(bodies: &[(usize, Vec<TemplateElement>)]) -> Vec<TemplateElement> {
    let mut out = vec![TemplateElement::Text];
    for (k, (arity, els)) in bodies.iter().enumerate() {
        let mut start = 0;
        let mut end = els.len();
        if *arity == 2 {
            if let (Some(first @ TemplateElement::Entity { .. }), Some(last)) =
                (els.first(), out.last())
            {
                if first == last {
                    start = 1;
                }
            }
            if let Some(tail @ TemplateElement::Entity { .. }) = els.last() {
                if end > start {
                    if let Some((_, next)) = bodies.get(k + 1) {
                        if next.contains(tail) {
                            end -= 1;
                        }
                    }
                }
            }
        }
        out.extend_from_slice(&els[start..end]);
    }
    out
}

/// Compiles a validated task spec into a prompt schema.
pub fn compile(spec: &TaskSpec) -> Result<PromptSchema, CompileError> {
    let report = validate(spec);
    if !report.is_valid() {
        return Err(CompileError::Invalid(report));
    }

    let bodies: Vec<(usize, Vec<TemplateElement>)> = spec
        .composition_order
        .iter()
        .map(|name| {
            let p = spec.predicate(name).expect("validated");
            (p.arity, body(&p.template))
        })
        .collect();
    let elements = compose(&bodies);
    let n_masks = spec.composition_order.len();

    let mut mask_vocabs: Vec<Vec<String>> = vec![Vec::new(); n_masks];
    for rule in &spec.rules {
        for (j, c) in rule.conjuncts.iter().enumerate() {
            if !mask_vocabs[j].contains(&c.phrase) {
                mask_vocabs[j].push(c.phrase.clone());
            }
        }
    }

    let verbalizer: Vec<VerbalizerEntry> = spec
        .classes
        .iter()
        .map(|class| {
            let rule = spec.rule(class).expect("validated");
            let phrases = rule
                .conjuncts
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    mask_vocabs[j]
                        .iter()
                        .position(|p| *p == c.phrase)
                        .expect("phrase collected above")
                })
                .collect();
            VerbalizerEntry {
                class: class.clone(),
                phrases,
                reversed: rule.reversed,
            }
        })
        .collect();

    for (a, va) in verbalizer.iter().enumerate() {
        for vb in &verbalizer[a + 1..] {
            if va.phrases == vb.phrases {
                return Err(CompileError::NonInjective(va.class.clone(), vb.class.clone()));
            }
        }
    }

    let mut learnable = LearnableSlots::default();
    for (i, el) in elements.iter().enumerate() {
        if let TemplateElement::Learnable { index } = el {
            learnable.positions.push(i);
            learnable.count = learnable.count.max(index + 1);
        }
    }

    Ok(PromptSchema {
        format: SCHEMA_FORMAT.to_string(),
        version: SCHEMA_VERSION,
        classes: spec.classes.clone(),
        elements,
        n_masks,
        mask_vocabs,
        verbalizer,
        learnable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_task_spec;

    #[test]
    fn single_unary_predicate_is_plain_prompt_tuning() {
        let spec = parse_task_spec(
            "predicate sentiment { template: <subj> It was [MASK] .; labels: great, terrible; }
             classes { pos, neg }
             rule pos = sentiment(great);
             rule neg = sentiment(terrible);",
        )
        .unwrap();
        let schema = compile(&spec).unwrap();
        assert_eq!(schema.n_masks, 1);
        assert_eq!(schema.template_string(), "<text> <subj> It was [MASK] .");
        assert_eq!(schema.mask_vocabs, vec![vec!["great", "terrible"]]);
        assert_eq!(schema.verbalizer[1].phrases, vec![1]);
    }

    #[test]
    fn learnable_tokens_are_located() {
        let spec = parse_task_spec(
            "predicate f { template: [L0] the [MASK] <subj> [L2]; labels: a, b; }
             classes { x, y }
             rule x = f(a);
             rule y = f(b);",
        )
        .unwrap();
        let schema = compile(&spec).unwrap();
        assert_eq!(schema.learnable.count, 3);
        assert_eq!(schema.learnable.positions, vec![1, 5]);
    }

    #[test]
    fn invalid_spec_does_not_compile() {
        let mut spec = parse_task_spec(
            "predicate f { template: the [MASK] <subj>; labels: a, b; }
             classes { x, y }
             rule x = f(a);
             rule y = f(b);",
        )
        .unwrap();
        spec.rules[1].conjuncts[0].phrase = "a".into();
        assert!(matches!(compile(&spec), Err(CompileError::Invalid(_))));
    }

    #[test]
    fn text_placeholder_is_emitted_once() {
        let spec = parse_task_spec(
            "predicate s { template: <text> the [MASK] <subj>; labels: a, b; }
             predicate o { template: <text> the [MASK] <obj>; labels: c; }
             classes { x, y }
             rule x = s(a) & o(c);
             rule y = s(b) & o(c);",
        )
        .unwrap();
        let schema = compile(&spec).unwrap();
        assert_eq!(schema.template_string(), "<text> the [MASK] <subj> the [MASK] <obj>");
    }
}
