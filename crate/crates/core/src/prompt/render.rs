use super::schema::{Orientation, PromptSchema};
use crate::corpus::{Instance, InstanceError, Span};
use crate::dsl::{Role, TemplateElement};

pub const MASK_TOKEN: &str = "[MASK]";
pub const CLS_TOKEN: &str = "[CLS]";
pub const SEP_TOKEN: &str = "[SEP]";

/// A prompt filled in with one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedInput {
    /// Surface tokens; masks render as `[MASK]` and learnable tokens as `[L#]`.
    pub tokens: Vec<String>,
    /// Token index of each mask, in mask order.
    pub mask_positions: Vec<usize>,
    /// `(token index, learnable index)` pairs.
    pub learnable_positions: Vec<(usize, usize)>,
    /// Where the instance sentence was placed.
    pub text_span: Option<Span>,
    /// Entity spans inside the embedded sentence.
    pub subj_span: Option<Span>,
    pub obj_span: Option<Span>,
    pub orientation: Orientation,
}

impl RenderedInput {
    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }

    /// Text with the `[CLS]` / `[SEP]` framing the encoder adds.
    pub fn framed_text(&self) -> String {
        format!("{CLS_TOKEN} {} {SEP_TOKEN}", self.text())
    }
}

/// Renders an instance in the schema's default orientation.
pub fn render(schema: &PromptSchema, instance: &Instance) -> Result<RenderedInput, InstanceError> {
    render_oriented(schema, instance, schema.default_orientation())
}

/// Renders an instance with subject and object bound per `orientation`.
pub fn render_oriented(
    schema: &PromptSchema,
    instance: &Instance,
    orientation: Orientation,
) -> Result<RenderedInput, InstanceError> {
    instance.check()?;
    let mut out = RenderedInput {
        tokens: Vec::with_capacity(instance.tokens.len() * 2 + schema.elements.len()),
        mask_positions: Vec::with_capacity(schema.n_masks),
        learnable_positions: Vec::new(),
        text_span: None,
        subj_span: None,
        obj_span: None,
        orientation,
    };
    for el in schema.oriented_elements(orientation) {
        match el {
            TemplateElement::Text => {
                let offset = out.tokens.len();
                out.tokens.extend(instance.tokens.iter().cloned());
                if out.text_span.is_none() {
                    out.text_span = Some(Span::new(offset, out.tokens.len()));
                    out.subj_span = Some(instance.subj.shifted(offset));
                    out.obj_span = Some(instance.obj.shifted(offset));
                }
            }
            TemplateElement::Entity { role } => {
                let span = match role {
                    Role::Subj => instance.subj_tokens(),
                    Role::Obj => instance.obj_tokens(),
                };
                out.tokens.extend(span.iter().cloned());
            }
            TemplateElement::Word { text } => out.tokens.push(text),
            TemplateElement::Mask => {
                out.mask_positions.push(out.tokens.len());
                out.tokens.push(MASK_TOKEN.to_string());
            }
            TemplateElement::Learnable { index } => {
                out.learnable_positions.push((out.tokens.len(), index));
                out.tokens.push(format!("[L{index}]"));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_task_spec;
    use crate::prompt::compile;

    fn schema() -> PromptSchema {
        compile(
            &parse_task_spec(
                "predicate s { template: the [MASK] <subj>; labels: person; }
                 predicate r { template: <subj> [MASK] [L0] <obj>; labels: was born in, died in; }
                 predicate o { template: the [MASK] <obj>; labels: state; }
                 classes { a, b }
                 rule a = s(person) & r(was born in) & o(state);
                 rule b = s(person) & r(died in) & o(state);",
            )
            .unwrap(),
        )
        .unwrap()
    }

    fn twain() -> Instance {
        Instance::from_text(
            "1",
            "Mark Twain was born in Florida .",
            Span::new(0, 2),
            Span::new(5, 6),
            "a",
        )
    }

    #[test]
    fn positions_are_tracked() {
        let r = render(&schema(), &twain()).unwrap();
        assert_eq!(r.mask_positions, vec![8, 11, 14]);
        assert_eq!(r.learnable_positions, vec![(12, 0)]);
        assert_eq!(r.subj_span, Some(Span::new(0, 2)));
        assert_eq!(r.obj_span, Some(Span::new(5, 6)));
        assert_eq!(r.tokens[12], "[L0]");
    }

    #[test]
    fn empty_input_is_rejected() {
        let mut i = twain();
        i.tokens.clear();
        assert_eq!(render(&schema(), &i), Err(InstanceError::EmptyInput));
    }

    #[test]
    fn bad_spans_are_rejected() {
        let mut i = twain();
        i.obj = Span::new(6, 9);
        assert!(matches!(
            render(&schema(), &i),
            Err(InstanceError::SpanOutOfBounds { .. })
        ));
        i.obj = Span::new(1, 2);
        assert_eq!(render(&schema(), &i), Err(InstanceError::OverlappingSpans));
    }
}
