use proptest::prelude::*;
use ptr_rules::dsl::{
    parse_task_spec, parse_task_spec_bytes, print_task_spec, validate, Conjunct, Predicate, Role,
    Rule, TaskSpec, TemplateElement,
};
use ptr_rules::prompt::{compile, reverse_relations};

fn word() -> impl Strategy<Value = String> {
    prop_oneof![
        4 => "[a-z]{1,6}",
        1 => "[a-z'\"\\\\,;&=()#{}]{1,4}",
    ]
}

fn phrase() -> impl Strategy<Value = String> {
    prop::collection::vec(word(), 1..4).prop_map(|w| w.join(" "))
}

#[derive(Debug, Clone, Copy)]
enum Shape {
    Subj,
    Obj,
    Binary,
}

fn template(shape: Shape, lead: Vec<String>, learnable: Option<usize>) -> Vec<TemplateElement> {
    let mut t: Vec<TemplateElement> = lead.into_iter().map(TemplateElement::word).collect();
    if let Some(i) = learnable {
        t.push(TemplateElement::Learnable { index: i });
    }
    match shape {
        Shape::Subj => t.extend([TemplateElement::Mask, TemplateElement::entity(Role::Subj)]),
        Shape::Obj => t.extend([TemplateElement::Mask, TemplateElement::entity(Role::Obj)]),
        Shape::Binary => t.extend([
            TemplateElement::entity(Role::Subj),
            TemplateElement::Mask,
            TemplateElement::entity(Role::Obj),
        ]),
    }
    t
}

fn predicate(i: usize) -> impl Strategy<Value = Predicate> {
    (
        prop_oneof![Just(Shape::Subj), Just(Shape::Obj), Just(Shape::Binary)],
        prop::collection::vec(word(), 0..3),
        prop::option::of(0usize..3),
        prop::collection::btree_set(phrase(), 1..5),
    )
        .prop_map(move |(shape, lead, l, labels)| {
            Predicate::new(
                format!("p{i}"),
                template(shape, lead, l),
                labels.into_iter().collect(),
            )
        })
}

fn class_name() -> impl Strategy<Value = String> {
    prop_oneof!["[a-z]{1,5}:[a-z_]{1,8}", "[A-Z][a-z]{1,5}-[A-Z][a-z]{1,5}", "[a-z ]{1,8}x"]
}

fn spec() -> impl Strategy<Value = TaskSpec> {
    (1usize..4)
        .prop_flat_map(|n| {
            let preds: Vec<_> = (0..n).map(predicate).collect();
            (preds, prop::collection::btree_set(class_name(), 1..6))
        })
        .prop_flat_map(|(preds, classes)| {
            let classes: Vec<String> = classes.into_iter().collect();
            let picks = prop::collection::vec(
                (prop::collection::vec(any::<prop::sample::Index>(), preds.len()), any::<bool>()),
                classes.len(),
            );
            (Just(preds), Just(classes), picks)
        })
        .prop_map(|(preds, classes, picks)| {
            let has_binary = preds.iter().any(|p| p.arity == 2);
            let rules = classes
                .iter()
                .zip(picks)
                .map(|(c, (idx, rev))| {
                    let conjuncts = preds
                        .iter()
                        .zip(idx)
                        .map(|(p, i)| Conjunct::new(p.name.clone(), i.get(&p.label_words).clone()))
                        .collect();
                    let mut r = Rule::new(c.clone(), conjuncts);
                    r.reversed = rev && has_binary;
                    r
                })
                .collect();
            TaskSpec::new(preds, classes, rules)
        })
}

proptest! {
    #[test]
    fn print_then_parse_round_trips(s in spec()) {
        let text = print_task_spec(&s);
        let back = parse_task_spec(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(print_task_spec(&back), text);
    }

    #[test]
    fn arbitrary_bytes_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
        if let Ok(s) = parse_task_spec_bytes(&bytes) {
            let _ = validate(&s);
            let _ = compile(&s);
        }
    }

    #[test]
    fn token_soup_never_panics(tokens in prop::collection::vec(
        prop_oneof![
            Just("predicate"), Just("classes"), Just("rule"), Just("reversed"), Just("template"),
            Just("labels"), Just("{"), Just("}"), Just(":"), Just(";"), Just(","), Just("("),
            Just(")"), Just("&"), Just("="), Just("[MASK]"), Just("<subj>"), Just("<obj>"),
            Just("<text>"), Just("[L0]"), Just("\"a b\""), Just("p"), Just("q"), Just("c"),
            Just("x"), Just("#"), Just("\n"), Just("\""),
        ],
        0..60,
    )) {
        let src = tokens.join(" ");
        if let Ok(s) = parse_task_spec(&src) {
            if validate(&s).is_valid() {
                let schema = compile(&s).expect("valid specs compile");
                prop_assert_eq!(schema.n_masks, s.composition_order.len());
            }
        }
    }

    #[test]
    fn valid_specs_compile_with_one_mask_per_conjunct(s in spec()) {
        if validate(&s).is_valid() {
            let schema = compile(&s).unwrap();
            prop_assert_eq!(schema.n_masks, s.composition_order.len());
            let tuples: std::collections::HashSet<_> =
                schema.verbalizer.iter().map(|v| v.phrases.clone()).collect();
            prop_assert_eq!(tuples.len(), schema.classes.len());
        }
    }

    #[test]
    fn reversal_is_an_involution_and_keeps_vocabularies(
        s in spec(),
        pick in prop::collection::vec(any::<prop::sample::Index>(), 0..3),
    ) {
        prop_assume!(validate(&s).is_valid());
        prop_assume!(s.predicates.iter().any(|p| p.arity == 2));
        let subset: Vec<String> = pick.iter().map(|i| i.get(&s.classes).clone()).collect();
        let mut unique = subset.clone();
        unique.sort();
        unique.dedup();
        let r = reverse_relations(&s, &unique).unwrap();
        prop_assert_eq!(&reverse_relations(&r, &unique).unwrap(), &s);
        let a = compile(&s).unwrap();
        let b = compile(&r).unwrap();
        prop_assert_eq!(a.n_masks, b.n_masks);
        for (va, vb) in a.mask_vocabs.iter().zip(&b.mask_vocabs) {
            let (mut va, mut vb) = (va.clone(), vb.clone());
            va.sort();
            vb.sort();
            prop_assert_eq!(va, vb);
        }
    }
}

#[test]
fn empty_reversal_subset_is_identity() {
    let s = parse_task_spec(
        "predicate r { template: <subj> [MASK] <obj>; labels: a, b; }
         classes { x, y }
         rule x = r(a);
         rule y = r(b);",
    )
    .unwrap();
    assert_eq!(reverse_relations(&s, &[] as &[&str]).unwrap(), s);
}

#[test]
fn parse_errors_carry_positions() {
    let e = parse_task_spec("predicate p {\n  template: [MASK] <subj>;\n  labels: a;\n}\nrule q = p(a);")
        .unwrap_err();
    assert_eq!(e.pos.line, 5);
    assert!(e.to_string().starts_with("5:"), "{e}");
}
