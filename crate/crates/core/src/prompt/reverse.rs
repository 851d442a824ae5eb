use thiserror::Error;

use crate::dsl::TaskSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReverseError {
    #[error("class `{0}` is not declared in the task")]
    UnknownClass(String),
    #[error("class `{0}` has no binary predicate to reverse")]
    NoBinaryConjunct(String),
}

/// Swaps subject and object roles for the rules of the given classes.
///
/// The flag toggles, so applying the same subset twice restores the spec.
/// Label phrases and composition order are untouched; the compiled schema
/// keeps its mask count and vocabularies and renders reversed classes with
/// the entity placeholders swapped.
pub fn reverse_relations<S: AsRef<str>>(
    spec: &TaskSpec,
    subset: &[S],
) -> Result<TaskSpec, ReverseError> {
    let mut out = spec.clone();
    for class in subset {
        let class = class.as_ref();
        if spec.class_index(class).is_none() {
            return Err(ReverseError::UnknownClass(class.to_string()));
        }
        let rule = out
            .rules
            .iter_mut()
            .find(|r| r.class_label == class)
            .ok_or_else(|| ReverseError::UnknownClass(class.to_string()))?;
        let has_binary = rule
            .conjuncts
            .iter()
            .any(|c| spec.predicate(&c.predicate).is_some_and(|p| p.arity == 2));
        if !has_binary {
            return Err(ReverseError::NoBinaryConjunct(class.to_string()));
        }
        rule.reversed = !rule.reversed;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_task_spec;

    fn spec() -> TaskSpec {
        parse_task_spec(
            "predicate s { template: the [MASK] <subj>; labels: organization; }
             predicate r { template: <subj> [MASK] <obj>; labels: 's member was, was member of; }
             predicate o { template: the [MASK] <obj>; labels: organization; }
             predicate t { template: the [MASK] <subj>; labels: x, y; }
             classes { org:members, org:member_of }
             rule org:members = s(organization) & r('s member was) & o(organization);
             rule org:member_of = s(organization) & r(was member of) & o(organization);",
        )
        .unwrap()
    }

    #[test]
    fn toggles_only_the_subset() {
        let rev = reverse_relations(&spec(), &["org:member_of"]).unwrap();
        assert!(!rev.rule("org:members").unwrap().reversed);
        assert!(rev.rule("org:member_of").unwrap().reversed);
        assert_eq!(reverse_relations(&rev, &["org:member_of"]).unwrap(), spec());
    }

    #[test]
    fn empty_subset_is_identity() {
        assert_eq!(reverse_relations::<&str>(&spec(), &[]).unwrap(), spec());
    }

    #[test]
    fn errors() {
        assert_eq!(
            reverse_relations(&spec(), &["nope"]),
            Err(ReverseError::UnknownClass("nope".into()))
        );
        let unary = parse_task_spec(
            "predicate t { template: the [MASK] <subj>; labels: x, y; }
             classes { a, b }
             rule a = t(x);
             rule b = t(y);",
        )
        .unwrap();
        assert_eq!(
            reverse_relations(&unary, &["a"]),
            Err(ReverseError::NoBinaryConjunct("a".into()))
        );
    }
}
