use std::fmt::Write;

use super::parser::{class_is_bare, template_word_is_bare};
use super::types::{TaskSpec, TemplateElement};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn class_token(class: &str) -> String {
    if class_is_bare(class) {
        class.to_string()
    } else {
        quote(class)
    }
}

fn template_token(el: &TemplateElement) -> String {
    match el {
        TemplateElement::Word { text } if !template_word_is_bare(text) => quote(text),
        other => other.to_string(),
    }
}

/// Prints a spec in canonical `.ptr` form.
///
/// Output is byte-stable: predicates, classes and rules keep their order,
/// label phrases are always quoted, and every item is followed by one blank
/// line except the last, which ends with a single newline.
pub fn print_task_spec(spec: &TaskSpec) -> String {
    let mut items: Vec<String> = Vec::new();
    for p in &spec.predicates {
        let mut s = String::new();
        let template: Vec<String> = p.template.iter().map(template_token).collect();
        let labels: Vec<String> = p.label_words.iter().map(|l| quote(l)).collect();
        writeln!(s, "predicate {} {{", p.name).unwrap();
        if template.is_empty() {
            writeln!(s, "    template: ;").unwrap();
        } else {
            writeln!(s, "    template: {};", template.join(" ")).unwrap();
        }
        if labels.is_empty() {
            writeln!(s, "    labels: ;").unwrap();
        } else {
            writeln!(s, "    labels: {};", labels.join(", ")).unwrap();
        }
        s.push('}');
        items.push(s);
    }
    if !spec.classes.is_empty() {
        let mut s = String::from("classes {\n");
        for c in &spec.classes {
            writeln!(s, "    {},", class_token(c)).unwrap();
        }
        s.push('}');
        items.push(s);
    }
    if !spec.rules.is_empty() {
        let lines: Vec<String> = spec
            .rules
            .iter()
            .map(|r| {
                let body: Vec<String> = r
                    .conjuncts
                    .iter()
                    .map(|c| format!("{}({})", c.predicate, quote(&c.phrase)))
                    .collect();
                format!(
                    "{}rule {} = {};",
                    if r.reversed { "reversed " } else { "" },
                    class_token(&r.class_label),
                    body.join(" & ")
                )
            })
            .collect();
        items.push(lines.join("\n"));
    }
    let mut out = items.join("\n\n");
    out.push('\n');
    out
}
