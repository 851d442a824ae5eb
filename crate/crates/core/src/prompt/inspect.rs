use std::fmt::Write;

use super::schema::PromptSchema;
use crate::dsl::TemplateElement;

/// Template with numbered masks, e.g. `<text> the [MASK]1 <subj> [MASK]2 ...`.
pub fn numbered_template(schema: &PromptSchema) -> String {
    let mut n = 0;
    schema
        .elements
        .iter()
        .map(|e| match e {
            TemplateElement::Mask => {
                n += 1;
                format!("[MASK]{n}")
            }
            other => other.to_string(),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Renders the template and a class-by-mask verbalizer table.
pub fn inspect(schema: &PromptSchema) -> String {
    let mut header = vec!["Class Label".to_string()];
    header.extend((1..=schema.n_masks).map(|j| format!("[MASK]{j}")));
    let mut rows = vec![header];
    for (i, v) in schema.verbalizer.iter().enumerate() {
        let mut row = vec![if v.reversed {
            format!("{} (reversed)", v.class)
        } else {
            v.class.clone()
        }];
        row.extend(schema.class_phrases(i).into_iter().map(str::to_string));
        rows.push(row);
    }
    let widths: Vec<usize> = (0..=schema.n_masks)
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();

    let mut out = String::new();
    writeln!(out, "template: {}", numbered_template(schema)).unwrap();
    writeln!(out).unwrap();
    for (k, row) in rows.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect();
        writeln!(out, "{}", cells.join(" | ").trim_end()).unwrap();
        if k == 0 {
            let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
            writeln!(out, "{}", rule.join("-|-")).unwrap();
        }
    }
    out
}
