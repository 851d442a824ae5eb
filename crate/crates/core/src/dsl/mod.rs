//! The rule language: predicates with sub-prompts, classes, and the
//! conjunctive rules that map label-phrase assignments to classes.

mod parser;
mod printer;
mod types;
mod validate;

pub use parser::{parse_task_spec, parse_task_spec_bytes, ParseError, ParseErrorKind};
pub use printer::print_task_spec;
pub use types::{
    display_template, Conjunct, Pos, Predicate, Role, Rule, SourceMap, TaskSpec, TemplateElement,
};
pub use validate::{validate, Finding, FindingCode, ValidationReport};
