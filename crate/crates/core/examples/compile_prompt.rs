//! Compiles a rule spec and prints the composed template and verbalizer.
//!
//! ```text
//! cargo run --example compile_prompt -- crates/core/specs/tacred.ptr
//! ```

use std::env;
use std::fs;
use std::process::ExitCode;

use ptr_rules::dsl::{parse_task_spec, validate};
use ptr_rules::prompt::{compile, inspect};

fn main() -> ExitCode {
    let path = env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/specs/tacred.ptr").to_string());
    let source = match fs::read_to_string(&path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{path}: {e}");
            return ExitCode::FAILURE;
        }
    };
    let spec = match parse_task_spec(&source) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{path}:{e}");
            return ExitCode::FAILURE;
        }
    };
    let report = validate(&spec);
    if !report.warnings.is_empty() {
        eprint!("{report}");
    }
    match compile(&spec) {
        Ok(schema) => {
            print!("{}", inspect(&schema));
            println!();
            println!("masks: {}", schema.n_masks);
            for (j, v) in schema.mask_vocabs.iter().enumerate() {
                println!("V_{}: {}", j + 1, v.join(" | "));
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::FAILURE
        }
    }
}
