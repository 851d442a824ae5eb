//! Writes a small synthetic corpus as JSONL and shows a few sentences of
//! the unlabeled pretraining text for the same spec.
//!
//! ```text
//! cargo run --example generate_corpus -- [spec.ptr] [n_per_class] [seed]
//! ```

use std::env;

use ptr_rules::corpus::{generate_synthetic, pretraining_text, to_jsonl};
use ptr_rules::task::Task;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/specs/direction4.ptr").to_string());
    let n: usize = args.next().map(|a| a.parse()).transpose()?.unwrap_or(2);
    let seed: u64 = args.next().map(|a| a.parse()).transpose()?.unwrap_or(1);

    let task = Task::load(&path)?;
    let data = generate_synthetic(&task.spec, n, seed, 0.1);
    print!("{}", to_jsonl(&data));
    eprintln!("-- pretraining text");
    for s in pretraining_text(&task.spec, 5, seed) {
        eprintln!("{}", s.join(" "));
    }
    Ok(())
}
