//! Renders "Mark Twain was born in Florida ." with the TACRED-style spec,
//! before and after reversing the birth-place relations.
//!
//! ```text
//! cargo run --example render_reversed
//! ```

use ptr_rules::corpus::{Instance, Span};
use ptr_rules::prompt::{render, render_oriented};
use ptr_rules::task::Task;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let task = Task::load(concat!(env!("CARGO_MANIFEST_DIR"), "/specs/tacred.ptr"))?;
    let twain = Instance::from_text(
        "twain",
        "Mark Twain was born in Florida .",
        Span::new(0, 2),
        Span::new(5, 6),
        "per:stateorprovince_of_birth",
    );

    let plain = render(&task.schema, &twain)?;
    println!("PTR            {}", plain.framed_text());

    let reversed = task.reversed(&["per:stateorprovince_of_birth"])?;
    let class = reversed.schema.class_index("per:stateorprovince_of_birth").unwrap();
    let orientation = reversed.schema.verbalizer[class].orientation();
    let flipped = render_oriented(&reversed.schema, &twain, orientation)?;
    println!("PTR (Reversed) {}", flipped.framed_text());

    let back = reversed.reversed(&["per:stateorprovince_of_birth"])?;
    println!("reversing twice restores the spec: {}", back.spec == task.spec);
    Ok(())
}
