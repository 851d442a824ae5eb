//! Checks the hand-written gradients of the default model against central
//! finite differences on a small batch of synthetic prompts.
//!
//! ```text
//! cargo run --release --example gradient_check
//! ```

use ptr_rules::corpus::generate_synthetic;
use ptr_rules::mlm::{check_gradients, ModelConfig};
use ptr_rules::task::Task;
use ptr_rules::train::{encode_examples, Objective};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let task = Task::load(concat!(env!("CARGO_MANIFEST_DIR"), "/specs/synthetic4.ptr"))?;
    let data = generate_synthetic(&task.spec, 2, 11, 0.0);
    let vocab = task.vocab(&[&data]);
    for seed in 0..5 {
        let model = task.model(ModelConfig::default(), vocab.clone(), seed)?;
        for objective in [Objective::Ptr, Objective::ClsBaseline] {
            let batch = encode_examples(&model, &task.schema, &data, objective)?;
            let report = check_gradients(&model, &batch, 64, 1e-3, 1e-8, seed)?;
            let worst = report.worst().expect("coordinates sampled");
            println!(
                "seed {seed} {:<12} max rel err {:.2e} (worst: {} analytic {:.3e} numeric {:.3e})",
                objective.display_name(),
                report.max_rel_err,
                worst.tensor,
                worst.analytic,
                worst.numeric
            );
        }
    }
    Ok(())
}
