//! Trains PTR on the synthetic four-relation corpus with the desk profile
//! and reports loss and test micro-F1.
//!
//! ```text
//! cargo run --release --example train_synthetic
//! ```

use ptr_rules::corpus::generate_synthetic;
use ptr_rules::eval::evaluate;
use ptr_rules::mlm::ModelConfig;
use ptr_rules::task::Task;
use ptr_rules::train::{encode_examples, predict_all, train, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let task = Task::load(concat!(env!("CARGO_MANIFEST_DIR"), "/specs/synthetic4.ptr"))?;
    let train_set = generate_synthetic(&task.spec, 200, 1, 0.0);
    let dev_set = generate_synthetic(&task.spec, 25, 2, 0.0);
    let test_set = generate_synthetic(&task.spec, 100, 3, 0.0);
    let vocab = task.vocab(&[&train_set, &dev_set, &test_set]);
    let model = task.model(ModelConfig::default(), vocab, 7)?;
    let cfg = TrainConfig {
        seed: 7,
        ..TrainConfig::default()
    };

    let examples = encode_examples(&model, &task.schema, &train_set, cfg.objective)?;
    let initial = model.loss(&examples)?;
    let outcome = train(&model, &task.schema, &train_set, &dev_set, &cfg)?;
    let last = outcome.model.loss(&examples)?;
    for e in &outcome.history.epochs {
        println!(
            "epoch {} mean batch loss {:.4} dev F1 {:.3}",
            e.epoch,
            e.mean_loss,
            e.dev_f1.unwrap_or(f64::NAN)
        );
    }
    println!("train loss {initial:.4} -> {last:.4} ({:.1}%)", 100.0 * last / initial);

    let preds = predict_all(&outcome.model, &task.schema, &test_set, cfg.objective)?;
    let report = evaluate(&preds, &test_set.labels(), cfg.negative_class.as_deref())?;
    println!("test micro-F1 {:.3}", report.excluded.micro_f1);
    Ok(())
}
