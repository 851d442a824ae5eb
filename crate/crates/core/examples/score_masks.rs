//! Per-mask distributions and joint class scores from an untrained model,
//! then from the same model after a short training run.
//!
//! ```text
//! cargo run --release --example score_masks
//! ```

use ptr_rules::corpus::generate_synthetic;
use ptr_rules::mlm::ModelConfig;
use ptr_rules::prompt::render;
use ptr_rules::scoring::{class_scores, mask_distributions};
use ptr_rules::task::Task;
use ptr_rules::train::{train, TrainConfig};

fn show(task: &Task, model: &ptr_rules::mlm::TinyMlm, inst: &ptr_rules::corpus::Instance) -> Result<(), Box<dyn std::error::Error>> {
    let schema = &task.schema;
    let dists = mask_distributions(model, schema, inst, schema.default_orientation())?;
    for (j, (dist, vocab)) in dists.per_position.iter().zip(&schema.mask_vocabs).enumerate() {
        let cells: Vec<String> = vocab.iter().zip(dist).map(|(w, p)| format!("{w}={p:.3}")).collect();
        println!("  [MASK]{}: {}", j + 1, cells.join("  "));
    }
    let scores = class_scores(model, schema, inst)?;
    for (class, s) in schema.classes.iter().zip(&scores.scores) {
        println!("  {class:<24} {s:.4}");
    }
    println!("  sum {:.4}, predicted {}", scores.scores.iter().sum::<f64>(), scores.predicted_label(schema));
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let task = Task::load(concat!(env!("CARGO_MANIFEST_DIR"), "/specs/synthetic4.ptr"))?;
    let train_set = generate_synthetic(&task.spec, 50, 1, 0.0);
    let dev = generate_synthetic(&task.spec, 10, 2, 0.0);
    let probe = generate_synthetic(&task.spec, 1, 9, 0.0);
    let vocab = task.vocab(&[&train_set, &dev, &probe]);
    let model = task.model(ModelConfig::default(), vocab, 7)?;

    let inst = &probe.instances[0];
    println!("{}  (gold {})", render(&task.schema, inst)?.text(), inst.label);
    println!("untrained:");
    show(&task, &model, inst)?;

    let outcome = train(&model, &task.schema, &train_set, &dev, &TrainConfig::default())?;
    println!("after {} epochs:", TrainConfig::default().epochs);
    show(&task, &outcome.model, inst)?;
    Ok(())
}
