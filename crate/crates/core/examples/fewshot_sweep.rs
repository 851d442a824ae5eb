//! Few-shot sweep on the synthetic corpus: PTR against the `[CLS]`-head
//! baseline for several K, five seeds each. Both methods fine-tune the same
//! encoder, pretrained with masked words on unlabeled synthetic text unless
//! the pretraining epoch count is 0. Prints the table as CSV.
//!
//! ```text
//! cargo run --release --example fewshot_sweep -- [epochs] [pretrain_epochs] [K ...]
//! ```

use std::env;

use ptr_rules::corpus::{generate_synthetic, pretraining_text, synthetic_vocabulary};
use ptr_rules::eval::{sweep_fewshot, ModelInit, SweepData};
use ptr_rules::mlm::ModelConfig;
use ptr_rules::task::Task;
use ptr_rules::train::{pretrain, FewShotConfig, Objective, PretrainConfig, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = env::args().skip(1);
    let epochs: usize = args.next().map(|a| a.parse()).transpose()?.unwrap_or(20);
    let pre_epochs: usize = args.next().map(|a| a.parse()).transpose()?.unwrap_or(10);
    let ks: Vec<usize> = args.map(|a| a.parse()).collect::<Result<_, _>>()?;

    let task = Task::load(concat!(env!("CARGO_MANIFEST_DIR"), "/specs/synthetic4.ptr"))?;
    let train_pool = generate_synthetic(&task.spec, 100, 1, 0.0);
    let dev_pool = generate_synthetic(&task.spec, 100, 2, 0.0);
    let test = generate_synthetic(&task.spec, 100, 3, 0.0);
    let vocab = task.vocab_with(&[&train_pool, &dev_pool, &test], synthetic_vocabulary(&task.spec));

    let mut base = task.model(ModelConfig::default(), vocab, 0)?;
    let text = pretraining_text(&task.spec, 4000, 11);
    let pre = PretrainConfig {
        epochs: pre_epochs,
        ..PretrainConfig::default()
    };
    let (pretrained, history) = pretrain(&base, &text, &pre, 0)?;
    for e in &history.epochs {
        eprintln!("pretrain epoch {} loss {:.4}", e.epoch, e.mean_loss);
    }
    base = pretrained;
    base.init_phrases_from_words();

    let fewshot = FewShotConfig {
        ks: if ks.is_empty() { vec![8, 16, 32] } else { ks },
        ..FewShotConfig::default()
    };
    let cfg = TrainConfig {
        epochs,
        ..TrainConfig::default()
    };
    let table = sweep_fewshot(
        &task.schema,
        ModelInit::From(&base),
        SweepData {
            train_pool: &train_pool,
            dev_pool: Some(&dev_pool),
            test: &test,
        },
        &fewshot,
        &cfg,
        &[Objective::Ptr, Objective::ClsBaseline],
    );
    print!("{}", table.to_csv());
    println!("std:");
    print!("{}", table.std_csv());
    for cell in table.cells.iter().filter(|c| c.f1.is_err()) {
        eprintln!("{:?} K={} seed {}: {:?}", cell.method, cell.k, cell.seed, cell.f1);
    }
    Ok(())
}
