//! Micro-F1 with and without the negative class on a handful of
//! predictions, printed as the CSV report.
//!
//! ```text
//! cargo run --example evaluate_f1
//! ```

use ptr_rules::eval::{evaluate, percent};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let gold = [
        "no_relation", "per:city_of_birth", "per:city_of_birth", "org:founded_by",
        "no_relation", "org:founded_by", "per:city_of_death", "no_relation",
    ];
    let pred = [
        "no_relation", "per:city_of_birth", "per:city_of_death", "org:founded_by",
        "per:city_of_birth", "no_relation", "per:city_of_death", "no_relation",
    ];
    let e = evaluate(&pred, &gold, Some("no_relation"))?;
    println!(
        "excluding no_relation: P {} R {} F1 {}",
        percent(e.excluded.micro_precision),
        percent(e.excluded.micro_recall),
        percent(e.excluded.micro_f1)
    );
    println!("all classes (accuracy): F1 {}", percent(e.included.micro_f1));
    println!();
    print!("{}", e.to_csv());
    Ok(())
}
