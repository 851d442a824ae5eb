use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("{preds} predictions for {golds} gold labels")]
    LengthMismatch { preds: usize, golds: usize },
    #[error("nothing to evaluate")]
    Empty,
}

/// Per-class tallies. An instance predicted `p` with gold `g` counts a TP for
/// `g` when they agree, otherwise an FP for `p` and an FN for `g`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub class: String,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ClassCounts {
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        f1(self.precision(), self.recall())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub micro_precision: f64,
    pub micro_recall: f64,
    pub micro_f1: f64,
    /// Every class seen in predictions or golds, in byte order.
    pub per_class: Vec<ClassCounts>,
    pub n_instances: usize,
    /// Class left out of the pooled counts.
    pub negative_class: Option<String>,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

/// Micro-averaged precision, recall and F1 pooled over every class except
/// `negative_class`. Predicting the negative class is never a false positive;
/// missing a non-negative gold is always a false negative.
pub fn micro_f1<P: AsRef<str>, G: AsRef<str>>(
    preds: &[P],
    golds: &[G],
    negative_class: Option<&str>,
) -> Result<EvalReport, EvalError> {
    if preds.len() != golds.len() {
        return Err(EvalError::LengthMismatch {
            preds: preds.len(),
            golds: golds.len(),
        });
    }
    if preds.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut counts: BTreeMap<&str, (usize, usize, usize)> = BTreeMap::new();
    for (p, g) in preds.iter().zip(golds) {
        let (p, g) = (p.as_ref(), g.as_ref());
        if p == g {
            counts.entry(g).or_default().0 += 1;
        } else {
            counts.entry(p).or_default().1 += 1;
            counts.entry(g).or_default().2 += 1;
        }
    }
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for (class, c) in &counts {
        if Some(*class) != negative_class {
            tp += c.0;
            fp += c.1;
            fn_ += c.2;
        }
    }
    let p = ratio(tp, tp + fp);
    let r = ratio(tp, tp + fn_);
    Ok(EvalReport {
        micro_precision: p,
        micro_recall: r,
        micro_f1: f1(p, r),
        per_class: counts
            .into_iter()
            .map(|(class, (tp, fp, fn_))| ClassCounts {
                class: class.to_string(),
                tp,
                fp,
                fn_,
            })
            .collect(),
        n_instances: preds.len(),
        negative_class: negative_class.map(str::to_string),
    })
}

/// The negative-excluded report (primary) and the all-classes report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub excluded: EvalReport,
    pub included: EvalReport,
}

pub fn evaluate<P: AsRef<str>, G: AsRef<str>>(
    preds: &[P],
    golds: &[G],
    negative_class: Option<&str>,
) -> Result<Evaluation, EvalError> {
    Ok(Evaluation {
        excluded: micro_f1(preds, golds, negative_class)?,
        included: micro_f1(preds, golds, None)?,
    })
}

/// Percentage with one decimal, as in the result tables.
pub fn percent(x: f64) -> String {
    format!("{:.1}", 100.0 * x)
}

impl Evaluation {
    /// `scope,precision,recall,f1` rows: the two pooled scores, then one row
    /// per class.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scope,precision,recall,f1\n");
        let row = |out: &mut String, scope: &str, p: f64, r: f64, f: f64| {
            out.push_str(&format!("{scope},{},{},{}\n", percent(p), percent(r), percent(f)));
        };
        let e = &self.excluded;
        row(&mut out, "micro", e.micro_precision, e.micro_recall, e.micro_f1);
        let i = &self.included;
        row(&mut out, "micro_all", i.micro_precision, i.micro_recall, i.micro_f1);
        for c in &i.per_class {
            row(&mut out, &c.class, c.precision(), c.recall(), c.f1());
        }
        out
    }
}
