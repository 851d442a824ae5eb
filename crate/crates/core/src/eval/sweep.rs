//! Few-shot sweeps: for every K and seed, sample K train and K dev
//! instances per class, train from a fresh or shared starting model, and
//! score the full test set.

use rayon::prelude::*;
use serde::Serialize;

use super::metrics::percent;
use crate::corpus::Dataset;
use crate::mlm::{ModelConfig, TinyMlm, Vocab};
use crate::prompt::PromptSchema;
use crate::train::{
    few_shot_sample, few_shot_split, predict_all, train, FewShotConfig, Objective, TrainConfig,
    TrainError,
};

/// One trained-and-scored cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub method: Objective,
    pub k: usize,
    pub seed: u64,
    /// Test micro-F1, or the error that stopped the cell.
    pub f1: Result<f64, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KSummary {
    pub k: usize,
    pub mean: f64,
    /// Population standard deviation over the seeds that finished.
    pub std: f64,
    pub finished: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub method: Objective,
    pub per_k: Vec<KSummary>,
    /// Mean of the per-K means.
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub ks: Vec<usize>,
    pub rows: Vec<SweepRow>,
    pub cells: Vec<SweepCell>,
}

/// Data for a sweep. Without a dev pool, train and dev subsets are drawn
/// disjointly from the train pool.
#[derive(Debug, Clone, Copy)]
pub struct SweepData<'a> {
    pub train_pool: &'a Dataset,
    pub dev_pool: Option<&'a Dataset>,
    pub test: &'a Dataset,
}

/// Where each cell's model starts.
#[derive(Debug, Clone, Copy)]
pub enum ModelInit<'a> {
    /// A new model initialized from the cell seed.
    Fresh {
        config: &'a ModelConfig,
        vocab: &'a Vocab,
    },
    /// A copy of the same model (e.g. a pretrained one) for every cell.
    From(&'a TinyMlm),
}

fn run_cell(
    schema: &PromptSchema,
    init: ModelInit<'_>,
    data: SweepData<'_>,
    train_cfg: &TrainConfig,
    method: Objective,
    k: usize,
    seed: u64,
) -> Result<f64, TrainError> {
    let sample = match data.dev_pool {
        Some(dev) => few_shot_split(data.train_pool, dev, k, seed),
        None => few_shot_sample(data.train_pool, k, seed),
    };
    let cfg = TrainConfig {
        seed,
        objective: method,
        ..train_cfg.clone()
    };
    let model = match init {
        ModelInit::Fresh { config, vocab } => TinyMlm::new(
            config.clone(),
            vocab.clone(),
            schema.classes.clone(),
            schema.learnable.count,
            seed,
        )?,
        ModelInit::From(m) => m.clone(),
    };
    let outcome = train(&model, schema, &sample.train, &sample.dev, &cfg)?;
    let preds = predict_all(&outcome.model, schema, data.test, method)?;
    let golds = data.test.labels();
    Ok(crate::eval::micro_f1(&preds, &golds, cfg.negative_class.as_deref())?.micro_f1)
}

fn summarize(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Runs every (method, K, seed) cell. Cells are independent and seeded by
/// their own seed, so running them in parallel does not change results. A
/// failing cell is recorded and left out of the means.
pub fn sweep_fewshot(
    schema: &PromptSchema,
    init: ModelInit<'_>,
    data: SweepData<'_>,
    fewshot: &FewShotConfig,
    train_cfg: &TrainConfig,
    methods: &[Objective],
) -> SweepTable {
    let jobs: Vec<(Objective, usize, u64)> = methods
        .iter()
        .flat_map(|&m| {
            fewshot
                .ks
                .iter()
                .flat_map(move |&k| fewshot.seeds.iter().map(move |&s| (m, k, s)))
        })
        .collect();
    let cells: Vec<SweepCell> = jobs
        .par_iter()
        .map(|&(method, k, seed)| SweepCell {
            method,
            k,
            seed,
            f1: run_cell(schema, init, data, train_cfg, method, k, seed)
                .map_err(|e| e.to_string()),
        })
        .collect();
    let rows = methods
        .iter()
        .map(|&method| {
            let per_k: Vec<KSummary> = fewshot
                .ks
                .iter()
                .map(|&k| {
                    let values: Vec<f64> = cells
                        .iter()
                        .filter(|c| c.method == method && c.k == k)
                        .filter_map(|c| c.f1.as_ref().ok().copied())
                        .collect();
                    let (mean, std) = summarize(&values);
                    KSummary {
                        k,
                        mean,
                        std,
                        finished: values.len(),
                    }
                })
                .collect();
            let mean = summarize(&per_k.iter().map(|s| s.mean).collect::<Vec<_>>()).0;
            SweepRow {
                method,
                per_k,
                mean,
            }
        })
        .collect();
    SweepTable {
        ks: fewshot.ks.clone(),
        rows,
        cells,
    }
}

impl SweepTable {
    fn csv_with(&self, cell: impl Fn(&KSummary) -> f64, last: impl Fn(&SweepRow) -> f64) -> String {
        let mut out = String::from("method");
        for k in &self.ks {
            out.push_str(&format!(",{k}"));
        }
        if !self.ks.is_empty() {
            out.push_str(",Mean");
        }
        out.push('\n');
        if self.ks.is_empty() {
            return out;
        }
        for row in &self.rows {
            out.push_str(row.method.display_name());
            for s in &row.per_k {
                out.push(',');
                out.push_str(&percent(cell(s)));
            }
            out.push(',');
            out.push_str(&percent(last(row)));
            out.push('\n');
        }
        out
    }

    /// Mean F1 per method and K plus the cross-K mean, in percent.
    pub fn to_csv(&self) -> String {
        self.csv_with(|s| s.mean, |r| r.mean)
    }

    /// Standard deviations in the same layout; the last column is the mean
    /// of the per-K deviations.
    pub fn std_csv(&self) -> String {
        self.csv_with(
            |s| s.std,
            |r| summarize(&r.per_k.iter().map(|s| s.std).collect::<Vec<_>>()).0,
        )
    }

    pub fn row(&self, method: Objective) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.method == method)
    }
}
