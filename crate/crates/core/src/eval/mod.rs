//! Micro-F1 with negative-class exclusion, per-class tallies, and few-shot
//! sweep tables.

mod metrics;
mod sweep;

pub use metrics::{evaluate, micro_f1, percent, ClassCounts, EvalError, EvalReport, Evaluation};
pub use sweep::{sweep_fewshot, KSummary, ModelInit, SweepCell, SweepData, SweepRow, SweepTable};
