//! Prompt tuning with logic rules.
//!
//! A task is described in a small rule language ([`dsl`]): each predicate
//! carries a sub-prompt template with one mask and a set of label phrases,
//! and each class is a conjunction of predicate assignments. The
//! [`prompt`] compiler concatenates the sub-prompts into one multi-mask
//! template with a per-position verbalizer. A from-scratch masked language
//! model ([`mlm`]) predicts each mask; [`scoring`] multiplies the per-mask
//! probabilities into class scores, and [`train`] optimizes the summed
//! per-mask log-likelihood. A `[CLS]`-head classifier is included as a
//! baseline.

pub mod cli;
pub mod corpus;
pub mod dsl;
pub mod eval;
pub mod mlm;
pub mod prompt;
pub mod scoring;
pub mod task;
pub mod train;
