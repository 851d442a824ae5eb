//! Composition of sub-prompts into one multi-mask task prompt, rendering of
//! instances into model input, and the reversed-relation rewrite.

mod compile;
mod inspect;
mod render;
mod reverse;
mod schema;

pub use compile::{compile, CompileError};
pub use inspect::{inspect, numbered_template};
pub use render::{render, render_oriented, RenderedInput, CLS_TOKEN, MASK_TOKEN, SEP_TOKEN};
pub use reverse::{reverse_relations, ReverseError};
pub use schema::{
    LearnableSlots, Orientation, PromptSchema, VerbalizerEntry, SCHEMA_FORMAT, SCHEMA_VERSION,
};
