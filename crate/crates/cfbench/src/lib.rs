//! Counterfactual visual-bias benchmark toolkit: procedural stimuli with
//! oracle-checked ground truths, prompt protocols, an evaluation harness for
//! chat-with-images models, and scoring.

pub mod error;
pub mod gen;
pub mod harness;
pub mod item;
pub mod jsonl;
pub mod metrics;
pub mod prompts;
pub mod rng;
pub mod scene;
pub mod variants;

pub use error::{Error, Result};
pub use item::{
    Answer, AnswerKind, GroundTruth, StimulusItem, Task, TaskParams, Truth, VariantKind, YesNo,
};
