//! Deterministic stand-in model with a configurable bias and accuracy.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Capabilities, Completion, Message, ModelAdapter, TrialContext};
use crate::error::{bail, Result};
use crate::item::{Answer, Truth};
use crate::prompts::{PromptBundle, TurnPurpose};

/// Emitted when no wrong-but-parseable answer exists (Yes/No, free text).
pub const HEDGE: &str = "{Unsure}";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MockBiasedModel {
    pub p_bias: f64,
    pub p_correct: f64,
    pub seed: u64,
}

impl MockBiasedModel {
    pub fn new(p_bias: f64, p_correct: f64, seed: u64) -> Result<MockBiasedModel> {
        let ok = |p: f64| (0.0..=1.0).contains(&p);
        if !ok(p_bias) || !ok(p_correct) || p_bias + p_correct > 1.0 + 1e-12 {
            bail!(
                Config,
                "mock probabilities must be in [0, 1] with p_bias + p_correct <= 1"
            );
        }
        Ok(MockBiasedModel {
            p_bias,
            p_correct,
            seed,
        })
    }

    pub fn id(&self) -> String {
        format!("mock-b{}-c{}-s{}", self.p_bias, self.p_correct, self.seed)
    }
}

fn wrong_answer(truth: &Truth, rng: &mut impl Rng) -> String {
    let Answer::Int(gt) = truth.answer else {
        return HEDGE.to_string();
    };
    let bias = truth.bias.as_ref().and_then(Answer::as_int);
    let pool: Vec<i64> = [gt - 2, gt - 1, gt + 1, gt + 2]
        .into_iter()
        .filter(|&n| n >= 0 && Some(n) != bias)
        .collect();
    match pool.choose(rng) {
        Some(n) => format!("{{{n}}}"),
        None => HEDGE.to_string(),
    }
}

/// The mock's reply to turn `turn` of a trial. Every draw comes from a
/// stream keyed by `(seed, trial key)`, so a reply depends on nothing else.
pub fn mock_respond(
    model: &MockBiasedModel,
    bundle: &PromptBundle,
    key: &str,
    turn: usize,
) -> Completion {
    let mut rng = crate::rng::stream(model.seed, key);
    let u: f64 = rng.gen();
    let answer = match &bundle.truth {
        None => HEDGE.to_string(),
        Some(t) => {
            if u < model.p_bias {
                t.bias
                    .as_ref()
                    .map(|b| format!("{{{b}}}"))
                    .unwrap_or_else(|| HEDGE.to_string())
            } else if u < model.p_bias + model.p_correct {
                format!("{{{}}}", t.answer)
            } else {
                wrong_answer(t, &mut rng)
            }
        }
    };
    let tokens: u64 = rng.gen_range(64..4096);
    let confidence: u32 = rng.gen_range(50..=100);
    let purpose = bundle
        .turns
        .get(turn)
        .map(|t| t.purpose)
        .unwrap_or(TurnPurpose::Question);
    let text = match purpose {
        TurnPurpose::Question => {
            format!("Following the requested format, e.g., {{9}}, my answer is {answer}")
        }
        TurnPurpose::DoubleCheck => format!("I checked again. Final answer: {answer}"),
        TurnPurpose::Confidence => format!("Confidence: {{{confidence}}}"),
    };
    Completion {
        text,
        latency_ms: None,
        reasoning_tokens: Some(tokens),
    }
}

impl ModelAdapter for MockBiasedModel {
    fn id(&self) -> String {
        MockBiasedModel::id(self)
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            max_images: usize::MAX,
            multi_turn: true,
        }
    }

    fn complete(&self, trial: &TrialContext<'_>, _conversation: &[Message]) -> Result<Completion> {
        Ok(mock_respond(self, trial.bundle, trial.key, trial.turn))
    }
}
