//! Running prompt bundles against a model and persisting one record per
//! trial.

pub mod endpoint;
pub mod mock;
pub mod parse;

use std::collections::{BTreeMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Error, Result};
use crate::item::{Answer, Task, VariantKind};
use crate::prompts::{Part, PromptBundle, QuestionId, TurnPurpose};
pub use endpoint::{EndpointAdapter, EndpointConfig};
pub use mock::{mock_respond, MockBiasedModel};
pub use parse::{parse_answer, parse_confidence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub role: Role,
    /// Image parts hold resolved file paths.
    pub parts: Vec<Part>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capabilities {
    pub max_images: usize,
    pub multi_turn: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub text: String,
    pub latency_ms: Option<u64>,
    pub reasoning_tokens: Option<u64>,
}

/// What an adapter is told about the trial besides the conversation.
#[derive(Debug, Clone, Copy)]
pub struct TrialContext<'a> {
    pub key: &'a str,
    pub bundle: &'a PromptBundle,
    /// Index of the user turn being answered.
    pub turn: usize,
}

/// A chat-with-images model. `Error::Transport` marks a failure worth
/// retrying; any other error fails the trial immediately.
pub trait ModelAdapter: Send + Sync {
    fn id(&self) -> String;
    fn capabilities(&self) -> Capabilities;
    fn complete(&self, trial: &TrialContext<'_>, conversation: &[Message]) -> Result<Completion>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialStatus {
    Ok,
    TransportFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub key: String,
    pub bundle: String,
    pub item: String,
    pub item_id: String,
    pub task: Task,
    pub variant: VariantKind,
    pub resolution: u32,
    pub question: QuestionId,
    pub mode: String,
    pub model: String,
    pub run: u32,
    pub status: TrialStatus,
    /// Reply to the answer-bearing turn.
    pub response: String,
    /// Replies to every turn, in order.
    pub responses: Vec<String>,
    /// `None` when unparsed.
    pub parsed: Option<Answer>,
    pub truth: Option<Answer>,
    pub bias: Option<Answer>,
    pub correct: bool,
    pub bias_match: bool,
    pub confidence: Option<i64>,
    pub latency_ms: Option<u64>,
    pub reasoning_tokens: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub fn trial_key(bundle: &PromptBundle, model: &str, run: u32) -> String {
    format!(
        "{}|{}|{}|{}|{}|{model}|{run}",
        bundle.item_id, bundle.variant, bundle.resolution, bundle.question, bundle.mode
    )
}

/// Append-only JSON-lines store of trial records.
pub struct RunStore {
    path: PathBuf,
    keys: HashSet<String>,
    out: BufWriter<File>,
}

impl RunStore {
    /// Opens (creating if needed) and indexes existing keys for resuming.
    pub fn open(path: &Path) -> Result<RunStore> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let keys = if path.exists() {
            read_records(path)?.into_iter().map(|r| r.key).collect()
        } else {
            HashSet::new()
        };
        let f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        Ok(RunStore {
            path: path.to_path_buf(),
            keys,
            out: BufWriter::new(f),
        })
    }

    pub fn contains(&self, key: &str) -> bool {
        self.keys.contains(key)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn append(&mut self, rec: &TrialRecord) -> Result<()> {
        if !self.keys.insert(rec.key.clone()) {
            bail!(Validation, "duplicate trial key {}", rec.key);
        }
        let line = crate::jsonl::to_line(rec)?;
        writeln!(self.out, "{line}").map_err(|e| Error::io(&self.path, e))?;
        self.out.flush().map_err(|e| Error::io(&self.path, e))
    }
}

pub fn read_records(path: &Path) -> Result<Vec<TrialRecord>> {
    crate::jsonl::read(path)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub base_delay_ms: u64,
    pub max_delay_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_retries: 4,
            base_delay_ms: 500,
            max_delay_ms: 30_000,
        }
    }
}

impl RetryPolicy {
    /// Delay before retry number `attempt` (0-based): base·2^attempt, capped.
    pub fn delay(&self, attempt: u32) -> Duration {
        let ms = self.base_delay_ms.saturating_mul(1u64 << attempt.min(20));
        Duration::from_millis(ms.min(self.max_delay_ms))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub runs: u32,
    pub parallelism: usize,
    pub retry: RetryPolicy,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            runs: 1,
            parallelism: 4,
            retry: RetryPolicy::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub written: usize,
    pub skipped: usize,
    pub transport_failed: usize,
}

fn resolve(root: &Path, image: &str) -> String {
    let p = Path::new(image);
    if p.is_absolute() {
        image.to_string()
    } else {
        root.join(p).to_string_lossy().into_owned()
    }
}

fn with_retry(
    adapter: &dyn ModelAdapter,
    trial: &TrialContext<'_>,
    conversation: &[Message],
    policy: &RetryPolicy,
) -> Result<Completion> {
    let mut attempt = 0;
    loop {
        match adapter.complete(trial, conversation) {
            Err(Error::Transport(_)) if attempt < policy.max_retries => {
                std::thread::sleep(policy.delay(attempt));
                attempt += 1;
            }
            other => return other,
        }
    }
}

/// Runs every turn of one trial and scores the reply.
pub fn run_trial(
    bundle: &PromptBundle,
    adapter: &dyn ModelAdapter,
    model: &str,
    run: u32,
    root: &Path,
    policy: &RetryPolicy,
) -> TrialRecord {
    let key = trial_key(bundle, model, run);
    let mut conversation: Vec<Message> = Vec::new();
    let mut responses = Vec::new();
    let mut latency: Option<u64> = None;
    let mut tokens: Option<u64> = None;
    let mut failure = None;
    let turns = if adapter.capabilities().multi_turn {
        bundle.turns.len()
    } else {
        1
    };
    for (i, turn) in bundle.turns.iter().take(turns).enumerate() {
        let parts = turn
            .parts
            .iter()
            .map(|p| match p {
                Part::Image(img) => Part::Image(resolve(root, img)),
                t => t.clone(),
            })
            .collect();
        conversation.push(Message {
            role: Role::User,
            parts,
        });
        let trial = TrialContext {
            key: &key,
            bundle,
            turn: i,
        };
        match with_retry(adapter, &trial, &conversation, policy) {
            Ok(c) => {
                if let Some(ms) = c.latency_ms {
                    latency = Some(latency.unwrap_or(0) + ms);
                }
                if let Some(t) = c.reasoning_tokens {
                    tokens = Some(tokens.unwrap_or(0) + t);
                }
                conversation.push(Message {
                    role: Role::Assistant,
                    parts: vec![Part::Text(c.text.clone())],
                });
                responses.push(c.text);
            }
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    let truth = bundle.truth.as_ref().map(|t| t.answer.clone());
    let bias = bundle.truth.as_ref().and_then(|t| t.bias.clone());
    let mut rec = TrialRecord {
        key,
        bundle: bundle.id.clone(),
        item: bundle.item.clone(),
        item_id: bundle.item_id.clone(),
        task: bundle.task,
        variant: bundle.variant,
        resolution: bundle.resolution,
        question: bundle.question,
        mode: bundle.mode.label(),
        model: model.to_string(),
        run,
        status: TrialStatus::Ok,
        response: String::new(),
        responses: Vec::new(),
        parsed: None,
        truth,
        bias,
        correct: false,
        bias_match: false,
        confidence: None,
        latency_ms: latency,
        reasoning_tokens: tokens,
        error: None,
    };
    if let Some(e) = failure {
        rec.status = TrialStatus::TransportFailed;
        rec.error = Some(e.to_string());
        rec.responses = responses;
        return rec;
    }
    let answer_turn = bundle
        .turns
        .iter()
        .take(responses.len())
        .rposition(|t| t.purpose != TurnPurpose::Confidence)
        .unwrap_or(0);
    rec.response = responses.get(answer_turn).cloned().unwrap_or_default();
    rec.parsed = parse_answer(&rec.response, bundle.expected_kind);
    if let Some(ci) = bundle
        .turns
        .iter()
        .position(|t| t.purpose == TurnPurpose::Confidence)
    {
        rec.confidence = responses.get(ci).and_then(|r| parse_confidence(r));
    }
    if let Some(p) = &rec.parsed {
        rec.correct = rec.truth.as_ref().is_some_and(|t| t.matched_by(p));
        rec.bias_match = rec.bias.as_ref().is_some_and(|b| b.matched_by(p));
    }
    rec.responses = responses;
    rec
}

/// Runs every (bundle, run) pair not already in the store. Trials execute
/// on `parallelism` worker threads; records are appended in canonical
/// order (bundle order, then run index) whatever order they finish in.
pub fn run_eval(
    bundles: &[PromptBundle],
    adapter: &dyn ModelAdapter,
    cfg: &RunConfig,
    root: &Path,
    store: &mut RunStore,
) -> Result<RunSummary> {
    if cfg.runs == 0 {
        bail!(Argument, "runs per item must be at least 1");
    }
    let model = adapter.id();
    let max_images = adapter.capabilities().max_images;
    let mut summary = RunSummary::default();
    let mut pending: Vec<(&PromptBundle, u32)> = Vec::new();
    for b in bundles {
        let images: usize = b.turns.iter().map(|t| t.images().count()).sum();
        if images > max_images {
            bail!(
                Argument,
                "{} attaches {images} images; {model} accepts {max_images}",
                b.id
            );
        }
        for run in 0..cfg.runs {
            if store.contains(&trial_key(b, &model, run)) {
                summary.skipped += 1;
            } else {
                pending.push((b, run));
            }
        }
    }
    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let workers = cfg.parallelism.clamp(1, pending.len().max(1));
    let (tx, rx) = mpsc::channel::<(usize, TrialRecord)>();
    std::thread::scope(|s| -> Result<()> {
        for _ in 0..workers {
            let tx = tx.clone();
            let (pending, next, stop, model) = (&pending, &next, &stop, &model);
            s.spawn(move || loop {
                if stop.load(Ordering::Relaxed) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(b, run)) = pending.get(i) else {
                    break;
                };
                let rec = run_trial(b, adapter, model, run, root, &cfg.retry);
                if tx.send((i, rec)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        let mut buffer: BTreeMap<usize, TrialRecord> = BTreeMap::new();
        let mut want = 0;
        for (i, rec) in rx {
            buffer.insert(i, rec);
            while let Some(rec) = buffer.remove(&want) {
                if let Err(e) = store.append(&rec) {
                    stop.store(true, Ordering::Relaxed);
                    return Err(e);
                }
                if rec.status == TrialStatus::TransportFailed {
                    summary.transport_failed += 1;
                }
                summary.written += 1;
                want += 1;
            }
        }
        Ok(())
    })?;
    Ok(summary)
}
