//! Scores over a run store: accuracy, bias rate, pass@k, agreement-based
//! consistency, confidence, and reasoning-token bins.

pub mod report;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Error, Result};
use crate::harness::{TrialRecord, TrialStatus};
use crate::item::{Answer, Task};

pub use report::{build_report, emit_report, Report, ReportFormat, ReportOptions, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKey {
    Model,
    Task,
    Variant,
    Resolution,
    Mode,
    Question,
}

impl GroupKey {
    pub fn as_str(self) -> &'static str {
        match self {
            GroupKey::Model => "model",
            GroupKey::Task => "task",
            GroupKey::Variant => "variant",
            GroupKey::Resolution => "resolution",
            GroupKey::Mode => "mode",
            GroupKey::Question => "question",
        }
    }

    fn value(self, r: &TrialRecord) -> GroupValue {
        match self {
            GroupKey::Model => GroupValue::Text(r.model.clone()),
            GroupKey::Task => GroupValue::Task(r.task),
            GroupKey::Variant => GroupValue::Text(r.variant.to_string()),
            GroupKey::Resolution => GroupValue::Number(r.resolution as u64),
            GroupKey::Mode => GroupValue::Text(r.mode.clone()),
            GroupKey::Question => GroupValue::Text(r.question.to_string()),
        }
    }
}

impl FromStr for GroupKey {
    type Err = Error;
    fn from_str(s: &str) -> Result<GroupKey> {
        match s.trim() {
            "model" => Ok(GroupKey::Model),
            "task" => Ok(GroupKey::Task),
            "variant" => Ok(GroupKey::Variant),
            "resolution" => Ok(GroupKey::Resolution),
            "mode" => Ok(GroupKey::Mode),
            "question" => Ok(GroupKey::Question),
            _ => bail!(Argument, "unknown group key {s:?}"),
        }
    }
}

/// One grouping value. Tasks sort in column order (a–g) and resolutions
/// numerically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupValue {
    Task(Task),
    Number(u64),
    Text(String),
}

impl fmt::Display for GroupValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupValue::Task(t) => f.write_str(t.as_str()),
            GroupValue::Number(n) => write!(f, "{n}"),
            GroupValue::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub key: Vec<GroupValue>,
    /// Scored trials (transport failures excluded).
    pub n: usize,
    pub accuracy: f64,
    pub bias_rate: f64,
    pub unparsed: usize,
    pub transport_failed: usize,
    pub mean_confidence: Option<f64>,
    /// Trials with a confidence turn whose reply did not parse.
    pub confidence_missing: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    pub group_by: Vec<GroupKey>,
    pub rows: Vec<ScoreRow>,
}

/// Records that carry a gradable truth.
fn graded(r: &TrialRecord) -> bool {
    r.truth.is_some()
}

fn group<'a>(
    records: impl IntoIterator<Item = &'a TrialRecord>,
    by: &[GroupKey],
) -> BTreeMap<Vec<GroupValue>, Vec<&'a TrialRecord>> {
    let mut out: BTreeMap<Vec<GroupValue>, Vec<&TrialRecord>> = BTreeMap::new();
    for r in records {
        out.entry(by.iter().map(|k| k.value(r)).collect())
            .or_default()
            .push(r);
    }
    out
}

/// Accuracy and bias rate per group, both over all scored trials in the
/// group. Groups with no scored trial are omitted.
pub fn score(records: &[TrialRecord], group_by: &[GroupKey]) -> ScoreTable {
    let mut rows = Vec::new();
    for (key, recs) in group(records.iter().filter(|r| graded(r)), group_by) {
        let ok: Vec<&&TrialRecord> = recs
            .iter()
            .filter(|r| r.status == TrialStatus::Ok)
            .collect();
        if ok.is_empty() {
            continue;
        }
        let n = ok.len();
        let frac =
            |f: &dyn Fn(&TrialRecord) -> bool| ok.iter().filter(|r| f(r)).count() as f64 / n as f64;
        let with_conf_turn: Vec<&&&TrialRecord> = ok
            .iter()
            .filter(|r| r.mode.contains("confidence"))
            .collect();
        let confs: Vec<i64> = with_conf_turn.iter().filter_map(|r| r.confidence).collect();
        rows.push(ScoreRow {
            key,
            n,
            accuracy: frac(&|r| r.correct),
            bias_rate: frac(&|r| r.bias_match),
            unparsed: ok.iter().filter(|r| r.parsed.is_none()).count(),
            transport_failed: recs.len() - n,
            mean_confidence: (!confs.is_empty())
                .then(|| confs.iter().sum::<i64>() as f64 / confs.len() as f64),
            confidence_missing: with_conf_turn.len() - confs.len(),
        });
    }
    ScoreTable {
        group_by: group_by.to_vec(),
        rows,
    }
}

pub fn accuracy(records: &[TrialRecord], group_by: &[GroupKey]) -> ScoreTable {
    score(records, group_by)
}

pub fn bias_rate(records: &[TrialRecord], group_by: &[GroupKey]) -> ScoreTable {
    score(records, group_by)
}

/// Unweighted mean of per-task values.
pub fn macro_mean(per_task: &BTreeMap<Task, f64>) -> Option<f64> {
    (!per_task.is_empty()).then(|| per_task.values().sum::<f64>() / per_task.len() as f64)
}

/// Per-model, per-task accuracy and bias rate with the task mean.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TaskTable {
    pub models: BTreeMap<String, TaskRow>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TaskRow {
    pub accuracy: BTreeMap<Task, f64>,
    pub bias_rate: BTreeMap<Task, f64>,
}

impl TaskRow {
    pub fn accuracy_mean(&self) -> Option<f64> {
        macro_mean(&self.accuracy)
    }

    pub fn bias_mean(&self) -> Option<f64> {
        macro_mean(&self.bias_rate)
    }
}

pub fn task_table(records: &[TrialRecord]) -> TaskTable {
    let mut t = TaskTable::default();
    for row in score(records, &[GroupKey::Model, GroupKey::Task]).rows {
        let (GroupValue::Text(model), GroupValue::Task(task)) = (&row.key[0], &row.key[1]) else {
            continue;
        };
        let e = t.models.entry(model.clone()).or_default();
        e.accuracy.insert(*task, row.accuracy);
        e.bias_rate.insert(*task, row.bias_rate);
    }
    t
}

/// Per-model accuracy by resolution, each cell a macro mean over tasks.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResolutionTable {
    pub resolutions: Vec<u32>,
    pub models: BTreeMap<String, BTreeMap<u32, f64>>,
}

impl ResolutionTable {
    /// Highest minus lowest resolution, when both are present.
    pub fn delta(&self, model: &str) -> Option<f64> {
        let row = self.models.get(model)?;
        let lo = row.get(self.resolutions.first()?)?;
        let hi = row.get(self.resolutions.last()?)?;
        (self.resolutions.len() > 1).then(|| hi - lo)
    }

    pub fn mean(&self, model: &str) -> Option<f64> {
        let row = self.models.get(model)?;
        (!row.is_empty()).then(|| row.values().sum::<f64>() / row.len() as f64)
    }
}

pub fn resolution_table(records: &[TrialRecord]) -> ResolutionTable {
    let mut per: BTreeMap<(String, u32), BTreeMap<Task, f64>> = BTreeMap::new();
    for row in score(
        records,
        &[GroupKey::Model, GroupKey::Resolution, GroupKey::Task],
    )
    .rows
    {
        let (GroupValue::Text(m), GroupValue::Number(res), GroupValue::Task(task)) =
            (&row.key[0], &row.key[1], &row.key[2])
        else {
            continue;
        };
        per.entry((m.clone(), *res as u32))
            .or_default()
            .insert(*task, row.accuracy);
    }
    let mut t = ResolutionTable::default();
    for ((m, res), tasks) in per {
        if let Some(v) = macro_mean(&tasks) {
            t.models.entry(m).or_default().insert(res, v);
        }
        if !t.resolutions.contains(&res) {
            t.resolutions.push(res);
        }
    }
    t.resolutions.sort_unstable();
    t
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyRow {
    pub key: Vec<GroupValue>,
    /// Number of (bundle, model) units.
    pub items: usize,
    pub pass_at_k: f64,
    pub agreement: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyTable {
    pub k: usize,
    pub group_by: Vec<GroupKey>,
    pub rows: Vec<ConsistencyRow>,
}

/// First `k` runs of every (bundle, model) unit, ordered by run index.
/// Transport failures stay in as incorrect, unparsed runs.
fn units(records: &[TrialRecord], k: usize) -> Result<BTreeMap<(&str, &str), Vec<&TrialRecord>>> {
    if k == 0 {
        bail!(Argument, "k must be at least 1");
    }
    let mut out: BTreeMap<(&str, &str), Vec<&TrialRecord>> = BTreeMap::new();
    for r in records.iter().filter(|r| graded(r)) {
        out.entry((r.bundle.as_str(), r.model.as_str()))
            .or_default()
            .push(r);
    }
    for ((bundle, model), runs) in out.iter_mut() {
        if runs.len() < k {
            bail!(
                Argument,
                "{bundle} on {model} has {} runs, pass@{k} needs {k}",
                runs.len()
            );
        }
        runs.sort_by_key(|r| r.run);
        runs.truncate(k);
    }
    Ok(out)
}

/// Share of the most frequent answer among a unit's runs; unparsed replies
/// form one answer class of their own.
pub fn modal_share(answers: &[Option<Answer>]) -> f64 {
    let mut counts: Vec<(&Option<Answer>, usize)> = Vec::new();
    for a in answers {
        match counts.iter_mut().find(|(b, _)| *b == a) {
            Some((_, c)) => *c += 1,
            None => counts.push((a, 1)),
        }
    }
    let top = counts.iter().map(|(_, c)| *c).max().unwrap_or(0);
    top as f64 / answers.len().max(1) as f64
}

/// pass@k and agreement-based consistency per group.
pub fn consistency(
    records: &[TrialRecord],
    k: usize,
    group_by: &[GroupKey],
) -> Result<ConsistencyTable> {
    let units = units(records, k)?;
    let mut groups: BTreeMap<Vec<GroupValue>, (usize, usize, f64)> = BTreeMap::new();
    for runs in units.values() {
        let key: Vec<GroupValue> = group_by.iter().map(|g| g.value(runs[0])).collect();
        let e = groups.entry(key).or_default();
        e.0 += 1;
        if runs.iter().any(|r| r.correct) {
            e.1 += 1;
        }
        let answers: Vec<Option<Answer>> = runs.iter().map(|r| r.parsed.clone()).collect();
        e.2 += modal_share(&answers);
    }
    let rows = groups
        .into_iter()
        .map(|(key, (n, pass, agree))| ConsistencyRow {
            key,
            items: n,
            pass_at_k: pass as f64 / n as f64,
            agreement: agree / n as f64,
        })
        .collect();
    Ok(ConsistencyTable {
        k,
        group_by: group_by.to_vec(),
        rows,
    })
}

pub fn pass_at_k(
    records: &[TrialRecord],
    k: usize,
    group_by: &[GroupKey],
) -> Result<ConsistencyTable> {
    consistency(records, k, group_by)
}

pub fn agreement_consistency(
    records: &[TrialRecord],
    k: usize,
    group_by: &[GroupKey],
) -> Result<ConsistencyTable> {
    consistency(records, k, group_by)
}

pub const DEFAULT_BINS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct BinRow {
    pub lo: u64,
    pub hi: u64,
    pub n: usize,
    pub accuracy: f64,
    pub bias_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BinTable {
    pub rows: Vec<BinRow>,
    pub notice: Option<String>,
}

/// Quantile bins of reasoning-token counts. Equal counts always share a
/// bin, so fewer than `bins` rows may come back.
pub fn reasoning_bins(records: &[TrialRecord], bins: usize) -> Result<BinTable> {
    if bins == 0 {
        bail!(Argument, "bin count must be at least 1");
    }
    let mut pts: Vec<(u64, &TrialRecord)> = records
        .iter()
        .filter(|r| graded(r) && r.status == TrialStatus::Ok)
        .filter_map(|r| r.reasoning_tokens.map(|t| (t, r)))
        .collect();
    if pts.is_empty() {
        return Ok(BinTable {
            rows: Vec::new(),
            notice: Some("no records carry reasoning-token counts".into()),
        });
    }
    pts.sort_by_key(|(t, _)| *t);
    let n = pts.len();
    let mut edges: Vec<u64> = (1..bins).map(|b| pts[b * n / bins].0).collect();
    edges.dedup();
    let mut buckets: BTreeMap<usize, Vec<(u64, &TrialRecord)>> = BTreeMap::new();
    for p in pts {
        let b = edges.iter().filter(|&&e| e <= p.0).count();
        buckets.entry(b).or_default().push(p);
    }
    let rows = buckets
        .into_values()
        .map(|v| {
            let n = v.len();
            BinRow {
                lo: v[0].0,
                hi: v[n - 1].0,
                n,
                accuracy: v.iter().filter(|(_, r)| r.correct).count() as f64 / n as f64,
                bias_rate: v.iter().filter(|(_, r)| r.bias_match).count() as f64 / n as f64,
            }
        })
        .collect();
    Ok(BinTable { rows, notice: None })
}

/// Percentage with two decimals, ties rounded to even.
pub fn percent(x: f64) -> String {
    format!("{:.2}", (x * 10_000.0).round_ties_even() / 100.0)
}
