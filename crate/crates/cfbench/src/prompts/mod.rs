//! Prompt protocols: per-task question templates, the helpful-prompt modes
//! that wrap them, and sanity-check prompts on unmodified subjects.

pub mod photo;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Error, Result};
use crate::gen::boards::{Axis, GridGame, PieceParams};
use crate::gen::grids;
use crate::gen::illusions::IllusionKind;
use crate::gen::Modification;
use crate::item::{Answer, AnswerKind, StimulusItem, Task, TaskParams, Truth, VariantKind, YesNo};
use photo::LogoBrand;

pub const COUNT_FORMAT: &str = "Answer with a number in curly brackets, e.g., {9}.";
pub const YES_NO_FORMAT: &str = "Answer in curly brackets, e.g., {Yes} or {No}.";
pub const DEBIASED: &str =
    "Do not assume from prior knowledge and answer only based on what is visible in the image.";
pub const DOUBLE_CHECK: &str =
    "Please double-check your answer and give your final answer in curly brackets, following the format above.";
pub const CONFIDENCE: &str =
    "On a scale of 0-100, how confident are you in your previous answer? Answer with a number in curly brackets.";
pub const FEW_SHOT_WRAPPER: &str =
    "Based on the examples provided above, please answer the following question:";
pub const SIDE_BY_SIDE_INTRO: &str = "Compare the two images side by side.";
pub const SIDE_BY_SIDE_FORMAT: &str =
    "Return the final Yes/No answer in curly brackets (e.g., {Yes} or {No}).";
pub const ILLUSION_RECALL: &str =
    "What question does this illusion typically ask, and what is the correct answer?";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuestionId {
    Q1,
    Q2,
    Q3,
    SanityId,
    SanityCount,
}

impl QuestionId {
    pub const MAIN: [QuestionId; 3] = [QuestionId::Q1, QuestionId::Q2, QuestionId::Q3];

    pub fn as_str(self) -> &'static str {
        match self {
            QuestionId::Q1 => "q1",
            QuestionId::Q2 => "q2",
            QuestionId::Q3 => "q3",
            QuestionId::SanityId => "sanity_id",
            QuestionId::SanityCount => "sanity_count",
        }
    }
}

impl fmt::Display for QuestionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QuestionId {
    type Err = Error;
    fn from_str(s: &str) -> Result<QuestionId> {
        match s.trim().to_ascii_lowercase().as_str() {
            "q1" => Ok(QuestionId::Q1),
            "q2" => Ok(QuestionId::Q2),
            "q3" => Ok(QuestionId::Q3),
            "sanity_id" => Ok(QuestionId::SanityId),
            "sanity_count" => Ok(QuestionId::SanityCount),
            _ => bail!(Argument, "unknown question {s:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    Text(String),
    /// Image path, relative to the output root unless absolute.
    Image(String),
}

/// What a user turn asks for. The scored answer comes from the last
/// non-confidence turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TurnPurpose {
    Question,
    DoubleCheck,
    Confidence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Turn {
    pub purpose: TurnPurpose,
    pub parts: Vec<Part>,
}

impl Turn {
    fn text_only(purpose: TurnPurpose, text: &str) -> Turn {
        Turn {
            purpose,
            parts: vec![Part::Text(text.to_string())],
        }
    }

    pub fn text(&self) -> String {
        let texts: Vec<&str> = self
            .parts
            .iter()
            .filter_map(|p| match p {
                Part::Text(t) => Some(t.as_str()),
                Part::Image(_) => None,
            })
            .collect();
        texts.join("\n")
    }

    pub fn images(&self) -> impl Iterator<Item = &str> {
        self.parts.iter().filter_map(|p| match p {
            Part::Image(i) => Some(i.as_str()),
            Part::Text(_) => None,
        })
    }
}

/// One trial's user turns; assistant replies are interleaved at run time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptBundle {
    /// `<item file id>|<question>|<mode>`.
    pub id: String,
    /// Manifest row id (one file).
    pub item: String,
    pub item_id: String,
    pub task: Task,
    pub variant: VariantKind,
    pub resolution: u32,
    pub question: QuestionId,
    pub mode: PromptMode,
    pub turns: Vec<Turn>,
    pub expected_kind: AnswerKind,
    /// `None` for free-form sanity prompts that need manual review.
    pub truth: Option<Truth>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FewShot {
    pub k: usize,
    pub strong_labels: bool,
    pub hint: bool,
}

impl Default for FewShot {
    fn default() -> Self {
        FewShot {
            k: 2,
            strong_labels: false,
            hint: false,
        }
    }
}

/// A combination of prompt modifiers. The empty combination is `baseline`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PromptMode {
    pub non_neutral: bool,
    pub locate: bool,
    pub few_shot: Option<FewShot>,
    pub debiased: bool,
    pub side_by_side: bool,
    pub double_check: bool,
    pub confidence: bool,
}

impl PromptMode {
    pub fn baseline() -> PromptMode {
        PromptMode::default()
    }

    /// Canonical label; parsing it gives back the same mode.
    pub fn label(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        if self.non_neutral {
            parts.push("non_neutral".into());
        }
        if self.locate {
            parts.push("locate_then_count".into());
        }
        if let Some(f) = self.few_shot {
            let mut s = format!("few_shot_k{}", f.k);
            if f.strong_labels {
                s.push_str("_strong");
            }
            if f.hint {
                s.push_str("_hint");
            }
            parts.push(s);
        }
        if self.debiased {
            parts.push("debiased".into());
        }
        if self.side_by_side {
            parts.push("side_by_side".into());
        }
        if self.double_check {
            parts.push("double_check".into());
        }
        if self.confidence {
            parts.push("confidence_followup".into());
        }
        if parts.is_empty() {
            "baseline".into()
        } else {
            parts.join("+")
        }
    }

    /// Whether this mode can be applied to `question` on `item`, ignoring
    /// the availability of few-shot examples and reference images.
    pub fn check(&self, item: &StimulusItem, question: QuestionId) -> Result<()> {
        if matches!(question, QuestionId::SanityId | QuestionId::SanityCount) {
            bail!(
                Argument,
                "sanity prompts are built by sanity_prompts, not render_prompt"
            );
        }
        let yes_no = question == QuestionId::Q3 || item.task == Task::Illusions;
        if self.locate && yes_no {
            bail!(
                Argument,
                "locate-then-count needs a counting question, not {question} on {}",
                item.task
            );
        }
        if self.few_shot.is_some() && yes_no {
            bail!(
                Argument,
                "few-shot labels are counts; {question} on {} is a Yes/No question",
                item.task
            );
        }
        if let Some(f) = self.few_shot {
            if f.k == 0 {
                bail!(Argument, "few-shot needs k >= 1");
            }
            if f.hint && !f.strong_labels {
                // The hint strategy builds on strong labels.
                bail!(Argument, "few-shot hint requires strong labels");
            }
        }
        if self.non_neutral && question == QuestionId::Q3 {
            bail!(Argument, "non-neutral prompts rewrite Q1/Q2 only");
        }
        if self.side_by_side {
            if self.few_shot.is_some() || self.locate || self.non_neutral {
                bail!(
                    Argument,
                    "side-by-side does not combine with few-shot, locate or non-neutral"
                );
            }
            if item.task == Task::Illusions {
                bail!(
                    Argument,
                    "side-by-side needs an original/counterfactual pairing; illusions have none"
                );
            }
            if question == QuestionId::Q3 {
                bail!(
                    Argument,
                    "side-by-side replaces a counting question, not Q3"
                );
            }
            if item.reference.is_none() {
                bail!(
                    Argument,
                    "item {} has no original image to pair with",
                    item.id
                );
            }
        }
        Ok(())
    }
}

impl fmt::Display for PromptMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl From<PromptMode> for String {
    fn from(m: PromptMode) -> String {
        m.label()
    }
}

impl TryFrom<String> for PromptMode {
    type Error = Error;
    fn try_from(s: String) -> Result<PromptMode> {
        s.parse()
    }
}

impl FromStr for PromptMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<PromptMode> {
        let mut m = PromptMode::default();
        let mut seen = std::collections::BTreeSet::new();
        for raw in s.split('+') {
            let tok = raw.trim().to_ascii_lowercase().replace('-', "_");
            let key = if tok.starts_with("few_shot") {
                "few_shot".to_string()
            } else {
                tok.clone()
            };
            if !seen.insert(key) {
                bail!(Argument, "mode {tok:?} given twice in {s:?}");
            }
            match tok.as_str() {
                "baseline" => {}
                "non_neutral" => m.non_neutral = true,
                "locate" | "locate_then_count" => m.locate = true,
                "debiased" => m.debiased = true,
                "side_by_side" => m.side_by_side = true,
                "double_check" => m.double_check = true,
                "confidence" | "confidence_followup" => m.confidence = true,
                t if t.starts_with("few_shot") => {
                    let mut f = FewShot::default();
                    for opt in t["few_shot".len()..].split('_').filter(|o| !o.is_empty()) {
                        match opt {
                            "strong" => f.strong_labels = true,
                            "hint" => f.hint = true,
                            o if o.starts_with('k') => {
                                f.k = o[1..].parse().map_err(|_| {
                                    Error::Argument(format!("bad few-shot size in {t:?}"))
                                })?;
                            }
                            o => bail!(Argument, "unknown few-shot option {o:?}"),
                        }
                    }
                    m.few_shot = Some(f);
                }
                _ => bail!(Argument, "unknown prompt mode {tok:?}"),
            }
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonNeutralRule {
    pub find: String,
    /// `{subject}` is replaced by the item's subject name.
    pub replace: String,
}

/// Per-task noun-phrase rewrites for non-neutral prompts. The first rule
/// whose `find` occurs in the question is applied once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonNeutralTable {
    pub rules: BTreeMap<Task, Vec<NonNeutralRule>>,
}

impl Default for NonNeutralTable {
    fn default() -> Self {
        let r = |find: &str, replace: &str| NonNeutralRule {
            find: find.into(),
            replace: replace.into(),
        };
        let illusion = [
            "red circles",
            "vertical lines",
            "horizontal lines",
            "line segments",
            "diagonal lines",
        ]
        .iter()
        .map(|f| r(f, &format!("{f} in this {{subject}}")))
        .collect();
        let rules = BTreeMap::from([
            (Task::Animals, vec![r("this animal", "this {subject}")]),
            (
                Task::Logos,
                vec![
                    r("the left shoe", "the left {subject} shoe"),
                    r("this car", "this {subject} car"),
                ],
            ),
            (Task::Flags, vec![r("this flag", "this {subject} flag")]),
            (
                Task::ChessPieces,
                vec![r("this board", "this {subject} board")],
            ),
            (
                Task::GameBoards,
                vec![
                    r("this board", "this {subject} board"),
                    r("this puzzle", "this {subject} puzzle"),
                ],
            ),
            (Task::Illusions, illusion),
            (Task::Grids, vec![r("in cell", "in the {subject} cell")]),
        ]);
        NonNeutralTable { rules }
    }
}

impl NonNeutralTable {
    pub fn apply(&self, task: Task, text: &str, subject: &str) -> Result<String> {
        let rules = self.rules.get(&task).map(Vec::as_slice).unwrap_or(&[]);
        for rule in rules {
            if !rule.find.is_empty() && text.contains(&rule.find) {
                return Ok(text.replacen(
                    &rule.find,
                    &rule.replace.replace("{subject}", subject),
                    1,
                ));
            }
        }
        bail!(Argument, "no non-neutral rule for {task} matches {text:?}")
    }
}

/// Everything render_prompt needs beyond the item itself.
#[derive(Debug, Clone, Copy)]
pub struct PromptContext<'a> {
    pub seed: u64,
    /// Candidate few-shot examples.
    pub items: &'a [StimulusItem],
    /// Unmodified reference images (side-by-side pairing, few-shot).
    pub references: &'a [StimulusItem],
    pub non_neutral: &'a NonNeutralTable,
}

/// Task-specific wording for one item.
#[derive(Debug, Clone)]
struct Slots {
    q1: String,
    q2: String,
    q3: String,
    /// Counted element, singular and plural; empty for illusions.
    noun: (String, String),
    /// Few-shot label with `{n}` for the count phrase.
    label: String,
    /// The thing named by the few-shot hint.
    thing: String,
    /// Side-by-side question body.
    compare: String,
}

fn count_phrase(n: i64, noun: &(String, String)) -> String {
    format!("{n} {}", if n == 1 { &noun.0 } else { &noun.1 })
}

fn pair(sg: impl Into<String>, pl: impl Into<String>) -> (String, String) {
    (sg.into(), pl.into())
}

fn piece_noun(p: &PieceParams) -> (String, String) {
    match (p.modification, p.replacement) {
        (Modification::Replace, Some(t)) => pair(
            format!("{} piece", t.title()),
            format!("{} pieces", t.title()),
        ),
        _ => {
            let g = p.game.as_str();
            pair(format!("{g} piece"), format!("{g} pieces"))
        }
    }
}

fn gridboard_q3(game: GridGame) -> &'static str {
    match game {
        GridGame::Chess => "Is this a 8×8 Chessboard?",
        GridGame::Xiangqi => "Is this a 10×9 Xiangqi board?",
        GridGame::Sudoku => "Is this a 9×9 Sudoku puzzle?",
        GridGame::Go => "Is this a 19×19 Go board?",
    }
}

fn gridboard_noun(game: GridGame, axis: Axis) -> (String, String) {
    match (game.counts_lines(), axis) {
        (true, Axis::Row) => pair("horizontal line", "horizontal lines"),
        (true, Axis::Col) => pair("vertical line", "vertical lines"),
        (false, Axis::Row) => pair("row", "rows"),
        (false, Axis::Col) => pair("column", "columns"),
    }
}

fn illusion_questions(kind: IllusionKind) -> (&'static str, &'static str) {
    match kind {
        IllusionKind::Ebbinghaus => (
            "Are the two red circles equal in size?",
            "Do the two red circles have the same size?",
        ),
        IllusionKind::MullerLyer | IllusionKind::Ponzo => (
            "Are the two horizontal lines equal in length?",
            "Do the two horizontal lines have the same length?",
        ),
        IllusionKind::VerticalHorizontal => (
            "Are the horizontal and vertical lines equal in length?",
            "Do the horizontal and vertical lines have the same length?",
        ),
        IllusionKind::Zollner => (
            "Are the two horizontal lines parallel?",
            "Do the two horizontal lines run parallel?",
        ),
        IllusionKind::Poggendorff => (
            "Are the two diagonal line segments aligned?",
            "Do the two diagonal lines form a straight line?",
        ),
    }
}

fn bias_int(item: &StimulusItem) -> Result<i64> {
    match item.truth.primary.bias.as_ref().and_then(Answer::as_int) {
        Some(n) => Ok(n),
        None => bail!(Validation, "item {} has no integer bias answer", item.id),
    }
}

fn slots(item: &StimulusItem) -> Result<Slots> {
    let s = match &item.params {
        TaskParams::Flag(p) => {
            let noun = pair(p.element.tag(), p.element.plural());
            Slots {
                q1: format!("How many {} are there on this flag?", noun.1),
                q2: format!("Count the {} on this flag.", noun.1),
                q3: format!("Is this the flag of {}?", p.country_label),
                label: "This flag has {n}".into(),
                thing: "flag".into(),
                compare: format!(
                    "Do the flags in image 1 and image 2 have the same number of {}?",
                    noun.1
                ),
                noun,
            }
        }
        TaskParams::Piece(p) => {
            let noun = piece_noun(p);
            // Q2 keeps the question mark of the published replace wording.
            let q2_end = if p.modification == Modification::Replace {
                "?"
            } else {
                "."
            };
            Slots {
                q1: format!("How many {} are there on this board?", noun.1),
                q2: format!("Count the {} on this board{q2_end}", noun.1),
                q3: format!("Is this the {} starting position?", p.game.as_str()),
                label: "This board has {n}".into(),
                thing: "board".into(),
                compare: format!(
                    "Do the boards in image 1 and image 2 have the same number of {}?",
                    noun.1
                ),
                noun,
            }
        }
        TaskParams::GridBoard(p) => {
            let noun = gridboard_noun(p.game, p.axis().unwrap_or(Axis::Row));
            let place = if p.game == GridGame::Sudoku {
                "puzzle"
            } else {
                "board"
            };
            Slots {
                q1: format!("How many {} are there on this {place}?", noun.1),
                q2: format!("Count the {} on this {place}.", noun.1),
                q3: gridboard_q3(p.game).into(),
                label: format!("This {place} has {{n}}"),
                thing: place.into(),
                compare: format!(
                    "Do the {place}s in image 1 and image 2 have the same number of {}?",
                    noun.1
                ),
                noun,
            }
        }
        TaskParams::Illusion(p) => {
            let (q1, q2) = illusion_questions(p.kind);
            Slots {
                q1: q1.into(),
                q2: q2.into(),
                q3: format!("Is this an example of the {} illusion?", p.kind.display()),
                noun: pair("", ""),
                label: String::new(),
                thing: "illusion".into(),
                compare: String::new(),
            }
        }
        TaskParams::Grid(p) => {
            let (r, c) = p.query_cell();
            let base = grids::base_count(r, c, p.g)?;
            let id = p.cell_id();
            let pl = p.style.noun();
            let noun = pair(pl.trim_end_matches('s'), pl);
            Slots {
                q1: format!("How many {pl} are there in cell {id}?"),
                q2: format!("Count the {pl} in cell {id}."),
                q3: format!("Does cell {id} contain {base} {pl}?"),
                label: format!("Cell {id} of this grid has {{n}}"),
                thing: "grid cell".into(),
                compare: format!(
                    "Does cell {id} contain the same number of {pl} in image 1 and image 2?"
                ),
                noun,
            }
        }
        TaskParams::Photo(p) => match item.task {
            Task::Animals => Slots {
                q1: "How many legs does this animal have?".into(),
                q2: "Count the legs of this animal.".into(),
                q3: format!("Is this an animal with {} legs?", bias_int(item)?),
                noun: pair("leg", "legs"),
                label: "This is a {n}-legged animal".into(),
                thing: "animal".into(),
                compare: "Do the animals in image 1 and image 2 have the same number of legs?"
                    .into(),
            },
            Task::Logos => {
                let Some(brand) = p.brand else {
                    bail!(Validation, "logo item {} has no brand", item.id);
                };
                let (sg, pl) = brand.element();
                let (phrase, location, q3) = if brand.is_shoe() {
                    let phrase = match &p.element_color {
                        Some(c) => format!("visible {c} {pl}"),
                        None => format!("visible {pl}"),
                    };
                    let q3 = format!("Are the logos on these shoes {} logos?", brand.display());
                    (phrase, "in the logo of the left shoe", q3)
                } else {
                    let loc = if brand == LogoBrand::Mercedes {
                        "on the star in the logo of this car"
                    } else {
                        "in the logo of this car"
                    };
                    (
                        pl.to_string(),
                        loc,
                        format!("Is the logo on this car {} logo?", brand.display()),
                    )
                };
                Slots {
                    q1: format!("How many {phrase} are there {location}?"),
                    q2: format!("Count the {phrase} {location}."),
                    q3,
                    noun: pair(sg, pl),
                    label: "This logo has {n}".into(),
                    thing: "logo".into(),
                    compare: format!(
                        "Do the logos in image 1 and image 2 have the same number of {pl}?"
                    ),
                }
            }
            t => bail!(Validation, "photo parameters on a {t} item"),
        },
    };
    Ok(s)
}

fn example_label(ex: &StimulusItem, strong: bool) -> Result<String> {
    let Some(n) = ex.truth.primary.answer.as_int() else {
        bail!(Argument, "few-shot example {} has no count", ex.id);
    };
    let s = slots(ex)?;
    let mut label = s
        .label
        .replace("{n}-", &format!("{n}-"))
        .replace("{n}", &count_phrase(n, &s.noun));
    if strong {
        label.push_str(", which has been verified");
    }
    label.push('.');
    Ok(label)
}

fn few_shot_examples<'a>(
    item: &StimulusItem,
    question: QuestionId,
    k: usize,
    ctx: &PromptContext<'a>,
) -> Result<Vec<&'a StimulusItem>> {
    let mut pool: Vec<&StimulusItem> = ctx
        .items
        .iter()
        .chain(ctx.references)
        .filter(|c| {
            c.task == item.task
                && c.variant == item.variant
                && c.resolution == item.resolution
                && c.item_id != item.item_id
                && Some(&c.item_id) != item.reference.as_ref()
                && c.truth.primary.answer.as_int().is_some()
        })
        .collect();
    pool.sort_by(|a, b| a.id.cmp(&b.id));
    pool.dedup_by(|a, b| a.id == b.id);
    if pool.len() < k {
        bail!(
            Argument,
            "{} has {} few-shot candidates, {k} requested",
            item.id,
            pool.len()
        );
    }
    let mut rng = crate::rng::stream(ctx.seed, &format!("few_shot/{}/{question}", item.id));
    let mut chosen: Vec<&StimulusItem> = pool.choose_multiple(&mut rng, k).copied().collect();
    chosen.shuffle(&mut rng);
    Ok(chosen)
}

fn find_reference<'a>(item: &StimulusItem, ctx: &PromptContext<'a>) -> Result<&'a StimulusItem> {
    let Some(rid) = &item.reference else {
        bail!(
            Argument,
            "item {} has no original image to pair with",
            item.id
        );
    };
    let candidates = || {
        ctx.references
            .iter()
            .chain(ctx.items)
            .filter(|r| &r.item_id == rid && r.resolution == item.resolution)
    };
    candidates()
        .find(|r| r.variant == item.variant)
        .or_else(|| candidates().find(|r| r.variant == VariantKind::Baseline))
        .ok_or_else(|| {
            Error::Argument(format!(
                "reference {rid} at {}px not found for {}",
                item.resolution, item.id
            ))
        })
}

/// Instantiates one question for one item under a prompt mode.
pub fn render_prompt(
    item: &StimulusItem,
    question: QuestionId,
    mode: &PromptMode,
    ctx: &PromptContext<'_>,
) -> Result<PromptBundle> {
    mode.check(item, question)?;
    let s = slots(item)?;
    let (mut stem, mut truth) = match question {
        QuestionId::Q1 => (s.q1.clone(), item.truth.primary.clone()),
        QuestionId::Q2 => (s.q2.clone(), item.truth.primary.clone()),
        QuestionId::Q3 => (s.q3.clone(), item.truth.q3.clone()),
        _ => unreachable!("rejected by check"),
    };
    let mut kind = truth.answer.kind();
    if mode.side_by_side {
        stem = format!("{SIDE_BY_SIDE_INTRO} {}", s.compare);
        truth = Truth::yes_no(YesNo::No);
        kind = AnswerKind::YesNo;
    }
    if mode.non_neutral {
        stem = ctx.non_neutral.apply(item.task, &stem, &item.subject)?;
    }
    let mut body = if mode.locate {
        format!(
            "{stem} First, locate each {} individually, count them one by one, and then state the final number in curly brackets, e.g., {{9}}.",
            s.noun.0
        )
    } else if mode.side_by_side {
        format!("{stem} {SIDE_BY_SIDE_FORMAT}")
    } else {
        let fmt = if kind == AnswerKind::YesNo {
            YES_NO_FORMAT
        } else {
            COUNT_FORMAT
        };
        format!("{stem} {fmt}")
    };
    if mode.few_shot.is_some_and(|f| f.hint) {
        body = format!(
            "HINT: This is a {} with an unusual number of {}. {body}",
            s.thing, s.noun.1
        );
    }
    if mode.debiased {
        body = format!("{DEBIASED} {body}");
    }

    let mut parts = Vec::new();
    if let Some(f) = mode.few_shot {
        for ex in few_shot_examples(item, question, f.k, ctx)? {
            parts.push(Part::Image(ex.image.clone()));
            parts.push(Part::Text(example_label(ex, f.strong_labels)?));
        }
        parts.push(Part::Text(FEW_SHOT_WRAPPER.into()));
    }
    if mode.side_by_side {
        parts.push(Part::Image(find_reference(item, ctx)?.image.clone()));
    }
    parts.push(Part::Image(item.image.clone()));
    parts.push(Part::Text(body));

    let mut turns = vec![Turn {
        purpose: TurnPurpose::Question,
        parts,
    }];
    if mode.double_check {
        turns.push(Turn::text_only(TurnPurpose::DoubleCheck, DOUBLE_CHECK));
    }
    if mode.confidence {
        turns.push(Turn::text_only(TurnPurpose::Confidence, CONFIDENCE));
    }
    Ok(PromptBundle {
        id: format!("{}|{question}|{}", item.id, mode.label()),
        item: item.id.clone(),
        item_id: item.item_id.clone(),
        task: item.task,
        variant: item.variant,
        resolution: item.resolution,
        question,
        mode: *mode,
        turns,
        expected_kind: kind,
        truth: Some(truth),
    })
}

/// Every applicable (item, question, mode) bundle, item-major. Combinations
/// a mode does not apply to (e.g. locate-then-count on a Yes/No question)
/// are skipped.
pub fn compile(
    items: &[StimulusItem],
    questions: &[QuestionId],
    modes: &[PromptMode],
    ctx: &PromptContext<'_>,
) -> Result<Vec<PromptBundle>> {
    let mut out = Vec::new();
    for item in items {
        for &q in questions {
            for mode in modes {
                if mode.check(item, q).is_ok() {
                    out.push(render_prompt(item, q, mode, ctx)?);
                }
            }
        }
    }
    Ok(out)
}

fn sanity_bundle(
    item: &StimulusItem,
    question: QuestionId,
    text: String,
    kind: AnswerKind,
    truth: Option<Truth>,
) -> PromptBundle {
    let mode = PromptMode::baseline();
    PromptBundle {
        id: format!("{}|{question}|{}", item.id, mode.label()),
        item: item.id.clone(),
        item_id: item.item_id.clone(),
        task: item.task,
        variant: item.variant,
        resolution: item.resolution,
        question,
        mode,
        turns: vec![Turn {
            purpose: TurnPurpose::Question,
            parts: vec![Part::Image(item.image.clone()), Part::Text(text)],
        }],
        expected_kind: kind,
        truth,
    }
}

fn text_truth(s: &str) -> Option<Truth> {
    Some(Truth {
        answer: Answer::Text(s.to_string()),
        bias: None,
    })
}

/// Identification and counting prompts on unmodified subjects. Illusions
/// use the original (difference 0) items and ask for the name and the
/// classic question; patterned grids are excluded.
pub fn sanity_prompts(
    task: Task,
    references: &[StimulusItem],
    items: &[StimulusItem],
) -> Result<Vec<PromptBundle>> {
    if task == Task::Grids {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    if task == Task::Illusions {
        let mut seen = std::collections::BTreeSet::new();
        for it in items
            .iter()
            .filter(|i| i.task == task && i.variant == VariantKind::Baseline)
        {
            let TaskParams::Illusion(p) = &it.params else {
                continue;
            };
            if p.difference != 0.0 || !seen.insert((p.kind.as_str(), it.resolution)) {
                continue;
            }
            out.push(sanity_bundle(
                it,
                QuestionId::SanityId,
                "What optical illusion is this? Answer in curly brackets, e.g., {Delboeuf illusion}.".into(),
                AnswerKind::Text,
                text_truth(p.kind.display()),
            ));
            out.push(sanity_bundle(
                it,
                QuestionId::SanityCount,
                format!(
                    "This image shows the {} illusion. {ILLUSION_RECALL}",
                    p.kind.display()
                ),
                AnswerKind::Text,
                None,
            ));
        }
        if out.is_empty() {
            bail!(
                Argument,
                "no original illusion items to build sanity prompts from"
            );
        }
        return Ok(out);
    }
    let refs: Vec<&StimulusItem> = references
        .iter()
        .filter(|r| r.task == task && r.variant == VariantKind::Baseline)
        .collect();
    if refs.is_empty() {
        bail!(Argument, "{task} has no unmodified reference items");
    }
    for r in refs {
        let s = slots(r)?;
        let (id_q, expected, count_q) = match &r.params {
            TaskParams::Flag(p) => (
                "What country flag is this? Answer in curly brackets, e.g., {Flag of Vietnam}.",
                r.subject.clone(),
                format!("How many {} are there in this flag?", p.element.plural()),
            ),
            TaskParams::Piece(_) | TaskParams::GridBoard(_) => (
                "What board game is this? Answer in curly brackets, e.g., {Shogi}.",
                r.subject.clone(),
                s.q1.clone(),
            ),
            TaskParams::Photo(_) if r.task == Task::Animals => (
                "What animal is this? Answer in curly brackets, e.g., {Fish}.",
                r.subject.clone(),
                "How many legs do this animal have?".into(),
            ),
            TaskParams::Photo(p) => {
                let q = if p.brand.is_some_and(LogoBrand::is_shoe) {
                    "What shoe logo is this? Answer in curly brackets, e.g., {Puma}."
                } else {
                    "What car logo is this? Answer in curly brackets, e.g., {Toyota}."
                };
                let count =
                    s.q1.replace("in the logo of this car", "on the logo of this car");
                (q, r.subject.clone(), count)
            }
            _ => bail!(Argument, "{task} has no sanity prompts"),
        };
        out.push(sanity_bundle(
            r,
            QuestionId::SanityId,
            id_q.into(),
            AnswerKind::Text,
            text_truth(&expected),
        ));
        out.push(sanity_bundle(
            r,
            QuestionId::SanityCount,
            format!("{count_q} {COUNT_FORMAT}"),
            AnswerKind::Integer,
            Some(r.truth.primary.clone()),
        ));
    }
    Ok(out)
}
