//! Manifest-level types shared by generation, prompting and evaluation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Error, Result};
use crate::gen::{
    boards::{GridBoardParams, PieceParams},
    flags::FlagParams,
    grids::GridParams,
    illusions::IllusionParams,
};
use crate::prompts::photo::PhotoParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Animals,
    Logos,
    Flags,
    ChessPieces,
    GameBoards,
    Illusions,
    Grids,
}

impl Task {
    pub const ALL: [Task; 7] = [
        Task::Animals,
        Task::Logos,
        Task::Flags,
        Task::ChessPieces,
        Task::GameBoards,
        Task::Illusions,
        Task::Grids,
    ];

    /// Tasks whose stimuli are produced from code.
    pub const GENERATED: [Task; 5] = [
        Task::Flags,
        Task::ChessPieces,
        Task::GameBoards,
        Task::Illusions,
        Task::Grids,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Animals => "animals",
            Task::Logos => "logos",
            Task::Flags => "flags",
            Task::ChessPieces => "chess_pieces",
            Task::GameBoards => "game_boards",
            Task::Illusions => "illusions",
            Task::Grids => "grids",
        }
    }

    /// Human-readable column header used in reports.
    pub fn title(self) -> &'static str {
        match self {
            Task::Animals => "Animals",
            Task::Logos => "Logos",
            Task::Flags => "Flags",
            Task::ChessPieces => "Chess Pieces",
            Task::GameBoards => "Game Boards",
            Task::Illusions => "Illusions",
            Task::Grids => "Patterned Grids",
        }
    }

    /// Column letter (a–g) in the per-task accuracy table.
    pub fn letter(self) -> char {
        (b'a' + Task::ALL.iter().position(|t| *t == self).unwrap() as u8) as char
    }

    pub fn is_generated(self) -> bool {
        Task::GENERATED.contains(&self)
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = Error;
    fn from_str(s: &str) -> Result<Task> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Task::ALL
            .into_iter()
            .find(|t| {
                t.as_str() == norm
                    || (norm == "chess" && *t == Task::ChessPieces)
                    || (norm == "boards" && *t == Task::GameBoards)
            })
            .ok_or_else(|| Error::Argument(format!("unknown task {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum YesNo {
    Yes,
    No,
}

impl YesNo {
    pub fn flip(self) -> YesNo {
        match self {
            YesNo::Yes => YesNo::No,
            YesNo::No => YesNo::Yes,
        }
    }

    pub fn from_bool(b: bool) -> YesNo {
        if b {
            YesNo::Yes
        } else {
            YesNo::No
        }
    }
}

/// A ground-truth, bias, or parsed answer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Answer {
    Int(i64),
    YesNo(YesNo),
    Text(String),
}

impl Answer {
    pub fn yes() -> Answer {
        Answer::YesNo(YesNo::Yes)
    }

    pub fn no() -> Answer {
        Answer::YesNo(YesNo::No)
    }

    pub fn kind(&self) -> AnswerKind {
        match self {
            Answer::Int(_) => AnswerKind::Integer,
            Answer::YesNo(_) => AnswerKind::YesNo,
            Answer::Text(_) => AnswerKind::Text,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Answer::Int(n) => Some(*n),
            _ => None,
        }
    }

    /// Whether `parsed` counts as this answer. Free-text answers match when
    /// the normalized response contains the normalized expectation.
    pub fn matched_by(&self, parsed: &Answer) -> bool {
        match (self, parsed) {
            (Answer::Text(want), Answer::Text(got)) => {
                let norm = |s: &str| -> String {
                    s.chars()
                        .filter(|c| c.is_alphanumeric())
                        .flat_map(char::to_lowercase)
                        .collect()
                };
                let (w, g) = (norm(want), norm(got));
                !w.is_empty() && g.contains(&w)
            }
            _ => self == parsed,
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::Int(n) => write!(f, "{n}"),
            Answer::YesNo(YesNo::Yes) => f.write_str("Yes"),
            Answer::YesNo(YesNo::No) => f.write_str("No"),
            Answer::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerKind {
    Integer,
    YesNo,
    Text,
}

/// Correct answer plus the predefined answer that prior knowledge suggests.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truth {
    pub answer: Answer,
    pub bias: Option<Answer>,
}

impl Truth {
    pub fn new(answer: Answer, bias: Answer) -> Truth {
        Truth {
            answer,
            bias: Some(bias),
        }
    }

    pub fn count(gt: i64, bias: i64) -> Truth {
        Truth::new(Answer::Int(gt), Answer::Int(bias))
    }

    pub fn yes_no(gt: YesNo) -> Truth {
        Truth::new(Answer::YesNo(gt), Answer::YesNo(gt.flip()))
    }
}

/// Truths for the two paraphrased questions (Q1/Q2 share one) and for the
/// identification question Q3.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub primary: Truth,
    pub q3: Truth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantKind {
    Baseline,
    Titled,
    BackgroundRemoved,
}

impl VariantKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VariantKind::Baseline => "baseline",
            VariantKind::Titled => "titled",
            VariantKind::BackgroundRemoved => "background_removed",
        }
    }
}

impl fmt::Display for VariantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VariantKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<VariantKind> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "baseline" => Ok(VariantKind::Baseline),
            "titled" | "title" => Ok(VariantKind::Titled),
            "background_removed" | "nobg" => Ok(VariantKind::BackgroundRemoved),
            _ => bail!(Argument, "unknown variant kind {s:?}"),
        }
    }
}

/// Where a ground truth comes from: re-derived from the scene graph, or
/// declared by a human for an externally produced image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Oracle,
    Declared,
}

/// Everything needed to rebuild an item's scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TaskParams {
    Flag(FlagParams),
    Piece(PieceParams),
    GridBoard(GridBoardParams),
    Illusion(IllusionParams),
    Grid(GridParams),
    Photo(PhotoParams),
}

/// One image file and its truths; one manifest row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StimulusItem {
    /// Unique per file: `<item_id>_<variant>_<D>px`.
    pub id: String,
    /// Identifies the scene, shared by all resolutions and variants.
    pub item_id: String,
    pub task: Task,
    pub variant: VariantKind,
    pub resolution: u32,
    /// Subject name used for titles and subject-naming prompts.
    pub subject: String,
    pub params: TaskParams,
    pub truth: GroundTruth,
    pub provenance: Provenance,
    pub seed: u64,
    /// Image path relative to the output root.
    pub image: String,
    pub svg: Option<String>,
    pub width: u32,
    pub height: u32,
    /// `item_id` of the unmodified reference scene, when one exists.
    pub reference: Option<String>,
}

impl StimulusItem {
    pub fn file_stem(item_id: &str, variant: VariantKind, resolution: u32) -> String {
        format!("{item_id}_{}_{resolution}px", variant.as_str())
    }

    /// Relative image path: `<task>/images/<stem>.png`.
    pub fn image_path(task: Task, stem: &str) -> String {
        format!("{}/images/{stem}.png", task.as_str())
    }

    pub fn svg_path(task: Task, stem: &str) -> String {
        format!("{}/images/{stem}.svg", task.as_str())
    }
}

/// Reads a JSON-lines file of items.
pub fn read_items(path: &std::path::Path) -> Result<Vec<StimulusItem>> {
    crate::jsonl::read(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn answer_serializes_untagged() {
        assert_eq!(serde_json::to_string(&Answer::Int(31)).unwrap(), "31");
        assert_eq!(serde_json::to_string(&Answer::yes()).unwrap(), "\"Yes\"");
        let a: Answer = serde_json::from_str("\"No\"").unwrap();
        assert_eq!(a, Answer::no());
        let t: Answer = serde_json::from_str("\"Shogi\"").unwrap();
        assert_eq!(t, Answer::Text("Shogi".into()));
    }

    #[test]
    fn text_answers_match_loosely() {
        let want = Answer::Text("Ebbinghaus".into());
        assert!(want.matched_by(&Answer::Text("The Ebbinghaus illusion".into())));
        assert!(!want.matched_by(&Answer::Text("Ponzo".into())));
        assert!(Answer::Int(3).matched_by(&Answer::Int(3)));
    }

    #[test]
    fn task_letters_follow_table_order() {
        assert_eq!(Task::Animals.letter(), 'a');
        assert_eq!(Task::Grids.letter(), 'g');
        assert_eq!("chess-pieces".parse::<Task>().unwrap(), Task::ChessPieces);
        assert!("cars".parse::<Task>().is_err());
    }

    #[test]
    fn yes_no_truth_flips_bias() {
        let t = Truth::yes_no(YesNo::Yes);
        assert_eq!(t.bias, Some(Answer::no()));
    }
}
