//! Piece-count boards (chess, xiangqi) and row/column boards (chess,
//! xiangqi, sudoku, go).

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Error, Result};
use crate::item::{GroundTruth, Task, TaskParams, Truth, YesNo};
use crate::rng;
use crate::scene::{count_tagged, Color, FontChoice, Scene, Shape, Stroke};

use super::{ItemSpec, Modification};

pub const TARGETS_PER_GAME: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Game {
    Chess,
    Xiangqi,
}

impl Game {
    pub fn as_str(self) -> &'static str {
        match self {
            Game::Chess => "chess",
            Game::Xiangqi => "xiangqi",
        }
    }

    pub fn files(self) -> u8 {
        match self {
            Game::Chess => 8,
            Game::Xiangqi => 9,
        }
    }

    pub fn ranks(self) -> u8 {
        match self {
            Game::Chess => 8,
            Game::Xiangqi => 10,
        }
    }

    pub fn colors(self) -> [PieceColor; 2] {
        match self {
            Game::Chess => [PieceColor::White, PieceColor::Black],
            Game::Xiangqi => [PieceColor::Red, PieceColor::Black],
        }
    }

    pub fn types(self) -> &'static [PieceType] {
        use PieceType::*;
        match self {
            Game::Chess => &[King, Queen, Rook, Bishop, Knight, Pawn],
            Game::Xiangqi => &[General, Advisor, Elephant, Horse, Chariot, Cannon, Soldier],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PieceColor {
    White,
    Black,
    Red,
}

impl PieceColor {
    pub fn as_str(self) -> &'static str {
        match self {
            PieceColor::White => "white",
            PieceColor::Black => "black",
            PieceColor::Red => "red",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PieceType {
    King,
    Queen,
    Rook,
    Bishop,
    Knight,
    Pawn,
    General,
    Advisor,
    Elephant,
    Horse,
    Chariot,
    Cannon,
    Soldier,
}

impl PieceType {
    pub fn as_str(self) -> &'static str {
        match self {
            PieceType::King => "king",
            PieceType::Queen => "queen",
            PieceType::Rook => "rook",
            PieceType::Bishop => "bishop",
            PieceType::Knight => "knight",
            PieceType::Pawn => "pawn",
            PieceType::General => "general",
            PieceType::Advisor => "advisor",
            PieceType::Elephant => "elephant",
            PieceType::Horse => "horse",
            PieceType::Chariot => "chariot",
            PieceType::Cannon => "cannon",
            PieceType::Soldier => "soldier",
        }
    }

    /// Capitalized name used in prompts ("Bishop").
    pub fn title(self) -> String {
        let s = self.as_str();
        s[..1].to_ascii_uppercase() + &s[1..]
    }

    pub fn game(self) -> Game {
        if Game::Chess.types().contains(&self) {
            Game::Chess
        } else {
            Game::Xiangqi
        }
    }

    fn fen_char(self) -> Option<char> {
        Some(match self {
            PieceType::King => 'k',
            PieceType::Queen => 'q',
            PieceType::Rook => 'r',
            PieceType::Bishop => 'b',
            PieceType::Knight => 'n',
            PieceType::Pawn => 'p',
            _ => return None,
        })
    }

    fn xiangqi_char(self, color: PieceColor) -> &'static str {
        let red = color == PieceColor::Red;
        match self {
            PieceType::General => {
                if red {
                    "帥"
                } else {
                    "將"
                }
            }
            PieceType::Advisor => {
                if red {
                    "仕"
                } else {
                    "士"
                }
            }
            PieceType::Elephant => {
                if red {
                    "相"
                } else {
                    "象"
                }
            }
            PieceType::Horse => "馬",
            PieceType::Chariot => "車",
            PieceType::Cannon => {
                if red {
                    "炮"
                } else {
                    "砲"
                }
            }
            PieceType::Soldier => {
                if red {
                    "兵"
                } else {
                    "卒"
                }
            }
            _ => "?",
        }
    }
}

/// Board coordinate. Chess files a–h, ranks 1–8; xiangqi files a–i,
/// ranks 0–9 with red at rank 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Square {
    pub file: u8,
    /// 0-based from the bottom edge.
    pub rank: u8,
}

impl Square {
    pub fn new(file: u8, rank: u8) -> Square {
        Square { file, rank }
    }

    pub fn name(self, game: Game) -> String {
        let f = (b'a' + self.file) as char;
        match game {
            Game::Chess => format!("{f}{}", self.rank + 1),
            Game::Xiangqi => format!("{f}{}", self.rank),
        }
    }

    pub fn parse(s: &str, game: Game) -> Result<Square> {
        let mut chars = s.chars();
        let f = chars.next().filter(|c| c.is_ascii_lowercase());
        let r: Option<u8> = chars.as_str().parse().ok();
        let (Some(f), Some(r)) = (f, r) else {
            bail!(Argument, "bad square {s:?}");
        };
        let file = f as u8 - b'a';
        let rank = match game {
            Game::Chess if r >= 1 => r - 1,
            Game::Xiangqi => r,
            _ => bail!(Argument, "bad square {s:?}"),
        };
        if file >= game.files() || rank >= game.ranks() {
            bail!(Argument, "square {s:?} is off the {} board", game.as_str());
        }
        Ok(Square { file, rank })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceBoard {
    pub game: Game,
    pub placement: BTreeMap<Square, (PieceColor, PieceType)>,
}

impl PieceBoard {
    pub fn count(&self) -> usize {
        self.placement.len()
    }

    pub fn count_type(&self, t: PieceType) -> usize {
        self.placement.values().filter(|(_, p)| *p == t).count()
    }

    pub fn count_of(&self, c: PieceColor, t: PieceType) -> usize {
        self.placement.values().filter(|v| **v == (c, t)).count()
    }

    /// Chess placement field in standard position notation.
    pub fn to_fen(&self) -> Result<String> {
        if self.game != Game::Chess {
            bail!(Argument, "placement notation is only defined for chess");
        }
        let mut rows = Vec::new();
        for rank in (0..8).rev() {
            let mut row = String::new();
            let mut empty = 0;
            for file in 0..8 {
                match self.placement.get(&Square::new(file, rank)) {
                    Some((c, t)) => {
                        if empty > 0 {
                            row.push_str(&empty.to_string());
                            empty = 0;
                        }
                        let ch = t.fen_char().expect("chess piece");
                        row.push(if *c == PieceColor::White {
                            ch.to_ascii_uppercase()
                        } else {
                            ch
                        });
                    }
                    None => empty += 1,
                }
            }
            if empty > 0 {
                row.push_str(&empty.to_string());
            }
            rows.push(row);
        }
        Ok(rows.join("/"))
    }

    /// Parses a chess placement field (the first space-separated field of a
    /// position string; later fields are ignored).
    pub fn from_fen(text: &str) -> Result<PieceBoard> {
        let field = text.split_whitespace().next().unwrap_or("");
        let rows: Vec<&str> = field.split('/').collect();
        if rows.len() != 8 {
            bail!(Argument, "placement needs 8 ranks, got {}", rows.len());
        }
        let mut placement = BTreeMap::new();
        for (i, row) in rows.iter().enumerate() {
            let rank = 7 - i as u8;
            let mut file = 0u8;
            for ch in row.chars() {
                if let Some(d) = ch.to_digit(10) {
                    file += d as u8;
                    continue;
                }
                let t = Game::Chess
                    .types()
                    .iter()
                    .copied()
                    .find(|t| t.fen_char() == Some(ch.to_ascii_lowercase()))
                    .ok_or_else(|| Error::Argument(format!("unknown piece letter {ch:?}")))?;
                let c = if ch.is_ascii_uppercase() {
                    PieceColor::White
                } else {
                    PieceColor::Black
                };
                if file >= 8 {
                    bail!(Argument, "rank {} overflows", rank + 1);
                }
                placement.insert(Square::new(file, rank), (c, t));
                file += 1;
            }
            if file != 8 {
                bail!(Argument, "rank {} has {file} files", rank + 1);
            }
        }
        Ok(PieceBoard {
            game: Game::Chess,
            placement,
        })
    }
}

pub fn standard_position(game: Game) -> PieceBoard {
    use PieceType::*;
    let mut placement = BTreeMap::new();
    match game {
        Game::Chess => {
            let back = [Rook, Knight, Bishop, Queen, King, Bishop, Knight, Rook];
            for (f, t) in back.iter().enumerate() {
                let f = f as u8;
                placement.insert(Square::new(f, 0), (PieceColor::White, *t));
                placement.insert(Square::new(f, 1), (PieceColor::White, Pawn));
                placement.insert(Square::new(f, 6), (PieceColor::Black, Pawn));
                placement.insert(Square::new(f, 7), (PieceColor::Black, *t));
            }
        }
        Game::Xiangqi => {
            let back = [
                Chariot, Horse, Elephant, Advisor, General, Advisor, Elephant, Horse, Chariot,
            ];
            for (side, home, cannon, soldier) in
                [(PieceColor::Red, 0, 2, 3), (PieceColor::Black, 9, 7, 6)]
            {
                for (f, t) in back.iter().enumerate() {
                    placement.insert(Square::new(f as u8, home), (side, *t));
                }
                for f in [1, 7] {
                    placement.insert(Square::new(f, cannon), (side, Cannon));
                }
                for f in [0, 2, 4, 6, 8] {
                    placement.insert(Square::new(f, soldier), (side, Soldier));
                }
            }
        }
    }
    PieceBoard { game, placement }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceModification {
    pub kind: Modification,
    pub target: Square,
    pub replacement: Option<PieceType>,
}

/// Applies a remove/replace edit. Remove asks for the total piece count;
/// replace asks for the whole-board count of the added type.
pub fn apply_piece_mod(
    board: &PieceBoard,
    m: &PieceModification,
) -> Result<(PieceBoard, GroundTruth)> {
    let Some(&(color, occupant)) = board.placement.get(&m.target) else {
        bail!(Argument, "square {} is empty", m.target.name(board.game));
    };
    let std_board = standard_position(board.game);
    let mut out = board.clone();
    let primary = match (m.kind, m.replacement) {
        (Modification::Remove, _) => {
            out.placement.remove(&m.target);
            Truth::count(out.count() as i64, std_board.count() as i64)
        }
        (Modification::Replace, Some(r)) => {
            if r == occupant {
                bail!(Argument, "replacement {} equals the occupant", r.as_str());
            }
            if r.game() != board.game {
                bail!(
                    Argument,
                    "{} is not a {} piece",
                    r.as_str(),
                    board.game.as_str()
                );
            }
            out.placement.insert(m.target, (color, r));
            let standard = std_board.count_type(r) as i64;
            Truth::count(standard + 1, standard)
        }
        (Modification::Replace, None) => bail!(Argument, "replace needs a replacement type"),
        (k, _) => bail!(
            Argument,
            "pieces support remove/replace, not {}",
            k.as_str()
        ),
    };
    Ok((
        out,
        GroundTruth {
            primary,
            q3: Truth::yes_no(YesNo::No),
        },
    ))
}

/// Manifest parameters of a piece-board item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceParams {
    pub game: Game,
    pub modification: Modification,
    /// Square name in game notation; absent for the standard position.
    pub target: Option<String>,
    pub occupant: Option<PieceType>,
    pub color: Option<PieceColor>,
    pub replacement: Option<PieceType>,
}

impl PieceParams {
    pub fn board(&self) -> Result<PieceBoard> {
        let std = standard_position(self.game);
        if self.modification == Modification::Standard {
            return Ok(std);
        }
        let target = self
            .target
            .as_deref()
            .ok_or_else(|| Error::Argument("piece edit without a target square".into()))?;
        let m = PieceModification {
            kind: self.modification,
            target: Square::parse(target, self.game)?,
            replacement: self.replacement,
        };
        Ok(apply_piece_mod(&std, &m)?.0)
    }
}

/// Draws 12 occupied target squares per game plus one replacement type per
/// square, then emits remove and replace items over the same squares.
pub fn enumerate_piece_set(resolutions: &[u32], seed: u64) -> Result<Vec<ItemSpec>> {
    let mut specs = Vec::new();
    for game in [Game::Chess, Game::Xiangqi] {
        let board = standard_position(game);
        let occupied: Vec<Square> = board.placement.keys().copied().collect();
        let mut r = rng::stream(seed, &format!("pieces/{}/targets", game.as_str()));
        let mut targets: Vec<Square> = occupied
            .choose_multiple(&mut r, TARGETS_PER_GAME)
            .copied()
            .collect();
        targets.sort_by_key(|s| (s.rank, s.file));
        let mut rr = rng::stream(seed, &format!("pieces/{}/replacements", game.as_str()));
        let replacements: Vec<PieceType> = targets
            .iter()
            .map(|sq| {
                let occupant = board.placement[sq].1;
                let options: Vec<PieceType> = game
                    .types()
                    .iter()
                    .copied()
                    .filter(|t| *t != occupant)
                    .collect();
                options[rr.gen_range(0..options.len())]
            })
            .collect();
        for kind in [Modification::Remove, Modification::Replace] {
            for (sq, rep) in targets.iter().zip(&replacements) {
                let replacement = (kind == Modification::Replace).then_some(*rep);
                let m = PieceModification {
                    kind,
                    target: *sq,
                    replacement,
                };
                let (_, truth) = apply_piece_mod(&board, &m)?;
                let (color, occupant) = board.placement[sq];
                let name = sq.name(game);
                let item_id = match replacement {
                    Some(r) => format!(
                        "{}_replace_{name}_{}_to_{}",
                        game.as_str(),
                        occupant.as_str(),
                        r.as_str()
                    ),
                    None => format!("{}_remove_{name}_{}", game.as_str(), occupant.as_str()),
                };
                let params = PieceParams {
                    game,
                    modification: kind,
                    target: Some(name),
                    occupant: Some(occupant),
                    color: Some(color),
                    replacement,
                };
                specs.extend(resolutions.iter().map(|&d| ItemSpec {
                    item_id: item_id.clone(),
                    task: Task::ChessPieces,
                    resolution: d,
                    subject: subject(game).into(),
                    params: TaskParams::Piece(params.clone()),
                    truth: truth.clone(),
                    seed,
                    reference: Some(piece_reference_id(game)),
                }));
            }
        }
    }
    Ok(specs)
}

fn subject(game: Game) -> &'static str {
    match game {
        Game::Chess => "Chess",
        Game::Xiangqi => "Xiangqi",
    }
}

pub fn piece_reference_id(game: Game) -> String {
    format!("{}_standard", game.as_str())
}

pub fn piece_reference_specs(resolutions: &[u32], seed: u64) -> Vec<ItemSpec> {
    let mut out = Vec::new();
    for game in [Game::Chess, Game::Xiangqi] {
        let n = standard_position(game).count() as i64;
        for &d in resolutions {
            out.push(ItemSpec {
                item_id: piece_reference_id(game),
                task: Task::ChessPieces,
                resolution: d,
                subject: subject(game).into(),
                params: TaskParams::Piece(PieceParams {
                    game,
                    modification: Modification::Standard,
                    target: None,
                    occupant: None,
                    color: None,
                    replacement: None,
                }),
                truth: GroundTruth {
                    primary: Truth::count(n, n),
                    q3: Truth::yes_no(YesNo::Yes),
                },
                seed,
                reference: None,
            });
        }
    }
    out
}

/// Whole-board count of whatever the item's question asks about.
pub fn oracle_piece_count(p: &PieceParams, scene: &Scene) -> Result<i64> {
    let tag = match p.replacement {
        Some(t) => format!("piece:{}", t.as_str()),
        None => "piece".into(),
    };
    Ok(count_tagged(scene, &tag)? as i64)
}

fn piece_vocabulary(game: Game) -> Vec<String> {
    let mut v: Vec<String> = ["square", "board-line", "river", "palace", "piece"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for t in game.types() {
        v.push(format!("piece:{}", t.as_str()));
        for c in game.colors() {
            v.push(format!("piece:{}:{}", t.as_str(), c.as_str()));
        }
    }
    v
}

fn piece_tags(c: PieceColor, t: PieceType) -> [String; 3] {
    [
        "piece".to_string(),
        format!("piece:{}", t.as_str()),
        format!("piece:{}:{}", t.as_str(), c.as_str()),
    ]
}

pub fn piece_scene(p: &PieceParams, font: &FontChoice) -> Result<Scene> {
    render_pieceboard(&p.board()?, font)
}

pub fn render_pieceboard(board: &PieceBoard, font: &FontChoice) -> Result<Scene> {
    match board.game {
        Game::Chess => render_chess(board),
        Game::Xiangqi => render_xiangqi(board, font),
    }
}

const CHESS_SQUARE: f64 = 100.0;

fn render_chess(board: &PieceBoard) -> Result<Scene> {
    let light = Color::rgb(0xee, 0xd9, 0xb5);
    let dark = Color::rgb(0xb5, 0x88, 0x63);
    let mut shapes = Vec::new();
    for rank in 0..8u8 {
        for file in 0..8u8 {
            let (x, y) = (file as f64 * CHESS_SQUARE, (7 - rank) as f64 * CHESS_SQUARE);
            let c = if (file + rank) % 2 == 0 { dark } else { light };
            shapes.push(
                Shape::rect(x, y, CHESS_SQUARE, CHESS_SQUARE)
                    .fill(c)
                    .tag("square"),
            );
        }
    }
    for (sq, (c, t)) in &board.placement {
        let (x, y) = (
            sq.file as f64 * CHESS_SQUARE,
            (7 - sq.rank) as f64 * CHESS_SQUARE,
        );
        shapes.push(chess_glyph(*c, *t, x, y));
    }
    Scene::new(800.0, 800.0, light, &piece_vocabulary(Game::Chess), shapes)
}

/// Mirrors a right-half profile (dx from the centre line, y) into a closed
/// silhouette on the 100-unit square.
fn profile(right: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = right.iter().map(|&(dx, y)| (50.0 + dx, y)).collect();
    pts.extend(
        right
            .iter()
            .rev()
            .filter(|p| p.0 != 0.0)
            .map(|&(dx, y)| (50.0 - dx, y)),
    );
    pts
}

fn arc(cx: f64, cy: f64, r: f64, from_deg: f64, to_deg: f64, steps: usize) -> Vec<(f64, f64)> {
    (0..=steps)
        .map(|i| {
            let a = (from_deg + (to_deg - from_deg) * i as f64 / steps as f64).to_radians();
            (cx + r * a.cos(), cy + r * a.sin())
        })
        .collect()
}

fn chess_outline(t: PieceType) -> Vec<(f64, f64)> {
    match t {
        PieceType::Pawn => {
            let mut right = arc(0.0, 30.0, 12.0, -90.0, 55.0, 10);
            right[0].0 = 0.0;
            right.extend([
                (8.0, 47.0),
                (14.0, 51.0),
                (10.0, 55.0),
                (12.0, 70.0),
                (22.0, 80.0),
                (24.0, 88.0),
                (0.0, 88.0),
            ]);
            profile(&right)
        }
        PieceType::Rook => profile(&[
            (0.0, 15.0),
            (4.0, 15.0),
            (4.0, 22.0),
            (11.0, 22.0),
            (11.0, 15.0),
            (20.0, 15.0),
            (20.0, 30.0),
            (14.0, 35.0),
            (14.0, 68.0),
            (20.0, 72.0),
            (24.0, 80.0),
            (24.0, 88.0),
            (0.0, 88.0),
        ]),
        PieceType::Bishop => {
            let mut right = arc(0.0, 16.0, 5.0, -90.0, 60.0, 6);
            right[0].0 = 0.0;
            right.extend([
                (4.0, 22.0),
                (10.0, 28.0),
                (13.0, 40.0),
                (8.0, 52.0),
                (14.0, 56.0),
                (8.0, 60.0),
                (10.0, 72.0),
                (22.0, 80.0),
                (24.0, 88.0),
                (0.0, 88.0),
            ]);
            profile(&right)
        }
        PieceType::Knight => vec![
            (28.0, 88.0),
            (76.0, 88.0),
            (74.0, 78.0),
            (67.0, 73.0),
            (71.0, 50.0),
            (67.0, 30.0),
            (57.0, 18.0),
            (50.0, 11.0),
            (46.0, 20.0),
            (36.0, 26.0),
            (24.0, 42.0),
            (22.0, 52.0),
            (30.0, 57.0),
            (40.0, 49.0),
            (46.0, 51.0),
            (36.0, 66.0),
            (31.0, 74.0),
            (30.0, 80.0),
        ],
        PieceType::Queen => profile(&[
            (0.0, 22.0),
            (6.0, 35.0),
            (12.0, 18.0),
            (16.0, 35.0),
            (25.0, 20.0),
            (20.0, 50.0),
            (14.0, 58.0),
            (14.0, 68.0),
            (22.0, 76.0),
            (24.0, 88.0),
            (0.0, 88.0),
        ]),
        PieceType::King => profile(&[
            (0.0, 6.0),
            (3.0, 6.0),
            (3.0, 12.0),
            (9.0, 12.0),
            (9.0, 18.0),
            (3.0, 18.0),
            (3.0, 26.0),
            (14.0, 30.0),
            (20.0, 40.0),
            (14.0, 56.0),
            (14.0, 66.0),
            (22.0, 76.0),
            (24.0, 88.0),
            (0.0, 88.0),
        ]),
        _ => Vec::new(),
    }
}

fn chess_glyph(c: PieceColor, t: PieceType, x: f64, y: f64) -> Shape {
    let (body, line) = match c {
        PieceColor::White => (Color::rgb(0xf8, 0xf8, 0xf2), Color::rgb(0x1a, 0x1a, 0x1a)),
        _ => (Color::rgb(0x22, 0x22, 0x22), Color::rgb(0x05, 0x05, 0x05)),
    };
    let detail = match c {
        PieceColor::White => line,
        _ => Color::rgb(0xdd, 0xdd, 0xdd),
    };
    let pts = chess_outline(t)
        .into_iter()
        .map(|(px, py)| (x + px, y + py))
        .collect();
    let mut parts = vec![Shape::polygon(pts)
        .fill(body)
        .stroke(Stroke::round(line, 2.5))
        .tags(piece_tags(c, t))];
    let thin = Stroke::round(detail, 2.0);
    match t {
        PieceType::Bishop => {
            parts.push(Shape::line(x + 50.0, y + 31.0, x + 56.0, y + 41.0).stroke(thin))
        }
        PieceType::Knight => parts.push(Shape::circle(x + 53.0, y + 27.0, 2.5).fill(detail)),
        PieceType::Queen => {
            for dx in [-25.0f64, -12.0, 0.0, 12.0, 25.0] {
                let ty = if dx == 0.0 {
                    22.0
                } else if dx.abs() < 20.0 {
                    18.0
                } else {
                    20.0
                };
                parts.push(
                    Shape::circle(x + 50.0 + dx, y + ty - 3.0, 3.5)
                        .fill(body)
                        .stroke(Stroke::new(line, 1.5)),
                );
            }
        }
        _ => {}
    }
    if t != PieceType::Knight {
        parts.push(Shape::line(x + 32.0, y + 80.0, x + 68.0, y + 80.0).stroke(thin));
    }
    Shape::group(parts)
}

const XQ_PITCH: f64 = 80.0;
const XQ_MARGIN: f64 = 60.0;
const XQ_DISC: f64 = 34.0;

fn xq_point(file: u8, rank: u8) -> (f64, f64) {
    (
        XQ_MARGIN + file as f64 * XQ_PITCH,
        XQ_MARGIN + (9 - rank) as f64 * XQ_PITCH,
    )
}

fn render_xiangqi(board: &PieceBoard, font: &FontChoice) -> Result<Scene> {
    let paper = Color::rgb(0xf2, 0xd1, 0x8b);
    let ink = Color::rgb(0x3a, 0x2a, 0x1a);
    let mut shapes = xiangqi_lines(10, 9, XQ_MARGIN, XQ_PITCH, paper, ink, None);
    for (sq, (c, t)) in &board.placement {
        let (x, y) = xq_point(sq.file, sq.rank);
        let ring = if *c == PieceColor::Red {
            Color::rgb(0xc0, 0x1c, 0x1c)
        } else {
            Color::rgb(0x11, 0x11, 0x11)
        };
        let size = 36.0;
        let text =
            Shape::text(x, y + 0.325 * size, size, t.xiangqi_char(*c), font.clone()).fill(ring);
        shapes.push(Shape::group(vec![
            Shape::circle(x, y, XQ_DISC)
                .fill(Color::rgb(0xfb, 0xf1, 0xdc))
                .stroke(Stroke::new(ring, 2.5))
                .tags(piece_tags(*c, *t)),
            Shape::circle(x, y, XQ_DISC - 6.0).stroke(Stroke::new(ring, 1.5)),
            text,
        ]));
    }
    let w = 2.0 * XQ_MARGIN + 8.0 * XQ_PITCH;
    let h = 2.0 * XQ_MARGIN + 9.0 * XQ_PITCH;
    Scene::new(w, h, paper, &piece_vocabulary(Game::Xiangqi), shapes)
}

/// Xiangqi line board of `rows` horizontal and `cols` vertical lines.
/// With `line_tags`, horizontal/vertical lines carry "hline"/"vline";
/// otherwise they are "board-line".
fn xiangqi_lines(
    rows: usize,
    cols: usize,
    margin: f64,
    pitch: f64,
    paper: Color,
    ink: Color,
    line_tags: Option<(&str, &str)>,
) -> Vec<Shape> {
    let x = |c: usize| margin + c as f64 * pitch;
    let y = |r: usize| margin + r as f64 * pitch;
    let stroke = Stroke::new(ink, 3.0);
    let (ht, vt) = line_tags.unwrap_or(("board-line", "board-line"));
    let mut shapes = Vec::new();
    for r in 0..rows {
        shapes.push(
            Shape::line(x(0), y(r), x(cols - 1), y(r))
                .stroke(stroke)
                .tag(ht),
        );
    }
    for c in 0..cols {
        shapes.push(
            Shape::line(x(c), y(0), x(c), y(rows - 1))
                .stroke(stroke)
                .tag(vt),
        );
    }
    if rows >= 2 && cols >= 3 {
        // The river sits between the middle pair of horizontal lines and
        // hides the inner verticals.
        let upper = (rows - 1) / 2;
        let inset = 2.5;
        shapes.push(
            Shape::rect(
                x(0) + inset,
                y(upper) + inset,
                x(cols - 1) - x(0) - 2.0 * inset,
                pitch - 2.0 * inset,
            )
            .fill(paper)
            .tag("river"),
        );
    }
    if rows >= 6 && cols >= 3 {
        let mid = (cols - 1) / 2;
        let (c0, c1) = (mid.saturating_sub(1), (mid + 1).min(cols - 1));
        for (r0, r1) in [(0, 2), (rows - 3, rows - 1)] {
            shapes.push(
                Shape::line(x(c0), y(r0), x(c1), y(r1))
                    .stroke(stroke)
                    .tag("palace"),
            );
            shapes.push(
                Shape::line(x(c1), y(r0), x(c0), y(r1))
                    .stroke(stroke)
                    .tag("palace"),
            );
        }
    }
    shapes
}

// ---------------------------------------------------------------------------
// Row/column boards.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridGame {
    Chess,
    Xiangqi,
    Sudoku,
    Go,
}

impl GridGame {
    pub const ALL: [GridGame; 4] = [
        GridGame::Chess,
        GridGame::Xiangqi,
        GridGame::Sudoku,
        GridGame::Go,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GridGame::Chess => "chess",
            GridGame::Xiangqi => "xiangqi",
            GridGame::Sudoku => "sudoku",
            GridGame::Go => "go",
        }
    }

    /// Standard (rows, cols). Chess and sudoku count cells, xiangqi and go
    /// count lines.
    pub fn standard(self) -> (usize, usize) {
        match self {
            GridGame::Chess => (8, 8),
            GridGame::Xiangqi => (10, 9),
            GridGame::Sudoku => (9, 9),
            GridGame::Go => (19, 19),
        }
    }

    pub fn counts_lines(self) -> bool {
        matches!(self, GridGame::Xiangqi | GridGame::Go)
    }

    pub fn subject(self) -> &'static str {
        match self {
            GridGame::Chess => "Chess",
            GridGame::Xiangqi => "Xiangqi",
            GridGame::Sudoku => "Sudoku",
            GridGame::Go => "Go",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Row,
    Col,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Position {
    First,
    Last,
}

/// A ±1 edit at the first or last row/column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineMod {
    pub delta: i32,
    pub position: Position,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridBoardParams {
    pub game: GridGame,
    pub rows: usize,
    pub cols: usize,
    pub row_delta: i32,
    pub col_delta: i32,
    pub position: Position,
    /// Seeds the sudoku sample digits.
    pub digit_seed: u64,
}

impl GridBoardParams {
    /// The modified axis, if any.
    pub fn axis(&self) -> Option<Axis> {
        if self.row_delta != 0 {
            Some(Axis::Row)
        } else if self.col_delta != 0 {
            Some(Axis::Col)
        } else {
            None
        }
    }

    pub fn count_tag(&self, axis: Axis) -> &'static str {
        match (self.game.counts_lines(), axis) {
            (true, Axis::Row) => "hline",
            (true, Axis::Col) => "vline",
            (false, Axis::Row) => "row",
            (false, Axis::Col) => "col",
        }
    }
}

/// Builds the board parameters and truths for one edit. Exactly one of
/// `row_mod`/`col_mod` must be given.
pub fn make_gridboard(
    game: GridGame,
    row_mod: Option<LineMod>,
    col_mod: Option<LineMod>,
    digit_seed: u64,
) -> Result<(GridBoardParams, GroundTruth)> {
    let (sr, sc) = game.standard();
    let (m, axis) = match (row_mod, col_mod) {
        (Some(m), None) => (m, Axis::Row),
        (None, Some(m)) => (m, Axis::Col),
        _ => bail!(
            Argument,
            "exactly one of the row or column edits must be given"
        ),
    };
    if m.delta.abs() != 1 {
        bail!(Argument, "row/column edits are ±1, got {}", m.delta);
    }
    let (rd, cd) = match axis {
        Axis::Row => (m.delta, 0),
        Axis::Col => (0, m.delta),
    };
    let rows = (sr as i64 + rd as i64) as usize;
    let cols = (sc as i64 + cd as i64) as usize;
    let (gt, bias) = match axis {
        Axis::Row => (rows, sr),
        Axis::Col => (cols, sc),
    };
    Ok((
        GridBoardParams {
            game,
            rows,
            cols,
            row_delta: rd,
            col_delta: cd,
            position: m.position,
            digit_seed,
        },
        GroundTruth {
            primary: Truth::count(gt as i64, bias as i64),
            q3: Truth::yes_no(YesNo::No),
        },
    ))
}

/// Variants per game: ±row/±col × first/last, or ±row/±col for go, whose
/// uniform lattice makes first and last indistinguishable.
pub fn gridboard_variants(game: GridGame) -> Vec<(Axis, i32, Position)> {
    let positions: &[Position] = if game == GridGame::Go {
        &[Position::Last]
    } else {
        &[Position::First, Position::Last]
    };
    let mut out = Vec::new();
    for axis in [Axis::Row, Axis::Col] {
        for delta in [-1, 1] {
            for &p in positions {
                out.push((axis, delta, p));
            }
        }
    }
    out
}

fn gridboard_item_id(game: GridGame, axis: Axis, delta: i32, pos: Position) -> String {
    let verb = if delta < 0 { "remove" } else { "add" };
    let what = match (game.counts_lines(), axis) {
        (false, Axis::Row) => "row",
        (false, Axis::Col) => "col",
        (true, Axis::Row) => "hline",
        (true, Axis::Col) => "vline",
    };
    match game {
        GridGame::Go => format!("board_{}_{verb}_{what}", game.as_str()),
        _ => {
            let p = if pos == Position::First {
                "first"
            } else {
                "last"
            };
            format!("board_{}_{verb}_{what}_{p}", game.as_str())
        }
    }
}

pub fn enumerate_gridboard_set(resolutions: &[u32], seed: u64) -> Result<Vec<ItemSpec>> {
    enumerate_gridboards(&GridGame::ALL, resolutions, seed)
}

pub fn enumerate_gridboards(
    games: &[GridGame],
    resolutions: &[u32],
    seed: u64,
) -> Result<Vec<ItemSpec>> {
    let mut specs = Vec::new();
    for &game in games {
        for (axis, delta, pos) in gridboard_variants(game) {
            let m = LineMod {
                delta,
                position: pos,
            };
            let item_id = gridboard_item_id(game, axis, delta, pos);
            let digit_seed = digit_seed(seed, &item_id);
            let (params, truth) = match axis {
                Axis::Row => make_gridboard(game, Some(m), None, digit_seed)?,
                Axis::Col => make_gridboard(game, None, Some(m), digit_seed)?,
            };
            specs.extend(resolutions.iter().map(|&d| ItemSpec {
                item_id: item_id.clone(),
                task: Task::GameBoards,
                resolution: d,
                subject: game.subject().into(),
                params: TaskParams::GridBoard(params.clone()),
                truth: truth.clone(),
                seed,
                reference: Some(gridboard_reference_id(game)),
            }));
        }
    }
    Ok(specs)
}

fn digit_seed(seed: u64, item_id: &str) -> u64 {
    let bytes = rng::derive_seed(seed, &format!("sudoku-digits/{item_id}"));
    u64::from_le_bytes(bytes[..8].try_into().expect("8 bytes"))
}

pub fn gridboard_reference_id(game: GridGame) -> String {
    format!("board_{}_standard", game.as_str())
}

pub fn gridboard_reference_specs(resolutions: &[u32], seed: u64) -> Vec<ItemSpec> {
    let mut out = Vec::new();
    for game in GridGame::ALL {
        let (rows, cols) = game.standard();
        let id = gridboard_reference_id(game);
        let params = GridBoardParams {
            game,
            rows,
            cols,
            row_delta: 0,
            col_delta: 0,
            position: Position::Last,
            digit_seed: digit_seed(seed, &id),
        };
        for &d in resolutions {
            out.push(ItemSpec {
                item_id: id.clone(),
                task: Task::GameBoards,
                resolution: d,
                subject: game.subject().into(),
                params: TaskParams::GridBoard(params.clone()),
                // References answer the row question with the standard count.
                truth: GroundTruth {
                    primary: Truth::count(rows as i64, rows as i64),
                    q3: Truth::yes_no(YesNo::Yes),
                },
                seed,
                reference: None,
            });
        }
    }
    out
}

pub fn oracle_line_count(p: &GridBoardParams, scene: &Scene) -> Result<i64> {
    let axis = p.axis().unwrap_or(Axis::Row);
    Ok(count_tagged(scene, p.count_tag(axis))? as i64)
}

const GRID_VOCAB: &[&str] = &[
    "cell",
    "row",
    "col",
    "hline",
    "vline",
    "grid-line",
    "block-line",
    "digit",
    "star-point",
    "river",
    "palace",
    "frame",
];

pub fn gridboard_scene(p: &GridBoardParams, font: &FontChoice) -> Result<Scene> {
    render_gridboard(p, font, false)
}

/// Lines/cells only, in one uniform style: the background-removed form.
pub fn gridboard_scene_plain(p: &GridBoardParams) -> Result<Scene> {
    render_gridboard(p, &FontChoice::Builtin, true)
}

fn render_gridboard(p: &GridBoardParams, font: &FontChoice, plain: bool) -> Result<Scene> {
    if p.rows < 2 || p.cols < 2 {
        bail!(Argument, "board needs at least 2 rows and 2 columns");
    }
    match p.game {
        GridGame::Chess | GridGame::Sudoku => render_cells(p, font, plain),
        GridGame::Go | GridGame::Xiangqi => render_lines(p, plain),
    }
}

fn render_cells(p: &GridBoardParams, font: &FontChoice, plain: bool) -> Result<Scene> {
    let pitch = 60.0;
    let margin = 40.0;
    let (w, h) = (
        p.cols as f64 * pitch + 2.0 * margin,
        p.rows as f64 * pitch + 2.0 * margin,
    );
    let ink = Color::BLACK;
    let mut shapes = Vec::new();
    let light = Color::rgb(0xee, 0xd9, 0xb5);
    let dark = Color::rgb(0xb5, 0x88, 0x63);
    for r in 0..p.rows {
        for c in 0..p.cols {
            let fill = if plain || p.game == GridGame::Sudoku {
                Color::WHITE
            } else if (r + c) % 2 == 0 {
                light
            } else {
                dark
            };
            let mut s = Shape::rect(
                margin + c as f64 * pitch,
                margin + r as f64 * pitch,
                pitch,
                pitch,
            )
            .fill(fill)
            .tag("cell");
            if plain || p.game == GridGame::Sudoku {
                s = s.stroke(Stroke::new(ink, 1.5));
            }
            if c == 0 {
                s = s.tag("row");
            }
            if r == 0 {
                s = s.tag("col");
            }
            shapes.push(s);
        }
    }
    if !plain && p.game == GridGame::Sudoku {
        // Bold lines follow the original 9×9 blocks: a row inserted at the top
        // shifts every original boundary down by one, a removed top row up.
        let offset = |delta: i32, pos: Position| -> i64 {
            match (pos, delta) {
                (Position::First, 1) => 1,
                (Position::First, -1) => -1,
                _ => 0,
            }
        };
        let ro = offset(p.row_delta, p.position);
        let co = offset(p.col_delta, p.position);
        let bold = Stroke::new(ink, 4.0);
        for b in [0i64, 3, 6, 9] {
            let r = b + ro;
            if (0..=p.rows as i64).contains(&r) {
                let y = margin + r as f64 * pitch;
                shapes.push(
                    Shape::line(margin, y, w - margin, y)
                        .stroke(bold)
                        .tag("block-line"),
                );
            }
            let c = b + co;
            if (0..=p.cols as i64).contains(&c) {
                let x = margin + c as f64 * pitch;
                shapes.push(
                    Shape::line(x, margin, x, h - margin)
                        .stroke(bold)
                        .tag("block-line"),
                );
            }
        }
        let mut rng = rng::stream(p.digit_seed, "digits");
        let cells: Vec<(usize, usize)> = (0..p.rows)
            .flat_map(|r| (0..p.cols).map(move |c| (r, c)))
            .collect();
        let givens = 25.min(cells.len());
        let mut chosen: Vec<(usize, usize)> =
            cells.choose_multiple(&mut rng, givens).copied().collect();
        chosen.sort_unstable();
        let size = 34.0;
        for (r, c) in chosen {
            let d: u8 = rng.gen_range(1..=9);
            let cx = margin + (c as f64 + 0.5) * pitch;
            let cy = margin + (r as f64 + 0.5) * pitch;
            shapes.push(
                Shape::text(cx, cy + 0.35 * size, size, d.to_string(), font.clone())
                    .fill(ink)
                    .tag("digit"),
            );
        }
    }
    shapes.push(
        Shape::rect(margin, margin, w - 2.0 * margin, h - 2.0 * margin)
            .stroke(Stroke::new(
                ink,
                if p.game == GridGame::Sudoku && !plain {
                    4.0
                } else {
                    2.0
                },
            ))
            .tag("frame"),
    );
    Scene::new(w, h, Color::WHITE, GRID_VOCAB, shapes)
}

fn render_lines(p: &GridBoardParams, plain: bool) -> Result<Scene> {
    let ink = Color::BLACK;
    match p.game {
        GridGame::Go => {
            let pitch = 40.0;
            let margin = 40.0;
            let (w, h) = (
                (p.cols - 1) as f64 * pitch + 2.0 * margin,
                (p.rows - 1) as f64 * pitch + 2.0 * margin,
            );
            let stroke = Stroke::new(ink, 2.0);
            let mut shapes = Vec::new();
            for r in 0..p.rows {
                let y = margin + r as f64 * pitch;
                shapes.push(
                    Shape::line(margin, y, w - margin, y)
                        .stroke(stroke)
                        .tag("hline"),
                );
            }
            for c in 0..p.cols {
                let x = margin + c as f64 * pitch;
                shapes.push(
                    Shape::line(x, margin, x, h - margin)
                        .stroke(stroke)
                        .tag("vline"),
                );
            }
            if !plain {
                let stars = |n: usize| -> Vec<usize> {
                    if n < 7 {
                        return Vec::new();
                    }
                    let mut v = vec![3, (n - 1) / 2, n - 4];
                    v.dedup();
                    v
                };
                for r in stars(p.rows) {
                    for c in stars(p.cols) {
                        shapes.push(
                            Shape::circle(
                                margin + c as f64 * pitch,
                                margin + r as f64 * pitch,
                                5.0,
                            )
                            .fill(ink)
                            .tag("star-point"),
                        );
                    }
                }
            }
            let bg = if plain {
                Color::WHITE
            } else {
                Color::rgb(0xdc, 0xb3, 0x5c)
            };
            Scene::new(w, h, bg, GRID_VOCAB, shapes)
        }
        _ => {
            let pitch = 60.0;
            let margin = 50.0;
            let (w, h) = (
                (p.cols - 1) as f64 * pitch + 2.0 * margin,
                (p.rows - 1) as f64 * pitch + 2.0 * margin,
            );
            let paper = if plain {
                Color::WHITE
            } else {
                Color::rgb(0xf2, 0xd1, 0x8b)
            };
            let mut shapes = xiangqi_lines(
                p.rows,
                p.cols,
                margin,
                pitch,
                paper,
                ink,
                Some(("hline", "vline")),
            );
            if plain {
                shapes.retain(|s| s.has_tag("hline") || s.has_tag("vline"));
            }
            Scene::new(w, h, paper, GRID_VOCAB, shapes)
        }
    }
}

impl fmt::Display for PieceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_positions() {
        let c = standard_position(Game::Chess);
        assert_eq!(c.count(), 32);
        assert_eq!(c.count_of(PieceColor::White, PieceType::Bishop), 2);
        assert_eq!(c.count_type(PieceType::Pawn), 16);
        let x = standard_position(Game::Xiangqi);
        assert_eq!(x.count(), 32);
        assert_eq!(x.count_of(PieceColor::Red, PieceType::General), 1);
        assert_eq!(x.count_of(PieceColor::Black, PieceType::Soldier), 5);
    }

    #[test]
    fn piece_edit_truths() {
        let c = standard_position(Game::Chess);
        let m = PieceModification {
            kind: Modification::Remove,
            target: Square::parse("e2", Game::Chess).unwrap(),
            replacement: None,
        };
        let (b, t) = apply_piece_mod(&c, &m).unwrap();
        assert_eq!(b.count(), 31);
        assert_eq!(t.primary, Truth::count(31, 32));

        let m = PieceModification {
            kind: Modification::Replace,
            target: Square::parse("b1", Game::Chess).unwrap(),
            replacement: Some(PieceType::Bishop),
        };
        let (b, t) = apply_piece_mod(&c, &m).unwrap();
        assert_eq!(b.count_type(PieceType::Bishop), 5);
        assert_eq!(b.count_of(PieceColor::White, PieceType::Bishop), 3);
        assert_eq!(t.primary, Truth::count(5, 4));

        let x = standard_position(Game::Xiangqi);
        let m = PieceModification {
            kind: Modification::Replace,
            target: Square::parse("d0", Game::Xiangqi).unwrap(),
            replacement: Some(PieceType::General),
        };
        let (_, t) = apply_piece_mod(&x, &m).unwrap();
        assert_eq!(t.primary, Truth::count(3, 2));
    }

    #[test]
    fn piece_edit_errors() {
        let c = standard_position(Game::Chess);
        let empty = PieceModification {
            kind: Modification::Remove,
            target: Square::parse("e4", Game::Chess).unwrap(),
            replacement: None,
        };
        assert!(matches!(
            apply_piece_mod(&c, &empty),
            Err(Error::Argument(_))
        ));
        let same = PieceModification {
            kind: Modification::Replace,
            target: Square::parse("e2", Game::Chess).unwrap(),
            replacement: Some(PieceType::Pawn),
        };
        assert!(matches!(
            apply_piece_mod(&c, &same),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn rendered_boards_count_pieces() {
        let font = FontChoice::Builtin;
        let s = render_pieceboard(&standard_position(Game::Chess), &font).unwrap();
        assert_eq!(count_tagged(&s, "piece").unwrap(), 32);
        let s = render_pieceboard(&standard_position(Game::Xiangqi), &font).unwrap();
        assert_eq!(count_tagged(&s, "piece:general:red").unwrap(), 1);
        let mut b = standard_position(Game::Chess);
        b.placement
            .remove(&Square::parse("e2", Game::Chess).unwrap());
        let s = render_pieceboard(&b, &font).unwrap();
        assert_eq!(count_tagged(&s, "piece").unwrap(), 31);
    }

    #[test]
    fn fen_round_trip() {
        let b = standard_position(Game::Chess);
        let fen = b.to_fen().unwrap();
        assert_eq!(fen, "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR");
        assert_eq!(
            PieceBoard::from_fen(&format!("{fen} w KQkq - 0 1")).unwrap(),
            b
        );
        assert!(PieceBoard::from_fen("8/8").is_err());
    }

    #[test]
    fn piece_set_uses_same_targets() {
        let specs = enumerate_piece_set(&[768], 3).unwrap();
        assert_eq!(specs.len(), 48);
        for game in [Game::Chess, Game::Xiangqi] {
            let targets = |m: Modification| -> Vec<String> {
                specs
                    .iter()
                    .filter_map(|s| match &s.params {
                        TaskParams::Piece(p) if p.game == game && p.modification == m => {
                            p.target.clone()
                        }
                        _ => None,
                    })
                    .collect()
            };
            let rem = targets(Modification::Remove);
            assert_eq!(rem.len(), 12);
            assert_eq!(rem, targets(Modification::Replace));
        }
        assert_eq!(
            enumerate_piece_set(&[384, 768, 1152], 3).unwrap().len(),
            144
        );
    }

    #[test]
    fn gridboard_truths() {
        let last = |d| LineMod {
            delta: d,
            position: Position::Last,
        };
        let (_, t) = make_gridboard(GridGame::Sudoku, Some(last(-1)), None, 0).unwrap();
        assert_eq!(t.primary, Truth::count(8, 9));
        let (_, t) = make_gridboard(GridGame::Go, Some(last(1)), None, 0).unwrap();
        assert_eq!(t.primary, Truth::count(20, 19));
        let (_, t) = make_gridboard(GridGame::Xiangqi, Some(last(1)), None, 0).unwrap();
        assert_eq!(t.primary, Truth::count(11, 10));
        assert!(make_gridboard(GridGame::Chess, Some(last(1)), Some(last(1)), 0).is_err());
        assert!(make_gridboard(GridGame::Chess, None, None, 0).is_err());
    }

    #[test]
    fn gridboard_scenes_count_lines() {
        let first = LineMod {
            delta: -1,
            position: Position::First,
        };
        let (p, _) = make_gridboard(GridGame::Chess, Some(first), None, 0).unwrap();
        let s = gridboard_scene(&p, &FontChoice::Builtin).unwrap();
        assert_eq!(count_tagged(&s, "row").unwrap(), 7);
        assert_eq!(count_tagged(&s, "col").unwrap(), 8);
        let (p, _) = make_gridboard(
            GridGame::Go,
            None,
            Some(LineMod {
                delta: 1,
                position: Position::Last,
            }),
            0,
        )
        .unwrap();
        let s = gridboard_scene(&p, &FontChoice::Builtin).unwrap();
        assert_eq!(count_tagged(&s, "vline").unwrap(), 20);
        assert_eq!(count_tagged(&s, "hline").unwrap(), 19);
    }

    #[test]
    fn unmodified_sudoku_is_nine_by_nine() {
        let p = GridBoardParams {
            game: GridGame::Sudoku,
            rows: 9,
            cols: 9,
            row_delta: 0,
            col_delta: 0,
            position: Position::Last,
            digit_seed: 1,
        };
        let s = gridboard_scene(&p, &FontChoice::Builtin).unwrap();
        assert_eq!(count_tagged(&s, "row").unwrap(), 9);
        assert_eq!(count_tagged(&s, "col").unwrap(), 9);
        assert_eq!(count_tagged(&s, "block-line").unwrap(), 8);
        assert_eq!(count_tagged(&s, "digit").unwrap(), 25);
    }

    #[test]
    fn sudoku_blocks_follow_original_structure() {
        let (p, _) = make_gridboard(
            GridGame::Sudoku,
            Some(LineMod {
                delta: 1,
                position: Position::First,
            }),
            None,
            0,
        )
        .unwrap();
        let s = gridboard_scene(&p, &FontChoice::Builtin).unwrap();
        let ys: Vec<f64> = s
            .shapes()
            .iter()
            .filter(|sh| sh.has_tag("block-line"))
            .filter_map(|sh| match sh.geometry {
                crate::scene::Geometry::Line { y1, y2, .. } if y1 == y2 => Some(y1),
                _ => None,
            })
            .collect();
        // Original boundaries 0,3,6,9 shifted down one row of 60 px.
        assert_eq!(ys, vec![100.0, 280.0, 460.0, 640.0]);
    }

    #[test]
    fn gridboard_set_sizes() {
        assert_eq!(
            enumerate_gridboard_set(&[384, 768, 1152], 0).unwrap().len(),
            84
        );
        assert_eq!(enumerate_gridboard_set(&[768], 0).unwrap().len(), 28);
        assert_eq!(
            enumerate_gridboards(&[GridGame::Go], &[384, 768, 1152], 0)
                .unwrap()
                .len(),
            12
        );
    }
}
