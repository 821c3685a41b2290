//! Dice/tally grids following the distance-from-edge pattern with one
//! anomalous interior cell.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::item::{GroundTruth, Task, TaskParams, Truth, YesNo};
use crate::rng;
use crate::scene::{
    count_tagged_within, star_points, BBox, Color, Scene, Shape, Stroke, STAR5_INNER,
};

use super::ItemSpec;

pub const CELL: f64 = 100.0;
pub const MARGIN: f64 = 20.0;
pub const MIN_G: usize = 6;
pub const MAX_G: usize = 12;
pub const ANOMALIES_PER_G: usize = 2;
pub const VOCABULARY: &[&str] = &["grid-dot", "tally-line", "replacement-shape", "cell-frame"];

const DOT_RADIUS: f64 = 9.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridStyle {
    Dice,
    Tally,
}

impl GridStyle {
    pub fn as_str(self) -> &'static str {
        match self {
            GridStyle::Dice => "dice",
            GridStyle::Tally => "tally",
        }
    }

    /// Tag of the counted shapes.
    pub fn tag(self) -> &'static str {
        match self {
            GridStyle::Dice => "grid-dot",
            GridStyle::Tally => "tally-line",
        }
    }

    /// Noun used in questions.
    pub fn noun(self) -> &'static str {
        match self {
            GridStyle::Dice => "circles",
            GridStyle::Tally => "lines",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplacementShape {
    Triangle,
    Square,
    Star,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AnomalyKind {
    RemoveDot,
    ReplaceDot { shape: ReplacementShape },
    RemoveLine,
    AddLine,
}

impl AnomalyKind {
    pub fn style(self) -> GridStyle {
        match self {
            AnomalyKind::RemoveDot | AnomalyKind::ReplaceDot { .. } => GridStyle::Dice,
            _ => GridStyle::Tally,
        }
    }

    fn slug(self) -> String {
        match self {
            AnomalyKind::RemoveDot | AnomalyKind::RemoveLine => "remove".into(),
            AnomalyKind::AddLine => "add".into(),
            AnomalyKind::ReplaceDot { shape } => format!("replace_{}", serde_plain(shape)),
        }
    }
}

fn serde_plain(s: ReplacementShape) -> &'static str {
    match s {
        ReplacementShape::Triangle => "triangle",
        ReplacementShape::Square => "square",
        ReplacementShape::Star => "star",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Anomaly {
    pub row: usize,
    pub col: usize,
    pub kind: AnomalyKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    pub g: usize,
    pub style: GridStyle,
    pub anomaly: Option<Anomaly>,
}

impl GridParams {
    /// The queried cell: the anomaly, or the centre of an unmodified grid.
    pub fn query_cell(&self) -> (usize, usize) {
        match self.anomaly {
            Some(a) => (a.row, a.col),
            None => ((self.g - 1) / 2, (self.g - 1) / 2),
        }
    }

    pub fn cell_id(&self) -> String {
        let (r, c) = self.query_cell();
        cell_id(r, c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(MIN_G..=MAX_G).contains(&self.g) {
            bail!(Argument, "grid size {} outside {MIN_G}..={MAX_G}", self.g);
        }
        if let Some(a) = self.anomaly {
            let g = self.g;
            if a.row < 1 || a.col < 1 || a.row > g - 2 || a.col > g - 2 {
                bail!(
                    Argument,
                    "anomaly cell ({}, {}) touches the edge of a {g}×{g} grid",
                    a.row,
                    a.col
                );
            }
            if a.kind.style() != self.style {
                bail!(
                    Argument,
                    "{:?} does not apply to {} grids",
                    a.kind,
                    self.style.as_str()
                );
            }
            let base = base_count(a.row, a.col, g)?;
            if matches!(a.kind, AnomalyKind::RemoveDot | AnomalyKind::RemoveLine) && base < 2 {
                bail!(
                    Argument,
                    "removing from a base-{base} cell would leave it empty"
                );
            }
        }
        Ok(())
    }
}

pub fn base_count(row: usize, col: usize, g: usize) -> Result<usize> {
    if row >= g || col >= g {
        bail!(Argument, "cell ({row}, {col}) outside a {g}×{g} grid");
    }
    Ok(row.min(col).min(g - 1 - row).min(g - 1 - col) + 1)
}

/// Spreadsheet-style cell name: column letter then 1-based row.
pub fn cell_id(row: usize, col: usize) -> String {
    format!("{}{}", (b'A' + col as u8) as char, row + 1)
}

/// Pip centres in the unit cell, in canonical order; the last entry is the
/// one an edit removes or replaces.
pub fn layout_dice(n: usize) -> Result<Vec<(f64, f64)>> {
    let (a, m, b) = (0.25, 0.5, 0.75);
    Ok(match n {
        1 => vec![(m, m)],
        2 => vec![(a, a), (b, b)],
        3 => vec![(a, a), (m, m), (b, b)],
        4 => vec![(a, a), (b, a), (a, b), (b, b)],
        5 => vec![(a, a), (b, a), (a, b), (b, b), (m, m)],
        6 => vec![(a, a), (a, m), (a, b), (b, a), (b, m), (b, b)],
        _ => bail!(Argument, "dice layouts hold 1..=6 pips, got {n}"),
    })
}

/// Line segment in unit-cell coordinates.
pub type Segment = ((f64, f64), (f64, f64));

/// Tally strokes in the unit cell: groups of four verticals crossed by a
/// diagonal fifth, then the leftover verticals. Up to ten strokes per row.
pub fn layout_tally(n: usize) -> Result<Vec<Segment>> {
    if n < 1 {
        bail!(Argument, "tally needs at least one stroke");
    }
    let rows = n.div_ceil(10);
    let row_h = 0.7 / rows as f64;
    let gap = 0.1;
    let group_gap = 0.17;
    let mut out = Vec::new();
    for row in 0..rows {
        let count = (n - row * 10).min(10);
        let (y0, y1) = (
            0.15 + row as f64 * row_h + 0.08 * row_h,
            0.15 + (row + 1) as f64 * row_h - 0.08 * row_h,
        );
        // Horizontal positions of the vertical strokes, group by group.
        let mut xs = Vec::new();
        let mut x = 0.0;
        let verticals = (count / 5) * 4 + count % 5;
        for i in 0..verticals {
            if i > 0 {
                x += if i % 4 == 0 && i / 4 <= count / 5 {
                    group_gap
                } else {
                    gap
                };
            }
            xs.push(x);
        }
        let width = x;
        let left = 0.5 - width / 2.0;
        let xs: Vec<f64> = xs.iter().map(|v| v + left).collect();
        let mut k = 0;
        for _ in 0..count / 5 {
            for j in 0..4 {
                out.push(((xs[k + j], y0), (xs[k + j], y1)));
            }
            out.push((
                (xs[k] - 0.05, y1 - 0.05 * row_h),
                (xs[k + 3] + 0.05, y0 + 0.05 * row_h),
            ));
            k += 4;
        }
        for j in 0..count % 5 {
            out.push(((xs[k + j], y0), (xs[k + j], y1)));
        }
    }
    Ok(out)
}

pub fn cell_bbox(row: usize, col: usize) -> BBox {
    let (x, y) = (MARGIN + col as f64 * CELL, MARGIN + row as f64 * CELL);
    BBox::new(x, y, x + CELL, y + CELL)
}

fn dot(x: f64, y: f64) -> Shape {
    Shape::circle(x, y, DOT_RADIUS)
        .fill(Color::BLACK)
        .tag("grid-dot")
}

fn replacement(shape: ReplacementShape, x: f64, y: f64) -> Shape {
    let r = DOT_RADIUS * 1.2;
    let s = match shape {
        ReplacementShape::Triangle => Shape::polygon(vec![
            (x, y - r),
            (x + r * 0.866, y + r * 0.5),
            (x - r * 0.866, y + r * 0.5),
        ]),
        ReplacementShape::Square => Shape::rect(x - r * 0.8, y - r * 0.8, r * 1.6, r * 1.6),
        ReplacementShape::Star => Shape::polygon(star_points(x, y, r * 1.1, STAR5_INNER, 5)),
    };
    s.fill(Color::BLACK).tag("replacement-shape")
}

/// Shapes of one cell with its top-left corner at (x, y).
fn cell_shapes(
    style: GridStyle,
    n: usize,
    edit: Option<AnomalyKind>,
    x: f64,
    y: f64,
) -> Result<Vec<Shape>> {
    let mut out = Vec::new();
    match style {
        GridStyle::Dice => {
            let pos = layout_dice(n)?;
            let last = pos.len() - 1;
            for (i, (u, v)) in pos.into_iter().enumerate() {
                let (px, py) = (x + u * CELL, y + v * CELL);
                match edit {
                    Some(AnomalyKind::RemoveDot) if i == last => {}
                    Some(AnomalyKind::ReplaceDot { shape }) if i == last => {
                        out.push(replacement(shape, px, py))
                    }
                    _ => out.push(dot(px, py)),
                }
            }
        }
        GridStyle::Tally => {
            let m = match edit {
                Some(AnomalyKind::RemoveLine) => n - 1,
                Some(AnomalyKind::AddLine) => n + 1,
                _ => n,
            };
            let stroke = Stroke::round(Color::BLACK, 4.0);
            for ((u0, v0), (u1, v1)) in layout_tally(m)? {
                out.push(
                    Shape::line(x + u0 * CELL, y + v0 * CELL, x + u1 * CELL, y + v1 * CELL)
                        .stroke(stroke)
                        .tag("tally-line"),
                );
            }
        }
    }
    Ok(out)
}

fn frame(x: f64, y: f64) -> Shape {
    Shape::rect(x, y, CELL, CELL)
        .stroke(Stroke::new(Color::rgb(0x99, 0x99, 0x99), 1.5))
        .tag("cell-frame")
}

/// Renders the grid and returns its truths.
pub fn generate_grid(p: &GridParams) -> Result<(Scene, GroundTruth)> {
    p.validate()?;
    let g = p.g;
    let size = g as f64 * CELL + 2.0 * MARGIN;
    let mut shapes = Vec::new();
    for r in 0..g {
        for c in 0..g {
            let b = cell_bbox(r, c);
            shapes.push(frame(b.x0, b.y0));
            let edit = p
                .anomaly
                .filter(|a| (a.row, a.col) == (r, c))
                .map(|a| a.kind);
            shapes.extend(cell_shapes(
                p.style,
                base_count(r, c, g)?,
                edit,
                b.x0,
                b.y0,
            )?);
        }
    }
    let scene = Scene::new(size, size, Color::WHITE, VOCABULARY, shapes)?;
    Ok((scene, truth(p)?))
}

fn truth(p: &GridParams) -> Result<GroundTruth> {
    let (r, c) = p.query_cell();
    let base = base_count(r, c, p.g)? as i64;
    Ok(match p.anomaly.map(|a| a.kind) {
        None => GroundTruth {
            primary: Truth::count(base, base),
            q3: Truth::yes_no(YesNo::Yes),
        },
        Some(k) => {
            let gt = match k {
                AnomalyKind::AddLine => base + 1,
                _ => base - 1,
            };
            GroundTruth {
                primary: Truth::count(gt, base),
                q3: Truth::yes_no(YesNo::No),
            }
        }
    })
}

/// The queried cell alone with a neutral frame: the background-removed form.
pub fn isolated_cell_scene(p: &GridParams) -> Result<Scene> {
    p.validate()?;
    let (r, c) = p.query_cell();
    let edit = p.anomaly.map(|a| a.kind);
    let pad = MARGIN;
    let mut shapes = vec![frame(pad, pad)];
    shapes.extend(cell_shapes(
        p.style,
        base_count(r, c, p.g)?,
        edit,
        pad,
        pad,
    )?);
    Scene::new(
        CELL + 2.0 * pad,
        CELL + 2.0 * pad,
        Color::WHITE,
        VOCABULARY,
        shapes,
    )
}

/// Counted shapes whose centres fall in the queried cell, wherever that
/// cell sits in the scene (full grid or isolated cell).
pub fn oracle_cell_count(p: &GridParams, scene: &Scene) -> Result<i64> {
    let region = if scene.width() == CELL + 2.0 * MARGIN {
        cell_bbox(0, 0)
    } else {
        let (r, c) = p.query_cell();
        cell_bbox(r, c)
    };
    Ok(count_tagged_within(scene, p.style.tag(), region)? as i64)
}

/// Two distinct interior cells per grid size, drawn from a seeded stream.
pub fn anomaly_cells(g: usize, seed: u64) -> Vec<(usize, usize)> {
    let interior: Vec<(usize, usize)> = (1..g - 1)
        .flat_map(|r| (1..g - 1).map(move |c| (r, c)))
        .collect();
    let mut rng = rng::stream(seed, &format!("grids/g{g}/cells"));
    let mut cells: Vec<(usize, usize)> = interior
        .choose_multiple(&mut rng, ANOMALIES_PER_G)
        .copied()
        .collect();
    cells.sort_unstable();
    cells
}

pub fn enumerate_grid_set(resolutions: &[u32], seed: u64) -> Result<Vec<ItemSpec>> {
    enumerate_grids(
        &[GridStyle::Dice, GridStyle::Tally],
        MIN_G..=MAX_G,
        resolutions,
        seed,
    )
}

pub fn enumerate_grids(
    styles: &[GridStyle],
    sizes: std::ops::RangeInclusive<usize>,
    resolutions: &[u32],
    seed: u64,
) -> Result<Vec<ItemSpec>> {
    let mut specs = Vec::new();
    let mut shapes = rng::stream(seed, "grids/replacement-shapes");
    for g in sizes {
        for (row, col) in anomaly_cells(g, seed) {
            let shape = [
                ReplacementShape::Triangle,
                ReplacementShape::Square,
                ReplacementShape::Star,
            ][shapes.gen_range(0..3)];
            for &style in styles {
                let kinds = match style {
                    GridStyle::Dice => [AnomalyKind::RemoveDot, AnomalyKind::ReplaceDot { shape }],
                    GridStyle::Tally => [AnomalyKind::RemoveLine, AnomalyKind::AddLine],
                };
                for kind in kinds {
                    let params = GridParams {
                        g,
                        style,
                        anomaly: Some(Anomaly { row, col, kind }),
                    };
                    params.validate()?;
                    let truth = truth(&params)?;
                    let item_id = format!(
                        "grid_{}_g{g}_{}_{}",
                        style.as_str(),
                        cell_id(row, col),
                        kind.slug()
                    );
                    specs.extend(resolutions.iter().map(|&d| ItemSpec {
                        item_id: item_id.clone(),
                        task: Task::Grids,
                        resolution: d,
                        subject: "Patterned grid".into(),
                        params: TaskParams::Grid(params.clone()),
                        truth: truth.clone(),
                        seed,
                        reference: Some(reference_id(g, style)),
                    }));
                }
            }
        }
    }
    Ok(specs)
}

pub fn reference_id(g: usize, style: GridStyle) -> String {
    format!("grid_{}_g{g}_standard", style.as_str())
}

pub fn reference_specs(resolutions: &[u32], seed: u64) -> Vec<ItemSpec> {
    let mut out = Vec::new();
    for g in MIN_G..=MAX_G {
        for style in [GridStyle::Dice, GridStyle::Tally] {
            let params = GridParams {
                g,
                style,
                anomaly: None,
            };
            let truth = truth(&params).expect("valid reference grid");
            out.extend(resolutions.iter().map(|&d| ItemSpec {
                item_id: reference_id(g, style),
                task: Task::Grids,
                resolution: d,
                subject: "Patterned grid".into(),
                params: TaskParams::Grid(params.clone()),
                truth: truth.clone(),
                seed,
                reference: None,
            }));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_counts() {
        assert_eq!(base_count(0, 3, 7).unwrap(), 1);
        assert_eq!(base_count(3, 3, 7).unwrap(), 4);
        assert_eq!(base_count(2, 2, 6).unwrap(), 3);
        assert!(base_count(7, 0, 7).is_err());
    }

    #[test]
    fn cell_ids() {
        assert_eq!(cell_id(2, 2), "C3");
        assert_eq!(cell_id(0, 0), "A1");
        assert_eq!(cell_id(3, 3), "D4");
    }

    #[test]
    fn dice_faces() {
        assert_eq!(layout_dice(1).unwrap(), vec![(0.5, 0.5)]);
        let five = layout_dice(5).unwrap();
        assert_eq!(five.len(), 5);
        assert!(five.contains(&(0.5, 0.5)));
        let six = layout_dice(6).unwrap();
        assert!(six.iter().all(|p| p.0 == 0.25 || p.0 == 0.75));
        assert!(layout_dice(0).is_err());
        assert!(layout_dice(7).is_err());
    }

    #[test]
    fn tally_grouping() {
        let vertical = |s: &((f64, f64), (f64, f64))| s.0 .0 == s.1 .0;
        let three = layout_tally(3).unwrap();
        assert_eq!(three.len(), 3);
        assert!(three.iter().all(vertical));
        let five = layout_tally(5).unwrap();
        assert_eq!(five.iter().filter(|s| vertical(s)).count(), 4);
        assert!(!vertical(&five[4]));
        let seven = layout_tally(7).unwrap();
        assert_eq!(seven.len(), 7);
        assert_eq!(seven.iter().filter(|s| !vertical(s)).count(), 1);
        assert!(layout_tally(0).is_err());
        for n in 1..=25 {
            let l = layout_tally(n).unwrap();
            assert_eq!(l.len(), n);
            assert!(l
                .iter()
                .all(|((a, b), (c, d))| [a, b, c, d].iter().all(|v| (0.0..=1.0).contains(*v))));
        }
    }

    #[test]
    fn anomaly_truths() {
        let mk = |kind| GridParams {
            g: 6,
            style: AnomalyKind::style(kind),
            anomaly: Some(Anomaly {
                row: 2,
                col: 2,
                kind,
            }),
        };
        let (s, t) = generate_grid(&mk(AnomalyKind::RemoveDot)).unwrap();
        assert_eq!(t.primary, Truth::count(2, 3));
        assert_eq!(
            oracle_cell_count(&mk(AnomalyKind::RemoveDot), &s).unwrap(),
            2
        );
        let (_, t) = generate_grid(&mk(AnomalyKind::AddLine)).unwrap();
        assert_eq!(t.primary, Truth::count(4, 3));
        let p = mk(AnomalyKind::ReplaceDot {
            shape: ReplacementShape::Star,
        });
        let (s, t) = generate_grid(&p).unwrap();
        assert_eq!(t.primary, Truth::count(2, 3));
        assert_eq!(oracle_cell_count(&p, &s).unwrap(), 2);
        assert_eq!(
            count_tagged_within(&s, "replacement-shape", cell_bbox(2, 2)).unwrap(),
            1
        );
    }

    #[test]
    fn invalid_anomalies() {
        let edge = GridParams {
            g: 6,
            style: GridStyle::Dice,
            anomaly: Some(Anomaly {
                row: 0,
                col: 2,
                kind: AnomalyKind::RemoveDot,
            }),
        };
        assert!(generate_grid(&edge).is_err());
        let wrong_style = GridParams {
            g: 6,
            style: GridStyle::Dice,
            anomaly: Some(Anomaly {
                row: 2,
                col: 2,
                kind: AnomalyKind::AddLine,
            }),
        };
        assert!(generate_grid(&wrong_style).is_err());
        assert!(generate_grid(&GridParams {
            g: 13,
            style: GridStyle::Dice,
            anomaly: None
        })
        .is_err());
    }

    #[test]
    fn isolated_cell_keeps_count() {
        let p = GridParams {
            g: 9,
            style: GridStyle::Tally,
            anomaly: Some(Anomaly {
                row: 4,
                col: 4,
                kind: AnomalyKind::AddLine,
            }),
        };
        let s = isolated_cell_scene(&p).unwrap();
        assert_eq!(oracle_cell_count(&p, &s).unwrap(), 6);
    }

    #[test]
    fn set_sizes() {
        assert_eq!(enumerate_grid_set(&[384, 768, 1152], 1).unwrap().len(), 168);
        assert_eq!(
            enumerate_grids(&[GridStyle::Dice], MIN_G..=MAX_G, &[384, 768, 1152], 1)
                .unwrap()
                .len(),
            84
        );
        assert_eq!(
            enumerate_grids(&[GridStyle::Dice, GridStyle::Tally], 6..=6, &[768], 1)
                .unwrap()
                .len(),
            8
        );
    }
}
