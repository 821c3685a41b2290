//! Six classical illusions with a strength knob (context geometry) and a
//! difference knob (true disparity between the two targets).
//!
//! Every construction paints a reference target first and a variable target
//! second. The variable target is the reference scaled by `1 + difference`,
//! so the measured relative difference is `|difference|` for either sign.
//! A positive difference enlarges the target that classically looks smaller.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::item::{GroundTruth, Task, TaskParams, Truth, YesNo};
use crate::rng;
use crate::scene::{measure_tagged, Color, Measure, Scene, Shape, Stroke};

use super::{slug_number, ItemSpec};

pub const WIDTH: f64 = 1200.0;
pub const HEIGHT: f64 = 800.0;
pub const VOCABULARY: &[&str] = &["target-line", "target-circle", "context"];

/// Zöllner tilt per unit difference.
pub const ZOLLNER_DEGREES_PER_UNIT: f64 = 10.0;
/// Poggendorff segment length; the exit offset is `difference × this`.
pub const POGGENDORFF_SEGMENT: f64 = 250.0;

const EQUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IllusionKind {
    Ebbinghaus,
    MullerLyer,
    Ponzo,
    VerticalHorizontal,
    Zollner,
    Poggendorff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuestionFamily {
    Equality,
    Parallel,
    Aligned,
}

impl IllusionKind {
    pub const ALL: [IllusionKind; 6] = [
        IllusionKind::Ebbinghaus,
        IllusionKind::MullerLyer,
        IllusionKind::Ponzo,
        IllusionKind::VerticalHorizontal,
        IllusionKind::Zollner,
        IllusionKind::Poggendorff,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IllusionKind::Ebbinghaus => "ebbinghaus",
            IllusionKind::MullerLyer => "muller_lyer",
            IllusionKind::Ponzo => "ponzo",
            IllusionKind::VerticalHorizontal => "vertical_horizontal",
            IllusionKind::Zollner => "zollner",
            IllusionKind::Poggendorff => "poggendorff",
        }
    }

    pub fn display(self) -> &'static str {
        match self {
            IllusionKind::Ebbinghaus => "Ebbinghaus",
            IllusionKind::MullerLyer => "Müller-Lyer",
            IllusionKind::Ponzo => "Ponzo",
            IllusionKind::VerticalHorizontal => "Vertical-Horizontal",
            IllusionKind::Zollner => "Zöllner",
            IllusionKind::Poggendorff => "Poggendorff",
        }
    }

    pub fn family(self) -> QuestionFamily {
        match self {
            IllusionKind::Zollner => QuestionFamily::Parallel,
            IllusionKind::Poggendorff => QuestionFamily::Aligned,
            _ => QuestionFamily::Equality,
        }
    }

    pub fn strength_range(self) -> (f64, f64) {
        match self {
            IllusionKind::Ebbinghaus => (0.1, 1.5),
            IllusionKind::MullerLyer => (10.0, 80.0),
            IllusionKind::Ponzo => (5.0, 38.0),
            IllusionKind::VerticalHorizontal => (0.0, 1.0),
            IllusionKind::Zollner => (10.0, 80.0),
            IllusionKind::Poggendorff => (1.0, 14.0),
        }
    }

    /// Smallest and largest allowed |difference| for modified items.
    pub fn difference_range(self) -> (f64, f64) {
        match self {
            IllusionKind::Zollner => (0.1, 1.0),
            IllusionKind::Poggendorff => (0.05, 0.3),
            _ => (0.05, 0.5),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IllusionParams {
    pub kind: IllusionKind,
    pub strength: f64,
    pub difference: f64,
}

impl IllusionParams {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.kind.strength_range();
        if !(self.strength >= lo && self.strength <= hi) {
            bail!(
                Argument,
                "{} strength {} outside [{lo}, {hi}]",
                self.kind.as_str(),
                self.strength
            );
        }
        let (dlo, dhi) = self.kind.difference_range();
        let d = self.difference.abs();
        if !(d == 0.0 || (d >= dlo && d <= dhi)) {
            bail!(
                Argument,
                "{} difference {} must be 0 or have magnitude in [{dlo}, {dhi}]",
                self.kind.as_str(),
                self.difference
            );
        }
        Ok(())
    }

    pub fn item_id(&self) -> String {
        format!(
            "{}_str{}_diff{}",
            self.kind.as_str(),
            slug_number(self.strength),
            slug_number(self.difference)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IllusionItem {
    pub params: IllusionParams,
    pub ground_truth: YesNo,
    pub bias_answer: YesNo,
    pub question_family: QuestionFamily,
}

impl IllusionItem {
    pub fn truth(&self) -> GroundTruth {
        let q3 = if self.params.difference == 0.0 {
            YesNo::Yes
        } else {
            YesNo::No
        };
        GroundTruth {
            primary: Truth::yes_no(self.ground_truth),
            q3: Truth::yes_no(q3),
        }
    }
}

fn target_stroke() -> Stroke {
    Stroke::new(Color::rgb(0xd0, 0x10, 0x10), 6.0)
}

fn context_stroke() -> Stroke {
    Stroke::new(Color::BLACK, 5.0)
}

fn target_line(x1: f64, y1: f64, x2: f64, y2: f64) -> Shape {
    Shape::line(x1, y1, x2, y2)
        .stroke(target_stroke())
        .tag("target-line")
}

fn context_line(x1: f64, y1: f64, x2: f64, y2: f64) -> Shape {
    Shape::line(x1, y1, x2, y2)
        .stroke(context_stroke())
        .tag("context")
}

/// Builds the scene and its truths.
pub fn generate_illusion(p: &IllusionParams) -> Result<(IllusionItem, Scene)> {
    p.validate()?;
    let k = 1.0 + p.difference;
    let s = p.strength;
    let mut shapes = Vec::new();
    match p.kind {
        IllusionKind::MullerLyer => {
            let fin = 60.0;
            let a = s.to_radians();
            let (fx, fy) = (fin * a.cos(), fin * a.sin());
            // Reference: tails (fins opening outward) on the lower line.
            let (y, half) = (520.0, 200.0);
            shapes.push(target_line(600.0 - half, y, 600.0 + half, y));
            for (x, dir) in [(600.0 - half, -1.0), (600.0 + half, 1.0)] {
                shapes.push(context_line(x, y, x + dir * fx, y - fy));
                shapes.push(context_line(x, y, x + dir * fx, y + fy));
            }
            // Variable: arrowheads on the upper line, which looks shorter.
            let (y, half) = (280.0, 200.0 * k);
            shapes.push(target_line(600.0 - half, y, 600.0 + half, y));
            for (x, dir) in [(600.0 - half, 1.0), (600.0 + half, -1.0)] {
                shapes.push(context_line(x, y, x + dir * fx, y - fy));
                shapes.push(context_line(x, y, x + dir * fx, y + fy));
            }
        }
        IllusionKind::Ebbinghaus => {
            let r = 50.0;
            let gap = 10.0;
            let grey = Color::rgb(0x80, 0x80, 0x80);
            let ring = |cx: f64, cr: f64, shapes: &mut Vec<Shape>| {
                let rr = 1.5 * r + gap + cr;
                for i in 0..8 {
                    let t = i as f64 * std::f64::consts::TAU / 8.0;
                    shapes.push(
                        Shape::circle(cx + rr * t.cos(), 400.0 + rr * t.sin(), cr)
                            .fill(grey)
                            .tag("context"),
                    );
                }
            };
            ring(350.0, r * (1.0 + s), &mut shapes);
            ring(850.0, r * (0.5 - 0.25 * s).max(0.15), &mut shapes);
            let red = Color::rgb(0xd0, 0x10, 0x10);
            // Reference on the right (small context); the left target, among
            // large circles, looks smaller.
            shapes.push(
                Shape::circle(850.0, 400.0, r)
                    .fill(red)
                    .tag("target-circle"),
            );
            shapes.push(
                Shape::circle(350.0, 400.0, r * k)
                    .fill(red)
                    .tag("target-circle"),
            );
        }
        IllusionKind::Ponzo => {
            let (ax, ay, bottom) = (600.0, 40.0, 760.0);
            let spread = (bottom - ay) * s.to_radians().tan();
            shapes.push(context_line(ax, ay, ax - spread, bottom));
            shapes.push(context_line(ax, ay, ax + spread, bottom));
            let base = 140.0;
            // Reference near the apex; the lower bar looks shorter.
            shapes.push(target_line(
                600.0 - base / 2.0,
                360.0,
                600.0 + base / 2.0,
                360.0,
            ));
            shapes.push(target_line(
                600.0 - base * k / 2.0,
                620.0,
                600.0 + base * k / 2.0,
                620.0,
            ));
        }
        IllusionKind::VerticalHorizontal => {
            let v = 300.0;
            let h = v * k;
            let (base_y, left) = (600.0, 600.0 - h / 2.0);
            let x = left + s * h;
            shapes.push(target_line(x, base_y, x, base_y - v));
            shapes.push(target_line(left, base_y, left + h, base_y));
        }
        IllusionKind::Zollner => {
            let half = 400.0;
            let theta = (p.difference * ZOLLNER_DEGREES_PER_UNIT).to_radians();
            let lines = [(300.0, 0.0, 1.0), (500.0, theta, -1.0)];
            let hatch = 30.0;
            let a = s.to_radians();
            for &(cy, t, sign) in &lines {
                let (ux, uy) = (t.cos(), -t.sin());
                let (x0, y0) = (600.0 - half * ux, cy - half * uy);
                let (x1, y1) = (600.0 + half * ux, cy + half * uy);
                // Hatches are context: their angle to the line is the strength.
                let ha = -t + sign * a;
                let (hx, hy) = (hatch * ha.cos(), hatch * ha.sin());
                for j in 0..=16 {
                    let f = -half + 50.0 * j as f64;
                    let (px, py) = (600.0 + f * ux, cy + f * uy);
                    shapes.push(context_line(px - hx, py - hy, px + hx, py + hy));
                }
                shapes.push(target_line(x0, y0, x1, y1));
            }
        }
        IllusionKind::Poggendorff => {
            let w = 20.0 * s;
            let (xl, xr) = (600.0 - w / 2.0, 600.0 + w / 2.0);
            let line_y = |x: f64| 400.0 - (x - 600.0);
            let c = POGGENDORFF_SEGMENT * std::f64::consts::FRAC_1_SQRT_2;
            let offset = p.difference * POGGENDORFF_SEGMENT;
            shapes.push(target_line(xl - c, line_y(xl) + c, xl, line_y(xl)));
            shapes.push(target_line(
                xr,
                line_y(xr) + offset,
                xr + c,
                line_y(xr) - c + offset,
            ));
            shapes.push(
                Shape::rect(xl, 100.0, w, 600.0)
                    .fill(Color::rgb(0x9a, 0x9a, 0x9a))
                    .tag("context"),
            );
        }
    }
    let scene = Scene::new(WIDTH, HEIGHT, Color::WHITE, VOCABULARY, shapes)?;
    let gt = YesNo::from_bool(p.difference == 0.0);
    Ok((
        IllusionItem {
            params: *p,
            ground_truth: gt,
            bias_answer: gt.flip(),
            question_family: p.kind.family(),
        },
        scene,
    ))
}

/// Measured relative difference between the two targets, from the scene.
pub fn measured_difference(kind: IllusionKind, scene: &Scene) -> Result<f64> {
    let tag = if kind == IllusionKind::Ebbinghaus {
        "target-circle"
    } else {
        "target-line"
    };
    let m = measure_tagged(scene, tag)?;
    if m.len() != 2 {
        bail!(Validation, "expected two targets, found {}", m.len());
    }
    Ok(match kind {
        IllusionKind::Zollner => {
            let angle = |m: &Measure| match m {
                Measure::Segment { angle, .. } => *angle,
                _ => f64::NAN,
            };
            (angle(&m[1]) - angle(&m[0])).abs() / ZOLLNER_DEGREES_PER_UNIT.to_radians()
        }
        IllusionKind::Poggendorff => {
            let (
                Measure::Segment {
                    start: a0,
                    end: a1,
                    length,
                    ..
                },
                Measure::Segment { start: b0, .. },
            ) = (m[0], m[1])
            else {
                bail!(Validation, "poggendorff targets must be segments");
            };
            let slope = (a1.1 - a0.1) / (a1.0 - a0.0);
            let predicted = a1.1 + (b0.0 - a1.0) * slope;
            (b0.1 - predicted).abs() / length
        }
        _ => {
            let (r, v) = (m[0].magnitude(), m[1].magnitude());
            (v - r).abs() / r
        }
    })
}

/// Yes iff the targets measure equal (or parallel, or aligned).
pub fn oracle_truth(kind: IllusionKind, scene: &Scene) -> Result<(YesNo, f64)> {
    let d = measured_difference(kind, scene)?;
    Ok((YesNo::from_bool(d <= EQUAL_TOL), d))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindGrid {
    pub kind: IllusionKind,
    /// One original (difference 0) and one modified item per strength.
    pub strengths: Vec<f64>,
    /// Differences cycled over the modified items, then shuffled.
    pub differences: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IllusionGrid {
    pub kinds: Vec<KindGrid>,
}

fn steps(start: i32, end: i32, step: i32, scale: f64) -> Vec<f64> {
    (start..=end)
        .step_by(step as usize)
        .map(|v| v as f64 / scale)
        .collect()
}

impl Default for IllusionGrid {
    fn default() -> Self {
        use IllusionKind::*;
        let pm = |v: &[f64]| -> Vec<f64> { v.iter().flat_map(|&x| [x, -x]).collect() };
        IllusionGrid {
            kinds: vec![
                KindGrid {
                    kind: Ebbinghaus,
                    strengths: steps(2, 13, 1, 10.0),
                    differences: pm(&[0.1, 0.25]),
                },
                KindGrid {
                    kind: MullerLyer,
                    strengths: steps(15, 70, 5, 1.0),
                    differences: pm(&[0.1, 0.25]),
                },
                KindGrid {
                    kind: Ponzo,
                    strengths: steps(15, 37, 2, 1.0),
                    differences: pm(&[0.1, 0.25]),
                },
                KindGrid {
                    kind: VerticalHorizontal,
                    strengths: vec![0.5, 0.45, 0.4, 0.35, 0.3, 0.25],
                    differences: pm(&[0.1, 0.15, 0.25]),
                },
                KindGrid {
                    kind: Zollner,
                    strengths: steps(15, 70, 5, 1.0),
                    differences: pm(&[0.2, 0.4]),
                },
                KindGrid {
                    kind: Poggendorff,
                    strengths: steps(3, 14, 1, 1.0),
                    differences: pm(&[0.1, 0.2]),
                },
            ],
        }
    }
}

impl IllusionGrid {
    pub fn only(&self, kinds: &[IllusionKind]) -> IllusionGrid {
        IllusionGrid {
            kinds: self
                .kinds
                .iter()
                .filter(|g| kinds.contains(&g.kind))
                .cloned()
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for g in &self.kinds {
            if g.strengths.is_empty() || g.differences.is_empty() {
                bail!(
                    Config,
                    "{}: strengths and differences must be non-empty",
                    g.kind.as_str()
                );
            }
            if g.differences.contains(&0.0) {
                bail!(
                    Config,
                    "{}: modified differences must be non-zero",
                    g.kind.as_str()
                );
            }
            for &s in &g.strengths {
                for &d in g.differences.iter().chain([0.0].iter()) {
                    IllusionParams {
                        kind: g.kind,
                        strength: s,
                        difference: d,
                    }
                    .validate()
                    .map_err(|e| crate::Error::Config(e.to_string()))?;
                }
            }
        }
        Ok(())
    }

    /// Originals then modified items per kind, in grid order.
    pub fn params(&self, seed: u64) -> Vec<IllusionParams> {
        let mut out = Vec::new();
        for g in &self.kinds {
            let n = g.strengths.len();
            let mut diffs: Vec<f64> = g.differences.iter().copied().cycle().take(n).collect();
            diffs.shuffle(&mut rng::stream(
                seed,
                &format!("illusions/{}/differences", g.kind.as_str()),
            ));
            for &s in &g.strengths {
                out.push(IllusionParams {
                    kind: g.kind,
                    strength: s,
                    difference: 0.0,
                });
            }
            for (&s, d) in g.strengths.iter().zip(diffs) {
                out.push(IllusionParams {
                    kind: g.kind,
                    strength: s,
                    difference: d,
                });
            }
        }
        out
    }
}

pub fn enumerate_illusion_set(
    grid: &IllusionGrid,
    resolutions: &[u32],
    seed: u64,
) -> Result<Vec<ItemSpec>> {
    let mut specs = Vec::new();
    for p in grid.params(seed) {
        p.validate()?;
        let gt = YesNo::from_bool(p.difference == 0.0);
        let item = IllusionItem {
            params: p,
            ground_truth: gt,
            bias_answer: gt.flip(),
            question_family: p.kind.family(),
        };
        let truth = item.truth();
        let id = p.item_id();
        specs.extend(resolutions.iter().map(|&d| ItemSpec {
            item_id: id.clone(),
            task: Task::Illusions,
            resolution: d,
            subject: format!("{} illusion", p.kind.display()),
            params: TaskParams::Illusion(p),
            truth: truth.clone(),
            seed,
            reference: None,
        }));
    }
    Ok(specs)
}
