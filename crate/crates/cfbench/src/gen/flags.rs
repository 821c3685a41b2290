//! Parametric flag templates and ±1 star/stripe edits.
//!
//! Templates are look-alikes that keep each flag's standard element count
//! and overall arrangement; they are not reproductions of national artwork.

use serde::{Deserialize, Serialize};

use crate::error::{bail, Error, Result};
use crate::item::{GroundTruth, Task, TaskParams, Truth, YesNo};
use crate::scene::{star_points, BBox, Color, Scene, Shape, Stroke, STAR5_INNER};

use super::{ItemSpec, Modification};

pub const WIDTH: f64 = 1800.0;
pub const HEIGHT: f64 = 1200.0;

pub const VOCABULARY: &[&str] = &["stripe", "star", "band", "canton", "emblem", "triangle"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlagKind {
    StripeStack,
    StarGrid,
    StarCircle,
    StarRow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Element {
    Star,
    Stripe,
}

impl Element {
    pub fn tag(self) -> &'static str {
        match self {
            Element::Star => "star",
            Element::Stripe => "stripe",
        }
    }

    pub fn plural(self) -> &'static str {
        match self {
            Element::Star => "stars",
            Element::Stripe => "stripes",
        }
    }
}

impl FlagKind {
    pub fn element(self) -> Element {
        match self {
            FlagKind::StripeStack => Element::Stripe,
            _ => Element::Star,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Align {
    Left,
    #[default]
    Center,
    Right,
}

/// Element layout. Coordinates are canvas px on the 1800×1200 base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Layout {
    Stripes {
        /// One colour per stripe, top to bottom.
        colors: Vec<Color>,
        #[serde(default)]
        canton: Option<Canton>,
        #[serde(default)]
        hoist_triangle: Option<HoistTriangle>,
    },
    Circle {
        cx: f64,
        cy: f64,
        radius: f64,
        star_radius: f64,
    },
    /// Stars spread evenly over an arc; angles in degrees, counter-clockwise
    /// from +x, `from` is the first star.
    Arc {
        cx: f64,
        cy: f64,
        radius: f64,
        from: f64,
        to: f64,
        star_radius: f64,
    },
    Line {
        x0: f64,
        y0: f64,
        x1: f64,
        y1: f64,
        star_radius: f64,
    },
    Grid {
        rows: Vec<usize>,
        /// Anchor x: left edge, centre, or right edge depending on `align`.
        x: f64,
        y0: f64,
        dx: f64,
        dy: f64,
        star_radius: f64,
        #[serde(default)]
        align: Align,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Canton {
    /// Number of stripes the canton covers; its height follows stripe height.
    pub stripes: usize,
    pub width: f64,
    pub color: Color,
    pub content: CantonContent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CantonContent {
    Empty,
    /// Staggered rows of stars; counts per row.
    StarField {
        rows: Vec<usize>,
        color: Color,
    },
    Star {
        color: Color,
    },
    Cross {
        color: Color,
    },
    Sun {
        color: Color,
    },
    CrescentStar {
        color: Color,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoistTriangle {
    pub depth: f64,
    pub color: Color,
    #[serde(default)]
    pub outline: Option<Color>,
    #[serde(default)]
    pub star: Option<Color>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoTag {
    Band,
    Canton,
    Emblem,
    Triangle,
}

impl DecoTag {
    fn as_str(self) -> &'static str {
        match self {
            DecoTag::Band => "band",
            DecoTag::Canton => "canton",
            DecoTag::Emblem => "emblem",
            DecoTag::Triangle => "triangle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum DecoShape {
    Rect { x: f64, y: f64, w: f64, h: f64 },
    Polygon { points: Vec<(f64, f64)> },
    Circle { cx: f64, cy: f64, r: f64 },
}

/// Non-counted artwork drawn beneath the counted elements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decoration {
    pub tag: DecoTag,
    pub color: Color,
    #[serde(flatten)]
    pub shape: DecoShape,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlagTemplate {
    /// Identifier used in item ids, e.g. `united_states`.
    pub name: String,
    /// Short display name, e.g. `United States`.
    pub display: String,
    /// Name as used in "Is this the flag of ...?", e.g. `the United States`.
    pub country_label: String,
    pub kind: FlagKind,
    pub element_count: usize,
    pub field: Color,
    #[serde(default = "white")]
    pub element_color: Color,
    pub layout: Layout,
    #[serde(default)]
    pub decorations: Vec<Decoration>,
}

fn white() -> Color {
    Color::WHITE
}

impl FlagTemplate {
    pub fn element(&self) -> Element {
        self.kind.element()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.element_count;
        match self.element() {
            Element::Star if n < 3 => bail!(
                Construction,
                "{}: star flags need at least 3 stars, got {n}",
                self.name
            ),
            Element::Stripe if n < 5 => bail!(
                Construction,
                "{}: stripe flags need at least 5 stripes, got {n}",
                self.name
            ),
            _ => {}
        }
        let ok = matches!(
            (self.kind, &self.layout),
            (FlagKind::StripeStack, Layout::Stripes { .. })
                | (FlagKind::StarCircle, Layout::Circle { .. })
                | (FlagKind::StarRow, Layout::Arc { .. } | Layout::Line { .. })
                | (FlagKind::StarGrid, Layout::Grid { .. })
        );
        if !ok {
            bail!(
                Construction,
                "{}: layout does not match kind {:?}",
                self.name,
                self.kind
            );
        }
        match &self.layout {
            Layout::Stripes { colors, canton, .. } => {
                if colors.len() != n {
                    bail!(
                        Construction,
                        "{}: {} stripe colours for {n} stripes",
                        self.name,
                        colors.len()
                    );
                }
                if let Some(c) = canton {
                    if c.stripes == 0 || c.stripes >= n {
                        bail!(
                            Construction,
                            "{}: canton must span 1..{} stripes",
                            self.name,
                            n - 1
                        );
                    }
                }
            }
            Layout::Grid { rows, .. } if rows.iter().sum::<usize>() != n || rows.contains(&0) => {
                bail!(
                    Construction,
                    "{}: grid rows {:?} do not sum to {n}",
                    self.name,
                    rows
                );
            }
            _ => {}
        }
        Ok(())
    }
}

/// Manifest parameters of a flag item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlagParams {
    pub template: String,
    /// As used in "Is this the flag of ...?".
    pub country_label: String,
    pub kind: FlagKind,
    pub element: Element,
    pub modification: Modification,
    pub standard_count: usize,
    pub count: usize,
}

/// A modified flag with its truths.
#[derive(Debug, Clone, PartialEq)]
pub struct FlagItem {
    pub template: String,
    pub modification: Modification,
    pub element: Element,
    pub ground_truth: usize,
    pub bias_answer: usize,
    pub country_label: String,
}

/// Renders the unmodified template.
pub fn render_flag(t: &FlagTemplate) -> Result<Scene> {
    t.validate()?;
    build(t, Modification::Standard)
}

/// Adds or removes one counted element and re-balances the layout.
pub fn modify_flag(t: &FlagTemplate, m: Modification) -> Result<(FlagItem, Scene)> {
    t.validate()?;
    if m == Modification::Remove && t.element_count < 2 {
        bail!(
            Argument,
            "{}: cannot remove from {} elements",
            t.name,
            t.element_count
        );
    }
    let gt = match m {
        Modification::Add => t.element_count + 1,
        Modification::Remove => t.element_count - 1,
        Modification::Standard => t.element_count,
        other => bail!(Argument, "flags support add/remove, not {other:?}"),
    };
    let scene = build(t, m)?;
    Ok((
        FlagItem {
            template: t.name.clone(),
            modification: m,
            element: t.element(),
            ground_truth: gt,
            bias_answer: t.element_count,
            country_label: t.country_label.clone(),
        },
        scene,
    ))
}

fn star(cx: f64, cy: f64, r: f64, color: Color) -> Shape {
    Shape::polygon(star_points(cx, cy, r, STAR5_INNER, 5))
        .fill(color)
        .tag("star")
}

fn deco_shape(d: &Decoration) -> Shape {
    let s = match &d.shape {
        DecoShape::Rect { x, y, w, h } => Shape::rect(*x, *y, *w, *h),
        DecoShape::Polygon { points } => Shape::polygon(points.clone()),
        DecoShape::Circle { cx, cy, r } => Shape::circle(*cx, *cy, *r),
    };
    s.fill(d.color).tag(d.tag.as_str())
}

/// Star centres for `n` stars under the layout.
fn star_centres(layout: &Layout, n: usize) -> Vec<(f64, f64)> {
    match layout {
        Layout::Circle { cx, cy, radius, .. } => (0..n)
            .map(|i| {
                let a = -std::f64::consts::FRAC_PI_2 + i as f64 * std::f64::consts::TAU / n as f64;
                (cx + radius * a.cos(), cy + radius * a.sin())
            })
            .collect(),
        Layout::Arc {
            cx,
            cy,
            radius,
            from,
            to,
            ..
        } => (0..n)
            .map(|i| {
                let f = if n == 1 {
                    0.5
                } else {
                    i as f64 / (n - 1) as f64
                };
                let a = (from + (to - from) * f).to_radians();
                (cx + radius * a.cos(), cy - radius * a.sin())
            })
            .collect(),
        Layout::Line { x0, y0, x1, y1, .. } => (0..n)
            .map(|i| {
                let f = if n == 1 {
                    0.5
                } else {
                    i as f64 / (n - 1) as f64
                };
                (x0 + (x1 - x0) * f, y0 + (y1 - y0) * f)
            })
            .collect(),
        Layout::Grid {
            rows,
            x,
            y0,
            dx,
            dy,
            align,
            ..
        } => {
            let mut rows = rows.clone();
            let std_n: usize = rows.iter().sum();
            if n > std_n {
                *rows.last_mut().unwrap() += n - std_n;
            }
            let mut out = Vec::new();
            for (r, &count) in rows.iter().enumerate() {
                let y = y0 + r as f64 * dy;
                let span = (count.max(1) - 1) as f64 * dx;
                let left = match align {
                    Align::Left => *x,
                    Align::Center => x - span / 2.0,
                    Align::Right => x - span,
                };
                out.extend((0..count).map(|c| (left + c as f64 * dx, y)));
            }
            out
        }
        Layout::Stripes { .. } => Vec::new(),
    }
}

fn star_radius(layout: &Layout) -> f64 {
    match layout {
        Layout::Circle { star_radius, .. }
        | Layout::Arc { star_radius, .. }
        | Layout::Line { star_radius, .. }
        | Layout::Grid { star_radius, .. } => *star_radius,
        Layout::Stripes { .. } => 0.0,
    }
}

fn build(t: &FlagTemplate, m: Modification) -> Result<Scene> {
    let mut shapes: Vec<Shape> = t.decorations.iter().map(deco_shape).collect();
    match &t.layout {
        Layout::Stripes {
            colors,
            canton,
            hoist_triangle,
        } => {
            let mut colors = colors.clone();
            match m {
                Modification::Remove => {
                    colors.pop();
                }
                Modification::Add => {
                    let n = colors.len();
                    colors.push(colors[n - 2]);
                }
                _ => {}
            }
            let n = colors.len();
            let h = HEIGHT / n as f64;
            let mut stripes: Vec<Shape> = colors
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    Shape::rect(0.0, i as f64 * h, WIDTH, h)
                        .fill(*c)
                        .tag("stripe")
                })
                .collect();
            shapes.append(&mut stripes);
            if let Some(c) = canton {
                shapes.extend(canton_shapes(c, c.stripes as f64 * h));
            }
            if let Some(tri) = hoist_triangle {
                let mut s =
                    Shape::polygon(vec![(0.0, 0.0), (tri.depth, HEIGHT / 2.0), (0.0, HEIGHT)])
                        .fill(tri.color)
                        .tag("triangle");
                if let Some(o) = tri.outline {
                    s = s.stroke(Stroke::new(o, 12.0));
                }
                shapes.push(s);
                if let Some(sc) = tri.star {
                    shapes.push(star(tri.depth * 0.38, HEIGHT / 2.0, tri.depth * 0.16, sc));
                }
            }
        }
        layout => {
            let std_n = t.element_count;
            let mut centres = match m {
                Modification::Add => star_centres(layout, std_n + 1),
                _ => star_centres(layout, std_n),
            };
            if m == Modification::Remove {
                centres.pop();
            }
            let r = star_radius(layout);
            let stars: Vec<Shape> = centres
                .iter()
                .map(|&(x, y)| star(x, y, r, t.element_color))
                .collect();
            check_separation(&t.name, &stars)?;
            shapes.extend(stars);
        }
    }
    Scene::new(WIDTH, HEIGHT, t.field, VOCABULARY, shapes)
        .map_err(|e| Error::Construction(format!("flag {}: {e}", t.name)))
}

fn check_separation(name: &str, stars: &[Shape]) -> Result<()> {
    let boxes: Vec<BBox> = stars
        .iter()
        .filter_map(|s| s.bbox(&Default::default()))
        .collect();
    for i in 0..boxes.len() {
        for j in i + 1..boxes.len() {
            if boxes[i].separation(&boxes[j]) <= 0.0 {
                bail!(Construction, "flag {name}: stars {i} and {j} overlap");
            }
        }
    }
    Ok(())
}

fn canton_shapes(c: &Canton, height: f64) -> Vec<Shape> {
    let w = c.width;
    let mut out = vec![Shape::rect(0.0, 0.0, w, height).fill(c.color).tag("canton")];
    match &c.content {
        CantonContent::Empty => {}
        CantonContent::StarField { rows, color } => {
            let nrows = rows.len();
            let widest = rows.iter().copied().max().unwrap_or(1);
            let dy = height / (nrows as f64 + 1.0);
            let dx = w / (2.0 * widest as f64);
            let r = (dy * 0.5).min(dx * 0.5);
            for (ri, &count) in rows.iter().enumerate() {
                let y = dy * (ri as f64 + 1.0);
                let offset = if count == widest { 1.0 } else { 2.0 };
                for k in 0..count {
                    out.push(star(dx * (offset + 2.0 * k as f64), y, r, *color));
                }
            }
        }
        CantonContent::Star { color } => {
            out.push(star(
                w / 2.0,
                height / 2.0 + height * 0.04,
                height * 0.3,
                *color,
            ));
        }
        CantonContent::Cross { color } => {
            let bar = height / 5.0;
            out.push(
                Shape::rect(0.0, (height - bar) / 2.0, w, bar)
                    .fill(*color)
                    .tag("emblem"),
            );
            out.push(
                Shape::rect((w - bar) / 2.0, 0.0, bar, height)
                    .fill(*color)
                    .tag("emblem"),
            );
        }
        CantonContent::Sun { color } => {
            let (cx, cy) = (w / 2.0, height / 2.0);
            out.push(
                Shape::polygon(star_points(cx, cy, height * 0.36, 0.62, 16))
                    .fill(*color)
                    .tag("emblem"),
            );
            out.push(
                Shape::circle(cx, cy, height * 0.16)
                    .fill(*color)
                    .tag("emblem"),
            );
        }
        CantonContent::CrescentStar { color } => {
            let (cx, cy) = (w * 0.36, height / 2.0);
            let r = height * 0.36;
            out.push(Shape::circle(cx, cy, r).fill(*color).tag("emblem"));
            out.push(
                Shape::circle(cx + r * 0.22, cy, r * 0.82)
                    .fill(c.color)
                    .tag("emblem"),
            );
            out.push(
                Shape::polygon(star_points(w * 0.68, cy, height * 0.26, 0.45, 14))
                    .fill(*color)
                    .tag("emblem"),
            );
        }
    }
    out
}

/// Items for every template × {remove, add} × resolution. Roster
/// composition is checked separately by [`validate_roster`].
pub fn enumerate_flag_set(
    roster: &[FlagTemplate],
    resolutions: &[u32],
    seed: u64,
) -> Result<Vec<ItemSpec>> {
    let mut specs = Vec::new();
    for t in roster {
        for m in [Modification::Remove, Modification::Add] {
            let (item, _) = modify_flag(t, m)?;
            specs.extend(resolutions.iter().map(|&d| flag_spec(t, &item, d, seed)));
        }
    }
    Ok(specs)
}

fn flag_spec(t: &FlagTemplate, item: &FlagItem, resolution: u32, seed: u64) -> ItemSpec {
    let el = item.element;
    ItemSpec {
        item_id: format!(
            "flag_{}_{}_{}",
            t.name,
            item.modification.as_str(),
            el.tag()
        ),
        task: Task::Flags,
        resolution,
        subject: t.display.clone(),
        params: TaskParams::Flag(FlagParams {
            template: t.name.clone(),
            country_label: t.country_label.clone(),
            kind: t.kind,
            element: el,
            modification: item.modification,
            standard_count: t.element_count,
            count: item.ground_truth,
        }),
        truth: GroundTruth {
            primary: Truth::count(item.ground_truth as i64, item.bias_answer as i64),
            q3: Truth::yes_no(YesNo::No),
        },
        seed,
        reference: Some(reference_id(t)),
    }
}

pub fn reference_id(t: &FlagTemplate) -> String {
    format!("flag_{}_standard", t.name)
}

/// Reference (unmodified) flag specs for sanity and side-by-side prompts.
pub fn reference_specs(roster: &[FlagTemplate], resolutions: &[u32], seed: u64) -> Vec<ItemSpec> {
    roster
        .iter()
        .flat_map(|t| {
            resolutions.iter().map(move |&d| ItemSpec {
                item_id: reference_id(t),
                task: Task::Flags,
                resolution: d,
                subject: t.display.clone(),
                params: TaskParams::Flag(FlagParams {
                    template: t.name.clone(),
                    country_label: t.country_label.clone(),
                    kind: t.kind,
                    element: t.element(),
                    modification: Modification::Standard,
                    standard_count: t.element_count,
                    count: t.element_count,
                }),
                truth: GroundTruth {
                    primary: Truth::count(t.element_count as i64, t.element_count as i64),
                    q3: Truth::yes_no(YesNo::Yes),
                },
                seed,
                reference: None,
            })
        })
        .collect()
}

/// Default composition: 13 star-typed and 7 stripe-typed templates.
pub fn validate_roster(roster: &[FlagTemplate]) -> Result<()> {
    let stars = roster
        .iter()
        .filter(|t| t.element() == Element::Star)
        .count();
    let stripes = roster.len() - stars;
    if roster.len() != 20 || stars != 13 || stripes != 7 {
        bail!(
            Config,
            "flag roster must hold 13 star-typed and 7 stripe-typed templates, got {stars} and {stripes}"
        );
    }
    let mut names: Vec<&str> = roster.iter().map(|t| t.name.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    if names.len() != roster.len() {
        bail!(Config, "flag roster has duplicate template names");
    }
    for t in roster {
        t.validate()?;
    }
    Ok(())
}

#[derive(Deserialize)]
struct RosterFile {
    flag: Vec<FlagTemplate>,
}

/// Parses a TOML roster made of `[[flag]]` tables.
pub fn parse_roster(text: &str) -> Result<Vec<FlagTemplate>> {
    let f: RosterFile =
        toml::from_str(text).map_err(|e| Error::Config(format!("flag roster: {e}")))?;
    Ok(f.flag)
}

pub fn find_template<'a>(roster: &'a [FlagTemplate], name: &str) -> Result<&'a FlagTemplate> {
    roster
        .iter()
        .find(|t| t.name == name)
        .ok_or_else(|| Error::Argument(format!("no flag template named {name:?}")))
}

pub fn scene_for(roster: &[FlagTemplate], p: &FlagParams) -> Result<Scene> {
    let t = find_template(roster, &p.template)?;
    t.validate()?;
    build(t, p.modification)
}

// ---------------------------------------------------------------------------
// Default roster.

fn hex(s: &str) -> Color {
    Color::from_hex(s).expect("valid literal colour")
}

fn band(y: f64, h: f64, color: &str) -> Decoration {
    Decoration {
        tag: DecoTag::Band,
        color: hex(color),
        shape: DecoShape::Rect {
            x: 0.0,
            y,
            w: WIDTH,
            h,
        },
    }
}

fn poly(tag: DecoTag, color: &str, points: &[(f64, f64)]) -> Decoration {
    Decoration {
        tag,
        color: hex(color),
        shape: DecoShape::Polygon {
            points: points.to_vec(),
        },
    }
}

fn disc(tag: DecoTag, color: &str, cx: f64, cy: f64, r: f64) -> Decoration {
    Decoration {
        tag,
        color: hex(color),
        shape: DecoShape::Circle { cx, cy, r },
    }
}

/// Band of width `w` along the segment (x0,y0)-(x1,y1), as a quadrilateral.
fn diagonal(
    tag: DecoTag,
    color: &str,
    (x0, y0): (f64, f64),
    (x1, y1): (f64, f64),
    w: f64,
) -> Decoration {
    let (dx, dy) = (x1 - x0, y1 - y0);
    let len = dx.hypot(dy);
    let (nx, ny) = (-dy / len * w / 2.0, dx / len * w / 2.0);
    let clamp = |x: f64, y: f64| (x.clamp(0.0, WIDTH), y.clamp(0.0, HEIGHT));
    poly(
        tag,
        color,
        &[
            clamp(x0 + nx, y0 + ny),
            clamp(x1 + nx, y1 + ny),
            clamp(x1 - nx, y1 - ny),
            clamp(x0 - nx, y0 - ny),
        ],
    )
}

fn stripes(colors: &[&str], n: usize) -> Vec<Color> {
    (0..n).map(|i| hex(colors[i % colors.len()])).collect()
}

#[allow(clippy::too_many_arguments)]
fn template(
    name: &str,
    display: &str,
    label: &str,
    kind: FlagKind,
    count: usize,
    field: &str,
    element: &str,
    layout: Layout,
    decorations: Vec<Decoration>,
) -> FlagTemplate {
    FlagTemplate {
        name: name.into(),
        display: display.into(),
        country_label: label.into(),
        kind,
        element_count: count,
        field: hex(field),
        element_color: hex(element),
        layout,
        decorations,
    }
}

/// The built-in 20-flag roster.
pub fn default_roster() -> Vec<FlagTemplate> {
    use FlagKind::*;
    let zimbabwe = [
        "#319208", "#ffd200", "#de2010", "#000000", "#de2010", "#ffd200", "#319208",
    ];
    vec![
        template(
            "united_states",
            "United States",
            "the United States",
            StripeStack,
            13,
            "#ffffff",
            "#ffffff",
            Layout::Stripes {
                colors: stripes(&["#b22234", "#ffffff"], 13),
                canton: Some(Canton {
                    stripes: 7,
                    width: 720.0,
                    color: hex("#3c3b6e"),
                    content: CantonContent::StarField {
                        rows: vec![6, 5, 6, 5, 6, 5, 6, 5, 6],
                        color: Color::WHITE,
                    },
                }),
                hoist_triangle: None,
            },
            vec![],
        ),
        template(
            "malaysia",
            "Malaysia",
            "Malaysia",
            StripeStack,
            14,
            "#ffffff",
            "#ffffff",
            Layout::Stripes {
                colors: stripes(&["#cc0001", "#ffffff"], 14),
                canton: Some(Canton {
                    stripes: 8,
                    width: 900.0,
                    color: hex("#010066"),
                    content: CantonContent::CrescentStar {
                        color: hex("#ffcc00"),
                    },
                }),
                hoist_triangle: None,
            },
            vec![],
        ),
        template(
            "liberia",
            "Liberia",
            "Liberia",
            StripeStack,
            11,
            "#ffffff",
            "#ffffff",
            Layout::Stripes {
                colors: stripes(&["#bf0a30", "#ffffff"], 11),
                canton: Some(Canton {
                    stripes: 5,
                    width: 546.0,
                    color: hex("#002868"),
                    content: CantonContent::Star {
                        color: Color::WHITE,
                    },
                }),
                hoist_triangle: None,
            },
            vec![],
        ),
        template(
            "uruguay",
            "Uruguay",
            "Uruguay",
            StripeStack,
            9,
            "#ffffff",
            "#ffffff",
            Layout::Stripes {
                colors: stripes(&["#ffffff", "#0038a8"], 9),
                canton: Some(Canton {
                    stripes: 5,
                    width: 667.0,
                    color: Color::WHITE,
                    content: CantonContent::Sun {
                        color: hex("#fcd116"),
                    },
                }),
                hoist_triangle: None,
            },
            vec![],
        ),
        template(
            "greece",
            "Greece",
            "Greece",
            StripeStack,
            9,
            "#ffffff",
            "#ffffff",
            Layout::Stripes {
                colors: stripes(&["#0d5eaf", "#ffffff"], 9),
                canton: Some(Canton {
                    stripes: 5,
                    width: 667.0,
                    color: hex("#0d5eaf"),
                    content: CantonContent::Cross {
                        color: Color::WHITE,
                    },
                }),
                hoist_triangle: None,
            },
            vec![],
        ),
        template(
            "zimbabwe",
            "Zimbabwe",
            "Zimbabwe",
            StripeStack,
            7,
            "#ffffff",
            "#ffffff",
            Layout::Stripes {
                colors: zimbabwe.iter().map(|c| hex(c)).collect(),
                canton: None,
                hoist_triangle: Some(HoistTriangle {
                    depth: 620.0,
                    color: Color::WHITE,
                    outline: Some(Color::BLACK),
                    star: Some(hex("#de2010")),
                }),
            },
            vec![],
        ),
        template(
            "cuba",
            "Cuba",
            "Cuba",
            StripeStack,
            5,
            "#ffffff",
            "#ffffff",
            Layout::Stripes {
                colors: stripes(&["#002a8f", "#ffffff"], 5),
                canton: None,
                hoist_triangle: Some(HoistTriangle {
                    depth: 1039.0,
                    color: hex("#cf142b"),
                    outline: None,
                    star: Some(Color::WHITE),
                }),
            },
            vec![],
        ),
        template(
            "european_union",
            "European Union",
            "the European Union",
            StarCircle,
            12,
            "#003399",
            "#ffcc00",
            Layout::Circle {
                cx: 900.0,
                cy: 600.0,
                radius: 400.0,
                star_radius: 66.0,
            },
            vec![],
        ),
        template(
            "cape_verde",
            "Cape Verde",
            "Cape Verde",
            StarCircle,
            10,
            "#003893",
            "#f7d116",
            Layout::Circle {
                cx: 675.0,
                cy: 750.0,
                radius: 300.0,
                star_radius: 40.0,
            },
            vec![
                band(600.0, 100.0, "#ffffff"),
                band(700.0, 100.0, "#cf2027"),
                band(800.0, 100.0, "#ffffff"),
            ],
        ),
        template(
            "cook_islands",
            "Cook Islands",
            "the Cook Islands",
            StarCircle,
            15,
            "#012169",
            "#ffffff",
            Layout::Circle {
                cx: 1350.0,
                cy: 600.0,
                radius: 270.0,
                star_radius: 40.0,
            },
            vec![
                diagonal(
                    DecoTag::Canton,
                    "#ffffff",
                    (0.0, 0.0),
                    (900.0, 600.0),
                    110.0,
                ),
                diagonal(
                    DecoTag::Canton,
                    "#ffffff",
                    (0.0, 600.0),
                    (900.0, 0.0),
                    110.0,
                ),
                diagonal(DecoTag::Canton, "#c8102e", (0.0, 0.0), (900.0, 600.0), 40.0),
                diagonal(DecoTag::Canton, "#c8102e", (0.0, 600.0), (900.0, 0.0), 40.0),
                poly(
                    DecoTag::Canton,
                    "#ffffff",
                    &[(390.0, 0.0), (510.0, 0.0), (510.0, 600.0), (390.0, 600.0)],
                ),
                poly(
                    DecoTag::Canton,
                    "#ffffff",
                    &[(0.0, 240.0), (900.0, 240.0), (900.0, 360.0), (0.0, 360.0)],
                ),
                poly(
                    DecoTag::Canton,
                    "#c8102e",
                    &[(420.0, 0.0), (480.0, 0.0), (480.0, 600.0), (420.0, 600.0)],
                ),
                poly(
                    DecoTag::Canton,
                    "#c8102e",
                    &[(0.0, 270.0), (900.0, 270.0), (900.0, 330.0), (0.0, 330.0)],
                ),
            ],
        ),
        template(
            "venezuela",
            "Venezuela",
            "Venezuela",
            StarRow,
            8,
            "#00247d",
            "#ffffff",
            Layout::Arc {
                cx: 900.0,
                cy: 800.0,
                radius: 330.0,
                from: 160.0,
                to: 20.0,
                star_radius: 34.0,
            },
            vec![band(0.0, 400.0, "#ffcc00"), band(800.0, 400.0, "#cf142b")],
        ),
        template(
            "kosovo",
            "Kosovo",
            "Kosovo",
            StarRow,
            6,
            "#244aa5",
            "#ffffff",
            Layout::Arc {
                cx: 900.0,
                cy: 720.0,
                radius: 430.0,
                from: 145.0,
                to: 35.0,
                star_radius: 42.0,
            },
            vec![poly(
                DecoTag::Emblem,
                "#d0a650",
                &[
                    (700.0, 560.0),
                    (820.0, 520.0),
                    (930.0, 540.0),
                    (1060.0, 580.0),
                    (1110.0, 690.0),
                    (1080.0, 820.0),
                    (980.0, 930.0),
                    (860.0, 960.0),
                    (760.0, 880.0),
                    (690.0, 760.0),
                ],
            )],
        ),
        template(
            "tajikistan",
            "Tajikistan",
            "Tajikistan",
            StarRow,
            7,
            "#ffffff",
            "#f8c300",
            Layout::Arc {
                cx: 900.0,
                cy: 640.0,
                radius: 200.0,
                from: 160.0,
                to: 20.0,
                star_radius: 26.0,
            },
            vec![
                band(0.0, 343.0, "#cc0000"),
                band(857.0, 343.0, "#006600"),
                poly(
                    DecoTag::Emblem,
                    "#f8c300",
                    &[
                        (820.0, 660.0),
                        (835.0, 590.0),
                        (865.0, 625.0),
                        (900.0, 570.0),
                        (935.0, 625.0),
                        (965.0, 590.0),
                        (980.0, 660.0),
                    ],
                ),
            ],
        ),
        template(
            "bosnia",
            "Bosnia and Herzegovina",
            "Bosnia and Herzegovina",
            StarRow,
            9,
            "#002395",
            "#ffffff",
            Layout::Line {
                x0: 410.0,
                y0: 90.0,
                x1: 1070.0,
                y1: 1110.0,
                star_radius: 45.0,
            },
            vec![poly(
                DecoTag::Triangle,
                "#fecb00",
                &[(560.0, 0.0), (1280.0, 0.0), (1280.0, 1200.0)],
            )],
        ),
        template(
            "comoros",
            "Comoros",
            "the Comoros",
            StarRow,
            4,
            "#ffffff",
            "#ffffff",
            Layout::Line {
                x0: 330.0,
                y0: 420.0,
                x1: 330.0,
                y1: 780.0,
                star_radius: 36.0,
            },
            vec![
                band(0.0, 300.0, "#ffc61e"),
                band(600.0, 300.0, "#ce1126"),
                band(900.0, 300.0, "#3a75c4"),
                poly(
                    DecoTag::Triangle,
                    "#3d8e33",
                    &[(0.0, 0.0), (700.0, 600.0), (0.0, 1200.0)],
                ),
                disc(DecoTag::Emblem, "#ffffff", 190.0, 600.0, 170.0),
                disc(DecoTag::Emblem, "#3d8e33", 240.0, 600.0, 150.0),
            ],
        ),
        template(
            "uzbekistan",
            "Uzbekistan",
            "Uzbekistan",
            StarGrid,
            12,
            "#ffffff",
            "#ffffff",
            Layout::Grid {
                rows: vec![3, 4, 5],
                x: 900.0,
                y0: 110.0,
                dx: 90.0,
                dy: 90.0,
                star_radius: 24.0,
                align: Align::Right,
            },
            vec![
                band(0.0, 400.0, "#0099b5"),
                band(400.0, 24.0, "#ce1126"),
                band(776.0, 24.0, "#ce1126"),
                band(800.0, 400.0, "#1eb53a"),
                disc(DecoTag::Emblem, "#ffffff", 300.0, 200.0, 130.0),
                disc(DecoTag::Emblem, "#0099b5", 345.0, 200.0, 115.0),
            ],
        ),
        template(
            "solomon_islands",
            "Solomon Islands",
            "the Solomon Islands",
            StarGrid,
            5,
            "#215b33",
            "#ffffff",
            Layout::Grid {
                rows: vec![3, 2],
                x: 420.0,
                y0: 170.0,
                dx: 160.0,
                dy: 160.0,
                star_radius: 45.0,
                align: Align::Center,
            },
            vec![
                poly(
                    DecoTag::Band,
                    "#0051ba",
                    &[(0.0, 0.0), (1800.0, 0.0), (0.0, 1200.0)],
                ),
                diagonal(DecoTag::Band, "#fcd116", (0.0, 1200.0), (1800.0, 0.0), 90.0),
            ],
        ),
        template(
            "honduras",
            "Honduras",
            "Honduras",
            StarGrid,
            5,
            "#ffffff",
            "#0073cf",
            Layout::Grid {
                rows: vec![2, 1, 2],
                x: 900.0,
                y0: 520.0,
                dx: 160.0,
                dy: 80.0,
                star_radius: 28.0,
                align: Align::Center,
            },
            vec![band(0.0, 400.0, "#0073cf"), band(800.0, 400.0, "#0073cf")],
        ),
        template(
            "micronesia",
            "Micronesia",
            "Micronesia",
            StarGrid,
            4,
            "#75b2dd",
            "#ffffff",
            Layout::Grid {
                rows: vec![1, 2, 1],
                x: 900.0,
                y0: 380.0,
                dx: 400.0,
                dy: 220.0,
                star_radius: 60.0,
                align: Align::Center,
            },
            vec![],
        ),
        template(
            "burundi",
            "Burundi",
            "Burundi",
            StarGrid,
            3,
            "#ce1126",
            "#ce1126",
            Layout::Grid {
                rows: vec![1, 2],
                x: 900.0,
                y0: 520.0,
                dx: 180.0,
                dy: 160.0,
                star_radius: 60.0,
                align: Align::Center,
            },
            vec![
                poly(
                    DecoTag::Band,
                    "#1eb53a",
                    &[(0.0, 0.0), (900.0, 600.0), (0.0, 1200.0)],
                ),
                poly(
                    DecoTag::Band,
                    "#1eb53a",
                    &[(1800.0, 0.0), (900.0, 600.0), (1800.0, 1200.0)],
                ),
                diagonal(
                    DecoTag::Band,
                    "#ffffff",
                    (0.0, 0.0),
                    (1800.0, 1200.0),
                    150.0,
                ),
                diagonal(
                    DecoTag::Band,
                    "#ffffff",
                    (0.0, 1200.0),
                    (1800.0, 0.0),
                    150.0,
                ),
                disc(DecoTag::Emblem, "#ffffff", 900.0, 600.0, 300.0),
            ],
        ),
    ]
}
