//! Vector scene graph. Every stimulus is built as a [`Scene`] first; images,
//! SVG files and ground-truth checks are all derived from it.

mod font;
mod oracle;
mod raster;
mod svg;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};

pub use font::{FontChoice, TextMetrics};
pub use oracle::{count_tagged, count_tagged_within, measure_tagged, Measure};
pub use raster::{rasterize, rasterize_with_budget, rescale_to, RasterImage, DEFAULT_MAX_PIXELS};
pub use svg::{count_tagged_in_svg, serialize_svg};

/// Coordinates are compared against the canvas with this slack so that
/// shapes computed with trigonometry may touch the edge.
const BOUNDS_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Color {
    pub r: u8,
    pub g: u8,
    pub b: u8,
    pub a: u8,
}

impl Color {
    pub const WHITE: Color = Color::rgb(255, 255, 255);
    pub const BLACK: Color = Color::rgb(0, 0, 0);

    pub const fn rgb(r: u8, g: u8, b: u8) -> Self {
        Color { r, g, b, a: 255 }
    }

    /// Parses `#rrggbb` or `#rrggbbaa`.
    pub fn from_hex(s: &str) -> Result<Self> {
        let hex = s.strip_prefix('#').unwrap_or(s);
        if !(hex.len() == 6 || hex.len() == 8) || !hex.chars().all(|c| c.is_ascii_hexdigit()) {
            bail!(Argument, "bad colour {s:?}");
        }
        let byte = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).unwrap();
        let a = if hex.len() == 8 { byte(6) } else { 255 };
        Ok(Color {
            r: byte(0),
            g: byte(2),
            b: byte(4),
            a,
        })
    }

    pub fn to_hex(self) -> String {
        if self.a == 255 {
            format!("#{:02x}{:02x}{:02x}", self.r, self.g, self.b)
        } else {
            format!("#{:02x}{:02x}{:02x}{:02x}", self.r, self.g, self.b, self.a)
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for Color {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Color {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Color::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// 2×3 affine matrix in SVG order: `x' = a·x + c·y + e`, `y' = b·x + d·y + f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl Default for Affine {
    fn default() -> Self {
        Affine::IDENTITY
    }
}

impl Affine {
    pub const IDENTITY: Affine = Affine {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
        e: 0.0,
        f: 0.0,
    };

    pub fn translate(dx: f64, dy: f64) -> Self {
        Affine {
            e: dx,
            f: dy,
            ..Affine::IDENTITY
        }
    }

    pub fn scale(sx: f64, sy: f64) -> Self {
        Affine {
            a: sx,
            d: sy,
            ..Affine::IDENTITY
        }
    }

    /// Rotation by `radians` about `(cx, cy)`; positive turns +x towards +y.
    pub fn rotate_about(radians: f64, cx: f64, cy: f64) -> Self {
        let (s, c) = radians.sin_cos();
        Affine::translate(cx, cy)
            .then(&Affine {
                a: c,
                b: s,
                c: -s,
                d: c,
                e: 0.0,
                f: 0.0,
            })
            .then(&Affine::translate(-cx, -cy))
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn then(&self, other: &Affine) -> Affine {
        Affine {
            a: self.a * other.a + self.c * other.b,
            b: self.b * other.a + self.d * other.b,
            c: self.a * other.c + self.c * other.d,
            d: self.b * other.c + self.d * other.d,
            e: self.a * other.e + self.c * other.f + self.e,
            f: self.b * other.e + self.d * other.f + self.f,
        }
    }

    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.a * x + self.c * y + self.e,
            self.b * x + self.d * y + self.f,
        )
    }

    pub fn is_identity(&self) -> bool {
        *self == Affine::IDENTITY
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LineCap {
    #[default]
    Butt,
    Round,
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stroke {
    pub color: Color,
    pub width: f64,
    pub cap: LineCap,
}

impl Stroke {
    pub fn new(color: Color, width: f64) -> Self {
        Stroke {
            color,
            width,
            cap: LineCap::Butt,
        }
    }

    pub fn round(color: Color, width: f64) -> Self {
        Stroke {
            color,
            width,
            cap: LineCap::Round,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TextAnchor {
    Start,
    #[default]
    Middle,
    End,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Line {
        x1: f64,
        y1: f64,
        x2: f64,
        y2: f64,
    },
    Circle {
        cx: f64,
        cy: f64,
        r: f64,
    },
    Rect {
        x: f64,
        y: f64,
        w: f64,
        h: f64,
    },
    Polygon {
        points: Vec<(f64, f64)>,
    },
    Polyline {
        points: Vec<(f64, f64)>,
    },
    /// `(x, y)` is the anchor point on the baseline.
    Text {
        x: f64,
        y: f64,
        size: f64,
        content: String,
        anchor: TextAnchor,
        font: FontChoice,
    },
    Group {
        children: Vec<Shape>,
    },
}

impl Geometry {
    pub fn kind(&self) -> &'static str {
        match self {
            Geometry::Line { .. } => "line",
            Geometry::Circle { .. } => "circle",
            Geometry::Rect { .. } => "rect",
            Geometry::Polygon { .. } => "polygon",
            Geometry::Polyline { .. } => "polyline",
            Geometry::Text { .. } => "text",
            Geometry::Group { .. } => "group",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Shape {
    pub geometry: Geometry,
    pub stroke: Option<Stroke>,
    pub fill: Option<Color>,
    pub transform: Affine,
    pub tags: BTreeSet<String>,
}

impl Shape {
    pub fn new(geometry: Geometry) -> Self {
        Shape {
            geometry,
            stroke: None,
            fill: None,
            transform: Affine::IDENTITY,
            tags: BTreeSet::new(),
        }
    }

    pub fn line(x1: f64, y1: f64, x2: f64, y2: f64) -> Self {
        Shape::new(Geometry::Line { x1, y1, x2, y2 })
    }

    pub fn circle(cx: f64, cy: f64, r: f64) -> Self {
        Shape::new(Geometry::Circle { cx, cy, r })
    }

    pub fn rect(x: f64, y: f64, w: f64, h: f64) -> Self {
        Shape::new(Geometry::Rect { x, y, w, h })
    }

    pub fn polygon(points: Vec<(f64, f64)>) -> Self {
        Shape::new(Geometry::Polygon { points })
    }

    pub fn polyline(points: Vec<(f64, f64)>) -> Self {
        Shape::new(Geometry::Polyline { points })
    }

    pub fn text(x: f64, y: f64, size: f64, content: impl Into<String>, font: FontChoice) -> Self {
        Shape::new(Geometry::Text {
            x,
            y,
            size,
            content: content.into(),
            anchor: TextAnchor::Middle,
            font,
        })
    }

    pub fn group(children: Vec<Shape>) -> Self {
        Shape::new(Geometry::Group { children })
    }

    pub fn fill(mut self, color: Color) -> Self {
        self.fill = Some(color);
        self
    }

    pub fn stroke(mut self, stroke: Stroke) -> Self {
        self.stroke = Some(stroke);
        self
    }

    pub fn transform(mut self, t: Affine) -> Self {
        self.transform = t;
        self
    }

    pub fn tag(mut self, tag: impl Into<String>) -> Self {
        self.tags.insert(tag.into());
        self
    }

    pub fn tags<I, S>(mut self, tags: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.tags.extend(tags.into_iter().map(Into::into));
        self
    }

    pub fn has_tag(&self, tag: &str) -> bool {
        self.tags.contains(tag)
    }

    /// Axis-aligned bounding box of the geometry (stroke excluded) after
    /// applying `parent ∘ self.transform`.
    pub fn bbox(&self, parent: &Affine) -> Option<BBox> {
        let t = parent.then(&self.transform);
        let mut b = BBox::EMPTY;
        match &self.geometry {
            Geometry::Line { x1, y1, x2, y2 } => {
                b.add(t.apply(*x1, *y1));
                b.add(t.apply(*x2, *y2));
            }
            Geometry::Circle { cx, cy, r } => {
                // Exact for similarity transforms; conservative otherwise.
                let (x, y) = t.apply(*cx, *cy);
                let rx = r * (t.a.hypot(t.c));
                let ry = r * (t.b.hypot(t.d));
                b.add((x - rx, y - ry));
                b.add((x + rx, y + ry));
            }
            Geometry::Rect { x, y, w, h } => {
                for p in [(*x, *y), (x + w, *y), (*x, y + h), (x + w, y + h)] {
                    b.add(t.apply(p.0, p.1));
                }
            }
            Geometry::Polygon { points } | Geometry::Polyline { points } => {
                for p in points {
                    b.add(t.apply(p.0, p.1));
                }
            }
            Geometry::Text {
                x,
                y,
                size,
                content,
                anchor,
                font,
            } => {
                let m = font.measure(content, *size).ok()?;
                let left = match anchor {
                    TextAnchor::Start => *x,
                    TextAnchor::Middle => x - m.width / 2.0,
                    TextAnchor::End => x - m.width,
                };
                for p in [
                    (left, y - m.ascent),
                    (left + m.width, y - m.ascent),
                    (left, y + m.descent),
                    (left + m.width, y + m.descent),
                ] {
                    b.add(t.apply(p.0, p.1));
                }
            }
            Geometry::Group { children } => {
                for c in children {
                    if let Some(cb) = c.bbox(&t) {
                        b.union(&cb);
                    }
                }
            }
        }
        (!b.is_empty()).then_some(b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl BBox {
    pub const EMPTY: BBox = BBox {
        x0: f64::INFINITY,
        y0: f64::INFINITY,
        x1: f64::NEG_INFINITY,
        y1: f64::NEG_INFINITY,
    };

    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        BBox { x0, y0, x1, y1 }
    }

    pub fn add(&mut self, (x, y): (f64, f64)) {
        self.x0 = self.x0.min(x);
        self.y0 = self.y0.min(y);
        self.x1 = self.x1.max(x);
        self.y1 = self.y1.max(y);
    }

    pub fn union(&mut self, o: &BBox) {
        self.add((o.x0, o.y0));
        self.add((o.x1, o.y1));
    }

    pub fn is_empty(&self) -> bool {
        self.x0 > self.x1 || self.y0 > self.y1
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)
    }

    pub fn contains(&self, (x, y): (f64, f64)) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }

    /// Positive gap between two boxes along the separating axis, or the
    /// (non-positive) overlap depth when they intersect.
    pub fn separation(&self, o: &BBox) -> f64 {
        let dx = (o.x0 - self.x1).max(self.x0 - o.x1);
        let dy = (o.y0 - self.y1).max(self.y0 - o.y1);
        dx.max(dy)
    }
}

/// A validated scene. Construction checks geometry, canvas bounds and the tag
/// vocabulary, so everything downstream can assume a well-formed graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    width: f64,
    height: f64,
    background: Color,
    shapes: Vec<Shape>,
    vocabulary: BTreeSet<String>,
}

impl Scene {
    pub fn new<S: AsRef<str>>(
        width: f64,
        height: f64,
        background: Color,
        vocabulary: &[S],
        shapes: Vec<Shape>,
    ) -> Result<Scene> {
        if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
            bail!(
                Construction,
                "scene size must be positive, got {width}×{height}"
            );
        }
        let vocabulary: BTreeSet<String> =
            vocabulary.iter().map(|s| s.as_ref().to_string()).collect();
        let scene = Scene {
            width,
            height,
            background,
            shapes,
            vocabulary,
        };
        let canvas = BBox::new(
            -BOUNDS_EPS,
            -BOUNDS_EPS,
            width + BOUNDS_EPS,
            height + BOUNDS_EPS,
        );
        for (i, shape) in scene.shapes.iter().enumerate() {
            scene.validate_shape(shape, &Affine::IDENTITY, &canvas, &format!("shape {i}"))?;
        }
        Ok(scene)
    }

    fn validate_shape(
        &self,
        shape: &Shape,
        parent: &Affine,
        canvas: &BBox,
        path: &str,
    ) -> Result<()> {
        for tag in &shape.tags {
            if !self.vocabulary.contains(tag) {
                bail!(Construction, "{path}: tag {tag:?} not in scene vocabulary");
            }
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match &shape.geometry {
            Geometry::Line { x1, y1, x2, y2 } => {
                if !finite(&[*x1, *y1, *x2, *y2]) || (x1 == x2 && y1 == y2) {
                    bail!(
                        Construction,
                        "{path}: line needs two distinct finite endpoints"
                    );
                }
            }
            Geometry::Circle { cx, cy, r } => {
                if !finite(&[*cx, *cy, *r]) || *r <= 0.0 {
                    bail!(Construction, "{path}: circle radius must be > 0");
                }
            }
            Geometry::Rect { x, y, w, h } => {
                if !finite(&[*x, *y, *w, *h]) || *w <= 0.0 || *h <= 0.0 {
                    bail!(Construction, "{path}: rect width/height must be > 0");
                }
            }
            Geometry::Polygon { points } | Geometry::Polyline { points } => {
                let min = if matches!(shape.geometry, Geometry::Polygon { .. }) {
                    3
                } else {
                    2
                };
                if points.len() < min || !points.iter().all(|p| p.0.is_finite() && p.1.is_finite())
                {
                    bail!(
                        Construction,
                        "{path}: {} needs at least {min} finite points",
                        shape.geometry.kind()
                    );
                }
            }
            Geometry::Text {
                size,
                content,
                font,
                ..
            } => {
                if size.is_nan() || *size <= 0.0 || content.is_empty() {
                    bail!(
                        Construction,
                        "{path}: text needs a positive size and content"
                    );
                }
                font.measure(content, *size)?;
            }
            Geometry::Group { children } => {
                let t = parent.then(&shape.transform);
                for (i, c) in children.iter().enumerate() {
                    self.validate_shape(c, &t, canvas, &format!("{path}/{i}"))?;
                }
            }
        }
        if let Some(s) = &shape.stroke {
            if s.width.is_nan() || s.width <= 0.0 {
                bail!(Construction, "{path}: stroke width must be > 0");
            }
        }
        if let Some(b) = shape.bbox(parent) {
            if b.x0 < canvas.x0 || b.y0 < canvas.y0 || b.x1 > canvas.x1 || b.y1 > canvas.y1 {
                bail!(
                    Construction,
                    "{path}: {} at [{:.2},{:.2}]-[{:.2},{:.2}] leaves the {}×{} canvas",
                    shape.geometry.kind(),
                    b.x0,
                    b.y0,
                    b.x1,
                    b.y1,
                    self.width,
                    self.height
                );
            }
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn background(&self) -> Color {
        self.background
    }

    pub fn shapes(&self) -> &[Shape] {
        &self.shapes
    }

    pub fn vocabulary(&self) -> &BTreeSet<String> {
        &self.vocabulary
    }

    /// Depth-first walk over every shape with its accumulated transform.
    pub fn walk<'a>(&'a self, mut f: impl FnMut(&'a Shape, &Affine)) {
        fn go<'a>(shapes: &'a [Shape], parent: &Affine, f: &mut impl FnMut(&'a Shape, &Affine)) {
            for s in shapes {
                f(s, parent);
                if let Geometry::Group { children } = &s.geometry {
                    go(children, &parent.then(&s.transform), f);
                }
            }
        }
        go(&self.shapes, &Affine::IDENTITY, &mut f);
    }

    /// Rebuilds the scene keeping only top-level shapes accepted by `keep`,
    /// each optionally restyled. Used by background removal.
    pub fn filtered(
        &self,
        background: Color,
        mut keep: impl FnMut(&Shape) -> Option<Shape>,
    ) -> Result<Scene> {
        let shapes = self.shapes.iter().filter_map(&mut keep).collect();
        let vocab: Vec<&String> = self.vocabulary.iter().collect();
        Scene::new(self.width, self.height, background, &vocab, shapes)
    }
}

/// True when the shape or any descendant carries a tag accepted by `pred`.
pub fn carries_tag(shape: &Shape, pred: &dyn Fn(&str) -> bool) -> bool {
    shape.tags.iter().any(|t| pred(t))
        || matches!(&shape.geometry, Geometry::Group { children } if children.iter().any(|c| carries_tag(c, pred)))
}

/// Regular star polygon with `points` tips, outer radius `r`, first tip
/// pointing up.
pub fn star_points(cx: f64, cy: f64, r: f64, inner_ratio: f64, points: usize) -> Vec<(f64, f64)> {
    let n = points * 2;
    (0..n)
        .map(|i| {
            let rr = if i % 2 == 0 { r } else { r * inner_ratio };
            let a = -std::f64::consts::FRAC_PI_2 + i as f64 * std::f64::consts::PI / points as f64;
            (cx + rr * a.cos(), cy + rr * a.sin())
        })
        .collect()
}

/// Inner/outer radius ratio of a regular five-pointed star.
pub const STAR5_INNER: f64 = 0.381_966_011_250_105_1;
