//! Tag-based counting and measurement. Ground truths are re-derived from the
//! scene through these functions rather than trusted from generator code.

use crate::error::{bail, Result};

use super::{BBox, Geometry, Scene};

/// Geometric measure of one tagged shape in canvas px / radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Measure {
    Segment {
        start: (f64, f64),
        end: (f64, f64),
        length: f64,
        /// `atan2(dy, dx)` in canvas coordinates (y down).
        angle: f64,
    },
    Path {
        length: f64,
    },
    Circle {
        center: (f64, f64),
        radius: f64,
    },
}

impl Measure {
    /// Scalar size: length for segments/paths, radius for circles.
    pub fn magnitude(&self) -> f64 {
        match self {
            Measure::Segment { length, .. } | Measure::Path { length } => *length,
            Measure::Circle { radius, .. } => *radius,
        }
    }
}

fn check_tag(scene: &Scene, tag: &str) -> Result<()> {
    if !scene.vocabulary().contains(tag) {
        bail!(Argument, "tag {tag:?} is not in the scene vocabulary");
    }
    Ok(())
}

/// Number of non-group shapes carrying `tag`.
pub fn count_tagged(scene: &Scene, tag: &str) -> Result<usize> {
    check_tag(scene, tag)?;
    let mut n = 0;
    scene.walk(|s, _| {
        if !matches!(s.geometry, Geometry::Group { .. }) && s.has_tag(tag) {
            n += 1;
        }
    });
    Ok(n)
}

/// Like [`count_tagged`] but only shapes whose bounding-box centre lies in
/// `region`.
pub fn count_tagged_within(scene: &Scene, tag: &str, region: BBox) -> Result<usize> {
    check_tag(scene, tag)?;
    let mut n = 0;
    scene.walk(|s, parent| {
        if !matches!(s.geometry, Geometry::Group { .. }) && s.has_tag(tag) {
            if let Some(b) = s.bbox(parent) {
                if region.contains(b.center()) {
                    n += 1;
                }
            }
        }
    });
    Ok(n)
}

/// Measures every shape carrying `tag`, in paint order.
pub fn measure_tagged(scene: &Scene, tag: &str) -> Result<Vec<Measure>> {
    check_tag(scene, tag)?;
    let mut out = Vec::new();
    let mut bad = None;
    scene.walk(|s, parent| {
        if matches!(s.geometry, Geometry::Group { .. }) || !s.has_tag(tag) {
            return;
        }
        let t = parent.then(&s.transform);
        match &s.geometry {
            Geometry::Line { x1, y1, x2, y2 } => {
                let a = t.apply(*x1, *y1);
                let b = t.apply(*x2, *y2);
                let (dx, dy) = (b.0 - a.0, b.1 - a.1);
                out.push(Measure::Segment {
                    start: a,
                    end: b,
                    length: dx.hypot(dy),
                    angle: dy.atan2(dx),
                });
            }
            Geometry::Polyline { points } => {
                let pts: Vec<_> = points.iter().map(|p| t.apply(p.0, p.1)).collect();
                let length = pts
                    .windows(2)
                    .map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1))
                    .sum();
                out.push(Measure::Path { length });
            }
            Geometry::Circle { cx, cy, r } => {
                out.push(Measure::Circle {
                    center: t.apply(*cx, *cy),
                    radius: r * t.det().abs().sqrt(),
                });
            }
            other => bad = Some(other.kind()),
        }
    });
    if let Some(kind) = bad {
        bail!(Argument, "tag {tag:?} marks a {kind}, which has no measure");
    }
    Ok(out)
}
