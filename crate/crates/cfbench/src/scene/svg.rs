use std::fmt::Write;

use crate::error::{bail, Error, Result};

use super::{Affine, Geometry, LineCap, Scene, Shape, TextAnchor};

/// Fixed four-decimal formatting; negative zero prints as zero.
fn num(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn points_attr(points: &[(f64, f64)]) -> String {
    points
        .iter()
        .map(|(x, y)| format!("{},{}", num(*x), num(*y)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn transform_attr(t: &Affine) -> String {
    format!(
        " transform=\"matrix({} {} {} {} {} {})\"",
        num(t.a),
        num(t.b),
        num(t.c),
        num(t.d),
        num(t.e),
        num(t.f)
    )
}

fn paint_attrs(shape: &Shape, default_fill: Option<&str>) -> String {
    let mut a = String::new();
    match (shape.fill, default_fill) {
        (Some(c), _) => write!(a, " fill=\"{}\"", c.to_hex()).unwrap(),
        (None, Some(d)) => write!(a, " fill=\"{d}\"").unwrap(),
        (None, None) => a.push_str(" fill=\"none\""),
    }
    if let Some(s) = &shape.stroke {
        write!(
            a,
            " stroke=\"{}\" stroke-width=\"{}\"",
            s.color.to_hex(),
            num(s.width)
        )
        .unwrap();
        match s.cap {
            LineCap::Butt => {}
            LineCap::Round => a.push_str(" stroke-linecap=\"round\" stroke-linejoin=\"round\""),
            LineCap::Square => a.push_str(" stroke-linecap=\"square\""),
        }
    }
    a
}

fn tail_attrs(shape: &Shape) -> String {
    let mut a = String::new();
    if !shape.transform.is_identity() {
        a.push_str(&transform_attr(&shape.transform));
    }
    if !shape.tags.is_empty() {
        let tags: Vec<&str> = shape.tags.iter().map(String::as_str).collect();
        write!(a, " data-tags=\"{}\"", escape(&tags.join(" "))).unwrap();
    }
    a
}

fn write_shape(out: &mut String, shape: &Shape, depth: usize) {
    let indent = "  ".repeat(depth);
    let tail = tail_attrs(shape);
    match &shape.geometry {
        Geometry::Line { x1, y1, x2, y2 } => {
            writeln!(
                out,
                "{indent}<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"{}{tail}/>",
                num(*x1),
                num(*y1),
                num(*x2),
                num(*y2),
                paint_attrs(shape, None)
            )
        }
        Geometry::Circle { cx, cy, r } => writeln!(
            out,
            "{indent}<circle cx=\"{}\" cy=\"{}\" r=\"{}\"{}{tail}/>",
            num(*cx),
            num(*cy),
            num(*r),
            paint_attrs(shape, None)
        ),
        Geometry::Rect { x, y, w, h } => writeln!(
            out,
            "{indent}<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"{}{tail}/>",
            num(*x),
            num(*y),
            num(*w),
            num(*h),
            paint_attrs(shape, None)
        ),
        Geometry::Polygon { points } => writeln!(
            out,
            "{indent}<polygon points=\"{}\"{}{tail}/>",
            points_attr(points),
            paint_attrs(shape, None)
        ),
        Geometry::Polyline { points } => writeln!(
            out,
            "{indent}<polyline points=\"{}\"{}{tail}/>",
            points_attr(points),
            paint_attrs(shape, None)
        ),
        Geometry::Text {
            x,
            y,
            size,
            content,
            anchor,
            font,
        } => {
            let anchor = match anchor {
                TextAnchor::Start => "start",
                TextAnchor::Middle => "middle",
                TextAnchor::End => "end",
            };
            writeln!(
                out,
                "{indent}<text x=\"{}\" y=\"{}\" font-size=\"{}\" font-family=\"{}\" text-anchor=\"{anchor}\"{}{tail}>{}</text>",
                num(*x),
                num(*y),
                num(*size),
                escape(&font.family()),
                paint_attrs(shape, Some("#000000")),
                escape(content)
            )
        }
        Geometry::Group { children } => {
            writeln!(out, "{indent}<g{tail}>").unwrap();
            for c in children {
                write_shape(out, c, depth + 1);
            }
            writeln!(out, "{indent}</g>")
        }
    }
    .unwrap();
}

/// SVG 1.1 document for the scene. Tags travel as a `data-tags` attribute so
/// counts can be audited from the file alone.
pub fn serialize_svg(scene: &Scene) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = num(scene.width()),
        h = num(scene.height())
    )
    .unwrap();
    writeln!(
        out,
        "  <rect x=\"0.0000\" y=\"0.0000\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
        num(scene.width()),
        num(scene.height()),
        scene.background().to_hex()
    )
    .unwrap();
    for s in scene.shapes() {
        write_shape(&mut out, s, 1);
    }
    out.push_str("</svg>\n");
    out
}

/// Counts non-group elements whose `data-tags` contain `tag`, parsing the
/// SVG text independently of the scene graph.
pub fn count_tagged_in_svg(svg: &str, tag: &str) -> Result<usize> {
    let doc =
        roxmltree::Document::parse(svg).map_err(|e| Error::Validation(format!("svg: {e}")))?;
    if doc.root_element().tag_name().name() != "svg" {
        bail!(Validation, "root element is not <svg>");
    }
    Ok(doc
        .descendants()
        .filter(|n| n.is_element() && n.tag_name().name() != "g")
        .filter(|n| {
            n.attribute("data-tags")
                .is_some_and(|t| t.split_whitespace().any(|x| x == tag))
        })
        .count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{Color, FontChoice, Stroke};

    #[test]
    fn empty_scene_has_only_background() {
        let v: [&str; 0] = [];
        let s = Scene::new(100.0, 100.0, Color::WHITE, &v, vec![]).unwrap();
        let svg = serialize_svg(&s);
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let elems: Vec<_> = doc
            .root_element()
            .children()
            .filter(|n| n.is_element())
            .collect();
        assert_eq!(elems.len(), 1);
        assert_eq!(elems[0].tag_name().name(), "rect");
    }

    #[test]
    fn one_circle_one_element() {
        let s = Scene::new(
            100.0,
            100.0,
            Color::WHITE,
            &["dot"],
            vec![Shape::circle(50.0, 50.0, 10.0)
                .fill(Color::BLACK)
                .tag("dot")],
        )
        .unwrap();
        let svg = serialize_svg(&s);
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.contains("cx=\"50.0000\""));
        assert_eq!(count_tagged_in_svg(&svg, "dot").unwrap(), 1);
    }

    #[test]
    fn serialization_is_stable_and_escaped() {
        let s = Scene::new(
            200.0,
            100.0,
            Color::WHITE,
            &["t"],
            vec![
                Shape::text(100.0, 50.0, 20.0, "A<B & \"C\"", FontChoice::Builtin).tag("t"),
                Shape::group(vec![Shape::line(0.0, 0.0, 10.0, 10.0)
                    .stroke(Stroke::new(Color::BLACK, 1.0))
                    .tag("t")])
                .transform(Affine::translate(5.0, 5.0)),
            ],
        )
        .unwrap();
        let a = serialize_svg(&s);
        assert_eq!(a, serialize_svg(&s));
        assert!(roxmltree::Document::parse(&a).is_ok());
        assert!(a.contains("A&lt;B &amp; &quot;C&quot;"));
        assert_eq!(count_tagged_in_svg(&a, "t").unwrap(), 2);
    }

    #[test]
    fn negative_zero_formats_as_zero() {
        assert_eq!(num(-0.0), "0.0000");
        assert_eq!(num(-0.00001), "0.0000");
        assert_eq!(num(1.23456), "1.2346");
    }
}
