//! Test-side oracles. Truths are re-derived here from the serialized SVG and
//! closed-form rules, independently of the generators' own truth code.

#![allow(dead_code)]

use cfbench::gen::grids::{cell_bbox, GridStyle};
use cfbench::gen::illusions::IllusionKind;
use cfbench::gen::Modification;
use cfbench::{Answer, GroundTruth, TaskParams, YesNo};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SvgShape {
    Circle { cx: f64, cy: f64, r: f64 },
    Line { x1: f64, y1: f64, x2: f64, y2: f64 },
    Other,
}

fn num(n: roxmltree::Node, attr: &str) -> f64 {
    n.attribute(attr)
        .and_then(|v| v.parse().ok())
        .unwrap_or_else(|| panic!("<{}> lacks numeric {attr}", n.tag_name().name()))
}

/// Leaf elements whose `data-tags` include `tag`, in document order.
pub fn svg_shapes(svg: &str, tag: &str) -> Vec<SvgShape> {
    let doc = roxmltree::Document::parse(svg).expect("well-formed svg");
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    doc.descendants()
        .filter(|n| n.is_element() && n.tag_name().name() != "g")
        .filter(|n| {
            n.attribute("data-tags")
                .is_some_and(|t| t.split(' ').any(|x| x == tag))
        })
        .map(|n| match n.tag_name().name() {
            "circle" => SvgShape::Circle {
                cx: num(n, "cx"),
                cy: num(n, "cy"),
                r: num(n, "r"),
            },
            "line" => SvgShape::Line {
                x1: num(n, "x1"),
                y1: num(n, "y1"),
                x2: num(n, "x2"),
                y2: num(n, "y2"),
            },
            _ => SvgShape::Other,
        })
        .collect()
}

pub fn svg_count(svg: &str, tag: &str) -> i64 {
    svg_shapes(svg, tag).len() as i64
}

fn centre(s: &SvgShape) -> (f64, f64) {
    match *s {
        SvgShape::Circle { cx, cy, .. } => (cx, cy),
        SvgShape::Line { x1, y1, x2, y2 } => ((x1 + x2) / 2.0, (y1 + y2) / 2.0),
        SvgShape::Other => panic!("grid marks are circles or lines"),
    }
}

/// Grid marks whose centre falls in cell (row, col).
pub fn svg_count_in_cell(svg: &str, tag: &str, row: usize, col: usize) -> i64 {
    let b = cell_bbox(row, col);
    svg_shapes(svg, tag)
        .iter()
        .map(centre)
        .filter(|&(x, y)| x >= b.x0 && x <= b.x1 && y >= b.y0 && y <= b.y1)
        .count() as i64
}

/// Marks in an unmodified cell: one more per ring towards the centre.
pub fn grid_formula(row: usize, col: usize, g: usize) -> i64 {
    let ring = [row, col, g - 1 - row, g - 1 - col].into_iter().min().unwrap();
    ring as i64 + 1
}

pub fn grid_tag(style: GridStyle) -> &'static str {
    match style {
        GridStyle::Dice => "grid-dot",
        GridStyle::Tally => "tally-line",
    }
}

fn length(s: &SvgShape) -> f64 {
    match *s {
        SvgShape::Circle { r, .. } => r,
        SvgShape::Line { x1, y1, x2, y2 } => (x2 - x1).hypot(y2 - y1),
        SvgShape::Other => panic!("illusion targets are circles or lines"),
    }
}

/// Relative size difference of the two targets, for the size-judgement
/// illusions; None for the alignment ones.
pub fn svg_relative_difference(svg: &str, kind: IllusionKind) -> Option<f64> {
    let tag = match kind {
        IllusionKind::Ebbinghaus => "target-circle",
        IllusionKind::MullerLyer | IllusionKind::Ponzo | IllusionKind::VerticalHorizontal => {
            "target-line"
        }
        IllusionKind::Zollner | IllusionKind::Poggendorff => return None,
    };
    let t = svg_shapes(svg, tag);
    assert_eq!(t.len(), 2, "two targets");
    let (r, v) = (length(&t[0]), length(&t[1]));
    Some((v - r).abs() / r)
}

fn int(a: &Answer) -> i64 {
    a.as_int().unwrap_or_else(|| panic!("expected a count, got {a}"))
}

fn yn(a: &Answer) -> YesNo {
    match a {
        Answer::YesNo(v) => *v,
        other => panic!("expected Yes/No, got {other}"),
    }
}

/// Counted tag and whether the item is an unmodified original.
fn count_target(params: &TaskParams) -> Option<(String, bool)> {
    Some(match params {
        TaskParams::Flag(p) => (
            p.element.tag().to_string(),
            p.modification == Modification::Standard,
        ),
        TaskParams::Piece(p) => (
            match p.replacement {
                Some(t) => format!("piece:{}", t.as_str()),
                None => "piece".into(),
            },
            p.modification == Modification::Standard,
        ),
        TaskParams::GridBoard(p) => {
            let axis = p.axis().unwrap_or(cfbench::gen::boards::Axis::Row);
            (
                p.count_tag(axis).to_string(),
                p.row_delta == 0 && p.col_delta == 0,
            )
        }
        _ => return None,
    })
}

/// Checks one item's truths against the SVG route: the count (or measure)
/// read from its own SVG, the bias read from its reference's SVG or from
/// the grid formula, and the per-task GT/bias relation.
pub fn verify_truth(
    id: &str,
    params: &TaskParams,
    truth: &GroundTruth,
    svg: &str,
    reference_svg: Option<&str>,
) -> Result<(), String> {
    let err = |m: String| Err(format!("{id}: {m}"));
    let p = &truth.primary;
    let q3 = &truth.q3;
    if yn(q3.bias.as_ref().expect("q3 bias")) != yn(&q3.answer).flip() {
        return err("q3 bias is not the flipped answer".into());
    }
    let original = match params {
        TaskParams::Grid(g) => {
            let tag = grid_tag(g.style);
            let (r, c) = match g.anomaly {
                Some(a) => (a.row, a.col),
                None => ((g.g - 1) / 2, (g.g - 1) / 2),
            };
            let base = grid_formula(r, c, g.g);
            let delta = match g.anomaly.map(|a| a.kind) {
                None => 0,
                Some(cfbench::gen::grids::AnomalyKind::AddLine) => 1,
                Some(_) => -1,
            };
            let in_cell = svg_count_in_cell(svg, tag, r, c);
            let total: i64 = (0..g.g)
                .flat_map(|r| (0..g.g).map(move |c| (r, c)))
                .map(|(r, c)| grid_formula(r, c, g.g))
                .sum::<i64>()
                + delta;
            if in_cell != base + delta || svg_count(svg, tag) != total {
                return err(format!(
                    "svg has {in_cell} marks in the cell and {} overall; expected {} and {total}",
                    svg_count(svg, tag),
                    base + delta
                ));
            }
            if int(&p.answer) != base + delta || int(p.bias.as_ref().unwrap()) != base {
                return err(format!(
                    "truth {} / bias {:?} differ from formula {} / {base}",
                    p.answer,
                    p.bias,
                    base + delta
                ));
            }
            g.anomaly.is_none()
        }
        TaskParams::Illusion(il) => {
            let want = YesNo::from_bool(il.difference == 0.0);
            if yn(&p.answer) != want || yn(p.bias.as_ref().unwrap()) != want.flip() {
                return err(format!("difference {} but truth {}", il.difference, p.answer));
            }
            if let Some(d) = svg_relative_difference(svg, il.kind) {
                if (d - il.difference.abs()).abs() > 1e-3 {
                    return err(format!("svg difference {d} vs declared {}", il.difference));
                }
            }
            if yn(&q3.answer) != want {
                return err("q3 disagrees with the primary answer".into());
            }
            return Ok(());
        }
        other => {
            let (tag, original) = count_target(other).expect("count task");
            let got = svg_count(svg, &tag);
            if got != int(&p.answer) {
                return err(format!("svg counts {got} {tag}, truth is {}", p.answer));
            }
            let bias = int(p.bias.as_ref().unwrap());
            match reference_svg {
                Some(r) if svg_count(r, &tag) != bias => {
                    return err(format!(
                        "reference counts {} {tag}, bias is {bias}",
                        svg_count(r, &tag)
                    ))
                }
                None if !original => return err("no reference for a modified item".into()),
                _ => {}
            }
            original
        }
    };
    let (gt, bias) = (int(&p.answer), int(p.bias.as_ref().unwrap()));
    if original {
        if gt != bias || yn(&q3.answer) != YesNo::Yes {
            return err("an original must answer its own standard count".into());
        }
    } else if (gt - bias).abs() != 1 || yn(&q3.answer) != YesNo::No {
        return err(format!("GT {gt} and bias {bias} break the ±1 rule"));
    }
    Ok(())
}
