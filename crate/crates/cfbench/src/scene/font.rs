//! Text shaping for scene text. The built-in stroke font keeps renders
//! identical across machines; a TTF/OTF file can be configured instead.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{bail, Error, Result};

use super::TextAnchor;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum FontChoice {
    #[default]
    Builtin,
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TextMetrics {
    pub width: f64,
    pub ascent: f64,
    pub descent: f64,
}

/// Positioned text ready for the rasterizer.
pub(crate) enum TextRender {
    /// Polylines in canvas units, drawn with round caps at `width`.
    Strokes {
        lines: Vec<Vec<(f64, f64)>>,
        width: f64,
    },
    /// Filled outline in canvas units.
    Fill(tiny_skia::Path),
}

impl FontChoice {
    /// Resolves a configured font file, failing with an environment error
    /// when it is missing or not a parsable font.
    pub fn load(path: impl AsRef<Path>) -> Result<FontChoice> {
        let path = path.as_ref().to_path_buf();
        font_data(&path)?;
        Ok(FontChoice::File(path))
    }

    pub fn family(&self) -> String {
        match self {
            FontChoice::Builtin => "sans-serif".into(),
            FontChoice::File(p) => {
                let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("font");
                format!("{stem}, sans-serif")
            }
        }
    }

    pub fn measure(&self, content: &str, size: f64) -> Result<TextMetrics> {
        match self {
            FontChoice::Builtin => Ok(builtin_measure(content, size)),
            FontChoice::File(p) => {
                let data = font_data(p)?;
                let face = parse_face(p, &data)?;
                let scale = size / face.units_per_em() as f64;
                let mut width = 0.0;
                for ch in content.chars() {
                    let gid = glyph_id(&face, p, ch)?;
                    width += face.glyph_hor_advance(gid).unwrap_or(0) as f64 * scale;
                }
                Ok(TextMetrics {
                    width,
                    ascent: face.ascender() as f64 * scale,
                    descent: -(face.descender() as f64) * scale,
                })
            }
        }
    }

    pub(crate) fn render(
        &self,
        content: &str,
        size: f64,
        x: f64,
        y: f64,
        anchor: TextAnchor,
    ) -> Result<TextRender> {
        let m = self.measure(content, size)?;
        let left = match anchor {
            TextAnchor::Start => x,
            TextAnchor::Middle => x - m.width / 2.0,
            TextAnchor::End => x - m.width,
        };
        match self {
            FontChoice::Builtin => Ok(builtin_render(content, size, left, y)),
            FontChoice::File(p) => {
                let data = font_data(p)?;
                let face = parse_face(p, &data)?;
                let scale = size / face.units_per_em() as f64;
                let mut sink = PathSink {
                    pb: tiny_skia::PathBuilder::new(),
                    ox: left,
                    oy: y,
                    scale,
                };
                for ch in content.chars() {
                    let gid = glyph_id(&face, p, ch)?;
                    face.outline_glyph(gid, &mut sink);
                    sink.ox += face.glyph_hor_advance(gid).unwrap_or(0) as f64 * scale;
                }
                match sink.pb.finish() {
                    Some(path) => Ok(TextRender::Fill(path)),
                    None => Ok(TextRender::Strokes {
                        lines: Vec::new(),
                        width: 1.0,
                    }),
                }
            }
        }
    }
}

fn font_cache() -> &'static Mutex<HashMap<PathBuf, Arc<Vec<u8>>>> {
    static CACHE: OnceLock<Mutex<HashMap<PathBuf, Arc<Vec<u8>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn font_data(path: &Path) -> Result<Arc<Vec<u8>>> {
    let mut cache = font_cache().lock().expect("font cache poisoned");
    if let Some(d) = cache.get(path) {
        return Ok(d.clone());
    }
    let bytes = std::fs::read(path)
        .map_err(|e| Error::Environment(format!("font {} not readable: {e}", path.display())))?;
    parse_face(path, &bytes)?;
    let data = Arc::new(bytes);
    cache.insert(path.to_path_buf(), data.clone());
    Ok(data)
}

fn parse_face<'a>(path: &Path, data: &'a [u8]) -> Result<ttf_parser::Face<'a>> {
    ttf_parser::Face::parse(data, 0)
        .map_err(|e| Error::Environment(format!("font {} not parsable: {e}", path.display())))
}

fn glyph_id(face: &ttf_parser::Face<'_>, path: &Path, ch: char) -> Result<ttf_parser::GlyphId> {
    if ch == ' ' {
        return Ok(face.glyph_index(' ').unwrap_or(ttf_parser::GlyphId(0)));
    }
    match face.glyph_index(ch) {
        Some(g) => Ok(g),
        None => bail!(
            Environment,
            "font {} has no glyph for {ch:?}",
            path.display()
        ),
    }
}

struct PathSink {
    pb: tiny_skia::PathBuilder,
    ox: f64,
    oy: f64,
    scale: f64,
}

impl PathSink {
    fn pt(&self, x: f32, y: f32) -> (f32, f32) {
        (
            (self.ox + x as f64 * self.scale) as f32,
            (self.oy - y as f64 * self.scale) as f32,
        )
    }
}

impl ttf_parser::OutlineBuilder for PathSink {
    fn move_to(&mut self, x: f32, y: f32) {
        let (x, y) = self.pt(x, y);
        self.pb.move_to(x, y);
    }
    fn line_to(&mut self, x: f32, y: f32) {
        let (x, y) = self.pt(x, y);
        self.pb.line_to(x, y);
    }
    fn quad_to(&mut self, x1: f32, y1: f32, x: f32, y: f32) {
        let (x1, y1) = self.pt(x1, y1);
        let (x, y) = self.pt(x, y);
        self.pb.quad_to(x1, y1, x, y);
    }
    fn curve_to(&mut self, x1: f32, y1: f32, x2: f32, y2: f32, x: f32, y: f32) {
        let (x1, y1) = self.pt(x1, y1);
        let (x2, y2) = self.pt(x2, y2);
        let (x, y) = self.pt(x, y);
        self.pb.cubic_to(x1, y1, x2, y2, x, y);
    }
    fn close(&mut self) {
        self.pb.close();
    }
}

// ---------------------------------------------------------------------------
// Built-in stroke font.
//
// Latin glyphs live on a 0..6 cap-height grid, CJK glyphs on a 0..8 em box;
// both use y pointing down. A stroke is either a polyline "x,y x,y ..." or an
// elliptic arc "@cx,cy,rx,ry,a0,a1" with angles in degrees measured
// counter-clockwise on screen.

const LATIN: &[(char, &str)] = &[
    ('A', "0,6 2,0 4,6; 0.7,4 3.3,4"),
    (
        'B',
        "0,6 0,0 2.7,0 3.5,0.7 3.5,2.2 2.7,3 0,3; 2.7,3 3.8,3.8 3.8,5.2 3,6 0,6",
    ),
    ('C', "@2,3,2,3,40,320"),
    ('D', "0,0 0,6 2,6 3.4,5.2 4,3.8 4,2.2 3.4,0.8 2,0 0,0"),
    ('E', "4,0 0,0 0,6 4,6; 0,3 3,3"),
    ('F', "4,0 0,0 0,6; 0,3 3,3"),
    ('G', "@2,3,2,3,40,315; 2.2,3.4 4,3.4 4,5"),
    ('H', "0,0 0,6; 4,0 4,6; 0,3 4,3"),
    ('I', "1,0 3,0; 2,0 2,6; 1,6 3,6"),
    ('J', "4,0 4,4.3; @2,4.3,2,1.7,0,-180"),
    ('K', "0,0 0,6; 4,0 0,3.8; 1.4,2.6 4,6"),
    ('L', "0,0 0,6 4,6"),
    ('M', "0,6 0,0 2,3.5 4,0 4,6"),
    ('N', "0,6 0,0 4,6 4,0"),
    ('O', "@2,3,2,3,0,360"),
    ('P', "0,6 0,0 2.8,0 3.7,0.8 3.7,2.4 2.8,3.2 0,3.2"),
    ('Q', "@2,3,2,3,0,360; 2.6,4.6 4.2,6.4"),
    (
        'R',
        "0,6 0,0 2.8,0 3.7,0.8 3.7,2.4 2.8,3.2 0,3.2; 2,3.2 4,6",
    ),
    (
        'S',
        "3.8,0.9 3,0 1,0 0.2,0.8 0.2,2.2 1,3 3,3 3.8,3.8 3.8,5.2 3,6 1,6 0.2,5.1",
    ),
    ('T', "0,0 4,0; 2,0 2,6"),
    ('U', "0,0 0,4.3; 4,0 4,4.3; @2,4.3,2,1.7,180,360"),
    ('V', "0,0 2,6 4,0"),
    ('W', "0,0 1,6 2,2.2 3,6 4,0"),
    ('X', "0,0 4,6; 4,0 0,6"),
    ('Y', "0,0 2,3 4,0; 2,3 2,6"),
    ('Z', "0,0 4,0 0,6 4,6"),
    ('0', "@2,3,1.8,3,0,360"),
    ('1', "0.8,1.2 2,0 2,6; 0.8,6 3.2,6"),
    ('2', "@2,1.8,1.8,1.8,160,-20; 3.69,2.42 0,6 4,6"),
    ('3', "@2,1.55,1.8,1.55,150,-90; @2,4.4,1.9,1.6,90,-150"),
    ('4', "3,6 3,0 0,4.2 4,4.2"),
    ('5', "3.8,0 0.6,0 0.4,2.7; @2,4.1,1.9,1.9,130,-140"),
    ('6', "@2,4.2,1.9,1.8,0,360; 0.1,4.2 0.6,1.6 2,0.1 3.4,0.3"),
    ('7', "0,0 4,0 1.5,6"),
    ('8', "@2,1.5,1.6,1.5,0,360; @2,4.4,1.9,1.6,0,360"),
    ('9', "@2,1.8,1.9,1.8,0,360; 3.9,1.8 3.4,4.4 2,5.9 0.6,5.7"),
    ('.', "2,5.5 2,6"),
    (',', "2.2,5.4 2.2,6 1.6,7"),
    ('-', "0.8,3.4 3.2,3.4"),
    (':', "2,1.5 2,2; 2,5.5 2,6"),
    (
        '?',
        "@2,1.5,1.8,1.5,160,-60; 2.9,2.8 2,3.6 2,4.3; 2,5.5 2,6",
    ),
    ('!', "2,0 2,4.2; 2,5.5 2,6"),
    ('\'', "2,0 2,1.5"),
    ('"', "1.3,0 1.3,1.5; 2.7,0 2.7,1.5"),
    ('(', "2.8,-0.3 1.6,1.5 1.3,3 1.6,4.5 2.8,6.3"),
    (')', "1.2,-0.3 2.4,1.5 2.7,3 2.4,4.5 1.2,6.3"),
    ('/', "0.5,6.3 3.5,-0.3"),
    ('+', "2,1.5 2,4.5; 0.5,3 3.5,3"),
    (
        '#',
        "1.3,0.5 1,5.5; 3,0.5 2.7,5.5; 0.2,2 3.8,2; 0.2,4 3.8,4",
    ),
    (
        '&',
        "3.8,6 1,2.2 1,0.9 1.8,0 2.6,0.2 2.8,1.2 0.4,3.8 0.4,5.2 1.3,6 2.6,6 3.8,4",
    ),
];

const CJK: &[(char, &str)] = &[
    ('車', "1,1 7,1; 1.6,2.2 6.4,2.2 6.4,5.2 1.6,5.2 1.6,2.2; 1.6,3.7 6.4,3.7; 0.6,6.4 7.4,6.4; 4,0.2 4,7.9"),
    ('馬', "2,0.6 2,4.6; 2,0.6 6.6,0.6; 2,1.9 6,1.9; 2,3.2 6,3.2; 4,0.6 4,4.6; 2,4.6 7.2,4.6 7.2,7.4 6.4,7; 2.4,5.8 1.8,7; 3.6,5.8 3.4,7; 4.8,5.8 4.9,7; 6,5.8 6.2,6.8"),
    ('象', "3.6,0.1 2.4,1.3; 3,0.8 5.4,0.8 4.8,1.6; 1.8,1.8 6.2,1.8 6.2,3.2 1.8,3.2 1.8,1.8; 4,1.8 4,3.2; 3.4,3.2 2,4.4; 2.6,4.1 6.2,4.1 3,5.8; 4,4.8 4.6,6.2 4.4,7.6 3.4,7.2; 3.8,5.4 1.4,6.9; 4.1,6.3 1.6,7.8; 4.8,5.1 7.2,7.8; 6.1,5 7.1,4.3"),
    ('相', "0.4,2.4 3.4,2.4; 1.9,0.4 1.9,7.9; 1.9,3 0.4,6; 2.1,3.6 3.2,4.8; 4.4,1 7.5,1 7.5,7.4 4.4,7.4 4.4,1; 4.4,3.1 7.5,3.1; 4.4,5.2 7.5,5.2"),
    ('士', "0.8,2.6 7.2,2.6; 4,0.4 4,7; 2,7 6,7"),
    ('仕', "3,0.4 0.8,3.8; 2,2.4 2,7.9; 3.6,2.8 7.6,2.8; 5.6,0.8 5.6,7; 4.2,7 7,7"),
    ('將', "2,0.4 2,7.9; 0.5,1.8 1.2,3.4; 0.3,5.6 2,4.2; 4.6,0.2 3.6,1.6; 4.3,0.9 6.6,0.9 4.4,3.2; 5,1.8 5.8,2.6; 3,4.2 7.6,4.2; 6.3,3.2 6.3,7.8 5.5,7.3; 4.2,5.4 4.8,6.4"),
    ('帥', "1.3,0.4 1,1.2; 1.2,1 1.2,7.6; 1.2,1.5 3,1.5 3,4 1.2,4; 1.2,4.4 3.2,4.4 3.2,7.2 1.2,7.2; 4,1 7.8,1; 5.9,0.2 5.9,7.9; 4.5,2.6 4.5,6.5; 4.5,2.6 7.3,2.6 7.3,6.2 6.8,5.8"),
    ('炮', "1,2.5 1.4,4; 3,2.3 2.5,3.6; 2,0.8 2,4.5 0.5,7.8; 2,4.7 3.3,7.5; 4.8,0.3 3.8,2; 4.4,1.2 7.5,1.2 7.3,5 6.6,4.5; 4.6,2.6 6.3,2.6 6.3,4.2 4.6,4.2 4.6,7.3 7.8,7.3 7.8,6.4"),
    ('砲', "0.3,1 3.3,1; 1.8,1 0.4,5; 1.2,3.8 3.2,3.8 3.2,7 1.2,7 1.2,3.8; 4.8,0.3 3.8,2; 4.4,1.2 7.5,1.2 7.3,5 6.6,4.5; 4.6,2.6 6.3,2.6 6.3,4.2 4.6,4.2 4.6,7.3 7.8,7.3 7.8,6.4"),
    ('兵', "4.5,0.3 1.8,1.2; 1.8,1.2 1.8,4.5; 1.8,2.8 6.5,2.8; 4.3,1 4.3,4.5; 0.5,4.5 7.5,4.5; 2.8,5.5 1,7.8; 5.2,5.5 7,7.8"),
    ('卒', "4,0.2 4,1; 0.8,1.3 7.2,1.3; 2.8,1.8 1.5,3.8; 2.5,2.6 3.3,3.6; 5.5,1.8 4.3,3.8; 5.3,2.6 6.5,3.6; 0.5,5 7.5,5; 4,3.8 4,7.9"),
];

const FALLBACK: &str = "0.5,0 3.5,0 3.5,6 0.5,6 0.5,0";

/// Cap height as a fraction of the font size.
const CAP: f64 = 0.7;
const LETTER_GAP: f64 = 1.4;
const SPACE: f64 = 3.0;
const SMALL_CAPS: f64 = 0.75;
const CJK_EM: f64 = 0.95;
const STROKE: f64 = 0.085;
const ASCENT: f64 = 0.9;
const DESCENT: f64 = 0.2;

struct Glyph {
    strokes: Vec<Vec<(f64, f64)>>,
    min_x: f64,
    max_x: f64,
}

fn parse_glyph(src: &str) -> Glyph {
    let mut strokes: Vec<Vec<(f64, f64)>> = Vec::new();
    for part in src.split(';') {
        let part = part.trim();
        if let Some(arc) = part.strip_prefix('@') {
            let v: Vec<f64> = arc.split(',').map(|s| s.trim().parse().unwrap()).collect();
            let (cx, cy, rx, ry, a0, a1) = (v[0], v[1], v[2], v[3], v[4], v[5]);
            let steps = (((a1 - a0).abs() / 10.0).ceil() as usize).max(2);
            let pts = (0..=steps)
                .map(|i| {
                    let a = (a0 + (a1 - a0) * i as f64 / steps as f64).to_radians();
                    (cx + rx * a.cos(), cy - ry * a.sin())
                })
                .collect();
            strokes.push(pts);
        } else {
            let pts = part
                .split_whitespace()
                .map(|p| {
                    let (x, y) = p.split_once(',').unwrap();
                    (x.parse().unwrap(), y.parse().unwrap())
                })
                .collect();
            strokes.push(pts);
        }
    }
    let min_x = strokes
        .iter()
        .flatten()
        .map(|p| p.0)
        .fold(f64::INFINITY, f64::min);
    let max_x = strokes
        .iter()
        .flatten()
        .map(|p| p.0)
        .fold(f64::NEG_INFINITY, f64::max);
    Glyph {
        strokes,
        min_x,
        max_x,
    }
}

struct Tables {
    latin: HashMap<char, Glyph>,
    cjk: HashMap<char, Glyph>,
    fallback: Glyph,
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| Tables {
        latin: LATIN.iter().map(|(c, s)| (*c, parse_glyph(s))).collect(),
        cjk: CJK.iter().map(|(c, s)| (*c, parse_glyph(s))).collect(),
        fallback: parse_glyph(FALLBACK),
    })
}

enum Mark {
    None,
    Diaeresis,
    Acute,
}

/// Maps a character to (glyph, scale relative to caps, diacritic).
fn latin_glyph(ch: char) -> (&'static Glyph, f64, Mark) {
    let t = tables();
    let (base, mark) = match ch {
        'Ä' | 'ä' => ('A', Mark::Diaeresis),
        'Ö' | 'ö' => ('O', Mark::Diaeresis),
        'Ü' | 'ü' => ('U', Mark::Diaeresis),
        'É' | 'é' => ('E', Mark::Acute),
        'Á' | 'á' => ('A', Mark::Acute),
        'Í' | 'í' => ('I', Mark::Acute),
        'Ó' | 'ó' => ('O', Mark::Acute),
        c => (c, Mark::None),
    };
    let small = ch.is_lowercase();
    let upper = base.to_uppercase().next().unwrap_or(base);
    let glyph = t.latin.get(&upper).unwrap_or(&t.fallback);
    (glyph, if small { SMALL_CAPS } else { 1.0 }, mark)
}

fn builtin_measure(content: &str, size: f64) -> TextMetrics {
    let unit = size * CAP / 6.0;
    let mut width = 0.0;
    let mut first = true;
    for ch in content.chars() {
        if !first {
            width += LETTER_GAP * unit;
        }
        first = false;
        width += advance(ch, size);
    }
    TextMetrics {
        width,
        ascent: size * ASCENT,
        descent: size * DESCENT,
    }
}

/// Ink width of one character in px (letter gap excluded).
fn advance(ch: char, size: f64) -> f64 {
    let unit = size * CAP / 6.0;
    if ch == ' ' {
        return SPACE * unit;
    }
    if tables().cjk.contains_key(&ch) {
        return size * CJK_EM;
    }
    let (g, s, _) = latin_glyph(ch);
    (g.max_x - g.min_x) * unit * s
}

fn builtin_render(content: &str, size: f64, left: f64, baseline: f64) -> TextRender {
    let unit = size * CAP / 6.0;
    let mut lines = Vec::new();
    let mut x = left;
    let mut first = true;
    for ch in content.chars() {
        if !first {
            x += LETTER_GAP * unit;
        }
        first = false;
        if ch == ' ' {
            x += SPACE * unit;
            continue;
        }
        if let Some(g) = tables().cjk.get(&ch) {
            let u = size * CJK_EM / 8.0;
            let top = baseline - size * 0.8;
            for s in &g.strokes {
                lines.push(
                    s.iter()
                        .map(|&(gx, gy)| (x + gx * u, top + gy * u))
                        .collect(),
                );
            }
            x += size * CJK_EM;
            continue;
        }
        let (g, s, mark) = latin_glyph(ch);
        let u = unit * s;
        let top = baseline - 6.0 * u;
        for st in &g.strokes {
            lines.push(
                st.iter()
                    .map(|&(gx, gy)| (x + (gx - g.min_x) * u, top + gy * u))
                    .collect(),
            );
        }
        let w = (g.max_x - g.min_x) * u;
        let cx = x + w / 2.0;
        let my = top - 1.3 * unit;
        match mark {
            Mark::None => {}
            Mark::Diaeresis => {
                for dx in [-0.9, 0.9] {
                    lines.push(vec![
                        (cx + dx * unit, my),
                        (cx + dx * unit, my + 0.45 * unit),
                    ]);
                }
            }
            Mark::Acute => {
                lines.push(vec![
                    (cx - 0.4 * unit, my + 0.6 * unit),
                    (cx + 0.6 * unit, my - 0.3 * unit),
                ]);
            }
        }
        x += w;
    }
    TextRender::Strokes {
        lines,
        width: size * STROKE,
    }
}
