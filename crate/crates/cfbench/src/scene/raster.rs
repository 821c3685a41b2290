use std::path::Path;

use tiny_skia::{FillRule, Paint, PathBuilder, Pixmap, Transform};

use crate::error::{bail, Error, Result};

use super::font::TextRender;
use super::{Affine, Color, Geometry, LineCap, Scene, Shape};

/// Largest pixmap `rasterize` will allocate unless told otherwise.
pub const DEFAULT_MAX_PIXELS: u64 = 120_000_000;

/// 8-bit RGBA image with straight (non-premultiplied) alpha.
#[derive(Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl std::fmt::Debug for RasterImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RasterImage({}×{})", self.width, self.height)
    }
}

impl RasterImage {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || pixels.len() != width as usize * height as usize * 4 {
            bail!(
                Argument,
                "raster {width}×{height} with {} bytes",
                pixels.len()
            );
        }
        Ok(RasterImage {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: u32, height: u32, color: Color) -> Result<Self> {
        let px = [color.r, color.g, color.b, color.a];
        let pixels = px.repeat(width as usize * height as usize);
        RasterImage::new(width, height, pixels)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 4] {
        let i = (y as usize * self.width as usize + x as usize) * 4;
        [
            self.pixels[i],
            self.pixels[i + 1],
            self.pixels[i + 2],
            self.pixels[i + 3],
        ]
    }

    /// Row-major bytes of rows `y0..y1`.
    pub fn rows(&self, y0: u32, y1: u32) -> &[u8] {
        let stride = self.width as usize * 4;
        &self.pixels[y0 as usize * stride..y1 as usize * stride]
    }

    /// Stacks `top` above `self`; widths must match.
    pub fn stack_below(&self, top: &RasterImage) -> Result<RasterImage> {
        if top.width != self.width {
            bail!(
                Argument,
                "cannot stack {}px-wide image on {}px-wide image",
                top.width,
                self.width
            );
        }
        let mut pixels = Vec::with_capacity(top.pixels.len() + self.pixels.len());
        pixels.extend_from_slice(&top.pixels);
        pixels.extend_from_slice(&self.pixels);
        RasterImage::new(self.width, self.height + top.height, pixels)
    }

    pub fn encode_png(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, self.width, self.height);
            enc.set_color(png::ColorType::Rgba);
            enc.set_depth(png::BitDepth::Eight);
            enc.set_compression(png::Compression::Fast);
            let mut w = enc
                .write_header()
                .map_err(|e| Error::Resource(format!("png header: {e}")))?;
            w.write_image_data(&self.pixels)
                .map_err(|e| Error::Resource(format!("png data: {e}")))?;
        }
        Ok(out)
    }

    pub fn decode_png(bytes: &[u8]) -> Result<RasterImage> {
        let mut dec = png::Decoder::new(std::io::Cursor::new(bytes));
        dec.set_transformations(png::Transformations::EXPAND);
        let mut reader = dec
            .read_info()
            .map_err(|e| Error::Validation(format!("png: {e}")))?;
        let mut buf = vec![0; reader.output_buffer_size().unwrap_or(0)];
        let info = reader
            .next_frame(&mut buf)
            .map_err(|e| Error::Validation(format!("png: {e}")))?;
        buf.truncate(info.buffer_size());
        let (w, h) = (info.width, info.height);
        let pixels = match (info.color_type, info.bit_depth) {
            (png::ColorType::Rgba, png::BitDepth::Eight) => buf,
            (png::ColorType::Rgb, png::BitDepth::Eight) => buf
                .chunks_exact(3)
                .flat_map(|c| [c[0], c[1], c[2], 255])
                .collect(),
            (png::ColorType::Grayscale, png::BitDepth::Eight) => {
                buf.iter().flat_map(|&g| [g, g, g, 255]).collect()
            }
            (png::ColorType::GrayscaleAlpha, png::BitDepth::Eight) => buf
                .chunks_exact(2)
                .flat_map(|c| [c[0], c[0], c[0], c[1]])
                .collect(),
            (ct, bd) => bail!(Validation, "unsupported png layout {ct:?}/{bd:?}"),
        };
        RasterImage::new(w, h, pixels)
    }

    pub fn write_png(&self, path: &Path) -> Result<()> {
        let bytes = self.encode_png()?;
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
    }

    pub fn read_png(path: &Path) -> Result<RasterImage> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        RasterImage::decode_png(&bytes)
    }
}

/// Renders the scene at `round(width·q) × round(height·q)` pixels with
/// anti-aliasing.
pub fn rasterize(scene: &Scene, quality: f64) -> Result<RasterImage> {
    rasterize_with_budget(scene, quality, DEFAULT_MAX_PIXELS)
}

pub fn rasterize_with_budget(scene: &Scene, quality: f64, max_pixels: u64) -> Result<RasterImage> {
    if !quality.is_finite() || quality < 1.0 {
        bail!(Argument, "quality multiplier must be >= 1, got {quality}");
    }
    let w = (scene.width() * quality).round().max(1.0) as u64;
    let h = (scene.height() * quality).round().max(1.0) as u64;
    if w * h > max_pixels || w > u32::MAX as u64 || h > u32::MAX as u64 {
        bail!(
            Resource,
            "{w}×{h} raster exceeds the {max_pixels}-pixel budget"
        );
    }
    let mut pixmap = Pixmap::new(w as u32, h as u32)
        .ok_or_else(|| Error::Resource(format!("cannot allocate {w}×{h} pixmap")))?;
    let bg = scene.background();
    pixmap.fill(tiny_skia::Color::from_rgba8(bg.r, bg.g, bg.b, bg.a));
    let root = Affine::scale(w as f64 / scene.width(), h as f64 / scene.height());
    for shape in scene.shapes() {
        draw(&mut pixmap, shape, &root)?;
    }
    RasterImage::new(w as u32, h as u32, pixmap.take_demultiplied())
}

fn to_ts(t: &Affine) -> Transform {
    Transform::from_row(
        t.a as f32, t.b as f32, t.c as f32, t.d as f32, t.e as f32, t.f as f32,
    )
}

fn paint(c: Color) -> Paint<'static> {
    let mut p = Paint::default();
    p.set_color_rgba8(c.r, c.g, c.b, c.a);
    p.anti_alias = true;
    p
}

fn ts_stroke(width: f64, cap: LineCap) -> tiny_skia::Stroke {
    tiny_skia::Stroke {
        width: width as f32,
        line_cap: match cap {
            LineCap::Butt => tiny_skia::LineCap::Butt,
            LineCap::Round => tiny_skia::LineCap::Round,
            LineCap::Square => tiny_skia::LineCap::Square,
        },
        line_join: match cap {
            LineCap::Round => tiny_skia::LineJoin::Round,
            _ => tiny_skia::LineJoin::Miter,
        },
        ..Default::default()
    }
}

fn poly_path(points: &[(f64, f64)], close: bool) -> Option<tiny_skia::Path> {
    let mut pb = PathBuilder::new();
    let (x0, y0) = points[0];
    pb.move_to(x0 as f32, y0 as f32);
    for &(x, y) in &points[1..] {
        pb.line_to(x as f32, y as f32);
    }
    if close {
        pb.close();
    }
    pb.finish()
}

fn draw(pixmap: &mut Pixmap, shape: &Shape, parent: &Affine) -> Result<()> {
    let t = parent.then(&shape.transform);
    let ts = to_ts(&t);
    let path = match &shape.geometry {
        Geometry::Group { children } => {
            for c in children {
                draw(pixmap, c, &t)?;
            }
            return Ok(());
        }
        Geometry::Text {
            x,
            y,
            size,
            content,
            anchor,
            font,
        } => {
            let color = shape.fill.unwrap_or(Color::BLACK);
            match font.render(content, *size, *x, *y, *anchor)? {
                TextRender::Strokes { lines, width } => {
                    let stroke = ts_stroke(width, LineCap::Round);
                    for l in lines.iter().filter(|l| l.len() >= 2) {
                        if let Some(p) = poly_path(l, false) {
                            pixmap.stroke_path(&p, &paint(color), &stroke, ts, None);
                        }
                    }
                }
                TextRender::Fill(p) => {
                    pixmap.fill_path(&p, &paint(color), FillRule::Winding, ts, None);
                }
            }
            return Ok(());
        }
        Geometry::Line { x1, y1, x2, y2 } => {
            let mut pb = PathBuilder::new();
            pb.move_to(*x1 as f32, *y1 as f32);
            pb.line_to(*x2 as f32, *y2 as f32);
            pb.finish()
        }
        Geometry::Circle { cx, cy, r } => {
            PathBuilder::from_circle(*cx as f32, *cy as f32, *r as f32)
        }
        Geometry::Rect { x, y, w, h } => {
            tiny_skia::Rect::from_xywh(*x as f32, *y as f32, *w as f32, *h as f32)
                .map(PathBuilder::from_rect)
        }
        Geometry::Polygon { points } => poly_path(points, true),
        Geometry::Polyline { points } => poly_path(points, false),
    };
    let Some(path) = path else {
        return Ok(());
    };
    let closed = !matches!(
        shape.geometry,
        Geometry::Line { .. } | Geometry::Polyline { .. }
    );
    if let (Some(fill), true) = (shape.fill, closed) {
        pixmap.fill_path(&path, &paint(fill), FillRule::Winding, ts, None);
    }
    if let Some(s) = &shape.stroke {
        pixmap.stroke_path(&path, &paint(s.color), &ts_stroke(s.width, s.cap), ts, None);
    }
    Ok(())
}

/// Round-half-up `s·d/long`, never below one pixel.
fn scaled_dim(s: u64, d: u64, long: u64) -> u32 {
    ((2 * s * d + long) / (2 * long)).max(1) as u32
}

/// Resamples so that the long side equals `d`, scaling both axes by
/// `d / max(w, h)`. Uses a triangle (bilinear) filter whose support widens
/// when minifying so that large reductions do not alias.
pub fn rescale_to(img: &RasterImage, d: i64) -> Result<RasterImage> {
    if d <= 0 {
        bail!(Argument, "target long side must be positive, got {d}");
    }
    let (w, h) = (img.width as u64, img.height as u64);
    let d = d as u64;
    let (nw, nh) = if w >= h {
        (d as u32, scaled_dim(h, d, w))
    } else {
        (scaled_dim(w, d, h), d as u32)
    };
    if nw == img.width && nh == img.height {
        return Ok(img.clone());
    }
    let horiz = resample_rows(img, nw as usize);
    let both = resample_columns(&horiz, nw as usize, img.height as usize, nh as usize);
    let mut out = Vec::with_capacity(both.len());
    for px in both.chunks_exact(4) {
        let a = px[3].round().clamp(0.0, 255.0);
        if a == 0.0 {
            out.extend_from_slice(&[0, 0, 0, 0]);
            continue;
        }
        for &c in &px[..3] {
            out.push((c * 255.0 / a).round().clamp(0.0, 255.0) as u8);
        }
        out.push(a as u8);
    }
    RasterImage::new(nw, nh, out)
}

struct Taps {
    start: usize,
    weights: Vec<f32>,
}

fn taps(input: usize, output: usize) -> Vec<Taps> {
    let scale = input as f64 / output as f64;
    let support = scale.max(1.0);
    (0..output)
        .map(|i| {
            let center = (i as f64 + 0.5) * scale;
            let lo = ((center - support).floor().max(0.0)) as usize;
            let hi = ((center + support).ceil() as usize).min(input);
            let mut weights: Vec<f64> = (lo..hi)
                .map(|j| (1.0 - ((j as f64 + 0.5 - center) / support).abs()).max(0.0))
                .collect();
            let sum: f64 = weights.iter().sum();
            if sum > 0.0 {
                weights.iter_mut().for_each(|w| *w /= sum);
            } else {
                // Degenerate only when the window is a single sample.
                weights = vec![1.0; hi - lo];
            }
            Taps {
                start: lo,
                weights: weights.into_iter().map(|w| w as f32).collect(),
            }
        })
        .collect()
}

/// Horizontal pass. Rows are premultiplied one at a time so the full-size
/// source never exists as floats.
fn resample_rows(img: &RasterImage, out_len: usize) -> Vec<f32> {
    let (w, h) = (img.width as usize, img.height as usize);
    let taps = taps(w, out_len);
    let mut out = vec![0f32; out_len * h * 4];
    let mut row = vec![0f32; w * 4];
    for y in 0..h {
        for (d, p) in row
            .chunks_exact_mut(4)
            .zip(img.rows(y as u32, y as u32 + 1).chunks_exact(4))
        {
            let a = p[3] as f32;
            d[0] = p[0] as f32 * a / 255.0;
            d[1] = p[1] as f32 * a / 255.0;
            d[2] = p[2] as f32 * a / 255.0;
            d[3] = a;
        }
        let orow = &mut out[y * out_len * 4..(y + 1) * out_len * 4];
        for (x, t) in taps.iter().enumerate() {
            let mut acc = [0f32; 4];
            for (k, &wt) in t.weights.iter().enumerate() {
                let p = &row[(t.start + k) * 4..(t.start + k) * 4 + 4];
                acc[0] += p[0] * wt;
                acc[1] += p[1] * wt;
                acc[2] += p[2] * wt;
                acc[3] += p[3] * wt;
            }
            orow[x * 4..x * 4 + 4].copy_from_slice(&acc);
        }
    }
    out
}

fn resample_columns(src: &[f32], w: usize, h: usize, out_len: usize) -> Vec<f32> {
    let taps = taps(h, out_len);
    let stride = w * 4;
    let mut out = vec![0f32; out_len * stride];
    for (y, t) in taps.iter().enumerate() {
        let orow = &mut out[y * stride..(y + 1) * stride];
        for (k, &wt) in t.weights.iter().enumerate() {
            let row = &src[(t.start + k) * stride..(t.start + k + 1) * stride];
            for (o, s) in orow.iter_mut().zip(row) {
                *o += s * wt;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scene(w: f64, h: f64, shapes: Vec<Shape>) -> Scene {
        let v: [&str; 0] = [];
        Scene::new(w, h, Color::WHITE, &v, shapes).unwrap()
    }

    #[test]
    fn quality_multiplier_sets_size() {
        let s = scene(100.0, 100.0, vec![]);
        let img = rasterize(&s, 5.0).unwrap();
        assert_eq!((img.width(), img.height()), (500, 500));
        let img = rasterize(&s, 1.0).unwrap();
        assert_eq!((img.width(), img.height()), (100, 100));
        assert!(rasterize(&s, 0.5).is_err());
    }

    #[test]
    fn filled_rect_samples_red() {
        let s = scene(
            100.0,
            100.0,
            vec![Shape::rect(0.0, 0.0, 10.0, 10.0).fill(Color::rgb(255, 0, 0))],
        );
        let img = rasterize(&s, 1.0).unwrap();
        assert_eq!(img.pixel(5, 5), [255, 0, 0, 255]);
        assert_eq!(img.pixel(50, 50), [255, 255, 255, 255]);
    }

    #[test]
    fn pixel_budget_is_enforced() {
        let s = scene(100.0, 100.0, vec![]);
        let err = rasterize_with_budget(&s, 5.0, 1000).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
    }

    #[test]
    fn rescale_dimensions() {
        let img = RasterImage::filled(2000, 1000, Color::WHITE).unwrap();
        let r = rescale_to(&img, 1152).unwrap();
        assert_eq!((r.width(), r.height()), (1152, 576));
        let img = RasterImage::filled(384, 1536, Color::WHITE).unwrap();
        let r = rescale_to(&img, 384).unwrap();
        assert_eq!((r.width(), r.height()), (96, 384));
        let img = RasterImage::filled(768, 768, Color::WHITE).unwrap();
        assert_eq!(rescale_to(&img, 768).unwrap(), img);
        assert!(rescale_to(&img, 0).is_err());
        assert!(rescale_to(&img, -3).is_err());
    }

    #[test]
    fn rescale_preserves_flat_color() {
        let img = RasterImage::filled(300, 200, Color::rgb(10, 200, 30)).unwrap();
        let r = rescale_to(&img, 77).unwrap();
        assert!(r.pixels().chunks_exact(4).all(|p| p == [10, 200, 30, 255]));
        let up = rescale_to(&img, 900).unwrap();
        assert!(up.pixels().chunks_exact(4).all(|p| p == [10, 200, 30, 255]));
    }

    #[test]
    fn downscale_averages_checkerboard() {
        let mut px = Vec::new();
        for y in 0..64u32 {
            for x in 0..64u32 {
                let v = if (x + y) % 2 == 0 { 0 } else { 255 };
                px.extend_from_slice(&[v, v, v, 255]);
            }
        }
        let img = RasterImage::new(64, 64, px).unwrap();
        let r = rescale_to(&img, 8).unwrap();
        for p in r.pixels().chunks_exact(4) {
            assert!((p[0] as i32 - 128).abs() <= 2, "{p:?}");
        }
    }

    #[test]
    fn png_round_trip() {
        let s = scene(
            30.0,
            20.0,
            vec![Shape::circle(15.0, 10.0, 6.0).fill(Color::rgb(0, 0, 255))],
        );
        let img = rasterize(&s, 2.0).unwrap();
        let back = RasterImage::decode_png(&img.encode_png().unwrap()).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn stack_keeps_lower_rows() {
        let base = RasterImage::filled(10, 5, Color::BLACK).unwrap();
        let top = RasterImage::filled(10, 2, Color::WHITE).unwrap();
        let s = base.stack_below(&top).unwrap();
        assert_eq!(s.height(), 7);
        assert_eq!(s.rows(2, 7), base.pixels());
    }
}
