//! Post-generation derivatives: the resolution cascade, title banners, and
//! background-removed re-renders.

use std::path::Path;

use rayon::prelude::*;

use crate::error::{bail, Error, Result};
use crate::gen::{self, boards, grids, GenConfig};
use crate::item::{Provenance, StimulusItem, TaskParams, VariantKind};
use crate::scene::{
    rasterize, rasterize_with_budget, rescale_to, serialize_svg, Color, FontChoice, RasterImage,
    Scene, Shape,
};

/// Smallest font size a banner may shrink to before layout fails.
pub const MIN_TITLE_FONT: f64 = 8.0;

/// One image per resolution, in input order. The scene is rasterized once
/// at `quality ×` the largest resolution, resampled to that resolution, and
/// the smaller sizes are resampled from it.
pub fn emit_resolutions(
    scene: &Scene,
    resolutions: &[u32],
    quality: f64,
    max_pixels: u64,
) -> Result<Vec<RasterImage>> {
    let Some(&top) = resolutions.iter().max() else {
        return Ok(Vec::new());
    };
    if resolutions.contains(&0) {
        bail!(Argument, "resolution must be positive");
    }
    let long = scene.width().max(scene.height());
    let q = (quality * top as f64 / long).max(1.0);
    let big = rasterize_with_budget(scene, q, max_pixels)?;
    let largest = rescale_to(&big, top as i64)?;
    drop(big);
    resolutions
        .iter()
        .map(|&d| {
            if d == top {
                Ok(largest.clone())
            } else {
                rescale_to(&largest, d as i64)
            }
        })
        .collect()
}

pub fn banner_height(image_height: u32) -> u32 {
    ((0.12 * image_height as f64).round() as u32).max(40)
}

/// White banner scene with the subject centred, sized for an image of the
/// given width and height.
pub fn banner_scene(
    subject: &str,
    width: u32,
    image_height: u32,
    font: &FontChoice,
) -> Result<Scene> {
    let subject = subject.trim();
    if subject.is_empty() {
        bail!(Argument, "title text must be non-empty");
    }
    let bh = banner_height(image_height) as f64;
    let w = width as f64;
    let mut size = 0.6 * bh;
    let metrics = loop {
        let m = font.measure(subject, size)?;
        if m.width <= 0.9 * w {
            break m;
        }
        size *= 0.95;
        if size < MIN_TITLE_FONT {
            bail!(
                Layout,
                "title {subject:?} does not fit a {width}px banner at the minimum font size"
            );
        }
    };
    let baseline = bh / 2.0 + (metrics.ascent - metrics.descent) / 2.0;
    let baseline = baseline.min(bh - metrics.descent);
    let text = Shape::text(w / 2.0, baseline, size, subject, font.clone()).fill(Color::BLACK);
    let v: [&str; 0] = [];
    Scene::new(w, bh, Color::WHITE, &v, vec![text])
}

/// Extends the image upward with a banner naming the subject. Every pixel of
/// the original lands unchanged below the banner.
pub fn inject_title(image: &RasterImage, subject: &str, font: &FontChoice) -> Result<RasterImage> {
    let banner = rasterize(
        &banner_scene(subject, image.width(), image.height(), font)?,
        1.0,
    )?;
    image.stack_below(&banner)
}

/// Re-renders the item keeping only what its counting question needs.
pub fn remove_background(item: &StimulusItem, cfg: &GenConfig) -> Result<Scene> {
    let scene = || gen::build_scene(&item.params, cfg);
    match &item.params {
        TaskParams::Photo(_) => bail!(
            UnsupportedTask,
            "{} images need segmentation for background removal",
            item.task
        ),
        TaskParams::Flag(p) => {
            let tag = p.element.tag();
            let palette = [Color::rgb(0x1f, 0x3a, 0x93), Color::rgb(0xf3, 0x9c, 0x12)];
            let mut k = 0;
            scene()?.filtered(Color::WHITE, |s| {
                if !s.has_tag(tag) {
                    return None;
                }
                let mut s = s.clone();
                s.stroke = None;
                s.fill = Some(if tag == "star" {
                    Color::BLACK
                } else {
                    k += 1;
                    palette[(k - 1) % 2]
                });
                Some(s)
            })
        }
        TaskParams::Piece(_) => scene()?.filtered(Color::WHITE, |s| {
            crate::scene::carries_tag(s, &|t| t == "piece").then(|| s.clone())
        }),
        TaskParams::GridBoard(p) => boards::gridboard_scene_plain(p),
        TaskParams::Illusion(_) => {
            scene()?.filtered(Color::WHITE, |s| (!s.has_tag("context")).then(|| s.clone()))
        }
        TaskParams::Grid(p) => grids::isolated_cell_scene(p),
    }
}

/// Builds titled and/or background-removed derivatives of baseline items,
/// writing files under `root`. Returns new manifest rows in input order.
pub fn make_variants(
    cfg: &GenConfig,
    root: &Path,
    baseline: &[StimulusItem],
    kinds: &[VariantKind],
) -> Result<Vec<StimulusItem>> {
    let mut groups: Vec<Vec<&StimulusItem>> = Vec::new();
    for it in baseline
        .iter()
        .filter(|i| i.variant == VariantKind::Baseline)
    {
        match groups.last_mut() {
            Some(g) if g[0].item_id == it.item_id => g.push(it),
            _ => groups.push(vec![it]),
        }
    }
    let out: Vec<Vec<StimulusItem>> = groups
        .par_iter()
        .map(|g| {
            let mut rows = Vec::new();
            for &kind in kinds {
                match kind {
                    VariantKind::Baseline => {}
                    VariantKind::Titled => {
                        for it in g {
                            rows.push(titled(cfg, root, it)?);
                        }
                    }
                    VariantKind::BackgroundRemoved => {
                        rows.extend(background_removed(cfg, root, g)?)
                    }
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(out.into_iter().flatten().collect())
}

fn derived(
    it: &StimulusItem,
    variant: VariantKind,
    image: &RasterImage,
    svg: Option<String>,
) -> StimulusItem {
    let stem = StimulusItem::file_stem(&it.item_id, variant, it.resolution);
    StimulusItem {
        id: stem.clone(),
        variant,
        image: StimulusItem::image_path(it.task, &stem),
        svg,
        width: image.width(),
        height: image.height(),
        provenance: Provenance::Oracle,
        ..it.clone()
    }
}

fn titled(cfg: &GenConfig, root: &Path, it: &StimulusItem) -> Result<StimulusItem> {
    let base = RasterImage::read_png(&root.join(&it.image))?;
    let img = inject_title(&base, &it.subject, &cfg.font)?;
    let row = derived(it, VariantKind::Titled, &img, None);
    img.write_png(&root.join(&row.image))?;
    Ok(row)
}

fn background_removed(
    cfg: &GenConfig,
    root: &Path,
    group: &[&StimulusItem],
) -> Result<Vec<StimulusItem>> {
    let first = group[0];
    let scene = remove_background(first, cfg)?;
    gen::check_truth(&first.truth, &first.params, &scene, &first.item_id)?;
    let res: Vec<u32> = group.iter().map(|i| i.resolution).collect();
    let images = emit_resolutions(&scene, &res, cfg.quality, cfg.max_pixels)?;
    let svg = serialize_svg(&scene);
    let mut rows = Vec::new();
    for (it, img) in group.iter().zip(images) {
        let stem =
            StimulusItem::file_stem(&it.item_id, VariantKind::BackgroundRemoved, it.resolution);
        let svg_rel = cfg
            .write_svg
            .then(|| StimulusItem::svg_path(it.task, &stem));
        let row = derived(it, VariantKind::BackgroundRemoved, &img, svg_rel.clone());
        img.write_png(&root.join(&row.image))?;
        if let Some(rel) = svg_rel {
            let p = root.join(rel);
            std::fs::write(&p, &svg).map_err(|e| Error::io(&p, e))?;
        }
        rows.push(row);
    }
    Ok(rows)
}
