//! Stimulus generation: per-task scene builders, oracle checks, and the
//! multi-resolution emission pipeline.

pub mod boards;
pub mod flags;
pub mod grids;
pub mod illusions;

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Error, Result};
use crate::item::{Answer, GroundTruth, Provenance, StimulusItem, Task, TaskParams, VariantKind};
use crate::scene::{serialize_svg, FontChoice, Scene, DEFAULT_MAX_PIXELS};
use crate::variants;

pub const DEFAULT_RESOLUTIONS: [u32; 3] = [384, 768, 1152];
pub const DEFAULT_QUALITY: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modification {
    Standard,
    Add,
    Remove,
    Replace,
}

impl Modification {
    pub fn as_str(self) -> &'static str {
        match self {
            Modification::Standard => "standard",
            Modification::Add => "add",
            Modification::Remove => "remove",
            Modification::Replace => "replace",
        }
    }
}

/// An item before rendering: everything but the file paths and pixel size.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemSpec {
    pub item_id: String,
    pub task: Task,
    pub resolution: u32,
    pub subject: String,
    pub params: TaskParams,
    pub truth: GroundTruth,
    pub seed: u64,
    pub reference: Option<String>,
}

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub seed: u64,
    pub tasks: Vec<Task>,
    pub resolutions: Vec<u32>,
    /// Render-time oversampling relative to the largest resolution.
    pub quality: f64,
    pub max_pixels: u64,
    pub font: FontChoice,
    pub flag_roster: Vec<flags::FlagTemplate>,
    pub illusion_grid: illusions::IllusionGrid,
    pub write_svg: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            tasks: Task::GENERATED.to_vec(),
            resolutions: DEFAULT_RESOLUTIONS.to_vec(),
            quality: DEFAULT_QUALITY,
            max_pixels: DEFAULT_MAX_PIXELS,
            font: FontChoice::Builtin,
            flag_roster: flags::default_roster(),
            illusion_grid: illusions::IllusionGrid::default(),
            write_svg: true,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.resolutions.is_empty() || self.resolutions.contains(&0) {
            bail!(
                Config,
                "resolutions must be a non-empty list of positive sizes"
            );
        }
        let mut r = self.resolutions.clone();
        r.sort_unstable();
        r.dedup();
        if r.len() != self.resolutions.len() {
            bail!(Config, "duplicate resolution in {:?}", self.resolutions);
        }
        if self.quality.is_nan() || self.quality < 1.0 {
            bail!(Config, "quality must be >= 1, got {}", self.quality);
        }
        if let Some(t) = self.tasks.iter().find(|t| !t.is_generated()) {
            bail!(Config, "task {t} is photo-based and cannot be generated");
        }
        if self.tasks.contains(&Task::Flags) {
            flags::validate_roster(&self.flag_roster)?;
        }
        if self.tasks.contains(&Task::Illusions) {
            self.illusion_grid.validate()?;
        }
        Ok(())
    }
}

/// Counterfactual item specs for one task, in canonical order.
pub fn enumerate_task(cfg: &GenConfig, task: Task) -> Result<Vec<ItemSpec>> {
    let (res, seed) = (&cfg.resolutions[..], cfg.seed);
    Ok(match task {
        Task::Flags => flags::enumerate_flag_set(&cfg.flag_roster, res, seed)?,
        Task::ChessPieces => boards::enumerate_piece_set(res, seed)?,
        Task::GameBoards => boards::enumerate_gridboard_set(res, seed)?,
        Task::Illusions => illusions::enumerate_illusion_set(&cfg.illusion_grid, res, seed)?,
        Task::Grids => grids::enumerate_grid_set(res, seed)?,
        other => bail!(UnsupportedTask, "{other} is not generated from code"),
    })
}

/// Unmodified reference scenes used by sanity and side-by-side prompts.
/// Illusions need none: their diff=0 items already are the originals.
pub fn enumerate_references(cfg: &GenConfig, task: Task) -> Result<Vec<ItemSpec>> {
    let (res, seed) = (&cfg.resolutions[..], cfg.seed);
    Ok(match task {
        Task::Flags => flags::reference_specs(&cfg.flag_roster, res, seed),
        Task::ChessPieces => boards::piece_reference_specs(res, seed),
        Task::GameBoards => boards::gridboard_reference_specs(res, seed),
        Task::Grids => grids::reference_specs(res, seed),
        _ => Vec::new(),
    })
}

/// Rebuilds the scene described by `params`.
pub fn build_scene(params: &TaskParams, cfg: &GenConfig) -> Result<Scene> {
    match params {
        TaskParams::Flag(p) => flags::scene_for(&cfg.flag_roster, p),
        TaskParams::Piece(p) => boards::piece_scene(p, &cfg.font),
        TaskParams::GridBoard(p) => boards::gridboard_scene(p, &cfg.font),
        TaskParams::Illusion(p) => Ok(illusions::generate_illusion(p)?.1),
        TaskParams::Grid(p) => Ok(grids::generate_grid(p)?.0),
        TaskParams::Photo(_) => bail!(UnsupportedTask, "photo items have no scene"),
    }
}

/// Answer to the primary question derived from the scene alone, given only
/// which tag or measure the question targets.
pub fn oracle_answer(params: &TaskParams, scene: &Scene) -> Result<Answer> {
    match params {
        TaskParams::Flag(p) => Ok(Answer::Int(
            crate::scene::count_tagged(scene, p.element.tag())? as i64,
        )),
        TaskParams::Piece(p) => boards::oracle_piece_count(p, scene).map(Answer::Int),
        TaskParams::GridBoard(p) => boards::oracle_line_count(p, scene).map(Answer::Int),
        TaskParams::Illusion(p) => {
            illusions::oracle_truth(p.kind, scene).map(|(yn, _)| Answer::YesNo(yn))
        }
        TaskParams::Grid(p) => grids::oracle_cell_count(p, scene).map(Answer::Int),
        TaskParams::Photo(_) => bail!(UnsupportedTask, "photo truths are declared, not derived"),
    }
}

/// Checks the recorded truth against the oracle and the per-task GT/bias
/// relation (±1 for counts, a flip for yes/no).
pub fn check_truth(
    spec_truth: &GroundTruth,
    params: &TaskParams,
    scene: &Scene,
    id: &str,
) -> Result<()> {
    let got = oracle_answer(params, scene)?;
    let p = &spec_truth.primary;
    if got != p.answer {
        bail!(
            Validation,
            "{id}: oracle gives {got}, manifest says {}",
            p.answer
        );
    }
    for t in [p, &spec_truth.q3] {
        match (&t.answer, &t.bias) {
            (Answer::Int(a), Some(Answer::Int(b))) if (a - b).abs() == 1 => {}
            (Answer::YesNo(a), Some(Answer::YesNo(b))) if a.flip() == *b => {}
            // Unmodified references: the truth is the standard answer itself.
            (a, Some(b))
                if a == b
                    && matches!(params_modification(params), Some(Modification::Standard)) => {}
            (a, b) => bail!(
                Validation,
                "{id}: truth {a} and bias {b:?} break the GT/bias rule"
            ),
        }
    }
    Ok(())
}

fn params_modification(params: &TaskParams) -> Option<Modification> {
    match params {
        TaskParams::Flag(p) => Some(p.modification),
        TaskParams::Piece(p) => Some(p.modification),
        TaskParams::GridBoard(p) => Some(if p.row_delta == 0 && p.col_delta == 0 {
            Modification::Standard
        } else {
            Modification::Add
        }),
        TaskParams::Grid(p) => Some(if p.anomaly.is_some() {
            Modification::Remove
        } else {
            Modification::Standard
        }),
        _ => None,
    }
}

#[derive(Debug, Clone, Default)]
pub struct GenOutput {
    pub items: Vec<StimulusItem>,
    pub references: Vec<StimulusItem>,
}

/// Renders every selected task into `root`: one scene per item id, rasterized
/// once and rescaled to each resolution, plus optional SVG siblings.
pub fn generate(cfg: &GenConfig, root: &Path) -> Result<GenOutput> {
    cfg.validate()?;
    let mut out = GenOutput::default();
    for &task in &cfg.tasks {
        let specs = enumerate_task(cfg, task)?;
        out.items.extend(emit_specs(cfg, root, &specs)?);
        let refs = enumerate_references(cfg, task)?;
        out.references.extend(emit_specs(cfg, root, &refs)?);
    }
    Ok(out)
}

/// Groups specs by item id (resolutions of one scene), renders groups in
/// parallel, and returns items in input order.
pub fn emit_specs(cfg: &GenConfig, root: &Path, specs: &[ItemSpec]) -> Result<Vec<StimulusItem>> {
    let mut groups: Vec<Vec<&ItemSpec>> = Vec::new();
    for s in specs {
        match groups.last_mut() {
            Some(g) if g[0].item_id == s.item_id => g.push(s),
            _ => groups.push(vec![s]),
        }
    }
    let rendered: Vec<Vec<StimulusItem>> = groups
        .par_iter()
        .map(|g| emit_group(cfg, root, g))
        .collect::<Result<_>>()?;
    Ok(rendered.into_iter().flatten().collect())
}

fn emit_group(cfg: &GenConfig, root: &Path, group: &[&ItemSpec]) -> Result<Vec<StimulusItem>> {
    let first = group[0];
    let scene = build_scene(&first.params, cfg)?;
    check_truth(&first.truth, &first.params, &scene, &first.item_id)?;
    let resolutions: Vec<u32> = group.iter().map(|s| s.resolution).collect();
    let images = variants::emit_resolutions(&scene, &resolutions, cfg.quality, cfg.max_pixels)?;
    let svg = cfg.write_svg.then(|| serialize_svg(&scene));
    let mut items = Vec::with_capacity(group.len());
    for (spec, img) in group.iter().zip(images) {
        let stem = StimulusItem::file_stem(&spec.item_id, VariantKind::Baseline, spec.resolution);
        let image = StimulusItem::image_path(spec.task, &stem);
        img.write_png(&root.join(&image))?;
        let svg_rel = match &svg {
            Some(text) => {
                let rel = StimulusItem::svg_path(spec.task, &stem);
                let path = root.join(&rel);
                std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
                Some(rel)
            }
            None => None,
        };
        items.push(StimulusItem {
            id: stem,
            item_id: spec.item_id.clone(),
            task: spec.task,
            variant: VariantKind::Baseline,
            resolution: spec.resolution,
            subject: spec.subject.clone(),
            params: spec.params.clone(),
            truth: spec.truth.clone(),
            provenance: Provenance::Oracle,
            seed: spec.seed,
            image,
            svg: svg_rel,
            width: img.width(),
            height: img.height(),
            reference: spec.reference.clone(),
        });
    }
    Ok(items)
}

/// `0.25` → `0p25`, `-0.1` → `-0p1`; used in file names.
pub fn slug_number(v: f64) -> String {
    let s = format!("{v}");
    s.replace('.', "p")
}
