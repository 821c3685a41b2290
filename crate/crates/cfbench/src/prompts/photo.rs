//! Photo tasks (animals, logos): generation-prompt manifests for a human to
//! run against an external image model, and ingestion of the resulting files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Error, Result};
use crate::item::{
    GroundTruth, Provenance, StimulusItem, Task, TaskParams, Truth, VariantKind, YesNo,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogoBrand {
    Adidas,
    Nike,
    Audi,
    Mercedes,
    Maserati,
}

impl LogoBrand {
    pub const ALL: [LogoBrand; 5] = [
        LogoBrand::Adidas,
        LogoBrand::Nike,
        LogoBrand::Audi,
        LogoBrand::Mercedes,
        LogoBrand::Maserati,
    ];

    pub fn display(self) -> &'static str {
        match self {
            LogoBrand::Adidas => "Adidas",
            LogoBrand::Nike => "Nike",
            LogoBrand::Audi => "Audi",
            LogoBrand::Mercedes => "Mercedes-Benz",
            LogoBrand::Maserati => "Maserati",
        }
    }

    pub fn is_shoe(self) -> bool {
        matches!(self, LogoBrand::Adidas | LogoBrand::Nike)
    }

    /// Counted element, singular and plural.
    pub fn element(self) -> (&'static str, &'static str) {
        match self {
            LogoBrand::Adidas => ("stripe", "stripes"),
            LogoBrand::Nike => ("stylized curve", "stylized curves"),
            LogoBrand::Audi => ("overlapping circle", "overlapping circles"),
            LogoBrand::Mercedes => ("point", "points"),
            LogoBrand::Maserati => ("prong", "prongs"),
        }
    }
}

/// Parameters carried by an ingested photo item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotoParams {
    /// File name as declared, relative to the ingest directory.
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brand: Option<LogoBrand>,
    /// Colour word for the `[StripeColor]`/`[CurveColor]` slot.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element_color: Option<String>,
    /// True for an unmodified photo used by sanity checks and side-by-side.
    #[serde(default)]
    pub original: bool,
}

/// One human-verified image declaration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Declaration {
    pub file: String,
    pub task: Task,
    pub subject: String,
    pub gt: i64,
    pub bias: i64,
    #[serde(default)]
    pub brand: Option<LogoBrand>,
    #[serde(default)]
    pub element_color: Option<String>,
    #[serde(default)]
    pub original: bool,
    /// Groups a counterfactual with its original for side-by-side prompts.
    #[serde(default)]
    pub reference: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
struct TemplateRow {
    kind: &'static str,
    prompt_type: &'static str,
    template: &'static str,
    slots: Vec<String>,
    to_generate: bool,
}

const ANIMAL_TEMPLATES: &[(&str, &str)] = &[
    (
        "animal_suggestions",
        "Generate a JSON list containing 100 animal objects. Each object should represent a common animal and follow the structure below:\n\n{ \"name\": \"<Common Animal Name>\", \"num_legs\": <Typical Number of Legs> }\n\nEnsure the following for each animal:\n1. the number of legs of this animal is 2 or 4.\n2. the animal's legs must be long enough to be seen easily from the body using a side-view perspective. Prioritize animals whose legs are thin and/or long.",
    ),
    (
        "animal_generation",
        "Generate a clear, full-body, side-view image of a(n) {animal} with {num_legs} legs that is walking in a real-world natural background. The {num_legs}-legged animal must look photo-realistic in nature. All {num_legs} legs must be clearly visible.",
    ),
    (
        "animal_editing",
        "Edit this image: Add 1 more leg to the {animal} so that it has {num_leg} legs in total. The {num_leg}-legged {animal} must be photo-realistic. All {num_leg} legs must be clearly visible.",
    ),
];

const LOGO_TEMPLATES: &[(&str, &str)] = &[
    (
        "logo_suggestion",
        "Generate a JSON list of subtle logo modification prompts and corresponding VLM question prompts to test visual bias. For each entry: Slightly modify the visual components of a well-known car or sportswear logo. The selected logo must be geometrically simple and widely recognized.\n\nYou must include a generation prompt to create the altered image. Include a question prompt (e.g., \"How many...\"). Include metadata: element being modified, actual count (ground truth), common expected count (bias).\n\n<In-context learning example 1>\n\n<In-context learning example 2>",
    ),
    (
        "shoe_generation",
        "Generate an {shoe_brand} style running shoe but with {actual_count} {modified_element} instead of {expected_bias}.",
    ),
    (
        "shoe_background_generation",
        "Generate a side-view image of an athlete wearing this pair of shoes. Keep all the fine-grained details of the shoes, particularly the {actual_count} {modified_element} on both shoes. The person is playing {sports_type}, showing their {sports_type} skills, and is wearing a {sports_type} outfit. Zoom out a bit to see their full body.",
    ),
    (
        "car_logo_generation",
        "Generate a {car_brand} logo but with {actual_count} {modified_element} instead of {expected_bias}.",
    ),
    (
        "car_background_generation",
        "Generate a photo-realistic front-view image of a {color} {car_brand} {body_type} on the road in the middle of the day. Zoom out a bit so that we can see the road.",
    ),
];

/// Brace-delimited slot names in order of first appearance. The JSON
/// example inside the suggestion prompts is skipped by requiring an
/// identifier-only slot.
fn slots(template: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut rest = template;
    while let Some(i) = rest.find('{') {
        let after = &rest[i + 1..];
        let Some(j) = after.find('}') else { break };
        let name = &after[..j];
        if !name.is_empty()
            && name.chars().all(|c| c.is_ascii_lowercase() || c == '_')
            && !out.iter().any(|s| s == name)
        {
            out.push(name.to_string());
        }
        rest = &after[j + 1..];
    }
    out
}

/// JSON-lines manifest of generation/editing templates for `animals` or
/// `logos`.
pub fn emit_photo_manifest(kind: &str) -> Result<String> {
    let (name, rows) = match kind.trim().to_ascii_lowercase().as_str() {
        "animals" => ("animals", ANIMAL_TEMPLATES),
        "logos" => ("logos", LOGO_TEMPLATES),
        other => bail!(
            Argument,
            "unknown photo kind {other:?} (expected animals or logos)"
        ),
    };
    let mut out = String::new();
    for (prompt_type, template) in rows {
        let row = TemplateRow {
            kind: name,
            prompt_type,
            template,
            slots: slots(template),
            to_generate: true,
        };
        out.push_str(&crate::jsonl::to_line(&row)?);
        out.push('\n');
    }
    Ok(out)
}

/// Ingested items, split into counterfactuals and originals.
#[derive(Debug, Default)]
pub struct Ingested {
    pub items: Vec<StimulusItem>,
    pub references: Vec<StimulusItem>,
}

fn slug(s: &str) -> String {
    let mut out = String::new();
    for c in s.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

/// Turns declared external images into manifest rows. Truths are taken from
/// the declarations as given and marked `declared`; nothing is measured.
pub fn ingest_external_images(dir: &Path, declarations: &[Declaration]) -> Result<Ingested> {
    let mut out = Ingested::default();
    if declarations.is_empty() {
        return Ok(out);
    }
    let dir = dir.canonicalize().map_err(|e| Error::io(dir, e))?;
    let mut seen = std::collections::BTreeSet::new();
    for d in declarations {
        if !matches!(d.task, Task::Animals | Task::Logos) {
            bail!(
                Validation,
                "{}: task {} is generated, not ingested",
                d.file,
                d.task
            );
        }
        if d.subject.trim().is_empty() {
            bail!(Validation, "{}: empty subject", d.file);
        }
        if d.original {
            if d.gt != d.bias {
                bail!(
                    Validation,
                    "{}: an original image must declare gt == bias",
                    d.file
                );
            }
        } else if (d.gt - d.bias).abs() != 1 {
            bail!(
                Validation,
                "{}: |gt - bias| must be 1 for {} (got gt {} bias {})",
                d.file,
                d.task,
                d.gt,
                d.bias
            );
        }
        if d.task == Task::Logos && d.brand.is_none() {
            bail!(Validation, "{}: logo declarations need a brand", d.file);
        }
        let path = dir.join(&d.file);
        if !path.is_file() {
            bail!(
                Validation,
                "declared file {} does not exist",
                path.display()
            );
        }
        let (width, height) = image::image_dimensions(&path)
            .map_err(|e| Error::Validation(format!("{}: unreadable image: {e}", path.display())))?;
        let stem = Path::new(&d.file)
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or(&d.file);
        let item_id = format!("{}_{}", d.task.as_str(), slug(stem));
        if !seen.insert(item_id.clone()) {
            bail!(Validation, "duplicate declaration for {item_id}");
        }
        let q3 = if d.original { YesNo::Yes } else { YesNo::No };
        let resolution = width.max(height);
        let item = StimulusItem {
            id: StimulusItem::file_stem(&item_id, VariantKind::Baseline, resolution),
            item_id,
            task: d.task,
            variant: VariantKind::Baseline,
            resolution,
            subject: d.subject.trim().to_string(),
            params: TaskParams::Photo(PhotoParams {
                source: d.file.clone(),
                brand: d.brand,
                element_color: d.element_color.clone(),
                original: d.original,
            }),
            truth: GroundTruth {
                primary: Truth::count(d.gt, d.bias),
                q3: Truth::yes_no(q3),
            },
            provenance: Provenance::Declared,
            seed: 0,
            image: path.to_string_lossy().into_owned(),
            svg: None,
            width,
            height,
            reference: d
                .reference
                .as_ref()
                .map(|r| format!("{}_{}", d.task.as_str(), slug(r))),
        };
        if d.original {
            out.references.push(item);
        } else {
            out.items.push(item);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{Color, RasterImage};

    fn decl(file: &str, gt: i64, bias: i64) -> Declaration {
        Declaration {
            file: file.into(),
            task: Task::Animals,
            subject: "Chicken".into(),
            gt,
            bias,
            brand: None,
            element_color: None,
            original: false,
            reference: None,
        }
    }

    #[test]
    fn manifests() {
        let a = emit_photo_manifest("animals").unwrap();
        assert!(a.contains("Generate a clear, full-body, side-view image"));
        assert_eq!(a.lines().count(), 3);
        let l = emit_photo_manifest("logos").unwrap();
        assert!(l.contains("style running shoe"));
        assert!(l.contains("{car_brand} logo"));
        assert!(l.lines().all(|line| line.contains("\"to_generate\":true")));
        assert!(matches!(
            emit_photo_manifest("cars"),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn slot_extraction() {
        assert_eq!(slots(ANIMAL_TEMPLATES[2].1), vec!["animal", "num_leg"]);
        assert!(slots(ANIMAL_TEMPLATES[0].1).is_empty());
    }

    #[test]
    fn ingest_rules() {
        let dir = tempfile::tempdir().unwrap();
        RasterImage::filled(300, 200, Color::WHITE)
            .unwrap()
            .write_png(&dir.path().join("bird3.png"))
            .unwrap();
        let got = ingest_external_images(dir.path(), &[decl("bird3.png", 3, 2)]).unwrap();
        assert_eq!(got.items.len(), 1);
        let it = &got.items[0];
        assert_eq!((it.width, it.height, it.resolution), (300, 200, 300));
        assert_eq!(it.provenance, Provenance::Declared);
        assert_eq!(it.truth.primary, Truth::count(3, 2));

        let bad = ingest_external_images(dir.path(), &[decl("bird3.png", 7, 2)]);
        assert!(matches!(bad, Err(Error::Validation(_))));
        let missing = ingest_external_images(dir.path(), &[decl("nope.png", 3, 2)]);
        assert!(matches!(missing, Err(Error::Validation(_))));
        let empty = ingest_external_images(dir.path(), &[]).unwrap();
        assert!(empty.items.is_empty());
    }
}
