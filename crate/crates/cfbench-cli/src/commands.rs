//! The five pipeline steps. Each reads its inputs from, and writes its
//! outputs to, the configured output root.

use std::path::{Path, PathBuf};

use cfbench::error::{Error, Result};
use cfbench::harness::{
    read_records, run_eval, EndpointAdapter, MockBiasedModel, ModelAdapter, RunStore, RunSummary,
};
use cfbench::metrics::{build_report, emit_report, ReportFormat};
use cfbench::prompts::photo::{emit_photo_manifest, ingest_external_images, Declaration};
use cfbench::prompts::{compile, sanity_prompts, PromptBundle, PromptContext};
use cfbench::{jsonl, StimulusItem, Task, VariantKind};

use crate::config::{AdapterKind, BenchConfig};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSummary {
    pub items: usize,
    pub references: usize,
    /// Generation-template manifests written for photo tasks lacking images.
    pub photo_manifests: Vec<PathBuf>,
}

fn is_empty_dir(dir: &Path) -> Result<bool> {
    match std::fs::read_dir(dir) {
        Ok(mut it) => Ok(it.next().is_none()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(true),
        Err(e) => Err(Error::io(dir, e)),
    }
}

fn remove_dir(dir: &Path) -> Result<()> {
    match std::fs::remove_dir_all(dir) {
        Err(e) if e.kind() != std::io::ErrorKind::NotFound => Err(Error::io(dir, e)),
        _ => Ok(()),
    }
}

fn read_manifest<T: serde::de::DeserializeOwned>(path: &Path, producer: &str) -> Result<Vec<T>> {
    if !path.exists() {
        return Err(Error::Argument(format!(
            "{} not found; run `cfbench {producer}` first",
            path.display()
        )));
    }
    jsonl::read(path)
}

/// Generates every selected task. Refuses a non-empty output root unless
/// `force`, in which case only the directories this tool owns are cleared.
pub fn cmd_gen(cfg: &BenchConfig, force: bool) -> Result<GenSummary> {
    let out = &cfg.out;
    if !is_empty_dir(out)? {
        if !force {
            return Err(Error::Argument(format!(
                "output directory {} is not empty; pass --force to overwrite",
                out.display()
            )));
        }
        for sub in ["manifests", "runs", "reports"] {
            remove_dir(&out.join(sub))?;
        }
        for t in Task::ALL {
            remove_dir(&out.join(t.as_str()))?;
        }
    }
    let gen_cfg = cfg.gen_config();
    let mut produced = cfbench::gen::generate(&gen_cfg, out)?;
    let mut photo_manifests = Vec::new();
    let photo_tasks: Vec<Task> = cfg
        .tasks
        .iter()
        .copied()
        .filter(|t| !t.is_generated())
        .collect();
    if !photo_tasks.is_empty() {
        match &cfg.photos {
            Some(src) => {
                let decls: Vec<Declaration> = jsonl::read(&src.declarations)?;
                let decls: Vec<Declaration> = decls
                    .into_iter()
                    .filter(|d| photo_tasks.contains(&d.task))
                    .collect();
                let ingested = ingest_external_images(&src.dir, &decls)?;
                produced.items.extend(ingested.items);
                produced.references.extend(ingested.references);
            }
            None => {
                for t in photo_tasks {
                    let path = cfg
                        .manifests_dir()
                        .join(format!("{}_to_generate.jsonl", t.as_str()));
                    std::fs::create_dir_all(cfg.manifests_dir())
                        .map_err(|e| Error::io(cfg.manifests_dir(), e))?;
                    std::fs::write(&path, emit_photo_manifest(t.as_str())?)
                        .map_err(|e| Error::io(&path, e))?;
                    photo_manifests.push(path);
                }
            }
        }
    }
    jsonl::write(&cfg.items_manifest(), &produced.items)?;
    jsonl::write(&cfg.references_manifest(), &produced.references)?;
    Ok(GenSummary {
        items: produced.items.len(),
        references: produced.references.len(),
        photo_manifests,
    })
}

/// Adds titled and background-removed derivatives of the generated
/// baseline items to the item manifest.
pub fn cmd_variants(cfg: &BenchConfig, force: bool) -> Result<usize> {
    let mut items: Vec<StimulusItem> = read_manifest(&cfg.items_manifest(), "gen")?;
    let kinds: Vec<VariantKind> = cfg
        .variants
        .iter()
        .copied()
        .filter(|k| *k != VariantKind::Baseline)
        .collect();
    let selected = |it: &StimulusItem| cfg.tasks.contains(&it.task) && it.task.is_generated();
    if items
        .iter()
        .any(|it| selected(it) && kinds.contains(&it.variant))
    {
        if !force {
            return Err(Error::Argument(format!(
                "item manifest already holds {kinds:?} variants; pass --force to rebuild them"
            )));
        }
        items.retain(|it| !(selected(it) && kinds.contains(&it.variant)));
    }
    let baseline: Vec<StimulusItem> = items
        .iter()
        .filter(|it| selected(it) && it.variant == VariantKind::Baseline)
        .cloned()
        .collect();
    let derived = cfbench::variants::make_variants(&cfg.gen_config(), &cfg.out, &baseline, &kinds)?;
    let n = derived.len();
    items.extend(derived);
    jsonl::write(&cfg.items_manifest(), &items)?;
    Ok(n)
}

/// Compiles prompt bundles for the selected tasks, variants, questions
/// and modes.
pub fn cmd_prompts(cfg: &BenchConfig, force: bool) -> Result<usize> {
    let items: Vec<StimulusItem> = read_manifest(&cfg.items_manifest(), "gen")?;
    let references: Vec<StimulusItem> = read_manifest(&cfg.references_manifest(), "gen")?;
    let path = cfg.prompts_manifest();
    if path.exists() && !force {
        return Err(Error::Argument(format!(
            "{} exists; pass --force to recompile",
            path.display()
        )));
    }
    let non_neutral = cfg.non_neutral_table();
    let ctx = PromptContext {
        seed: cfg.seed,
        items: &items,
        references: &references,
        non_neutral: &non_neutral,
    };
    let selected: Vec<StimulusItem> = items
        .iter()
        .filter(|it| cfg.tasks.contains(&it.task) && cfg.prompt_variants.contains(&it.variant))
        .cloned()
        .collect();
    let mut bundles = compile(&selected, &cfg.questions, &cfg.modes, &ctx)?;
    if cfg.sanity {
        for &t in &cfg.tasks {
            bundles.extend(sanity_prompts(t, &references, &items)?);
        }
    }
    jsonl::write(&path, &bundles)?;
    Ok(bundles.len())
}

pub fn make_adapter(cfg: &BenchConfig) -> Result<Box<dyn ModelAdapter>> {
    Ok(match cfg.adapter {
        AdapterKind::Mock => Box::new(MockBiasedModel::new(
            cfg.mock.p_bias,
            cfg.mock.p_correct,
            cfg.mock.seed,
        )?),
        AdapterKind::Endpoint => {
            let Some(ep) = &cfg.endpoint else {
                return Err(Error::Config(
                    "adapter = \"endpoint\" needs an [endpoint] section".into(),
                ));
            };
            Box::new(EndpointAdapter::new(ep.clone())?)
        }
    })
}

/// File name for a model's run store.
pub fn store_name(model: &str) -> String {
    let s: String = model
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "-_.".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect();
    format!("{s}.jsonl")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalSummary {
    pub model: String,
    pub store: PathBuf,
    pub run: RunSummary,
}

/// Evaluates the compiled bundles with the configured adapter, resuming
/// from any records already in the model's store.
pub fn cmd_eval(cfg: &BenchConfig) -> Result<EvalSummary> {
    let bundles: Vec<PromptBundle> = read_manifest(&cfg.prompts_manifest(), "prompts")?;
    let bundles: Vec<PromptBundle> = bundles
        .into_iter()
        .filter(|b| cfg.tasks.contains(&b.task))
        .collect();
    let adapter = make_adapter(cfg)?;
    let model = adapter.id();
    let store_path = cfg.runs_dir().join(store_name(&model));
    let mut store = RunStore::open(&store_path)?;
    let run = run_eval(
        &bundles,
        adapter.as_ref(),
        &cfg.run_config(),
        &cfg.out,
        &mut store,
    )?;
    Ok(EvalSummary {
        model,
        store: store_path,
        run,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreSummary {
    pub records: usize,
    pub files: Vec<PathBuf>,
    pub notice: Option<String>,
}

/// Scores every run store under the output root into Markdown and CSV
/// reports.
pub fn cmd_score(cfg: &BenchConfig) -> Result<ScoreSummary> {
    let dir = cfg.runs_dir();
    let mut stores: Vec<PathBuf> = match std::fs::read_dir(&dir) {
        Ok(rd) => rd
            .map(|e| e.map(|e| e.path()).map_err(|err| Error::io(&dir, err)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
            .collect(),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(Error::io(&dir, e)),
    };
    stores.sort();
    let mut records = Vec::new();
    for s in &stores {
        records.extend(read_records(s)?);
    }
    let report = build_report(&records, &cfg.report_options())?;
    let files = emit_report(
        &report,
        &cfg.reports_dir(),
        &[ReportFormat::Markdown, ReportFormat::Csv],
    )?;
    Ok(ScoreSummary {
        records: records.len(),
        files,
        notice: report.notice,
    })
}
