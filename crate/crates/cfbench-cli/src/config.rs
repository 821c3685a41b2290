//! Declarative run configuration, read from TOML and overridable by flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use cfbench::error::{Error, Result};
use cfbench::gen::{GenConfig, DEFAULT_QUALITY, DEFAULT_RESOLUTIONS};
use cfbench::harness::endpoint::EndpointConfig;
use cfbench::harness::{RetryPolicy, RunConfig};
use cfbench::metrics::{ReportOptions, DEFAULT_BINS};
use cfbench::prompts::{NonNeutralRule, NonNeutralTable, PromptMode, QuestionId};
use cfbench::scene::FontChoice;
use cfbench::{Task, VariantKind};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum AdapterKind {
    Mock,
    Endpoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MockConfig {
    pub p_bias: f64,
    pub p_correct: f64,
    pub seed: u64,
}

impl Default for MockConfig {
    fn default() -> Self {
        MockConfig {
            p_bias: 0.75,
            p_correct: 0.17,
            seed: 0,
        }
    }
}

/// Externally produced animal/logo images and their human-verified labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhotoSource {
    pub dir: PathBuf,
    /// JSON-lines file of declarations.
    pub declarations: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub tasks: Vec<Task>,
    pub resolutions: Vec<u32>,
    /// Derivatives built by the `variants` command.
    pub variants: Vec<VariantKind>,
    /// Image variants that prompts are compiled for.
    pub prompt_variants: Vec<VariantKind>,
    pub questions: Vec<QuestionId>,
    pub modes: Vec<PromptMode>,
    /// Also compile identification/counting sanity prompts.
    pub sanity: bool,
    pub runs: u32,
    pub parallelism: usize,
    /// Runs per unit for pass@k and agreement; defaults to `runs`.
    pub k: Option<usize>,
    pub bins: usize,
    pub adapter: AdapterKind,
    pub quality: f64,
    pub write_svg: bool,
    pub font: Option<PathBuf>,
    pub mock: MockConfig,
    pub endpoint: Option<EndpointConfig>,
    pub retry: RetryPolicy,
    /// Replaces the default rules for the tasks it names.
    pub non_neutral: BTreeMap<Task, Vec<NonNeutralRule>>,
    pub photos: Option<PhotoSource>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            seed: 0,
            out: PathBuf::from("out"),
            tasks: Task::GENERATED.to_vec(),
            resolutions: DEFAULT_RESOLUTIONS.to_vec(),
            variants: vec![VariantKind::Titled, VariantKind::BackgroundRemoved],
            prompt_variants: vec![VariantKind::Baseline],
            questions: QuestionId::MAIN.to_vec(),
            modes: vec![PromptMode::baseline()],
            sanity: false,
            runs: 1,
            parallelism: 4,
            k: None,
            bins: DEFAULT_BINS,
            adapter: AdapterKind::Mock,
            quality: DEFAULT_QUALITY,
            write_svg: true,
            font: None,
            mock: MockConfig::default(),
            endpoint: None,
            retry: RetryPolicy::default(),
            non_neutral: BTreeMap::new(),
            photos: None,
        }
    }
}

impl BenchConfig {
    pub fn load(path: &Path) -> Result<BenchConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        BenchConfig::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<BenchConfig> {
        let cfg: BenchConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.parallelism == 0 {
            return Err(Error::Config("parallelism must be at least 1".into()));
        }
        if self.bins == 0 {
            return Err(Error::Config("bins must be at least 1".into()));
        }
        if self.k == Some(0) {
            return Err(Error::Config("k must be at least 1".into()));
        }
        Ok(())
    }

    pub fn gen_config(&self) -> GenConfig {
        GenConfig {
            seed: self.seed,
            tasks: self
                .tasks
                .iter()
                .copied()
                .filter(|t| t.is_generated())
                .collect(),
            resolutions: self.resolutions.clone(),
            quality: self.quality,
            font: match &self.font {
                Some(p) => FontChoice::File(p.clone()),
                None => FontChoice::Builtin,
            },
            write_svg: self.write_svg,
            ..GenConfig::default()
        }
    }

    pub fn non_neutral_table(&self) -> NonNeutralTable {
        let mut t = NonNeutralTable::default();
        for (task, rules) in &self.non_neutral {
            t.rules.insert(*task, rules.clone());
        }
        t
    }

    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            runs: self.runs,
            parallelism: self.parallelism,
            retry: self.retry,
        }
    }

    pub fn report_options(&self) -> ReportOptions {
        ReportOptions {
            k: self.k.unwrap_or(self.runs as usize),
            bins: self.bins,
            resolutions: self.resolutions.clone(),
            ..ReportOptions::default()
        }
    }

    pub fn manifests_dir(&self) -> PathBuf {
        self.out.join("manifests")
    }

    pub fn items_manifest(&self) -> PathBuf {
        self.manifests_dir().join("items.jsonl")
    }

    pub fn references_manifest(&self) -> PathBuf {
        self.manifests_dir().join("references.jsonl")
    }

    pub fn prompts_manifest(&self) -> PathBuf {
        self.manifests_dir().join("prompts.jsonl")
    }

    pub fn runs_dir(&self) -> PathBuf {
        self.out.join("runs")
    }

    pub fn reports_dir(&self) -> PathBuf {
        self.out.join("reports")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(BenchConfig::parse("").unwrap(), BenchConfig::default());
    }

    #[test]
    fn full_file_parses() {
        let cfg = BenchConfig::parse(
            r#"
            seed = 7
            out = "o"
            tasks = ["grids", "chess_pieces"]
            resolutions = [384]
            modes = ["baseline", "debiased+double_check", "few_shot_k3_strong"]
            questions = ["q1"]
            runs = 5
            adapter = "endpoint"

            [mock]
            p_bias = 0.5

            [endpoint]
            model = "m"
            url = "http://localhost:1/v1/chat/completions"
            auth_env = "TOKEN"

            [retry]
            max_retries = 1
            base_delay_ms = 1
            max_delay_ms = 2

            [[non_neutral.grids]]
            find = "in cell"
            replace = "in {subject} cell"
            "#,
        )
        .unwrap();
        assert_eq!(cfg.tasks, vec![Task::Grids, Task::ChessPieces]);
        assert_eq!(cfg.modes.len(), 3);
        assert_eq!(cfg.mock.p_correct, 0.17);
        assert_eq!(cfg.report_options().k, 5);
        assert_eq!(
            cfg.non_neutral_table().rules[&Task::Grids][0].replace,
            "in {subject} cell"
        );
    }

    #[test]
    fn unknown_keys_and_bad_values_rejected() {
        assert!(matches!(
            BenchConfig::parse("sede = 1"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            BenchConfig::parse("runs = 0"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            BenchConfig::parse("modes = [\"sideways\"]"),
            Err(Error::Config(_))
        ));
    }
}
