use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use cfbench::prompts::PromptMode;
use cfbench::{Error, Task};
use cfbench_cli::config::{AdapterKind, BenchConfig};
use cfbench_cli::{cmd_eval, cmd_gen, cmd_prompts, cmd_score, cmd_variants};
use clap::{Parser, Subcommand};

/// Counterfactual visual-bias benchmark: generate stimuli, compile prompts,
/// evaluate a model, score the runs.
#[derive(Debug, Parser)]
#[command(name = "cfbench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Comma-separated task names, e.g. flags,grids.
    #[arg(long, global = true, value_delimiter = ',', value_parser = Task::from_str)]
    tasks: Option<Vec<Task>>,
    #[arg(long, global = true, value_delimiter = ',')]
    resolutions: Option<Vec<u32>>,
    /// Comma-separated mode labels, e.g. baseline,debiased+double_check.
    #[arg(long, global = true, value_delimiter = ',', value_parser = PromptMode::from_str)]
    modes: Option<Vec<PromptMode>>,
    #[arg(long, global = true)]
    runs: Option<u32>,
    #[arg(long, global = true, value_enum)]
    adapter: Option<AdapterKind>,
    /// Output root directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overwrite existing outputs.
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate stimuli and the item manifest.
    Gen,
    /// Build titled and background-removed variants.
    Variants,
    /// Compile prompt bundles.
    Prompts,
    /// Evaluate bundles with the mock or an endpoint.
    Eval,
    /// Score run stores into reports.
    Score,
}

fn config(cli: &Cli) -> Result<BenchConfig, Error> {
    let mut cfg = match &cli.config {
        Some(p) => BenchConfig::load(p)?,
        None => BenchConfig::default(),
    };
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if let Some(v) = &cli.tasks {
        cfg.tasks = v.clone();
    }
    if let Some(v) = &cli.resolutions {
        cfg.resolutions = v.clone();
    }
    if let Some(v) = &cli.modes {
        cfg.modes = v.clone();
    }
    if let Some(v) = cli.runs {
        cfg.runs = v;
    }
    if let Some(v) = cli.adapter {
        cfg.adapter = v;
    }
    if let Some(v) = &cli.out {
        cfg.out = v.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), Error> {
    let cfg = config(cli)?;
    match cli.command {
        Command::Gen => {
            let s = cmd_gen(&cfg, cli.force)?;
            println!(
                "generated {} items and {} references in {}",
                s.items,
                s.references,
                cfg.out.display()
            );
            for p in s.photo_manifests {
                println!("photo generation manifest: {}", p.display());
            }
        }
        Command::Variants => {
            let n = cmd_variants(&cfg, cli.force)?;
            println!("added {n} variant items");
        }
        Command::Prompts => {
            let n = cmd_prompts(&cfg, cli.force)?;
            println!(
                "compiled {n} prompt bundles into {}",
                cfg.prompts_manifest().display()
            );
        }
        Command::Eval => {
            let s = cmd_eval(&cfg)?;
            println!(
                "{}: wrote {} records, skipped {} existing, {} transport failures -> {}",
                s.model,
                s.run.written,
                s.run.skipped,
                s.run.transport_failed,
                s.store.display()
            );
        }
        Command::Score => {
            let s = cmd_score(&cfg)?;
            if let Some(n) = &s.notice {
                eprintln!("note: {n}");
            }
            println!("scored {} records", s.records);
            for f in s.files {
                println!("{}", f.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Argument(_) | Error::Config(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
