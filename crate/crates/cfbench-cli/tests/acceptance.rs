//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines always reach the console.

#[path = "../../cfbench/tests/support/mod.rs"]
mod support;

use std::collections::{BTreeMap, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use cfbench::gen::grids::{self, cell_bbox, GridParams, GridStyle};
use cfbench::gen::illusions::measured_difference;
use cfbench::gen::{build_scene, oracle_answer};
use cfbench::harness::{
    parse_answer, read_records, run_eval, EndpointAdapter, EndpointConfig, MockBiasedModel,
    RunConfig, RunStore,
};
use cfbench::item::read_items;
use cfbench::metrics::{build_report, consistency, score, ReportOptions};
use cfbench::prompts::{
    compile, NonNeutralTable, Part, PromptBundle, PromptContext, PromptMode, QuestionId, Turn,
    TurnPurpose,
};
use cfbench::scene::{count_tagged_within, serialize_svg, RasterImage};
use cfbench::variants::{banner_height, make_variants};
use cfbench::{Answer, AnswerKind, StimulusItem, Task, TaskParams, Truth, VariantKind, YesNo};
use cfbench_cli::{cmd_eval, cmd_gen, cmd_prompts, cmd_score, BenchConfig};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Outcome = Result<String, String>;

struct Pipeline {
    cfg: BenchConfig,
    gen_time: Duration,
}

fn run_pipeline(out: &Path) -> Pipeline {
    let cfg = BenchConfig {
        out: out.to_path_buf(),
        ..BenchConfig::default()
    };
    let start = Instant::now();
    cmd_gen(&cfg, false).expect("gen");
    let gen_time = start.elapsed();
    cmd_prompts(&cfg, false).expect("prompts");
    cmd_eval(&cfg).expect("eval");
    cmd_score(&cfg).expect("score");
    Pipeline { cfg, gen_time }
}

fn cardinalities(p: &Pipeline) -> Outcome {
    let items = read_items(&p.cfg.items_manifest()).map_err(|e| e.to_string())?;
    let mut per: BTreeMap<Task, usize> = BTreeMap::new();
    for it in &items {
        *per.entry(it.task).or_default() += 1;
    }
    let want = [
        (Task::Flags, 120),
        (Task::ChessPieces, 144),
        (Task::GameBoards, 84),
        (Task::Illusions, 396),
        (Task::Grids, 168),
    ];
    for (t, n) in want {
        let got = per.get(&t).copied().unwrap_or(0);
        if got != n {
            return Err(format!("{t}: {got} items, want {n}"));
        }
    }
    if items.len() != 912 {
        return Err(format!("{} items, want 912", items.len()));
    }
    let secs = p.gen_time.as_secs_f64();
    if secs >= 300.0 {
        return Err(format!("generation took {secs:.0} s"));
    }
    Ok(format!("912 items, generated in {secs:.0} s"))
}

fn oracle_equivalence(p: &Pipeline) -> Outcome {
    let root = &p.cfg.out;
    let gen_cfg = p.cfg.gen_config();
    let items = read_items(&p.cfg.items_manifest()).map_err(|e| e.to_string())?;
    let refs = read_items(&p.cfg.references_manifest()).map_err(|e| e.to_string())?;
    let read_svg = |it: &StimulusItem| -> Result<String, String> {
        let rel = it.svg.as_ref().ok_or(format!("{}: no svg", it.id))?;
        std::fs::read_to_string(root.join(rel)).map_err(|e| format!("{rel}: {e}"))
    };
    let mut ref_svgs: HashMap<(String, u32), String> = HashMap::new();
    for r in &refs {
        ref_svgs.insert((r.item_id.clone(), r.resolution), read_svg(r)?);
    }
    let mut scenes: HashMap<String, String> = HashMap::new();
    for it in items.iter().chain(&refs) {
        // Route 1: the scene graph rebuilt from the manifest parameters.
        let scene = build_scene(&it.params, &gen_cfg).map_err(|e| e.to_string())?;
        let got = oracle_answer(&it.params, &scene).map_err(|e| e.to_string())?;
        if got != it.truth.primary.answer {
            return Err(format!("{}: oracle {got}, manifest {}", it.id, it.truth.primary.answer));
        }
        // Route 2: the SVG written next to the image.
        let svg = read_svg(it)?;
        let rebuilt = scenes
            .entry(it.item_id.clone())
            .or_insert_with(|| serialize_svg(&scene));
        if *rebuilt != svg {
            return Err(format!("{}: svg on disk differs from the rebuilt scene", it.id));
        }
        let reference = match &it.reference {
            Some(id) => Some(
                ref_svgs
                    .get(&(id.clone(), it.resolution))
                    .ok_or(format!("{}: reference {id} missing", it.id))?
                    .as_str(),
            ),
            None => None,
        };
        support::verify_truth(&it.id, &it.params, &it.truth, &svg, reference)?;
    }
    Ok(format!(
        "{} items and {} references agree on both routes",
        items.len(),
        refs.len()
    ))
}

fn grid_property() -> Outcome {
    let start = Instant::now();
    let mut cells = 0;
    for g in grids::MIN_G..=grids::MAX_G {
        for style in [GridStyle::Dice, GridStyle::Tally] {
            let (scene, _) = grids::generate_grid(&GridParams {
                g,
                style,
                anomaly: None,
            })
            .map_err(|e| e.to_string())?;
            let tag = support::grid_tag(style);
            let mut max = 0;
            for r in 0..g {
                for c in 0..g {
                    let want = support::grid_formula(r, c, g);
                    let got = count_tagged_within(&scene, tag, cell_bbox(r, c))
                        .map_err(|e| e.to_string())? as i64;
                    if got != want {
                        return Err(format!("G={g} {style:?} ({r},{c}): {got} != {want}"));
                    }
                    max = max.max(got);
                    cells += 1;
                }
            }
            if max != (g as i64 + 1) / 2 {
                return Err(format!("G={g}: max {max}"));
            }
        }
    }
    let t = start.elapsed().as_secs_f64();
    if t >= 1.0 {
        return Err(format!("took {t:.2} s"));
    }
    Ok(format!("{cells} cells in {:.0} ms", t * 1000.0))
}

fn illusion_coupling(p: &Pipeline) -> Outcome {
    let gen_cfg = p.cfg.gen_config();
    let items = read_items(&p.cfg.items_manifest()).map_err(|e| e.to_string())?;
    let mut n = 0;
    for it in items.iter().filter(|i| i.resolution == 384) {
        let TaskParams::Illusion(ip) = &it.params else {
            continue;
        };
        let scene = build_scene(&it.params, &gen_cfg).map_err(|e| e.to_string())?;
        let d = measured_difference(ip.kind, &scene).map_err(|e| e.to_string())?;
        let gt = &it.truth.primary.answer;
        let ok = if ip.difference == 0.0 {
            d < 1e-9 && *gt == Answer::YesNo(YesNo::Yes)
        } else {
            (d - ip.difference.abs()).abs() < 1e-9 && *gt == Answer::YesNo(YesNo::No)
        };
        if !ok {
            return Err(format!("{}: measured {d}, declared {}, GT {gt}", it.id, ip.difference));
        }
        n += 1;
    }
    if n != 132 {
        return Err(format!("{n} illusion scenes, want 132"));
    }
    Ok(format!("{n} scenes"))
}

fn resolution_contract(p: &Pipeline) -> Outcome {
    let gen_cfg = p.cfg.gen_config();
    let items = read_items(&p.cfg.items_manifest()).map_err(|e| e.to_string())?;
    let refs = read_items(&p.cfg.references_manifest()).map_err(|e| e.to_string())?;
    let mut sizes: HashMap<String, (f64, f64)> = HashMap::new();
    for it in items.iter().chain(&refs) {
        let img = RasterImage::read_png(&p.cfg.out.join(&it.image)).map_err(|e| e.to_string())?;
        let (w, h) = (img.width(), img.height());
        if w.max(h) != it.resolution || (w, h) != (it.width, it.height) {
            return Err(format!("{}: {w}x{h} at D={}", it.id, it.resolution));
        }
        let (sw, sh) = *sizes.entry(it.item_id.clone()).or_insert_with(|| {
            let s = build_scene(&it.params, &gen_cfg).expect("scene");
            (s.width(), s.height())
        });
        let d = it.resolution as f64;
        let (ew, eh) = if sw >= sh {
            (d, d * sh / sw)
        } else {
            (d * sw / sh, d)
        };
        if (w as f64 - ew).abs() > 1.0 || (h as f64 - eh).abs() > 1.0 {
            return Err(format!("{}: {w}x{h}, scene aspect wants {ew:.1}x{eh:.1}", it.id));
        }
    }
    Ok(format!("{} images", items.len() + refs.len()))
}

fn title_integrity(p: &Pipeline) -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let items = read_items(&p.cfg.items_manifest()).map_err(|e| e.to_string())?;
    let sample: Vec<StimulusItem> = items.iter().step_by(15).cloned().collect();
    for it in &sample {
        let dst = tmp.path().join(&it.image);
        std::fs::create_dir_all(dst.parent().unwrap()).map_err(|e| e.to_string())?;
        std::fs::copy(p.cfg.out.join(&it.image), &dst).map_err(|e| e.to_string())?;
    }
    let titled = make_variants(
        &p.cfg.gen_config(),
        tmp.path(),
        &sample,
        &[VariantKind::Titled],
    )
    .map_err(|e| e.to_string())?;
    if titled.len() != sample.len() {
        return Err(format!("{} titled for {} sampled", titled.len(), sample.len()));
    }
    for (b, t) in sample.iter().zip(&titled) {
        let bi = RasterImage::read_png(&tmp.path().join(&b.image)).map_err(|e| e.to_string())?;
        let ti = RasterImage::read_png(&tmp.path().join(&t.image)).map_err(|e| e.to_string())?;
        let bh = banner_height(bi.height());
        if ti.width() != bi.width() || ti.height() != bi.height() + bh {
            return Err(format!("{}: unexpected size", t.id));
        }
        if ti.rows(bh, ti.height()) != bi.rows(0, bi.height()) {
            return Err(format!("{}: content region differs", t.id));
        }
    }
    Ok(format!("{} items pixel-identical below the banner", sample.len()))
}

fn prose() -> impl Strategy<Value = String> {
    "[^{}]{0,60}"
}

fn prose_with_groups() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop_oneof![
            prose(),
            (-9i64..99).prop_map(|n| format!("{{{n}}}")),
            Just("{No}".to_string()),
            Just("{not sure}".to_string()),
        ],
        0..4,
    )
    .prop_map(|v| v.concat())
}

fn parser_suite() -> Outcome {
    const CASES: u32 = 10_000;
    let runner = || {
        TestRunner::new(Config {
            cases: CASES,
            failure_persistence: None,
            ..Config::default()
        })
    };
    runner()
        .run(
            &(prose_with_groups(), any::<i64>(), prose()),
            |(pre, n, post)| {
                let text = format!("{pre}{{{n}}}{post}");
                prop_assert_eq!(parse_answer(&text, AnswerKind::Integer), Some(Answer::Int(n)));
                Ok(())
            },
        )
        .map_err(|e| e.to_string())?;
    runner()
        .run(
            &(prose_with_groups(), any::<bool>(), prose()),
            |(pre, yes, post)| {
                let w = if yes { "Yes" } else { "no" };
                let text = format!("{pre}{{ {w} }}{post}");
                let want = Answer::YesNo(YesNo::from_bool(yes));
                prop_assert_eq!(parse_answer(&text, AnswerKind::YesNo), Some(want));
                Ok(())
            },
        )
        .map_err(|e| e.to_string())?;
    runner()
        .run(&prose(), |text| {
            prop_assert_eq!(parse_answer(&text, AnswerKind::Integer), None);
            prop_assert_eq!(parse_answer(&text, AnswerKind::YesNo), None);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("3 x {CASES} cases"))
}

fn synthetic_bundles(n: usize) -> Vec<PromptBundle> {
    (0..n)
        .map(|i| {
            let gt = 3 + (i % 7) as i64;
            PromptBundle {
                id: format!("s{i}|q1|baseline"),
                item: format!("s{i}"),
                item_id: format!("s{i}"),
                task: Task::GENERATED[i % 5],
                variant: VariantKind::Baseline,
                resolution: 384,
                question: QuestionId::Q1,
                mode: PromptMode::baseline(),
                turns: vec![Turn {
                    purpose: TurnPurpose::Question,
                    parts: vec![Part::Text(format!("Count item {i}."))],
                }],
                expected_kind: AnswerKind::Integer,
                truth: Some(Truth::count(gt, gt + 1)),
            }
        })
        .collect()
}

fn mock_records(model: &MockBiasedModel, n: usize, runs: u32) -> Vec<cfbench::harness::TrialRecord> {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.jsonl");
    let mut store = RunStore::open(&path).unwrap();
    let cfg = RunConfig {
        runs,
        ..RunConfig::default()
    };
    run_eval(&synthetic_bundles(n), model, &cfg, dir.path(), &mut store).unwrap();
    drop(store);
    read_records(&path).unwrap()
}

fn metric_recovery() -> Outcome {
    let start = Instant::now();
    let recs = mock_records(&MockBiasedModel::new(0.75, 0.17, 0).unwrap(), 6000, 1);
    let row = &score(&recs, &[]).rows[0];
    if (row.bias_rate - 0.75).abs() > 0.02 || (row.accuracy - 0.17).abs() > 0.02 {
        return Err(format!("bias {:.4}, accuracy {:.4}", row.bias_rate, row.accuracy));
    }
    let recs5 = mock_records(&MockBiasedModel::new(0.0, 0.2, 0).unwrap(), 2000, 5);
    let pass5 = consistency(&recs5, 5, &[]).map_err(|e| e.to_string())?.rows[0].pass_at_k;
    let want = 1.0 - 0.8f64.powi(5);
    if (pass5 - want).abs() > 0.03 {
        return Err(format!("pass@5 {pass5:.4} vs {want:.4}"));
    }
    let constant = mock_records(&MockBiasedModel::new(1.0, 0.0, 0).unwrap(), 500, 5);
    let agree = consistency(&constant, 5, &[]).map_err(|e| e.to_string())?.rows[0].agreement;
    if agree != 1.0 {
        return Err(format!("agreement {agree}"));
    }
    let t = start.elapsed().as_secs_f64();
    if t >= 30.0 {
        return Err(format!("took {t:.1} s"));
    }
    Ok(format!(
        "bias {:.4}, accuracy {:.4}, pass@5 {pass5:.4}, agreement {agree} in {t:.1} s",
        row.bias_rate, row.accuracy
    ))
}

fn files_under(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(dir).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

fn determinism(a: &Pipeline, b: &Pipeline) -> Outcome {
    let fa = files_under(&a.cfg.out);
    let fb = files_under(&b.cfg.out);
    if fa != fb {
        return Err("the two output trees list different files".into());
    }
    let mut checked = BTreeMap::new();
    for rel in &fa {
        let x = std::fs::read(a.cfg.out.join(rel)).unwrap();
        let y = std::fs::read(b.cfg.out.join(rel)).unwrap();
        if x != y {
            return Err(format!("{} differs", rel.display()));
        }
        let top = rel.components().next().unwrap().as_os_str().to_string_lossy().into_owned();
        *checked.entry(top).or_insert(0) += 1;
    }
    for d in ["manifests", "runs", "reports"] {
        if !checked.contains_key(d) {
            return Err(format!("no {d} files produced"));
        }
    }
    Ok(format!("{} files byte-identical", fa.len()))
}

/// Needs CFBENCH_LIVE_URL and CFBENCH_LIVE_MODEL, plus a token in the
/// variable named by CFBENCH_LIVE_AUTH_ENV (default CFBENCH_LIVE_TOKEN).
fn live_smoke(p: &Pipeline) -> Option<Outcome> {
    let url = std::env::var("CFBENCH_LIVE_URL").ok()?;
    let model = std::env::var("CFBENCH_LIVE_MODEL").ok()?;
    let auth_env =
        std::env::var("CFBENCH_LIVE_AUTH_ENV").unwrap_or_else(|_| "CFBENCH_LIVE_TOKEN".into());
    std::env::var(&auth_env).ok()?;
    let run = || -> Outcome {
        let adapter = EndpointAdapter::new(EndpointConfig {
            model,
            url,
            auth_env,
            temperature: None,
            reasoning_effort: None,
            timeout_secs: 120,
            max_images: 4,
        })
        .map_err(|e| e.to_string())?;
        let items = read_items(&p.cfg.items_manifest()).map_err(|e| e.to_string())?;
        let subset: Vec<StimulusItem> = items
            .iter()
            .filter(|i| i.resolution == 384)
            .step_by(15)
            .take(20)
            .cloned()
            .collect();
        let table = NonNeutralTable::default();
        let ctx = PromptContext {
            seed: 0,
            items: &items,
            references: &[],
            non_neutral: &table,
        };
        let bundles = compile(&subset, &[QuestionId::Q1], &[PromptMode::baseline()], &ctx)
            .map_err(|e| e.to_string())?;
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let path = dir.path().join("live.jsonl");
        let mut store = RunStore::open(&path).map_err(|e| e.to_string())?;
        run_eval(&bundles, &adapter, &RunConfig::default(), &p.cfg.out, &mut store)
            .map_err(|e| e.to_string())?;
        drop(store);
        let recs = read_records(&path).map_err(|e| e.to_string())?;
        let report = build_report(&recs, &ReportOptions::default()).map_err(|e| e.to_string())?;
        let scores = report.table("scores").ok_or("no scores table")?;
        if scores.rows.is_empty() || scores.rows.iter().any(|r| r.len() != scores.headers.len()) {
            return Err("malformed score table".into());
        }
        Ok(format!("{} trials scored", recs.len()))
    };
    Some(run())
}

fn main() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let mut results: Vec<(&str, bool, Outcome)> = Vec::new();
    let mut check = |name: &'static str, gating: bool, f: &dyn Fn() -> Outcome| {
        let r = catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|_| Err("panicked".into()));
        let tag = if r.is_ok() { "PASS" } else { "FAIL" };
        let detail = match &r {
            Ok(s) | Err(s) => s,
        };
        println!("{tag} {name}: {detail}");
        results.push((name, gating, r));
    };

    let a = run_pipeline(&tmp.path().join("a"));
    check("set cardinalities", true, &|| cardinalities(&a));
    check("ground-truth oracle equivalence", true, &|| oracle_equivalence(&a));
    check("grid pattern property", true, &grid_property);
    check("illusion truth coupling", true, &|| illusion_coupling(&a));
    check("resolution contract", true, &|| resolution_contract(&a));
    check("title-injection integrity", true, &|| title_integrity(&a));
    check("parser property suite", true, &parser_suite);
    check("metric recovery", true, &metric_recovery);
    let b = run_pipeline(&tmp.path().join("b"));
    check("determinism", true, &|| determinism(&a, &b));
    match live_smoke(&a) {
        Some(r) => {
            let tag = if r.is_ok() { "PASS" } else { "FAIL" };
            let detail = match &r {
                Ok(s) | Err(s) => s.clone(),
            };
            println!("{tag} live smoke test (not gating): {detail}");
        }
        None => println!(
            "SKIP live smoke test (not gating): set CFBENCH_LIVE_URL, CFBENCH_LIVE_MODEL and a token"
        ),
    }

    let failed: Vec<&str> = results
        .iter()
        .filter(|(_, gating, r)| *gating && r.is_err())
        .map(|(n, _, _)| *n)
        .collect();
    if !failed.is_empty() {
        eprintln!("acceptance failed: {}", failed.join(", "));
        std::process::exit(1);
    }
    println!("acceptance: all {} criteria pass", results.len());
}
