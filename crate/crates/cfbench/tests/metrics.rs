use std::collections::BTreeMap;
use std::time::Instant;

use cfbench::harness::{
    read_records, run_eval, MockBiasedModel, RetryPolicy, RunConfig, RunStore, TrialRecord,
    TrialStatus,
};
use cfbench::metrics::{consistency, score, task_table, GroupKey};
use cfbench::prompts::{Part, PromptBundle, PromptMode, QuestionId, Turn, TurnPurpose};
use cfbench::{Answer, AnswerKind, Task, Truth, VariantKind};
use proptest::prelude::*;

/// Text-only bundles with count truths; the mock never opens images.
fn bundles(n: usize) -> Vec<PromptBundle> {
    (0..n)
        .map(|i| {
            let task = Task::GENERATED[i % 5];
            let gt = 3 + (i % 7) as i64;
            PromptBundle {
                id: format!("item{i}|Q1|baseline"),
                item: format!("item{i}"),
                item_id: format!("item{i}"),
                task,
                variant: VariantKind::Baseline,
                resolution: 384,
                question: QuestionId::Q1,
                mode: PromptMode::baseline(),
                turns: vec![Turn {
                    purpose: TurnPurpose::Question,
                    parts: vec![Part::Text(format!(
                        "How many marks? Answer with a number in curly brackets, e.g., {{9}}. ({i})"
                    ))],
                }],
                expected_kind: AnswerKind::Integer,
                truth: Some(Truth::count(gt, gt + 1)),
            }
        })
        .collect()
}

fn evaluate(model: &MockBiasedModel, n: usize, runs: u32) -> Vec<TrialRecord> {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("runs.jsonl");
    let mut store = RunStore::open(&path).unwrap();
    let cfg = RunConfig {
        runs,
        parallelism: 4,
        retry: RetryPolicy::default(),
    };
    let s = run_eval(&bundles(n), model, &cfg, dir.path(), &mut store).unwrap();
    assert_eq!(s.written, n * runs as usize);
    drop(store);
    read_records(&path).unwrap()
}

/// Reads the last brace group independently of the library parser.
fn final_int(text: &str) -> Option<i64> {
    let open = text.rfind('{')?;
    let close = open + text[open..].find('}')?;
    text[open + 1..close].trim().parse().ok()
}

#[test]
fn mock_rates_are_recovered() {
    let start = Instant::now();
    let model = MockBiasedModel::new(0.75, 0.17, 11).unwrap();
    let recs = evaluate(&model, 6000, 1);
    assert_eq!(recs.len(), 6000);

    let row = &score(&recs, &[]).rows[0];
    assert_eq!(row.n, 6000);
    assert!((row.bias_rate - 0.75).abs() <= 0.02, "bias {}", row.bias_rate);
    assert!((row.accuracy - 0.17).abs() <= 0.02, "accuracy {}", row.accuracy);

    // Same rates tallied straight from the reply texts.
    let (mut hit, mut biased) = (0, 0);
    for r in &recs {
        let got = final_int(&r.response);
        hit += (got == r.truth.as_ref().and_then(Answer::as_int)) as usize;
        biased += (got == r.bias.as_ref().and_then(Answer::as_int)) as usize;
    }
    assert_eq!(hit as f64 / 6000.0, row.accuracy);
    assert_eq!(biased as f64 / 6000.0, row.bias_rate);
    assert!(start.elapsed().as_secs_f64() < 30.0);
}

#[test]
fn pass_at_5_matches_the_binomial() {
    let start = Instant::now();
    let model = MockBiasedModel::new(0.0, 0.2, 3).unwrap();
    let recs = evaluate(&model, 2000, 5);
    let t = consistency(&recs, 5, &[]).unwrap();
    let want = 1.0 - 0.8f64.powi(5);
    let got = t.rows[0].pass_at_k;
    assert!((got - want).abs() <= 0.03, "pass@5 {got} vs {want}");
    assert_eq!(t.rows[0].items, 2000);
    assert!(start.elapsed().as_secs_f64() < 30.0);
}

#[test]
fn constant_answers_agree_exactly() {
    let model = MockBiasedModel::new(1.0, 0.0, 5).unwrap();
    let recs = evaluate(&model, 300, 5);
    let t = consistency(&recs, 5, &[GroupKey::Task]).unwrap();
    assert_eq!(t.rows.len(), 5);
    for r in &t.rows {
        assert_eq!(r.agreement, 1.0);
        assert_eq!(r.pass_at_k, 0.0);
    }
}

#[test]
fn too_few_runs_is_an_error() {
    let model = MockBiasedModel::new(0.5, 0.5, 0).unwrap();
    let recs = evaluate(&model, 10, 2);
    assert!(consistency(&recs, 3, &[]).is_err());
}

fn record(task: Task, bundle: usize, run: u32, parsed: Option<i64>, gt: i64) -> TrialRecord {
    let parsed = parsed.map(Answer::Int);
    let truth = Answer::Int(gt);
    let bias = Answer::Int(gt + 1);
    TrialRecord {
        key: format!("b{bundle}|{run}"),
        bundle: format!("b{bundle}"),
        item: format!("i{bundle}"),
        item_id: format!("i{bundle}"),
        task,
        variant: VariantKind::Baseline,
        resolution: 384,
        question: QuestionId::Q1,
        mode: "baseline".into(),
        model: "m".into(),
        run,
        status: TrialStatus::Ok,
        response: String::new(),
        responses: Vec::new(),
        correct: parsed.as_ref() == Some(&truth),
        bias_match: parsed.as_ref() == Some(&bias),
        parsed,
        truth: Some(truth),
        bias: Some(bias),
        confidence: None,
        latency_ms: None,
        reasoning_tokens: None,
        error: None,
    }
}

/// Per (bundle, run): a reply drawn near the truth, or unparsed.
fn store(k: u32) -> impl Strategy<Value = Vec<TrialRecord>> {
    prop::collection::vec(
        (
            0usize..5,
            prop::collection::vec(prop::option::weighted(0.9, 2i64..6), k as usize),
        ),
        1..40,
    )
    .prop_map(move |units| {
        let mut out = Vec::new();
        for (b, (t, replies)) in units.into_iter().enumerate() {
            for (run, p) in replies.into_iter().enumerate() {
                out.push(record(Task::GENERATED[t], b, run as u32, p, 3));
            }
        }
        out
    })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 256,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn pass_at_1_is_run_zero_accuracy(recs in store(3)) {
        let first: Vec<TrialRecord> = recs.iter().filter(|r| r.run == 0).cloned().collect();
        let p1 = consistency(&recs, 1, &[]).unwrap().rows[0].pass_at_k;
        let acc = score(&first, &[]).rows[0].accuracy;
        prop_assert!((p1 - acc).abs() < 1e-12);
    }

    #[test]
    fn agreement_is_bounded(recs in store(4)) {
        for k in 1..=4usize {
            for r in consistency(&recs, k, &[GroupKey::Task]).unwrap().rows {
                prop_assert!(r.agreement >= 1.0 / k as f64 - 1e-12 && r.agreement <= 1.0 + 1e-12);
                prop_assert!((0.0..=1.0).contains(&r.pass_at_k));
            }
        }
    }

    #[test]
    fn accuracy_plus_bias_at_most_one(recs in store(2)) {
        for r in score(&recs, &[GroupKey::Task, GroupKey::Question]).rows {
            prop_assert!(r.accuracy + r.bias_rate <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn macro_mean_ignores_task_sizes(recs in store(1), copies in 1usize..5) {
        let before = task_table(&recs).models["m"].accuracy_mean();
        // Replicate every record of the first task under new bundle ids.
        let t0 = recs[0].task;
        let mut grown = recs.clone();
        for c in 1..=copies {
            for r in recs.iter().filter(|r| r.task == t0) {
                let mut d = r.clone();
                d.bundle = format!("{}-copy{c}", r.bundle);
                d.key = format!("{}-copy{c}", r.key);
                grown.push(d);
            }
        }
        let after = task_table(&grown).models["m"].accuracy_mean();
        prop_assert!((before.unwrap() - after.unwrap()).abs() < 1e-12);

        // And it is the plain mean of per-task accuracies.
        let mut per: BTreeMap<Task, (usize, usize)> = BTreeMap::new();
        for r in &recs {
            let e = per.entry(r.task).or_default();
            e.0 += r.correct as usize;
            e.1 += 1;
        }
        let want = per.values().map(|(c, n)| *c as f64 / *n as f64).sum::<f64>() / per.len() as f64;
        prop_assert!((before.unwrap() - want).abs() < 1e-12);
    }
}
