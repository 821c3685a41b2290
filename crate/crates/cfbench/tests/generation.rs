mod support;

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use cfbench::gen::grids::{self, cell_bbox, GridParams, GridStyle};
use cfbench::gen::illusions::{measured_difference, oracle_truth};
use cfbench::gen::{
    build_scene, enumerate_references, enumerate_task, oracle_answer, GenConfig, ItemSpec,
};
use cfbench::scene::{count_tagged_within, serialize_svg};
use cfbench::{Task, TaskParams, YesNo};
use support::{grid_formula, svg_count_in_cell, verify_truth};

/// One spec per scene; resolutions share a scene.
fn distinct(specs: Vec<ItemSpec>) -> Vec<ItemSpec> {
    let mut seen = std::collections::HashSet::new();
    specs
        .into_iter()
        .filter(|s| seen.insert(s.item_id.clone()))
        .collect()
}

#[test]
fn default_set_cardinalities() {
    let cfg = GenConfig::default();
    let want = [
        (Task::Flags, 120),
        (Task::ChessPieces, 144),
        (Task::GameBoards, 84),
        (Task::Illusions, 396),
        (Task::Grids, 168),
    ];
    let mut total = 0;
    for (task, n) in want {
        let specs = enumerate_task(&cfg, task).unwrap();
        assert_eq!(specs.len(), n, "{task}");
        let ids: std::collections::HashSet<_> = specs
            .iter()
            .map(|s| (s.item_id.clone(), s.resolution))
            .collect();
        assert_eq!(ids.len(), n, "{task}: duplicate (item, resolution)");
        total += specs.len();
    }
    assert_eq!(total, 912);
}

#[test]
fn grid_pattern_property_exhaustive() {
    let start = Instant::now();
    for g in grids::MIN_G..=grids::MAX_G {
        for style in [GridStyle::Dice, GridStyle::Tally] {
            let (scene, _) = grids::generate_grid(&GridParams {
                g,
                style,
                anomaly: None,
            })
            .unwrap();
            let svg = serialize_svg(&scene);
            let mut max = 0;
            for r in 0..g {
                for c in 0..g {
                    let want = grid_formula(r, c, g);
                    let got =
                        count_tagged_within(&scene, style.tag(), cell_bbox(r, c)).unwrap() as i64;
                    assert_eq!(got, want, "G={g} {style:?} cell ({r},{c})");
                    assert_eq!(svg_count_in_cell(&svg, style.tag(), r, c), want);
                    max = max.max(got);
                }
            }
            assert_eq!(max, (g as i64 + 1) / 2, "G={g}");
        }
    }
    let took = start.elapsed();
    assert!(took.as_secs_f64() < 1.0, "took {took:?}");
}

#[test]
fn illusion_truth_coupling_exhaustive() {
    let cfg = GenConfig::default();
    let specs = distinct(enumerate_task(&cfg, Task::Illusions).unwrap());
    assert_eq!(specs.len(), 132);
    for s in &specs {
        let TaskParams::Illusion(p) = &s.params else {
            panic!("{}: not an illusion", s.item_id)
        };
        let scene = build_scene(&s.params, &cfg).unwrap();
        let d = measured_difference(p.kind, &scene).unwrap();
        let (yn, _) = oracle_truth(p.kind, &scene).unwrap();
        let gt = &s.truth.primary.answer;
        if p.difference == 0.0 {
            assert!(d < 1e-9, "{}: measured {d}", s.item_id);
            assert_eq!(*gt, cfbench::Answer::yes(), "{}", s.item_id);
        } else {
            assert!(
                (d - p.difference.abs()).abs() < 1e-9,
                "{}: measured {d}, declared {}",
                s.item_id,
                p.difference
            );
            assert_eq!(*gt, cfbench::Answer::no(), "{}", s.item_id);
        }
        assert_eq!(cfbench::Answer::YesNo(yn), *gt);
    }
}

#[test]
fn every_default_item_matches_both_oracles() {
    let cfg = GenConfig::default();
    let mut per_task: BTreeMap<Task, usize> = BTreeMap::new();
    for task in Task::GENERATED {
        let refs = distinct(enumerate_references(&cfg, task).unwrap());
        let ref_svgs: HashMap<String, String> = refs
            .iter()
            .map(|r| {
                let scene = build_scene(&r.params, &cfg).unwrap();
                (r.item_id.clone(), serialize_svg(&scene))
            })
            .collect();
        let specs = distinct(enumerate_task(&cfg, task).unwrap());
        for s in specs.iter().chain(&refs) {
            let scene = build_scene(&s.params, &cfg).unwrap();
            // Scene-graph route.
            let got = oracle_answer(&s.params, &scene).unwrap();
            assert_eq!(got, s.truth.primary.answer, "{}", s.item_id);
            // SVG route plus the GT/bias rule.
            let svg = serialize_svg(&scene);
            let reference = s.reference.as_ref().map(|id| {
                ref_svgs
                    .get(id)
                    .unwrap_or_else(|| panic!("{}: unknown reference {id}", s.item_id))
                    .as_str()
            });
            verify_truth(&s.item_id, &s.params, &s.truth, &svg, reference).unwrap();
        }
        per_task.insert(task, specs.len());
    }
    assert_eq!(per_task[&Task::Flags], 40);
    assert_eq!(per_task[&Task::Grids], 56);
}

#[test]
fn counterfactual_q3_is_no() {
    let cfg = GenConfig::default();
    for task in Task::GENERATED {
        for s in enumerate_task(&cfg, task).unwrap() {
            if let TaskParams::Illusion(p) = &s.params {
                if p.difference == 0.0 {
                    continue;
                }
            }
            assert_eq!(
                s.truth.q3.answer,
                cfbench::Answer::YesNo(YesNo::No),
                "{}",
                s.item_id
            );
        }
    }
}

#[test]
fn enumeration_is_seed_deterministic() {
    let a = GenConfig::default();
    let b = GenConfig {
        seed: 1,
        ..GenConfig::default()
    };
    for task in Task::GENERATED {
        let x = enumerate_task(&a, task).unwrap();
        assert_eq!(x, enumerate_task(&a, task).unwrap(), "{task}");
        assert_eq!(x.len(), enumerate_task(&b, task).unwrap().len(), "{task}");
    }
}

#[test]
fn svg_route_rejects_tampered_truths() {
    let cfg = GenConfig::default();
    for task in Task::GENERATED {
        let refs = distinct(enumerate_references(&cfg, task).unwrap());
        let s = distinct(enumerate_task(&cfg, task).unwrap()).remove(1);
        let svg = serialize_svg(&build_scene(&s.params, &cfg).unwrap());
        let reference = s.reference.as_ref().map(|id| {
            let r = refs.iter().find(|r| &r.item_id == id).unwrap();
            serialize_svg(&build_scene(&r.params, &cfg).unwrap())
        });
        let mut bad = s.truth.clone();
        bad.primary.answer = match &bad.primary.answer {
            cfbench::Answer::Int(n) => cfbench::Answer::Int(n + 2),
            cfbench::Answer::YesNo(v) => cfbench::Answer::YesNo(v.flip()),
            other => other.clone(),
        };
        assert!(
            verify_truth(&s.item_id, &s.params, &bad, &svg, reference.as_deref()).is_err(),
            "{task}"
        );
        let mut bad = s.truth.clone();
        bad.q3.answer = match &bad.q3.answer {
            cfbench::Answer::YesNo(v) => cfbench::Answer::YesNo(v.flip()),
            other => other.clone(),
        };
        assert!(verify_truth(&s.item_id, &s.params, &bad, &svg, reference.as_deref()).is_err());
    }
}
