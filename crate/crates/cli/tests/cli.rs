mod common;

use std::fs;

use common::*;
use tempfile::tempdir;

#[test]
fn build_tables_writes_every_table() {
    let dir = tempdir().unwrap();
    ok(
        dir.path(),
        &["mock-corpus", "--out", "corpus", "--total", "200", "--seed", "3"],
    );
    ok(dir.path(), &["build-tables", "--seed", "3"]);
    for f in [
        "anonymized.jsonl",
        "combinations.csv",
        "named_entities.csv",
        "skill_relevance.json",
        "entity_mapping.json",
        "canonical_groups.json",
    ] {
        let p = dir.path().join("tables").join(f);
        assert!(p.is_file(), "missing {f}");
        assert!(fs::metadata(&p).unwrap().len() > 0, "empty {f}");
    }
    let anonymized = fs::read_to_string(dir.path().join("tables/anonymized.jsonl")).unwrap();
    assert_eq!(anonymized.lines().count(), 200);
    assert_eq!(csv_rows(&dir.path().join("tables/combinations.csv")).len(), 200);
}

#[test]
fn tables_hold_no_linking_columns() {
    let dir = tempdir().unwrap();
    ok(
        dir.path(),
        &["mock-corpus", "--out", "corpus", "--total", "120", "--seed", "4"],
    );
    ok(dir.path(), &["build-tables", "--seed", "4"]);
    let combos = csv_rows(&dir.path().join("tables/combinations.csv"));
    let keys: Vec<&String> = combos[0].keys().collect();
    assert_eq!(
        keys,
        [
            "education_institutions",
            "job_sector",
            "experience_band",
            "skills",
            "workplaces"
        ]
        .iter()
        .copied()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect::<Vec<_>>()
    );
    let anonymized = fs::read_to_string(dir.path().join("tables/anonymized.jsonl")).unwrap();
    for line in anonymized.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let text = v.to_string();
        assert!(v.get("id").is_none(), "anonymized record carries an id");
        assert!(
            !text.contains("\"institution\""),
            "anonymized record names an institution: {text}"
        );
    }
    for row in csv_rows(&dir.path().join("tables/named_entities.csv")) {
        assert!(row["cv_count"].parse::<usize>().unwrap() >= 5);
    }
}

#[test]
fn corrupt_record_is_an_input_error() {
    let dir = tempdir().unwrap();
    ok(
        dir.path(),
        &["mock-corpus", "--out", "corpus", "--total", "30", "--seed", "5"],
    );
    let victim = dir.path().join("corpus/cvs/cv00004.json");
    let mut cv = read_json(&victim);
    cv["professional_experience"][0]["start_date"] = serde_json::json!("the week after next");
    write_json(&victim, &cv);

    let out = cvsynth(dir.path(), &["build-tables", "--seed", "5"]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("cv00004"), "diagnostic should name the record: {err}");
    assert!(!dir.path().join("tables").exists());
}

#[test]
fn missing_seed_is_an_input_error() {
    let dir = tempdir().unwrap();
    let out = cvsynth(dir.path(), &["build-tables"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("seed"));
}

#[test]
fn stages_out_of_order_are_input_errors() {
    let dir = tempdir().unwrap();
    let out = cvsynth(dir.path(), &["enumerate", "--seed", "1"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("build-tables"));

    ok(
        dir.path(),
        &["mock-corpus", "--out", "corpus", "--total", "60", "--seed", "1"],
    );
    ok(dir.path(), &["build-tables", "--seed", "1"]);
    let out = cvsynth(dir.path(), &["generate", "--seed", "1"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("enumerate"));
}

#[test]
fn conflicting_count_flags_are_rejected() {
    let dir = tempdir().unwrap();
    let out = cvsynth(
        dir.path(),
        &[
            "generate",
            "--seed",
            "1",
            "--per-combo-count",
            "3",
            "--group-fraction",
            "0.5",
        ],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn out_of_range_config_is_rejected() {
    let dir = tempdir().unwrap();
    fs::write(
        dir.path().join("run.json"),
        r#"{"master_seed": 1, "generation": {"skills_cap": 40}}"#,
    )
    .unwrap();
    let out = cvsynth(dir.path(), &["build-tables", "--config", "run.json"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn same_seed_gives_identical_output_and_another_seed_does_not() {
    let a = tempdir().unwrap();
    let b = tempdir().unwrap();
    let c = tempdir().unwrap();
    pipeline(a.path(), 300, 11, &["--min-group", "10"]);
    pipeline(b.path(), 300, 11, &["--min-group", "10"]);
    pipeline(c.path(), 300, 12, &["--min-group", "10"]);
    for sub in ["tables", "output", "rendered"] {
        let ta = tree(&a.path().join(sub));
        assert!(!ta.is_empty());
        assert!(ta == tree(&b.path().join(sub)), "{sub} differs between identical runs");
        assert!(ta != tree(&c.path().join(sub)), "{sub} ignores the seed");
    }
}

#[test]
fn worker_count_does_not_change_the_dataset() {
    let a = tempdir().unwrap();
    pipeline(a.path(), 250, 21, &["--min-group", "10", "--workers", "1"]);
    let one = tree(&a.path().join("output/cvs"));
    ok(
        a.path(),
        &["generate", "--seed", "21", "--min-group", "10", "--workers", "3"],
    );
    assert!(one == tree(&a.path().join("output/cvs")));
}

#[test]
fn config_file_drives_the_run_and_flags_override_it() {
    let dir = tempdir().unwrap();
    fs::write(
        dir.path().join("run.json"),
        r#"{"master_seed": 99, "paths": {"corpus": "ref", "tables": "t", "output": "o"},
            "generation": {"min_group": 10, "count": {"fixed": 2}}}"#,
    )
    .unwrap();
    ok(
        dir.path(),
        &["mock-corpus", "--out", "ref", "--total", "200", "--seed", "8"],
    );
    ok(dir.path(), &["build-tables", "--config", "run.json"]);
    ok(dir.path(), &["enumerate", "--config", "run.json"]);
    ok(dir.path(), &["generate", "--config", "run.json", "--seed", "5"]);

    let report = read_json(&dir.path().join("o/generation_report.json"));
    assert_eq!(report["master_seed"], 5);
    assert_eq!(report["config"]["generation"]["min_group"], 10);
    for combo in report["combinations"].as_array().unwrap() {
        assert_eq!(combo["requested"], 2);
        assert!(combo["produced"].as_u64().unwrap() <= 2);
        assert!(combo["reference_count"].as_u64().unwrap() >= 10);
    }
}

#[test]
fn report_bookkeeping_is_consistent() {
    let dir = tempdir().unwrap();
    pipeline(dir.path(), 300, 13, &["--min-group", "10"]);
    let report = read_json(&dir.path().join("output/generation_report.json"));
    let mut produced = 0;
    for combo in report["combinations"].as_array().unwrap() {
        let rejected: u64 = combo["rejections"]
            .as_object()
            .unwrap()
            .values()
            .map(|v| v.as_u64().unwrap())
            .sum();
        assert_eq!(
            combo["attempts"].as_u64().unwrap(),
            combo["produced"].as_u64().unwrap() + rejected
        );
        produced += combo["produced"].as_u64().unwrap();
    }
    assert_eq!(report["totals"]["produced"].as_u64().unwrap(), produced);
    let manifest = read_json(&dir.path().join("output/manifest.json"));
    assert_eq!(manifest.as_array().unwrap().len() as u64, produced);
    let text = fs::read_to_string(dir.path().join("output/generation_report.txt")).unwrap();
    assert!(!text.is_empty());
    assert_eq!(
        fs::read_dir(dir.path().join("rendered")).unwrap().count() as u64,
        produced
    );
}

#[test]
fn unreachable_threshold_gives_empty_plan_and_dataset() {
    let dir = tempdir().unwrap();
    ok(
        dir.path(),
        &["mock-corpus", "--out", "corpus", "--total", "80", "--seed", "2"],
    );
    ok(dir.path(), &["build-tables", "--seed", "2"]);
    ok(dir.path(), &["enumerate", "--seed", "2", "--min-group", "100000"]);
    assert_eq!(read_json(&dir.path().join("output/params.json")), serde_json::json!([]));

    ok(dir.path(), &["generate", "--seed", "2", "--min-group", "100000"]);
    assert_eq!(
        read_json(&dir.path().join("output/manifest.json")),
        serde_json::json!([])
    );
    let report = read_json(&dir.path().join("output/generation_report.json"));
    assert_eq!(report["totals"]["combinations"], 0);
    assert_eq!(report["totals"]["produced"], 0);
    assert_eq!(report["totals"]["requested"], 0);

    let out = cvsynth(dir.path(), &["validate", "--seed", "2"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("empty"));
}

#[test]
fn regenerating_replaces_the_previous_dataset() {
    let dir = tempdir().unwrap();
    pipeline(dir.path(), 250, 17, &["--min-group", "10"]);
    let stale = dir.path().join("output/cvs/stale.json");
    fs::write(&stale, "{}").unwrap();
    ok(
        dir.path(),
        &[
            "generate",
            "--seed",
            "17",
            "--min-group",
            "10",
            "--per-combo-count",
            "1",
        ],
    );
    assert!(!stale.exists());
    let manifest = read_json(&dir.path().join("output/manifest.json"));
    let files = fs::read_dir(dir.path().join("output/cvs")).unwrap().count();
    assert_eq!(manifest.as_array().unwrap().len(), files);
}

#[test]
fn validate_passes_on_clean_output_and_flags_a_planted_near_match() {
    let dir = tempdir().unwrap();
    pipeline(dir.path(), 600, 19, &[]);
    let out = cvsynth(dir.path(), &["validate", "--seed", "19"]);
    let report = read_json(&dir.path().join("report/validation.json"));
    assert_eq!(report["privacy"], serde_json::json!([]));
    assert_eq!(code(&out), if report["passed"] == true { 0 } else { 1 });
    assert!(dir.path().join("report/validation.txt").is_file());
    assert!(dir.path().join("report/histograms").is_dir());

    let id = plant_near_match(&dir.path().join("tables"), &dir.path().join("output"));
    let out = cvsynth(dir.path(), &["validate", "--seed", "19"]);
    assert_eq!(code(&out), 1);
    let report = read_json(&dir.path().join("report/validation.json"));
    let privacy = report["privacy"].as_array().unwrap();
    assert_eq!(privacy.len(), 1, "{privacy:?}");
    assert_eq!(privacy[0]["kind"], "near_match");
    assert_eq!(privacy[0]["cv"], id.as_str());
    assert_eq!(privacy[0]["distance"], 1);
}

#[test]
fn render_rewrites_markdown_from_the_dataset() {
    let dir = tempdir().unwrap();
    pipeline(dir.path(), 250, 23, &["--min-group", "10"]);
    let before = tree(&dir.path().join("rendered"));
    fs::remove_dir_all(dir.path().join("rendered")).unwrap();
    ok(dir.path(), &["render", "--seed", "23"]);
    let after = tree(&dir.path().join("rendered"));
    assert!(before == after);
    let sample = String::from_utf8(after.values().next().unwrap().clone()).unwrap();
    assert!(sample.starts_with("# Curriculum Vitae\n\n## Education\n"));
    assert!(sample.contains("## Professional Experience"));
    assert!(sample.contains("## Skills"));
}

#[test]
fn jsonl_corpus_is_accepted() {
    let dir = tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "mock-corpus",
            "--out",
            "ref.jsonl",
            "--jsonl",
            "--total",
            "150",
            "--seed",
            "6",
        ],
    );
    ok(dir.path(), &["build-tables", "--seed", "6", "--corpus", "ref.jsonl"]);
    let anonymized = fs::read_to_string(dir.path().join("tables/anonymized.jsonl")).unwrap();
    assert_eq!(anonymized.lines().count(), 150);
}
