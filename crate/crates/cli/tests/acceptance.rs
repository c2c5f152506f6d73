//! End-to-end acceptance checks. Runs without the libtest harness so each
//! criterion prints one PASS/FAIL line even when everything passes.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Weibull};
use serde_json::Value;

use common::*;
use cvsynth_core::contentgen::{enumerate_plausible_params, read_dataset};
use cvsynth_core::corpus::io::IngestOptions;
use cvsynth_core::corpus::{
    item_duration_months, parse_date, repair_education_durations, validate_cv, Attribute, DateValue,
    DemographicProfile, EducationClassifier, EducationItem, EducationKind, ExperienceBand, Gender, JobSector, ParsedCV,
    RepairPolicy, YearMonth,
};
use cvsynth_core::structgen::{fit_weibull, sample, FitMethod, WeibullDist};
use cvsynth_core::tables::AnonymizedCvRecord;
use cvsynth_core::validate::{js_divergence, CategoricalDistribution};

const SEED: u64 = 7;
const CORPUS_SIZE: usize = 1000;
const MIN_GROUP: usize = 20;
const TIME_LIMIT: Duration = Duration::from_secs(300);

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ym(y: i32, m: u32) -> YearMonth {
    YearMonth::new(y, m).unwrap()
}

// -- shared run ---------------------------------------------------------

struct Run {
    _a: tempfile::TempDir,
    _b: tempfile::TempDir,
    a: std::path::PathBuf,
    b: std::path::PathBuf,
    elapsed: [Duration; 2],
}

fn full_run() -> Run {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut elapsed = [Duration::ZERO; 2];
    for (i, dir) in [a.path(), b.path()].into_iter().enumerate() {
        let start = Instant::now();
        pipeline(dir, CORPUS_SIZE, SEED, &[]);
        elapsed[i] = start.elapsed();
    }
    Run {
        a: a.path().to_path_buf(),
        b: b.path().to_path_buf(),
        _a: a,
        _b: b,
        elapsed,
    }
}

// -- oracles ------------------------------------------------------------

/// Column of `demographics.csv` holding an attribute.
fn column(attribute: &str) -> &'static str {
    match attribute {
        "Age" => "age",
        "Gender" => "gender",
        "LGBTQ+" => "lgbtq",
        "Minority" => "minority",
        "Perceived foreign" => "foreign",
        "Religion" => "religion",
        "Disability condition" => "disability",
        other => panic!("unknown attribute {other}"),
    }
}

/// Reference CVs matching a parameter set, counted straight from the corpus sidecar.
fn reference_group_size(rows: &[BTreeMap<String, String>], params: &Value) -> usize {
    rows.iter()
        .filter(|r| {
            r["job_sector"] == params["job_sector"].as_str().unwrap()
                && band_of(r["experience_years"].parse().unwrap()) == params["experience_band"].as_str().unwrap()
                && params["demographics"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .all(|p| r[column(p["attribute"].as_str().unwrap())] == p["value"].as_str().unwrap())
        })
        .count()
}

/// Base-2 Jensen-Shannon divergence straight from the definition.
fn jsd_direct(p: &[f64], q: &[f64]) -> f64 {
    let kl = |a: &[f64], m: &[f64]| -> f64 {
        a.iter()
            .zip(m)
            .filter(|(x, _)| **x > 0.0)
            .map(|(x, y)| x * (x / y).log2())
            .sum()
    };
    let m: Vec<f64> = p.iter().zip(q).map(|(x, y)| (x + y) / 2.0).collect();
    0.5 * kl(p, &m) + 0.5 * kl(q, &m)
}

fn jsd_of_counts(reference: &BTreeMap<String, f64>, synthetic: &BTreeMap<String, f64>) -> f64 {
    let keys: BTreeSet<&String> = reference.keys().chain(synthetic.keys()).collect();
    let rt: f64 = reference.values().sum();
    let st: f64 = synthetic.values().sum();
    let p: Vec<f64> = keys
        .iter()
        .map(|k| reference.get(*k).copied().unwrap_or(0.0) / rt)
        .collect();
    let q: Vec<f64> = keys
        .iter()
        .map(|k| synthetic.get(*k).copied().unwrap_or(0.0) / st)
        .collect();
    jsd_direct(&p, &q)
}

fn band_cap(band: &str) -> u32 {
    match band {
        "4 years or less" => 48,
        "5-9 years" => 108,
        "10-14 years" => 168,
        "15+ years" => 480,
        other => panic!("unknown band {other}"),
    }
}

// -- criteria -----------------------------------------------------------

fn criterion_1(run: &Run) -> Outcome {
    for sub in ["tables", "output", "rendered"] {
        let a = tree(&run.a.join(sub));
        let b = tree(&run.b.join(sub));
        check(!a.is_empty(), || format!("{sub} is empty"))?;
        check(a == b, || format!("{sub} differs between the two runs"))?;
    }
    let slowest = run.elapsed.iter().max().unwrap();
    check(*slowest <= TIME_LIMIT, || format!("a run took {slowest:?}"))?;
    let files = tree(&run.a.join("output")).len();
    Ok(format!(
        "{files} output files byte-identical; runs took {:.1}s and {:.1}s",
        run.elapsed[0].as_secs_f64(),
        run.elapsed[1].as_secs_f64()
    ))
}

fn criterion_2(run: &Run) -> Outcome {
    let dir = &run.a;
    let out = cvsynth(dir, &["validate", "--seed", &SEED.to_string()]);
    let report = read_json(&dir.join("report/validation.json"));
    let privacy = report["privacy"].as_array().unwrap();
    check(privacy.is_empty(), || {
        format!("{} privacy violations: {privacy:?}", privacy.len())
    })?;
    check(code(&out) == 0, || format!("validate exited {}", code(&out)))?;

    let entities = csv_rows(&dir.join("tables/named_entities.csv"));
    check(!entities.is_empty(), || "no named-entity records".into())?;
    let smallest = entities
        .iter()
        .map(|r| r["cv_count"].parse::<usize>().unwrap())
        .min()
        .unwrap();
    check(smallest >= 5, || format!("named-entity group of {smallest}"))?;

    let rows = csv_rows(&dir.join("corpus/demographics.csv"));
    let manifest = read_json(&dir.join("output/manifest.json"));
    let mut groups: BTreeMap<String, usize> = BTreeMap::new();
    for entry in manifest.as_array().unwrap() {
        let params = &entry["provenance"]["params"];
        let key = params.to_string();
        groups.entry(key).or_insert_with(|| reference_group_size(&rows, params));
    }
    let below = groups.values().filter(|&&n| n < MIN_GROUP).count();
    check(below == 0, || {
        format!("{below} generated combinations have fewer than {MIN_GROUP} references")
    })?;
    let report_gen = read_json(&dir.join("output/generation_report.json"));
    for c in report_gen["combinations"].as_array().unwrap() {
        if c["reference_count"].as_u64().unwrap() < MIN_GROUP as u64 {
            check(c["produced"] == 0, || {
                format!("combination {} produced output", c["label"])
            })?;
        }
    }

    let planted = tempfile::tempdir().unwrap();
    for sub in ["corpus", "tables", "output"] {
        copy_dir(&dir.join(sub), &planted.path().join(sub));
    }
    let id = plant_near_match(&planted.path().join("tables"), &planted.path().join("output"));
    let out = cvsynth(planted.path(), &["validate", "--seed", &SEED.to_string()]);
    let report = read_json(&planted.path().join("report/validation.json"));
    let privacy = report["privacy"].as_array().unwrap();
    check(code(&out) == 1, || {
        format!("validate exited {} on the planted dataset", code(&out))
    })?;
    check(privacy.len() == 1, || {
        format!("planted dataset gave {} violations", privacy.len())
    })?;
    check(
        privacy[0]["kind"] == "near_match" && privacy[0]["cv"] == id.as_str(),
        || format!("unexpected violation {}", privacy[0]),
    )?;
    Ok(format!(
        "0 violations over {} CVs; min named-entity cv_count {smallest}; {} generated groups all >= {MIN_GROUP}; planted near-match caught alone",
        report["synthetic_cvs"].as_u64().unwrap() - 1,
        groups.len()
    ))
}

fn copy_dir(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for entry in fs::read_dir(from).unwrap() {
        let path = entry.unwrap().path();
        let target = to.join(path.file_name().unwrap());
        if path.is_dir() {
            copy_dir(&path, &target);
        } else {
            fs::copy(&path, &target).unwrap();
        }
    }
}

fn criterion_3(run: &Run) -> Outcome {
    let dir = &run.a;
    let report = read_json(&dir.join("report/validation.json"));
    let synthetic = report["synthetic_cvs"].as_u64().unwrap();
    check(synthetic >= 1000, || format!("only {synthetic} synthetic CVs"))?;

    let rows = csv_rows(&dir.join("corpus/demographics.csv"));
    let manifest = read_json(&dir.join("output/manifest.json"));
    let entries = manifest.as_array().unwrap();
    let sectors: BTreeSet<&str> = entries
        .iter()
        .map(|e| e["provenance"]["params"]["job_sector"].as_str().unwrap())
        .collect();
    check(sectors.len() >= 4, || format!("only {} sectors", sectors.len()))?;

    // recompute every divergence from the raw files
    let mut worst = (String::new(), 0.0f64);
    let mut gender = f64::NAN;
    for score in report["variables"].as_array().unwrap() {
        let var = score["variable"].as_str().unwrap();
        let mut reference: BTreeMap<String, f64> = BTreeMap::new();
        let mut synth: BTreeMap<String, f64> = BTreeMap::new();
        for r in &rows {
            let v = match var {
                "job_sector" => r["job_sector"].clone(),
                "experience_band" => band_of(r["experience_years"].parse().unwrap()).to_string(),
                other => r[other].clone(),
            };
            if !v.is_empty() {
                *reference.entry(v).or_default() += 1.0;
            }
        }
        for e in entries {
            let params = &e["provenance"]["params"];
            let v = match var {
                "job_sector" | "experience_band" => params[var].as_str().map(str::to_string),
                other => params["demographics"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .find(|p| column(p["attribute"].as_str().unwrap()) == other)
                    .map(|p| p["value"].as_str().unwrap().to_string()),
            };
            if let Some(v) = v {
                *synth.entry(v).or_default() += 1.0;
            }
        }
        let reported = score["js"].as_f64();
        if synth.is_empty() {
            check(reported.is_none(), || format!("{var} scored without synthetic values"))?;
            continue;
        }
        let js = jsd_of_counts(&reference, &synth);
        let reported = reported.ok_or_else(|| format!("{var} has no score"))?;
        check((js - reported).abs() < 1e-9, || {
            format!("{var}: report says {reported}, oracle {js}")
        })?;
        let ceiling = if var == "gender" { 0.05 } else { 0.30 };
        check(js <= ceiling, || format!("{var}: JS {js:.4} above {ceiling}"))?;
        if var == "gender" {
            gender = js;
        }
        if js > worst.1 {
            worst = (var.to_string(), js);
        }
    }
    check(!gender.is_nan(), || "gender was never scored".into())?;
    Ok(format!(
        "{synthetic} CVs over {} sectors; max JS {:.4} ({}); gender {gender:.4}",
        sectors.len(),
        worst.1,
        worst.0
    ))
}

fn structural_violations(cv: &ParsedCV, band: &str, now: YearMonth) -> Vec<String> {
    let mut errs = Vec::new();
    let report = validate_cv(cv, true);
    if !report.is_clean() {
        errs.push(format!("strict validation: {:?}", report.violations));
    }
    let classifier = EducationClassifier::default();
    let edu = &cv.education_background;
    let kinds: Vec<EducationKind> = edu.iter().map(|e| classifier.classify(&e.degree)).collect();
    let count = |k: EducationKind| kinds.iter().filter(|&&x| x == k).count();
    if count(EducationKind::Vocational) > 0 {
        if edu.len() != 1 {
            errs.push("vocational item alongside others".into());
        }
    } else {
        let caps = [
            (EducationKind::Bachelor, 1, 1),
            (EducationKind::Abroad, 0, 1),
            (EducationKind::Master, 0, 2),
            (EducationKind::PhD, 0, 1),
            (EducationKind::Other, 0, 0),
        ];
        for (kind, lo, hi) in caps {
            let n = count(kind);
            if n < lo || n > hi {
                errs.push(format!("{n} items of kind {kind:?}"));
            }
        }
        if let Some(b) = kinds.iter().position(|&k| k == EducationKind::Bachelor) {
            let bachelor_end = edu[b].end_date.resolve(now);
            let masters: Vec<&EducationItem> = edu
                .iter()
                .zip(&kinds)
                .filter(|(_, &k)| k == EducationKind::Master)
                .map(|(e, _)| e)
                .collect();
            for m in &masters {
                if m.start_date <= bachelor_end {
                    errs.push(format!("master {} starts before the bachelor ends", m.degree));
                }
            }
            if masters.len() == 2 {
                let (x, y) = (masters[0], masters[1]);
                let (first, second) = if x.start_date <= y.start_date { (x, y) } else { (y, x) };
                if second.start_date < first.end_date.resolve(now) {
                    errs.push("masters overlap".into());
                }
            }
            let last_master_end = masters.iter().map(|m| m.end_date.resolve(now)).max();
            for (e, _) in edu.iter().zip(&kinds).filter(|(_, &k)| k == EducationKind::PhD) {
                let ok = match last_master_end {
                    Some(end) => e.start_date >= end,
                    None => e.start_date > bachelor_end,
                };
                if !ok {
                    errs.push("PhD starts before the preceding degree ends".into());
                }
            }
            for (e, _) in edu.iter().zip(&kinds).filter(|(_, &k)| k == EducationKind::Abroad) {
                let inside = edu.iter().zip(&kinds).any(|(d, &k)| {
                    k != EducationKind::Abroad
                        && e.start_date >= d.start_date
                        && e.end_date.resolve(now) <= d.end_date.resolve(now)
                });
                if !inside {
                    errs.push("abroad item outside every degree".into());
                }
            }
        }
    }

    let exp = &cv.professional_experience;
    let mut total = 0u32;
    for (i, e) in exp.iter().enumerate() {
        let end = e.end_date.resolve(now);
        let months = (end.year() - e.start_date.year()) * 12 + end.month() as i32 - e.start_date.month() as i32;
        if months < 0 || months as u32 != e.duration_months {
            errs.push(format!(
                "experience {i}: duration {} vs dates {months}",
                e.duration_months
            ));
        }
        total += months.max(0) as u32;
        if i > 0 && e.start_date < exp[i - 1].end_date.resolve(now) {
            errs.push(format!("experience {i} starts before its predecessor ends"));
        }
    }
    if total > band_cap(band) {
        errs.push(format!("{total} months of experience in band {band}"));
    }
    let skills = cv.skills.hard.len() + cv.skills.soft.len() + cv.skills.languages.len() + cv.skills.others.len();
    if !(1..=12).contains(&skills) {
        errs.push(format!("{skills} skills"));
    }
    errs
}

fn criterion_4(run: &Run) -> Outcome {
    let opts = IngestOptions::default();
    let mut checked = 0;
    let seeds = [1u64, 2, 3, 4, 5];
    for seed in seeds {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        fs::create_dir_all(&out).unwrap();
        fs::copy(run.a.join("output/params.json"), out.join("params.json")).unwrap();
        let tables = run.a.join("tables");
        ok(
            dir.path(),
            &[
                "generate",
                "--seed",
                &seed.to_string(),
                "--tables",
                tables.to_str().unwrap(),
                "--output",
                "out",
            ],
        );
        let cvs = read_dataset(&out, &opts).map_err(|e| format!("seed {seed}: {e}"))?;
        check(!cvs.is_empty(), || format!("seed {seed} produced nothing"))?;
        for s in &cvs {
            let errs = structural_violations(&s.cv, s.provenance.params.experience_band.as_str(), opts.now);
            check(errs.is_empty(), || {
                format!("seed {seed}, {}: {}", s.id, errs.join("; "))
            })?;
        }
        checked += cvs.len();
    }
    Ok(format!(
        "{checked} CVs over {} seeds all structurally valid",
        seeds.len()
    ))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let truth = Weibull::new(4.0, 1.5).unwrap();
    let samples: Vec<f64> = (0..2000).map(|_| truth.sample(&mut rng)).collect();
    let fit = fit_weibull(&samples).map_err(|e| e.to_string())?;
    let shape_err = (fit.shape - 1.5).abs() / 1.5;
    let scale_err = (fit.scale - 4.0).abs() / 4.0;
    check(shape_err <= 0.10 && scale_err <= 0.10, || {
        format!("fit shape {:.4} scale {:.4}", fit.shape, fit.scale)
    })?;

    let flat = fit_weibull(&[3.0; 40]).map_err(|e| e.to_string())?;
    check(
        flat.method == FitMethod::Degenerate && flat.degenerate_point == Some(3.0),
        || format!("zero-variance fit gave {flat:?}"),
    )?;

    let mut negatives = 0;
    let dists = [
        fit.clone(),
        WeibullDist::new(0.2, 0.5).unwrap(),
        WeibullDist::new(40.0, 100.0).unwrap(),
    ];
    let draws = 1_000_000;
    for i in 0..draws {
        let x = sample(&dists[i % dists.len()], &mut rng);
        if x.is_nan() || x < 0.0 {
            negatives += 1;
        }
    }
    check(negatives == 0, || format!("{negatives} negative or NaN draws"))?;
    Ok(format!(
        "fit shape {:.3} ({:.1}%), scale {:.3} ({:.1}%); degenerate point 3; {draws} draws non-negative",
        fit.shape,
        shape_err * 100.0,
        fit.scale,
        scale_err * 100.0
    ))
}

fn distribution(probs: Vec<f64>) -> CategoricalDistribution {
    let cats = (0..probs.len()).map(|i| format!("c{i}")).collect();
    CategoricalDistribution::new("x", cats, probs).unwrap()
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let k = rng.random_range(2..=12);
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            let mut w: Vec<f64> = (0..k)
                .map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random::<f64>() })
                .collect();
            if w.iter().all(|&x| x == 0.0) {
                w[0] = 1.0;
            }
            let t: f64 = w.iter().sum();
            w.iter().map(|x| x / t).collect()
        };
        let (p, q) = (draw(&mut rng), draw(&mut rng));
        let got = js_divergence(&distribution(p.clone()), &distribution(q.clone())).map_err(|e| e.to_string())?;
        worst = worst.max((got - jsd_direct(&p, &q)).abs());
    }
    check(worst <= 1e-12, || format!("max deviation {worst:e}"))?;

    let p = distribution(vec![0.1, 0.2, 0.3, 0.4]);
    let same = js_divergence(&p, &p).map_err(|e| e.to_string())?;
    check(same == 0.0, || format!("JSD(p,p) = {same}"))?;
    let a = distribution(vec![0.5, 0.5, 0.0, 0.0]);
    let b = distribution(vec![0.0, 0.0, 0.25, 0.75]);
    let disjoint = js_divergence(&a, &b).map_err(|e| e.to_string())?;
    check(disjoint == 1.0, || format!("disjoint JSD = {disjoint}"))?;
    Ok(format!("1000 pairs within {worst:.1e}; JSD(p,p) = 0; disjoint = 1"))
}

fn criterion_7() -> Outcome {
    let now = ym(2024, 6);
    let start = match parse_date("Jan 2022").map_err(|e| e.to_string())? {
        DateValue::Month(m) => m,
        other => return Err(format!("parsed {other:?}")),
    };
    let end = parse_date("Dec 2023").map_err(|e| e.to_string())?;
    let months = item_duration_months(start, end, now).map_err(|e| e.to_string())?;
    check(months == 23, || format!("duration {months}"))?;

    let item = |kind: EducationKind, start: YearMonth, len: i64| EducationItem {
        degree: format!("{kind:?}"),
        institution: None,
        start_date: start,
        end_date: DateValue::Month(start.plus_months(len)),
        kind,
    };
    let policy = RepairPolicy::default();
    let len = |e: &EducationItem| item_duration_months(e.start_date, e.end_date, now).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let kinds = [
        EducationKind::PhD,
        EducationKind::Master,
        EducationKind::Bachelor,
        EducationKind::Abroad,
        EducationKind::Vocational,
    ];
    for _ in 0..500 {
        let items: Vec<EducationItem> = (0..rng.random_range(1..6))
            .map(|_| {
                let kind = kinds[rng.random_range(0..kinds.len())];
                item(
                    kind,
                    ym(rng.random_range(1990..2020), rng.random_range(1..=12)),
                    rng.random_range(0..60),
                )
            })
            .collect();
        let once = repair_education_durations(&items, &policy);
        let twice = repair_education_durations(&once, &policy);
        check(once == twice, || "repair is not idempotent".into())?;
        for (before, after) in items.iter().zip(&once) {
            let floor = match after.kind {
                EducationKind::PhD => 36,
                EducationKind::Master => 9,
                _ => 0,
            };
            check(len(after) >= floor, || {
                format!("{:?} left at {} months", after.kind, len(after))
            })?;
            check(
                len(after) >= len(before) && after.start_date == before.start_date,
                || "repair shortened or moved an item".into(),
            )?;
            if len(before) >= policy.minimum(after.kind).unwrap_or(0) {
                check(before == after, || "repair touched an item that was long enough".into())?;
            }
        }
    }
    Ok(
        "Jan 2022 to Dec 2023 is 23 months; 500 random sections repaired to PhD >= 36, Master >= 9, idempotently"
            .into(),
    )
}

fn team(n: usize, sector: JobSector, band: ExperienceBand, gender: Gender) -> Vec<AnonymizedCvRecord> {
    (0..n)
        .map(|_| {
            let mut profile = DemographicProfile::new(sector, band);
            profile.gender = Some(gender);
            AnonymizedCvRecord {
                cv: ParsedCV::default(),
                profile,
            }
        })
        .collect()
}

fn criterion_8(run: &Run) -> Outcome {
    let mut fixture = team(20, JobSector::Ict, ExperienceBand::UpTo4, Gender::Woman);
    fixture.extend(team(19, JobSector::Sales, ExperienceBand::From5To9, Gender::Man));
    let found = enumerate_plausible_params(&fixture, 20);
    let has = |sector: JobSector, gender: &str| {
        found.iter().any(|c| {
            c.params.job_sector == sector
                && c.params.demographics.len() == 1
                && c.params.demographics[0].attribute == Attribute::Gender
                && c.params.demographics[0].value == gender
        })
    };
    check(has(JobSector::Ict, "Woman"), || "group of 20 excluded".into())?;
    check(!has(JobSector::Sales, "Man"), || "group of 19 included".into())?;
    check(found.len() == 1 && found[0].reference_count == 20, || {
        format!("{found:?}")
    })?;

    let text = fs::read_to_string(run.a.join("tables/anonymized.jsonl")).unwrap();
    let table: Vec<AnonymizedCvRecord> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    for records in [&fixture, &table] {
        let mut previous: Option<Vec<_>> = None;
        for min_group in (1..=60).rev() {
            let now: Vec<_> = enumerate_plausible_params(records, min_group)
                .into_iter()
                .map(|c| c.params)
                .collect();
            if let Some(prev) = &previous {
                check(prev.iter().all(|p| now.contains(p)), || {
                    format!("lowering min_group to {min_group} dropped a combination")
                })?;
            }
            previous = Some(now);
        }
    }
    Ok("size 20 included, size 19 excluded; combination sets nested over thresholds 1..60".into())
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() {
    let run = full_run();
    let criteria: Vec<Criterion> = vec![
        ("end-to-end determinism", Box::new(|| criterion_1(&run))),
        ("privacy suite", Box::new(|| criterion_2(&run))),
        ("distributional utility", Box::new(|| criterion_3(&run))),
        ("structural invariants", Box::new(|| criterion_4(&run))),
        ("Weibull oracle", Box::new(criterion_5)),
        ("JSD oracle", Box::new(criterion_6)),
        ("duration arithmetic", Box::new(criterion_7)),
        ("threshold behavior", Box::new(|| criterion_8(&run))),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
