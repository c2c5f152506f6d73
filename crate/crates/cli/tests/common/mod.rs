#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

pub fn cvsynth(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvsynth"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn cvsynth")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Run a stage and insist it succeeds.
pub fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = cvsynth(dir, args);
    assert_eq!(
        code(&out),
        0,
        "cvsynth {args:?} failed\nstdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        stderr(&out)
    );
    out
}

/// Mock corpus, tables, plan and dataset in `dir`.
pub fn pipeline(dir: &Path, total: usize, seed: u64, extra: &[&str]) {
    let seed = seed.to_string();
    let total = total.to_string();
    let with = |stage: &[&str]| -> Vec<String> {
        let mut v: Vec<String> = stage.iter().map(|s| s.to_string()).collect();
        v.extend(["--seed".to_string(), seed.clone()]);
        v.extend(extra.iter().map(|s| s.to_string()));
        v
    };
    for stage in [
        with(&["mock-corpus", "--out", "corpus", "--total", &total]),
        with(&["build-tables"]),
        with(&["enumerate"]),
        with(&["generate"]),
    ] {
        let args: Vec<&str> = stage.iter().map(String::as_str).collect();
        ok(dir, &args);
    }
}

/// Every file under `root`, keyed by relative path.
pub fn tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for entry in fs::read_dir(dir).expect("read dir") {
            let path = entry.expect("dir entry").path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).expect("under root").to_path_buf();
                out.insert(rel, fs::read(&path).expect("read file"));
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

pub fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).expect("read json")).expect("parse json")
}

pub fn write_json(path: &Path, value: &Value) {
    fs::write(path, serde_json::to_string_pretty(value).expect("serialize") + "\n").expect("write json");
}

/// Rows of a CSV table as header-keyed maps.
pub fn csv_rows(path: &Path) -> Vec<BTreeMap<String, String>> {
    let mut reader = csv::Reader::from_path(path).expect("open csv");
    let headers = reader.headers().expect("headers").clone();
    reader
        .records()
        .map(|r| {
            let r = r.expect("csv record");
            headers
                .iter()
                .zip(r.iter())
                .map(|(h, v)| (h.to_string(), v.to_string()))
                .collect()
        })
        .collect()
}

fn split_list(cell: &str) -> Vec<String> {
    if cell.is_empty() {
        Vec::new()
    } else {
        cell.split('|').map(str::to_string).collect()
    }
}

fn month_name(m: u32) -> &'static str {
    [
        "January",
        "February",
        "March",
        "April",
        "May",
        "June",
        "July",
        "August",
        "September",
        "October",
        "November",
        "December",
    ][m as usize - 1]
}

/// Add a CV to the dataset in `output` whose institutions equal one
/// reference combination except for its last workplace. Its degrees, roles
/// and skills are invented so it resembles no reference CV. Returns the new id.
pub fn plant_near_match(tables: &Path, output: &Path) -> String {
    let rows = csv_rows(&tables.join("combinations.csv"));
    let row = rows
        .iter()
        .find(|r| split_list(&r["education_institutions"]).len() == 1 && split_list(&r["workplaces"]).len() >= 2)
        .expect("a combination with one institution and several workplaces");
    let institution = split_list(&row["education_institutions"]).remove(0);
    let mut workplaces = split_list(&row["workplaces"]);
    *workplaces.last_mut().expect("non-empty") = "Planted Holdings Ltd".to_string();

    let education = json!([{
        "institution": institution,
        "start_date": "September 2000",
        "end_date": "June 2004",
        "degree": "Bachelor in Planted Studies",
    }]);
    let experience: Vec<Value> = workplaces
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let year = 2005 + 2 * i as i32;
            json!({
                "institution": w,
                "start_date": format!("{} {year}", month_name(1)),
                "end_date": format!("{} {year}", month_name(12)),
                "role": format!("Planted role {i}"),
                "duration": "11 months",
                "duration_months": 11,
            })
        })
        .collect();
    let cv = json!({
        "education_background": education,
        "professional_experience": experience,
        "skills": {"others": ["Planted skill"]},
    });

    let id = "planted-000".to_string();
    write_json(&output.join("cvs").join(format!("{id}.json")), &cv);
    let manifest_path = output.join("manifest.json");
    let mut manifest = read_json(&manifest_path);
    let list = manifest.as_array_mut().expect("manifest is a list");
    let mut entry = list.first().cloned().expect("non-empty dataset");
    entry["id"] = json!(id);
    entry["file"] = json!(format!("cvs/{id}.json"));
    list.push(entry);
    write_json(&manifest_path, &manifest);
    id
}

/// Experience band of a reference CV from its years, by the published bands.
pub fn band_of(years: f64) -> &'static str {
    if years < 5.0 {
        "4 years or less"
    } else if years < 10.0 {
        "5-9 years"
    } else if years < 15.0 {
        "10-14 years"
    } else {
        "15+ years"
    }
}
