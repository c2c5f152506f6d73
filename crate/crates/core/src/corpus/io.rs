//! Reading and writing reference corpora.
//!
//! Two layouts are accepted:
//!
//! * a JSON-lines file, one `{"id", "cv", "profile", "experience_years"}`
//!   object per line;
//! * a directory holding `demographics.csv` (one row per CV) and
//!   `cvs/<id>.json` files in the parser output shape.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    default_now, item_duration_months, parse_date_field, DateValue, DemographicProfile, EducationClassifier,
    EducationItem, ExperienceBand, ExperienceItem, ParsedCV, ReferenceRecord, SkillSet, YearMonth,
};
use crate::corpus::{Attribute, JobSector};
use crate::error::{Error, RecordDiagnostic, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawEducation {
    pub degree: String,
    pub start_date: String,
    pub end_date: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub institution: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawExperience {
    pub role: String,
    pub start_date: String,
    pub end_date: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub institution: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

/// A CV exactly as produced by the upstream parser.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawCv {
    pub education_background: Vec<RawEducation>,
    pub professional_experience: Vec<RawExperience>,
    pub skills: SkillSet,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawRecord {
    pub id: String,
    pub cv: RawCv,
    pub profile: DemographicProfile,
    pub experience_years: f64,
}

/// Settings that affect how raw records are interpreted.
#[derive(Clone, Debug)]
pub struct IngestOptions {
    pub classifier: EducationClassifier,
    /// Month that "Ongoing" resolves to.
    pub now: YearMonth,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            classifier: EducationClassifier::default(),
            now: default_now(),
        }
    }
}

fn start_month(field: String, text: &str) -> Result<YearMonth> {
    match parse_date_field(&field, text)? {
        DateValue::Month(m) => Ok(m),
        DateValue::Ongoing => Err(Error::schema(field, "start date cannot be ongoing")),
    }
}

fn non_empty(field: String, text: &str) -> Result<String> {
    let t = text.trim();
    if t.is_empty() {
        return Err(Error::schema(field, "must not be empty"));
    }
    Ok(t.to_string())
}

/// Convert a raw CV into the typed model: parse dates, classify degrees and
/// derive experience durations.
pub fn ingest_cv(raw: &RawCv, opts: &IngestOptions) -> Result<ParsedCV> {
    let mut education = Vec::with_capacity(raw.education_background.len());
    for (i, e) in raw.education_background.iter().enumerate() {
        let path = |f: &str| format!("education_background[{i}].{f}");
        let degree = non_empty(path("degree"), &e.degree)?;
        let start_date = start_month(path("start_date"), &e.start_date)?;
        let end_date = parse_date_field(&path("end_date"), &e.end_date)?;
        if matches!(end_date, DateValue::Month(m) if m < start_date) {
            return Err(Error::schema(path("end_date"), "precedes start_date"));
        }
        education.push(EducationItem {
            kind: opts.classifier.classify(&degree),
            degree,
            institution: e.institution.clone().filter(|s| !s.trim().is_empty()),
            start_date,
            end_date,
        });
    }
    let mut experience = Vec::with_capacity(raw.professional_experience.len());
    for (i, e) in raw.professional_experience.iter().enumerate() {
        let path = |f: &str| format!("professional_experience[{i}].{f}");
        let role = non_empty(path("role"), &e.role)?;
        let start_date = start_month(path("start_date"), &e.start_date)?;
        let end_date = parse_date_field(&path("end_date"), &e.end_date)?;
        let duration_months = item_duration_months(start_date, end_date, opts.now)
            .map_err(|err| Error::schema(path("end_date"), err.to_string()))?;
        experience.push(ExperienceItem {
            role,
            institution: e.institution.clone().filter(|s| !s.trim().is_empty()),
            start_date,
            end_date,
            description: e.description.clone(),
            duration_months,
        });
    }
    let clean = |v: &[String]| -> Vec<String> {
        v.iter()
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect()
    };
    Ok(ParsedCV {
        education_background: education,
        professional_experience: experience,
        skills: SkillSet {
            hard: clean(&raw.skills.hard),
            soft: clean(&raw.skills.soft),
            languages: clean(&raw.skills.languages),
            others: clean(&raw.skills.others),
        },
    })
}

pub fn ingest_record(raw: &RawRecord, opts: &IngestOptions) -> Result<ReferenceRecord> {
    let band = ExperienceBand::from_years(raw.experience_years)?;
    if band != raw.profile.experience_band {
        return Err(Error::schema(
            "experience_band",
            format!(
                "{} years is inconsistent with band {}",
                raw.experience_years, raw.profile.experience_band
            ),
        ));
    }
    Ok(ReferenceRecord {
        id: raw.id.clone(),
        cv: ingest_cv(&raw.cv, opts)?,
        profile: raw.profile.clone(),
        raw_experience_years: raw.experience_years,
    })
}

/// Ingest a batch, collecting a diagnostic for every failing record.
pub fn ingest_all(raws: &[RawRecord], opts: &IngestOptions) -> Result<Vec<ReferenceRecord>> {
    let mut out = Vec::with_capacity(raws.len());
    let mut diagnostics = Vec::new();
    for (index, raw) in raws.iter().enumerate() {
        match ingest_record(raw, opts) {
            Ok(r) => out.push(r),
            Err(e) => diagnostics.push(RecordDiagnostic {
                index,
                id: raw.id.clone(),
                message: e.to_string(),
            }),
        }
    }
    if diagnostics.is_empty() {
        Ok(out)
    } else {
        Err(Error::InvalidRecords(diagnostics))
    }
}

const DEMOGRAPHICS_HEADER: [&str; 10] = [
    "id",
    "job_sector",
    "experience_years",
    "age",
    "gender",
    "lgbtq",
    "minority",
    "foreign",
    "religion",
    "disability",
];

/// Load a corpus from a JSON-lines file or a corpus directory.
pub fn load_corpus(path: &Path, opts: &IngestOptions) -> Result<Vec<ReferenceRecord>> {
    let raws = if path.is_dir() {
        read_raw_dir(path)?
    } else {
        read_raw_jsonl(path)?
    };
    ingest_all(&raws, opts)
}

fn diag(index: usize, id: &str, message: impl ToString) -> Error {
    Error::InvalidRecords(vec![RecordDiagnostic {
        index,
        id: id.to_string(),
        message: message.to_string(),
    }])
}

pub fn read_raw_jsonl(path: &Path) -> Result<Vec<RawRecord>> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut out = Vec::new();
    let mut diagnostics = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<RawRecord>(&line) {
            Ok(r) => out.push(r),
            Err(e) => diagnostics.push(RecordDiagnostic {
                index,
                id: format!("line {}", index + 1),
                message: e.to_string(),
            }),
        }
    }
    if diagnostics.is_empty() {
        Ok(out)
    } else {
        Err(Error::InvalidRecords(diagnostics))
    }
}

fn optional(cell: &str) -> Option<&str> {
    let c = cell.trim();
    (!c.is_empty()).then_some(c)
}

pub fn read_raw_dir(dir: &Path) -> Result<Vec<RawRecord>> {
    let mut reader = csv::Reader::from_path(dir.join("demographics.csv"))?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let idx: Vec<Option<usize>> = DEMOGRAPHICS_HEADER.iter().map(|h| col(h)).collect();
    if idx[0].is_none() || idx[1].is_none() || idx[2].is_none() {
        return Err(Error::schema(
            "demographics.csv",
            "columns id, job_sector and experience_years are required",
        ));
    }
    let mut out = Vec::new();
    let mut diagnostics = Vec::new();
    for (index, row) in reader.records().enumerate() {
        let row = row?;
        let cell = |k: usize| idx[k].and_then(|i| row.get(i)).unwrap_or("");
        let id = cell(0).trim().to_string();
        let parsed = (|| -> Result<RawRecord> {
            let sector: JobSector = cell(1).parse()?;
            let years: f64 = cell(2)
                .trim()
                .parse()
                .map_err(|_| Error::schema("experience_years", format!("not a number: {:?}", cell(2))))?;
            let mut profile = DemographicProfile::new(sector, ExperienceBand::from_years(years)?);
            let attrs = [
                (3, Attribute::Age),
                (4, Attribute::Gender),
                (5, Attribute::Lgbtq),
                (6, Attribute::Minority),
                (7, Attribute::Foreign),
                (8, Attribute::Religion),
                (9, Attribute::Disability),
            ];
            for (k, attr) in attrs {
                if let Some(v) = optional(cell(k)) {
                    profile.set(attr, v)?;
                }
            }
            let text = fs::read_to_string(dir.join("cvs").join(format!("{id}.json")))
                .map_err(|e| Error::schema("cv", format!("cannot read cvs/{id}.json: {e}")))?;
            let cv: RawCv = serde_json::from_str(&text)?;
            Ok(RawRecord {
                id: id.clone(),
                cv,
                profile,
                experience_years: years,
            })
        })();
        match parsed {
            Ok(r) => out.push(r),
            Err(e) => diagnostics.push(RecordDiagnostic {
                index,
                id,
                message: e.to_string(),
            }),
        }
    }
    if diagnostics.is_empty() {
        Ok(out)
    } else {
        Err(Error::InvalidRecords(diagnostics))
    }
}

/// Write raw records in the directory layout.
pub fn write_raw_dir(records: &[RawRecord], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir.join("cvs"))?;
    let mut w = csv::Writer::from_path(dir.join("demographics.csv"))?;
    w.write_record(DEMOGRAPHICS_HEADER)?;
    for r in records {
        if r.id.is_empty() || r.id.contains(['/', '\\']) {
            return Err(diag(0, &r.id, "record id must be a plain file stem"));
        }
        let p = &r.profile;
        let opt = |v: Option<&str>| v.unwrap_or("").to_string();
        w.write_record([
            r.id.clone(),
            p.job_sector.to_string(),
            format!("{}", r.experience_years),
            opt(p.value_of(Attribute::Age)),
            opt(p.value_of(Attribute::Gender)),
            opt(p.value_of(Attribute::Lgbtq)),
            opt(p.value_of(Attribute::Minority)),
            opt(p.value_of(Attribute::Foreign)),
            opt(p.value_of(Attribute::Religion)),
            opt(p.value_of(Attribute::Disability)),
        ])?;
        let mut f = fs::File::create(dir.join("cvs").join(format!("{}.json", r.id)))?;
        serde_json::to_writer_pretty(&mut f, &r.cv)?;
        f.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_raw_jsonl(records: &[RawRecord], path: &Path) -> Result<()> {
    let mut f = std::io::BufWriter::new(fs::File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut f, r)?;
        f.write_all(b"\n")?;
    }
    f.flush()?;
    Ok(())
}
