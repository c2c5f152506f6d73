//! CV and demographic data model, schema ingestion and education-duration
//! repair.

mod date;
mod demographics;
pub mod io;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use date::{
    default_now, format_duration, item_duration_months, parse_date, parse_date_field, DateValue, YearMonth,
};
pub use demographics::{
    parse_yes_no, yes_no, AgeBand, Attribute, DemographicPair, DemographicProfile, ExperienceBand, Gender, JobSector,
    Religion,
};

use crate::error::{Error, Result};
use crate::text;

impl Serialize for YearMonth {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for YearMonth {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        match parse_date(&s).map_err(serde::de::Error::custom)? {
            DateValue::Month(m) => Ok(m),
            DateValue::Ongoing => Err(serde::de::Error::custom("start date cannot be ongoing")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EducationKind {
    Bachelor,
    Master,
    PhD,
    Abroad,
    Vocational,
    #[default]
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EducationItem {
    pub degree: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub institution: Option<String>,
    pub start_date: YearMonth,
    pub end_date: DateValue,
    #[serde(default)]
    pub kind: EducationKind,
}

impl EducationItem {
    pub fn end(&self, now: YearMonth) -> YearMonth {
        self.end_date.resolve(now)
    }

    pub fn duration_months(&self, now: YearMonth) -> Result<u32> {
        item_duration_months(self.start_date, self.end_date, now)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExperienceItem {
    pub role: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub institution: Option<String>,
    pub start_date: YearMonth,
    pub end_date: DateValue,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default)]
    pub duration_months: u32,
}

impl ExperienceItem {
    pub fn end(&self, now: YearMonth) -> YearMonth {
        self.end_date.resolve(now)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SkillSet {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hard: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub soft: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub languages: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub others: Vec<String>,
}

impl SkillSet {
    pub fn iter(&self) -> impl Iterator<Item = &String> {
        self.hard
            .iter()
            .chain(&self.soft)
            .chain(&self.languages)
            .chain(&self.others)
    }

    pub fn len(&self) -> usize {
        self.hard.len() + self.soft.len() + self.languages.len() + self.others.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParsedCV {
    pub education_background: Vec<EducationItem>,
    pub professional_experience: Vec<ExperienceItem>,
    pub skills: SkillSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Section {
    Education,
    Experience,
    Skills,
}

impl Section {
    pub const ALL: [Section; 3] = [Section::Education, Section::Experience, Section::Skills];

    pub fn as_str(self) -> &'static str {
        match self {
            Section::Education => "education",
            Section::Experience => "experience",
            Section::Skills => "skills",
        }
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl ParsedCV {
    pub fn section_len(&self, section: Section) -> usize {
        match section {
            Section::Education => self.education_background.len(),
            Section::Experience => self.professional_experience.len(),
            Section::Skills => self.skills.len(),
        }
    }

    /// Institution multiset: education institutions followed by workplaces.
    pub fn institutions(&self) -> Vec<&str> {
        self.education_background
            .iter()
            .filter_map(|e| e.institution.as_deref())
            .chain(
                self.professional_experience
                    .iter()
                    .filter_map(|e| e.institution.as_deref()),
            )
            .collect()
    }

    /// Normalized, deduplicated item texts across all three sections.
    pub fn item_set(&self) -> HashSet<String> {
        self.education_background
            .iter()
            .map(|e| format!("e:{}", text::normalize(&e.degree)))
            .chain(
                self.professional_experience
                    .iter()
                    .map(|e| format!("x:{}", text::normalize(&e.role))),
            )
            .chain(self.skills.iter().map(|s| format!("s:{}", text::normalize(s))))
            .collect()
    }

    /// Copy with every institution name removed.
    pub fn without_institutions(&self) -> ParsedCV {
        let mut cv = self.clone();
        for e in &mut cv.education_background {
            e.institution = None;
        }
        for e in &mut cv.professional_experience {
            e.institution = None;
        }
        cv
    }
}

/// Rule-based education-kind classifier over degree text. Rules are checked
/// in order; the first matching phrase wins.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EducationClassifier {
    pub rules: Vec<(EducationKind, Vec<String>)>,
}

impl Default for EducationClassifier {
    fn default() -> Self {
        let rule = |kind, words: &[&str]| (kind, words.iter().map(|w| w.to_string()).collect());
        EducationClassifier {
            rules: vec![
                rule(
                    EducationKind::Abroad,
                    &["erasmus", "exchange", "visiting", "study abroad", "abroad"],
                ),
                rule(EducationKind::PhD, &["phd", "doctor", "doctorate", "doctoral", "dphil"]),
                rule(
                    EducationKind::Master,
                    &["master", "masters", "msc", "mba", "ma", "meng", "llm", "postgraduate"],
                ),
                rule(
                    EducationKind::Bachelor,
                    &[
                        "bachelor",
                        "bachelors",
                        "bsc",
                        "ba",
                        "beng",
                        "llb",
                        "degree in",
                        "undergraduate",
                        "licenciatura",
                        "grado",
                    ],
                ),
                rule(
                    EducationKind::Vocational,
                    &[
                        "vocational",
                        "technician",
                        "professional training",
                        "apprenticeship",
                        "certificate",
                        "diploma",
                    ],
                ),
            ],
        }
    }
}

impl EducationClassifier {
    pub fn classify(&self, degree: &str) -> EducationKind {
        let toks = text::tokens(degree);
        for (kind, phrases) in &self.rules {
            for p in phrases {
                let needle: Vec<&str> = p.split_whitespace().collect();
                if text::contains_phrase(&toks, &needle) {
                    return *kind;
                }
            }
        }
        EducationKind::Other
    }

    /// Degree text stripped of the level keywords and filler words, leaving
    /// the field of study ("BSc Computer Science" -> "computer science").
    pub fn field_of_study(&self, degree: &str) -> String {
        const FILLER: &[&str] = &["of", "in", "the", "and", "a", "an", "degree", "s"];
        let keywords: HashSet<&str> = self
            .rules
            .iter()
            .flat_map(|(_, ps)| ps.iter())
            .filter(|p| !p.contains(' '))
            .map(String::as_str)
            .collect();
        let toks = text::tokens(degree);
        let mut kept: Vec<String> = Vec::with_capacity(toks.len());
        let mut i = 0;
        while i < toks.len() {
            // "of science" / "of arts" name the degree type, not the field
            if toks[i] == "of" && matches!(toks.get(i + 1).map(String::as_str), Some("science" | "arts")) {
                i += 2;
                continue;
            }
            let t = &toks[i];
            if !keywords.contains(t.as_str()) && !FILLER.contains(&t.as_str()) {
                kept.push(t.clone());
            }
            i += 1;
        }
        if kept.is_empty() {
            text::normalize(degree)
        } else {
            kept.join(" ")
        }
    }
}

/// Minimum plausible study durations in months, per education kind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepairPolicy {
    pub phd: Option<u32>,
    pub master: Option<u32>,
    pub bachelor: Option<u32>,
    pub vocational: Option<u32>,
    pub abroad: Option<u32>,
    pub other: Option<u32>,
}

impl Default for RepairPolicy {
    fn default() -> Self {
        RepairPolicy {
            phd: Some(36),
            master: Some(9),
            bachelor: Some(36),
            vocational: Some(3),
            abroad: None,
            other: None,
        }
    }
}

impl RepairPolicy {
    pub fn minimum(&self, kind: EducationKind) -> Option<u32> {
        match kind {
            EducationKind::PhD => self.phd,
            EducationKind::Master => self.master,
            EducationKind::Bachelor => self.bachelor,
            EducationKind::Vocational => self.vocational,
            EducationKind::Abroad => self.abroad,
            EducationKind::Other => self.other,
        }
    }
}

/// Extend the end date of every too-short, closed education item to the
/// policy minimum for its kind. Open (Ongoing) items are left as they are.
pub fn repair_education_durations(items: &[EducationItem], policy: &RepairPolicy) -> Vec<EducationItem> {
    items
        .iter()
        .map(|item| {
            let mut item = item.clone();
            if let (Some(min), DateValue::Month(end)) = (policy.minimum(item.kind), item.end_date) {
                let months = item.start_date.months_until(end);
                if months >= 0 && (months as u32) < min {
                    item.end_date = DateValue::Month(item.start_date.plus_months(min as i64));
                }
            }
            item
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    EmptySection { section: Section },
    DuplicateItem { section: Section, item: String },
    DateInversion { section: Section, index: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptySection { section } => write!(f, "empty section: {section}"),
            Violation::DuplicateItem { section, item } => write!(f, "duplicate item in {section}: {item}"),
            Violation::DateInversion { section, index } => {
                write!(f, "date inversion in {section} item {index}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub strict: bool,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    /// In strict mode any violation is an error; otherwise the report is
    /// informational.
    pub fn into_result(self) -> Result<ValidationReport> {
        if self.strict && !self.violations.is_empty() {
            let msg = self
                .violations
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; ");
            Err(Error::Validation(msg))
        } else {
            Ok(self)
        }
    }
}

fn push_duplicates<'a>(section: Section, items: impl Iterator<Item = &'a str>, out: &mut Vec<Violation>) {
    let mut seen = HashSet::new();
    for item in items {
        let key = text::normalize(item);
        if !seen.insert(key) {
            out.push(Violation::DuplicateItem {
                section,
                item: item.to_string(),
            });
        }
    }
}

/// Check a CV for empty sections, duplicated items (case- and
/// whitespace-insensitive; skills are compared across all subcategories)
/// and inverted date intervals.
pub fn validate_cv(cv: &ParsedCV, strict: bool) -> ValidationReport {
    let mut violations = Vec::new();
    for section in Section::ALL {
        if cv.section_len(section) == 0 {
            violations.push(Violation::EmptySection { section });
        }
    }
    push_duplicates(
        Section::Education,
        cv.education_background.iter().map(|e| e.degree.as_str()),
        &mut violations,
    );
    push_duplicates(
        Section::Experience,
        cv.professional_experience.iter().map(|e| e.role.as_str()),
        &mut violations,
    );
    push_duplicates(Section::Skills, cv.skills.iter().map(String::as_str), &mut violations);
    for (index, e) in cv.education_background.iter().enumerate() {
        if matches!(e.end_date, DateValue::Month(end) if end < e.start_date) {
            violations.push(Violation::DateInversion {
                section: Section::Education,
                index,
            });
        }
    }
    for (index, e) in cv.professional_experience.iter().enumerate() {
        if matches!(e.end_date, DateValue::Month(end) if end < e.start_date) {
            violations.push(Violation::DateInversion {
                section: Section::Experience,
                index,
            });
        }
    }
    ValidationReport { violations, strict }
}

/// A parsed reference CV together with its donor's profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRecord {
    pub id: String,
    pub cv: ParsedCV,
    pub profile: DemographicProfile,
    pub raw_experience_years: f64,
}
