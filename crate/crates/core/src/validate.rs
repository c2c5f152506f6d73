//! Utility and privacy validation of a synthetic dataset against its
//! reference corpus.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::contentgen::SyntheticCv;
use crate::corpus::{
    AgeBand, Attribute, DemographicProfile, ExperienceBand, Gender, JobSector, ParsedCV, ReferenceRecord, Religion,
};
use crate::error::{Error, Result};
use crate::params::GenerationParams;
use crate::tables::CombinationRecord;

/// A demographic or professional variable whose distribution is compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    JobSector,
    ExperienceBand,
    Gender,
    Age,
    Lgbtq,
    Minority,
    Foreign,
    Religion,
    Disability,
}

impl Variable {
    pub const ALL: [Variable; 9] = [
        Variable::JobSector,
        Variable::ExperienceBand,
        Variable::Gender,
        Variable::Age,
        Variable::Lgbtq,
        Variable::Minority,
        Variable::Foreign,
        Variable::Religion,
        Variable::Disability,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Variable::JobSector => "job_sector",
            Variable::ExperienceBand => "experience_band",
            Variable::Gender => "gender",
            Variable::Age => "age",
            Variable::Lgbtq => "lgbtq",
            Variable::Minority => "minority",
            Variable::Foreign => "foreign",
            Variable::Religion => "religion",
            Variable::Disability => "disability",
        }
    }

    pub fn attribute(self) -> Option<Attribute> {
        Some(match self {
            Variable::JobSector | Variable::ExperienceBand => return None,
            Variable::Gender => Attribute::Gender,
            Variable::Age => Attribute::Age,
            Variable::Lgbtq => Attribute::Lgbtq,
            Variable::Minority => Attribute::Minority,
            Variable::Foreign => Attribute::Foreign,
            Variable::Religion => Attribute::Religion,
            Variable::Disability => Attribute::Disability,
        })
    }

    /// Category order used for histograms.
    pub fn vocabulary(self) -> Vec<&'static str> {
        match self {
            Variable::JobSector => JobSector::ALL.iter().map(|s| s.as_str()).collect(),
            Variable::ExperienceBand => ExperienceBand::ALL.iter().map(|s| s.as_str()).collect(),
            Variable::Gender => Gender::ALL.iter().map(|s| s.as_str()).collect(),
            Variable::Age => AgeBand::ALL.iter().map(|s| s.as_str()).collect(),
            Variable::Religion => Religion::ALL.iter().map(|s| s.as_str()).collect(),
            _ => vec!["Yes", "No"],
        }
    }

    pub fn of_profile(self, profile: &DemographicProfile) -> Option<&'static str> {
        match self.attribute() {
            Some(a) => profile.value_of(a),
            None if self == Variable::JobSector => Some(profile.job_sector.as_str()),
            None => Some(profile.experience_band.as_str()),
        }
    }

    /// A synthetic CV carries only the attributes it was generated for.
    pub fn of_params(self, params: &GenerationParams) -> Option<String> {
        match self.attribute() {
            Some(a) => params.has_attribute(a).map(str::to_string),
            None if self == Variable::JobSector => Some(params.job_sector.as_str().to_string()),
            None => Some(params.experience_band.as_str().to_string()),
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variable::ALL
            .into_iter()
            .find(|v| v.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown variable `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CategoricalDistribution {
    pub variable: String,
    pub categories: Vec<String>,
    pub probabilities: Vec<f64>,
}

impl CategoricalDistribution {
    pub fn new(variable: impl Into<String>, categories: Vec<String>, probabilities: Vec<f64>) -> Result<Self> {
        if categories.len() != probabilities.len() {
            return Err(Error::Validation(
                "categories and probabilities differ in length".into(),
            ));
        }
        if categories.iter().collect::<HashSet<_>>().len() != categories.len() {
            return Err(Error::Validation("duplicate category".into()));
        }
        if probabilities.iter().any(|p| p.is_nan() || *p < 0.0) {
            return Err(Error::Validation("negative probability".into()));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!("probabilities sum to {total}")));
        }
        Ok(CategoricalDistribution {
            variable: variable.into(),
            categories,
            probabilities,
        })
    }

    pub fn probability(&self, category: &str) -> f64 {
        self.categories
            .iter()
            .position(|c| c == category)
            .map_or(0.0, |i| self.probabilities[i])
    }
}

/// Normalized counts of `values` over `categories`; values outside the
/// category list are an error.
pub fn histogram_over<S: AsRef<str>>(
    variable: &str,
    values: &[S],
    categories: &[String],
) -> Result<CategoricalDistribution> {
    if values.is_empty() {
        return Err(Error::Validation(format!("no values for `{variable}`")));
    }
    let mut counts = vec![0usize; categories.len()];
    for v in values {
        let i = categories
            .iter()
            .position(|c| c == v.as_ref())
            .ok_or_else(|| Error::Validation(format!("value {:?} not among categories", v.as_ref())))?;
        counts[i] += 1;
    }
    let n = values.len() as f64;
    CategoricalDistribution::new(
        variable,
        categories.to_vec(),
        counts.into_iter().map(|c| c as f64 / n).collect(),
    )
}

/// Categories of `variable` that occur in either value list, in vocabulary
/// order (unknown values after, alphabetically).
fn category_union<S: AsRef<str>>(variable: Variable, a: &[S], b: &[S]) -> Vec<String> {
    let present: HashSet<&str> = a.iter().chain(b).map(|s| s.as_ref()).collect();
    let vocab = variable.vocabulary();
    let mut out: Vec<String> = vocab
        .iter()
        .filter(|v| present.contains(*v))
        .map(|v| v.to_string())
        .collect();
    let mut extra: Vec<String> = present
        .iter()
        .filter(|p| !vocab.contains(p))
        .map(|p| p.to_string())
        .collect();
    extra.sort();
    out.extend(extra);
    out
}

/// Histogram of one value list over its own categories.
pub fn histogram<S: AsRef<str>>(variable: Variable, values: &[S]) -> Result<CategoricalDistribution> {
    let categories = category_union(variable, values, &[]);
    histogram_over(variable.as_str(), values, &categories)
}

/// Reference and synthetic histograms aligned over the union of their
/// categories; categories missing on one side get probability 0.
pub fn paired_histograms<S: AsRef<str>>(
    variable: Variable,
    reference: &[S],
    synthetic: &[S],
) -> Result<(CategoricalDistribution, CategoricalDistribution)> {
    let categories = category_union(variable, reference, synthetic);
    Ok((
        histogram_over(variable.as_str(), reference, &categories)?,
        histogram_over(variable.as_str(), synthetic, &categories)?,
    ))
}

fn kl_to_mixture(p: &[f64], m: &[f64]) -> f64 {
    p.iter()
        .zip(m)
        .filter(|(pi, _)| **pi > 0.0)
        .map(|(pi, mi)| pi * (pi / mi).log2())
        .sum()
}

/// Jensen-Shannon divergence with base-2 logarithms, in [0, 1].
pub fn js_divergence(p: &CategoricalDistribution, q: &CategoricalDistribution) -> Result<f64> {
    if p.categories != q.categories {
        return Err(Error::Validation(format!(
            "distributions are not aligned: {:?} vs {:?}",
            p.categories, q.categories
        )));
    }
    let m: Vec<f64> = p
        .probabilities
        .iter()
        .zip(&q.probabilities)
        .map(|(a, b)| (a + b) / 2.0)
        .collect();
    let js = 0.5 * kl_to_mixture(&p.probabilities, &m) + 0.5 * kl_to_mixture(&q.probabilities, &m);
    Ok(js.clamp(0.0, 1.0))
}

/// Multiset distance between institution lists: the larger of the two
/// one-sided differences. Equal lists are at 0; lists equal except for one
/// substituted, added or removed element are at 1.
pub fn near_match_distance<A: AsRef<str>, B: AsRef<str>>(a: &[A], b: &[B]) -> usize {
    let mut counts: HashMap<&str, i64> = HashMap::new();
    for x in a {
        *counts.entry(x.as_ref()).or_insert(0) += 1;
    }
    for x in b {
        *counts.entry(x.as_ref()).or_insert(0) -= 1;
    }
    let only_a: i64 = counts.values().filter(|c| **c > 0).sum();
    let only_b: i64 = -counts.values().filter(|c| **c < 0).sum::<i64>();
    only_a.max(only_b) as usize
}

/// Match or near-match: distance of at most one element.
pub fn is_near_match<A: AsRef<str>, B: AsRef<str>>(a: &[A], b: &[B]) -> bool {
    near_match_distance(a, b) <= 1
}

/// Index over reference institution lists for fast near-match lookups.
#[derive(Clone, Debug, Default)]
pub struct InstitutionIndex {
    sets: Vec<Vec<String>>,
    by_entity: HashMap<String, Vec<usize>>,
    /// Lists of at most one element can near-match without sharing one.
    small: Vec<usize>,
}

impl InstitutionIndex {
    pub fn new(sets: Vec<Vec<String>>) -> Self {
        let mut by_entity: HashMap<String, Vec<usize>> = HashMap::new();
        let mut small = Vec::new();
        for (i, s) in sets.iter().enumerate() {
            if s.len() <= 1 {
                small.push(i);
            }
            let distinct: HashSet<&String> = s.iter().collect();
            for e in distinct {
                by_entity.entry(e.clone()).or_default().push(i);
            }
        }
        InstitutionIndex { sets, by_entity, small }
    }

    pub fn from_combinations(records: &[CombinationRecord]) -> Self {
        Self::new(
            records
                .iter()
                .map(|r| r.institutions().into_iter().map(str::to_string).collect())
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Lowest index of a list that `candidate` matches or near-matches.
    pub fn find_near_match<S: AsRef<str>>(&self, candidate: &[S]) -> Option<(usize, usize)> {
        let mut ids: Vec<usize> = candidate
            .iter()
            .filter_map(|e| self.by_entity.get(e.as_ref()))
            .flatten()
            .copied()
            .collect();
        if candidate.len() <= 1 {
            ids.extend(&self.small);
        }
        ids.sort_unstable();
        ids.dedup();
        ids.into_iter().find_map(|i| {
            let d = near_match_distance(candidate, &self.sets[i]);
            (d <= 1).then_some((i, d))
        })
    }
}

pub fn jaccard(a: &HashSet<String>, b: &HashSet<String>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let inter = a.intersection(b).count();
    inter as f64 / (a.len() + b.len() - inter) as f64
}

/// Inverted index over item sets for Jaccard lookups.
#[derive(Clone, Debug, Default)]
pub struct ItemSetIndex {
    sizes: Vec<usize>,
    postings: HashMap<String, Vec<usize>>,
}

impl ItemSetIndex {
    pub fn new(sets: impl IntoIterator<Item = HashSet<String>>) -> Self {
        let mut idx = ItemSetIndex::default();
        for s in sets {
            idx.insert(&s);
        }
        idx
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn insert(&mut self, set: &HashSet<String>) -> usize {
        let id = self.sizes.len();
        self.sizes.push(set.len());
        for item in set {
            self.postings.entry(item.clone()).or_default().push(id);
        }
        id
    }

    /// Lowest-index set whose Jaccard similarity with `set` is at least
    /// `threshold`, with that similarity.
    pub fn find_similar(&self, set: &HashSet<String>, threshold: f64) -> Option<(usize, f64)> {
        let mut overlap: HashMap<usize, usize> = HashMap::new();
        for item in set {
            for &id in self.postings.get(item).into_iter().flatten() {
                *overlap.entry(id).or_insert(0) += 1;
            }
        }
        let mut hits: Vec<(usize, f64)> = overlap
            .into_iter()
            .map(|(id, inter)| (id, inter as f64 / (set.len() + self.sizes[id] - inter) as f64))
            .filter(|(_, j)| *j >= threshold)
            .collect();
        if set.is_empty() && threshold <= 1.0 {
            hits.extend(
                self.sizes
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| **s == 0)
                    .map(|(i, _)| (i, 1.0)),
            );
        }
        hits.into_iter().min_by_key(|(id, _)| *id)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PrivacyViolation {
    /// Institution list equal to a reference combination except for at most one element.
    NearMatch {
        cv: String,
        combination: usize,
        distance: usize,
    },
    /// Item set overlapping a reference CV at or above the resemblance threshold.
    Resemblance { cv: String, reference: usize, jaccard: f64 },
}

/// Exhaustive scan of the synthetic dataset against the reference
/// combinations and CVs.
pub fn audit_privacy(
    synthetic: &[SyntheticCv],
    combinations: &[CombinationRecord],
    references: &[ParsedCV],
    resemblance_threshold: f64,
) -> Vec<PrivacyViolation> {
    let combos = InstitutionIndex::from_combinations(combinations);
    let refs = ItemSetIndex::new(references.iter().map(ParsedCV::item_set));
    let mut out = Vec::new();
    for s in synthetic {
        if let Some((combination, distance)) = combos.find_near_match(&s.cv.institutions()) {
            out.push(PrivacyViolation::NearMatch {
                cv: s.id.clone(),
                combination,
                distance,
            });
        }
        if let Some((reference, jaccard)) = refs.find_similar(&s.cv.item_set(), resemblance_threshold) {
            out.push(PrivacyViolation::Resemblance {
                cv: s.id.clone(),
                reference,
                jaccard,
            });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarPair {
    pub first: String,
    pub second: String,
    pub jaccard: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct UniquenessAudit {
    /// Pairs from the same generation attempt at or above the threshold.
    pub within_attempt: Vec<SimilarPair>,
    /// Pairs from different attempts; reported, not failures.
    pub cross_attempt: Vec<SimilarPair>,
}

/// For each CV, the earliest preceding CV it is similar to.
pub fn audit_uniqueness(synthetic: &[SyntheticCv], threshold: f64) -> UniquenessAudit {
    let mut audit = UniquenessAudit::default();
    let mut index = ItemSetIndex::default();
    for s in synthetic {
        let set = s.cv.item_set();
        if let Some((j, jac)) = index.find_similar(&set, threshold) {
            let other = &synthetic[j];
            let pair = SimilarPair {
                first: other.id.clone(),
                second: s.id.clone(),
                jaccard: jac,
            };
            if other.provenance.combination == s.provenance.combination {
                audit.within_attempt.push(pair);
            } else {
                audit.cross_attempt.push(pair);
            }
        }
        index.insert(&set);
    }
    audit
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ValidationThresholds {
    pub default_ceiling: f64,
    pub ceilings: BTreeMap<Variable, f64>,
    pub resemblance: f64,
    pub uniqueness: f64,
}

impl Default for ValidationThresholds {
    fn default() -> Self {
        ValidationThresholds {
            default_ceiling: 0.30,
            ceilings: BTreeMap::from([(Variable::Gender, 0.05)]),
            resemblance: 0.9,
            uniqueness: 0.9,
        }
    }
}

impl ValidationThresholds {
    pub fn ceiling(&self, v: Variable) -> f64 {
        self.ceilings.get(&v).copied().unwrap_or(self.default_ceiling)
    }

    pub fn check(&self) -> Result<()> {
        let all = [
            ("default_ceiling", self.default_ceiling),
            ("resemblance", self.resemblance),
            ("uniqueness", self.uniqueness),
        ]
        .into_iter()
        .chain(self.ceilings.values().map(|c| ("ceiling", *c)));
        for (name, v) in all {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariableScore {
    pub variable: Variable,
    pub reference_count: usize,
    pub synthetic_count: usize,
    /// Absent when either side has no values for the variable.
    pub js: Option<f64>,
    pub ceiling: f64,
    pub passed: bool,
    pub reference: Option<CategoricalDistribution>,
    pub synthetic: Option<CategoricalDistribution>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub reference_cvs: usize,
    pub synthetic_cvs: usize,
    pub variables: Vec<VariableScore>,
    pub privacy: Vec<PrivacyViolation>,
    pub uniqueness: UniquenessAudit,
    pub passed: bool,
}

impl ValidationReport {
    pub fn score(&self, v: Variable) -> Option<&VariableScore> {
        self.variables.iter().find(|s| s.variable == v)
    }
}

/// Compare per-variable distributions and run the privacy and uniqueness
/// audits. A variable with no values on either side is reported without a
/// score and does not fail the report.
pub fn build_report(
    reference: &[ReferenceRecord],
    synthetic: &[SyntheticCv],
    combinations: &[CombinationRecord],
    thresholds: &ValidationThresholds,
) -> Result<ValidationReport> {
    if reference.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut variables = Vec::new();
    for v in Variable::ALL {
        let r: Vec<String> = reference
            .iter()
            .filter_map(|x| v.of_profile(&x.profile).map(str::to_string))
            .collect();
        let s: Vec<String> = synthetic
            .iter()
            .filter_map(|x| v.of_params(&x.provenance.params))
            .collect();
        let ceiling = thresholds.ceiling(v);
        let (js, rd, sd) = if r.is_empty() || s.is_empty() {
            (None, None, None)
        } else {
            let (rd, sd) = paired_histograms(v, &r, &s)?;
            (Some(js_divergence(&rd, &sd)?), Some(rd), Some(sd))
        };
        variables.push(VariableScore {
            variable: v,
            reference_count: r.len(),
            synthetic_count: s.len(),
            js,
            ceiling,
            passed: js.is_none_or(|j| j <= ceiling),
            reference: rd,
            synthetic: sd,
        });
    }
    let refs: Vec<ParsedCV> = reference.iter().map(|r| r.cv.clone()).collect();
    let privacy = audit_privacy(synthetic, combinations, &refs, thresholds.resemblance);
    let uniqueness = audit_uniqueness(synthetic, thresholds.uniqueness);
    let passed = variables.iter().all(|v| v.passed) && privacy.is_empty() && uniqueness.within_attempt.is_empty();
    Ok(ValidationReport {
        reference_cvs: reference.len(),
        synthetic_cvs: synthetic.len(),
        variables,
        privacy,
        uniqueness,
        passed,
    })
}

pub fn render_text(report: &ValidationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "reference CVs: {}\nsynthetic CVs: {}\n",
        report.reference_cvs, report.synthetic_cvs
    );
    let _ = writeln!(out, "{:<16} {:>8} {:>8} {:>6}", "variable", "js", "ceiling", "result");
    for v in &report.variables {
        let js = v.js.map_or_else(|| "-".to_string(), |j| format!("{j:.4}"));
        let result = match (v.js, v.passed) {
            (None, _) => "skip",
            (_, true) => "pass",
            _ => "FAIL",
        };
        let _ = writeln!(
            out,
            "{:<16} {:>8} {:>8.2} {:>6}",
            v.variable.as_str(),
            js,
            v.ceiling,
            result
        );
    }
    let _ = writeln!(out, "\nprivacy violations: {}", report.privacy.len());
    for p in &report.privacy {
        let _ = writeln!(out, "  {}", serde_json::to_string(p).unwrap_or_default());
    }
    let _ = writeln!(
        out,
        "similar pairs within an attempt: {}\nsimilar pairs across attempts: {}",
        report.uniqueness.within_attempt.len(),
        report.uniqueness.cross_attempt.len()
    );
    let _ = writeln!(out, "\noverall: {}", if report.passed { "PASS" } else { "FAIL" });
    out
}

/// Write `validation.json`, `validation.txt` and one
/// `histograms/<variable>.csv` per scored variable into `dir`.
pub fn emit_report(report: &ValidationReport, dir: &Path) -> Result<()> {
    let hist_dir = dir.join("histograms");
    std::fs::create_dir_all(&hist_dir)?;
    std::fs::write(
        dir.join("validation.json"),
        serde_json::to_string_pretty(report)? + "\n",
    )?;
    std::fs::write(dir.join("validation.txt"), render_text(report))?;
    for v in &report.variables {
        let (Some(r), Some(s)) = (&v.reference, &v.synthetic) else {
            continue;
        };
        let mut w = csv::Writer::from_path(hist_dir.join(format!("{}.csv", v.variable)))?;
        w.write_record(["category", "reference", "synthetic"])?;
        for (i, c) in r.categories.iter().enumerate() {
            w.write_record([
                c.clone(),
                r.probabilities[i].to_string(),
                s.probabilities[i].to_string(),
            ])?;
        }
        w.flush()?;
    }
    Ok(())
}
