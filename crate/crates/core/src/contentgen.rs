//! Content assembly: turning reference CVs of a parameter combination into
//! synthetic CVs under the generation and privacy rules.
//!
//! One generation attempt per combination:
//! 1. collect the anonymized CVs matching every parameter (abandon below
//!    `min_group`);
//! 2. give every item of those CVs an institution drawn from the named
//!    entities of donors matching any single parameter, avoiding reference
//!    combinations;
//! 3. cluster education items (by field of study) and experience items (by
//!    role);
//! 4. per CV, size the sections and pick education, experience and skills
//!    items, then reject anything that breaks a rule.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::io::{ingest_cv, IngestOptions, RawCv, RawEducation, RawExperience};
use crate::corpus::{
    default_now, format_duration, validate_cv, Attribute, DemographicPair, EducationClassifier, EducationItem,
    EducationKind, ExperienceBand, ExperienceItem, JobSector, ParsedCV, SkillSet, Violation, YearMonth,
};
use crate::error::{Error, Result};
use crate::params::GenerationParams;
use crate::similarity::{cluster, Linkage, SimilarityProvider};
use crate::structgen::{CombineStrategy, SectionModel, DEFAULT_SKILLS_CAP};
use crate::tables::{
    candidate_pool, AnonymizedCvRecord, EntityIndex, IntermediateTables, SkillCategory, SkillRelevance,
};
use crate::text;
use crate::validate::{audit_uniqueness, InstitutionIndex, ItemSetIndex};

/// Probabilities of adding each optional education item after the bachelor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InclusionProbabilities {
    pub first_master: f64,
    /// Considered only when a first master was included.
    pub second_master: f64,
    pub phd: f64,
    pub abroad: f64,
}

impl Default for InclusionProbabilities {
    fn default() -> Self {
        InclusionProbabilities {
            first_master: 0.5,
            second_master: 0.20,
            phd: 0.15,
            abroad: 0.25,
        }
    }
}

/// How many CVs to request per combination.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountPolicy {
    Fixed(usize),
    /// This fraction of the combination's reference group, rounded up.
    GroupFraction(f64),
}

impl CountPolicy {
    pub fn requested(self, group_size: usize) -> usize {
        match self {
            CountPolicy::Fixed(n) => n,
            CountPolicy::GroupFraction(f) => (f * group_size as f64).ceil() as usize,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerationConfig {
    /// Smallest reference group a combination may be generated from (inclusive).
    pub min_group: usize,
    pub count: CountPolicy,
    /// Generation tries per requested CV before the combination gives up.
    pub attempts_per_cv: usize,
    /// Institution redraws before a CV is discarded.
    pub fill_retries: usize,
    /// Jaccard similarity at which two CVs of one attempt count as similar.
    pub uniqueness_threshold: f64,
    /// Jaccard similarity at which a synthetic CV resembles a reference CV.
    pub resemblance_threshold: f64,
    pub inclusion: InclusionProbabilities,
    pub strategy: CombineStrategy,
    pub skills_cap: usize,
    /// Experience cap for the open-ended "15+ years" band.
    pub open_band_cap_months: u32,
    /// Distance threshold for clustering section items.
    pub content_threshold: f64,
    pub linkage: Linkage,
    /// Emit skills under their reference subcategory instead of "others".
    pub preserve_skill_categories: bool,
    pub now: YearMonth,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            min_group: 20,
            count: CountPolicy::Fixed(30),
            attempts_per_cv: 10,
            fill_retries: 25,
            uniqueness_threshold: 0.9,
            resemblance_threshold: 0.9,
            inclusion: InclusionProbabilities::default(),
            strategy: CombineStrategy::Random,
            skills_cap: DEFAULT_SKILLS_CAP,
            open_band_cap_months: 480,
            content_threshold: 0.55,
            linkage: Linkage::Average,
            preserve_skill_categories: false,
            now: default_now(),
        }
    }
}

impl GenerationConfig {
    pub fn check(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must lie in [0, 1], got {v}")))
            }
        };
        let p = &self.inclusion;
        unit("inclusion.first_master", p.first_master)?;
        unit("inclusion.second_master", p.second_master)?;
        unit("inclusion.phd", p.phd)?;
        unit("inclusion.abroad", p.abroad)?;
        unit("uniqueness_threshold", self.uniqueness_threshold)?;
        unit("resemblance_threshold", self.resemblance_threshold)?;
        unit("content_threshold", self.content_threshold)?;
        if self.min_group == 0 {
            return Err(Error::Config("min_group must be at least 1".into()));
        }
        if self.skills_cap == 0 {
            return Err(Error::Config("skills_cap must be at least 1".into()));
        }
        if let CountPolicy::GroupFraction(f) = self.count {
            if !(f > 0.0 && f.is_finite()) {
                return Err(Error::Config(format!("group fraction must be positive, got {f}")));
            }
        }
        Ok(())
    }
}

/// Why a generated CV (or a whole combination) was not emitted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectionReason {
    /// The reference group is below `min_group`; the combination is abandoned.
    InsufficientReferences,
    /// No institution assignment avoided the reference combinations.
    PoolExhausted,
    /// The CV's institutions match or near-match a reference combination.
    NearMatch,
    /// The CV's items overlap a reference CV too closely.
    Resemblance,
    /// A duplicated item, or a CV similar to one already emitted in the attempt.
    Duplicate,
    EmptySection,
    /// A single drawn experience item already exceeds the band's cap.
    ExceedsBandCap,
    InvalidCv,
}

impl RejectionReason {
    pub fn as_str(self) -> &'static str {
        match self {
            RejectionReason::InsufficientReferences => "insufficient_references",
            RejectionReason::PoolExhausted => "pool_exhausted",
            RejectionReason::NearMatch => "near_match",
            RejectionReason::Resemblance => "resemblance",
            RejectionReason::Duplicate => "duplicate",
            RejectionReason::EmptySection => "empty_section",
            RejectionReason::ExceedsBandCap => "exceeds_band_cap",
            RejectionReason::InvalidCv => "invalid_cv",
        }
    }
}

impl fmt::Display for RejectionReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Provenance {
    /// Index of the combination in the generation list.
    pub combination: usize,
    pub params: GenerationParams,
    /// Seed of the combination's random stream.
    pub seed: u64,
    /// Position among the CVs emitted for the combination.
    pub ordinal: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticCv {
    pub id: String,
    pub cv: ParsedCV,
    pub provenance: Provenance,
}

/// A combination that meets the group threshold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlausibleCombination {
    pub params: GenerationParams,
    pub reference_count: usize,
}

/// Every sector x band x single attribute value whose anonymized-CV count
/// is at least `min_group`, ordered by sector, band, attribute and value.
pub fn enumerate_plausible_params(anonymized: &[AnonymizedCvRecord], min_group: usize) -> Vec<PlausibleCombination> {
    let mut counts: BTreeMap<(JobSector, ExperienceBand, Attribute, usize), (DemographicPair, usize)> = BTreeMap::new();
    for r in anonymized {
        for pair in r.profile.pairs() {
            let key = (
                r.profile.job_sector,
                r.profile.experience_band,
                pair.attribute,
                pair.value_rank(),
            );
            counts.entry(key).or_insert_with(|| (pair, 0)).1 += 1;
        }
    }
    counts
        .into_iter()
        .filter(|(_, (_, n))| *n >= min_group)
        .map(|((sector, band, _, _), (pair, n))| PlausibleCombination {
            params: GenerationParams::single(sector, band, pair),
            reference_count: n,
        })
        .collect()
}

/// The anonymized CVs matching every parameter, or an abandonment error
/// when there are fewer than `min_group`.
pub fn collect_reference_cvs<'a>(
    params: &GenerationParams,
    anonymized: &'a [AnonymizedCvRecord],
    min_group: usize,
) -> Result<Vec<&'a AnonymizedCvRecord>> {
    let cvs: Vec<&AnonymizedCvRecord> = anonymized.iter().filter(|r| params.matches(&r.profile)).collect();
    if cvs.len() < min_group {
        return Err(Error::Abandoned {
            count: cvs.len(),
            min_group,
        });
    }
    Ok(cvs)
}

/// An item with the institutions it may be given.
#[derive(Clone, Debug, PartialEq)]
pub struct Pooled<T> {
    pub item: T,
    pub candidates: Vec<String>,
}

/// A reference CV whose items received institutions.
#[derive(Clone, Debug, PartialEq)]
pub struct FilledCv {
    pub education: Vec<Pooled<EducationItem>>,
    pub experience: Vec<Pooled<ExperienceItem>>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FillOutcome {
    pub filled: Vec<FilledCv>,
    /// CVs dropped because no compliant assignment was found.
    pub exhausted: usize,
}

/// Read-only state shared by every generation attempt of a batch.
pub struct GenerationContext<'a> {
    pub tables: &'a IntermediateTables,
    pub provider: &'a dyn SimilarityProvider,
    pub config: &'a GenerationConfig,
    entities: EntityIndex,
    combinations: InstitutionIndex,
    references: ItemSetIndex,
    classifier: EducationClassifier,
}

impl<'a> GenerationContext<'a> {
    pub fn new(
        tables: &'a IntermediateTables,
        provider: &'a dyn SimilarityProvider,
        config: &'a GenerationConfig,
    ) -> Result<Self> {
        config.check()?;
        Ok(GenerationContext {
            tables,
            provider,
            config,
            entities: EntityIndex::new(&tables.named_entities),
            combinations: InstitutionIndex::from_combinations(&tables.combinations),
            references: ItemSetIndex::new(tables.anonymized.iter().map(|r| r.cv.item_set())),
            classifier: EducationClassifier::default(),
        })
    }

    /// Give every item of `cvs` an institution from the union of the named
    /// entities of donors sharing the sector, band and any one demographic
    /// value of `params`, narrowed by the degree/role mappings. Assignments
    /// that match or near-match a reference combination are redrawn.
    pub fn fill_institutions<R: Rng + ?Sized>(
        &self,
        cvs: &[&AnonymizedCvRecord],
        params: &GenerationParams,
        rng: &mut R,
    ) -> FillOutcome {
        let union = self
            .entities
            .union_for(params.job_sector, params.experience_band, &params.demographics);
        let sector = self.entities.sector_level(params.job_sector);
        let canon = &self.tables.canonicalizer;
        let mapping = &self.tables.entity_mapping;
        let mut out = FillOutcome::default();
        for rec in cvs {
            let education: Vec<Pooled<EducationItem>> = rec
                .cv
                .education_background
                .iter()
                .map(|e| {
                    let mapped = canon
                        .degree_group(&e.degree)
                        .and_then(|g| mapping.degree_to_institutions.get(g));
                    Pooled {
                        item: e.clone(),
                        candidates: candidate_pool(mapped, &union.institutions, &sector.institutions).entities,
                    }
                })
                .collect();
            let experience: Vec<Pooled<ExperienceItem>> = rec
                .cv
                .professional_experience
                .iter()
                .map(|e| {
                    let mapped = canon.role_group(&e.role).and_then(|g| mapping.role_to_companies.get(g));
                    Pooled {
                        item: e.clone(),
                        candidates: candidate_pool(mapped, &union.workplaces, &sector.workplaces).entities,
                    }
                })
                .collect();
            let mut filled = FilledCv { education, experience };
            if self.assign(&mut filled.education, &mut filled.experience, rng) {
                out.filled.push(filled);
            } else {
                out.exhausted += 1;
            }
        }
        out
    }

    /// Draw institutions for all slots until the list clears every
    /// reference combination. Returns false if a pool is empty or retries
    /// run out.
    fn assign<R: Rng + ?Sized>(
        &self,
        education: &mut [Pooled<EducationItem>],
        experience: &mut [Pooled<ExperienceItem>],
        rng: &mut R,
    ) -> bool {
        if education.iter().any(|p| p.candidates.is_empty()) || experience.iter().any(|p| p.candidates.is_empty()) {
            return false;
        }
        for _ in 0..self.config.fill_retries.max(1) {
            for p in education.iter_mut() {
                p.item.institution = p.candidates.choose(rng).cloned();
            }
            for p in experience.iter_mut() {
                p.item.institution = p.candidates.choose(rng).cloned();
            }
            if self.combination_clear(education, experience) {
                return true;
            }
        }
        false
    }

    fn combination_clear(&self, education: &[Pooled<EducationItem>], experience: &[Pooled<ExperienceItem>]) -> bool {
        let list: Vec<&str> = education
            .iter()
            .filter_map(|p| p.item.institution.as_deref())
            .chain(experience.iter().filter_map(|p| p.item.institution.as_deref()))
            .collect();
        self.combinations.find_near_match(&list).is_none()
    }

    /// Collect, fill, fit and cluster: everything an attempt needs before
    /// producing CVs.
    pub fn prepare<R: Rng + ?Sized>(&self, params: &GenerationParams, rng: &mut R) -> Result<Attempt> {
        let refs = collect_reference_cvs(params, &self.tables.anonymized, self.config.min_group)?;
        let model = SectionModel::fit(params, &self.tables.anonymized)?;
        let fill = self.fill_institutions(&refs, params, rng);
        let education: Vec<Pooled<EducationItem>> = fill.filled.iter().flat_map(|f| f.education.clone()).collect();
        let experience: Vec<Pooled<ExperienceItem>> = fill.filled.iter().flat_map(|f| f.experience.clone()).collect();
        let fields: Vec<String> = education
            .iter()
            .map(|p| {
                let f = self.classifier.field_of_study(&p.item.degree);
                if f.is_empty() {
                    text::normalize(&p.item.degree)
                } else {
                    f
                }
            })
            .collect();
        let roles: Vec<String> = experience.iter().map(|p| p.item.role.clone()).collect();
        let labels = |items: &[String]| -> Result<Vec<usize>> {
            if items.is_empty() {
                return Ok(Vec::new());
            }
            Ok(cluster(self.provider, items, self.config.content_threshold, self.config.linkage)?.labels)
        };
        Ok(Attempt {
            reference_count: refs.len(),
            exhausted: fill.exhausted,
            band: params.experience_band,
            model,
            education_labels: labels(&fields)?,
            experience_labels: labels(&roles)?,
            education,
            experience,
        })
    }

    /// One CV for `params` with a fresh attempt. Batch generation reuses
    /// one [`Attempt`] per combination instead.
    pub fn generate_cv<R: Rng + ?Sized>(
        &self,
        params: &GenerationParams,
        rng: &mut R,
    ) -> std::result::Result<ParsedCV, RejectionReason> {
        let attempt = self.prepare(params, rng).map_err(|e| match e {
            Error::Abandoned { .. } | Error::SparseParameter { .. } => RejectionReason::InsufficientReferences,
            _ => RejectionReason::InvalidCv,
        })?;
        attempt.generate_cv(self, &ItemSetIndex::default(), rng)
    }

    /// Run one generation attempt for the combination at `index`.
    pub fn run_attempt(&self, index: usize, params: &GenerationParams, seed: u64) -> (Vec<SyntheticCv>, ComboReport) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut report = ComboReport {
            index,
            label: params.to_string(),
            params: params.clone(),
            seed,
            reference_count: 0,
            requested: 0,
            produced: 0,
            attempts: 0,
            discarded_references: 0,
            rejections: BTreeMap::new(),
            error: None,
        };
        let attempt = match self.prepare(params, &mut rng) {
            Ok(a) => a,
            Err(e) => {
                let count = self
                    .tables
                    .anonymized
                    .iter()
                    .filter(|r| params.matches(&r.profile))
                    .count();
                report.reference_count = count;
                report.requested = self.config.count.requested(count);
                let reason = match e {
                    Error::Abandoned { .. } | Error::SparseParameter { .. } => RejectionReason::InsufficientReferences,
                    _ => RejectionReason::InvalidCv,
                };
                report.attempts = report.requested;
                report.rejections.insert(reason, report.requested);
                report.error = Some(e.to_string());
                return (Vec::new(), report);
            }
        };
        report.reference_count = attempt.reference_count;
        report.discarded_references = attempt.exhausted;
        report.requested = self.config.count.requested(attempt.reference_count);
        let budget = report.requested * self.config.attempts_per_cv.max(1);
        let mut emitted = ItemSetIndex::default();
        let mut out = Vec::new();
        while out.len() < report.requested && report.attempts < budget {
            report.attempts += 1;
            match attempt.generate_cv(self, &emitted, &mut rng) {
                Ok(cv) => {
                    emitted.insert(&cv.item_set());
                    let ordinal = out.len();
                    out.push(SyntheticCv {
                        id: format!("c{index:04}-{ordinal:03}"),
                        cv,
                        provenance: Provenance {
                            combination: index,
                            params: params.clone(),
                            seed,
                            ordinal,
                        },
                    });
                }
                Err(reason) => *report.rejections.entry(reason).or_insert(0) += 1,
            }
        }
        report.produced = out.len();
        (out, report)
    }
}

/// Per-combination state: the fitted section model and the clustered,
/// institution-filled item pools.
#[derive(Clone, Debug)]
pub struct Attempt {
    pub reference_count: usize,
    pub exhausted: usize,
    pub band: ExperienceBand,
    pub model: SectionModel,
    pub education: Vec<Pooled<EducationItem>>,
    pub education_labels: Vec<usize>,
    pub experience: Vec<Pooled<ExperienceItem>>,
    pub experience_labels: Vec<usize>,
}

impl Attempt {
    /// Size, pick and check one CV. `emitted` holds the item sets already
    /// produced in this attempt.
    pub fn generate_cv<R: Rng + ?Sized>(
        &self,
        ctx: &GenerationContext<'_>,
        emitted: &ItemSetIndex,
        rng: &mut R,
    ) -> std::result::Result<ParsedCV, RejectionReason> {
        let cfg = ctx.config;
        let sizes = self.model.sample(rng, cfg.strategy, cfg.skills_cap);
        let edu_items: Vec<EducationItem> = self.education.iter().map(|p| p.item.clone()).collect();
        let exp_items: Vec<ExperienceItem> = self.experience.iter().map(|p| p.item.clone()).collect();

        let edu = pick_education(
            &edu_items,
            &self.education_labels,
            sizes.education,
            &cfg.inclusion,
            cfg.now,
            rng,
        );
        let cap = self.band.cap_months(cfg.open_band_cap_months);
        let exp = pick_experience(&exp_items, &self.experience_labels, sizes.experience, cap, cfg.now, rng);
        if edu.is_empty() || exp.is_empty() {
            return Err(RejectionReason::EmptySection);
        }
        // the section keeps an over-long first pick; the CV does not
        if exp
            .iter()
            .map(|&i| self.experience[i].item.duration_months)
            .sum::<u32>()
            > cap
        {
            return Err(RejectionReason::ExceedsBandCap);
        }
        let mut education: Vec<Pooled<EducationItem>> = edu.iter().map(|&i| self.education[i].clone()).collect();
        let mut experience: Vec<Pooled<ExperienceItem>> = exp.iter().map(|&i| self.experience[i].clone()).collect();

        let chosen_edu: Vec<EducationItem> = education.iter().map(|p| p.item.clone()).collect();
        let chosen_exp: Vec<ExperienceItem> = experience.iter().map(|p| p.item.clone()).collect();
        let skills = generate_skills_section(
            &chosen_edu,
            &chosen_exp,
            &ctx.tables.skill_relevance,
            &ctx.tables.canonicalizer,
            sizes.skills,
        );
        if skills.is_empty() {
            return Err(RejectionReason::EmptySection);
        }

        // items keep the institutions from the fill step unless the mix
        // collides with a reference combination
        if !ctx.combination_clear(&education, &experience) && !ctx.assign(&mut education, &mut experience, rng) {
            return Err(RejectionReason::NearMatch);
        }

        let cv = ParsedCV {
            education_background: education.into_iter().map(|p| p.item).collect(),
            professional_experience: experience.into_iter().map(|p| p.item).collect(),
            skills: skill_set(skills, &ctx.tables.skill_relevance, cfg.preserve_skill_categories),
        };
        let report = validate_cv(&cv, true);
        if let Some(v) = report.violations.first() {
            return Err(match v {
                Violation::EmptySection { .. } => RejectionReason::EmptySection,
                Violation::DuplicateItem { .. } => RejectionReason::Duplicate,
                Violation::DateInversion { .. } => RejectionReason::InvalidCv,
            });
        }
        let items = cv.item_set();
        if ctx.references.find_similar(&items, cfg.resemblance_threshold).is_some() {
            return Err(RejectionReason::Resemblance);
        }
        if emitted.find_similar(&items, cfg.uniqueness_threshold).is_some() {
            return Err(RejectionReason::Duplicate);
        }
        Ok(cv)
    }
}

fn skill_set(skills: Vec<String>, relevance: &SkillRelevance, preserve: bool) -> SkillSet {
    let mut set = SkillSet::default();
    for s in skills {
        let category = if preserve {
            relevance
                .skill_category
                .get(&s)
                .copied()
                .unwrap_or(SkillCategory::Others)
        } else {
            SkillCategory::Others
        };
        match category {
            SkillCategory::Hard => set.hard.push(s),
            SkillCategory::Soft => set.soft.push(s),
            SkillCategory::Languages => set.languages.push(s),
            SkillCategory::Others => set.others.push(s),
        }
    }
    set
}

fn same_text(a: &str, b: &str) -> bool {
    text::normalize(a) == text::normalize(b)
}

/// Indices of the education items to include, in chronological order.
///
/// Starts from a uniformly drawn bachelor (or, without bachelors, a single
/// vocational item). Masters, a PhD and an abroad stay are then each added
/// with their inclusion probability, drawn from the bachelor's cluster and
/// respecting the chronology: masters start after the bachelor ends and do
/// not overlap, a PhD starts no earlier than the last master (or after the
/// bachelor), and an abroad stay lies within an included degree.
pub fn pick_education<R: Rng + ?Sized>(
    pool: &[EducationItem],
    labels: &[usize],
    n: usize,
    probs: &InclusionProbabilities,
    now: YearMonth,
    rng: &mut R,
) -> Vec<usize> {
    let of_kind = |kind: EducationKind| -> Vec<usize> { (0..pool.len()).filter(|&i| pool[i].kind == kind).collect() };
    let bachelors = of_kind(EducationKind::Bachelor);
    let Some(&b) = bachelors.choose(rng) else {
        return of_kind(EducationKind::Vocational)
            .choose(rng)
            .map(|&v| vec![v])
            .unwrap_or_default();
    };
    let n = n.clamp(1, 5);
    let mut chosen = vec![b];
    let cluster = labels[b];
    let eligible = |i: usize, chosen: &[usize]| {
        labels[i] == cluster && !chosen.iter().any(|&c| same_text(&pool[c].degree, &pool[i].degree))
    };
    let bachelor_end = pool[b].end(now);

    let mut last_master_end: Option<YearMonth> = None;
    for p in [probs.first_master, probs.second_master] {
        if chosen.len() >= n || !rng.random_bool(p) {
            break;
        }
        let cands: Vec<usize> = of_kind(EducationKind::Master)
            .into_iter()
            .filter(|&i| {
                eligible(i, &chosen)
                    && pool[i].start_date > bachelor_end
                    && last_master_end.is_none_or(|e| pool[i].start_date >= e)
            })
            .collect();
        let Some(&m) = cands.choose(rng) else { break };
        chosen.push(m);
        last_master_end = Some(pool[m].end(now));
    }

    if chosen.len() < n && rng.random_bool(probs.phd) {
        let cands: Vec<usize> = of_kind(EducationKind::PhD)
            .into_iter()
            .filter(|&i| {
                eligible(i, &chosen)
                    && match last_master_end {
                        Some(e) => pool[i].start_date >= e,
                        None => pool[i].start_date > bachelor_end,
                    }
            })
            .collect();
        if let Some(&d) = cands.choose(rng) {
            chosen.push(d);
        }
    }

    if chosen.len() < n && rng.random_bool(probs.abroad) {
        let cands: Vec<usize> = of_kind(EducationKind::Abroad)
            .into_iter()
            .filter(|&i| {
                eligible(i, &chosen)
                    && chosen
                        .iter()
                        .any(|&c| pool[i].start_date >= pool[c].start_date && pool[i].end(now) <= pool[c].end(now))
            })
            .collect();
        if let Some(&a) = cands.choose(rng) {
            chosen.push(a);
        }
    }
    chosen.sort_by_key(|&i| (pool[i].start_date, pool[i].end(now)));
    chosen
}

/// [`pick_education`] returning the items themselves.
pub fn generate_education_section<R: Rng + ?Sized>(
    pool: &[EducationItem],
    labels: &[usize],
    n: usize,
    probs: &InclusionProbabilities,
    now: YearMonth,
    rng: &mut R,
) -> Vec<EducationItem> {
    pick_education(pool, labels, n, probs, now, rng)
        .into_iter()
        .map(|i| pool[i].clone())
        .collect()
}

/// Indices of the experience items to include, in chronological order.
///
/// The first item is drawn uniformly. If it alone exceeds `cap_months` the
/// section ends there; otherwise items from the first item's cluster are
/// appended, each starting no earlier than the previous one ends, with a
/// role not yet used, while the total stays within the cap.
pub fn pick_experience<R: Rng + ?Sized>(
    pool: &[ExperienceItem],
    labels: &[usize],
    n: usize,
    cap_months: u32,
    now: YearMonth,
    rng: &mut R,
) -> Vec<usize> {
    if pool.is_empty() {
        return Vec::new();
    }
    let first = rng.random_range(0..pool.len());
    let mut chosen = vec![first];
    let mut total = pool[first].duration_months;
    if total > cap_months {
        return chosen;
    }
    while chosen.len() < n {
        let last_end = pool[*chosen.last().expect("non-empty")].end(now);
        let cands: Vec<usize> = (0..pool.len())
            .filter(|&i| {
                labels[i] == labels[first]
                    && pool[i].start_date >= last_end
                    && total + pool[i].duration_months <= cap_months
                    && !chosen.iter().any(|&c| same_text(&pool[c].role, &pool[i].role))
            })
            .collect();
        let Some(&next) = cands.choose(rng) else { break };
        total += pool[next].duration_months;
        chosen.push(next);
    }
    chosen
}

pub fn generate_experience_section<R: Rng + ?Sized>(
    pool: &[ExperienceItem],
    labels: &[usize],
    n: usize,
    cap_months: u32,
    now: YearMonth,
    rng: &mut R,
) -> Vec<ExperienceItem> {
    pick_experience(pool, labels, n, cap_months, now, rng)
        .into_iter()
        .map(|i| pool[i].clone())
        .collect()
}

/// Sum the skill distributions of every included item's canonical group
/// and keep the `n` highest-scoring skills (ties alphabetical).
pub fn generate_skills_section(
    education: &[EducationItem],
    experience: &[ExperienceItem],
    relevance: &SkillRelevance,
    canon: &crate::similarity::Canonicalizer,
    n: usize,
) -> Vec<String> {
    let mut scores: BTreeMap<&str, f64> = BTreeMap::new();
    let dists = education
        .iter()
        .filter_map(|e| {
            canon
                .degree_group(&e.degree)
                .and_then(|g| relevance.degree_to_skill.get(g))
        })
        .chain(
            experience
                .iter()
                .filter_map(|e| canon.role_group(&e.role).and_then(|g| relevance.role_to_skill.get(g))),
        );
    for dist in dists {
        for (skill, p) in dist {
            *scores.entry(skill.as_str()).or_insert(0.0) += p;
        }
    }
    let mut ranked: Vec<(&str, f64)> = scores.into_iter().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.into_iter().take(n).map(|(s, _)| s.to_string()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComboReport {
    pub index: usize,
    pub label: String,
    pub params: GenerationParams,
    pub seed: u64,
    pub reference_count: usize,
    pub requested: usize,
    pub produced: usize,
    /// Equals `produced` plus the sum of `rejections`.
    pub attempts: usize,
    /// Reference CVs dropped during institution filling.
    pub discarded_references: usize,
    pub rejections: BTreeMap<RejectionReason, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GenerationTotals {
    pub combinations: usize,
    pub requested: usize,
    pub produced: usize,
    pub attempts: usize,
    pub rejections: BTreeMap<RejectionReason, usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub master_seed: u64,
    pub provider: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provider_fallback: Option<String>,
    pub totals: GenerationTotals,
    /// CVs similar to a CV of a different attempt (not rejected).
    pub cross_attempt_duplicates: usize,
    pub combinations: Vec<ComboReport>,
    /// Effective configuration of the run.
    pub config: serde_json::Value,
}

impl GenerationReport {
    /// Plain-text summary: one line per combination, then totals.
    pub fn render_text(&self) -> String {
        use std::fmt::Write as _;
        let reasons = |r: &BTreeMap<RejectionReason, usize>| {
            if r.is_empty() {
                return "no rejections".to_string();
            }
            r.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
        };
        let mut out = String::new();
        writeln!(out, "master seed: {}", self.master_seed).expect("writing to a String");
        match &self.provider_fallback {
            Some(why) => writeln!(out, "similarity provider: {} (fallback: {why})", self.provider),
            None => writeln!(out, "similarity provider: {}", self.provider),
        }
        .expect("writing to a String");
        out.push('\n');
        for c in &self.combinations {
            writeln!(
                out,
                "[{:04}] {} | references {} | produced {}/{} in {} attempts | {}",
                c.index,
                c.label,
                c.reference_count,
                c.produced,
                c.requested,
                c.attempts,
                reasons(&c.rejections)
            )
            .expect("writing to a String");
        }
        let t = &self.totals;
        writeln!(
            out,
            "\ncombinations {} | produced {}/{} in {} attempts | {}\ncross-attempt similar pairs: {}",
            t.combinations,
            t.produced,
            t.requested,
            t.attempts,
            reasons(&t.rejections),
            self.cross_attempt_duplicates
        )
        .expect("writing to a String");
        out
    }
}

#[derive(Clone, Debug)]
pub struct Batch {
    pub cvs: Vec<SyntheticCv>,
    pub report: GenerationReport,
}

/// Run one attempt per combination, seeded with `master_seed + index`.
/// Attempts may run in parallel; results are merged in combination order,
/// so the output does not depend on scheduling.
pub fn generate_batch(
    ctx: &GenerationContext<'_>,
    combinations: &[GenerationParams],
    master_seed: u64,
    workers: Option<usize>,
) -> Result<Batch> {
    let run = |(i, p): (usize, &GenerationParams)| ctx.run_attempt(i, p, master_seed.wrapping_add(i as u64));
    let results = run_all(combinations, workers, run)?;

    let mut cvs = Vec::new();
    let mut reports = Vec::new();
    let mut totals = GenerationTotals {
        combinations: combinations.len(),
        ..GenerationTotals::default()
    };
    for (c, r) in results {
        totals.requested += r.requested;
        totals.produced += r.produced;
        totals.attempts += r.attempts;
        for (k, v) in &r.rejections {
            *totals.rejections.entry(*k).or_insert(0) += v;
        }
        cvs.extend(c);
        reports.push(r);
    }
    let cross = audit_uniqueness(&cvs, ctx.config.uniqueness_threshold)
        .cross_attempt
        .len();
    Ok(Batch {
        cvs,
        report: GenerationReport {
            master_seed,
            provider: ctx.provider.name().to_string(),
            provider_fallback: None,
            totals,
            cross_attempt_duplicates: cross,
            combinations: reports,
            config: serde_json::to_value(ctx.config)?,
        },
    })
}

#[cfg(feature = "parallel")]
fn run_all<T, F>(items: &[GenerationParams], workers: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn((usize, &GenerationParams)) -> T + Sync + Send,
{
    use rayon::prelude::*;
    let go = || items.par_iter().enumerate().map(&f).collect::<Vec<T>>();
    match workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
            Ok(pool.install(go))
        }
        None => Ok(go()),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_all<T, F>(items: &[GenerationParams], _workers: Option<usize>, f: F) -> Result<Vec<T>>
where
    F: Fn((usize, &GenerationParams)) -> T,
{
    Ok(items.iter().enumerate().map(f).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ListingEducation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub institution: Option<String>,
    pub start_date: String,
    pub end_date: String,
    pub degree: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ListingExperience {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub institution: Option<String>,
    pub start_date: String,
    pub end_date: String,
    pub role: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub duration: String,
    pub duration_months: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ListingSkills {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hard: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub soft: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub languages: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub others: Vec<String>,
}

/// A synthetic CV in its published JSON shape: long-form dates and a
/// duration per experience item.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ListingCv {
    pub education_background: Vec<ListingEducation>,
    pub professional_experience: Vec<ListingExperience>,
    pub skills: ListingSkills,
}

impl ListingCv {
    pub fn from_cv(cv: &ParsedCV) -> Self {
        ListingCv {
            education_background: cv
                .education_background
                .iter()
                .map(|e| ListingEducation {
                    institution: e.institution.clone(),
                    start_date: e.start_date.long_form(),
                    end_date: e.end_date.long_form(),
                    degree: e.degree.clone(),
                })
                .collect(),
            professional_experience: cv
                .professional_experience
                .iter()
                .map(|e| ListingExperience {
                    institution: e.institution.clone(),
                    start_date: e.start_date.long_form(),
                    end_date: e.end_date.long_form(),
                    role: e.role.clone(),
                    description: e.description.clone(),
                    duration: format_duration(e.duration_months),
                    duration_months: e.duration_months,
                })
                .collect(),
            skills: ListingSkills {
                hard: cv.skills.hard.clone(),
                soft: cv.skills.soft.clone(),
                languages: cv.skills.languages.clone(),
                others: cv.skills.others.clone(),
            },
        }
    }

    pub fn to_cv(&self, opts: &IngestOptions) -> Result<ParsedCV> {
        let raw = RawCv {
            education_background: self
                .education_background
                .iter()
                .map(|e| RawEducation {
                    degree: e.degree.clone(),
                    start_date: e.start_date.clone(),
                    end_date: e.end_date.clone(),
                    institution: e.institution.clone(),
                })
                .collect(),
            professional_experience: self
                .professional_experience
                .iter()
                .map(|e| RawExperience {
                    role: e.role.clone(),
                    start_date: e.start_date.clone(),
                    end_date: e.end_date.clone(),
                    institution: e.institution.clone(),
                    description: e.description.clone(),
                })
                .collect(),
            skills: SkillSet {
                hard: self.skills.hard.clone(),
                soft: self.skills.soft.clone(),
                languages: self.skills.languages.clone(),
                others: self.skills.others.clone(),
            },
        };
        ingest_cv(&raw, opts)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub file: String,
    pub provenance: Provenance,
}

pub const MANIFEST_FILE: &str = "manifest.json";

/// Write each CV as `cvs/<id>.json` plus a manifest carrying provenance.
pub fn write_dataset(dir: &Path, cvs: &[SyntheticCv]) -> Result<()> {
    let cv_dir = dir.join("cvs");
    std::fs::create_dir_all(&cv_dir)?;
    let mut manifest = Vec::with_capacity(cvs.len());
    for s in cvs {
        let file = format!("cvs/{}.json", s.id);
        std::fs::write(
            dir.join(&file),
            serde_json::to_string_pretty(&ListingCv::from_cv(&s.cv))? + "\n",
        )?;
        manifest.push(ManifestEntry {
            id: s.id.clone(),
            file,
            provenance: s.provenance.clone(),
        });
    }
    std::fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(())
}

pub fn read_dataset(dir: &Path, opts: &IngestOptions) -> Result<Vec<SyntheticCv>> {
    let manifest: Vec<ManifestEntry> = serde_json::from_str(&std::fs::read_to_string(dir.join(MANIFEST_FILE))?)?;
    manifest
        .into_iter()
        .map(|m| {
            let listing: ListingCv = serde_json::from_str(&std::fs::read_to_string(dir.join(&m.file))?)?;
            Ok(SyntheticCv {
                id: m.id,
                cv: listing.to_cv(opts)?,
                provenance: m.provenance,
            })
        })
        .collect()
}

/// Distinct normalized institutions of a CV, for reporting.
pub fn institution_set(cv: &ParsedCV) -> BTreeSet<String> {
    cv.institutions().into_iter().map(text::normalize).collect()
}
