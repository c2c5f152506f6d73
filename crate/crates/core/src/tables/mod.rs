//! The three unlinked intermediate tables, skill-relevance distributions
//! and entity pools that feed generation.
//!
//! * anonymized CVs: each CV with institutions stripped, plus its profile;
//! * combinations: each CV's institutions, workplaces and skills with only
//!   sector and experience band attached;
//! * named entities: per (sector, band, attribute, value) group of at
//!   least `k_min` CVs, the alphabetized institutions and workplaces.

mod store;

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub use store::{IntermediateTables, TableOptions, TablePaths};

use crate::corpus::{
    repair_education_durations, Attribute, DemographicPair, DemographicProfile, ExperienceBand, JobSector, ParsedCV,
    ReferenceRecord, RepairPolicy,
};
use crate::error::{Error, Result};
use crate::similarity::Canonicalizer;
use crate::text;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnonymizedCvRecord {
    pub cv: ParsedCV,
    pub profile: DemographicProfile,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombinationRecord {
    pub job_sector: JobSector,
    pub experience_band: ExperienceBand,
    pub education_institutions: Vec<String>,
    pub workplaces: Vec<String>,
    pub skills: Vec<String>,
}

impl CombinationRecord {
    /// Institution multiset: education institutions and workplaces.
    pub fn institutions(&self) -> Vec<&str> {
        self.education_institutions
            .iter()
            .chain(&self.workplaces)
            .map(String::as_str)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedEntityRecord {
    pub job_sector: JobSector,
    pub experience_band: ExperienceBand,
    pub variable: Attribute,
    pub variable_value: String,
    pub cv_count: usize,
    pub education_institutions: Vec<String>,
    pub workplaces: Vec<String>,
}

/// Probability distribution over skills, keyed by skill display text.
pub type SkillDistribution = BTreeMap<String, f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SkillCategory {
    Hard,
    Soft,
    Languages,
    Others,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SkillRelevance {
    pub degree_to_skill: BTreeMap<String, SkillDistribution>,
    pub role_to_skill: BTreeMap<String, SkillDistribution>,
    /// Subcategory each skill was most often listed under.
    #[serde(default)]
    pub skill_category: BTreeMap<String, SkillCategory>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityMapping {
    pub role_to_companies: BTreeMap<String, Vec<String>>,
    pub degree_to_institutions: BTreeMap<String, Vec<String>>,
}

/// Strip institutions, repair education durations and store the corpus in
/// a seeded random order.
pub fn build_anonymized_table<R: Rng>(
    corpus: &[ReferenceRecord],
    repair: &RepairPolicy,
    rng: &mut R,
) -> Result<Vec<AnonymizedCvRecord>> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut out: Vec<AnonymizedCvRecord> = corpus
        .iter()
        .map(|r| {
            let mut cv = r.cv.without_institutions();
            cv.education_background = repair_education_durations(&cv.education_background, repair);
            AnonymizedCvRecord {
                cv,
                profile: r.profile.clone(),
            }
        })
        .collect();
    out.shuffle(rng);
    Ok(out)
}

pub fn build_combinations_table<R: Rng>(corpus: &[ReferenceRecord], rng: &mut R) -> Result<Vec<CombinationRecord>> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut out: Vec<CombinationRecord> = corpus
        .iter()
        .map(|r| CombinationRecord {
            job_sector: r.profile.job_sector,
            experience_band: r.profile.experience_band,
            education_institutions: r
                .cv
                .education_background
                .iter()
                .filter_map(|e| e.institution.clone())
                .collect(),
            workplaces: r
                .cv
                .professional_experience
                .iter()
                .filter_map(|e| e.institution.clone())
                .collect(),
            skills: r.cv.skills.iter().cloned().collect(),
        })
        .collect();
    out.shuffle(rng);
    Ok(out)
}

/// One record per (sector, band, attribute, value) group holding at least
/// `k_min` CVs; smaller groups are omitted.
pub fn build_named_entities_table(corpus: &[ReferenceRecord], k_min: usize) -> Vec<NamedEntityRecord> {
    type Key = (JobSector, ExperienceBand, Attribute, usize, String);
    let mut groups: BTreeMap<Key, (usize, BTreeSet<String>, BTreeSet<String>)> = BTreeMap::new();
    for r in corpus {
        for pair in r.profile.pairs() {
            let key = (
                r.profile.job_sector,
                r.profile.experience_band,
                pair.attribute,
                pair.value_rank(),
                pair.value.clone(),
            );
            let g = groups.entry(key).or_default();
            g.0 += 1;
            g.1.extend(r.cv.education_background.iter().filter_map(|e| e.institution.clone()));
            g.2.extend(
                r.cv.professional_experience
                    .iter()
                    .filter_map(|e| e.institution.clone()),
            );
        }
    }
    groups
        .into_iter()
        .filter(|(_, g)| g.0 >= k_min)
        .map(
            |((sector, band, attr, _, value), (count, edu, work))| NamedEntityRecord {
                job_sector: sector,
                experience_band: band,
                variable: attr,
                variable_value: value,
                cv_count: count,
                education_institutions: edu.into_iter().collect(),
                workplaces: work.into_iter().collect(),
            },
        )
        .collect()
}

/// Per canonical degree and role group, the distribution of skills that
/// co-occur with the group: each CV contributes one count per (group,
/// skill) pair it contains.
pub fn build_skill_relevance<'a>(cvs: impl IntoIterator<Item = &'a ParsedCV>, canon: &Canonicalizer) -> SkillRelevance {
    let mut degree_counts: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    let mut role_counts: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    let mut spellings: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    let mut categories: BTreeMap<String, BTreeMap<SkillCategory, usize>> = BTreeMap::new();

    let cvs: Vec<&ParsedCV> = cvs.into_iter().collect();
    for cv in &cvs {
        let lists = [
            (SkillCategory::Hard, &cv.skills.hard),
            (SkillCategory::Soft, &cv.skills.soft),
            (SkillCategory::Languages, &cv.skills.languages),
            (SkillCategory::Others, &cv.skills.others),
        ];
        for (cat, list) in lists {
            for s in list {
                let key = text::normalize(s);
                *spellings.entry(key.clone()).or_default().entry(s.clone()).or_insert(0) += 1;
                *categories.entry(key).or_default().entry(cat).or_insert(0) += 1;
            }
        }
    }
    // display form: most frequent spelling, ties lexicographic
    let display: BTreeMap<String, String> = spellings
        .iter()
        .map(|(k, v)| {
            let best = v
                .iter()
                .fold(None::<(&String, usize)>, |b, (s, &c)| match b {
                    Some((_, bc)) if bc >= c => b,
                    _ => Some((s, c)),
                })
                .map(|(s, _)| s.clone())
                .unwrap_or_default();
            (k.clone(), best)
        })
        .collect();

    for cv in &cvs {
        let skills: BTreeSet<&String> = cv.skills.iter().map(|s| &display[&text::normalize(s)]).collect();
        let degree_groups: BTreeSet<&str> = cv
            .education_background
            .iter()
            .filter_map(|e| canon.degree_group(&e.degree))
            .collect();
        let role_groups: BTreeSet<&str> = cv
            .professional_experience
            .iter()
            .filter_map(|e| canon.role_group(&e.role))
            .collect();
        for (groups, counts) in [(degree_groups, &mut degree_counts), (role_groups, &mut role_counts)] {
            for g in groups {
                for s in &skills {
                    *counts
                        .entry(g.to_string())
                        .or_default()
                        .entry((*s).clone())
                        .or_insert(0.0) += 1.0;
                }
            }
        }
    }
    let normalize = |m: BTreeMap<String, BTreeMap<String, f64>>| -> BTreeMap<String, SkillDistribution> {
        m.into_iter()
            .filter_map(|(g, counts)| {
                let total: f64 = counts.values().sum();
                (total > 0.0).then(|| (g, counts.into_iter().map(|(s, c)| (s, c / total)).collect()))
            })
            .collect()
    };
    let skill_category = categories
        .into_iter()
        .map(|(k, cats)| {
            let best = cats
                .iter()
                .fold(None::<(SkillCategory, usize)>, |b, (&cat, &c)| match b {
                    Some((_, bc)) if bc >= c => b,
                    _ => Some((cat, c)),
                })
                .map(|(c, _)| c)
                .unwrap_or(SkillCategory::Others);
            (display[&k].clone(), best)
        })
        .collect();
    SkillRelevance {
        degree_to_skill: normalize(degree_counts),
        role_to_skill: normalize(role_counts),
        skill_category,
    }
}

type EntitySets = (BTreeSet<String>, BTreeSet<String>);

/// Lookup of named-entity records by sector, band and demographic value.
#[derive(Clone, Debug, Default)]
pub struct EntityIndex {
    by_key: BTreeMap<(JobSector, ExperienceBand, Attribute, String), EntitySets>,
    by_sector: BTreeMap<JobSector, EntitySets>,
}

/// Education institutions and workplaces available to an item slot.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EntityPool {
    pub institutions: BTreeSet<String>,
    pub workplaces: BTreeSet<String>,
}

impl EntityIndex {
    pub fn new(records: &[NamedEntityRecord]) -> Self {
        let mut idx = EntityIndex::default();
        for r in records {
            let e = idx
                .by_key
                .entry((r.job_sector, r.experience_band, r.variable, r.variable_value.clone()))
                .or_default();
            e.0.extend(r.education_institutions.iter().cloned());
            e.1.extend(r.workplaces.iter().cloned());
            let s = idx.by_sector.entry(r.job_sector).or_default();
            s.0.extend(r.education_institutions.iter().cloned());
            s.1.extend(r.workplaces.iter().cloned());
        }
        idx
    }

    /// Union of the entities of every group matching the sector, band and
    /// any one of `pairs`.
    pub fn union_for(&self, sector: JobSector, band: ExperienceBand, pairs: &[DemographicPair]) -> EntityPool {
        let mut pool = EntityPool::default();
        for p in pairs {
            if let Some((e, w)) = self.by_key.get(&(sector, band, p.attribute, p.value.clone())) {
                pool.institutions.extend(e.iter().cloned());
                pool.workplaces.extend(w.iter().cloned());
            }
        }
        pool
    }

    pub fn sector_level(&self, sector: JobSector) -> EntityPool {
        self.by_sector
            .get(&sector)
            .map(|(e, w)| EntityPool {
                institutions: e.clone(),
                workplaces: w.clone(),
            })
            .unwrap_or_default()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolSource {
    /// Mapped entities of the item's canonical group within the demographic union.
    Mapped,
    /// Mapped entities of the group found anywhere in the sector.
    MappedSector,
    /// The item's group has no usable mapping; all sector entities.
    SectorFallback,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidatePool {
    pub source: PoolSource,
    pub entities: Vec<String>,
}

/// Candidates for one item slot: the group's mapped entities restricted to
/// `union`, else restricted to the sector, else every sector entity.
/// Mapped candidates keep the mapping's rank order.
pub fn candidate_pool(
    mapped: Option<&Vec<String>>,
    union: &BTreeSet<String>,
    sector: &BTreeSet<String>,
) -> CandidatePool {
    if let Some(mapped) = mapped {
        let within: Vec<String> = mapped.iter().filter(|e| union.contains(*e)).cloned().collect();
        if !within.is_empty() {
            return CandidatePool {
                source: PoolSource::Mapped,
                entities: within,
            };
        }
        let within: Vec<String> = mapped.iter().filter(|e| sector.contains(*e)).cloned().collect();
        if !within.is_empty() {
            return CandidatePool {
                source: PoolSource::MappedSector,
                entities: within,
            };
        }
    }
    CandidatePool {
        source: PoolSource::SectorFallback,
        entities: sector.iter().cloned().collect(),
    }
}

/// An anonymized CV with candidate entities for each emptied institution slot.
#[derive(Clone, Debug, PartialEq)]
pub struct ShuffledCv {
    pub record: AnonymizedCvRecord,
    pub education_pools: Vec<CandidatePool>,
    pub experience_pools: Vec<CandidatePool>,
}

/// Annotate every institution slot with entities drawn from donors sharing
/// the record's sector, band and any of its demographic values, filtered by
/// the degree/role mappings. Pool order is shuffled with `rng`.
pub fn shuffle_institutions<R: Rng>(
    anonymized: &[AnonymizedCvRecord],
    named_entities: &[NamedEntityRecord],
    mapping: &EntityMapping,
    canon: &Canonicalizer,
    rng: &mut R,
) -> Vec<ShuffledCv> {
    let index = EntityIndex::new(named_entities);
    anonymized
        .iter()
        .map(|rec| {
            let p = &rec.profile;
            let union = index.union_for(p.job_sector, p.experience_band, &p.pairs());
            let sector = index.sector_level(p.job_sector);
            let mut education_pools: Vec<CandidatePool> = rec
                .cv
                .education_background
                .iter()
                .map(|e| {
                    let mapped = canon
                        .degree_group(&e.degree)
                        .and_then(|g| mapping.degree_to_institutions.get(g));
                    candidate_pool(mapped, &union.institutions, &sector.institutions)
                })
                .collect();
            let mut experience_pools: Vec<CandidatePool> = rec
                .cv
                .professional_experience
                .iter()
                .map(|e| {
                    let mapped = canon.role_group(&e.role).and_then(|g| mapping.role_to_companies.get(g));
                    candidate_pool(mapped, &union.workplaces, &sector.workplaces)
                })
                .collect();
            for pool in education_pools.iter_mut().chain(experience_pools.iter_mut()) {
                pool.entities.shuffle(rng);
            }
            ShuffledCv {
                record: rec.clone(),
                education_pools,
                experience_pools,
            }
        })
        .collect()
}
