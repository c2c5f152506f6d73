use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    build_anonymized_table, build_combinations_table, build_named_entities_table, build_skill_relevance,
    AnonymizedCvRecord, CombinationRecord, EntityMapping, NamedEntityRecord, SkillRelevance,
};
use crate::corpus::{ReferenceRecord, RepairPolicy};
use crate::error::{Error, Result};
use crate::similarity::{build_entity_mapping, Canonicalizer, Linkage, SimilarityProvider};

const LIST_SEP: char = '|';

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TableOptions {
    pub k_min: usize,
    pub repair: RepairPolicy,
    pub canonical_threshold: f64,
    pub linkage: Linkage,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions {
            k_min: 5,
            repair: RepairPolicy::default(),
            canonical_threshold: 0.55,
            linkage: Linkage::Average,
        }
    }
}

/// File locations of the persisted tables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TablePaths {
    pub anonymized: PathBuf,
    pub combinations: PathBuf,
    pub named_entities: PathBuf,
    pub skill_relevance: PathBuf,
    pub entity_mapping: PathBuf,
    pub canonical_groups: PathBuf,
}

impl TablePaths {
    pub fn in_dir(dir: &Path) -> Self {
        TablePaths {
            anonymized: dir.join("anonymized.jsonl"),
            combinations: dir.join("combinations.csv"),
            named_entities: dir.join("named_entities.csv"),
            skill_relevance: dir.join("skill_relevance.json"),
            entity_mapping: dir.join("entity_mapping.json"),
            canonical_groups: dir.join("canonical_groups.json"),
        }
    }

    pub fn all(&self) -> [&Path; 6] {
        [
            &self.anonymized,
            &self.combinations,
            &self.named_entities,
            &self.skill_relevance,
            &self.entity_mapping,
            &self.canonical_groups,
        ]
    }
}

/// Everything generation needs, derived from the reference corpus.
#[derive(Clone, Debug, PartialEq)]
pub struct IntermediateTables {
    pub anonymized: Vec<AnonymizedCvRecord>,
    pub combinations: Vec<CombinationRecord>,
    pub named_entities: Vec<NamedEntityRecord>,
    pub skill_relevance: SkillRelevance,
    pub entity_mapping: EntityMapping,
    pub canonicalizer: Canonicalizer,
}

impl IntermediateTables {
    pub fn build(
        corpus: &[ReferenceRecord],
        opts: &TableOptions,
        provider: &dyn SimilarityProvider,
        seed: u64,
    ) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let anonymized = build_anonymized_table(corpus, &opts.repair, &mut rng)?;
        let combinations = build_combinations_table(corpus, &mut rng)?;
        let named_entities = build_named_entities_table(corpus, opts.k_min);
        let cvs = || corpus.iter().map(|r| &r.cv);
        let canonicalizer = Canonicalizer::build(provider, cvs(), opts.canonical_threshold, opts.linkage)?;
        let skill_relevance = build_skill_relevance(cvs(), &canonicalizer);
        let entity_mapping = build_entity_mapping(cvs(), &canonicalizer);
        Ok(IntermediateTables {
            anonymized,
            combinations,
            named_entities,
            skill_relevance,
            entity_mapping,
            canonicalizer,
        })
    }

    pub fn save(&self, paths: &TablePaths) -> Result<()> {
        for p in paths.all() {
            if let Some(parent) = p.parent() {
                fs::create_dir_all(parent)?;
            }
        }
        let mut f = std::io::BufWriter::new(fs::File::create(&paths.anonymized)?);
        for r in &self.anonymized {
            serde_json::to_writer(&mut f, r)?;
            f.write_all(b"\n")?;
        }
        f.flush()?;

        let mut w = csv::Writer::from_path(&paths.combinations)?;
        w.write_record([
            "job_sector",
            "experience_band",
            "education_institutions",
            "workplaces",
            "skills",
        ])?;
        for r in &self.combinations {
            w.write_record([
                r.job_sector.to_string(),
                r.experience_band.to_string(),
                join_list("education_institutions", &r.education_institutions)?,
                join_list("workplaces", &r.workplaces)?,
                join_list("skills", &r.skills)?,
            ])?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(&paths.named_entities)?;
        w.write_record([
            "job_sector",
            "experience_band",
            "variable",
            "variable_value",
            "cv_count",
            "education_institutions",
            "workplaces",
        ])?;
        for r in &self.named_entities {
            w.write_record([
                r.job_sector.to_string(),
                r.experience_band.to_string(),
                r.variable.to_string(),
                r.variable_value.clone(),
                r.cv_count.to_string(),
                join_list("education_institutions", &r.education_institutions)?,
                join_list("workplaces", &r.workplaces)?,
            ])?;
        }
        w.flush()?;

        write_json(&paths.skill_relevance, &self.skill_relevance)?;
        write_json(&paths.entity_mapping, &self.entity_mapping)?;
        write_json(&paths.canonical_groups, &self.canonicalizer)?;
        Ok(())
    }

    pub fn load(paths: &TablePaths) -> Result<Self> {
        for p in paths.all() {
            if !p.exists() {
                return Err(Error::Io(std::io::Error::new(
                    std::io::ErrorKind::NotFound,
                    format!("missing table {}", p.display()),
                )));
            }
        }
        let mut anonymized = Vec::new();
        for line in BufReader::new(fs::File::open(&paths.anonymized)?).lines() {
            let line = line?;
            if !line.trim().is_empty() {
                anonymized.push(serde_json::from_str(&line)?);
            }
        }

        let mut combinations = Vec::new();
        for row in csv::Reader::from_path(&paths.combinations)?.records() {
            let row = row?;
            let cell = |i: usize| row.get(i).unwrap_or("");
            combinations.push(CombinationRecord {
                job_sector: cell(0).parse()?,
                experience_band: cell(1).parse()?,
                education_institutions: split_list(cell(2)),
                workplaces: split_list(cell(3)),
                skills: split_list(cell(4)),
            });
        }

        let mut named_entities = Vec::new();
        for row in csv::Reader::from_path(&paths.named_entities)?.records() {
            let row = row?;
            let cell = |i: usize| row.get(i).unwrap_or("");
            let variable: crate::corpus::Attribute = cell(2).parse()?;
            named_entities.push(NamedEntityRecord {
                job_sector: cell(0).parse()?,
                experience_band: cell(1).parse()?,
                variable,
                variable_value: variable.canonical_value(cell(3))?.to_string(),
                cv_count: cell(4)
                    .parse()
                    .map_err(|_| Error::schema("cv_count", format!("not a count: {:?}", cell(4))))?,
                education_institutions: split_list(cell(5)),
                workplaces: split_list(cell(6)),
            });
        }

        Ok(IntermediateTables {
            anonymized,
            combinations,
            named_entities,
            skill_relevance: read_json(&paths.skill_relevance)?,
            entity_mapping: read_json(&paths.entity_mapping)?,
            canonicalizer: read_json(&paths.canonical_groups)?,
        })
    }
}

fn join_list(field: &str, items: &[String]) -> Result<String> {
    if let Some(bad) = items.iter().find(|s| s.contains(LIST_SEP)) {
        return Err(Error::schema(
            field,
            format!("value {bad:?} contains the list separator '|'"),
        ));
    }
    Ok(items.join("|"))
}

fn split_list(cell: &str) -> Vec<String> {
    if cell.is_empty() {
        Vec::new()
    } else {
        cell.split(LIST_SEP).map(str::to_string).collect()
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}
