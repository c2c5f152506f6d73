//! Generation parameters: the mandatory sector and experience band plus one
//! or more demographic attribute values.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::{Attribute, DemographicPair, DemographicProfile, ExperienceBand, JobSector};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenerationParams {
    pub job_sector: JobSector,
    pub experience_band: ExperienceBand,
    pub demographics: Vec<DemographicPair>,
}

/// A single parameter, as used for per-parameter CV extraction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Parameter {
    Sector(JobSector),
    Band(ExperienceBand),
    Demographic(DemographicPair),
}

impl Parameter {
    pub fn matches(&self, profile: &DemographicProfile) -> bool {
        match self {
            Parameter::Sector(s) => profile.job_sector == *s,
            Parameter::Band(b) => profile.experience_band == *b,
            Parameter::Demographic(p) => p.matches(profile),
        }
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parameter::Sector(s) => write!(f, "Job sector={s}"),
            Parameter::Band(b) => write!(f, "Experience={b}"),
            Parameter::Demographic(p) => p.fmt(f),
        }
    }
}

impl GenerationParams {
    /// At least one demographic pair is required, and each attribute may
    /// appear only once.
    pub fn new(
        job_sector: JobSector,
        experience_band: ExperienceBand,
        mut demographics: Vec<DemographicPair>,
    ) -> Result<Self> {
        if demographics.is_empty() {
            return Err(Error::Config("at least one demographic attribute is required".into()));
        }
        demographics.sort_by_key(|p| (p.attribute, p.value_rank()));
        if demographics.windows(2).any(|w| w[0].attribute == w[1].attribute) {
            return Err(Error::Config("demographic attribute repeated".into()));
        }
        Ok(GenerationParams {
            job_sector,
            experience_band,
            demographics,
        })
    }

    pub fn single(job_sector: JobSector, experience_band: ExperienceBand, pair: DemographicPair) -> Self {
        GenerationParams {
            job_sector,
            experience_band,
            demographics: vec![pair],
        }
    }

    /// Conjunction of all parameters.
    pub fn matches(&self, profile: &DemographicProfile) -> bool {
        profile.job_sector == self.job_sector
            && profile.experience_band == self.experience_band
            && self.demographics.iter().all(|p| p.matches(profile))
    }

    /// The parameters one by one: sector, band, then each demographic pair.
    pub fn individual(&self) -> Vec<Parameter> {
        let mut out = vec![
            Parameter::Sector(self.job_sector),
            Parameter::Band(self.experience_band),
        ];
        out.extend(self.demographics.iter().cloned().map(Parameter::Demographic));
        out
    }

    pub fn has_attribute(&self, attribute: Attribute) -> Option<&str> {
        self.demographics
            .iter()
            .find(|p| p.attribute == attribute)
            .map(|p| p.value.as_str())
    }

    /// Deterministic ordering key: sector, band, then (attribute, value rank).
    pub fn sort_key(&self) -> (JobSector, ExperienceBand, Vec<(Attribute, usize)>) {
        (
            self.job_sector,
            self.experience_band,
            self.demographics
                .iter()
                .map(|p| (p.attribute, p.value_rank()))
                .collect(),
        )
    }
}

impl fmt::Display for GenerationParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} | {}", self.job_sector, self.experience_band)?;
        for p in &self.demographics {
            write!(f, " | {p}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Gender;

    #[test]
    fn requires_a_demographic() {
        assert!(GenerationParams::new(JobSector::Sales, ExperienceBand::UpTo4, vec![]).is_err());
        let dup = vec!["gender=Woman".parse().unwrap(), "gender=Man".parse().unwrap()];
        assert!(GenerationParams::new(JobSector::Sales, ExperienceBand::UpTo4, dup).is_err());
    }

    #[test]
    fn conjunction_and_individual() {
        let p = GenerationParams::new(
            JobSector::Sales,
            ExperienceBand::UpTo4,
            vec!["gender=Woman".parse().unwrap(), "age=31-40".parse().unwrap()],
        )
        .unwrap();
        // sorted by attribute order: Age before Gender
        assert_eq!(p.demographics[0].attribute, Attribute::Age);
        assert_eq!(p.individual().len(), 4);
        let mut profile = DemographicProfile::new(JobSector::Sales, ExperienceBand::UpTo4);
        profile.gender = Some(Gender::Woman);
        assert!(!p.matches(&profile));
        profile.age = Some("31-40".parse().unwrap());
        assert!(p.matches(&profile));
        assert_eq!(p.to_string(), "Sales | 4 years or less | Age=31-40 | Gender=Woman");
    }
}
