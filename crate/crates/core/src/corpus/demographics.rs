//! Job-sector, experience and demographic vocabularies.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

macro_rules! vocabulary {
    (
        $(#[$meta:meta])*
        $name:ident, $field:literal {
            $( $variant:ident => $label:literal $(| $alias:literal)* ),+ $(,)?
        }
    ) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name {
            $( $variant ),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[ $( $name::$variant ),+ ];

            pub fn as_str(self) -> &'static str {
                match self {
                    $( $name::$variant => $label ),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                let s = s.trim();
                $(
                    if s.eq_ignore_ascii_case($label) $(|| s.eq_ignore_ascii_case($alias))* {
                        return Ok($name::$variant);
                    }
                )+
                Err(Error::schema($field, format!("unknown value {s:?}")))
            }
        }

        impl Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.serialize_str(self.as_str())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

vocabulary! {
    /// The 21 job sectors accepted as the mandatory sector parameter.
    JobSector, "job_sector" {
        BusinessAdministration => "Business and administration",
        ClericalSupport => "Clerical support",
        Ict => "ICT",
        ScienceEngineering => "Science and engineering",
        Sales => "Sales",
        LegalSocialCultural => "Legal, social and cultural" | "Legal, social, and cultural",
        ConstructionManufacturingTransport => "Construction, manufacturing and transport",
        Health => "Health",
        PublicOfficials => "Public officials",
        ProductionSpecializedServices => "Production and specialized services",
        PersonalService => "Personal service",
        Teaching => "Teaching",
        Cleaning => "Cleaning",
        FoodPreparation => "Food preparation",
        FoodProcessingCraft => "Food Processing, Woodworking, Garment and Other Craft",
        AgriculturalForestryFishery => "Agricultural, forestry and fishery",
        ArmedForces => "Armed forces",
        HospitalityRetail => "Hospitality, retail and other services",
        PersonalCare => "Personal care",
        HandicraftPrinting => "Handicraft and Printing",
        Protective => "Protective",
    }
}

vocabulary! {
    ExperienceBand, "experience_band" {
        UpTo4 => "4 years or less" | "<=4" | "0-4",
        From5To9 => "5-9 years" | "5-9",
        From10To14 => "10-14 years" | "10-14",
        Over15 => "15+ years" | "15+",
    }
}

vocabulary! {
    AgeBand, "age" {
        UpTo30 => "<=30" | "≤30",
        From31To40 => "31-40",
        From41To50 => "41-50",
        Over50 => ">50",
    }
}

vocabulary! {
    Gender, "gender" {
        Woman => "Woman",
        Man => "Man",
        NonBinary => "Non-binary",
    }
}

vocabulary! {
    Religion, "religion" {
        Buddhism => "Buddhism",
        Christianity => "Christianity",
        Hinduism => "Hinduism",
        Muslim => "Muslim",
        Judaism => "Judaism",
        Other => "Other",
        Secular => "Secular",
    }
}

vocabulary! {
    /// Demographic generation parameters, in their canonical ordering.
    Attribute, "attribute" {
        Age => "Age",
        Disability => "Disability condition" | "Disability",
        Gender => "Gender",
        Minority => "Minority",
        Foreign => "Perceived foreign" | "Foreign",
        Religion => "Religion",
        Lgbtq => "LGBTQ+" | "LGBTQ",
    }
}

impl ExperienceBand {
    pub fn from_years(years: f64) -> Result<Self> {
        if !years.is_finite() || years < 0.0 {
            return Err(Error::schema("experience_years", format!("invalid value {years}")));
        }
        Ok(if years < 5.0 {
            ExperienceBand::UpTo4
        } else if years < 10.0 {
            ExperienceBand::From5To9
        } else if years < 15.0 {
            ExperienceBand::From10To14
        } else {
            ExperienceBand::Over15
        })
    }

    /// Upper bound on cumulative professional experience in months. The
    /// open-ended band uses `open_cap`.
    pub fn cap_months(self, open_cap: u32) -> u32 {
        match self {
            ExperienceBand::UpTo4 => 48,
            ExperienceBand::From5To9 => 108,
            ExperienceBand::From10To14 => 168,
            ExperienceBand::Over15 => open_cap,
        }
    }
}

pub fn yes_no(b: bool) -> &'static str {
    if b {
        "Yes"
    } else {
        "No"
    }
}

pub fn parse_yes_no(field: &str, s: &str) -> Result<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "yes" | "true" | "y" | "1" => Ok(true),
        "no" | "false" | "n" | "0" => Ok(false),
        other => Err(Error::schema(field, format!("expected Yes/No, got {other:?}"))),
    }
}

impl Attribute {
    /// Every admissible value of the attribute, as rendered in tables.
    pub fn values(self) -> Vec<&'static str> {
        match self {
            Attribute::Age => AgeBand::ALL.iter().map(|v| v.as_str()).collect(),
            Attribute::Gender => Gender::ALL.iter().map(|v| v.as_str()).collect(),
            Attribute::Religion => Religion::ALL.iter().map(|v| v.as_str()).collect(),
            _ => vec!["Yes", "No"],
        }
    }

    /// Canonicalize a value for this attribute, rejecting anything outside
    /// the vocabulary.
    pub fn canonical_value(self, value: &str) -> Result<&'static str> {
        Ok(match self {
            Attribute::Age => value.parse::<AgeBand>()?.as_str(),
            Attribute::Gender => value.parse::<Gender>()?.as_str(),
            Attribute::Religion => value.parse::<Religion>()?.as_str(),
            _ => yes_no(parse_yes_no(self.as_str(), value)?),
        })
    }
}

/// Sector, experience band and the optional sensitive attributes of one CV.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DemographicProfile {
    pub job_sector: JobSector,
    pub experience_band: ExperienceBand,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub age: Option<AgeBand>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gender: Option<Gender>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lgbtq: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minority: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub foreign: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub religion: Option<Religion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disability: Option<bool>,
}

impl DemographicProfile {
    pub fn new(job_sector: JobSector, experience_band: ExperienceBand) -> Self {
        DemographicProfile {
            job_sector,
            experience_band,
            age: None,
            gender: None,
            lgbtq: None,
            minority: None,
            foreign: None,
            religion: None,
            disability: None,
        }
    }

    pub fn value_of(&self, attribute: Attribute) -> Option<&'static str> {
        match attribute {
            Attribute::Age => self.age.map(AgeBand::as_str),
            Attribute::Gender => self.gender.map(Gender::as_str),
            Attribute::Religion => self.religion.map(Religion::as_str),
            Attribute::Lgbtq => self.lgbtq.map(yes_no),
            Attribute::Minority => self.minority.map(yes_no),
            Attribute::Foreign => self.foreign.map(yes_no),
            Attribute::Disability => self.disability.map(yes_no),
        }
    }

    pub fn set(&mut self, attribute: Attribute, value: &str) -> Result<()> {
        let field = attribute.as_str();
        match attribute {
            Attribute::Age => self.age = Some(value.parse()?),
            Attribute::Gender => self.gender = Some(value.parse()?),
            Attribute::Religion => self.religion = Some(value.parse()?),
            Attribute::Lgbtq => self.lgbtq = Some(parse_yes_no(field, value)?),
            Attribute::Minority => self.minority = Some(parse_yes_no(field, value)?),
            Attribute::Foreign => self.foreign = Some(parse_yes_no(field, value)?),
            Attribute::Disability => self.disability = Some(parse_yes_no(field, value)?),
        }
        Ok(())
    }

    /// Every (attribute, value) pair the profile carries.
    pub fn pairs(&self) -> Vec<DemographicPair> {
        Attribute::ALL
            .iter()
            .filter_map(|&a| {
                self.value_of(a).map(|v| DemographicPair {
                    attribute: a,
                    value: v.to_string(),
                })
            })
            .collect()
    }
}

/// One `attribute = value` demographic generation parameter.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DemographicPair {
    pub attribute: Attribute,
    pub value: String,
}

impl DemographicPair {
    pub fn new(attribute: Attribute, value: &str) -> Result<Self> {
        Ok(DemographicPair {
            attribute,
            value: attribute.canonical_value(value)?.to_string(),
        })
    }

    pub fn matches(&self, profile: &DemographicProfile) -> bool {
        profile.value_of(self.attribute) == Some(self.value.as_str())
    }

    /// Position of the value in the attribute's vocabulary, for sorting.
    pub fn value_rank(&self) -> usize {
        self.attribute
            .values()
            .iter()
            .position(|v| *v == self.value)
            .unwrap_or(usize::MAX)
    }
}

impl fmt::Display for DemographicPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.attribute, self.value)
    }
}

impl FromStr for DemographicPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, v) = s
            .split_once('=')
            .ok_or_else(|| Error::schema("demographic", format!("expected attribute=value, got {s:?}")))?;
        DemographicPair::new(a.parse()?, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_vocabularies() {
        assert_eq!(JobSector::ALL.len(), 21);
        assert_eq!(ExperienceBand::ALL.len(), 4);
        assert_eq!(Religion::ALL.len(), 7);
        assert_eq!(
            "legal, social, and cultural".parse::<JobSector>().unwrap(),
            JobSector::LegalSocialCultural
        );
        assert!("Astronaut".parse::<JobSector>().is_err());
    }

    #[test]
    fn band_boundaries() {
        assert_eq!(ExperienceBand::from_years(4.9).unwrap(), ExperienceBand::UpTo4);
        assert_eq!(ExperienceBand::from_years(5.0).unwrap(), ExperienceBand::From5To9);
        assert_eq!(ExperienceBand::from_years(14.99).unwrap(), ExperienceBand::From10To14);
        assert_eq!(ExperienceBand::from_years(40.0).unwrap(), ExperienceBand::Over15);
        assert!(ExperienceBand::from_years(-1.0).is_err());
    }

    #[test]
    fn pair_parse_and_match() {
        let p: DemographicPair = "gender=woman".parse().unwrap();
        assert_eq!(p.value, "Woman");
        let mut profile = DemographicProfile::new(JobSector::Ict, ExperienceBand::UpTo4);
        assert!(!p.matches(&profile));
        profile.gender = Some(Gender::Woman);
        assert!(p.matches(&profile));
        let q: DemographicPair = "LGBTQ+=yes".parse().unwrap();
        assert_eq!(q.to_string(), "LGBTQ+=Yes");
        assert!("religion=Pastafarian".parse::<DemographicPair>().is_err());
    }

    #[test]
    fn serde_uses_labels() {
        let json = serde_json::to_string(&ExperienceBand::Over15).unwrap();
        assert_eq!(json, "\"15+ years\"");
        let s: JobSector = serde_json::from_str("\"ICT\"").unwrap();
        assert_eq!(s, JobSector::Ict);
    }
}
