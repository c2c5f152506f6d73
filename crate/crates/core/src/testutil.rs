//! Fixture builders shared by unit tests.

use crate::corpus::{
    DateValue, DemographicProfile, EducationClassifier, EducationItem, ExperienceBand, ExperienceItem, Gender,
    JobSector, ParsedCV, ReferenceRecord, SkillSet, YearMonth,
};

pub fn ym(y: i32, m: u32) -> YearMonth {
    YearMonth::new(y, m).unwrap()
}

pub fn now() -> YearMonth {
    ym(2024, 6)
}

pub struct CvBuilder {
    cv: ParsedCV,
    profile: DemographicProfile,
    years: f64,
    id: String,
}

impl CvBuilder {
    pub fn new(id: &str, sector: JobSector, band: ExperienceBand) -> Self {
        let years = match band {
            ExperienceBand::UpTo4 => 2.0,
            ExperienceBand::From5To9 => 7.0,
            ExperienceBand::From10To14 => 12.0,
            ExperienceBand::Over15 => 20.0,
        };
        CvBuilder {
            cv: ParsedCV::default(),
            profile: DemographicProfile::new(sector, band),
            years,
            id: id.to_string(),
        }
    }

    pub fn gender(mut self, g: Gender) -> Self {
        self.profile.gender = Some(g);
        self
    }

    pub fn edu(mut self, degree: &str, inst: Option<&str>, start: YearMonth, end: impl Into<DateValue>) -> Self {
        self.cv.education_background.push(EducationItem {
            degree: degree.to_string(),
            institution: inst.map(str::to_string),
            start_date: start,
            end_date: end.into(),
            kind: EducationClassifier::default().classify(degree),
        });
        self
    }

    pub fn job(mut self, role: &str, inst: Option<&str>, start: YearMonth, end: impl Into<DateValue>) -> Self {
        let end = end.into();
        self.cv.professional_experience.push(ExperienceItem {
            role: role.to_string(),
            institution: inst.map(str::to_string),
            start_date: start,
            end_date: end,
            description: None,
            duration_months: crate::corpus::item_duration_months(start, end, now()).unwrap(),
        });
        self
    }

    pub fn skills(mut self, skills: &[&str]) -> Self {
        self.cv.skills = SkillSet {
            hard: skills.iter().map(|s| s.to_string()).collect(),
            ..SkillSet::default()
        };
        self
    }

    pub fn build(self) -> ReferenceRecord {
        ReferenceRecord {
            id: self.id,
            cv: self.cv,
            profile: self.profile,
            raw_experience_years: self.years,
        }
    }
}
