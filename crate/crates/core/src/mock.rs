//! Seeded mock corpus standing in for a donated reference corpus.
//!
//! Each record is drawn independently: sector and experience band from the
//! `MockCorpusSpec` weights, demographics from the marginals, then a career worked
//! backwards from `now` (jobs first, then the studies that precede them).
//! Dates are written in a mix of parser output formats, and a small share
//! of PhDs and masters carry implausibly short durations for the repair
//! step to fix.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::io::{RawCv, RawEducation, RawExperience, RawRecord};
use crate::corpus::{
    default_now, AgeBand, DemographicProfile, ExperienceBand, Gender, JobSector, Religion, SkillSet, YearMonth,
};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Marginals {
    pub gender: Vec<(Gender, f64)>,
    /// Target share per age band. A donor is never younger than their
    /// studies and career allow, so long careers shift mass upwards.
    pub age: Vec<(AgeBand, f64)>,
    pub lgbtq: f64,
    pub minority: f64,
    pub foreign: f64,
    pub religion: Vec<(Religion, f64)>,
    pub disability: f64,
}

impl Default for Marginals {
    fn default() -> Self {
        Marginals {
            gender: vec![(Gender::Woman, 0.50), (Gender::Man, 0.47), (Gender::NonBinary, 0.03)],
            age: vec![
                (AgeBand::UpTo30, 0.35),
                (AgeBand::From31To40, 0.35),
                (AgeBand::From41To50, 0.20),
                (AgeBand::Over50, 0.10),
            ],
            lgbtq: 0.20,
            minority: 0.20,
            foreign: 0.15,
            religion: vec![
                (Religion::Christianity, 0.42),
                (Religion::Secular, 0.38),
                (Religion::Muslim, 0.07),
                (Religion::Other, 0.05),
                (Religion::Buddhism, 0.03),
                (Religion::Hinduism, 0.03),
                (Religion::Judaism, 0.02),
            ],
            disability: 0.07,
        }
    }
}

/// Degrees, roles, institutions and skills used for one sector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorVocabulary {
    pub sector: JobSector,
    pub weight: f64,
    pub bachelors: Vec<String>,
    pub masters: Vec<String>,
    pub phds: Vec<String>,
    pub vocational: Vec<String>,
    pub roles: Vec<String>,
    pub employers: Vec<String>,
    pub skills: Vec<String>,
    /// Chance that a donor in this sector holds a vocational qualification
    /// instead of a bachelor.
    pub vocational_rate: f64,
    pub phd_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MockCorpusSpec {
    pub total: usize,
    pub seed: u64,
    pub marginals: Marginals,
    pub bands: Vec<(ExperienceBand, f64)>,
    pub sectors: Vec<SectorVocabulary>,
    pub universities: Vec<String>,
    pub foreign_universities: Vec<String>,
    pub schools: Vec<String>,
    pub exchange_programmes: Vec<String>,
    pub soft_skills: Vec<String>,
    pub languages: Vec<String>,
    pub master_rate: f64,
    pub abroad_rate: f64,
    /// Share of PhDs and masters recorded with a too-short duration.
    pub short_degree_rate: f64,
    pub now: YearMonth,
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Two employer names per stem, one with each suffix.
fn employers(stems: &[&str], suffixes: [&str; 2]) -> Vec<String> {
    stems
        .iter()
        .flat_map(|s| suffixes.iter().map(move |x| format!("{s} {x}")))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn sector(
    sector: JobSector,
    weight: f64,
    bachelors: &[&str],
    masters: &[&str],
    phds: &[&str],
    vocational: &[&str],
    roles: &[&str],
    employers: Vec<String>,
    skills: &[&str],
    vocational_rate: f64,
    phd_rate: f64,
) -> SectorVocabulary {
    SectorVocabulary {
        sector,
        weight,
        bachelors: strings(bachelors),
        masters: strings(masters),
        phds: strings(phds),
        vocational: strings(vocational),
        roles: strings(roles),
        employers,
        skills: strings(skills),
        vocational_rate,
        phd_rate,
    }
}

fn default_sectors() -> Vec<SectorVocabulary> {
    vec![
        sector(
            JobSector::BusinessAdministration,
            0.27,
            &[
                "Bachelor in Business Administration",
                "BA in Economics",
                "Bachelor in Finance",
                "BSc Accounting",
                "Bachelor in Management",
                "BA in International Business",
                "Bachelor in Human Resources",
            ],
            &[
                "MBA",
                "MSc Finance",
                "Master in Human Resources Management",
                "MSc Accounting and Auditing",
                "Master in Marketing Management",
                "MSc Business Analytics",
            ],
            &["PhD in Economics", "PhD in Management"],
            &[
                "Vocational diploma in Administration",
                "Professional training in Accounting",
            ],
            &[
                "Financial analyst",
                "Accountant",
                "Business analyst",
                "HR generalist",
                "Project manager",
                "Management consultant",
                "Controller",
                "Auditor",
                "Operations manager",
                "Procurement specialist",
                "Payroll specialist",
                "Office manager",
                "Recruiter",
                "Treasury analyst",
            ],
            employers(
                &[
                    "Northbridge",
                    "Aldermoor",
                    "Crestline",
                    "Fairhaven",
                    "Kestrel",
                    "Lindqvist",
                    "Meridian",
                    "Oakridge",
                    "Pinecrest",
                    "Redwater",
                    "Silverlake",
                    "Thornbury",
                    "Westgate",
                    "Brightfield",
                    "Harborview",
                ],
                ["Consulting", "Partners"],
            ),
            &[
                "Excel",
                "SAP",
                "Financial modelling",
                "Budgeting",
                "Forecasting",
                "Power BI",
                "IFRS",
                "Payroll",
                "Recruitment",
                "Negotiation",
                "Risk assessment",
                "Auditing",
                "Tax compliance",
                "CRM",
                "Project management",
                "Process improvement",
                "Reporting",
                "Salesforce",
                "Lean",
                "Tableau",
                "Cost accounting",
                "Procurement",
            ],
            0.05,
            0.03,
        ),
        sector(
            JobSector::ClericalSupport,
            0.25,
            &[
                "Bachelor in Business Administration",
                "BA in Communication",
                "Bachelor in Tourism",
                "BA in Modern Languages",
                "Bachelor in Office Management",
                "BA in Public Administration",
            ],
            &[
                "Master in Administration Management",
                "MA in Translation",
                "Master in Tourism Management",
                "Master in Documentation",
            ],
            &["PhD in Information Science"],
            &[
                "Vocational diploma in Administration",
                "Vocational diploma in Secretarial Studies",
                "Certificate in Office Administration",
                "Diploma in Bookkeeping",
            ],
            &[
                "Administrative assistant",
                "Receptionist",
                "Data entry clerk",
                "Executive assistant",
                "Customer service representative",
                "Office clerk",
                "Records clerk",
                "Bookkeeping clerk",
                "Front desk agent",
                "Call centre agent",
                "Secretary",
                "Logistics clerk",
                "Travel agent",
            ],
            employers(
                &[
                    "Alba", "Bellmont", "Cedar", "Dunmore", "Elmstead", "Foxley", "Glenwood", "Hollins", "Ivory",
                    "Juniper", "Kingsley", "Lakeside", "Marlow", "Newbury", "Orchard",
                ],
                ["Services", "Group"],
            ),
            &[
                "Microsoft Office",
                "Excel",
                "Word",
                "Data entry",
                "Filing",
                "Scheduling",
                "Customer service",
                "Bookkeeping",
                "Typing",
                "Phone etiquette",
                "Outlook",
                "Invoicing",
                "Record keeping",
                "Document management",
                "Travel booking",
                "SAP",
                "Minute taking",
                "Inventory control",
                "Switchboard",
                "Zendesk",
            ],
            0.30,
            0.01,
        ),
        sector(
            JobSector::Ict,
            0.15,
            &[
                "BSc Computer Science",
                "BSc Software Engineering",
                "BEng Computer Engineering",
                "BSc Information Systems",
                "BSc Data Science",
                "BEng Telecommunications Engineering",
                "BSc Mathematics",
            ],
            &[
                "MSc Computer Science",
                "MSc Artificial Intelligence",
                "MSc Cybersecurity",
                "MSc Data Science",
                "MSc Software Engineering",
                "MEng Telecommunications",
            ],
            &["PhD in Computer Science", "PhD in Artificial Intelligence"],
            &[
                "Vocational diploma in Network Administration",
                "Professional training in Web Development",
            ],
            &[
                "Software developer",
                "Backend engineer",
                "Frontend developer",
                "Data analyst",
                "DevOps engineer",
                "QA engineer",
                "Data engineer",
                "Mobile developer",
                "Systems administrator",
                "IT consultant",
                "Machine learning engineer",
                "Network engineer",
                "Security analyst",
                "Full stack developer",
            ],
            employers(
                &[
                    "Nimbus",
                    "Bytewave",
                    "Orbital",
                    "Quanta",
                    "Helix",
                    "Vertex",
                    "Cobalt",
                    "Lumen",
                    "Pixelforge",
                    "Stackline",
                    "Netsphere",
                    "Datagrove",
                    "Cloudpeak",
                    "Bitcraft",
                    "Synapse",
                ],
                ["Software", "Labs"],
            ),
            &[
                "Python",
                "SQL",
                "Java",
                "Rust",
                "Go",
                "Docker",
                "Kubernetes",
                "Linux",
                "Git",
                "AWS",
                "Azure",
                "JavaScript",
                "Spark",
                "React",
                "TypeScript",
                "C++",
                "Terraform",
                "Scrum",
                "Pandas",
                "Bash",
                "GraphQL",
                "Kotlin",
                "Swift",
                "PyTorch",
            ],
            0.08,
            0.08,
        ),
        sector(
            JobSector::ScienceEngineering,
            0.13,
            &[
                "BEng Mechanical Engineering",
                "BEng Civil Engineering",
                "BSc Chemistry",
                "BSc Physics",
                "BEng Electrical Engineering",
                "BSc Biology",
                "BEng Industrial Engineering",
            ],
            &[
                "MSc Mechanical Engineering",
                "MSc Structural Engineering",
                "MSc Chemistry",
                "MSc Applied Physics",
                "MSc Renewable Energy",
                "MSc Biotechnology",
            ],
            &["PhD in Chemistry", "PhD in Physics", "PhD in Engineering"],
            &[
                "Vocational diploma in Industrial Maintenance",
                "Technician certificate in Laboratory Analysis",
            ],
            &[
                "Mechanical engineer",
                "Civil engineer",
                "Process engineer",
                "Research scientist",
                "Laboratory technician",
                "Quality engineer",
                "Electrical engineer",
                "Project engineer",
                "Design engineer",
                "Production engineer",
                "Research assistant",
                "Environmental engineer",
                "Chemical analyst",
            ],
            employers(
                &[
                    "Ironvale", "Corbel", "Ferrant", "Gantry", "Hydrox", "Isotope", "Kiln", "Lattice", "Magnetar",
                    "Nucleon", "Petrel", "Quarry", "Rotor", "Stratum", "Turbine",
                ],
                ["Engineering", "Industries"],
            ),
            &[
                "AutoCAD",
                "MATLAB",
                "SolidWorks",
                "Finite element analysis",
                "Lab safety",
                "HPLC",
                "Spectroscopy",
                "Six Sigma",
                "Python",
                "Statistical analysis",
                "Technical drawing",
                "Quality control",
                "ISO 9001",
                "Revit",
                "LabVIEW",
                "Simulink",
                "Root cause analysis",
                "Project planning",
                "PLC programming",
                "R",
            ],
            0.08,
            0.12,
        ),
        sector(
            JobSector::Sales,
            0.10,
            &[
                "Bachelor in Marketing",
                "Bachelor in Business Administration",
                "BA in Advertising",
                "Bachelor in Commerce",
                "BA in Communication",
            ],
            &[
                "Master in Marketing",
                "Master in Sales Management",
                "MBA",
                "Master in Digital Marketing",
            ],
            &["PhD in Marketing"],
            &[
                "Vocational diploma in Commerce",
                "Vocational diploma in Retail Management",
                "Certificate in Sales Techniques",
            ],
            &[
                "Sales assistant",
                "Account manager",
                "Sales representative",
                "Business development manager",
                "Key account manager",
                "Store manager",
                "Retail supervisor",
                "Inside sales agent",
                "Sales executive",
                "Area sales manager",
                "Merchandiser",
                "Cashier",
            ],
            employers(
                &[
                    "Amberline",
                    "Bazaar",
                    "Corner",
                    "Dealcraft",
                    "Emporium",
                    "Flagstone",
                    "Goodwin",
                    "Highstreet",
                    "Imperial",
                    "Jubilee",
                    "Keystone",
                    "Market",
                    "Nova",
                    "Outlet",
                    "Prime",
                ],
                ["Retail", "Trading"],
            ),
            &[
                "Negotiation",
                "CRM",
                "Salesforce",
                "Cold calling",
                "Lead generation",
                "Customer service",
                "Merchandising",
                "Point of sale",
                "Upselling",
                "Market research",
                "Excel",
                "HubSpot",
                "Account management",
                "Presentation skills",
                "Social media marketing",
                "Inventory management",
                "Pricing",
                "Cash handling",
                "Visual merchandising",
                "B2B sales",
            ],
            0.25,
            0.01,
        ),
        sector(
            JobSector::LegalSocialCultural,
            0.10,
            &[
                "Bachelor of Laws",
                "BA in Sociology",
                "BA in Psychology",
                "BA in History",
                "BA in Journalism",
                "BA in Social Work",
                "BA in Fine Arts",
            ],
            &[
                "LLM in International Law",
                "MA in Social Policy",
                "MSc Clinical Psychology",
                "MA in Cultural Management",
                "MA in Journalism",
            ],
            &["PhD in Law", "PhD in Sociology", "PhD in History"],
            &[
                "Vocational diploma in Social Integration",
                "Certificate in Legal Assistance",
            ],
            &[
                "Lawyer",
                "Paralegal",
                "Social worker",
                "Psychologist",
                "Journalist",
                "Editor",
                "Cultural manager",
                "Legal advisor",
                "Case manager",
                "Museum curator",
                "Researcher",
                "Communications officer",
            ],
            employers(
                &[
                    "Ashford",
                    "Blackstone",
                    "Carrow",
                    "Delacroix",
                    "Everett",
                    "Falkner",
                    "Greaves",
                    "Hartley",
                    "Iverson",
                    "Jessop",
                    "Keating",
                    "Lowell",
                    "Montague",
                    "Nash",
                    "Ormond",
                ],
                ["Legal", "Foundation"],
            ),
            &[
                "Legal research",
                "Contract drafting",
                "Litigation",
                "Case management",
                "Counselling",
                "Interviewing",
                "Writing",
                "Editing",
                "Public speaking",
                "Research methods",
                "SPSS",
                "Mediation",
                "Compliance",
                "GDPR",
                "Event planning",
                "Copywriting",
                "Grant writing",
                "Social media",
                "Archiving",
                "Data protection",
            ],
            0.05,
            0.06,
        ),
    ]
}

impl Default for MockCorpusSpec {
    fn default() -> Self {
        MockCorpusSpec {
            total: 1000,
            seed: 7,
            marginals: Marginals::default(),
            bands: vec![
                (ExperienceBand::UpTo4, 0.35),
                (ExperienceBand::From5To9, 0.30),
                (ExperienceBand::From10To14, 0.20),
                (ExperienceBand::Over15, 0.15),
            ],
            sectors: default_sectors(),
            universities: strings(&[
                "University of Barcelona",
                "Pompeu Fabra University",
                "Autonomous University of Barcelona",
                "University of Girona",
                "University of Valencia",
                "Complutense University of Madrid",
                "University of Granada",
                "University of Seville",
                "University of Zaragoza",
                "University of the Basque Country",
                "Polytechnic University of Catalonia",
                "Polytechnic University of Madrid",
                "University of Salamanca",
                "University of Lleida",
                "Rovira i Virgili University",
                "University of Murcia",
                "University of Oviedo",
                "University of Malaga",
                "Carlos III University",
                "University of Santiago de Compostela",
                "University of Alicante",
                "University of Navarra",
                "Ramon Llull University",
                "Open University of Catalonia",
            ]),
            foreign_universities: strings(&[
                "University of Bologna",
                "KU Leuven",
                "University of Lisbon",
                "Sorbonne University",
                "University of Vienna",
                "Utrecht University",
                "University of Copenhagen",
                "Heidelberg University",
                "University of Edinburgh",
                "Lund University",
            ]),
            schools: strings(&[
                "Institut Escola del Treball",
                "Institut Joan d'Austria",
                "Institut La Guineueta",
                "Institut Puig Castellar",
                "CIFP Valencia",
                "Institut Bonanova",
                "Institut Salvador Espriu",
                "Centro FP Madrid",
            ]),
            exchange_programmes: strings(&[
                "Erasmus exchange programme",
                "Study abroad semester",
                "Visiting student programme",
            ]),
            soft_skills: strings(&[
                "Teamwork",
                "Communication",
                "Leadership",
                "Problem solving",
                "Time management",
                "Adaptability",
                "Attention to detail",
                "Critical thinking",
                "Creativity",
                "Conflict resolution",
            ]),
            languages: strings(&[
                "English",
                "Spanish",
                "Catalan",
                "French",
                "German",
                "Italian",
                "Portuguese",
            ]),
            master_rate: 0.5,
            abroad_rate: 0.2,
            short_degree_rate: 0.1,
            now: default_now(),
        }
    }
}

fn check_distribution<T>(name: &str, weights: &[(T, f64)]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::Config(format!("{name}: no categories")));
    }
    if weights.iter().any(|(_, w)| !w.is_finite() || *w < 0.0) {
        return Err(Error::Config(format!(
            "{name}: weights must be finite and non-negative"
        )));
    }
    let sum: f64 = weights.iter().map(|(_, w)| w).sum();
    if (sum - 1.0).abs() > 1e-6 {
        return Err(Error::Config(format!("{name}: weights sum to {sum}, not 1")));
    }
    Ok(())
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must lie in [0, 1], got {p}")))
    }
}

impl MockCorpusSpec {
    pub fn check(&self) -> Result<()> {
        let m = &self.marginals;
        check_distribution("gender", &m.gender)?;
        check_distribution("age", &m.age)?;
        check_distribution("religion", &m.religion)?;
        check_distribution("bands", &self.bands)?;
        let sectors: Vec<(JobSector, f64)> = self.sectors.iter().map(|s| (s.sector, s.weight)).collect();
        check_distribution("sectors", &sectors)?;
        for (name, p) in [
            ("lgbtq", m.lgbtq),
            ("minority", m.minority),
            ("foreign", m.foreign),
            ("disability", m.disability),
            ("master_rate", self.master_rate),
            ("abroad_rate", self.abroad_rate),
            ("short_degree_rate", self.short_degree_rate),
        ] {
            check_probability(name, p)?;
        }
        for s in &self.sectors {
            check_probability("vocational_rate", s.vocational_rate)?;
            check_probability("phd_rate", s.phd_rate)?;
            let lists = [
                ("bachelors", &s.bachelors),
                ("masters", &s.masters),
                ("phds", &s.phds),
                ("vocational", &s.vocational),
                ("roles", &s.roles),
                ("employers", &s.employers),
                ("skills", &s.skills),
            ];
            for (name, list) in lists {
                if list.is_empty() {
                    return Err(Error::Config(format!("sector {}: {name} is empty", s.sector)));
                }
            }
            if s.roles.len() < 6 {
                return Err(Error::Config(format!("sector {}: need at least 6 roles", s.sector)));
            }
        }
        for (name, list) in [
            ("universities", &self.universities),
            ("foreign_universities", &self.foreign_universities),
            ("schools", &self.schools),
            ("exchange_programmes", &self.exchange_programmes),
            ("soft_skills", &self.soft_skills),
            ("languages", &self.languages),
        ] {
            if list.is_empty() {
                return Err(Error::Config(format!("{name} is empty")));
            }
        }
        Ok(())
    }
}

fn pick_weighted<T: Copy, R: Rng + ?Sized>(weights: &[(T, f64)], rng: &mut R) -> T {
    let idx = WeightedIndex::new(weights.iter().map(|(_, w)| *w)).expect("checked distribution");
    weights[idx.sample(rng)].0
}

fn pick<'a, R: Rng + ?Sized>(list: &'a [String], rng: &mut R) -> &'a str {
    list.choose(rng).expect("checked non-empty")
}

/// Render a month in one of the formats CV parsers emit.
fn format_date<R: Rng + ?Sized>(m: YearMonth, rng: &mut R) -> String {
    const MONTHS: [&str; 12] = [
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
    ];
    let name = MONTHS[(m.month() - 1) as usize];
    match rng.random_range(0..5) {
        0 => format!("{}-{:02}", m.year(), m.month()),
        1 => format!("{name} {}", m.year()),
        2 => format!("{:02}/{}", m.month(), m.year()),
        3 => format!("{}-{:02}-{:02}", m.year(), m.month(), rng.random_range(1..=28)),
        _ => format!("{} {}", &name[..3], m.year()),
    }
}

fn ongoing<R: Rng + ?Sized>(rng: &mut R) -> String {
    if rng.random_bool(0.5) { "Present" } else { "Ongoing" }.to_string()
}

fn total_experience_months<R: Rng + ?Sized>(band: ExperienceBand, rng: &mut R) -> u32 {
    match band {
        ExperienceBand::UpTo4 => rng.random_range(6..=48),
        ExperienceBand::From5To9 => rng.random_range(60..=108),
        ExperienceBand::From10To14 => rng.random_range(120..=168),
        ExperienceBand::Over15 => rng.random_range(180..=360),
    }
}

fn job_count<R: Rng + ?Sized>(band: ExperienceBand, rng: &mut R) -> usize {
    match band {
        ExperienceBand::UpTo4 => rng.random_range(1..=3),
        ExperienceBand::From5To9 => rng.random_range(2..=4),
        ExperienceBand::From10To14 => rng.random_range(2..=5),
        ExperienceBand::Over15 => rng.random_range(3..=6),
    }
}

/// Split `total` into `k` positive parts.
fn split_months<R: Rng + ?Sized>(total: u32, k: usize, rng: &mut R) -> Vec<u32> {
    let k = k.min(total as usize).max(1);
    let mut cuts: Vec<u32> = (1..total).collect::<Vec<_>>();
    cuts.shuffle(rng);
    let mut cuts: Vec<u32> = cuts.into_iter().take(k - 1).collect();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(k);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(total)) {
        parts.push(c - prev);
        prev = c;
    }
    parts
}

fn age_band(years: i32) -> AgeBand {
    match years {
        ..=30 => AgeBand::UpTo30,
        31..=40 => AgeBand::From31To40,
        41..=50 => AgeBand::From41To50,
        _ => AgeBand::Over50,
    }
}

struct Study {
    degree: String,
    institution: String,
    start: YearMonth,
    end: YearMonth,
}

fn one_record<R: Rng + ?Sized>(spec: &MockCorpusSpec, index: usize, rng: &mut R) -> RawRecord {
    let weights: Vec<(usize, f64)> = spec.sectors.iter().enumerate().map(|(i, s)| (i, s.weight)).collect();
    let voc = &spec.sectors[pick_weighted(&weights, rng)];
    let band = pick_weighted(&spec.bands, rng);
    let now = spec.now;

    // jobs, newest first
    let total = total_experience_months(band, rng);
    let parts = split_months(total, job_count(band, rng), rng);
    let mut roles: Vec<&String> = voc.roles.choose_multiple(rng, parts.len()).collect();
    roles.shuffle(rng);
    let still_employed = rng.random_bool(0.45);
    let mut end = if still_employed {
        now
    } else {
        now.plus_months(-rng.random_range(1..=8))
    };
    let mut jobs = Vec::with_capacity(parts.len());
    for (i, &months) in parts.iter().enumerate() {
        let start = end.plus_months(-(months as i64));
        let end_text = if i == 0 && still_employed {
            ongoing(rng)
        } else {
            format_date(end, rng)
        };
        jobs.push(RawExperience {
            role: roles[i].clone(),
            start_date: format_date(start, rng),
            end_date: end_text,
            institution: Some(pick(&voc.employers, rng).to_string()),
            description: None,
        });
        end = start.plus_months(-rng.random_range(0..=4));
    }
    jobs.reverse();

    // studies finish before the first job, newest first
    let mut studies: Vec<Study> = Vec::new();
    let mut end = end.plus_months(-rng.random_range(0..=10));
    let home = pick(&spec.universities, rng).to_string();
    let institution = |rng: &mut R| {
        if rng.random_bool(0.5) {
            home.clone()
        } else {
            pick(&spec.universities, rng).to_string()
        }
    };
    let short = |rng: &mut R, normal: std::ops::RangeInclusive<u32>, short: std::ops::RangeInclusive<u32>| {
        if rng.random_bool(spec.short_degree_rate) {
            rng.random_range(short)
        } else {
            rng.random_range(normal)
        }
    };
    let vocational = rng.random_bool(voc.vocational_rate);
    if !vocational {
        if rng.random_bool(voc.phd_rate) {
            let months = short(rng, 36..=54, 10..=20);
            studies.push(Study {
                degree: pick(&voc.phds, rng).to_string(),
                institution: institution(rng),
                start: end.plus_months(-(months as i64)),
                end,
            });
            end = end.plus_months(-(months as i64) - rng.random_range(1..=4));
        }
        if rng.random_bool(spec.master_rate) {
            let masters = if rng.random_bool(0.12) { 2 } else { 1 };
            let mut names: Vec<&String> = voc.masters.choose_multiple(rng, masters).collect();
            names.shuffle(rng);
            for name in names {
                let months = short(rng, 10..=24, 4..=8);
                studies.push(Study {
                    degree: name.clone(),
                    institution: institution(rng),
                    start: end.plus_months(-(months as i64)),
                    end,
                });
                end = end.plus_months(-(months as i64) - rng.random_range(1..=4));
            }
        }
        let months = rng.random_range(36..=48);
        let start = end.plus_months(-(months as i64));
        studies.push(Study {
            degree: pick(&voc.bachelors, rng).to_string(),
            institution: home.clone(),
            start,
            end,
        });
        if rng.random_bool(spec.abroad_rate) {
            let from = start.plus_months(rng.random_range(12..=30));
            studies.push(Study {
                degree: pick(&spec.exchange_programmes, rng).to_string(),
                institution: pick(&spec.foreign_universities, rng).to_string(),
                start: from,
                end: from.plus_months(rng.random_range(4..=10)),
            });
        }
    } else {
        let months = rng.random_range(12..=24);
        studies.push(Study {
            degree: pick(&voc.vocational, rng).to_string(),
            institution: pick(&spec.schools, rng).to_string(),
            start: end.plus_months(-(months as i64)),
            end,
        });
    }
    studies.sort_by_key(|s| s.start);
    let first_start = studies[0].start;
    // aim for an age drawn from the marginal; studies cannot start too
    // young, and the career length puts a floor under the age
    let target = match pick_weighted(&spec.marginals.age, rng) {
        AgeBand::UpTo30 => rng.random_range(20..=30),
        AgeBand::From31To40 => rng.random_range(31..=40),
        AgeBand::From41To50 => rng.random_range(41..=50),
        AgeBand::Over50 => rng.random_range(51..=64),
    };
    let youngest = if vocational { 16 } else { 18 };
    let since_start = now.year() - first_start.year();
    let age = since_start + (target - since_start).clamp(youngest, youngest + 25);

    let education = studies
        .into_iter()
        .map(|s| RawEducation {
            degree: s.degree,
            start_date: format_date(s.start, rng),
            end_date: format_date(s.end, rng),
            institution: Some(s.institution),
        })
        .collect();

    let m = &spec.marginals;
    let mut profile = DemographicProfile::new(voc.sector, band);
    profile.gender = Some(pick_weighted(&m.gender, rng));
    profile.age = Some(age_band(age));
    profile.lgbtq = Some(rng.random_bool(m.lgbtq));
    profile.minority = Some(rng.random_bool(m.minority));
    profile.foreign = Some(rng.random_bool(m.foreign));
    profile.religion = Some(pick_weighted(&m.religion, rng));
    profile.disability = Some(rng.random_bool(m.disability));

    // each role owns a small window of the sector's hard skills, so skills
    // co-occur with roles the way they do in real CVs
    let mut hard: Vec<String> = Vec::new();
    for role in &roles {
        let Some(r) = voc.roles.iter().position(|x| x == *role) else {
            continue;
        };
        let window: Vec<&String> = (0..3).map(|j| &voc.skills[(r * 3 + j) % voc.skills.len()]).collect();
        for s in window.choose_multiple(rng, 2) {
            if !hard.contains(s) {
                hard.push((*s).clone());
            }
        }
    }
    let hard_n = rng.random_range(3..=8).min(voc.skills.len()).max(hard.len());
    while hard.len() < hard_n {
        let s = pick(&voc.skills, rng);
        if !hard.iter().any(|h| h == s) {
            hard.push(s.to_string());
        }
    }
    let soft_n = rng.random_range(1..=2).min(spec.soft_skills.len());
    let lang_n = rng.random_range(1..=2).min(spec.languages.len());
    let skills = SkillSet {
        hard,
        soft: spec.soft_skills.choose_multiple(rng, soft_n).cloned().collect(),
        languages: spec.languages.choose_multiple(rng, lang_n).cloned().collect(),
        others: Vec::new(),
    };

    RawRecord {
        id: format!("cv{:05}", index + 1),
        cv: RawCv {
            education_background: education,
            professional_experience: jobs,
            skills,
        },
        profile,
        experience_years: (total as f64 / 12.0 * 100.0).round() / 100.0,
    }
}

/// Draw `spec.total` raw records from the spec's seed.
pub fn generate_mock_corpus(spec: &MockCorpusSpec) -> Result<Vec<RawRecord>> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    Ok((0..spec.total).map(|i| one_record(spec, i, &mut rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::io::{ingest_all, IngestOptions};

    fn share(records: &[RawRecord], f: impl Fn(&DemographicProfile) -> bool) -> f64 {
        records.iter().filter(|r| f(&r.profile)).count() as f64 / records.len() as f64
    }

    #[test]
    fn marginals_match_targets() {
        let records = generate_mock_corpus(&MockCorpusSpec::default()).unwrap();
        assert_eq!(records.len(), 1000);
        let women = share(&records, |p| p.gender == Some(Gender::Woman));
        assert!((women - 0.50).abs() <= 0.05, "woman share {women}");
        let lgbtq = share(&records, |p| p.lgbtq == Some(true));
        assert!((lgbtq - 0.20).abs() <= 0.04, "lgbtq share {lgbtq}");
        let foreign = share(&records, |p| p.foreign == Some(true));
        assert!((foreign - 0.15).abs() <= 0.04, "foreign share {foreign}");
    }

    #[test]
    fn records_ingest_and_stay_in_band() {
        let spec = MockCorpusSpec {
            total: 300,
            seed: 3,
            ..MockCorpusSpec::default()
        };
        let raw = generate_mock_corpus(&spec).unwrap();
        let records = ingest_all(&raw, &IngestOptions::default()).unwrap();
        for r in &records {
            let cap = r.profile.experience_band.cap_months(480);
            let months: u32 = r.cv.professional_experience.iter().map(|e| e.duration_months).sum();
            assert!(months <= cap, "{}: {months} > {cap}", r.id);
            assert!(!r.cv.education_background.is_empty());
            assert!(!r.cv.professional_experience.is_empty());
            for w in r.cv.professional_experience.windows(2) {
                assert!(w[1].start_date >= w[0].end(spec.now));
            }
        }
    }

    #[test]
    fn same_seed_same_corpus() {
        let spec = MockCorpusSpec {
            total: 50,
            ..MockCorpusSpec::default()
        };
        assert_eq!(
            generate_mock_corpus(&spec).unwrap(),
            generate_mock_corpus(&spec).unwrap()
        );
        let other = MockCorpusSpec {
            seed: 8,
            ..spec.clone()
        };
        assert_ne!(
            generate_mock_corpus(&spec).unwrap(),
            generate_mock_corpus(&other).unwrap()
        );
    }

    #[test]
    fn invalid_marginals_are_config_errors() {
        let mut spec = MockCorpusSpec::default();
        spec.marginals.gender[0].1 = 0.9;
        assert!(matches!(generate_mock_corpus(&spec), Err(Error::Config(_))));
        let mut spec = MockCorpusSpec::default();
        spec.marginals.lgbtq = -0.1;
        assert!(matches!(generate_mock_corpus(&spec), Err(Error::Config(_))));
    }

    #[test]
    fn months_split_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for total in [1u32, 2, 7, 48, 300] {
            for k in 1..6 {
                let parts = split_months(total, k, &mut rng);
                assert_eq!(parts.iter().sum::<u32>(), total);
                assert!(parts.iter().all(|&p| p > 0));
            }
        }
    }
}
