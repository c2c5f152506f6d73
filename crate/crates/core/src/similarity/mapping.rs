use std::collections::BTreeMap;

use super::Canonicalizer;
use crate::corpus::ParsedCV;
use crate::tables::EntityMapping;

fn ranked(counts: BTreeMap<String, usize>) -> Vec<String> {
    let mut v: Vec<(String, usize)> = counts.into_iter().collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    v.into_iter().map(|(k, _)| k).collect()
}

/// Rank the companies seen with each canonical role group, and the
/// institutions seen with each canonical degree group, by co-occurrence
/// count (ties alphabetical). CVs must still carry institution names.
pub fn build_entity_mapping<'a>(cvs: impl IntoIterator<Item = &'a ParsedCV>, canon: &Canonicalizer) -> EntityMapping {
    let mut roles: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    let mut degrees: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    for cv in cvs {
        for e in &cv.professional_experience {
            if let (Some(group), Some(inst)) = (canon.role_group(&e.role), e.institution.as_ref()) {
                *roles
                    .entry(group.to_string())
                    .or_default()
                    .entry(inst.clone())
                    .or_insert(0) += 1;
            }
        }
        for e in &cv.education_background {
            if let (Some(group), Some(inst)) = (canon.degree_group(&e.degree), e.institution.as_ref()) {
                *degrees
                    .entry(group.to_string())
                    .or_default()
                    .entry(inst.clone())
                    .or_insert(0) += 1;
            }
        }
    }
    EntityMapping {
        role_to_companies: roles.into_iter().map(|(k, v)| (k, ranked(v))).collect(),
        degree_to_institutions: degrees.into_iter().map(|(k, v)| (k, ranked(v))).collect(),
    }
}
