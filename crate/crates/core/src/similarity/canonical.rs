use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{cluster, Linkage, SimilarityProvider};
use crate::corpus::{EducationKind, ParsedCV};
use crate::error::Result;
use crate::text;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalGroup {
    pub id: usize,
    /// Most frequent member label, ties broken lexicographically.
    pub representative: String,
    pub members: Vec<String>,
}

/// Label-to-group assignment produced by [`canonicalize`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Canonicalization {
    pub groups: Vec<CanonicalGroup>,
    /// Normalized label -> group id.
    pub index: BTreeMap<String, usize>,
}

impl Canonicalization {
    pub fn group_id(&self, label: &str) -> Option<usize> {
        self.index.get(&text::normalize(label)).copied()
    }

    pub fn group_of(&self, label: &str) -> Option<&CanonicalGroup> {
        self.group_id(label).map(|id| &self.groups[id])
    }

    pub fn representative(&self, label: &str) -> Option<&str> {
        self.group_of(label).map(|g| g.representative.as_str())
    }

    /// Concatenate independent canonicalizations, renumbering group ids.
    pub fn merge(parts: Vec<Canonicalization>) -> Canonicalization {
        let mut out = Canonicalization::default();
        for part in parts {
            let offset = out.groups.len();
            for mut g in part.groups {
                g.id += offset;
                out.groups.push(g);
            }
            for (k, v) in part.index {
                out.index.insert(k, v + offset);
            }
        }
        out
    }
}

/// Group labels naming the same concept by clustering them.
pub fn canonicalize(
    provider: &dyn SimilarityProvider,
    labels: &[String],
    threshold: f64,
    linkage: Linkage,
) -> Result<Canonicalization> {
    if labels.is_empty() {
        return Ok(Canonicalization::default());
    }
    let clustering = cluster(provider, labels, threshold, linkage)?;
    let mut counts: Vec<BTreeMap<&str, usize>> = vec![BTreeMap::new(); clustering.cluster_count()];
    for (label, &id) in labels.iter().zip(&clustering.labels) {
        *counts[id].entry(label.as_str()).or_insert(0) += 1;
    }
    let mut out = Canonicalization::default();
    for (id, members) in counts.into_iter().enumerate() {
        // BTreeMap iteration is lexicographic, so the first max wins ties
        let representative = members
            .iter()
            .fold(None::<(&str, usize)>, |best, (&l, &c)| match best {
                Some((_, bc)) if bc >= c => best,
                _ => Some((l, c)),
            })
            .map(|(l, _)| l.to_string())
            .unwrap_or_default();
        for m in members.keys() {
            out.index.insert(text::normalize(m), id);
        }
        out.groups.push(CanonicalGroup {
            id,
            representative,
            members: members.keys().map(|s| s.to_string()).collect(),
        });
    }
    Ok(out)
}

/// Canonical degree and role groups for a corpus. Degrees are grouped
/// separately per education kind, so a bachelor never shares a group with
/// a master in the same field.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Canonicalizer {
    pub degrees: Canonicalization,
    pub roles: Canonicalization,
}

impl Canonicalizer {
    pub fn build<'a>(
        provider: &dyn SimilarityProvider,
        cvs: impl IntoIterator<Item = &'a ParsedCV>,
        threshold: f64,
        linkage: Linkage,
    ) -> Result<Self> {
        let mut degrees: BTreeMap<EducationKind, Vec<String>> = BTreeMap::new();
        let mut roles = Vec::new();
        let mut first_kind: HashMap<String, EducationKind> = HashMap::new();
        for cv in cvs {
            for e in &cv.education_background {
                // a label keeps the kind it was first seen with
                let kind = *first_kind.entry(text::normalize(&e.degree)).or_insert(e.kind);
                degrees.entry(kind).or_default().push(e.degree.clone());
            }
            roles.extend(cv.professional_experience.iter().map(|e| e.role.clone()));
        }
        let parts = degrees
            .values()
            .map(|labels| canonicalize(provider, labels, threshold, linkage))
            .collect::<Result<Vec<_>>>()?;
        Ok(Canonicalizer {
            degrees: Canonicalization::merge(parts),
            roles: canonicalize(provider, &roles, threshold, linkage)?,
        })
    }

    pub fn degree_group(&self, degree: &str) -> Option<&str> {
        self.degrees.representative(degree)
    }

    pub fn role_group(&self, role: &str) -> Option<&str> {
        self.roles.representative(role)
    }
}
