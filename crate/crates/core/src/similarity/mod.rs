//! Text similarity, agglomerative clustering and label canonicalization.
//!
//! The default [`LexicalProvider`] scores strings by cosine similarity of
//! term-frequency vectors built from word tokens and padded character
//! trigrams. An HTTP embedding client ([`remote`]) can replace it when an
//! embedding service is configured.

mod canonical;
mod cluster;
mod mapping;
#[cfg(feature = "remote")]
pub mod remote;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use canonical::{canonicalize, CanonicalGroup, Canonicalization, Canonicalizer};
pub use cluster::{agglomerate, cluster, Clustering, Linkage};
pub use mapping::build_entity_mapping;

use crate::error::{Error, Result};
use crate::text;

/// Sparse, L2-normalized feature vector. Dense embeddings use their
/// component index as key.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Embedding {
    entries: Vec<(u64, f64)>,
}

impl Embedding {
    pub fn from_counts(counts: BTreeMap<u64, f64>) -> Self {
        let norm = counts.values().map(|v| v * v).sum::<f64>().sqrt();
        let entries = if norm > 0.0 {
            counts.into_iter().map(|(k, v)| (k, v / norm)).collect()
        } else {
            Vec::new()
        };
        Embedding { entries }
    }

    pub fn from_dense(values: &[f32]) -> Self {
        Self::from_counts(
            values
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, v)| (i as u64, *v as f64))
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Cosine similarity clamped to [0, 1].
    pub fn cosine(&self, other: &Embedding) -> f64 {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j, mut dot) = (0, 0, 0.0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    dot += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        dot.clamp(0.0, 1.0)
    }
}

pub trait SimilarityProvider: Send + Sync {
    fn name(&self) -> &str;

    fn embed(&self, text: &str) -> Result<Embedding>;

    fn embed_batch(&self, texts: &[String]) -> Result<Vec<Embedding>> {
        texts.iter().map(|t| self.embed(t)).collect()
    }

    /// Score in [0, 1]; 1 for identical inputs.
    fn similarity(&self, a: &str, b: &str) -> Result<f64> {
        if a.trim().is_empty() || b.trim().is_empty() {
            return Err(Error::Similarity("empty text".into()));
        }
        if text::normalize(a) == text::normalize(b) {
            return Ok(1.0);
        }
        Ok(self.embed(a)?.cosine(&self.embed(b)?))
    }
}

/// Pairwise distance matrix `1 - similarity`, row-major `n * n`.
pub fn distance_matrix(provider: &dyn SimilarityProvider, items: &[String]) -> Result<Vec<f64>> {
    let embeddings = provider.embed_batch(items)?;
    let n = items.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let s = if text::normalize(&items[i]) == text::normalize(&items[j]) {
                1.0
            } else {
                embeddings[i].cosine(&embeddings[j])
            };
            d[i * n + j] = 1.0 - s;
            d[j * n + i] = 1.0 - s;
        }
    }
    Ok(d)
}

/// Abbreviations expanded before feature extraction so that "BSc" and
/// "bachelor in science" share their features.
const ABBREVIATIONS: &[(&str, &str)] = &[
    ("bsc", "bachelor science"),
    ("ba", "bachelor arts"),
    ("beng", "bachelor engineering"),
    ("llb", "bachelor laws"),
    ("msc", "master science"),
    ("ma", "master arts"),
    ("meng", "master engineering"),
    ("mba", "master business administration"),
    ("llm", "master laws"),
    ("phd", "doctorate philosophy"),
    ("dphil", "doctorate philosophy"),
    ("bachelors", "bachelor"),
    ("masters", "master"),
    ("doctoral", "doctorate"),
    ("hr", "human resources"),
    ("it", "information technology"),
    ("ict", "information communication technology"),
    ("sr", "senior"),
    ("jr", "junior"),
];

const STOPWORDS: &[&str] = &[
    "of", "in", "the", "and", "a", "an", "for", "at", "on", "s", "with", "to",
];

/// Bag of word tokens and character trigrams, compared by cosine.
#[derive(Clone, Debug, Default)]
pub struct LexicalProvider;

impl LexicalProvider {
    pub fn new() -> Self {
        LexicalProvider
    }

    fn terms(text: &str) -> Vec<String> {
        let mut out = Vec::new();
        for tok in text::tokens(text) {
            match ABBREVIATIONS.iter().find(|(a, _)| *a == tok) {
                Some((_, exp)) => out.extend(exp.split(' ').map(str::to_string)),
                None => out.push(tok),
            }
        }
        out.retain(|t| !STOPWORDS.contains(&t.as_str()));
        out
    }

    pub fn features(text: &str) -> BTreeMap<u64, f64> {
        let terms = Self::terms(text);
        let mut counts = BTreeMap::new();
        for t in &terms {
            *counts.entry(fnv1a(b'w', t.as_bytes())).or_insert(0.0) += 1.0;
        }
        let joined: Vec<char> = format!(" {} ", terms.join(" ")).chars().collect();
        for w in joined.windows(3) {
            let tri: String = w.iter().collect();
            if tri.trim().is_empty() {
                continue;
            }
            *counts.entry(fnv1a(b'c', tri.as_bytes())).or_insert(0.0) += 1.0;
        }
        counts
    }
}

impl SimilarityProvider for LexicalProvider {
    fn name(&self) -> &str {
        "lexical"
    }

    fn embed(&self, text: &str) -> Result<Embedding> {
        Ok(Embedding::from_counts(Self::features(text)))
    }
}

fn fnv1a(tag: u8, bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in std::iter::once(&tag).chain(bytes) {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    #[default]
    Local,
    Remote,
}

/// Provider selection. The remote endpoint and token are read from the
/// environment variables named here.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProviderSettings {
    pub kind: ProviderKind,
    pub url_env: String,
    pub token_env: String,
    pub batch_size: usize,
    pub timeout_secs: u64,
    pub cache_path: Option<std::path::PathBuf>,
}

impl Default for ProviderSettings {
    fn default() -> Self {
        ProviderSettings {
            kind: ProviderKind::Local,
            url_env: "CVSYNTH_EMBEDDING_URL".into(),
            token_env: "CVSYNTH_EMBEDDING_TOKEN".into(),
            batch_size: 64,
            timeout_secs: 10,
            cache_path: None,
        }
    }
}

/// The provider actually in use, plus the reason a configured remote
/// provider was abandoned in favour of the local one.
#[derive(Clone)]
pub struct ResolvedProvider {
    pub provider: Arc<dyn SimilarityProvider>,
    pub fallback: Option<String>,
}

impl ResolvedProvider {
    pub fn local() -> Self {
        ResolvedProvider {
            provider: Arc::new(LexicalProvider),
            fallback: None,
        }
    }
}

/// Build the configured provider, reading the environment through `env`.
/// A remote provider that cannot be constructed or fails a probe request
/// degrades to the lexical provider.
pub fn resolve_provider(settings: &ProviderSettings, env: impl Fn(&str) -> Option<String>) -> ResolvedProvider {
    match settings.kind {
        ProviderKind::Local => ResolvedProvider::local(),
        ProviderKind::Remote => {
            let fallback = |reason: String| ResolvedProvider {
                provider: Arc::new(LexicalProvider),
                fallback: Some(reason),
            };
            let Some(url) = env(&settings.url_env) else {
                return fallback(format!("{} is not set", settings.url_env));
            };
            remote_or_fallback(settings, url, env(&settings.token_env)).unwrap_or_else(fallback)
        }
    }
}

#[cfg(feature = "remote")]
fn remote_or_fallback(
    settings: &ProviderSettings,
    url: String,
    token: Option<String>,
) -> std::result::Result<ResolvedProvider, String> {
    let client = remote::RemoteEmbeddingProvider::new(
        &url,
        token,
        settings.batch_size,
        std::time::Duration::from_secs(settings.timeout_secs),
        settings.cache_path.clone(),
    )
    .map_err(|e| format!("remote provider unavailable: {e}"))?;
    client
        .embed_batch(&["probe".to_string()])
        .map_err(|e| format!("remote provider unreachable: {e}"))?;
    Ok(ResolvedProvider {
        provider: Arc::new(client),
        fallback: None,
    })
}

#[cfg(not(feature = "remote"))]
fn remote_or_fallback(
    _settings: &ProviderSettings,
    _url: String,
    _token: Option<String>,
) -> std::result::Result<ResolvedProvider, String> {
    Err("built without remote provider support".into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sim(a: &str, b: &str) -> f64 {
        LexicalProvider.similarity(a, b).unwrap()
    }

    #[test]
    fn identity_and_disjoint() {
        assert_eq!(sim("Leadership", "Leadership"), 1.0);
        assert_eq!(sim("xyz", "qqq"), 0.0);
        assert!(LexicalProvider.similarity("", "a").is_err());
    }

    #[test]
    fn abbreviations_bridge_degree_spellings() {
        assert_eq!(sim("BSc", "bachelor in science"), 1.0);
        let s = sim("BSc Computer Science", "Bachelor of Science in Computer Science");
        assert_eq!(s, 1.0);
    }

    #[test]
    fn unset_remote_url_falls_back() {
        let settings = ProviderSettings {
            kind: ProviderKind::Remote,
            ..Default::default()
        };
        let r = resolve_provider(&settings, |_| None);
        assert_eq!(r.provider.name(), "lexical");
        assert!(r.fallback.unwrap().contains("CVSYNTH_EMBEDDING_URL"));
    }

    proptest! {
        #[test]
        fn similarity_is_a_symmetric_bounded_score(a in "[a-zA-Z ]{1,24}", b in "[a-zA-Z ]{1,24}") {
            prop_assume!(!a.trim().is_empty() && !b.trim().is_empty());
            let ab = sim(&a, &b);
            let ba = sim(&b, &a);
            prop_assert!((ab - ba).abs() < 1e-9);
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert!((sim(&a, &a) - 1.0).abs() < 1e-9);
        }
    }
}
