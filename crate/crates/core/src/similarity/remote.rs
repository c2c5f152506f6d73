//! HTTP client for an external sentence-embedding service.
//!
//! Protocol: `POST {base_url}/embed` with body `{"texts": [...]}`; the
//! response is `{"embeddings": [[f32, ...], ...]}` in request order. An
//! optional bearer token is sent in the `Authorization` header. Embeddings
//! are cached by text and can be persisted as a JSON object.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{Embedding, SimilarityProvider};
use crate::error::{Error, Result};

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [String],
}

#[derive(Deserialize)]
struct EmbedResponse {
    embeddings: Vec<Vec<f32>>,
}

pub struct RemoteEmbeddingProvider {
    endpoint: String,
    token: Option<String>,
    batch_size: usize,
    client: reqwest::blocking::Client,
    cache: Mutex<BTreeMap<String, Vec<f32>>>,
    cache_path: Option<PathBuf>,
}

impl RemoteEmbeddingProvider {
    pub fn new(
        base_url: &str,
        token: Option<String>,
        batch_size: usize,
        timeout: Duration,
        cache_path: Option<PathBuf>,
    ) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| Error::Similarity(e.to_string()))?;
        let cache = match &cache_path {
            Some(p) if p.exists() => serde_json::from_str(&std::fs::read_to_string(p)?)?,
            _ => BTreeMap::new(),
        };
        Ok(RemoteEmbeddingProvider {
            endpoint: format!("{}/embed", base_url.trim_end_matches('/')),
            token,
            batch_size: batch_size.max(1),
            client,
            cache: Mutex::new(cache),
            cache_path,
        })
    }

    fn fetch(&self, texts: &[String]) -> Result<Vec<Vec<f32>>> {
        let mut req = self.client.post(&self.endpoint).json(&EmbedRequest { texts });
        if let Some(t) = &self.token {
            req = req.bearer_auth(t);
        }
        let resp = req
            .send()
            .and_then(|r| r.error_for_status())
            .map_err(|e| Error::Similarity(e.to_string()))?;
        let body: EmbedResponse = resp.json().map_err(|e| Error::Similarity(e.to_string()))?;
        if body.embeddings.len() != texts.len() {
            return Err(Error::Similarity(format!(
                "service returned {} embeddings for {} texts",
                body.embeddings.len(),
                texts.len()
            )));
        }
        Ok(body.embeddings)
    }

    /// Write the embedding cache, if a cache path was configured.
    pub fn persist(&self) -> Result<()> {
        if let Some(p) = &self.cache_path {
            let cache = self.cache.lock().expect("cache lock poisoned");
            std::fs::write(p, serde_json::to_string(&*cache)?)?;
        }
        Ok(())
    }

    pub fn cached(&self) -> usize {
        self.cache.lock().expect("cache lock poisoned").len()
    }
}

impl SimilarityProvider for RemoteEmbeddingProvider {
    fn name(&self) -> &str {
        "remote"
    }

    fn embed(&self, text: &str) -> Result<Embedding> {
        Ok(self.embed_batch(&[text.to_string()])?.remove(0))
    }

    fn embed_batch(&self, texts: &[String]) -> Result<Vec<Embedding>> {
        let missing: Vec<String> = {
            let cache = self.cache.lock().expect("cache lock poisoned");
            let mut m: Vec<String> = texts.iter().filter(|t| !cache.contains_key(*t)).cloned().collect();
            m.sort();
            m.dedup();
            m
        };
        for chunk in missing.chunks(self.batch_size) {
            let vectors = self.fetch(chunk)?;
            let mut cache = self.cache.lock().expect("cache lock poisoned");
            for (t, v) in chunk.iter().zip(vectors) {
                cache.insert(t.clone(), v);
            }
        }
        let cache = self.cache.lock().expect("cache lock poisoned");
        Ok(texts.iter().map(|t| Embedding::from_dense(&cache[t])).collect())
    }
}

impl Drop for RemoteEmbeddingProvider {
    fn drop(&mut self) {
        let _ = self.persist();
    }
}
