//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a JSON string; the plain Rust functions underneath
//! are what the tests exercise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

use cvsynth_core::contentgen::{
    enumerate_plausible_params, CountPolicy, GenerationConfig, GenerationContext, ListingCv, PlausibleCombination,
};
use cvsynth_core::corpus::io::{ingest_all, IngestOptions};
use cvsynth_core::mock::{generate_mock_corpus, MockCorpusSpec};
use cvsynth_core::render::render_markdown;
use cvsynth_core::similarity::LexicalProvider;
use cvsynth_core::structgen::{fit_weibull, sample, WeibullDist};
use cvsynth_core::tables::{IntermediateTables, TableOptions};
use cvsynth_core::validate::{js_divergence, CategoricalDistribution};

#[derive(Debug, Serialize)]
pub struct Bin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Serialize)]
pub struct WeibullExploration {
    pub fitted: WeibullDist,
    pub sample_mean: f64,
    pub bins: Vec<Bin>,
    /// (x, density of the generating distribution, density of the fit)
    pub density: Vec<(f64, f64, f64)>,
}

fn pdf(d: &WeibullDist, x: f64) -> f64 {
    if d.degenerate_point.is_some() || x < 0.0 {
        return 0.0;
    }
    let z = x / d.scale;
    d.shape / d.scale * z.powf(d.shape - 1.0) * (-z.powf(d.shape)).exp()
}

/// Draw `n` values from Weibull(shape, scale), fit them back and bin them.
pub fn explore_weibull(shape: f64, scale: f64, n: usize, seed: u64, bins: usize) -> Result<WeibullExploration, String> {
    let truth = WeibullDist::new(shape, scale).map_err(|e| e.to_string())?;
    if n < 2 || bins == 0 {
        return Err("need at least two draws and one bin".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<f64> = (0..n).map(|_| sample(&truth, &mut rng)).collect();
    let fitted = fit_weibull(&draws).map_err(|e| e.to_string())?;

    let hi = draws.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let width = hi / bins as f64;
    let mut counts = vec![0usize; bins];
    for x in &draws {
        counts[((x / width) as usize).min(bins - 1)] += 1;
    }
    let bins = counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| Bin {
            lo: i as f64 * width,
            hi: (i + 1) as f64 * width,
            count,
        })
        .collect();
    let density = (0..=100)
        .map(|i| {
            let x = hi * i as f64 / 100.0;
            (x, pdf(&truth, x), pdf(&fitted, x))
        })
        .collect();
    Ok(WeibullExploration {
        fitted,
        sample_mean: draws.iter().sum::<f64>() / n as f64,
        bins,
        density,
    })
}

#[derive(Debug, Serialize)]
pub struct Comparison {
    pub js: f64,
    pub categories: Vec<String>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

fn parse_counts(text: &str) -> Result<Vec<f64>, String> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v >= 0.0)
                .ok_or_else(|| format!("not a count: {t:?}"))
        })
        .collect()
}

/// Base-2 Jensen-Shannon divergence between two count vectors over the
/// same categories; the shorter vector is padded with zeros.
pub fn compare_counts(p: &str, q: &str) -> Result<Comparison, String> {
    let (mut p, mut q) = (parse_counts(p)?, parse_counts(q)?);
    let k = p.len().max(q.len());
    p.resize(k, 0.0);
    q.resize(k, 0.0);
    let normalize = |v: &[f64]| -> Result<Vec<f64>, String> {
        let t: f64 = v.iter().sum();
        if t <= 0.0 {
            return Err("each distribution needs a positive count".into());
        }
        Ok(v.iter().map(|x| x / t).collect())
    };
    let (p, q) = (normalize(&p)?, normalize(&q)?);
    let categories: Vec<String> = (1..=k).map(|i| format!("c{i}")).collect();
    let dist = |v: &[f64]| CategoricalDistribution::new("counts", categories.clone(), v.to_vec());
    let js = js_divergence(
        &dist(&p).map_err(|e| e.to_string())?,
        &dist(&q).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    Ok(Comparison { js, categories, p, q })
}

/// A mock reference corpus and its tables, held in memory.
pub struct Corpus {
    tables: IntermediateTables,
    combinations: Vec<PlausibleCombination>,
    min_group: usize,
}

#[derive(Debug, Serialize)]
pub struct CombinationSummary {
    pub label: String,
    pub reference_count: usize,
}

#[derive(Debug, Serialize)]
pub struct GeneratedCv {
    pub id: String,
    pub markdown: String,
    pub json: ListingCv,
}

#[derive(Debug, Serialize)]
pub struct Generated {
    pub label: String,
    pub reference_count: usize,
    pub produced: usize,
    pub attempts: usize,
    pub rejections: std::collections::BTreeMap<String, usize>,
    pub cvs: Vec<GeneratedCv>,
}

impl Corpus {
    pub fn build(total: usize, seed: u64, min_group: usize) -> Result<Self, String> {
        let spec = MockCorpusSpec {
            total,
            seed,
            ..MockCorpusSpec::default()
        };
        let raw = generate_mock_corpus(&spec).map_err(|e| e.to_string())?;
        let refs = ingest_all(&raw, &IngestOptions::default()).map_err(|e| e.to_string())?;
        let tables = IntermediateTables::build(&refs, &TableOptions::default(), &LexicalProvider, seed)
            .map_err(|e| e.to_string())?;
        let combinations = enumerate_plausible_params(&tables.anonymized, min_group);
        Ok(Corpus {
            tables,
            combinations,
            min_group,
        })
    }

    pub fn combinations(&self) -> Vec<CombinationSummary> {
        self.combinations
            .iter()
            .map(|c| CombinationSummary {
                label: c.params.to_string(),
                reference_count: c.reference_count,
            })
            .collect()
    }

    /// One generation attempt for the `index`-th plausible combination.
    pub fn generate(&self, index: usize, count: usize, seed: u64) -> Result<Generated, String> {
        let combo = self
            .combinations
            .get(index)
            .ok_or_else(|| format!("no combination {index}"))?;
        let config = GenerationConfig {
            min_group: self.min_group,
            count: CountPolicy::Fixed(count),
            ..GenerationConfig::default()
        };
        let ctx = GenerationContext::new(&self.tables, &LexicalProvider, &config).map_err(|e| e.to_string())?;
        let (cvs, report) = ctx.run_attempt(index, &combo.params, seed);
        if let Some(err) = report.error {
            return Err(err);
        }
        Ok(Generated {
            label: report.label,
            reference_count: report.reference_count,
            produced: report.produced,
            attempts: report.attempts,
            rejections: report.rejections.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            cvs: cvs
                .into_iter()
                .map(|s| GeneratedCv {
                    markdown: render_markdown(&s.cv),
                    json: ListingCv::from_cv(&s.cv),
                    id: s.id,
                })
                .collect(),
        })
    }
}

fn to_json<T: Serialize>(value: Result<T, String>) -> Result<String, JsError> {
    let value = value.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = exploreWeibull)]
pub fn explore_weibull_js(shape: f64, scale: f64, n: u32, seed: u32, bins: u32) -> Result<String, JsError> {
    to_json(explore_weibull(shape, scale, n as usize, seed as u64, bins as usize))
}

#[wasm_bindgen(js_name = compareCounts)]
pub fn compare_counts_js(p: &str, q: &str) -> Result<String, JsError> {
    to_json(compare_counts(p, q))
}

#[wasm_bindgen(js_name = Workbench)]
pub struct Workbench(Corpus);

#[wasm_bindgen(js_class = Workbench)]
impl Workbench {
    #[wasm_bindgen(constructor)]
    pub fn new(total: u32, seed: u32, min_group: u32) -> Result<Workbench, JsError> {
        Corpus::build(total as usize, seed as u64, min_group as usize)
            .map(Workbench)
            .map_err(|e| JsError::new(&e))
    }

    pub fn combinations(&self) -> Result<String, JsError> {
        to_json(Ok(self.0.combinations()))
    }

    pub fn generate(&self, index: u32, count: u32, seed: u32) -> Result<String, JsError> {
        to_json(self.0.generate(index as usize, count as usize, seed as u64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weibull_round_trip() {
        let e = explore_weibull(1.5, 4.0, 3000, 1, 20).unwrap();
        assert!((e.fitted.shape - 1.5).abs() < 0.15);
        assert!((e.fitted.scale - 4.0).abs() < 0.4);
        assert_eq!(e.bins.iter().map(|b| b.count).sum::<usize>(), 3000);
        assert_eq!(e.density.len(), 101);
        assert!(explore_weibull(-1.0, 4.0, 10, 1, 5).is_err());
    }

    #[test]
    fn counts_comparison() {
        let same = compare_counts("1 2 3", "2, 4, 6").unwrap();
        assert_eq!(same.js, 0.0);
        let disjoint = compare_counts("5 0", "0 0 7").unwrap();
        assert_eq!(disjoint.js, 1.0);
        assert_eq!(disjoint.p, vec![1.0, 0.0, 0.0]);
        assert!(compare_counts("0 0", "1").is_err());
        assert!(compare_counts("a", "1").is_err());
    }

    #[test]
    fn workbench_generates_from_a_mock_corpus() {
        let corpus = Corpus::build(300, 3, 10).unwrap();
        let combos = corpus.combinations();
        assert!(!combos.is_empty());
        assert!(combos.iter().all(|c| c.reference_count >= 10));
        let out = corpus.generate(0, 3, 1).unwrap();
        assert!(out.produced <= 3);
        for cv in &out.cvs {
            assert!(cv.markdown.starts_with("# Curriculum Vitae"));
        }
        assert_eq!(corpus.generate(0, 3, 1).unwrap().cvs.len(), out.cvs.len());
        assert!(corpus.generate(combos.len(), 1, 1).is_err());
    }
}
