//! Section sizing: how many items each section of a synthetic CV gets.
//!
//! For every individual generation parameter, the per-CV item counts of the
//! reference CVs matching that parameter are fitted with a Weibull
//! distribution. One draw per parameter is combined into a single size per
//! section.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::corpus::Section;
use crate::error::{Error, Result};
use crate::params::{GenerationParams, Parameter};
use crate::tables::AnonymizedCvRecord;

pub const DEFAULT_SKILLS_CAP: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    MaximumLikelihood,
    /// The likelihood solver did not converge.
    MethodOfMoments,
    /// All samples were equal.
    Degenerate,
}

/// A two-parameter Weibull distribution, or a point mass when fitting
/// collapses. `shape` and `scale` are unused when `degenerate_point` is set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeibullDist {
    pub shape: f64,
    pub scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degenerate_point: Option<f64>,
    pub method: FitMethod,
}

impl WeibullDist {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite() && scale > 0.0 && scale.is_finite()) {
            return Err(Error::Validation(format!(
                "invalid Weibull parameters shape={shape}, scale={scale}"
            )));
        }
        Ok(WeibullDist {
            shape,
            scale,
            degenerate_point: None,
            method: FitMethod::MaximumLikelihood,
        })
    }

    pub fn degenerate(point: f64) -> Self {
        WeibullDist {
            shape: 1.0,
            scale: 1.0,
            degenerate_point: Some(point.max(0.0)),
            method: FitMethod::Degenerate,
        }
    }

    /// Inverse CDF at `u`, where `u` is the survival probability exp(-(x/scale)^shape).
    pub fn quantile(&self, u: f64) -> f64 {
        if let Some(p) = self.degenerate_point {
            return p;
        }
        let u = u.clamp(f64::MIN_POSITIVE, 1.0);
        (self.scale * (-u.ln()).powf(1.0 / self.shape)).max(0.0)
    }

    pub fn mean(&self) -> f64 {
        match self.degenerate_point {
            Some(p) => p,
            None => self.scale * ln_gamma(1.0 + 1.0 / self.shape).exp(),
        }
    }

    pub fn log_likelihood(&self, samples: &[f64]) -> f64 {
        let (k, l) = (self.shape, self.scale);
        samples
            .iter()
            .map(|&x| {
                let z = x / l;
                k.ln() - l.ln() + (k - 1.0) * z.ln() - z.powf(k)
            })
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Relative step size at which the shape iteration stops.
    pub tolerance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iterations: 200,
            tolerance: 1e-12,
        }
    }
}

pub fn fit_weibull(samples: &[f64]) -> Result<WeibullDist> {
    fit_weibull_with(samples, &FitOptions::default())
}

/// Maximum-likelihood fit. Zero samples are floored at half the smallest
/// positive sample, since the likelihood is undefined at zero.
pub fn fit_weibull_with(samples: &[f64], opts: &FitOptions) -> Result<WeibullDist> {
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    if let Some(bad) = samples.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::Validation(format!(
            "Weibull sample {bad} is not a finite non-negative number"
        )));
    }
    if samples.iter().all(|&x| x == samples[0]) {
        return Ok(WeibullDist::degenerate(samples[0]));
    }
    let floor = samples
        .iter()
        .copied()
        .filter(|&x| x > 0.0)
        .fold(f64::INFINITY, f64::min)
        / 2.0;
    let xs: Vec<f64> = samples.iter().map(|&x| x.max(floor)).collect();

    match mle_shape(&xs, opts) {
        Some(shape) => {
            let max = xs.iter().copied().fold(0.0, f64::max);
            let n = xs.len() as f64;
            let s0: f64 = xs.iter().map(|x| (x / max).powf(shape)).sum();
            let scale = max * (s0 / n).powf(1.0 / shape);
            WeibullDist::new(shape, scale)
        }
        None => moments_fit(&xs),
    }
}

/// Root of the profile-likelihood equation
///   sum(x^k ln x) / sum(x^k) - 1/k - mean(ln x) = 0
/// using x / max(x) so powers stay in (0, 1].
fn mle_shape(xs: &[f64], opts: &FitOptions) -> Option<f64> {
    let max = xs.iter().copied().fold(0.0, f64::max);
    let logs: Vec<f64> = xs.iter().map(|x| (x / max).ln()).collect();
    let n = logs.len() as f64;
    let mean_log = logs.iter().sum::<f64>() / n;

    let eval = |k: f64| {
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        for &l in &logs {
            let w = (k * l).exp();
            s0 += w;
            s1 += w * l;
            s2 += w * l * l;
        }
        let g = s1 / s0 - 1.0 / k - mean_log;
        let dg = (s2 * s0 - s1 * s1) / (s0 * s0) + 1.0 / (k * k);
        (g, dg)
    };

    let (mut lo, mut hi) = (1.0, 1.0);
    for _ in 0..opts.max_iterations {
        if eval(lo).0 < 0.0 {
            break;
        }
        lo /= 2.0;
    }
    for _ in 0..opts.max_iterations {
        if eval(hi).0 > 0.0 {
            break;
        }
        hi *= 2.0;
    }
    if !(eval(lo).0 < 0.0 && eval(hi).0 > 0.0) {
        return None;
    }

    let mut k = (lo + hi) / 2.0;
    for _ in 0..opts.max_iterations {
        let (g, dg) = eval(k);
        if g == 0.0 {
            return Some(k);
        }
        if g < 0.0 {
            lo = k;
        } else {
            hi = k;
        }
        let newton = k - g / dg;
        let next = if dg > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            (lo + hi) / 2.0
        };
        if (next - k).abs() <= opts.tolerance * k || hi - lo <= opts.tolerance * k {
            return Some(next);
        }
        k = next;
    }
    None
}

/// Matches the coefficient of variation, then the mean.
fn moments_fit(xs: &[f64]) -> Result<WeibullDist> {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let cv2 = var / (mean * mean);
    let h = |k: f64| (ln_gamma(1.0 + 2.0 / k) - 2.0 * ln_gamma(1.0 + 1.0 / k)).exp() - 1.0 - cv2;

    let (mut lo, mut hi) = (1e-2, 1e3);
    if h(lo) < 0.0 || h(hi) > 0.0 {
        return Err(Error::Validation(format!(
            "no Weibull shape matches coefficient of variation {}",
            cv2.sqrt()
        )));
    }
    for _ in 0..200 {
        let mid = (lo + hi) / 2.0;
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let shape = (lo + hi) / 2.0;
    let scale = mean / ln_gamma(1.0 + 1.0 / shape).exp();
    let mut dist = WeibullDist::new(shape, scale)?;
    dist.method = FitMethod::MethodOfMoments;
    Ok(dist)
}

/// Inverse-CDF draw; never negative.
pub fn sample<R: Rng + ?Sized>(dist: &WeibullDist, rng: &mut R) -> f64 {
    // random() is in [0, 1); 1 - u is in (0, 1] so the log is finite.
    let u = 1.0 - rng.random::<f64>();
    dist.quantile(u)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CombineStrategy {
    Mean,
    Median,
    Min,
    Max,
    /// One of the other four, drawn uniformly for each section.
    #[default]
    Random,
}

impl CombineStrategy {
    pub const CONCRETE: [CombineStrategy; 4] = [
        CombineStrategy::Mean,
        CombineStrategy::Median,
        CombineStrategy::Min,
        CombineStrategy::Max,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CombineStrategy::Mean => "mean",
            CombineStrategy::Median => "median",
            CombineStrategy::Min => "min",
            CombineStrategy::Max => "max",
            CombineStrategy::Random => "random",
        }
    }

    /// Combine non-empty `samples`. Only `Random` consumes randomness.
    pub fn combine<R: Rng + ?Sized>(self, samples: &[f64], rng: &mut R) -> f64 {
        assert!(!samples.is_empty(), "nothing to combine");
        match self {
            CombineStrategy::Mean => samples.iter().sum::<f64>() / samples.len() as f64,
            CombineStrategy::Median => {
                let mut s = samples.to_vec();
                s.sort_by(f64::total_cmp);
                let m = s.len() / 2;
                if s.len() % 2 == 1 {
                    s[m]
                } else {
                    (s[m - 1] + s[m]) / 2.0
                }
            }
            CombineStrategy::Min => samples.iter().copied().fold(f64::INFINITY, f64::min),
            CombineStrategy::Max => samples.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            CombineStrategy::Random => {
                let pick = Self::CONCRETE[rng.random_range(0..Self::CONCRETE.len())];
                pick.combine(samples, rng)
            }
        }
    }
}

impl fmt::Display for CombineStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CombineStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Self::CONCRETE.as_slice(), &[CombineStrategy::Random]]
            .concat()
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown combine strategy `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SectionSizes {
    pub education: usize,
    pub experience: usize,
    pub skills: usize,
}

impl SectionSizes {
    pub fn get(&self, section: Section) -> usize {
        match section {
            Section::Education => self.education,
            Section::Experience => self.experience,
            Section::Skills => self.skills,
        }
    }
}

/// Round half away from zero, then clamp into `[1, cap]`.
pub fn finalize_size(value: f64, cap: Option<usize>) -> usize {
    let n = value.round().max(1.0) as usize;
    match cap {
        Some(c) => n.min(c.max(1)),
        None => n,
    }
}

/// The fitted per-parameter distributions for one parameter set, so that
/// repeated CVs of the same combination do not refit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionModel {
    /// One entry per individual parameter: (label, [education, experience, skills]).
    pub parameters: Vec<(String, [WeibullDist; 3])>,
}

impl SectionModel {
    pub fn fit(params: &GenerationParams, table: &[AnonymizedCvRecord]) -> Result<Self> {
        let mut parameters = Vec::new();
        for p in params.individual() {
            parameters.push((p.to_string(), fit_parameter(&p, table)?));
        }
        Ok(SectionModel { parameters })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, strategy: CombineStrategy, skills_cap: usize) -> SectionSizes {
        let mut size = |i: usize, cap: Option<usize>| {
            let draws: Vec<f64> = self.parameters.iter().map(|(_, d)| sample(&d[i], rng)).collect();
            finalize_size(strategy.combine(&draws, rng), cap)
        };
        let education = size(0, None);
        let experience = size(1, None);
        let skills = size(2, Some(skills_cap));
        SectionSizes {
            education,
            experience,
            skills,
        }
    }
}

fn fit_parameter(p: &Parameter, table: &[AnonymizedCvRecord]) -> Result<[WeibullDist; 3]> {
    let matching: Vec<&AnonymizedCvRecord> = table.iter().filter(|r| p.matches(&r.profile)).collect();
    if matching.len() < 2 {
        return Err(Error::SparseParameter {
            parameter: p.to_string(),
            count: matching.len(),
        });
    }
    let fit = |section| {
        let counts: Vec<f64> = matching.iter().map(|r| r.cv.section_len(section) as f64).collect();
        fit_weibull(&counts)
    };
    Ok([
        fit(Section::Education)?,
        fit(Section::Experience)?,
        fit(Section::Skills)?,
    ])
}

pub fn compute_section_sizes<R: Rng + ?Sized>(
    params: &GenerationParams,
    table: &[AnonymizedCvRecord],
    rng: &mut R,
    strategy: CombineStrategy,
    skills_cap: usize,
) -> Result<SectionSizes> {
    Ok(SectionModel::fit(params, table)?.sample(rng, strategy, skills_cap))
}
