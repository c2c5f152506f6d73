use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{distance_matrix, SimilarityProvider};
use crate::error::{Error, Result};
use crate::text;

/// Inter-cluster dissimilarity used when two clusters merge.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    #[default]
    Average,
    Complete,
    Single,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    pub items: Vec<String>,
    /// Cluster id per item; ids are contiguous from 0.
    pub labels: Vec<usize>,
    pub linkage: Linkage,
    pub distance_threshold: f64,
}

impl Clustering {
    pub fn cluster_count(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }

    /// Cluster id of `item` (compared after normalization).
    pub fn label_of(&self, item: &str) -> Option<usize> {
        let key = text::normalize(item);
        self.items
            .iter()
            .position(|i| text::normalize(i) == key)
            .map(|p| self.labels[p])
    }
}

fn check_threshold(threshold: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::Config(format!("distance threshold {threshold} outside (0, 1]")));
    }
    // an exclusive lower bound: 0 means "merge only identical points"
    Ok(threshold.max(f64::MIN_POSITIVE))
}

/// Bottom-up agglomeration over an `n * n` distance matrix. Clusters keep
/// the smallest member index as their identity; the closest pair is merged
/// (ties go to the lowest index pair) until the smallest inter-cluster
/// distance exceeds `threshold`. Returns, per point, the index of its
/// cluster's smallest member.
pub fn agglomerate(n: usize, dist: &[f64], threshold: f64, linkage: Linkage) -> Vec<usize> {
    assert_eq!(dist.len(), n * n);
    let mut d = dist.to_vec();
    let mut size = vec![1usize; n];
    let mut active = vec![true; n];
    let mut root: Vec<usize> = (0..n).collect();
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            for j in (i + 1)..n {
                if active[j] && best.is_none_or(|(_, _, b)| d[i * n + j] < b) {
                    best = Some((i, j, d[i * n + j]));
                }
            }
        }
        let Some((a, b, dmin)) = best else { break };
        if dmin > threshold {
            break;
        }
        for k in 0..n {
            if !active[k] || k == a || k == b {
                continue;
            }
            let (da, db) = (d[a * n + k], d[b * n + k]);
            let merged = match linkage {
                Linkage::Single => da.min(db),
                Linkage::Complete => da.max(db),
                Linkage::Average => (size[a] as f64 * da + size[b] as f64 * db) / (size[a] + size[b]) as f64,
            };
            d[a * n + k] = merged;
            d[k * n + a] = merged;
        }
        size[a] += size[b];
        active[b] = false;
        for r in root.iter_mut() {
            if *r == b {
                *r = a;
            }
        }
    }
    root
}

/// Cluster `items` by `1 - similarity`. Items are deduplicated on their
/// normalized text and processed in lexicographic order, so the partition
/// does not depend on input order.
pub fn cluster(
    provider: &dyn SimilarityProvider,
    items: &[String],
    threshold: f64,
    linkage: Linkage,
) -> Result<Clustering> {
    let threshold = check_threshold(threshold)?;
    let mut distinct: BTreeMap<String, String> = BTreeMap::new();
    for item in items {
        distinct.entry(text::normalize(item)).or_insert_with(|| item.clone());
    }
    let keys: Vec<&String> = distinct.keys().collect();
    let texts: Vec<String> = distinct.values().cloned().collect();
    let dist = distance_matrix(provider, &texts)?;
    let roots = agglomerate(texts.len(), &dist, threshold, linkage);
    // ids in order of each cluster's lexicographically smallest member
    let mut id_of_root = BTreeMap::new();
    for &r in &roots {
        let next = id_of_root.len();
        id_of_root.entry(r).or_insert(next);
    }
    let label_of_key: BTreeMap<&str, usize> = keys
        .iter()
        .zip(&roots)
        .map(|(k, r)| (k.as_str(), id_of_root[r]))
        .collect();
    let labels = items
        .iter()
        .map(|i| label_of_key[text::normalize(i).as_str()])
        .collect();
    Ok(Clustering {
        items: items.to_vec(),
        labels,
        linkage,
        distance_threshold: threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::LexicalProvider;
    use proptest::prelude::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    /// Reference agglomeration: recompute every inter-cluster distance from
    /// the point distances at each step.
    fn brute_force(n: usize, d: &[f64], threshold: f64, linkage: Linkage) -> Vec<Vec<usize>> {
        let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        loop {
            let mut best: Option<(usize, usize, f64)> = None;
            for a in 0..clusters.len() {
                for b in (a + 1)..clusters.len() {
                    let pairs: Vec<f64> = clusters[a]
                        .iter()
                        .flat_map(|&i| clusters[b].iter().map(move |&j| d[i * n + j]))
                        .collect();
                    let v = match linkage {
                        Linkage::Single => pairs.iter().cloned().fold(f64::INFINITY, f64::min),
                        Linkage::Complete => pairs.iter().cloned().fold(0.0, f64::max),
                        Linkage::Average => pairs.iter().sum::<f64>() / pairs.len() as f64,
                    };
                    if best.is_none_or(|(_, _, bv)| v < bv - 1e-12) {
                        best = Some((a, b, v));
                    }
                }
            }
            match best {
                Some((a, b, v)) if v <= threshold => {
                    let moved = clusters.remove(b);
                    clusters[a].extend(moved);
                    clusters[a].sort();
                }
                _ => break,
            }
        }
        clusters.sort();
        clusters
    }

    fn partition(roots: &[usize]) -> Vec<Vec<usize>> {
        let mut m: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, r) in roots.iter().enumerate() {
            m.entry(*r).or_default().push(i);
        }
        let mut v: Vec<_> = m.into_values().collect();
        v.sort();
        v
    }

    #[test]
    fn developers_vs_chef() {
        let items = strings(&["Python developer", "Software developer", "Pastry chef"]);
        let dist = distance_matrix(&LexicalProvider, &items).unwrap();
        // the brute-force oracle on the 3x3 matrix
        let expected = brute_force(3, &dist, 0.6, Linkage::Average);
        assert_eq!(expected, vec![vec![0, 1], vec![2]]);
        let c = cluster(&LexicalProvider, &items, 0.6, Linkage::Average).unwrap();
        assert_eq!(c.labels[0], c.labels[1]);
        assert_ne!(c.labels[0], c.labels[2]);
        assert_eq!(c.cluster_count(), 2);
    }

    #[test]
    fn trivial_inputs() {
        let one = cluster(&LexicalProvider, &strings(&["Lawyer"]), 0.5, Linkage::Average).unwrap();
        assert_eq!(one.labels, vec![0]);
        let same = strings(&["Cashier", "cashier ", "CASHIER"]);
        let c = cluster(&LexicalProvider, &same, 0.5, Linkage::Complete).unwrap();
        assert_eq!(c.labels, vec![0, 0, 0]);
    }

    #[test]
    fn threshold_boundaries() {
        let items = strings(&["Nurse", "Registered nurse", "Welder", "Accountant"]);
        let none = cluster(&LexicalProvider, &items, 0.0, Linkage::Average).unwrap();
        assert_eq!(none.cluster_count(), 4);
        let all = cluster(&LexicalProvider, &items, 1.0, Linkage::Average).unwrap();
        assert_eq!(all.cluster_count(), 1);
        assert!(cluster(&LexicalProvider, &items, 1.5, Linkage::Average).is_err());
    }

    proptest! {
        #[test]
        fn matches_brute_force(
            raw in proptest::collection::vec(0.0f64..1.0, 36),
            threshold in 0.05f64..0.95,
            link in 0usize..3,
        ) {
            let n = 6;
            let mut d = vec![0.0; n * n];
            for i in 0..n {
                for j in (i + 1)..n {
                    d[i * n + j] = raw[i * n + j];
                    d[j * n + i] = raw[i * n + j];
                }
            }
            let linkage = [Linkage::Average, Linkage::Complete, Linkage::Single][link];
            let got = partition(&agglomerate(n, &d, threshold, linkage));
            prop_assert_eq!(got, brute_force(n, &d, threshold, linkage));
        }

        #[test]
        fn order_invariant(perm in Just(()).prop_perturb(|_, mut rng| {
            let mut v = vec!["Sales assistant", "Shop assistant", "Store manager", "Cashier",
                             "Accountant", "Junior accountant", "Data analyst"];
            for i in (1..v.len()).rev() {
                let j = (rng.next_u32() as usize) % (i + 1);
                v.swap(i, j);
            }
            v
        })) {
            let items = strings(&perm);
            let mut sorted = items.clone();
            sorted.sort();
            let a = cluster(&LexicalProvider, &items, 0.55, Linkage::Average).unwrap();
            let b = cluster(&LexicalProvider, &sorted, 0.55, Linkage::Average).unwrap();
            for (i, item) in items.iter().enumerate() {
                prop_assert_eq!(a.labels[i], b.label_of(item).unwrap());
            }
        }
    }
}
