//! Classification of labeled point clouds by mean stable ranks.
//!
//! Each dataset is resampled many times; every resample yields a pair of
//! stable ranks (degrees 0 and 1). Per class, the pointwise mean over a random
//! training subset of pairs is the classifier; a test pair goes to the class
//! minimizing the summed L1 distance over both degrees.
//!
//! [`cross_validate`] repeats the random train/test split once per fold. This
//! is repeated random-subsampling validation: folds are independent re-splits
//! rather than a partition of the data.

use std::collections::BTreeMap;

use rand::seq::{index, SliceRandom};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{pairwise_dissimilarity, Metric, PointCloud};
use crate::contour::Contour;
use crate::error::{invalid, Error, Result};
use crate::homology::{rips_barcode, Barcode};
use crate::seed;
use crate::stablerank::{lp_distance, pointwise_mean, stable_rank, StableRank, Truncation};

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub id: String,
    pub label: String,
    pub points: PointCloud,
}

impl LabeledDataset {
    pub fn new(
        id: impl Into<String>,
        label: impl Into<String>,
        points: PointCloud,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty("dataset has no points"));
        }
        Ok(Self {
            id: id.into(),
            label: label.into(),
            points,
        })
    }
}

/// Stable ranks of one resample in degrees 0 and 1.
#[derive(Debug, Clone, PartialEq)]
pub struct RankPair {
    pub h0: StableRank,
    pub h1: StableRank,
}

/// `repetitions` uniform samples without replacement, each drawn from its own
/// sub-seeded stream.
pub fn subsample(
    ds: &LabeledDataset,
    sample_size: usize,
    repetitions: usize,
    seed: u64,
) -> Result<Vec<PointCloud>> {
    let n = ds.points.len();
    if sample_size > n {
        return Err(Error::SampleTooLarge {
            requested: sample_size,
            available: n,
        });
    }
    Ok((0..repetitions)
        .map(|rep| {
            let mut rng = seed::rng(seed, seed::STREAM_SUBSAMPLE, rep as u64);
            let idx = index::sample(&mut rng, n, sample_size).into_vec();
            ds.points.select(&idx)
        })
        .collect())
}

/// Filtration scale limit for a point cloud.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleLimit {
    Fixed(f64),
    /// The enclosing radius of each cloud; the complex is a cone beyond it.
    EnclosingRadius,
}

/// Settings shared by every persistence computation in a run.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceConfig {
    pub metric: Metric,
    pub max_dim: usize,
    pub max_scale: ScaleLimit,
    pub truncation: Truncation,
}

impl Default for PersistenceConfig {
    fn default() -> Self {
        Self {
            metric: Metric::Euclidean,
            max_dim: 2,
            max_scale: ScaleLimit::EnclosingRadius,
            truncation: Truncation::CapAtMaxScale,
        }
    }
}

/// Barcode of a point cloud's Rips filtration.
pub fn persistence(cloud: &PointCloud, cfg: &PersistenceConfig) -> Result<Barcode> {
    let d = pairwise_dissimilarity(cloud, cfg.metric)?;
    let max_scale = match cfg.max_scale {
        ScaleLimit::Fixed(s) => s,
        ScaleLimit::EnclosingRadius => d.enclosing_radius(),
    };
    rips_barcode(&d, cfg.max_dim, max_scale)
}

pub fn rank_pairs(
    samples: &[PointCloud],
    c0: &Contour,
    c1: &Contour,
    cfg: &PersistenceConfig,
) -> Result<Vec<RankPair>> {
    if samples.is_empty() {
        return Err(Error::Empty("no samples"));
    }
    samples
        .par_iter()
        .map(|cloud| {
            let bc = persistence(cloud, cfg)?;
            Ok(RankPair {
                h0: stable_rank(&bc, 0, c0, cfg.truncation),
                h1: stable_rank(&bc, 1, c1, cfg.truncation),
            })
        })
        .collect()
}

pub type PairsByClass = BTreeMap<String, Vec<RankPair>>;

/// Random per-class split: the first `train_count` shuffled pairs average into
/// the classifier, the rest are test pairs.
pub fn build_classifiers(
    pairs_by_class: &PairsByClass,
    train_count: usize,
    seed: u64,
) -> Result<(BTreeMap<String, RankPair>, PairsByClass)> {
    if train_count == 0 {
        return Err(invalid("train_count", "must be at least 1"));
    }
    let mut classifiers = BTreeMap::new();
    let mut tests = BTreeMap::new();
    for (k, (label, pairs)) in pairs_by_class.iter().enumerate() {
        if pairs.len() <= train_count {
            return Err(Error::ClassTooSmall {
                label: label.clone(),
                available: pairs.len(),
                train: train_count,
            });
        }
        let mut order: Vec<usize> = (0..pairs.len()).collect();
        order.shuffle(&mut seed::rng(seed, seed::STREAM_SPLIT, k as u64));
        let (train, test) = order.split_at(train_count);
        let h0: Vec<StableRank> = train.iter().map(|&i| pairs[i].h0.clone()).collect();
        let h1: Vec<StableRank> = train.iter().map(|&i| pairs[i].h1.clone()).collect();
        classifiers.insert(
            label.clone(),
            RankPair {
                h0: pointwise_mean(&h0)?,
                h1: pointwise_mean(&h1)?,
            },
        );
        tests.insert(
            label.clone(),
            test.iter().map(|&i| pairs[i].clone()).collect(),
        );
    }
    Ok((classifiers, tests))
}

/// L1 distances between a test pair and a classifier, per degree.
pub fn class_distances(test: &RankPair, classifier: &RankPair) -> (f64, f64) {
    (
        lp_distance(&classifier.h0, &test.h0, 1.0).expect("p = 1"),
        lp_distance(&classifier.h1, &test.h1, 1.0).expect("p = 1"),
    )
}

/// Label minimizing `L1(h0) + L1(h1)`; ties go to the smallest label.
pub fn classify<'a>(
    test: &RankPair,
    classifiers: &'a BTreeMap<String, RankPair>,
) -> Option<&'a str> {
    let mut best: Option<(&str, f64)> = None;
    for (label, c) in classifiers {
        let (d0, d1) = class_distances(test, c);
        let d = d0 + d1;
        if best.is_none_or(|(_, b)| d < b) {
            best = Some((label, d));
        }
    }
    best.map(|(l, _)| l)
}

/// Rows are test classes, columns predicted classes; each row sums to 1 over
/// all test pairs of that class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<f64>>,
}

impl ConfusionMatrix {
    /// Mean of the diagonal.
    pub fn accuracy(&self) -> f64 {
        let n = self.labels.len();
        (0..n).map(|i| self.counts[i][i]).sum::<f64>() / n as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    /// Fraction of correctly classified test pairs in each fold.
    pub fold_accuracies: Vec<f64>,
}

pub fn cross_validate(
    pairs_by_class: &PairsByClass,
    folds: usize,
    train_count: usize,
    seed: u64,
) -> Result<CrossValidation> {
    if folds == 0 {
        return Err(invalid("folds", "must be at least 1"));
    }
    if pairs_by_class.is_empty() {
        return Err(Error::Empty("no classes"));
    }
    let labels: Vec<String> = pairs_by_class.keys().cloned().collect();
    let n = labels.len();
    let per_fold: Vec<Vec<Vec<usize>>> = (0..folds)
        .into_par_iter()
        .map(|fold| {
            let fold_seed = seed::derive(seed, seed::STREAM_FOLD, fold as u64);
            let (classifiers, tests) = build_classifiers(pairs_by_class, train_count, fold_seed)?;
            let mut counts = vec![vec![0usize; n]; n];
            for (row, label) in labels.iter().enumerate() {
                for t in &tests[label] {
                    let predicted = classify(t, &classifiers).expect("nonempty classifiers");
                    let col = labels.iter().position(|l| l == predicted).unwrap();
                    counts[row][col] += 1;
                }
            }
            Ok(counts)
        })
        .collect::<Result<_>>()?;

    let mut total = vec![vec![0usize; n]; n];
    let mut fold_accuracies = Vec::with_capacity(folds);
    for counts in &per_fold {
        let all: usize = counts.iter().flatten().sum();
        let right: usize = (0..n).map(|i| counts[i][i]).sum();
        fold_accuracies.push(right as f64 / all as f64);
        for i in 0..n {
            for j in 0..n {
                total[i][j] += counts[i][j];
            }
        }
    }
    let counts = total
        .iter()
        .map(|row| {
            let s: usize = row.iter().sum();
            row.iter().map(|&c| c as f64 / s as f64).collect()
        })
        .collect();
    let confusion = ConfusionMatrix { labels, counts };
    let accuracy = confusion.accuracy();
    Ok(CrossValidation {
        confusion,
        accuracy,
        fold_accuracies,
    })
}
