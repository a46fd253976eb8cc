//! Stable ranks and distances between them.
//!
//! The stable rank of a barcode under a contour `C` is
//! `eps -> #{ [b, d) : C(b, eps) < d }`. Each bar counts on `[0, eps*)` with
//! `eps* = sup { eps : C(b, eps) < d }`, so the function is an exact step
//! function whose breakpoints are the distinct `eps*` values.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contour::Contour;
use crate::error::{invalid, Error, Result};
use crate::homology::Barcode;
use crate::step::{self, merged_grid, StepFunction};

/// How bars with infinite death enter a stable rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// Ignore essential bars.
    DropEssential,
    /// Treat essential bars as dying at the filtration's `max_scale`.
    #[default]
    CapAtMaxScale,
}

impl FromStr for Truncation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cap" | "cap_at_max_scale" => Ok(Truncation::CapAtMaxScale),
            "drop" | "drop_essential" => Ok(Truncation::DropEssential),
            _ => Err(invalid("truncation", format!("unknown policy `{s}`"))),
        }
    }
}

/// A non-increasing, nonnegative step function of `eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct StableRank(StepFunction);

impl StableRank {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::from_step(StepFunction::new(breakpoints, values)?)
    }

    pub fn from_step(f: StepFunction) -> Result<Self> {
        if !f.is_non_increasing() {
            return Err(Error::InvalidStepFunction(
                "stable rank must be non-increasing".into(),
            ));
        }
        if f.tail() < 0.0 {
            return Err(Error::InvalidStepFunction(
                "stable rank must be nonnegative".into(),
            ));
        }
        Ok(StableRank(f))
    }

    pub fn zero() -> Self {
        StableRank(StepFunction::constant(0.0))
    }

    pub fn as_step(&self) -> &StepFunction {
        &self.0
    }

    pub fn breakpoints(&self) -> &[f64] {
        self.0.breakpoints()
    }

    pub fn values(&self) -> &[f64] {
        self.0.values()
    }

    pub fn eval(&self, eps: f64) -> f64 {
        self.0.eval(eps)
    }

    pub fn is_zero(&self) -> bool {
        self.0.initial() == 0.0
    }

    pub fn normalize(&self) -> Result<StableRank> {
        normalize(self)
    }
}

pub fn stable_rank(
    bc: &Barcode,
    degree: usize,
    contour: &Contour,
    truncation: Truncation,
) -> StableRank {
    let mut drops: Vec<f64> = Vec::new();
    let mut tail = 0usize;
    for bar in bc.degree(degree) {
        let death = match (bar.is_essential(), truncation) {
            (false, _) => bar.death,
            (true, Truncation::CapAtMaxScale) => bc.max_scale(),
            (true, Truncation::DropEssential) => continue,
        };
        match contour.critical_epsilon(bar.birth, death) {
            Some(e) if e == f64::INFINITY => tail += 1,
            Some(e) if e > 0.0 => drops.push(e),
            _ => {}
        }
    }
    drops.sort_by(f64::total_cmp);
    let mut count = drops.len() + tail;
    let mut breakpoints = Vec::new();
    let mut values = vec![count as f64];
    let mut i = 0;
    while i < drops.len() {
        let e = drops[i];
        while i < drops.len() && drops[i] == e {
            count -= 1;
            i += 1;
        }
        breakpoints.push(e);
        values.push(count as f64);
    }
    StableRank(StepFunction::merged(breakpoints, values))
}

/// Divides by the value at 0.
pub fn normalize(s: &StableRank) -> Result<StableRank> {
    let v0 = s.0.initial();
    if v0 == 0.0 {
        return Err(Error::ZeroNormalization);
    }
    Ok(StableRank(s.0.map(|v| v / v0)))
}

pub fn pointwise_mean(list: &[StableRank]) -> Result<StableRank> {
    let steps: Vec<&StepFunction> = list.iter().map(|s| &s.0).collect();
    Ok(StableRank(step::pointwise_mean(&steps)?))
}

/// `(int_0^inf |f - g|^p)^(1/p)`, exact over the merged breakpoints.
/// Infinite when the tails differ.
pub fn lp_distance(f: &StableRank, g: &StableRank, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(invalid("p", format!("{p} must be >= 1")));
    }
    if f.0.tail() != g.0.tail() {
        return Ok(f64::INFINITY);
    }
    let grid = merged_grid([&f.0, &g.0]);
    let mut acc = 0.0;
    let mut left = 0.0;
    for &right in &grid {
        let diff = (f.eval(left) - g.eval(left)).abs();
        if diff > 0.0 {
            acc += diff.powf(p) * (right - left);
        }
        left = right;
    }
    Ok(if p == 1.0 { acc } else { acc.powf(1.0 / p) })
}

/// Smallest `s >= 0` with `g(s) <= y`, if any.
fn first_at_most(g: &StepFunction, y: f64) -> Option<f64> {
    let i = g.values().iter().position(|&v| v <= y)?;
    Some(if i == 0 { 0.0 } else { g.breakpoints()[i - 1] })
}

/// Least `eps >= 0` with `f(t) >= g(t + eps)` for all `t >= 0`.
fn one_sided_shift(f: &StepFunction, g: &StepFunction) -> f64 {
    std::iter::once(0.0)
        .chain(f.breakpoints().iter().copied())
        .map(|t| match first_at_most(g, f.eval(t)) {
            Some(s) => (s - t).max(0.0),
            None => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

/// Infimum of the shifts `eps >= 0` with `f(t) >= g(t + eps)` and
/// `g(t) >= f(t + eps)` for all `t >= 0`; infinite when no shift works.
///
/// For non-increasing step functions each condition only needs checking at
/// `t = 0` and at the breakpoints of the left-hand side, and each one reduces
/// to a lower bound on `eps`, so the shift set is a closed ray and its least
/// element is computed exactly.
pub fn interleaving_distance(f: &StableRank, g: &StableRank) -> f64 {
    one_sided_shift(&f.0, &g.0).max(one_sided_shift(&g.0, &f.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DistanceMetric {
    Lp(f64),
    Interleaving,
}

impl DistanceMetric {
    pub fn distance(&self, f: &StableRank, g: &StableRank) -> f64 {
        match *self {
            DistanceMetric::Lp(p) => lp_distance(f, g, p).expect("p validated at construction"),
            DistanceMetric::Interleaving => interleaving_distance(f, g),
        }
    }
}

impl FromStr for DistanceMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(DistanceMetric::Lp(1.0)),
            "l2" => Ok(DistanceMetric::Lp(2.0)),
            "interleaving" => Ok(DistanceMetric::Interleaving),
            _ => match s.strip_prefix("lp:").map(str::parse::<f64>) {
                Some(Ok(p)) if p >= 1.0 => Ok(DistanceMetric::Lp(p)),
                _ => Err(invalid("metric", format!("unknown metric `{s}`"))),
            },
        }
    }
}

/// Symmetric `N x N` matrix of pairwise distances, computed in parallel.
pub fn distance_matrix(ranks: &[StableRank], metric: DistanceMetric) -> Vec<Vec<f64>> {
    let n = ranks.len();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| metric.distance(&ranks[i], &ranks[j]))
                .collect()
        })
        .collect();
    let mut out = vec![vec![0.0; n]; n];
    for (i, row) in upper.iter().enumerate() {
        for (k, &d) in row.iter().enumerate() {
            let j = i + 1 + k;
            out[i][j] = d;
            out[j][i] = d;
        }
    }
    out
}
