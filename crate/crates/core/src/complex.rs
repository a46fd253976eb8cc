//! Point clouds, dissimilarity matrices and Vietoris-Rips filtrations.

use std::cmp::Ordering;
use std::collections::HashMap;

use arrayvec::ArrayVec;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Highest simplex dimension a filtration may contain.
pub const MAX_SIMPLEX_DIM: usize = 2;

/// A finite set of points in R^d, optionally living on a flat torus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
    ambient_dim: usize,
    torus_extents: Option<Vec<f64>>,
}

impl PointCloud {
    /// Builds a cloud, inferring the ambient dimension from the first point.
    /// An empty cloud has ambient dimension 0.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let ambient_dim = points.first().map_or(0, Vec::len);
        for (index, p) in points.iter().enumerate() {
            if p.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    index,
                    expected: ambient_dim,
                    found: p.len(),
                });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(invalid(
                    "points",
                    format!("point {index} has a non-finite coordinate"),
                ));
            }
        }
        Ok(Self {
            points,
            ambient_dim,
            torus_extents: None,
        })
    }

    pub fn with_torus(mut self, extents: Vec<f64>) -> Result<Self> {
        if !self.points.is_empty() && extents.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                index: 0,
                expected: self.ambient_dim,
                found: extents.len(),
            });
        }
        if extents.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return Err(invalid(
                "torus_extents",
                "all periods must be strictly positive",
            ));
        }
        self.torus_extents = Some(extents);
        Ok(self)
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn torus_extents(&self) -> Option<&[f64]> {
        self.torus_extents.as_deref()
    }

    /// Selects a subset of points (in the given order), keeping the torus.
    pub fn select(&self, indices: &[usize]) -> PointCloud {
        PointCloud {
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
            ambient_dim: self.ambient_dim,
            torus_extents: self.torus_extents.clone(),
        }
    }

    /// Rescales every column to zero mean and unit variance. Constant columns
    /// are only centered.
    pub fn standardized(&self) -> PointCloud {
        let n = self.points.len();
        if n == 0 {
            return self.clone();
        }
        let mut out = self.points.clone();
        for c in 0..self.ambient_dim {
            let mean = self.points.iter().map(|p| p[c]).sum::<f64>() / n as f64;
            let var = self
                .points
                .iter()
                .map(|p| (p[c] - mean).powi(2))
                .sum::<f64>()
                / n as f64;
            let sd = var.sqrt();
            for p in &mut out {
                p[c] -= mean;
                if sd > 0.0 {
                    p[c] /= sd;
                }
            }
        }
        PointCloud {
            points: out,
            ambient_dim: self.ambient_dim,
            torus_extents: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Euclidean,
    ToroidalEuclidean,
}

/// Symmetric nonnegative relation with zero diagonal, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DissimilarityMatrix {
    /// Validates and wraps a full row-major `n x n` matrix.
    pub fn from_full(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        for i in 0..n {
            if entries[i * n + i] != 0.0 {
                return Err(Error::InvalidMatrix(format!("nonzero diagonal at {i}")));
            }
            for j in 0..i {
                let a = entries[i * n + j];
                if !(a >= 0.0) || !a.is_finite() {
                    return Err(Error::InvalidMatrix(format!(
                        "entry ({i}, {j}) = {a} is not a finite nonnegative number"
                    )));
                }
                if a != entries[j * n + i] {
                    return Err(Error::InvalidMatrix(format!("asymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { n, entries })
    }

    /// Row `i` holds the entries `d(i, 0) .. d(i, i-1)`; row 0 is empty.
    pub fn from_lower_triangular(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = vec![0.0; n * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != i {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {i}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                entries[i * n + j] = v;
                entries[j * n + i] = v;
            }
        }
        Self::from_full(n, entries)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// `min_i max_j d(i, j)`: beyond this scale the Rips complex is a cone.
    pub fn enclosing_radius(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }
}

pub(crate) fn torus_delta(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).abs() % period;
    d.min(period - d)
}

pub fn pairwise_dissimilarity(cloud: &PointCloud, metric: Metric) -> Result<DissimilarityMatrix> {
    let extents = match metric {
        Metric::Euclidean => None,
        Metric::ToroidalEuclidean => Some(cloud.torus_extents().ok_or(Error::MissingTorusExtents)?),
    };
    let n = cloud.len();
    let pts = cloud.points();
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..i {
            let sq: f64 = match extents {
                None => pts[i]
                    .iter()
                    .zip(&pts[j])
                    .map(|(a, b)| (a - b).powi(2))
                    .sum(),
                Some(ext) => pts[i]
                    .iter()
                    .zip(&pts[j])
                    .zip(ext)
                    .map(|((a, b), l)| torus_delta(*a, *b, *l).powi(2))
                    .sum(),
            };
            let d = sq.sqrt();
            entries[i * n + j] = d;
            entries[j * n + i] = d;
        }
    }
    Ok(DissimilarityMatrix { n, entries })
}

/// An ordered set of at most three vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    vertices: ArrayVec<usize, 3>,
}

impl Simplex {
    pub fn new(vertices: &[usize]) -> Result<Self> {
        if vertices.len() > MAX_SIMPLEX_DIM + 1 {
            return Err(invalid(
                "vertices",
                "simplices of dimension > 2 are unsupported",
            ));
        }
        if vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid(
                "vertices",
                "vertex list must be strictly increasing",
            ));
        }
        Ok(Self {
            vertices: vertices.iter().copied().collect(),
        })
    }

    pub(crate) fn from_sorted(vertices: &[usize]) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Self {
            vertices: vertices.iter().copied().collect(),
        }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Dimension; the empty simplex has dimension -1.
    pub fn dim(&self) -> isize {
        self.vertices.len() as isize - 1
    }

    /// Removes the `i`-th vertex.
    pub fn face(&self, i: usize) -> Result<Simplex> {
        if i >= self.vertices.len() {
            return Err(Error::FaceOutOfRange {
                index: i,
                dim: self.dim(),
            });
        }
        let mut vertices = self.vertices.clone();
        vertices.remove(i);
        Ok(Simplex { vertices })
    }

    pub(crate) fn key(&self) -> u64 {
        simplex_key(&self.vertices)
    }
}

/// Packs up to three vertex ids (each < 2^21 - 1) into one word.
pub(crate) fn simplex_key(vertices: &[usize]) -> u64 {
    vertices
        .iter()
        .enumerate()
        .fold(0u64, |acc, (k, &v)| acc | ((v as u64 + 1) << (21 * k)))
}

pub(crate) const MAX_VERTICES: usize = (1 << 21) - 1;

#[derive(Debug, Clone, PartialEq)]
pub struct FiltrationEntry {
    pub simplex: Simplex,
    pub scale: f64,
}

/// Simplices of dimension <= 2 with appearance scales, in filtration order.
#[derive(Debug, Clone)]
pub struct Filtration {
    entries: Vec<FiltrationEntry>,
    max_dim: usize,
    max_scale: f64,
    index: HashMap<u64, usize>,
}

fn filtration_cmp(a: &FiltrationEntry, b: &FiltrationEntry) -> Ordering {
    a.scale
        .total_cmp(&b.scale)
        .then(a.simplex.vertices.len().cmp(&b.simplex.vertices.len()))
        .then_with(|| a.simplex.vertices.cmp(&b.simplex.vertices))
}

impl Filtration {
    /// Wraps an explicitly ordered list, checking that scales never decrease,
    /// that every face is present earlier with scale no larger, and that no
    /// simplex repeats. Used for alternative tie-break orders.
    pub fn from_ordered(
        entries: Vec<FiltrationEntry>,
        max_dim: usize,
        max_scale: f64,
    ) -> Result<Self> {
        if max_dim > MAX_SIMPLEX_DIM {
            return Err(invalid("max_dim", "must be 0, 1 or 2"));
        }
        let mut index: HashMap<u64, usize> = HashMap::with_capacity(entries.len());
        for (pos, e) in entries.iter().enumerate() {
            let dim = e.simplex.dim();
            if dim < 0 || dim as usize > max_dim {
                return Err(Error::InvalidFiltration(format!(
                    "simplex {:?} has dimension {dim}",
                    e.simplex.vertices()
                )));
            }
            if !(e.scale >= 0.0) || e.scale > max_scale {
                return Err(Error::InvalidFiltration(format!(
                    "scale {} outside [0, {max_scale}]",
                    e.scale
                )));
            }
            if e.simplex.vertices().iter().any(|&v| v >= MAX_VERTICES) {
                return Err(Error::InvalidFiltration("vertex id too large".into()));
            }
            if pos > 0 && entries[pos - 1].scale > e.scale {
                return Err(Error::InvalidFiltration("scales decrease".into()));
            }
            if dim > 0 {
                for i in 0..=dim as usize {
                    let face = e.simplex.face(i)?;
                    match index.get(&face.key()) {
                        Some(&fp) if entries[fp].scale <= e.scale => {}
                        _ => {
                            return Err(Error::MissingFace {
                                simplex: e.simplex.vertices().to_vec(),
                                face: face.vertices().to_vec(),
                            })
                        }
                    }
                }
            }
            if index.insert(e.simplex.key(), pos).is_some() {
                return Err(Error::InvalidFiltration(format!(
                    "duplicate simplex {:?}",
                    e.simplex.vertices()
                )));
            }
        }
        Ok(Self {
            entries,
            max_dim,
            max_scale,
            index,
        })
    }

    pub fn entries(&self) -> &[FiltrationEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn max_scale(&self) -> f64 {
        self.max_scale
    }

    pub fn vertex_count(&self) -> usize {
        self.entries.iter().filter(|e| e.simplex.dim() == 0).count()
    }

    /// Position of a simplex in filtration order.
    pub fn position(&self, simplex: &Simplex) -> Option<usize> {
        self.index.get(&simplex.key()).copied()
    }

    pub(crate) fn position_of(&self, vertices: &[usize]) -> Option<usize> {
        self.index.get(&simplex_key(vertices)).copied()
    }

    /// Number of simplices of each dimension 0..=2.
    pub fn counts(&self) -> [usize; 3] {
        let mut c = [0; 3];
        for e in &self.entries {
            c[e.simplex.dim() as usize] += 1;
        }
        c
    }
}

/// Vietoris-Rips filtration truncated at `max_scale`: a simplex enters at the
/// largest pairwise dissimilarity among its vertices.
pub fn build_vr_filtration(
    d: &DissimilarityMatrix,
    max_dim: usize,
    max_scale: f64,
) -> Result<Filtration> {
    if max_dim > MAX_SIMPLEX_DIM {
        return Err(invalid("max_dim", "must be 0, 1 or 2"));
    }
    if !(max_scale > 0.0) {
        return Err(invalid("max_scale", "must be strictly positive"));
    }
    let n = d.len();
    if n > MAX_VERTICES {
        return Err(invalid("points", "too many points"));
    }
    let mut entries = Vec::new();
    for i in 0..n {
        entries.push(FiltrationEntry {
            simplex: Simplex::from_sorted(&[i]),
            scale: 0.0,
        });
    }
    if max_dim >= 1 {
        for i in 0..n {
            for j in i + 1..n {
                let s = d.get(i, j);
                if s <= max_scale {
                    entries.push(FiltrationEntry {
                        simplex: Simplex::from_sorted(&[i, j]),
                        scale: s,
                    });
                }
            }
        }
    }
    if max_dim >= 2 {
        for i in 0..n {
            for j in i + 1..n {
                let dij = d.get(i, j);
                if dij > max_scale {
                    continue;
                }
                for k in j + 1..n {
                    let s = dij.max(d.get(i, k)).max(d.get(j, k));
                    if s <= max_scale {
                        entries.push(FiltrationEntry {
                            simplex: Simplex::from_sorted(&[i, j, k]),
                            scale: s,
                        });
                    }
                }
            }
        }
    }
    entries.sort_unstable_by(filtration_cmp);
    let index = entries
        .iter()
        .enumerate()
        .map(|(pos, e)| (e.simplex.key(), pos))
        .collect();
    Ok(Filtration {
        entries,
        max_dim,
        max_scale,
        index,
    })
}
