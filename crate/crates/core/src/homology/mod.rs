//! Persistent homology over F2 in degrees 0 and 1.
//!
//! [`reduce_and_pair`] runs the standard column reduction of the boundary
//! matrix in filtration order, with clearing: triangle columns are reduced
//! first, and every edge that turns up as a triangle pivot has its own column
//! zeroed without reduction. [`reduce_and_pair_cohomology`] reduces the
//! anti-transposed (coboundary) matrix instead and yields the same barcode;
//! it is much cheaper on dense Rips complexes because it never reduces the
//! triangle columns, and the spatial and learning pipelines use it.

mod oracle;
mod reduce;

use serde::{Deserialize, Serialize};

use crate::complex::{build_vr_filtration, DissimilarityMatrix, Filtration};
use crate::error::{Error, Result};

pub use oracle::homology_at_scale_oracle;
use reduce::ColumnReducer;

/// Highest homological degree reported in a [`Barcode`].
pub const MAX_DEGREE: usize = 1;

/// Boundary matrix of a filtration over F2. Column `j` lists the filtration
/// positions of the faces of simplex `j`, in increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMatrix {
    columns: Vec<Vec<usize>>,
    dims: Vec<usize>,
}

impl BoundaryMatrix {
    pub fn columns(&self) -> &[Vec<usize>] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &[usize] {
        &self.columns[j]
    }

    pub fn dim(&self, j: usize) -> usize {
        self.dims[j]
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }
}

pub fn boundary_matrix(f: &Filtration) -> Result<BoundaryMatrix> {
    let mut columns = Vec::with_capacity(f.len());
    let mut dims = Vec::with_capacity(f.len());
    for (j, e) in f.entries().iter().enumerate() {
        let dim = e.simplex.dim() as usize;
        let mut col = Vec::with_capacity(dim + 1);
        if dim > 0 {
            for i in 0..=dim {
                let face = e.simplex.face(i)?;
                match f.position(&face) {
                    Some(p) if p < j => col.push(p),
                    _ => {
                        return Err(Error::MissingFace {
                            simplex: e.simplex.vertices().to_vec(),
                            face: face.vertices().to_vec(),
                        })
                    }
                }
            }
        }
        col.sort_unstable();
        columns.push(col);
        dims.push(dim);
    }
    Ok(BoundaryMatrix { columns, dims })
}

/// A half-open interval `[birth, death)` in one homological degree. Essential
/// bars have `death == f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bar {
    pub birth: f64,
    pub death: f64,
    pub degree: usize,
}

impl Bar {
    pub fn new(birth: f64, death: f64, degree: usize) -> Self {
        debug_assert!(birth < death);
        Self {
            birth,
            death,
            degree,
        }
    }

    pub fn essential(birth: f64, degree: usize) -> Self {
        Self {
            birth,
            death: f64::INFINITY,
            degree,
        }
    }

    pub fn is_essential(&self) -> bool {
        self.death == f64::INFINITY
    }

    /// Whether the bar contributes a dimension at scale `t`.
    pub fn alive_at(&self, t: f64) -> bool {
        self.birth <= t && t < self.death
    }
}

/// Bars of degrees 0 and 1, each degree sorted by `(birth, death)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Barcode {
    bars: [Vec<Bar>; MAX_DEGREE + 1],
    max_scale: f64,
}

fn bar_cmp(a: &Bar, b: &Bar) -> std::cmp::Ordering {
    a.birth
        .total_cmp(&b.birth)
        .then(a.death.total_cmp(&b.death))
}

impl Barcode {
    /// Groups bars by degree. Bars of degree > 1 are rejected.
    pub fn new(bars: impl IntoIterator<Item = Bar>, max_scale: f64) -> Result<Self> {
        let mut grouped: [Vec<Bar>; MAX_DEGREE + 1] = Default::default();
        for bar in bars {
            if bar.degree > MAX_DEGREE {
                return Err(Error::InvalidParameter {
                    name: "degree",
                    reason: format!("bars of degree {} are unsupported", bar.degree),
                });
            }
            if !(bar.birth >= 0.0) || !(bar.birth < bar.death) {
                return Err(Error::InvalidParameter {
                    name: "bar",
                    reason: format!("[{}, {}) is not a valid bar", bar.birth, bar.death),
                });
            }
            grouped[bar.degree].push(bar);
        }
        for g in &mut grouped {
            g.sort_by(bar_cmp);
        }
        Ok(Self {
            bars: grouped,
            max_scale,
        })
    }

    pub fn empty(max_scale: f64) -> Self {
        Self {
            bars: Default::default(),
            max_scale,
        }
    }

    /// Bars in `degree`; empty for degrees above 1.
    pub fn degree(&self, degree: usize) -> &[Bar] {
        self.bars.get(degree).map_or(&[], Vec::as_slice)
    }

    pub fn bars(&self) -> impl Iterator<Item = &Bar> {
        self.bars.iter().flatten()
    }

    pub fn max_scale(&self) -> f64 {
        self.max_scale
    }

    /// Multiset of `(birth, death, degree)` triples as exact bit patterns.
    pub fn signature(&self) -> Vec<(u64, u64, usize)> {
        self.bars()
            .map(|b| (b.birth.to_bits(), b.death.to_bits(), b.degree))
            .collect()
    }
}

fn collect_bars(f: &Filtration, pairs: &[(usize, usize)], essential: &[usize]) -> Barcode {
    let entries = f.entries();
    let finite = pairs.iter().filter_map(|&(b, d)| {
        let degree = entries[b].simplex.dim() as usize;
        let (birth, death) = (entries[b].scale, entries[d].scale);
        (degree <= MAX_DEGREE && birth < death).then(|| Bar::new(birth, death, degree))
    });
    let infinite = essential.iter().filter_map(|&b| {
        let degree = entries[b].simplex.dim() as usize;
        (degree <= MAX_DEGREE).then(|| Bar::essential(entries[b].scale, degree))
    });
    Barcode::new(finite.chain(infinite).collect::<Vec<_>>(), f.max_scale())
        .expect("bars from a valid filtration")
}

/// Persistence pairing by boundary-matrix reduction with clearing.
pub fn reduce_and_pair(f: &Filtration) -> Barcode {
    let bm = boundary_matrix(f).expect("filtration is closed under faces");
    let n = bm.len();
    let BoundaryMatrix { columns, dims } = bm;
    let mut reducer = ColumnReducer::new(columns, n);
    let mut paired = vec![false; n];
    let mut pairs = Vec::new();
    for dim in (1..=f.max_dim()).rev() {
        for j in (0..n).filter(|&j| dims[j] == dim) {
            if paired[j] {
                // Cleared: a creator killed by a higher-dimensional column.
                reducer.clear(j);
                continue;
            }
            if let Some(low) = reducer.reduce(j) {
                paired[low] = true;
                paired[j] = true;
                pairs.push((low, j));
            }
        }
    }
    let essential: Vec<usize> = (0..n).filter(|&j| !paired[j]).collect();
    collect_bars(f, &pairs, &essential)
}

/// Persistence pairing by reducing the coboundary matrix (the anti-transpose
/// of the boundary matrix) with clearing, dimension 0 first.
pub fn reduce_and_pair_cohomology(f: &Filtration) -> Barcode {
    let entries = f.entries();
    let n = entries.len();
    let flip = |p: usize| n - 1 - p;
    let dims: Vec<usize> = entries.iter().map(|e| e.simplex.dim() as usize).collect();
    let vertex_ids: Vec<usize> = entries
        .iter()
        .filter(|e| e.simplex.dim() == 0)
        .map(|e| e.simplex.vertices()[0])
        .collect();

    // Column c of the anti-transposed matrix is the coboundary of simplex
    // flip(c), expressed in flipped row indices. Only vertex and edge
    // coboundaries are needed for degrees 0 and 1.
    let mut cols = vec![Vec::new(); n];
    for (p, e) in entries.iter().enumerate() {
        let dim = dims[p];
        if dim >= MAX_DEGREE + 1 || dim >= f.max_dim() {
            continue;
        }
        let vs = e.simplex.vertices();
        let mut col: Vec<usize> = vertex_ids
            .iter()
            .filter(|w| !vs.contains(w))
            .filter_map(|&w| {
                let mut coface = [0usize; 3];
                coface[..vs.len()].copy_from_slice(vs);
                coface[vs.len()] = w;
                let coface = &mut coface[..=vs.len()];
                coface.sort_unstable();
                f.position_of(coface).map(flip)
            })
            .collect();
        col.sort_unstable();
        cols[flip(p)] = col;
    }

    let mut reducer = ColumnReducer::new(cols, n);
    let mut paired = vec![false; n];
    let mut pairs = Vec::new();
    for dim in 0..=MAX_DEGREE.min(f.max_dim()) {
        // Columns in anti-transposed order are simplices in reverse order.
        for p in (0..n).rev().filter(|&p| dims[p] == dim) {
            if paired[p] {
                reducer.clear(flip(p));
                continue;
            }
            if let Some(low) = reducer.reduce(flip(p)) {
                let death = flip(low);
                paired[p] = true;
                paired[death] = true;
                pairs.push((p, death));
            }
        }
    }
    let essential: Vec<usize> = (0..n)
        .filter(|&p| !paired[p] && dims[p] <= MAX_DEGREE.min(f.max_dim()))
        .collect();
    collect_bars(f, &pairs, &essential)
}

/// Barcode of the Rips filtration of `d` up to `max_scale`. A scale of 0 (one
/// point, or all points coincide) leaves one essential degree-0 bar per
/// class of points at dissimilarity 0.
pub fn rips_barcode(d: &DissimilarityMatrix, max_dim: usize, max_scale: f64) -> Result<Barcode> {
    if max_scale == 0.0 {
        let mut label: Vec<usize> = (0..d.len()).collect();
        for i in 0..d.len() {
            for j in 0..i {
                if d.get(i, j) == 0.0 {
                    let (a, b) = (label[i], label[j]);
                    label.iter_mut().filter(|l| **l == a).for_each(|l| *l = b);
                }
            }
        }
        let roots = (0..d.len()).filter(|&i| label[i] == i).count();
        return Barcode::new((0..roots).map(|_| Bar::essential(0.0, 0)), 0.0);
    }
    Ok(reduce_and_pair_cohomology(&build_vr_filtration(
        d, max_dim, max_scale,
    )?))
}

/// Number of bars of `degree` alive at scale `t` (`birth <= t < death`).
/// Meaningful for `0 <= t <= max_scale`.
pub fn betti_at_scale(bc: &Barcode, degree: usize, t: f64) -> usize {
    bc.degree(degree).iter().filter(|b| b.alive_at(t)).count()
}

/// Dimension of the space of new homology generators along the filtration,
/// which for a tame module is the number of bars.
pub fn rank_invariant(bc: &Barcode, degree: usize) -> usize {
    bc.degree(degree).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_vr_filtration, pairwise_dissimilarity, Metric, PointCloud};

    fn square() -> Filtration {
        let c = PointCloud::new(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ])
        .unwrap();
        let d = pairwise_dissimilarity(&c, Metric::Euclidean).unwrap();
        build_vr_filtration(&d, 2, 2.0).unwrap()
    }

    #[test]
    fn vertex_has_empty_column() {
        let c = PointCloud::new(vec![vec![0.0]]).unwrap();
        let d = pairwise_dissimilarity(&c, Metric::Euclidean).unwrap();
        let bm = boundary_matrix(&build_vr_filtration(&d, 2, 1.0).unwrap()).unwrap();
        assert_eq!(bm.len(), 1);
        assert!(bm.column(0).is_empty());
    }

    #[test]
    fn triangle_column_lists_its_three_edges() {
        let f = square();
        let bm = boundary_matrix(&f).unwrap();
        let (j, tri) = f
            .entries()
            .iter()
            .enumerate()
            .find(|(_, e)| e.simplex.vertices() == [0, 1, 2])
            .unwrap();
        assert_eq!(tri.simplex.dim(), 2);
        let mut faces: Vec<Vec<usize>> = bm
            .column(j)
            .iter()
            .map(|&p| f.entries()[p].simplex.vertices().to_vec())
            .collect();
        faces.sort();
        assert_eq!(faces, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        for k in 0..bm.len() {
            assert_eq!(
                bm.column(k).len(),
                if bm.dim(k) == 0 { 0 } else { bm.dim(k) + 1 }
            );
            assert!(bm.column(k).iter().all(|&p| p < k));
        }
    }

    #[test]
    fn isolated_points_are_all_essential() {
        let c = PointCloud::new(vec![vec![0.0], vec![5.0], vec![10.0]]).unwrap();
        let d = pairwise_dissimilarity(&c, Metric::Euclidean).unwrap();
        let bc = reduce_and_pair(&build_vr_filtration(&d, 2, 1.0).unwrap());
        assert_eq!(bc.degree(0).len(), 3);
        assert!(bc
            .degree(0)
            .iter()
            .all(|b| b.is_essential() && b.birth == 0.0));
        assert!(bc.degree(1).is_empty());
    }

    #[test]
    fn square_barcode() {
        let f = square();
        for bc in [reduce_and_pair(&f), reduce_and_pair_cohomology(&f)] {
            let h0 = bc.degree(0);
            assert_eq!(h0.len(), 4);
            assert_eq!(
                h0.iter()
                    .filter(|b| b.death == 1.0 && b.birth == 0.0)
                    .count(),
                3
            );
            assert_eq!(h0.iter().filter(|b| b.is_essential()).count(), 1);
            let h1 = bc.degree(1);
            assert_eq!(h1.len(), 1);
            assert!((h1[0].birth - 1.0).abs() < 1e-12);
            assert!((h1[0].death - 2f64.sqrt()).abs() < 1e-12);
            assert_eq!(betti_at_scale(&bc, 0, 0.5), 4);
            assert_eq!(betti_at_scale(&bc, 1, 1.2), 1);
            assert_eq!(rank_invariant(&bc, 0), 4);
            assert_eq!(rank_invariant(&bc, 1), 1);
        }
        assert_eq!(homology_at_scale_oracle(&f, 1, 1.0), 1);
    }

    #[test]
    fn two_points() {
        let c = PointCloud::new(vec![vec![0.0], vec![3.0]]).unwrap();
        let d = pairwise_dissimilarity(&c, Metric::Euclidean).unwrap();
        let bc = reduce_and_pair(&build_vr_filtration(&d, 1, 3.0).unwrap());
        assert_eq!(
            bc.degree(0),
            &[Bar::new(0.0, 3.0, 0), Bar::essential(0.0, 0)]
        );
    }

    #[test]
    fn truncated_loop_is_essential_without_triangles() {
        let f = {
            let c = PointCloud::new(vec![
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0],
                vec![0.0, 1.0],
            ])
            .unwrap();
            build_vr_filtration(
                &pairwise_dissimilarity(&c, Metric::Euclidean).unwrap(),
                1,
                2.0,
            )
            .unwrap()
        };
        for bc in [reduce_and_pair(&f), reduce_and_pair_cohomology(&f)] {
            // Three independent cycles among six edges, all born at 1 or sqrt 2.
            assert_eq!(bc.degree(1).len(), 3);
            assert!(bc.degree(1).iter().all(Bar::is_essential));
        }
    }

    #[test]
    fn empty_barcode_queries() {
        let bc = Barcode::empty(1.0);
        assert_eq!(betti_at_scale(&bc, 0, 0.3), 0);
        assert_eq!(rank_invariant(&bc, 1), 0);
        assert!(bc.degree(2).is_empty());
    }
}
