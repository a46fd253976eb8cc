//! Dense per-scale homology over F2, independent of the persistence reduction.

use crate::complex::Filtration;

struct BitRow(Vec<u64>);

impl BitRow {
    fn zeros(n: usize) -> Self {
        BitRow(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] ^= 1 << (i % 64);
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn xor(&mut self, other: &BitRow) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }
}

/// Rank over F2 of a dense matrix given as rows of column indices.
fn rank_f2(mut rows: Vec<BitRow>, n_cols: usize) -> usize {
    let mut rank = 0;
    for c in 0..n_cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(c)) else {
            continue;
        };
        rows.swap(rank, p);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot = &head[rank];
        for row in tail.iter_mut() {
            if row.get(c) {
                row.xor(pivot);
            }
        }
        rank += 1;
    }
    rank
}

/// Matrix of the boundary map from `dim`-simplices to `(dim-1)`-simplices of
/// the complex at scale `t`; zero map when `dim == 0`.
fn boundary_rank(f: &Filtration, dim: isize, t: f64) -> usize {
    if dim <= 0 {
        return 0;
    }
    let alive: Vec<_> = f.entries().iter().filter(|e| e.scale <= t).collect();
    let lower: Vec<&[usize]> = alive
        .iter()
        .filter(|e| e.simplex.dim() == dim - 1)
        .map(|e| e.simplex.vertices())
        .collect();
    let upper: Vec<_> = alive.iter().filter(|e| e.simplex.dim() == dim).collect();
    let rows = upper
        .iter()
        .map(|e| {
            let mut row = BitRow::zeros(lower.len());
            for i in 0..=dim as usize {
                let face = e.simplex.face(i).expect("face index in range");
                let col = lower
                    .iter()
                    .position(|v| *v == face.vertices())
                    .expect("filtration is closed under faces");
                row.set(col);
            }
            row
        })
        .collect();
    rank_f2(rows, lower.len())
}

/// `dim H_k` of the complex at scale `t`, as `dim ker d_k - rank d_{k+1}`,
/// by dense Gaussian elimination.
pub fn homology_at_scale_oracle(f: &Filtration, degree: usize, t: f64) -> usize {
    let k = degree as isize;
    let n_k = f
        .entries()
        .iter()
        .filter(|e| e.scale <= t && e.simplex.dim() == k)
        .count();
    n_k - boundary_rank(f, k, t) - boundary_rank(f, k + 1, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{
        build_vr_filtration, DissimilarityMatrix, Filtration, FiltrationEntry, Simplex,
    };

    #[test]
    fn complete_graph_is_connected() {
        let n = 6;
        let mut e = vec![1.0; n * n];
        for i in 0..n {
            e[i * n + i] = 0.0;
        }
        let d = DissimilarityMatrix::from_full(n, e).unwrap();
        let f = build_vr_filtration(&d, 2, 1.0).unwrap();
        assert_eq!(homology_at_scale_oracle(&f, 0, 1.0), 1);
        assert_eq!(homology_at_scale_oracle(&f, 1, 1.0), 0);
        assert_eq!(homology_at_scale_oracle(&f, 0, 0.5), n);
    }

    /// Eight vertices around a cycle of eight edges, plus a chord and one
    /// filled triangle: a single loop survives.
    #[test]
    fn single_loop_complex() {
        let mut entries: Vec<FiltrationEntry> = (0..8)
            .map(|i| FiltrationEntry {
                simplex: Simplex::new(&[i]).unwrap(),
                scale: 0.0,
            })
            .collect();
        let mut edges: Vec<[usize; 2]> = (0..8)
            .map(|i| {
                let (a, b) = (i, (i + 1) % 8);
                [a.min(b), a.max(b)]
            })
            .collect();
        edges.push([0, 2]);
        edges.sort();
        for e in &edges {
            entries.push(FiltrationEntry {
                simplex: Simplex::new(e).unwrap(),
                scale: 1.0,
            });
        }
        entries.push(FiltrationEntry {
            simplex: Simplex::new(&[0, 1, 2]).unwrap(),
            scale: 1.0,
        });
        let f = Filtration::from_ordered(entries, 2, 1.0).unwrap();
        assert_eq!(f.counts(), [8, 9, 1]);
        assert_eq!(homology_at_scale_oracle(&f, 1, 1.0), 1);
        assert_eq!(homology_at_scale_oracle(&f, 0, 1.0), 1);
    }

    #[test]
    fn rank_of_identity_and_dependent_rows() {
        let mut a = BitRow::zeros(3);
        a.set(0);
        a.set(1);
        let mut b = BitRow::zeros(3);
        b.set(1);
        b.set(2);
        let mut c = BitRow::zeros(3);
        c.set(0);
        c.set(2);
        assert_eq!(rank_f2(vec![a, b, c], 3), 2);
    }
}
