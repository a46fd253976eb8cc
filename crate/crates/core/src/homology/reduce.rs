//! Sparse column reduction over F2.

const NONE: usize = usize::MAX;

/// Column-major sparse F2 matrix under left-to-right reduction. Each column is
/// a strictly increasing list of row indices; the pivot is the last one.
pub(crate) struct ColumnReducer {
    cols: Vec<Vec<usize>>,
    /// `pivot_owner[row]` is the reduced column whose pivot is `row`.
    pivot_owner: Vec<usize>,
    scratch: Vec<usize>,
}

impl ColumnReducer {
    pub(crate) fn new(cols: Vec<Vec<usize>>, n_rows: usize) -> Self {
        Self {
            cols,
            pivot_owner: vec![NONE; n_rows],
            scratch: Vec::new(),
        }
    }

    pub(crate) fn clear(&mut self, j: usize) {
        self.cols[j].clear();
    }

    /// Adds earlier reduced columns into column `j` until its pivot is unique.
    /// Returns the final pivot, or `None` if the column reduced to zero.
    pub(crate) fn reduce(&mut self, j: usize) -> Option<usize> {
        loop {
            let pivot = *self.cols[j].last()?;
            let owner = self.pivot_owner[pivot];
            if owner == NONE {
                self.pivot_owner[pivot] = j;
                return Some(pivot);
            }
            self.add_into(owner, j);
        }
    }

    fn add_into(&mut self, src: usize, dst: usize) {
        let (a, b) = (&self.cols[src], &self.cols[dst]);
        let out = &mut self.scratch;
        out.clear();
        out.reserve(a.len() + b.len());
        let (mut i, mut k) = (0, 0);
        while i < a.len() && k < b.len() {
            match a[i].cmp(&b[k]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[k]);
                    k += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    k += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[k..]);
        std::mem::swap(&mut self.cols[dst], &mut self.scratch);
    }

    #[cfg(test)]
    pub(crate) fn column(&self, j: usize) -> &[usize] {
        &self.cols[j]
    }
}
