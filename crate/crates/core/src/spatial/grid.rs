use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A 2-D scalar field, row-major: cell `(x, y)` lives at `y * nx + x`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    nx: usize,
    ny: usize,
    cell_size: f64,
    periodic: bool,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(
        nx: usize,
        ny: usize,
        cell_size: f64,
        periodic: bool,
        values: Vec<f64>,
    ) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(invalid("grid", "nx and ny must be at least 1"));
        }
        if values.len() != nx * ny {
            return Err(invalid(
                "grid",
                format!("expected {} values, got {}", nx * ny, values.len()),
            ));
        }
        if !(cell_size > 0.0) || !cell_size.is_finite() {
            return Err(invalid("cell_size", "must be strictly positive"));
        }
        if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(invalid("grid", "values must be finite and nonnegative"));
        }
        Ok(Self {
            nx,
            ny,
            cell_size,
            periodic,
            values,
        })
    }

    pub fn zeros(nx: usize, ny: usize, cell_size: f64, periodic: bool) -> Result<Self> {
        Self::new(nx, ny, cell_size, periodic, vec![0.0; nx * ny])
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn periodic(&self) -> bool {
        self.periodic
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.nx + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        assert!(v >= 0.0 && v.is_finite());
        self.values[y * self.nx + x] = v;
    }

    /// Physical extents `(Lx, Ly)`.
    pub fn extents(&self) -> (f64, f64) {
        (
            self.nx as f64 * self.cell_size,
            self.ny as f64 * self.cell_size,
        )
    }

    /// Center of cell `index` in physical coordinates.
    pub fn cell_center(&self, index: usize) -> [f64; 2] {
        let (x, y) = (index % self.nx, index / self.nx);
        [
            (x as f64 + 0.5) * self.cell_size,
            (y as f64 + 0.5) * self.cell_size,
        ]
    }

    /// Periodic shift by `(dx, dy)` cells.
    pub fn translated(&self, dx: usize, dy: usize) -> GridField {
        let mut values = vec![0.0; self.values.len()];
        for y in 0..self.ny {
            for x in 0..self.nx {
                values[((y + dy) % self.ny) * self.nx + (x + dx) % self.nx] = self.get(x, y);
            }
        }
        GridField {
            values,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Connectivity {
    #[default]
    Four,
    Eight,
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        match self.rank[a].cmp(&self.rank[b]) {
            std::cmp::Ordering::Less => self.parent[a] = b,
            std::cmp::Ordering::Greater => self.parent[b] = a,
            std::cmp::Ordering::Equal => {
                self.parent[b] = a;
                self.rank[a] += 1;
            }
        }
    }
}

/// One connected component of the superlevel set.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    /// Cell indices, increasing.
    pub cells: Vec<usize>,
    /// Geometric centroid; per-axis circular mean on periodic grids.
    pub centroid: [f64; 2],
    /// Cell holding the maximum value (smallest index on ties).
    pub argmax: usize,
    pub max_value: f64,
}

impl Component {
    pub fn size(&self) -> usize {
        self.cells.len()
    }
}

/// Components ordered by their smallest cell index.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSet {
    pub components: Vec<Component>,
    pub nx: usize,
    pub ny: usize,
    pub cell_size: f64,
    pub periodic: bool,
}

impl ComponentSet {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn extents(&self) -> (f64, f64) {
        (
            self.nx as f64 * self.cell_size,
            self.ny as f64 * self.cell_size,
        )
    }

    pub fn cell_center(&self, index: usize) -> [f64; 2] {
        let (x, y) = (index % self.nx, index / self.nx);
        [
            (x as f64 + 0.5) * self.cell_size,
            (y as f64 + 0.5) * self.cell_size,
        ]
    }

    /// Sizes in decreasing order.
    pub fn sizes(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.components.iter().map(Component::size).collect();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }
}

/// Mean of coordinates on a circle of circumference `period`. Falls back to
/// the arithmetic mean when the resultant vanishes (e.g. a band wrapping the
/// whole axis).
pub(crate) fn circular_mean(coords: impl Iterator<Item = f64> + Clone, period: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let (mut s, mut c, mut n) = (0.0, 0.0, 0usize);
    for x in coords.clone() {
        let a = tau * x / period;
        s += a.sin();
        c += a.cos();
        n += 1;
    }
    if (s * s + c * c).sqrt() < 1e-9 * n as f64 {
        return coords.sum::<f64>() / n as f64;
    }
    let mut m = s.atan2(c) / tau * period;
    if m < 0.0 {
        m += period;
    }
    if m >= period {
        m -= period;
    }
    m
}

/// Connected components of `{ value > threshold }`, wrapping across the
/// boundary on periodic grids. Components with fewer than `min_size` cells are
/// dropped.
pub fn label_components(
    f: &GridField,
    threshold: f64,
    min_size: usize,
    connectivity: Connectivity,
) -> ComponentSet {
    let (nx, ny) = (f.nx, f.ny);
    let on = |i: usize| f.values[i] > threshold;
    let mut uf = UnionFind::new(nx * ny);
    let offsets: &[(isize, isize)] = match connectivity {
        Connectivity::Four => &[(1, 0), (0, 1)],
        Connectivity::Eight => &[(1, 0), (0, 1), (1, 1), (-1, 1)],
    };
    for y in 0..ny {
        for x in 0..nx {
            let i = y * nx + x;
            if !on(i) {
                continue;
            }
            for &(dx, dy) in offsets {
                let (mut xx, mut yy) = (x as isize + dx, y as isize + dy);
                if f.periodic {
                    xx = xx.rem_euclid(nx as isize);
                    yy = yy.rem_euclid(ny as isize);
                } else if xx < 0 || yy < 0 || xx >= nx as isize || yy >= ny as isize {
                    continue;
                }
                let j = yy as usize * nx + xx as usize;
                if on(j) {
                    uf.union(i, j);
                }
            }
        }
    }

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; nx * ny];
    for i in (0..nx * ny).filter(|&i| on(i)) {
        let root = uf.find(i);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(i);
    }

    let (lx, ly) = f.extents();
    let components = groups
        .into_iter()
        .filter(|cells| cells.len() >= min_size)
        .map(|cells| {
            let centers = cells.iter().map(|&i| f.cell_center(i));
            let centroid = if f.periodic {
                [
                    circular_mean(centers.clone().map(|c| c[0]), lx),
                    circular_mean(centers.map(|c| c[1]), ly),
                ]
            } else {
                let n = cells.len() as f64;
                let (sx, sy) = centers.fold((0.0, 0.0), |(a, b), c| (a + c[0], b + c[1]));
                [sx / n, sy / n]
            };
            let argmax = cells.iter().copied().fold(cells[0], |best, i| {
                if f.values[i] > f.values[best] {
                    i
                } else {
                    best
                }
            });
            Component {
                max_value: f.values[argmax],
                cells,
                centroid,
                argmax,
            }
        })
        .collect();
    ComponentSet {
        components,
        nx,
        ny,
        cell_size: f.cell_size,
        periodic: f.periodic,
    }
}
