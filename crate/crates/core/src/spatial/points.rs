use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::grid::ComponentSet;
use crate::complex::{torus_delta, PointCloud};
use crate::error::{invalid, Error, Result};
use crate::seed;

/// Points in a rectangular domain `[0, Lx) x [0, Ly)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarPoints {
    points: Vec<[f64; 2]>,
    lx: f64,
    ly: f64,
    periodic: bool,
}

impl PlanarPoints {
    pub fn new(points: Vec<[f64; 2]>, lx: f64, ly: f64, periodic: bool) -> Result<Self> {
        if !(lx > 0.0 && ly > 0.0) {
            return Err(invalid("domain", "extents must be strictly positive"));
        }
        if let Some(p) = points
            .iter()
            .find(|p| !(p[0] >= 0.0 && p[0] < lx && p[1] >= 0.0 && p[1] < ly))
        {
            return Err(invalid("points", format!("{p:?} lies outside the domain")));
        }
        Ok(Self {
            points,
            lx,
            ly,
            periodic,
        })
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn extents(&self) -> (f64, f64) {
        (self.lx, self.ly)
    }

    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    pub fn periodic(&self) -> bool {
        self.periodic
    }

    /// Same points, with the periodic flag replaced.
    pub fn with_periodic(&self, periodic: bool) -> PlanarPoints {
        PlanarPoints {
            periodic,
            ..self.clone()
        }
    }

    pub fn distance(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        if self.periodic {
            torus_delta(a[0], b[0], self.lx).hypot(torus_delta(a[1], b[1], self.ly))
        } else {
            (a[0] - b[0]).hypot(a[1] - b[1])
        }
    }

    /// Diameter of the domain under its metric.
    pub fn diameter(&self) -> f64 {
        let full = self.lx.hypot(self.ly);
        if self.periodic {
            0.5 * full
        } else {
            full
        }
    }

    pub fn to_cloud(&self) -> PointCloud {
        let cloud = PointCloud::new(self.points.iter().map(|p| p.to_vec()).collect())
            .expect("finite 2-D points");
        if self.periodic && !self.points.is_empty() {
            cloud
                .with_torus(vec![self.lx, self.ly])
                .expect("positive extents")
        } else {
            cloud
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    Centroid,
    MaxValue,
    /// `ceil(rate * size)` distinct random cells per component.
    Random(f64),
}

impl std::str::FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "centroid" => Ok(Representation::Centroid),
            "maxval" | "max_value" => Ok(Representation::MaxValue),
            _ => match s.strip_prefix("random:").map(str::parse::<f64>) {
                Some(Ok(r)) if r > 0.0 && r <= 1.0 => Ok(Representation::Random(r)),
                _ => Err(invalid(
                    "represent",
                    format!("unknown representation `{s}`"),
                )),
            },
        }
    }
}

impl std::fmt::Display for Representation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Representation::Centroid => write!(f, "centroid"),
            Representation::MaxValue => write!(f, "maxval"),
            Representation::Random(r) => write!(f, "random:{r}"),
        }
    }
}

pub fn represent(cs: &ComponentSet, mode: Representation, seed: u64) -> Result<PlanarPoints> {
    let (lx, ly) = cs.extents();
    let points = match mode {
        Representation::Centroid => cs.components.iter().map(|c| c.centroid).collect(),
        Representation::MaxValue => cs
            .components
            .iter()
            .map(|c| cs.cell_center(c.argmax))
            .collect(),
        Representation::Random(rate) => {
            if !(rate > 0.0 && rate <= 1.0) {
                return Err(invalid("rate", format!("{rate} is not in (0, 1]")));
            }
            let mut out = Vec::new();
            for (k, c) in cs.components.iter().enumerate() {
                let take = ((rate * c.size() as f64).ceil() as usize).clamp(1, c.size());
                let mut rng = seed::rng(seed, seed::STREAM_REPRESENT, k as u64);
                let mut picked = index::sample(&mut rng, c.size(), take).into_vec();
                picked.sort_unstable();
                out.extend(picked.into_iter().map(|i| cs.cell_center(c.cells[i])));
            }
            out
        }
    };
    PlanarPoints::new(points, lx, ly, cs.periodic)
}

/// Distance from each point to its nearest other point.
pub fn nn_distances(p: &PlanarPoints) -> Result<Vec<f64>> {
    if p.len() < 2 {
        return Err(Error::TooFewPoints(p.len()));
    }
    let pts = p.points();
    Ok(pts
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            pts.iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &b)| p.distance(a, b))
                .fold(f64::INFINITY, f64::min)
        })
        .collect())
}

/// Realizations of a homogeneous Poisson process on the flat torus
/// `[0, Lx) x [0, Ly)`.
pub fn poisson_realizations(
    lambda: f64,
    domain: (f64, f64),
    n: usize,
    seed: u64,
) -> Result<Vec<PlanarPoints>> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(invalid("lambda", "must be strictly positive"));
    }
    let (lx, ly) = domain;
    if !(lx > 0.0 && ly > 0.0) {
        return Err(invalid("domain", "extents must be strictly positive"));
    }
    let count = Poisson::new(lambda * lx * ly).map_err(|e| invalid("lambda", e.to_string()))?;
    (0..n)
        .map(|k| {
            let mut rng = seed::rng(seed, seed::STREAM_POISSON, k as u64);
            let m = count.sample(&mut rng) as usize;
            let pts = (0..m)
                .map(|_| [rng.random_range(0.0..lx), rng.random_range(0.0..ly)])
                .collect();
            PlanarPoints::new(pts, lx, ly, true)
        })
        .collect()
}
