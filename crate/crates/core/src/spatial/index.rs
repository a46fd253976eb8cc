//! Organization indices: the nearest-neighbor `I_org` and its persistence
//! analogue `I_PH`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::points::{nn_distances, poisson_realizations, PlanarPoints};
use crate::complex::{build_vr_filtration, pairwise_dissimilarity, Metric};
use crate::contour::Contour;
use crate::error::{invalid, Error, Result};
use crate::homology::{reduce_and_pair_cohomology, Barcode};
use crate::stablerank::{normalize, stable_rank, StableRank, Truncation};
use crate::step::{merged_grid, pointwise_mean, StepFunction};

/// `G_CSR(r_max)` reaches at least `1 - CSR_TAIL`.
pub const CSR_TAIL: f64 = 1e-6;

/// Bars shorter than this fraction of the domain diameter are rounding noise
/// from tied distances (lattice-aligned points) and are discarded.
pub const PERSISTENCE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IOrg {
    pub value: f64,
    /// All points coincide; `value` is then 1.
    pub degenerate: bool,
}

/// Area under the parametric curve `(G_CSR(r), G_hat(r))`, with
/// `G_CSR(r) = 1 - exp(-lambda pi r^2)`, `lambda = N / area`, and `G_hat` the
/// empirical CDF of nearest-neighbor distances. `r` runs over `r_grid_size`
/// equally spaced values in `[0, r_max]`; the trapezoid rule is applied along
/// the `G_CSR` axis and the curve is closed at `(1, 1)`.
pub fn i_org(p: &PlanarPoints, r_grid_size: usize) -> Result<IOrg> {
    if r_grid_size < 2 {
        return Err(invalid("r_grid_size", "need at least 2 grid points"));
    }
    let mut d = nn_distances(p)?;
    if d.iter().all(|&x| x == 0.0) {
        return Ok(IOrg {
            value: 1.0,
            degenerate: true,
        });
    }
    d.sort_by(f64::total_cmp);
    let n = d.len() as f64;
    let lambda = n / p.area();
    let pi = std::f64::consts::PI;
    let g_csr = |r: f64| 1.0 - (-lambda * pi * r * r).exp();
    let g_hat = |r: f64| d.partition_point(|&x| x <= r) as f64 / n;
    let r_max = ((1.0 / CSR_TAIL).ln() / (lambda * pi)).sqrt();

    let mut prev = (0.0, g_hat(0.0));
    let mut area = 0.0;
    for k in 1..r_grid_size {
        let r = r_max * k as f64 / (r_grid_size - 1) as f64;
        let cur = (g_csr(r), g_hat(r));
        area += (cur.0 - prev.0) * (cur.1 + prev.1) * 0.5;
        prev = cur;
    }
    area += (1.0 - prev.0) * (1.0 + prev.1) * 0.5;
    Ok(IOrg {
        value: area,
        degenerate: false,
    })
}

/// A non-decreasing step function with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cdf(StepFunction);

impl Cdf {
    pub fn from_step(f: StepFunction) -> Result<Self> {
        if !f.is_non_decreasing() || f.initial() < 0.0 || f.tail() > 1.0 + 1e-12 {
            return Err(Error::InvalidStepFunction("not a CDF".into()));
        }
        Ok(Cdf(f))
    }

    /// All mass at 0.
    pub fn one() -> Self {
        Cdf(StepFunction::constant(1.0))
    }

    pub fn as_step(&self) -> &StepFunction {
        &self.0
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.0.eval(r)
    }

    pub fn breakpoints(&self) -> &[f64] {
        self.0.breakpoints()
    }

    pub fn values(&self) -> &[f64] {
        self.0.values()
    }
}

/// `1 - s` for a normalized stable rank `s`.
pub fn g_ph(s: &StableRank) -> Result<Cdf> {
    let v0 = s.eval(0.0);
    if (v0 - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized(v0));
    }
    Cdf::from_step(s.as_step().map(|v| 1.0 - v))
}

pub fn mean_cdf(cdfs: &[Cdf]) -> Result<Cdf> {
    let steps: Vec<&StepFunction> = cdfs.iter().map(|c| &c.0).collect();
    Ok(Cdf(pointwise_mean(&steps)?))
}

/// `G_PH` curves of a point set in degrees 0 and 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceCdfs {
    pub h0: Cdf,
    pub h1: Cdf,
}

/// Normalized stable ranks of a point set's Rips filtration (toroidal metric on
/// periodic domains, truncated at the domain diameter, essential bars capped),
/// turned into `G_PH` curves. A degree with no bars gives the constant-1 CDF.
/// Bars shorter than [`PERSISTENCE_FLOOR`] times the diameter are ignored.
pub fn point_set_g_ph(p: &PlanarPoints, contour: &Contour) -> Result<PersistenceCdfs> {
    let metric = if p.periodic() {
        Metric::ToroidalEuclidean
    } else {
        Metric::Euclidean
    };
    let d = pairwise_dissimilarity(&p.to_cloud(), metric)?;
    let f = build_vr_filtration(&d, 2, p.diameter())?;
    let floor = PERSISTENCE_FLOOR * p.diameter();
    let raw = reduce_and_pair_cohomology(&f);
    let bc = Barcode::new(
        raw.bars()
            .filter(|b| b.is_essential() || b.death - b.birth > floor)
            .copied(),
        raw.max_scale(),
    )?;
    let curve = |degree: usize| -> Result<Cdf> {
        let s = stable_rank(&bc, degree, contour, Truncation::CapAtMaxScale);
        if s.is_zero() {
            Ok(Cdf::one())
        } else {
            g_ph(&normalize(&s)?)
        }
    };
    Ok(PersistenceCdfs {
        h0: curve(0)?,
        h1: curve(1)?,
    })
}

/// Pointwise means of `G_PH` over Poisson realizations with intensity `lambda`.
pub fn csr_baseline(
    lambda: f64,
    domain: (f64, f64),
    n_realizations: usize,
    contour: &Contour,
    seed: u64,
) -> Result<PersistenceCdfs> {
    if n_realizations == 0 {
        return Err(invalid("realizations", "need at least one realization"));
    }
    let realizations = poisson_realizations(lambda, domain, n_realizations, seed)?;
    let curves: Vec<PersistenceCdfs> = realizations
        .par_iter()
        .map(|p| point_set_g_ph(p, contour))
        .collect::<Result<_>>()?;
    let (h0, h1): (Vec<Cdf>, Vec<Cdf>) = curves.into_iter().map(|c| (c.h0, c.h1)).unzip();
    Ok(PersistenceCdfs {
        h0: mean_cdf(&h0)?,
        h1: mean_cdf(&h1)?,
    })
}

/// Area under the parametric curve `(baseline(r), field(r))`, from `(0, 0)`
/// through the values at `r = 0` and every breakpoint of either function, to
/// `(1, 1)`. Consecutive points are joined by straight segments.
pub fn parametric_area(baseline: &Cdf, field: &Cdf) -> f64 {
    let grid = merged_grid([&baseline.0, &field.0]);
    let pts = std::iter::once((0.0, 0.0))
        .chain(
            std::iter::once(0.0)
                .chain(grid)
                .map(|r| (baseline.eval(r), field.eval(r))),
        )
        .chain(std::iter::once((1.0, 1.0)));
    let mut area = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for cur in pts {
        if let Some(p) = prev {
            area += (cur.0 - p.0) * (cur.1 + p.1) * 0.5;
        }
        prev = Some(cur);
    }
    area
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IPh {
    pub i_ph_0: f64,
    pub i_ph_1: f64,
    pub i_ph: f64,
}

pub fn i_ph(field: &PersistenceCdfs, baseline: &PersistenceCdfs) -> IPh {
    let i_ph_0 = parametric_area(&baseline.h0, &field.h0);
    let i_ph_1 = parametric_area(&baseline.h1, &field.h1);
    IPh {
        i_ph_0,
        i_ph_1,
        i_ph: (i_ph_0 + i_ph_1) / 2.0,
    }
}
