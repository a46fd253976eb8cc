//! Spatial organization of gridded fields.
//!
//! A field is thresholded into connected components, each component is
//! reduced to one or more points, and the point pattern is compared with
//! complete spatial randomness in two ways: through nearest-neighbor distances
//! ([`i_org`]) and through normalized stable ranks against a Monte Carlo
//! Poisson baseline ([`i_ph`]).

mod grid;
mod index;
mod points;

pub use grid::{label_components, Component, ComponentSet, Connectivity, GridField};
pub use index::{
    csr_baseline, g_ph, i_org, i_ph, mean_cdf, parametric_area, point_set_g_ph, Cdf, IOrg, IPh,
    PersistenceCdfs, CSR_TAIL, PERSISTENCE_FLOOR,
};
pub use points::{nn_distances, poisson_realizations, represent, PlanarPoints, Representation};

use serde::{Deserialize, Serialize};

use crate::contour::Contour;
use crate::error::Result;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineIntensity {
    /// Number of represented points over the domain area.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldConfig {
    pub threshold: f64,
    pub min_size: usize,
    pub connectivity: Connectivity,
    pub representation: Representation,
    pub baseline_intensity: BaselineIntensity,
    pub realizations: usize,
    pub contour: Contour,
    /// Nearest-neighbor distances for `I_org` ignore periodicity when set.
    pub planar_nn: bool,
    pub r_grid_size: usize,
    pub seed: u64,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self {
            threshold: 0.0,
            min_size: 3,
            connectivity: Connectivity::Four,
            representation: Representation::Centroid,
            baseline_intensity: BaselineIntensity::Auto,
            realizations: 100,
            contour: Contour::Standard,
            planar_nn: false,
            r_grid_size: 1000,
            seed: 0,
        }
    }
}

/// Indices for one field. Indices are `None` when the field has too few
/// points to define them; `warnings` then says why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub i_org: Option<f64>,
    pub i_ph_0: Option<f64>,
    pub i_ph_1: Option<f64>,
    pub i_ph: Option<f64>,
    pub representation: String,
    pub min_size: usize,
    pub seed: u64,
    pub components: usize,
    pub points: usize,
    pub baseline_lambda: Option<f64>,
    pub warnings: Vec<String>,
}

/// Everything computed for one field, including the curves behind `I_PH`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldAnalysis {
    pub report: IndexReport,
    pub points: PlanarPoints,
    pub field_cdfs: Option<PersistenceCdfs>,
    pub baseline_cdfs: Option<PersistenceCdfs>,
}

/// Seed of the Monte Carlo baseline, derived from the run seed.
pub fn baseline_seed(seed: u64) -> u64 {
    seed::derive(seed, seed::STREAM_POISSON, u64::MAX)
}

pub fn analyze_field(field: &GridField, cfg: &FieldConfig) -> Result<FieldAnalysis> {
    let cs = label_components(field, cfg.threshold, cfg.min_size, cfg.connectivity);
    let points = represent(&cs, cfg.representation, cfg.seed)?;
    analyze_points(points, cs.len(), cfg, None)
}

/// Indices of a represented point set. A precomputed baseline may be passed
/// to share it between fields; otherwise one is simulated from `cfg`.
pub fn analyze_points(
    points: PlanarPoints,
    components: usize,
    cfg: &FieldConfig,
    baseline: Option<&PersistenceCdfs>,
) -> Result<FieldAnalysis> {
    let mut report = IndexReport {
        i_org: None,
        i_ph_0: None,
        i_ph_1: None,
        i_ph: None,
        representation: cfg.representation.to_string(),
        min_size: cfg.min_size,
        seed: cfg.seed,
        components,
        points: points.len(),
        baseline_lambda: None,
        warnings: Vec::new(),
    };
    if points.len() < 2 {
        report.warnings.push(format!(
            "{} point(s) after representation; indices undefined",
            points.len()
        ));
        return Ok(FieldAnalysis {
            report,
            points,
            field_cdfs: None,
            baseline_cdfs: None,
        });
    }

    let nn_points = if cfg.planar_nn {
        points.with_periodic(false)
    } else {
        points.clone()
    };
    let org = i_org(&nn_points, cfg.r_grid_size)?;
    if org.degenerate {
        report
            .warnings
            .push("all points coincide; I_org set to 1".into());
    }
    report.i_org = Some(org.value);

    let field_cdfs = point_set_g_ph(&points, &cfg.contour)?;
    let baseline_cdfs = match baseline {
        Some(b) => b.clone(),
        None => {
            let lambda = match cfg.baseline_intensity {
                BaselineIntensity::Auto => points.len() as f64 / points.area(),
                BaselineIntensity::Fixed(l) => l,
            };
            report.baseline_lambda = Some(lambda);
            csr_baseline(
                lambda,
                points.extents(),
                cfg.realizations,
                &cfg.contour,
                baseline_seed(cfg.seed),
            )?
        }
    };
    let idx = i_ph(&field_cdfs, &baseline_cdfs);
    report.i_ph_0 = Some(idx.i_ph_0);
    report.i_ph_1 = Some(idx.i_ph_1);
    report.i_ph = Some(idx.i_ph);
    Ok(FieldAnalysis {
        report,
        points,
        field_cdfs: Some(field_cdfs),
        baseline_cdfs: Some(baseline_cdfs),
    })
}
