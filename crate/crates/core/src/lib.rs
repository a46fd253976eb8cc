//! Vietoris-Rips persistent homology over F2, contour-parameterized stable
//! ranks, distances between them, and two applications: classification of
//! labeled point clouds and spatial-organization indices of gridded fields.
//!
//! The pipeline is
//! [`PointCloud`] → [`DissimilarityMatrix`] → [`Filtration`] → [`Barcode`]
//! → [`StableRank`], with [`Contour`] choosing how bars are measured.

pub mod complex;
pub mod contour;
pub mod error;
pub mod homology;
pub mod io;
pub mod learn;
pub mod seed;
pub mod spatial;
pub mod stablerank;
pub mod step;

pub use complex::{
    build_vr_filtration, pairwise_dissimilarity, DissimilarityMatrix, Filtration, FiltrationEntry,
    Metric, PointCloud, Simplex,
};
pub use contour::{check_axioms, AxiomSample, Contour, DensitySpec};
pub use error::{Error, Result};
pub use homology::{
    betti_at_scale, boundary_matrix, homology_at_scale_oracle, rank_invariant, reduce_and_pair,
    reduce_and_pair_cohomology, rips_barcode, Bar, Barcode, BoundaryMatrix,
};
pub use stablerank::{
    distance_matrix, interleaving_distance, lp_distance, normalize, pointwise_mean, stable_rank,
    DistanceMetric, StableRank, Truncation,
};
pub use step::StepFunction;
