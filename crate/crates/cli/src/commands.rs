use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use srank_core::io;
use srank_core::learn::{self, LabeledDataset, PairsByClass, PersistenceConfig, ScaleLimit};
use srank_core::spatial::{
    self, BaselineIntensity, Connectivity, FieldConfig, GridField, PersistenceCdfs, Representation,
};
use srank_core::{
    distance_matrix, normalize, pairwise_dissimilarity, rips_barcode, stable_rank, Barcode,
    Contour, DissimilarityMatrix, DistanceMetric, Metric, StableRank, Truncation,
};

use crate::output::OutputDir;

fn open(path: &Path) -> Result<fs::File> {
    fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))
}

fn read_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// `standard`, `power:<p>`, `mult:<r>` or `density:<file>`.
fn parse_contour(spec: &str, flag: &str) -> Result<Contour> {
    let parsed = match spec.strip_prefix("density:") {
        Some(file) => {
            let path = Path::new(file);
            io::read_density(open(path)?)
                .map(Contour::from_density)
                .with_context(|| path.display().to_string())
        }
        None => spec.parse::<Contour>().map_err(anyhow::Error::from),
    };
    parsed.with_context(|| format!("{flag} `{spec}`"))
}

fn parse_truncation(s: &str) -> Result<Truncation> {
    s.parse().with_context(|| format!("--truncation `{s}`"))
}

#[derive(Args, Serialize)]
pub struct CloudInput {
    /// Point cloud CSV, one point per row
    #[arg(long, conflicts_with = "distances")]
    points: Option<PathBuf>,
    /// Lower-triangular distance matrix, row i holding d(i,0) .. d(i,i-1)
    #[arg(long)]
    distances: Option<PathBuf>,
    /// Periods Lx,Ly,.. of a toroidal metric on the points
    #[arg(long, value_delimiter = ',', requires = "points")]
    torus: Option<Vec<f64>>,
    /// Z-score every coordinate column before measuring distances
    #[arg(long, requires = "points")]
    standardize: bool,
    /// Highest simplex dimension (0, 1 or 2)
    #[arg(long, default_value_t = 2)]
    max_dim: usize,
    /// Filtration scale limit [default: enclosing radius]
    #[arg(long)]
    max_scale: Option<f64>,
}

impl CloudInput {
    fn given(&self) -> bool {
        self.points.is_some() || self.distances.is_some()
    }

    fn matrix(&self) -> Result<DissimilarityMatrix> {
        if let Some(path) = &self.distances {
            return io::read_lower_triangular(open(path)?)
                .with_context(|| path.display().to_string());
        }
        let Some(path) = &self.points else {
            bail!("one of --points or --distances is required");
        };
        let mut cloud =
            io::read_point_cloud(open(path)?).with_context(|| path.display().to_string())?;
        if self.standardize {
            cloud = cloud.standardized();
        }
        let metric = match &self.torus {
            Some(extents) => {
                cloud = cloud.with_torus(extents.clone()).context("--torus")?;
                Metric::ToroidalEuclidean
            }
            None => Metric::Euclidean,
        };
        Ok(pairwise_dissimilarity(&cloud, metric)?)
    }

    fn barcode(&self) -> Result<Barcode> {
        ensure!(
            self.max_dim <= 2,
            "--max-dim must be 0, 1 or 2, got {}",
            self.max_dim
        );
        let d = self.matrix()?;
        let scale = match self.max_scale {
            Some(s) => {
                ensure!(
                    s >= 0.0 && s.is_finite(),
                    "--max-scale must be a finite nonnegative number, got {s}"
                );
                s
            }
            None => d.enclosing_radius(),
        };
        Ok(rips_barcode(&d, self.max_dim, scale)?)
    }
}

#[derive(Args, Serialize)]
pub struct BarcodeArgs {
    #[command(flatten)]
    input: CloudInput,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
}

pub fn barcode(a: &BarcodeArgs) -> Result<()> {
    let bc = a.input.barcode()?;
    let mut out = OutputDir::create(&a.out)?;
    out.write("barcode.json", io::barcode_to_json(&bc).as_bytes())?;
    out.write("h0_stems.txt", io::stems(&bc, 0).as_bytes())?;
    if a.input.max_dim >= 1 {
        out.write("h1_stems.txt", io::stems(&bc, 1).as_bytes())?;
    }
    out.finish("barcode", a)
}

#[derive(Args, Serialize)]
pub struct StableRankArgs {
    /// Barcode JSON written by `srank barcode`
    #[arg(long, conflicts_with_all = ["points", "distances"])]
    barcode: Option<PathBuf>,
    #[command(flatten)]
    input: CloudInput,
    /// Contour for both degrees: standard, power:<p>, mult:<r> or density:<file>
    #[arg(long, default_value = "standard")]
    contour: String,
    /// Contour for degree 0 [default: --contour]
    #[arg(long)]
    contour_h0: Option<String>,
    /// Contour for degree 1 [default: --contour]
    #[arg(long)]
    contour_h1: Option<String>,
    /// Essential bars: `cap` at the scale limit or `drop`
    #[arg(long, default_value = "cap")]
    truncation: String,
    /// Divide each function by its value at 0
    #[arg(long)]
    normalize: bool,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
}

pub fn stablerank(a: &StableRankArgs) -> Result<()> {
    let bc = match &a.barcode {
        Some(path) => io::barcode_from_json(&read_string(path)?)
            .with_context(|| path.display().to_string())?,
        None if a.input.given() => a.input.barcode()?,
        None => bail!("one of --barcode, --points or --distances is required"),
    };
    let truncation = parse_truncation(&a.truncation)?;
    let contours = [
        parse_contour(
            a.contour_h0.as_deref().unwrap_or(&a.contour),
            "--contour-h0",
        )?,
        parse_contour(
            a.contour_h1.as_deref().unwrap_or(&a.contour),
            "--contour-h1",
        )?,
    ];
    let mut out = OutputDir::create(&a.out)?;
    for (k, c) in contours.iter().enumerate() {
        let mut s = stable_rank(&bc, k, c, truncation);
        if a.normalize {
            s = normalize(&s)
                .with_context(|| format!("--normalize: degree {k} stable rank is zero"))?;
        }
        out.write(&format!("h{k}.csv"), io::stable_rank_to_csv(&s).as_bytes())?;
    }
    out.finish("stablerank", a)
}

#[derive(Args, Serialize)]
pub struct DistArgs {
    /// Stable-rank CSV files (`epsilon,value`)
    #[arg(required = true, num_args = 1..)]
    inputs: Vec<PathBuf>,
    /// l1, l2, lp:<p> or interleaving
    #[arg(long, default_value = "l1")]
    metric: String,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
}

/// File stems, or full paths when stems collide.
fn identifiers(paths: &[PathBuf]) -> Vec<String> {
    let stems: Vec<String> = paths
        .iter()
        .map(|p| {
            p.file_stem().map_or_else(
                || p.display().to_string(),
                |s| s.to_string_lossy().into_owned(),
            )
        })
        .collect();
    let mut seen = std::collections::HashSet::new();
    if stems.iter().all(|s| seen.insert(s.clone())) {
        stems
    } else {
        paths.iter().map(|p| p.display().to_string()).collect()
    }
}

pub fn dist(a: &DistArgs) -> Result<()> {
    let metric: DistanceMetric = a
        .metric
        .parse()
        .with_context(|| format!("--metric `{}`", a.metric))?;
    let ranks: Vec<StableRank> = a
        .inputs
        .par_iter()
        .map(|p| io::stable_rank_from_csv(open(p)?).with_context(|| p.display().to_string()))
        .collect::<Result<_>>()?;
    let m = distance_matrix(&ranks, metric);
    let mut out = OutputDir::create(&a.out)?;
    out.write(
        "distances.csv",
        io::distance_matrix_to_csv(&identifiers(&a.inputs), &m).as_bytes(),
    )?;
    out.finish("dist", a)
}

#[derive(Deserialize)]
struct DatasetEntry {
    id: String,
    label: String,
    csv_path: PathBuf,
}

#[derive(Args, Serialize)]
pub struct ClassifyArgs {
    /// JSON list of {"id", "label", "csv_path"}; relative paths resolve against the manifest
    #[arg(long)]
    manifest: PathBuf,
    /// Contour for degree 0
    #[arg(long, default_value = "standard")]
    contour_h0: String,
    /// Contour for degree 1
    #[arg(long, default_value = "standard")]
    contour_h1: String,
    /// Number of random train/test re-splits
    #[arg(long, default_value_t = 20)]
    folds: usize,
    /// Training resamples per class in each split
    #[arg(long, default_value_t = 40)]
    train: usize,
    /// Points per resample
    #[arg(long, default_value_t = 100)]
    sample_size: usize,
    /// Resamples per dataset
    #[arg(long, default_value_t = 100)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Z-score every coordinate column of each dataset
    #[arg(long)]
    standardize: bool,
    /// Essential bars: `cap` at the scale limit or `drop`
    #[arg(long, default_value = "cap")]
    truncation: String,
    /// Filtration scale limit [default: enclosing radius of each resample]
    #[arg(long)]
    max_scale: Option<f64>,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct ClassifySummary<'a> {
    accuracy: f64,
    labels: &'a [String],
    confusion: &'a [Vec<f64>],
    fold_accuracies: &'a [f64],
    samples_per_class: BTreeMap<&'a str, usize>,
}

pub fn classify(a: &ClassifyArgs) -> Result<()> {
    ensure!(a.folds >= 1, "--folds must be at least 1");
    ensure!(a.sample_size >= 1, "--sample-size must be at least 1");
    ensure!(a.reps >= 1, "--reps must be at least 1");
    let c0 = parse_contour(&a.contour_h0, "--contour-h0")?;
    let c1 = parse_contour(&a.contour_h1, "--contour-h1")?;
    let cfg = PersistenceConfig {
        max_scale: match a.max_scale {
            Some(s) => {
                ensure!(
                    s > 0.0 && s.is_finite(),
                    "--max-scale must be positive, got {s}"
                );
                ScaleLimit::Fixed(s)
            }
            None => ScaleLimit::EnclosingRadius,
        },
        truncation: parse_truncation(&a.truncation)?,
        ..PersistenceConfig::default()
    };

    let entries: Vec<DatasetEntry> = serde_json::from_str(&read_string(&a.manifest)?)
        .with_context(|| {
            format!(
                "{}: expected a list of {{id, label, csv_path}}",
                a.manifest.display()
            )
        })?;
    ensure!(!entries.is_empty(), "{}: no datasets", a.manifest.display());
    let base = a.manifest.parent().unwrap_or(Path::new(""));
    let datasets: Vec<LabeledDataset> = entries
        .par_iter()
        .map(|e| {
            let path = base.join(&e.csv_path);
            let mut cloud =
                io::read_point_cloud(open(&path)?).with_context(|| path.display().to_string())?;
            if a.standardize {
                cloud = cloud.standardized();
            }
            Ok(LabeledDataset::new(&e.id, &e.label, cloud)?)
        })
        .collect::<Result<_>>()?;

    let mut pairs: PairsByClass = BTreeMap::new();
    for (i, ds) in datasets.iter().enumerate() {
        let seed = srank_core::seed::derive(a.seed, srank_core::seed::STREAM_SUBSAMPLE, i as u64);
        let samples = learn::subsample(ds, a.sample_size, a.reps, seed)
            .with_context(|| format!("dataset `{}`", ds.id))?;
        let ranks = learn::rank_pairs(&samples, &c0, &c1, &cfg)
            .with_context(|| format!("dataset `{}`", ds.id))?;
        pairs.entry(ds.label.clone()).or_default().extend(ranks);
    }
    let cv = learn::cross_validate(&pairs, a.folds, a.train, a.seed).context("--train")?;

    let labels = &cv.confusion.labels;
    let mut confusion = format!("label,{}\n", labels.join(","));
    for (l, row) in labels.iter().zip(&cv.confusion.counts) {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        confusion += &format!("{l},{}\n", cells.join(","));
    }
    let mut folds = String::from("fold,accuracy\n");
    for (i, acc) in cv.fold_accuracies.iter().enumerate() {
        folds += &format!("{i},{acc}\n");
    }
    let summary = ClassifySummary {
        accuracy: cv.accuracy,
        labels,
        confusion: &cv.confusion.counts,
        fold_accuracies: &cv.fold_accuracies,
        samples_per_class: pairs.iter().map(|(l, p)| (l.as_str(), p.len())).collect(),
    };
    let mut out = OutputDir::create(&a.out)?;
    out.write("confusion.csv", confusion.as_bytes())?;
    out.write("folds.csv", folds.as_bytes())?;
    out.write_json("summary.json", &summary)?;
    out.finish("classify", a)
}

#[derive(Args, Serialize)]
pub struct SpatialArgs {
    /// Field as a CSV matrix, or raw little-endian f64 values when --meta is given
    #[arg(long)]
    field: PathBuf,
    /// JSON sidecar {"nx", "ny", "cell_size", "periodic"} for a binary field
    #[arg(long)]
    meta: Option<PathBuf>,
    /// Cell size of a CSV field in physical units
    #[arg(long, default_value_t = 1.0, conflicts_with = "meta")]
    cell_size: f64,
    /// Treat a CSV field as non-periodic
    #[arg(long, conflicts_with = "meta")]
    non_periodic: bool,
    /// Cells with values above this are part of a structure
    #[arg(long, default_value_t = 0.0)]
    threshold: f64,
    /// Smallest component kept, in cells
    #[arg(long, default_value_t = 3)]
    min_size: usize,
    /// Cell connectivity, 4 or 8
    #[arg(long, default_value_t = 4)]
    connectivity: u8,
    /// centroid, maxval or random:<rate>
    #[arg(long, default_value = "centroid")]
    represent: String,
    /// Baseline intensity: `auto` (points per unit area) or a number
    #[arg(long, default_value = "auto")]
    lambda_baseline: String,
    /// Poisson realizations in the baseline
    #[arg(long, default_value_t = 100)]
    realizations: usize,
    /// Contour for both degrees
    #[arg(long, default_value = "standard")]
    contour: String,
    /// Ignore periodicity in nearest-neighbor distances
    #[arg(long)]
    planar_nn: bool,
    /// Radii sampled for the nearest-neighbor index
    #[arg(long, default_value_t = 1000)]
    r_grid: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
}

fn read_field(a: &SpatialArgs) -> Result<GridField> {
    let field = match &a.meta {
        Some(meta) => {
            let m: io::GridMeta = serde_json::from_str(&read_string(meta)?)
                .with_context(|| meta.display().to_string())?;
            let bytes =
                fs::read(&a.field).with_context(|| format!("cannot read {}", a.field.display()))?;
            io::read_grid_binary(&bytes, &m)
        }
        None => {
            ensure!(
                a.cell_size > 0.0,
                "--cell-size must be positive, got {}",
                a.cell_size
            );
            io::read_grid_csv(open(&a.field)?, a.cell_size, !a.non_periodic)
        }
    };
    field.with_context(|| a.field.display().to_string())
}

fn write_cdfs(out: &mut OutputDir, prefix: &str, c: &PersistenceCdfs) -> Result<()> {
    out.write(
        &format!("{prefix}_h0.csv"),
        io::cdf_to_csv(&c.h0).as_bytes(),
    )?;
    out.write(
        &format!("{prefix}_h1.csv"),
        io::cdf_to_csv(&c.h1).as_bytes(),
    )
}

pub fn spatial(a: &SpatialArgs) -> Result<()> {
    ensure!(
        a.threshold >= 0.0,
        "--threshold must be >= 0, got {}",
        a.threshold
    );
    ensure!(a.realizations >= 1, "--realizations must be at least 1");
    let cfg = FieldConfig {
        threshold: a.threshold,
        min_size: a.min_size,
        connectivity: match a.connectivity {
            4 => Connectivity::Four,
            8 => Connectivity::Eight,
            c => bail!("--connectivity must be 4 or 8, got {c}"),
        },
        representation: a
            .represent
            .parse::<Representation>()
            .with_context(|| format!("--represent `{}`", a.represent))?,
        baseline_intensity: match a.lambda_baseline.as_str() {
            "auto" => BaselineIntensity::Auto,
            s => match s.parse::<f64>() {
                Ok(l) if l > 0.0 && l.is_finite() => BaselineIntensity::Fixed(l),
                _ => bail!("--lambda-baseline must be `auto` or a positive number, got `{s}`"),
            },
        },
        realizations: a.realizations,
        contour: parse_contour(&a.contour, "--contour")?,
        planar_nn: a.planar_nn,
        r_grid_size: a.r_grid,
        seed: a.seed,
    };
    let field = read_field(a)?;
    let analysis = spatial::analyze_field(&field, &cfg)?;

    let mut points = String::from("x,y\n");
    for p in analysis.points.points() {
        points += &format!("{},{}\n", p[0], p[1]);
    }
    let mut out = OutputDir::create(&a.out)?;
    out.write_json("report.json", &analysis.report)?;
    out.write("points.csv", points.as_bytes())?;
    if let Some(c) = &analysis.field_cdfs {
        write_cdfs(&mut out, "g_ph", c)?;
    }
    if let Some(c) = &analysis.baseline_cdfs {
        write_cdfs(&mut out, "baseline", c)?;
    }
    out.finish("spatial", a)
}

#[derive(Args, Serialize)]
pub struct BaselineArgs {
    /// Intensity, points per unit area
    #[arg(long)]
    lambda: f64,
    /// Domain extents Lx,Ly of the flat torus
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [1.0, 1.0])]
    domain: Vec<f64>,
    /// Number of realizations
    #[arg(long, default_value_t = 100)]
    realizations: usize,
    /// Contour for both degrees
    #[arg(long, default_value = "standard")]
    contour: String,
    /// Same seed as `spatial --seed` reproduces that command's baseline
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
}

pub fn poisson_baseline(a: &BaselineArgs) -> Result<()> {
    ensure!(a.domain.len() == 2, "--domain takes two extents Lx,Ly");
    ensure!(a.realizations >= 1, "--realizations must be at least 1");
    ensure!(
        a.lambda > 0.0 && a.lambda.is_finite(),
        "--lambda must be positive, got {}",
        a.lambda
    );
    let contour = parse_contour(&a.contour, "--contour")?;
    let base = spatial::csr_baseline(
        a.lambda,
        (a.domain[0], a.domain[1]),
        a.realizations,
        &contour,
        spatial::baseline_seed(a.seed),
    )?;
    let mut out = OutputDir::create(&a.out)?;
    write_cdfs(&mut out, "baseline", &base)?;
    out.finish("poisson-baseline", a)
}
