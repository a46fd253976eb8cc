//! Text and binary formats.
//!
//! * Point clouds: CSV, one point per row. A non-numeric first row is a header.
//! * Distance matrices: lower-triangular text, whitespace separated; row `i`
//!   holds `d(i, 0) .. d(i, i-1)`. The empty row 0 may be omitted.
//! * Densities: two-column CSV `x, f(x)`.
//! * Barcodes: JSON `{"max_scale": s, "h0": [[b, d], ...], "h1": [...]}` with
//!   `null` deaths for essential bars; stems as `b d-b` lines.
//! * Stable ranks and CDFs: CSV `epsilon,value`, one row at 0 and one per
//!   breakpoint; the last row holds the value from there on.
//! * Grid fields: CSV matrix (row `y` is line `y`), or raw little-endian `f64`
//!   row-major with a JSON sidecar `{"nx", "ny", "cell_size", "periodic"}`.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::complex::{DissimilarityMatrix, PointCloud};
use crate::contour::DensitySpec;
use crate::error::{Error, Result};
use crate::homology::{Bar, Barcode};
use crate::spatial::{Cdf, GridField};
use crate::stablerank::StableRank;
use crate::step::StepFunction;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Numeric CSV rows with their line numbers.
fn read_numeric_csv<R: Read>(reader: R) -> Result<Vec<(usize, Vec<f64>)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = rec.position().map_or(k + 1, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => rows.push((line, v)),
            Err(_) if rows.is_empty() && k == 0 => continue,
            Err(e) => {
                return Err(parse_err(
                    line,
                    format!("{e}: `{}`", rec.iter().collect::<Vec<_>>().join(",")),
                ))
            }
        }
    }
    Ok(rows)
}

pub fn read_point_cloud<R: Read>(reader: R) -> Result<PointCloud> {
    let rows = read_numeric_csv(reader)?;
    if rows.is_empty() {
        return Err(Error::Empty("no points"));
    }
    let dim = rows[0].1.len();
    if let Some((line, r)) = rows.iter().find(|(_, r)| r.len() != dim) {
        return Err(parse_err(
            *line,
            format!("expected {dim} columns, found {}", r.len()),
        ));
    }
    PointCloud::new(rows.into_iter().map(|(_, r)| r).collect())
}

pub fn read_lower_triangular<R: Read>(mut reader: R) -> Result<DissimilarityMatrix> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let mut lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .collect();
    while lines.last().is_some_and(|(_, l)| l.is_empty()) {
        lines.pop();
    }
    if lines.is_empty() {
        return Err(Error::Empty("no points"));
    }
    let mut rows: Vec<Vec<f64>> = Vec::new();
    if !lines[0].1.is_empty() {
        rows.push(Vec::new());
    }
    for (line, l) in lines {
        let row = l
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|e| parse_err(line, format!("{e}: `{t}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != rows.len() {
            return Err(parse_err(
                line,
                format!(
                    "row {} must have {} entries, found {}",
                    rows.len(),
                    rows.len(),
                    row.len()
                ),
            ));
        }
        rows.push(row);
    }
    DissimilarityMatrix::from_lower_triangular(&rows)
}

pub fn read_density<R: Read>(reader: R) -> Result<DensitySpec> {
    let rows = read_numeric_csv(reader)?;
    if let Some((line, _)) = rows.iter().find(|(_, r)| r.len() != 2) {
        return Err(parse_err(*line, "density rows need exactly two columns"));
    }
    let (grid, values) = rows.into_iter().map(|(_, r)| (r[0], r[1])).unzip();
    DensitySpec::new(grid, values, None)
}

#[derive(Debug, Serialize, Deserialize)]
struct BarcodeJson {
    max_scale: f64,
    h0: Vec<(f64, Option<f64>)>,
    h1: Vec<(f64, Option<f64>)>,
}

pub fn barcode_to_json(bc: &Barcode) -> String {
    let degree = |k: usize| {
        bc.degree(k)
            .iter()
            .map(|b| (b.birth, (!b.is_essential()).then_some(b.death)))
            .collect()
    };
    let json = BarcodeJson {
        max_scale: bc.max_scale(),
        h0: degree(0),
        h1: degree(1),
    };
    serde_json::to_string_pretty(&json).expect("barcode serializes") + "\n"
}

pub fn barcode_from_json(s: &str) -> Result<Barcode> {
    let json: BarcodeJson =
        serde_json::from_str(s).map_err(|e| parse_err(e.line(), e.to_string()))?;
    let bars = [(0, json.h0), (1, json.h1)]
        .into_iter()
        .flat_map(|(k, bars)| {
            bars.into_iter().map(move |(b, d)| Bar {
                birth: b,
                death: d.unwrap_or(f64::INFINITY),
                degree: k,
            })
        });
    Barcode::new(bars.collect::<Vec<_>>(), json.max_scale)
}

/// `birth length` per bar; essential bars have length `inf`.
pub fn stems(bc: &Barcode, degree: usize) -> String {
    bc.degree(degree)
        .iter()
        .map(|b| format!("{} {}\n", b.birth, b.death - b.birth))
        .collect()
}

fn step_to_csv(f: &StepFunction) -> String {
    let mut out = String::from("epsilon,value\n");
    out += &format!("0,{}\n", f.initial());
    for (b, v) in f.breakpoints().iter().zip(&f.values()[1..]) {
        out += &format!("{b},{v}\n");
    }
    out
}

fn step_from_csv<R: Read>(reader: R) -> Result<StepFunction> {
    let rows = read_numeric_csv(reader)?;
    let Some((first_line, first)) = rows.first() else {
        return Err(Error::Empty("step function has no rows"));
    };
    if let Some((line, _)) = rows.iter().find(|(_, r)| r.len() != 2) {
        return Err(parse_err(*line, "expected two columns `epsilon,value`"));
    }
    if first[0] != 0.0 {
        return Err(parse_err(*first_line, "first row must be at epsilon = 0"));
    }
    let breakpoints = rows[1..].iter().map(|(_, r)| r[0]).collect();
    let values = rows.iter().map(|(_, r)| r[1]).collect();
    StepFunction::new(breakpoints, values)
}

pub fn stable_rank_to_csv(s: &StableRank) -> String {
    step_to_csv(s.as_step())
}

pub fn stable_rank_from_csv<R: Read>(reader: R) -> Result<StableRank> {
    StableRank::from_step(step_from_csv(reader)?)
}

pub fn cdf_to_csv(c: &Cdf) -> String {
    step_to_csv(c.as_step()).replacen("epsilon", "r", 1)
}

/// Square CSV with a header row and a leading column of identifiers.
pub fn distance_matrix_to_csv(ids: &[String], m: &[Vec<f64>]) -> String {
    let mut out = format!("id,{}\n", ids.join(","));
    for (id, row) in ids.iter().zip(m) {
        let cells: Vec<String> = row.iter().map(|d| d.to_string()).collect();
        out += &format!("{id},{}\n", cells.join(","));
    }
    out
}

pub fn read_grid_csv<R: Read>(reader: R, cell_size: f64, periodic: bool) -> Result<GridField> {
    let rows = read_numeric_csv(reader)?;
    if rows.is_empty() {
        return Err(Error::Empty("grid has no rows"));
    }
    let nx = rows[0].1.len();
    if let Some((line, r)) = rows.iter().find(|(_, r)| r.len() != nx) {
        return Err(parse_err(
            *line,
            format!("expected {nx} columns, found {}", r.len()),
        ));
    }
    let ny = rows.len();
    GridField::new(
        nx,
        ny,
        cell_size,
        periodic,
        rows.into_iter().flat_map(|(_, r)| r).collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub nx: usize,
    pub ny: usize,
    pub cell_size: f64,
    pub periodic: bool,
}

pub fn read_grid_binary(bytes: &[u8], meta: &GridMeta) -> Result<GridField> {
    if bytes.len() != meta.nx * meta.ny * 8 {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: format!(
                "expected {} bytes, got {}",
                meta.nx * meta.ny * 8,
                bytes.len()
            ),
        });
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    GridField::new(meta.nx, meta.ny, meta.cell_size, meta.periodic, values)
}

pub fn grid_to_binary(f: &GridField) -> (Vec<u8>, GridMeta) {
    let bytes = f.values().iter().flat_map(|v| v.to_le_bytes()).collect();
    let meta = GridMeta {
        nx: f.nx(),
        ny: f.ny(),
        cell_size: f.cell_size(),
        periodic: f.periodic(),
    };
    (bytes, meta)
}
