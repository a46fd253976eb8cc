//! Contour functions `C(v, eps)`.
//!
//! A contour satisfies, for `v <= w` and `eps <= tau`,
//!
//! * `v <= C(v, eps) <= C(w, tau)`
//! * `C(C(v, eps), tau) <= C(v, eps + tau)`
//!
//! Density contours are built from a sampled density `f > 0`. The cumulative
//! integral `F(y) = int_0^y f` is taken piecewise linear: node values are
//! trapezoid sums and `f` continues as a constant past the last node. Then
//! `C(v, eps) = F(F^-1(v) + eps)`, and both `F` and `F^-1` are exact on every
//! linear piece.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};

/// Absolute slack (scaled by magnitude) used by [`check_axioms`].
pub const AXIOM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DensitySpec {
    grid: Vec<f64>,
    values: Vec<f64>,
    extension: f64,
}

impl DensitySpec {
    /// `grid` must start at 0 and increase strictly; `values` must be positive.
    /// The density beyond the last node defaults to the last value.
    pub fn new(grid: Vec<f64>, values: Vec<f64>, extension: Option<f64>) -> Result<Self> {
        if grid.is_empty() || grid.len() != values.len() {
            return Err(Error::InvalidDensity(
                "grid and values must be nonempty and of equal length".into(),
            ));
        }
        if grid[0] != 0.0 {
            return Err(Error::InvalidDensity("grid must start at 0".into()));
        }
        if grid.windows(2).any(|w| !(w[0] < w[1])) || grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidDensity(
                "grid must be strictly increasing".into(),
            ));
        }
        if let Some(bad) = values.iter().find(|&&f| !(f > 0.0) || !f.is_finite()) {
            return Err(Error::InvalidDensity(format!(
                "density sample {bad} is not strictly positive"
            )));
        }
        let extension = extension.unwrap_or(*values.last().unwrap());
        if !(extension > 0.0) || !extension.is_finite() {
            return Err(Error::InvalidDensity(format!(
                "extension value {extension} is not strictly positive"
            )));
        }
        Ok(Self {
            grid,
            values,
            extension,
        })
    }

    /// Constant density `value` on `[0, len]`.
    pub fn constant(value: f64, len: f64) -> Result<Self> {
        Self::new(vec![0.0, len], vec![value, value], None)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn extension(&self) -> f64 {
        self.extension
    }
}

/// Piecewise-linear cumulative integral of a [`DensitySpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityContour {
    spec: DensitySpec,
    /// `cumulative[j] = F(grid[j])`.
    cumulative: Vec<f64>,
}

impl DensityContour {
    fn new(spec: DensitySpec) -> Self {
        let mut cumulative = Vec::with_capacity(spec.grid.len());
        cumulative.push(0.0);
        for j in 1..spec.grid.len() {
            let h = spec.grid[j] - spec.grid[j - 1];
            let area = 0.5 * h * (spec.values[j] + spec.values[j - 1]);
            cumulative.push(cumulative[j - 1] + area);
        }
        Self { spec, cumulative }
    }

    pub fn spec(&self) -> &DensitySpec {
        &self.spec
    }

    /// `F(y)` for `y >= 0`.
    pub fn integral(&self, y: f64) -> f64 {
        let grid = &self.spec.grid;
        let last = grid.len() - 1;
        if y >= grid[last] {
            return self.cumulative[last] + self.spec.extension * (y - grid[last]);
        }
        // grid[j] <= y < grid[j + 1]
        let j = grid.partition_point(|&x| x <= y) - 1;
        let t = (y - grid[j]) / (grid[j + 1] - grid[j]);
        self.cumulative[j] + t * (self.cumulative[j + 1] - self.cumulative[j])
    }

    /// The unique `y >= 0` with `F(y) = v`.
    pub fn inverse(&self, v: f64) -> f64 {
        let grid = &self.spec.grid;
        let cum = &self.cumulative;
        let last = grid.len() - 1;
        if v >= cum[last] {
            return grid[last] + (v - cum[last]) / self.spec.extension;
        }
        let j = cum.partition_point(|&c| c <= v) - 1;
        let t = (v - cum[j]) / (cum[j + 1] - cum[j]);
        grid[j] + t * (grid[j + 1] - grid[j])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Contour {
    /// `v + eps`
    Standard,
    /// `v + eps^p`
    Power(f64),
    /// `r^eps * v`
    Multiplicative(f64),
    /// `v + int_y^{y+eps} f` with `F(y) = v`
    Density(Arc<DensityContour>),
}

impl Contour {
    pub fn power(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(invalid("power", format!("exponent {p} must be >= 1")));
        }
        Ok(Contour::Power(p))
    }

    pub fn multiplicative(r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(invalid("mult", format!("base {r} must be > 0")));
        }
        Ok(Contour::Multiplicative(r))
    }

    pub fn from_density(spec: DensitySpec) -> Self {
        Contour::Density(Arc::new(DensityContour::new(spec)))
    }

    pub fn evaluate(&self, v: f64, eps: f64) -> Result<f64> {
        if !(v >= 0.0) || !(eps >= 0.0) {
            return Err(Error::NegativeContourInput { v, eps });
        }
        Ok(self.apply(v, eps))
    }

    /// Unchecked evaluation; inputs are assumed nonnegative.
    #[inline]
    pub(crate) fn apply(&self, v: f64, eps: f64) -> f64 {
        match self {
            Contour::Standard => v + eps,
            Contour::Power(p) => v + eps.powf(*p),
            Contour::Multiplicative(r) => r.powf(eps) * v,
            Contour::Density(d) => d.integral(d.inverse(v) + eps),
        }
    }

    /// `sup { eps >= 0 : C(birth, eps) < death }`; `None` when `C(birth, 0) >= death`.
    /// May be infinite, e.g. a multiplicative contour at `birth = 0`.
    pub fn critical_epsilon(&self, birth: f64, death: f64) -> Option<f64> {
        if !(self.apply(birth, 0.0) < death) {
            return None;
        }
        let eps = match self {
            Contour::Standard => death - birth,
            Contour::Power(p) => (death - birth).powf(1.0 / p),
            Contour::Multiplicative(r) => {
                if *r > 1.0 && birth > 0.0 {
                    (death / birth).ln() / r.ln()
                } else {
                    f64::INFINITY
                }
            }
            Contour::Density(d) => d.inverse(death) - d.inverse(birth),
        };
        Some(eps)
    }

    pub fn check_axioms(&self, samples: &[AxiomSample]) -> Result<bool> {
        check_axioms(|v, e| self.apply(v, e), samples)
    }
}

impl fmt::Display for Contour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Contour::Standard => write!(f, "standard"),
            Contour::Power(p) => write!(f, "power:{p}"),
            Contour::Multiplicative(r) => write!(f, "mult:{r}"),
            Contour::Density(_) => write!(f, "density"),
        }
    }
}

/// Parses `standard`, `power:<p>` and `mult:<r>`. Density contours need a
/// file and are built with [`Contour::from_density`].
impl FromStr for Contour {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let num = |x: &str, name: &'static str| {
            x.parse::<f64>()
                .map_err(|_| invalid(name, format!("`{x}` is not a number")))
        };
        match s.split_once(':') {
            None if s == "standard" => Ok(Contour::Standard),
            Some(("power", p)) => Contour::power(num(p, "power")?),
            Some(("mult", r)) => Contour::multiplicative(num(r, "mult")?),
            _ => Err(invalid("contour", format!("unknown contour `{s}`"))),
        }
    }
}

/// A test point `(v, w, eps, tau)` with `v <= w` and `eps <= tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxiomSample {
    pub v: f64,
    pub w: f64,
    pub eps: f64,
    pub tau: f64,
}

impl AxiomSample {
    pub fn new(v: f64, w: f64, eps: f64, tau: f64) -> Self {
        Self { v, w, eps, tau }
    }
}

fn le(a: f64, b: f64) -> bool {
    a <= b + AXIOM_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

/// Checks both contour axioms for an arbitrary two-argument function.
pub fn check_axioms<F: Fn(f64, f64) -> f64>(c: F, samples: &[AxiomSample]) -> Result<bool> {
    for s in samples {
        if !(s.v <= s.w) || !(s.eps <= s.tau) {
            return Err(Error::MalformedSample(format!(
                "need v <= w and eps <= tau, got {s:?}"
            )));
        }
    }
    Ok(samples.iter().all(|s| {
        let cve = c(s.v, s.eps);
        le(s.v, cve) && le(cve, c(s.w, s.tau)) && le(c(cve, s.tau), c(s.v, s.eps + s.tau))
    }))
}
