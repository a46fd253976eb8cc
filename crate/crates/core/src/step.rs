//! Right-continuous step functions on `[0, inf)`.

use crate::error::{Error, Result};

/// `values[0]` on `[0, breakpoints[0])`, `values[i]` on
/// `[breakpoints[i-1], breakpoints[i])`, and the last value from the last
/// breakpoint on. Adjacent values always differ.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    /// Validates breakpoints (finite, strictly increasing, > 0) and merges
    /// adjacent equal values.
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidStepFunction(format!(
                "{} values for {} breakpoints",
                values.len(),
                breakpoints.len()
            )));
        }
        if breakpoints.first().is_some_and(|&b| !(b > 0.0))
            || breakpoints.windows(2).any(|w| !(w[0] < w[1]))
            || breakpoints.iter().any(|b| !b.is_finite())
        {
            return Err(Error::InvalidStepFunction(
                "breakpoints must be finite, positive and strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidStepFunction("values must be finite".into()));
        }
        Ok(Self::merged(breakpoints, values))
    }

    pub fn constant(value: f64) -> Self {
        Self {
            breakpoints: Vec::new(),
            values: vec![value],
        }
    }

    pub(crate) fn merged(breakpoints: Vec<f64>, values: Vec<f64>) -> Self {
        let mut bps = Vec::with_capacity(breakpoints.len());
        let mut vals = Vec::with_capacity(values.len());
        vals.push(values[0]);
        for (b, v) in breakpoints.into_iter().zip(values.into_iter().skip(1)) {
            if v != *vals.last().unwrap() {
                bps.push(b);
                vals.push(v);
            }
        }
        Self {
            breakpoints: bps,
            values: vals,
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn initial(&self) -> f64 {
        self.values[0]
    }

    /// Value as `t -> inf`.
    pub fn tail(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Value at `t`; `t < 0` evaluates as `t = 0`.
    pub fn eval(&self, t: f64) -> f64 {
        self.values[self.breakpoints.partition_point(|&b| b <= t)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> StepFunction {
        Self::merged(
            self.breakpoints.clone(),
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }

    pub fn is_non_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn is_non_decreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }
}

/// Sorted union of the breakpoints of several functions.
pub fn merged_grid<'a>(fs: impl IntoIterator<Item = &'a StepFunction>) -> Vec<f64> {
    let mut grid: Vec<f64> = fs
        .into_iter()
        .flat_map(|f| f.breakpoints.iter().copied())
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Pointwise arithmetic mean; values are summed in input order, then divided.
pub fn pointwise_mean(fs: &[&StepFunction]) -> Result<StepFunction> {
    if fs.is_empty() {
        return Err(Error::Empty("pointwise mean of no functions"));
    }
    let grid = merged_grid(fs.iter().copied());
    let n = fs.len() as f64;
    let mean_at = |t: f64| fs.iter().map(|f| f.eval(t)).sum::<f64>() / n;
    let mut values = Vec::with_capacity(grid.len() + 1);
    values.push(mean_at(0.0));
    values.extend(grid.iter().map(|&t| mean_at(t)));
    Ok(StepFunction::merged(grid, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_is_right_continuous() {
        let f = StepFunction::new(vec![1.0, 2.0], vec![3.0, 2.0, 0.0]).unwrap();
        assert_eq!(f.eval(0.0), 3.0);
        assert_eq!(f.eval(0.999), 3.0);
        assert_eq!(f.eval(1.0), 2.0);
        assert_eq!(f.eval(2.0), 0.0);
        assert_eq!(f.eval(1e9), 0.0);
        assert_eq!(f.tail(), 0.0);
    }

    #[test]
    fn equal_neighbours_merge() {
        let f = StepFunction::new(vec![1.0, 2.0], vec![3.0, 3.0, 0.0]).unwrap();
        assert_eq!(f.breakpoints(), &[2.0]);
        assert_eq!(f.values(), &[3.0, 0.0]);
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(StepFunction::new(vec![0.0], vec![1.0, 0.0]).is_err());
        assert!(StepFunction::new(vec![2.0, 1.0], vec![1.0, 0.5, 0.0]).is_err());
        assert!(StepFunction::new(vec![1.0], vec![1.0]).is_err());
    }

    #[test]
    fn mean_merges_grids() {
        let f = StepFunction::new(vec![1.0], vec![2.0, 0.0]).unwrap();
        let g = StepFunction::new(vec![2.0], vec![4.0, 0.0]).unwrap();
        let m = pointwise_mean(&[&f, &g]).unwrap();
        assert_eq!(m.breakpoints(), &[1.0, 2.0]);
        assert_eq!(m.values(), &[3.0, 2.0, 0.0]);
        assert!(pointwise_mean(&[]).is_err());
    }
}
