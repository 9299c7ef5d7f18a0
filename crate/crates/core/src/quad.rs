//! Repeated cumulative quadrature from the center of a uniform grid.
//!
//! This is the black-box counterpart of the series route: functions are only
//! known through samples at `center + i h`, `i = -M..=M`, and each iteration
//! integrates from the center outwards in both directions.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::series::{SeriesError, TaylorSeries};
use crate::text::{self, ParseError};

/// Cumulative integration needs this many samples on each side of the center.
pub const MIN_SAMPLES_PER_SIDE: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("invalid grid: {0}")]
    Invalid(&'static str),
    #[error("grid has {0} samples per side, need at least {MIN_SAMPLES_PER_SIDE}")]
    InsufficientGrid(usize),
    #[error("index 0 is the center, where every iterated ratio is 0/0")]
    RemovablePoint,
    #[error("grid index {index} outside -{half}..={half}")]
    IndexOutOfRange { index: isize, half: usize },
    #[error("grids differ in center, step or sample count")]
    IncompatibleGrids,
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Samples at `center + i * step` for `i = -M..=M`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    center: f64,
    step: f64,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(center: f64, step: f64, values: Vec<f64>) -> Result<Self, QuadError> {
        if !center.is_finite() {
            return Err(QuadError::Invalid("center must be finite"));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(QuadError::Invalid("step must be finite and positive"));
        }
        if values.len().is_multiple_of(2) {
            return Err(QuadError::Invalid("sample count must be odd"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(QuadError::Invalid("samples must be finite"));
        }
        Ok(Self {
            center,
            step,
            values,
        })
    }

    /// Samples `s` at `center + i h`, `i = -m..=m`.
    pub fn from_series(s: &TaylorSeries, m: usize, h: f64) -> Result<Self, QuadError> {
        if !(h.is_finite() && h > 0.0) {
            return Err(QuadError::Invalid("step must be finite and positive"));
        }
        let c = s.center();
        let values = (-(m as isize)..=m as isize)
            .map(|i| s.eval(c + i as f64 * h))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(c, h, values)
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `M`, the number of samples on each side of the center.
    pub fn half_width(&self) -> usize {
        self.values.len() / 2
    }

    pub fn x(&self, index: isize) -> f64 {
        self.center + index as f64 * self.step
    }

    pub fn value(&self, index: isize) -> Result<f64, QuadError> {
        let half = self.half_width();
        if index.unsigned_abs() > half {
            return Err(QuadError::IndexOutOfRange { index, half });
        }
        Ok(self.values[(index + half as isize) as usize])
    }

    fn compatible(&self, other: &Self) -> bool {
        self.center == other.center
            && self.step == other.step
            && self.values.len() == other.values.len()
    }

    /// `v(x) = integral of u from center to x` at every grid point.
    ///
    /// Even offsets use composite Simpson from the center. Odd offsets take
    /// the previous even value plus a trapezoid over the last step, corrected
    /// by the second difference `-(u[i] - 2u[i-1] + u[i-2]) h / 12`, which
    /// makes the last step exact for quadratics. The negative side is the
    /// same scheme on the mirrored samples with the sign flipped, so odd and
    /// even integrands produce exactly even and odd results.
    pub fn cumulative_integral(&self) -> Result<Self, QuadError> {
        let m = self.half_width();
        if m < MIN_SAMPLES_PER_SIDE {
            return Err(QuadError::InsufficientGrid(m));
        }
        let forward = &self.values[m..];
        let backward: Vec<f64> = self.values[..=m].iter().rev().copied().collect();
        // Sample one step behind the center in each direction.
        let pos = one_sided(forward, self.values[m - 1], self.step);
        let neg = one_sided(&backward, self.values[m + 1], self.step);

        let mut values = Vec::with_capacity(self.values.len());
        values.extend(neg.iter().skip(1).rev().map(|v| -v));
        values.extend(pos);
        Ok(Self {
            center: self.center,
            step: self.step,
            values,
        })
    }

    pub fn iterated_integral(&self, n: usize) -> Result<Self, QuadError> {
        let mut out = self.clone();
        for _ in 0..n {
            out = out.cumulative_integral()?;
        }
        Ok(out)
    }

    /// Pointwise `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self, QuadError> {
        if !self.compatible(other) {
            return Err(QuadError::IncompatibleGrids);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(u, w)| a * u + b * w)
            .collect();
        Self::new(self.center, self.step, values)
    }
}

/// Cumulative integral over `u[0..]` starting at `u[0]`; `behind` is the
/// sample at offset `-1`, used by the first odd step.
fn one_sided(u: &[f64], behind: f64, h: f64) -> Vec<f64> {
    let mut v = vec![0.0; u.len()];
    for i in 1..u.len() {
        let back2 = if i >= 2 { u[i - 2] } else { behind };
        v[i] = if i % 2 == 0 {
            v[i - 2] + h / 3.0 * (u[i - 2] + 4.0 * u[i - 1] + u[i])
        } else {
            v[i - 1] + h / 12.0 * (-back2 + 8.0 * u[i - 1] + 5.0 * u[i])
        };
    }
    v
}

/// `I_n^f / I_n^g` at grid offset `index` after `n` cumulative integrations.
pub fn iterated_ratio_numeric(
    fu: &GridFunction,
    gu: &GridFunction,
    index: isize,
    n: usize,
) -> Result<f64, QuadError> {
    if !fu.compatible(gu) {
        return Err(QuadError::IncompatibleGrids);
    }
    if index == 0 {
        return Err(QuadError::RemovablePoint);
    }
    fu.value(index)?;
    let fi = fu.iterated_integral(n)?;
    let gi = gu.iterated_integral(n)?;
    Ok(fi.value(index)? / gi.value(index)?)
}

/// All ratios `I_n^f / I_n^g` over the punctured grid, indices `-M..=M`
/// without 0.
pub fn iterated_ratios_numeric(
    fu: &GridFunction,
    gu: &GridFunction,
    n: usize,
) -> Result<Vec<(isize, f64)>, QuadError> {
    if !fu.compatible(gu) {
        return Err(QuadError::IncompatibleGrids);
    }
    let fi = fu.iterated_integral(n)?;
    let gi = gu.iterated_integral(n)?;
    let m = fu.half_width() as isize;
    (-m..=m)
        .filter(|&i| i != 0)
        .map(|i| Ok((i, fi.value(i)? / gi.value(i)?)))
        .collect()
}

impl FromStr for GridFunction {
    type Err = QuadError;

    /// Parses `center <x0>`, `step <h>`, `values <v_-M> ... <v_M>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = text::content_lines(s);
        let center = text::keyed_scalar(&mut lines, "center")?;
        let step = text::keyed_scalar(&mut lines, "step")?;
        let values = text::keyed_values(&mut lines, "values")?;
        text::expect_end(&mut lines)?;
        Self::new(center, step, values)
    }
}

impl fmt::Display for GridFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "center {}", text::fmt_decimal(self.center))?;
        writeln!(f, "step {}", text::fmt_decimal(self.step))?;
        write!(f, "values")?;
        for v in &self.values {
            write!(f, " {}", text::fmt_decimal(*v))?;
        }
        writeln!(f)
    }
}
