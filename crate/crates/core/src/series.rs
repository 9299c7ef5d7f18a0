//! Truncated Taylor series around a center point.
//!
//! A [`TaylorSeries`] stores Taylor coefficients `a_j = f^(j)(x0) / j!` on a
//! window `[x0 - R, x0 + R]`. The coefficient list is taken as the whole
//! function: degrees above the truncation order are zero. This makes the
//! antiderivative operator exact, so the n-fold antiderivative from `x0` is
//! available in closed form on the coefficients.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::text::{self, ParseError};

/// Default truncation order used when a series is generated from a closed form.
pub const DEFAULT_ORDER: usize = 64;

/// Default relative tolerance for "is this coefficient zero".
pub const DEFAULT_ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("invalid series: {0}")]
    Invalid(&'static str),
    #[error("x = {x} lies outside the window [{lo}, {hi}]")]
    OutOfWindow { x: f64, lo: f64, hi: f64 },
    #[error("series of order 0 has no derivative")]
    DegenerateOrder,
    #[error("invalid tail request: {0}")]
    InvalidTail(&'static str),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Truncated power series `sum_j a_j (x - center)^j` valid on
/// `|x - center| <= radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorSeries {
    center: f64,
    radius: f64,
    coeffs: Vec<f64>,
}

// Points produced as `center + i * h` can land an ulp or two past the window
// edge; accept those.
fn within(dist: f64, radius: f64) -> bool {
    dist <= radius * (1.0 + 8.0 * f64::EPSILON)
}

impl TaylorSeries {
    pub fn new(center: f64, radius: f64, coeffs: Vec<f64>) -> Result<Self, SeriesError> {
        if !center.is_finite() {
            return Err(SeriesError::Invalid("center must be finite"));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(SeriesError::Invalid("radius must be finite and positive"));
        }
        if coeffs.is_empty() {
            return Err(SeriesError::Invalid("coefficient list is empty"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(SeriesError::Invalid("coefficients must be finite"));
        }
        Ok(Self {
            center,
            radius,
            coeffs,
        })
    }

    /// Series with Taylor coefficients `1/j!`, i.e. `exp(x - center)`
    /// truncated at degree `order`.
    pub fn exp(center: f64, radius: f64, order: usize) -> Result<Self, SeriesError> {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut c = 1.0;
        for j in 0..=order {
            if j > 0 {
                c /= j as f64;
            }
            coeffs.push(c);
        }
        Self::new(center, radius, coeffs)
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Truncation degree `N`; there are `N + 1` coefficients.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of degree `j`, zero beyond the truncation order.
    pub fn coeff(&self, j: usize) -> f64 {
        self.coeffs.get(j).copied().unwrap_or(0.0)
    }

    /// Same coefficients on a narrower (or equal) window.
    pub fn with_radius(&self, radius: f64) -> Result<Self, SeriesError> {
        Self::new(self.center, radius, self.coeffs.clone())
    }

    pub fn contains(&self, x: f64) -> bool {
        within((x - self.center).abs(), self.radius)
    }

    fn check_window(&self, x: f64) -> Result<f64, SeriesError> {
        let dx = x - self.center;
        if x.is_finite() && within(dx.abs(), self.radius) {
            Ok(dx)
        } else {
            Err(SeriesError::OutOfWindow {
                x,
                lo: self.center - self.radius,
                hi: self.center + self.radius,
            })
        }
    }

    /// Horner evaluation of the series at `x`.
    pub fn eval(&self, x: f64) -> Result<f64, SeriesError> {
        let dx = self.check_window(x)?;
        Ok(horner(&self.coeffs, dx))
    }

    pub fn derivative(&self) -> Result<Self, SeriesError> {
        if self.coeffs.len() < 2 {
            return Err(SeriesError::DegenerateOrder);
        }
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(j, a)| (j + 1) as f64 * a)
            .collect();
        Ok(Self {
            center: self.center,
            radius: self.radius,
            coeffs,
        })
    }

    /// `x -> integral from center to x`; vanishes at the center.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(0.0);
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(j, a)| a / (j + 1) as f64),
        );
        Self {
            center: self.center,
            radius: self.radius,
            coeffs,
        }
    }

    /// The n-fold antiderivative with lower limit `center`, built in one pass:
    /// degree `j + n` receives `a_j * j! / (j + n)!`.
    ///
    /// The factorial ratio is a running product of `1/(j+1) ... 1/(j+n)`.
    /// For large `n` the high-degree coefficients underflow to zero; use
    /// [`TaylorSeries::scaled_iterated_eval`] for ratios at large `n`.
    pub fn iterated_antiderivative(&self, n: usize) -> Self {
        if n == 0 {
            return self.clone();
        }
        let mut coeffs = vec![0.0; self.coeffs.len() + n];
        // w = 0! / n!, then w_j = w_{j-1} * j / (j + n).
        let mut w = (1..=n).fold(1.0, |acc, i| acc / i as f64);
        for (j, a) in self.coeffs.iter().enumerate() {
            if j > 0 {
                w *= j as f64 / (j + n) as f64;
            }
            coeffs[j + n] = a * w;
        }
        Self {
            center: self.center,
            radius: self.radius,
            coeffs,
        }
    }

    /// Evaluates the n-fold antiderivative with its leading scale removed.
    ///
    /// With `h = x - center` and all coefficients below `lead` treated as zero,
    /// returns
    ///
    /// ```text
    /// S_n(x) = sum_{j >= lead} a_j * w_{n,j} * h^(j - lead),
    /// w_{n,j} = prod_{i = lead+1}^{j} i / (i + n)
    /// ```
    ///
    /// so that `I_n(x) = lead! / (lead + n)! * h^(lead + n) * S_n(x)`. Two
    /// series sharing `lead` therefore have `I_n^f / I_n^g = S_n^f / S_n^g`,
    /// and `S_n` stays O(1) where `I_n` itself would underflow.
    pub fn scaled_iterated_eval(&self, n: usize, lead: usize, x: f64) -> Result<f64, SeriesError> {
        let dx = self.check_window(x)?;
        let mut weighted = Vec::with_capacity(self.coeffs.len().saturating_sub(lead));
        let mut w = 1.0;
        for j in lead..self.coeffs.len() {
            if j > lead {
                w *= j as f64 / (j + n) as f64;
            }
            if w == 0.0 {
                break;
            }
            weighted.push(self.coeffs[j] * w);
        }
        Ok(horner(&weighted, dx))
    }

    /// Smallest `j` with `|a_j| > tol * max_k |a_k|`, or `N + 1` when every
    /// coefficient is below the threshold (identically zero series).
    pub fn vanishing_order(&self, tol: f64) -> usize {
        let scale = self.coeffs.iter().fold(0.0_f64, |m, a| m.max(a.abs()));
        let threshold = tol * scale;
        self.coeffs
            .iter()
            .position(|a| a.abs() > threshold)
            .unwrap_or(self.coeffs.len())
    }

    /// Uniform bound `C` on the bracketed remainder
    ///
    /// ```text
    /// f^(K+2)(x0) h + sum_{j>=2} f^(K+1+j)(x0) / ((K+3+n)...(K+1+j+n)) h^j
    /// ```
    ///
    /// over `|h| <= r` and all `n >= 0`. The n = 0 denominators are the
    /// smallest, so summing absolute values with them bounds every `n`. In
    /// Taylor coefficients this is `(K+2)! * sum_{m>=1} |a_{K+1+m}| r^m`.
    ///
    /// `k` ranges over `-1..`; an exhausted tail (polynomial of degree
    /// `<= K+1`) gives exactly zero.
    pub fn tail_constant(&self, k: isize, r: f64) -> Result<f64, SeriesError> {
        if k < -1 {
            return Err(SeriesError::InvalidTail("vanishing order must be >= -1"));
        }
        if !(r.is_finite() && r > 0.0 && within(r, self.radius)) {
            return Err(SeriesError::InvalidTail(
                "window radius must satisfy 0 < r <= series radius",
            ));
        }
        let lead = (k + 1) as usize;
        let tail = self.coeffs.get(lead + 1..).unwrap_or(&[]);
        if tail.is_empty() {
            return Ok(0.0);
        }
        // sum_{m>=1} |a_{lead+m}| r^m = r * horner(|tail|, r)
        let abs: Vec<f64> = tail.iter().map(|a| a.abs()).collect();
        let sum = r * horner(&abs, r);
        let fact = (1..=lead + 1).fold(1.0, |acc, i| acc * i as f64);
        Ok(fact * sum)
    }

    /// Linear combination `alpha * self + beta * other` on the narrower window.
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self, SeriesError> {
        if self.center != other.center {
            return Err(SeriesError::Invalid("series centers differ"));
        }
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|j| alpha * self.coeff(j) + beta * other.coeff(j))
            .collect();
        Self::new(self.center, self.radius.min(other.radius), coeffs)
    }
}

pub(crate) fn horner(coeffs: &[f64], dx: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, a| acc * dx + a)
}

impl FromStr for TaylorSeries {
    type Err = SeriesError;

    /// Parses `center <x0>`, `radius <R>`, `coeffs <a0> ... <aN>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = text::content_lines(s);
        let center = text::keyed_scalar(&mut lines, "center")?;
        let radius = text::keyed_scalar(&mut lines, "radius")?;
        let coeffs = text::keyed_values(&mut lines, "coeffs")?;
        text::expect_end(&mut lines)?;
        Self::new(center, radius, coeffs)
    }
}

impl fmt::Display for TaylorSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "center {}", text::fmt_decimal(self.center))?;
        writeln!(f, "radius {}", text::fmt_decimal(self.radius))?;
        write!(f, "coeffs")?;
        for c in &self.coeffs {
            write!(f, " {}", text::fmt_decimal(*c))?;
        }
        writeln!(f)
    }
}
