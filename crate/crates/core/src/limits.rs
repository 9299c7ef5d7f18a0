//! Limits of `f/g` at a common zero by iterated integration.
//!
//! Given series `f`, `g` around `x0` whose coefficients vanish through
//! degree `K` with `g^(K+1)(x0) != 0`, the ratio of their n-fold
//! antiderivatives from `x0` tends to `f^(K+1)(x0) / g^(K+1)(x0)` uniformly
//! on the punctured window. Writing both antiderivatives in the scaled form
//! of [`TaylorSeries::scaled_iterated_eval`] gives
//!
//! ```text
//! I_n^f(x) / I_n^g(x) = (F + B_f(x, n) / (K+2+n)) / (G + B_g(x, n) / (K+2+n))
//! ```
//!
//! with `F`, `G` the (K+1)-th derivatives at `x0` and `|B| <= C` for a single
//! constant per function, which is where the `1/(K+2+n)` error rate and the
//! explicit bound in [`LimitProblem::error_bound`] come from.

use std::io::Write;

use thiserror::Error;

use crate::series::{SeriesError, TaylorSeries, DEFAULT_ZERO_TOL};

/// The bound is only reported once `eps <= BOUND_MARGIN * |G|`.
pub const BOUND_MARGIN: f64 = 0.5;

/// Smallest window, relative to the starting radius, that
/// [`LimitProblem::validate_window`] will shrink to.
const MIN_WINDOW_FRACTION: f64 = 1e-6;
const BISECTION_STEPS: usize = 48;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LimitError {
    #[error("series centers differ ({0} vs {1})")]
    IncompatibleCenters(f64, f64),
    #[error(
        "hypothesis violated: numerator vanishes to order {f_order} but denominator to order {g_order}; the ratio diverges"
    )]
    HypothesisViolation { f_order: usize, g_order: usize },
    #[error("denominator series is identically zero")]
    DegenerateDenominator,
    #[error("x = {0} is the expansion center, where every iterated ratio is 0/0")]
    RemovablePoint(f64),
    #[error("x = {x} lies outside the window of half-width {radius}")]
    OutOfWindow { x: f64, radius: f64 },
    #[error("no window above the minimum width keeps all derivatives nonvanishing")]
    NoValidWindow,
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Either a rigorous bound on `|I_n^f/I_n^g - L|` valid on the whole
/// punctured window, or a marker that `n` is still too small for the
/// denominator margin to be trusted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorBound {
    Valid(f64),
    NotYetValid { epsilon: f64 },
}

impl ErrorBound {
    pub fn value(self) -> Option<f64> {
        match self {
            ErrorBound::Valid(b) => Some(b),
            ErrorBound::NotYetValid { .. } => None,
        }
    }

    pub fn is_valid(self) -> bool {
        matches!(self, ErrorBound::Valid(_))
    }
}

/// A validated `(f, g)` pair sharing an expansion center.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitProblem {
    f: TaylorSeries,
    g: TaylorSeries,
    /// Index of the first non-vanishing coefficient of `g`, i.e. `K + 1`.
    lead: usize,
    radius: f64,
    limit: f64,
    tail_f: f64,
    tail_g: f64,
    /// `f - L g` is identically zero, so every ratio equals `L`.
    exact: bool,
    tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationOutcome {
    pub estimate: f64,
    pub n_used: usize,
    pub converged: bool,
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

impl LimitProblem {
    /// Detects `K` from `g`, checks that `f` vanishes at least as far, and
    /// zeroes the sub-tolerance coefficients below degree `K + 1` in both.
    ///
    /// Those coefficients are zero by hypothesis; leaving rounding noise in
    /// them would make `I_n^f / I_n^g` blow up as `n` grows.
    pub fn new(f: TaylorSeries, g: TaylorSeries, tol: f64) -> Result<Self, LimitError> {
        if f.center() != g.center() {
            return Err(LimitError::IncompatibleCenters(f.center(), g.center()));
        }
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(LimitError::InvalidArgument(
                "tolerance must be finite and >= 0",
            ));
        }
        let g_order = g.vanishing_order(tol);
        if g_order > g.order() {
            return Err(LimitError::DegenerateDenominator);
        }
        // An identically zero numerator vanishes to every order.
        let f_order = f.vanishing_order(tol);
        if f_order <= f.order() && f_order < g_order {
            return Err(LimitError::HypothesisViolation { f_order, g_order });
        }
        let lead = g_order;
        let f = zero_below(&f, lead)?;
        let g = zero_below(&g, lead)?;
        let limit = f.coeff(lead) / g.coeff(lead);
        let radius = f.radius().min(g.radius());
        let mut problem = Self {
            f,
            g,
            lead,
            radius,
            limit,
            tail_f: 0.0,
            tail_g: 0.0,
            exact: false,
            tol,
        };
        problem.refresh_derived()?;
        Ok(problem)
    }

    pub fn with_default_tol(f: TaylorSeries, g: TaylorSeries) -> Result<Self, LimitError> {
        Self::new(f, g, DEFAULT_ZERO_TOL)
    }

    fn refresh_derived(&mut self) -> Result<(), LimitError> {
        let k = self.k();
        self.tail_f = self.f.tail_constant(k, self.radius)?;
        self.tail_g = self.g.tail_constant(k, self.radius)?;
        let residual = self.f.combine(1.0, &self.g, -self.limit)?;
        self.exact = residual.coeffs().iter().all(|c| *c == 0.0);
        Ok(())
    }

    /// Same problem restricted to `[x0 - radius, x0 + radius]`.
    pub fn with_radius(&self, radius: f64) -> Result<Self, LimitError> {
        if !(radius.is_finite() && radius > 0.0 && radius <= self.radius) {
            return Err(LimitError::InvalidArgument(
                "radius must satisfy 0 < radius <= current radius",
            ));
        }
        let mut p = self.clone();
        p.radius = radius;
        p.refresh_derived()?;
        Ok(p)
    }

    pub fn numerator(&self) -> &TaylorSeries {
        &self.f
    }

    pub fn denominator(&self) -> &TaylorSeries {
        &self.g
    }

    pub fn center(&self) -> f64 {
        self.f.center()
    }

    /// Common vanishing order `K`; `-1` when `g(x0) != 0`.
    pub fn k(&self) -> isize {
        self.lead as isize - 1
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Tail constants `(C_f, C_g)` on the current window.
    pub fn tail_constants(&self) -> (f64, f64) {
        (self.tail_f, self.tail_g)
    }

    /// `f^(K+1)(x0) / g^(K+1)(x0)`.
    pub fn lhopital_limit(&self) -> f64 {
        self.limit
    }

    pub fn iterated_ratio(&self, x: f64, n: usize) -> Result<f64, LimitError> {
        self.check_point(x)?;
        let num = self.f.scaled_iterated_eval(n, self.lead, x)?;
        let den = self.g.scaled_iterated_eval(n, self.lead, x)?;
        Ok(num / den)
    }

    fn check_point(&self, x: f64) -> Result<(), LimitError> {
        let c = self.center();
        if x == c {
            return Err(LimitError::RemovablePoint(x));
        }
        let dist = (x - c).abs();
        if !(x.is_finite() && dist <= self.radius * (1.0 + 8.0 * f64::EPSILON)) {
            return Err(LimitError::OutOfWindow {
                x,
                radius: self.radius,
            });
        }
        Ok(())
    }

    /// With `eps = max(C_f, C_g) / (K+2+n)`:
    /// `(eps + |F/G| eps) / (|G| - eps)`, reported once `eps <= |G| / 2`.
    ///
    /// When `f - L g` vanishes identically the ratio is exactly `L` and the
    /// bound is zero for every `n`.
    pub fn error_bound(&self, n: usize) -> ErrorBound {
        if self.exact {
            return ErrorBound::Valid(0.0);
        }
        let scale = factorial(self.lead);
        let big_f = scale * self.f.coeff(self.lead);
        let big_g = (scale * self.g.coeff(self.lead)).abs();
        let eps = self.tail_f.max(self.tail_g) / (self.lead + 1 + n) as f64;
        if eps > BOUND_MARGIN * big_g {
            return ErrorBound::NotYetValid { epsilon: eps };
        }
        let ratio = (big_f / big_g).abs();
        ErrorBound::Valid((eps + ratio * eps) / (big_g - eps))
    }

    /// Iterates `n = 0, 1, ...` and stops at the first `n` whose error bound
    /// is at most `tol`. Falls back to the `n_max` ratio, flagged unconverged.
    pub fn limit_via_iteration(
        &self,
        x: f64,
        tol: f64,
        n_max: usize,
    ) -> Result<IterationOutcome, LimitError> {
        if tol.is_nan() || tol <= 0.0 {
            return Err(LimitError::InvalidArgument("tolerance must be positive"));
        }
        self.check_point(x)?;
        // The bound depends on n alone and is nonincreasing once valid, so the
        // smallest accepted n is found by bisection and only it needs a ratio.
        let accepts = |n: usize| matches!(self.error_bound(n), ErrorBound::Valid(b) if b <= tol);
        let (n_used, converged) = if accepts(n_max) {
            let (mut lo, mut hi) = (0, n_max);
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                if accepts(mid) {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            (lo, true)
        } else {
            (n_max, false)
        };
        Ok(IterationOutcome {
            estimate: self.iterated_ratio(x, n_used)?,
            n_used,
            converged,
        })
    }

    /// Largest `R' <= R` such that on `samples` points per side of `x0`
    /// every derivative of order `0..=K+1` of `f` and `g` is nonzero and
    /// keeps its sign. Shrinks by halving, then bisects back out.
    ///
    /// Only `g`'s condition is needed for the ratio to be defined; `f`'s is a
    /// hypothesis of the lemma that the convergence argument does not use,
    /// and is checked here as stated.
    pub fn validate_window(&self, samples: usize) -> Result<f64, LimitError> {
        if samples < 2 {
            return Err(LimitError::InvalidArgument("samples must be >= 2"));
        }
        let mut derivs = Vec::with_capacity(2 * (self.lead + 1));
        for s in [&self.f, &self.g] {
            let mut d = s.clone();
            for j in 0..=self.lead {
                if j > 0 {
                    d = match d.derivative() {
                        Ok(next) => next,
                        Err(_) => TaylorSeries::new(d.center(), d.radius(), vec![0.0])?,
                    };
                }
                derivs.push(d.clone());
            }
        }
        let ok = |r: f64| derivs.iter().all(|d| self.nonvanishing(d, r, samples));

        let full = self.radius;
        if ok(full) {
            return Ok(full);
        }
        let floor = full * MIN_WINDOW_FRACTION;
        let mut bad = full;
        let mut good = full / 2.0;
        while !ok(good) {
            bad = good;
            good /= 2.0;
            if good < floor {
                return Err(LimitError::NoValidWindow);
            }
        }
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (good + bad);
            if ok(mid) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        Ok(good)
    }

    fn nonvanishing(&self, d: &TaylorSeries, r: f64, samples: usize) -> bool {
        let c = self.center();
        let scale: f64 = d
            .coeffs()
            .iter()
            .rev()
            .fold(0.0, |acc, a| acc * r + a.abs());
        let threshold = self.tol * scale;
        // A value at the center only counts when it is itself nonzero.
        let at_center = d.coeff(0);
        let start = (at_center.abs() > threshold).then_some(at_center.signum());
        [-1.0, 1.0].iter().all(|side| {
            let mut sign = start;
            (1..=samples).all(|i| {
                let x = c + side * r * i as f64 / samples as f64;
                let v = crate::series::horner(d.coeffs(), x - c);
                if v.abs() <= threshold {
                    return false;
                }
                let s = v.signum();
                let same = sign.is_none_or(|prev| prev == s);
                sign = Some(s);
                same
            })
        })
    }

    /// Ratios, errors against `L` and the bound on a symmetric grid of the
    /// punctured window for `n = 0..=n_max`.
    ///
    /// The grid has `ceil(grid_points / 2)` points per side at
    /// `x0 +- R i / m`, `i = 1..=m`.
    pub fn run_convergence(
        &self,
        grid_points: usize,
        n_max: usize,
    ) -> Result<ConvergenceReport, LimitError> {
        if grid_points < 2 {
            return Err(LimitError::InvalidArgument("grid_points must be >= 2"));
        }
        if n_max < 1 {
            return Err(LimitError::InvalidArgument("n_max must be >= 1"));
        }
        let grid = symmetric_grid(self.center(), self.radius, grid_points);
        let mut rows = Vec::with_capacity(grid.len() * (n_max + 1));
        for n in 0..=n_max {
            let bound = self.error_bound(n).value();
            for &x in &grid {
                let ratio = self.iterated_ratio(x, n)?;
                rows.push(ConvergenceRow {
                    n,
                    x,
                    ratio,
                    abs_error: (ratio - self.limit).abs(),
                    bound,
                });
            }
        }
        Ok(ConvergenceReport {
            grid,
            rows,
            n_max,
            limit: self.limit,
            tail_f: self.tail_f,
            tail_g: self.tail_g,
        })
    }
}

fn zero_below(s: &TaylorSeries, lead: usize) -> Result<TaylorSeries, SeriesError> {
    let mut coeffs = s.coeffs().to_vec();
    for c in coeffs.iter_mut().take(lead) {
        *c = 0.0;
    }
    TaylorSeries::new(s.center(), s.radius(), coeffs)
}

pub(crate) fn symmetric_grid(center: f64, radius: f64, points: usize) -> Vec<f64> {
    let m = points.div_ceil(2);
    let mut grid: Vec<f64> = (1..=m)
        .rev()
        .map(|i| center - radius * i as f64 / m as f64)
        .collect();
    grid.extend((1..=m).map(|i| center + radius * i as f64 / m as f64));
    grid
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub x: f64,
    pub ratio: f64,
    pub abs_error: f64,
    /// `None` until the bound is valid.
    pub bound: Option<f64>,
}

/// Table over `(n, x)`, `n` outermost.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub grid: Vec<f64>,
    pub rows: Vec<ConvergenceRow>,
    pub n_max: usize,
    pub limit: f64,
    pub tail_f: f64,
    pub tail_g: f64,
}

impl ConvergenceReport {
    pub fn rows_at(&self, n: usize) -> &[ConvergenceRow] {
        let w = self.grid.len();
        if n > self.n_max {
            return &[];
        }
        &self.rows[n * w..(n + 1) * w]
    }

    /// `sup_x |ratio(x, n) - L|` over the grid.
    pub fn sup_error(&self, n: usize) -> f64 {
        self.rows_at(n).iter().fold(0.0, |m, r| m.max(r.abs_error))
    }

    pub fn bound(&self, n: usize) -> Option<f64> {
        self.rows_at(n).first().and_then(|r| r.bound)
    }

    /// Largest pairwise difference of the values at `n` across the grid.
    pub fn spread(&self, n: usize) -> f64 {
        let rows = self.rows_at(n);
        let (lo, hi) = rows
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                (lo.min(r.ratio), hi.max(r.ratio))
            });
        if rows.is_empty() {
            0.0
        } else {
            hi - lo
        }
    }

    /// True when every error is within its valid bound.
    pub fn bound_holds(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.bound.is_none_or(|b| r.abs_error <= b))
    }

    /// CSV with header `n,x,ratio,abs_error,bound`; `bound` is empty while
    /// not yet valid.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "x", "ratio", "abs_error", "bound"])?;
        for r in &self.rows {
            w.write_record([
                r.n.to_string(),
                fmt_sci(r.x),
                fmt_sci(r.ratio),
                fmt_sci(r.abs_error),
                r.bound.map(fmt_sci).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// 17 significant digits, scientific notation.
pub fn fmt_sci(v: f64) -> String {
    format!("{v:.16e}")
}
