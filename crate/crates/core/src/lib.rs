//! Indeterminate limits of ratios of analytic functions by iterated
//! integration.
//!
//! For `f`, `g` analytic at `x0` with `f^(j)(x0) = g^(j)(x0) = 0` for
//! `j <= K` and `g^(K+1)(x0) != 0`, the ratio of their n-fold antiderivatives
//! from `x0` converges, uniformly on the punctured window, to
//! `f^(K+1)(x0) / g^(K+1)(x0)`: the same value one differentiation step of
//! L'Hôpital's rule gives.
//!
//! - [`series`]: truncated Taylor series and the exact antiderivative operator.
//! - [`limits`]: hypothesis checks, iterated ratios, the uniform error bound
//!   and convergence reports.
//! - [`quad`]: the same iteration on sampled functions by cumulative quadrature.
//! - [`entropy`]: the Tsallis entropy `q -> 1` limit as an application.

pub mod entropy;
pub mod limits;
pub mod quad;
pub mod series;
mod text;

pub use entropy::{EntropyError, EntropyFamily, ProbabilityDistribution};
pub use limits::{
    ConvergenceReport, ConvergenceRow, ErrorBound, IterationOutcome, LimitError, LimitProblem,
};
pub use quad::{GridFunction, QuadError};
pub use series::{SeriesError, TaylorSeries};
pub use text::ParseError;
