//! Tsallis entropy and its `q -> 1` limit by iterated integration.
//!
//! `S_q = k_B (1 - sum_i p_i^q) / (q - 1)` is a 0/0 form at `q = 1`. Around
//! `q0 = 1` the numerator expands through `p^q = p exp((q - 1) ln p)`, the
//! denominator is `q - 1`, and the pair is a [`LimitProblem`] with `K = 0`
//! whose limit is the Boltzmann-Shannon entropy. Integrating numerator and
//! denominator `n` times from `q0` gives a family of entropies indexed by
//! `n`; `n = 0` is `S_q` itself and every member tends to the Shannon value
//! as `n` grows, whatever `q` is.

use std::io::Write;

use thiserror::Error;

use crate::limits::{fmt_sci, ConvergenceReport, ConvergenceRow, LimitError, LimitProblem};
use crate::series::{SeriesError, TaylorSeries, DEFAULT_ORDER, DEFAULT_ZERO_TOL};
use crate::text::{self, ParseError};

/// Half-width of the `q` window around 1; keeps `q > 0`.
pub const DEFAULT_Q_WINDOW: f64 = 0.9;

/// Sum tolerance for a constructed distribution.
const SUM_TOL: f64 = 1e-12;
/// Looser sum tolerance for distribution files, which are renormalized.
const FILE_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntropyError {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("probability p[{0}] is zero; strip zero entries first")]
    ZeroProbability(usize),
    #[error("q = 1 is a removable singularity of the Tsallis form; use the Shannon entropy or the integrated family")]
    RemovableSingularity,
    #[error("q = {q} lies outside the window |q - 1| <= {window}")]
    OutOfWindow { q: f64, window: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error(transparent)]
    Limit(#[from] LimitError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Probabilities `p_1..p_W` together with the entropy unit `k_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityDistribution {
    p: Vec<f64>,
    k_b: f64,
}

impl ProbabilityDistribution {
    pub fn new(p: Vec<f64>, k_b: f64) -> Result<Self, EntropyError> {
        if p.is_empty() {
            return Err(EntropyError::InvalidDistribution("no probabilities".into()));
        }
        if let Some(i) = p.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(EntropyError::InvalidDistribution(format!(
                "p[{i}] = {} is not a finite non-negative number",
                p[i]
            )));
        }
        if !(k_b.is_finite() && k_b > 0.0) {
            return Err(EntropyError::InvalidDistribution(
                "k_B must be positive".into(),
            ));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(EntropyError::InvalidDistribution(format!(
                "probabilities sum to {sum}, not 1"
            )));
        }
        Ok(Self { p, k_b })
    }

    /// Natural units, `k_B = 1`.
    pub fn unit(p: Vec<f64>) -> Result<Self, EntropyError> {
        Self::new(p, 1.0)
    }

    pub fn uniform(w: usize) -> Result<Self, EntropyError> {
        if w == 0 {
            return Err(EntropyError::InvalidDistribution("no probabilities".into()));
        }
        Self::unit(vec![1.0 / w as f64; w])
    }

    /// Parses one probability per line (`#` comments allowed). The sum must
    /// be within 1e-9 of one and is then renormalized.
    pub fn parse(input: &str, k_b: f64) -> Result<Self, EntropyError> {
        let p = text::content_lines(input)
            .map(|(line, l)| text::parse_number(line, l))
            .collect::<Result<Vec<_>, _>>()?;
        let sum: f64 = p.iter().sum();
        if sum.is_nan() || (sum - 1.0).abs() > FILE_SUM_TOL {
            return Err(EntropyError::InvalidDistribution(format!(
                "probabilities sum to {sum}, not 1"
            )));
        }
        Self::new(p.into_iter().map(|v| v / sum).collect(), k_b)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn k_b(&self) -> f64 {
        self.k_b
    }

    /// Drops zero entries; they contribute nothing to `S_q` for `q > 0` or
    /// to the Shannon entropy.
    pub fn without_zeros(&self) -> Self {
        Self {
            p: self.p.iter().copied().filter(|v| *v > 0.0).collect(),
            k_b: self.k_b,
        }
    }

    /// Joint distribution of two independent systems.
    pub fn product(&self, other: &Self) -> Result<Self, EntropyError> {
        let p = self
            .p
            .iter()
            .flat_map(|a| other.p.iter().map(move |b| a * b))
            .collect();
        Self::new(p, self.k_b)
    }

    fn require_positive(&self) -> Result<(), EntropyError> {
        match self.p.iter().position(|v| *v == 0.0) {
            Some(i) => Err(EntropyError::ZeroProbability(i)),
            None => Ok(()),
        }
    }
}

/// `k_B (1 - sum p_i^q) / (q - 1)`.
pub fn tsallis_entropy(d: &ProbabilityDistribution, q: f64) -> Result<f64, EntropyError> {
    d.require_positive()?;
    if q == 1.0 {
        return Err(EntropyError::RemovableSingularity);
    }
    let sum: f64 = d.p.iter().map(|p| p.powf(q)).sum();
    Ok(d.k_b * (1.0 - sum) / (q - 1.0))
}

/// `-k_B sum p_i ln p_i`.
pub fn shannon_entropy(d: &ProbabilityDistribution) -> Result<f64, EntropyError> {
    d.require_positive()?;
    let s: f64 = d.p.iter().map(|p| p * p.ln()).sum();
    Ok(-d.k_b * s)
}

/// Taylor series of `1 - sum p_i^q` around `q = 1`:
/// `a_0 = 0`, `a_j = -sum_i p_i (ln p_i)^j / j!`.
pub fn tsallis_numerator_series(
    d: &ProbabilityDistribution,
    order: usize,
) -> Result<TaylorSeries, EntropyError> {
    d.require_positive()?;
    if order < 2 {
        return Err(EntropyError::InvalidArgument("series order must be >= 2"));
    }
    let mut coeffs = vec![0.0; order + 1];
    for &p in &d.p {
        let ln_p = p.ln();
        let mut term = p;
        for (j, c) in coeffs.iter_mut().enumerate().skip(1) {
            term *= ln_p / j as f64;
            *c -= term;
        }
    }
    Ok(TaylorSeries::new(1.0, DEFAULT_Q_WINDOW, coeffs)?)
}

/// The series of `q - 1` around `q = 1`.
pub fn tsallis_denominator_series() -> TaylorSeries {
    TaylorSeries::new(1.0, DEFAULT_Q_WINDOW, vec![0.0, 1.0]).expect("static series is valid")
}

/// Iterated-integration family `S^(n)_q` for one distribution.
#[derive(Debug, Clone)]
pub struct EntropyFamily {
    k_b: f64,
    problem: LimitProblem,
}

impl EntropyFamily {
    pub fn new(d: &ProbabilityDistribution) -> Result<Self, EntropyError> {
        Self::with_order(d, DEFAULT_ORDER)
    }

    pub fn with_order(d: &ProbabilityDistribution, order: usize) -> Result<Self, EntropyError> {
        let f = tsallis_numerator_series(d, order)?;
        let problem = LimitProblem::new(f, tsallis_denominator_series(), DEFAULT_ZERO_TOL)?;
        Ok(Self {
            k_b: d.k_b,
            problem,
        })
    }

    pub fn problem(&self) -> &LimitProblem {
        &self.problem
    }

    /// `k_B I_n^f(q) / I_n^g(q)`; `n = 0` is the Tsallis entropy.
    pub fn value(&self, q: f64, n: usize) -> Result<f64, EntropyError> {
        self.check_q(q)?;
        Ok(self.k_b * self.problem.iterated_ratio(q, n)?)
    }

    /// The `n -> infinity` value, `k_B` times the first Taylor coefficient.
    pub fn limit(&self) -> f64 {
        self.k_b * self.problem.lhopital_limit()
    }

    /// `k_B` times the limit-engine error bound; uniform in `q`.
    pub fn bound(&self, n: usize) -> Option<f64> {
        self.problem.error_bound(n).value().map(|b| self.k_b * b)
    }

    fn check_q(&self, q: f64) -> Result<(), EntropyError> {
        if q == 1.0 {
            return Err(EntropyError::RemovableSingularity);
        }
        let window = self.problem.radius();
        if !(q.is_finite() && (q - 1.0).abs() <= window) {
            return Err(EntropyError::OutOfWindow { q, window });
        }
        Ok(())
    }
}

pub fn entropy_family(d: &ProbabilityDistribution, q: f64, n: usize) -> Result<f64, EntropyError> {
    EntropyFamily::new(d)?.value(q, n)
}

/// Family values over `q_list x 0..=n_max` against the Shannon entropy.
///
/// The returned report's grid holds the `q` values, `ratio` holds the
/// entropy, `abs_error` is the distance to the Shannon value and `limit` is
/// the Shannon value. [`ConvergenceReport::spread`] gives the spread across
/// `q` at each `n`. Finite-`n` members are reported unnormalized.
pub fn q_independence_report(
    d: &ProbabilityDistribution,
    q_list: &[f64],
    n_max: usize,
) -> Result<ConvergenceReport, EntropyError> {
    if q_list.is_empty() {
        return Err(EntropyError::InvalidArgument("q list is empty"));
    }
    let family = EntropyFamily::new(d)?;
    for &q in q_list {
        family.check_q(q)?;
    }
    let shannon = shannon_entropy(d)?;
    let mut rows = Vec::with_capacity(q_list.len() * (n_max + 1));
    for n in 0..=n_max {
        let bound = family.bound(n);
        for &q in q_list {
            let s = family.value(q, n)?;
            rows.push(ConvergenceRow {
                n,
                x: q,
                ratio: s,
                abs_error: (s - shannon).abs(),
                bound,
            });
        }
    }
    let (tail_f, tail_g) = family.problem.tail_constants();
    Ok(ConvergenceReport {
        grid: q_list.to_vec(),
        rows,
        n_max,
        limit: shannon,
        tail_f,
        tail_g,
    })
}

/// CSV `q,n,S,shannon,abs_diff`, grouped by `q` in input order.
pub fn write_entropy_csv<W: Write>(report: &ConvergenceReport, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["q", "n", "S", "shannon", "abs_diff"])?;
    let width = report.grid.len();
    for col in 0..width {
        for n in 0..=report.n_max {
            let r = &report.rows[n * width + col];
            w.write_record([
                fmt_sci(r.x),
                n.to_string(),
                fmt_sci(r.ratio),
                fmt_sci(report.limit),
                fmt_sci(r.abs_error),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    fn two_state() -> ProbabilityDistribution {
        ProbabilityDistribution::uniform(2).unwrap()
    }

    #[test]
    fn distribution_validation() {
        assert!(ProbabilityDistribution::unit(vec![]).is_err());
        assert!(ProbabilityDistribution::unit(vec![0.5, 0.6]).is_err());
        assert!(ProbabilityDistribution::unit(vec![1.5, -0.5]).is_err());
        assert!(ProbabilityDistribution::new(vec![1.0], 0.0).is_err());
        let d = ProbabilityDistribution::unit(vec![0.5, 0.0, 0.5]).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(
            tsallis_entropy(&d, 2.0),
            Err(EntropyError::ZeroProbability(1))
        );
        assert_eq!(d.without_zeros().probabilities(), &[0.5, 0.5]);
    }

    #[test]
    fn distribution_file_parsing() {
        let d = ProbabilityDistribution::parse("# two states\n0.5\n\n0.5000000001\n", 1.0).unwrap();
        assert!((d.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(ProbabilityDistribution::parse("0.5\n0.4\n", 1.0).is_err());
        assert!(ProbabilityDistribution::parse("0,5\n0,5\n", 1.0).is_err());
        assert!(ProbabilityDistribution::parse("# nothing\n", 1.0).is_err());
    }

    #[test]
    fn tsallis_examples() {
        assert_relative_eq!(tsallis_entropy(&two_state(), 2.0).unwrap(), 0.5);
        let certain = ProbabilityDistribution::unit(vec![1.0]).unwrap();
        for q in [0.3, 1.5, 3.0] {
            assert_eq!(tsallis_entropy(&certain, q).unwrap(), 0.0);
        }
        // (1 - e^{-0.001 ln 2}) / 0.001
        let oracle = -(-0.001 * LN_2).exp_m1() / 0.001;
        let v = tsallis_entropy(&two_state(), 1.001).unwrap();
        assert_relative_eq!(v, oracle, max_relative = 1e-9);
        assert!((v - 0.69291).abs() < 1e-5);
        assert_eq!(
            tsallis_entropy(&two_state(), 1.0),
            Err(EntropyError::RemovableSingularity)
        );
    }

    #[test]
    fn shannon_examples() {
        assert_relative_eq!(shannon_entropy(&two_state()).unwrap(), LN_2);
        let certain = ProbabilityDistribution::unit(vec![1.0]).unwrap();
        assert_eq!(shannon_entropy(&certain).unwrap(), 0.0);
        let four = ProbabilityDistribution::uniform(4).unwrap();
        assert_relative_eq!(shannon_entropy(&four).unwrap(), 1.3862944, epsilon = 1e-7);
        let scaled = ProbabilityDistribution::new(vec![0.5, 0.5], 2.5).unwrap();
        assert_relative_eq!(shannon_entropy(&scaled).unwrap(), 2.5 * LN_2);
    }

    #[test]
    fn numerator_series_coefficients() {
        let s = tsallis_numerator_series(&two_state(), 10).unwrap();
        assert_eq!(s.center(), 1.0);
        assert_eq!(s.coeff(0), 0.0);
        assert_relative_eq!(s.coeff(1), LN_2, max_relative = 1e-15);
        assert_relative_eq!(s.coeff(2), -LN_2 * LN_2 / 2.0, max_relative = 1e-15);
        assert_eq!(s.vanishing_order(DEFAULT_ZERO_TOL), 1);
        let certain = ProbabilityDistribution::unit(vec![1.0]).unwrap();
        let zero = tsallis_numerator_series(&certain, 10).unwrap();
        assert!(zero.coeffs().iter().all(|c| *c == 0.0));
        let skewed = ProbabilityDistribution::unit(vec![0.7, 0.2, 0.1]).unwrap();
        assert_eq!(
            tsallis_numerator_series(&skewed, 64)
                .unwrap()
                .vanishing_order(DEFAULT_ZERO_TOL),
            1
        );
        assert!(tsallis_numerator_series(&two_state(), 1).is_err());
    }

    #[test]
    fn family_at_zero_is_tsallis() {
        let dists = [
            two_state(),
            ProbabilityDistribution::uniform(4).unwrap(),
            ProbabilityDistribution::unit(vec![0.7, 0.2, 0.1]).unwrap(),
            ProbabilityDistribution::new(vec![0.05, 0.15, 0.3, 0.5], 1.380649).unwrap(),
        ];
        for d in &dists {
            let fam = EntropyFamily::new(d).unwrap();
            for q in [0.1, 0.55, 0.95, 1.05, 1.5, 1.9] {
                let direct = tsallis_entropy(d, q).unwrap();
                assert!(
                    (fam.value(q, 0).unwrap() - direct).abs() <= 1e-12,
                    "q = {q}"
                );
            }
        }
        assert_relative_eq!(
            entropy_family(&two_state(), 1.5, 0).unwrap(),
            0.5857864,
            epsilon = 1e-7
        );
    }

    #[test]
    fn family_tends_to_shannon() {
        let fam = EntropyFamily::new(&two_state()).unwrap();
        let v = fam.value(1.5, 400).unwrap();
        assert!((v - LN_2).abs() < 2e-3);
        assert_relative_eq!(fam.limit(), LN_2, max_relative = 1e-15);
        assert!(matches!(
            fam.value(1.0, 3),
            Err(EntropyError::RemovableSingularity)
        ));
        assert!(matches!(
            fam.value(2.5, 3),
            Err(EntropyError::OutOfWindow { .. })
        ));
        let certain = ProbabilityDistribution::unit(vec![1.0]).unwrap();
        for n in [0, 5, 50] {
            assert_eq!(entropy_family(&certain, 1.3, n).unwrap(), 0.0);
        }
    }

    #[test]
    fn tsallis_is_nonnegative() {
        let dists = [
            two_state(),
            ProbabilityDistribution::unit(vec![0.9, 0.05, 0.05]).unwrap(),
            ProbabilityDistribution::unit(vec![0.01, 0.99]).unwrap(),
        ];
        for d in &dists {
            for i in 1..=60 {
                let q = i as f64 * 0.05;
                if q != 1.0 {
                    assert!(tsallis_entropy(d, q).unwrap() >= 0.0);
                }
            }
        }
    }

    #[test]
    fn shannon_is_additive_for_products() {
        let a = ProbabilityDistribution::unit(vec![0.3, 0.7]).unwrap();
        let b = ProbabilityDistribution::unit(vec![0.2, 0.5, 0.3]).unwrap();
        let ab = a.product(&b).unwrap();
        let sum = shannon_entropy(&a).unwrap() + shannon_entropy(&b).unwrap();
        assert_relative_eq!(shannon_entropy(&ab).unwrap(), sum, max_relative = 1e-14);
        // Finite-q Tsallis entropy is not additive.
        let t = tsallis_entropy(&a, 1.5).unwrap() + tsallis_entropy(&b, 1.5).unwrap();
        assert!((tsallis_entropy(&ab, 1.5).unwrap() - t).abs() > 1e-3);
    }

    #[test]
    fn q_report_shapes() {
        let d = two_state();
        let rep = q_independence_report(&d, &[1.3], 10).unwrap();
        assert_eq!(rep.spread(10), 0.0);
        let certain = ProbabilityDistribution::unit(vec![1.0]).unwrap();
        let rep = q_independence_report(&certain, &[1.2, 1.5, 1.8], 5).unwrap();
        assert!(rep.rows.iter().all(|r| r.ratio == 0.0));
        assert_eq!(rep.spread(5), 0.0);
        assert!(q_independence_report(&d, &[], 5).is_err());
        assert!(q_independence_report(&d, &[1.2, 1.0], 5).is_err());
    }

    #[test]
    fn q_report_spread_below_bound() {
        let d = two_state();
        let rep = q_independence_report(&d, &[1.2, 1.5, 1.8], 200).unwrap();
        assert!(rep.bound_holds());
        assert!(rep.spread(200) < rep.bound(200).unwrap());
        assert!(rep.spread(200) < rep.spread(0));
    }

    #[test]
    fn entropy_csv_layout() {
        let rep = q_independence_report(&two_state(), &[1.2, 1.5], 2).unwrap();
        let mut buf = Vec::new();
        write_entropy_csv(&rep, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "q,n,S,shannon,abs_diff");
        assert_eq!(lines.len(), 1 + 2 * 3);
        assert!(lines[1].starts_with("1.2000000000000000e0,0,"));
        assert!(lines[4].starts_with("1.5000000000000000e0,0,"));
    }
}
