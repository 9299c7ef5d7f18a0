//! Test families with closed forms, and independent oracles for them.
#![allow(dead_code)]

use iterlim::TaylorSeries;
use rand::Rng;

pub const ORDER: usize = 64;

fn taylor(radius: f64, coeff: impl Fn(usize) -> f64) -> TaylorSeries {
    TaylorSeries::new(0.0, radius, (0..=ORDER).map(coeff).collect()).unwrap()
}

fn inv_factorial(j: usize) -> f64 {
    (1..=j).fold(1.0, |acc, i| acc / i as f64)
}

/// e^x - 1 - x around 0.
pub fn expm1x(radius: f64) -> TaylorSeries {
    taylor(radius, |j| if j < 2 { 0.0 } else { inv_factorial(j) })
}

pub fn x_squared(radius: f64) -> TaylorSeries {
    TaylorSeries::new(0.0, radius, vec![0.0, 0.0, 1.0]).unwrap()
}

pub fn sin(radius: f64) -> TaylorSeries {
    taylor(radius, |j| match j % 4 {
        1 => inv_factorial(j),
        3 => -inv_factorial(j),
        _ => 0.0,
    })
}

/// 1 - cos x.
pub fn one_minus_cos(radius: f64) -> TaylorSeries {
    taylor(radius, |j| match j % 4 {
        2 => inv_factorial(j),
        0 if j > 0 => -inv_factorial(j),
        _ => 0.0,
    })
}

pub fn identity(radius: f64) -> TaylorSeries {
    TaylorSeries::new(0.0, radius, vec![0.0, 1.0]).unwrap()
}

/// `I_n^f(x) / I_n^g(x)` for f = e^x - 1 - x, g = x^2 from the closed forms
/// `I_n^f = e^x - sum_{m<=n+1} x^m/m!` and `I_n^g = 2 x^{n+2}/(n+2)!`.
///
/// The exponential remainder is evaluated in integral form,
/// `x^{n+2}/(n+1)! * int_0^1 (1-t)^{n+1} e^{xt} dt`, which avoids the
/// cancellation of the explicit difference; the integral uses composite
/// Simpson with 20000 panels.
pub fn expm1x_over_x2_closed_form(x: f64, n: usize) -> f64 {
    let steps = 20_000;
    let h = 1.0 / steps as f64;
    let w = |t: f64| (1.0 - t).powi(n as i32 + 1) * (x * t).exp();
    let mut acc = w(0.0) + w(1.0);
    for i in 1..steps {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * w(i as f64 * h);
    }
    (n + 2) as f64 / 2.0 * acc * h / 3.0
}

/// The same closed form taken literally; fine for small n only.
pub fn expm1x_over_x2_direct(x: f64, n: usize) -> f64 {
    let mut partial = 0.0;
    let mut term = 1.0;
    for m in 0..=n + 1 {
        if m > 0 {
            term *= x / m as f64;
        }
        partial += term;
    }
    let gn = 2.0 * term * x / (n + 2) as f64;
    (x.exp() - partial) / gn
}

/// Polynomial-plus-exponential series vanishing through degree `k`:
/// `alpha (e^{beta x} - sum_{m<=k} (beta x)^m/m!) + sum_{j=k+1}^{k+4} c_j x^j`.
pub fn poly_exp(rng: &mut impl Rng, k: usize, radius: f64, lead_floor: f64) -> TaylorSeries {
    let alpha: f64 = rng.gen_range(-2.0..2.0);
    let beta: f64 = rng.gen_range(-2.0..2.0);
    let poly: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut coeffs: Vec<f64> = (0..=ORDER)
        .map(|j| {
            if j <= k {
                return 0.0;
            }
            let mut c = alpha * beta.powi(j as i32) * inv_factorial(j);
            if j - (k + 1) < poly.len() {
                c += poly[j - (k + 1)];
            }
            c
        })
        .collect();
    if coeffs[k + 1].abs() < lead_floor {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        coeffs[k + 1] = sign * (lead_floor + rng.gen_range(0.0..1.0));
    }
    TaylorSeries::new(0.0, radius, coeffs).unwrap()
}
