//! Scalar numerical kernels: log-gamma, the regularized upper incomplete
//! gamma function, chi-squared and normal tails, Fisher's z and tie-aware
//! ranking.

use alloc::vec::Vec;

use crate::{Error, Result};

const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 100_000;

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            function: "ln_gamma",
            value: x,
            expected: "x > 0",
        });
    }
    Ok(libm::lgamma(x))
}

/// Regularized upper incomplete gamma function `Q(s, x) = Γ(s, x) / Γ(s)`.
///
/// Uses the power series for `P(s, x)` when `x < s + 1` and a Lentz continued
/// fraction for `Q(s, x)` otherwise. `x = +inf` yields 0.
pub fn regularized_gamma_upper(s: f64, x: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Domain {
            function: "regularized_gamma_upper",
            value: s,
            expected: "s > 0",
        });
    }
    if !(x >= 0.0) {
        return Err(Error::Domain {
            function: "regularized_gamma_upper",
            value: x,
            expected: "x >= 0",
        });
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    // ln(e^{-x} x^s / Γ(s))
    let log_prefix = s * libm::log(x) - x - libm::lgamma(s);
    let q = if x < s + 1.0 {
        1.0 - lower_series(s, x, log_prefix)
    } else {
        upper_continued_fraction(s, x, log_prefix)
    };
    Ok(q.clamp(0.0, 1.0))
}

/// `P(s, x)` by the series `e^{-x} x^s / Γ(s+1) · Σ x^n / ((s+1)…(s+n))`.
fn lower_series(s: f64, x: f64, log_prefix: f64) -> f64 {
    let mut denom = s;
    let mut term = 1.0 / s;
    let mut sum = term;
    for _ in 0..MAX_ITER {
        denom += 1.0;
        term *= x / denom;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * libm::exp(log_prefix)
}

/// `Q(s, x)` by the modified Lentz evaluation of the Legendre continued fraction.
fn upper_continued_fraction(s: f64, x: f64, log_prefix: f64) -> f64 {
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    libm::exp(log_prefix) * h
}

/// Survival function `P(χ²_df >= x)`.
pub fn chi_square_sf(x: f64, df: u32) -> Result<f64> {
    if df == 0 {
        return Err(Error::Domain {
            function: "chi_square_sf",
            value: 0.0,
            expected: "df >= 1",
        });
    }
    if !(x >= 0.0) {
        return Err(Error::Domain {
            function: "chi_square_sf",
            value: x,
            expected: "x >= 0",
        });
    }
    regularized_gamma_upper(f64::from(df) / 2.0, x / 2.0)
}

/// Standard normal CDF `Φ(z)`.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / core::f64::consts::SQRT_2)
}

/// Standard normal survival `1 - Φ(z)`, accurate in the far upper tail.
pub fn std_normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / core::f64::consts::SQRT_2)
}

/// Fisher's variance-stabilizing transform `atanh(r)`.
pub fn fisher_z(r: f64) -> Result<f64> {
    if !(r.abs() < 1.0) {
        return Err(Error::Domain {
            function: "fisher_z",
            value: r,
            expected: "|r| < 1",
        });
    }
    Ok(libm::atanh(r))
}

/// Ranks `1..=n`, ties receive the mean of the ranks they span.
pub fn rank_average_ties(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(&bad) = values.iter().find(|v| v.is_nan()) {
        return Err(Error::Domain {
            function: "rank_average_ties",
            value: bad,
            expected: "non-NaN values",
        });
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));

    let mut ranks = alloc::vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let avg = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = avg;
        }
        start = end;
    }
    Ok(ranks)
}

/// Sizes of the tie groups in `values` (groups of size 1 included).
pub(crate) fn tie_group_sizes(values: &[f64]) -> Vec<usize> {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut groups = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        groups.push(j - i);
        i = j;
    }
    groups
}
