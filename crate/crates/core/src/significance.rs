//! Per-dataset significance tests for "system A beats system B".
//!
//! Each test turns paired observations on one dataset into a p-value for
//! `H0: δ <= 0` against `H1: δ > 0` (or the alternative requested):
//!
//! * [`paired_bootstrap`] for decomposable mean measures (e.g. UAS),
//! * [`wilcoxon_signed_rank`] for paired continuous scores,
//! * [`mcnemar`] for paired correct/incorrect outcomes,
//! * [`steiger_dependent_corr`] for two correlations with a shared gold
//!   standard.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::special::{
    chi_square_sf, fisher_z, rank_average_ties, std_normal_cdf, std_normal_sf, tie_group_sizes,
};
use crate::{Error, Result};

/// Direction of the alternative hypothesis, in terms of A minus B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Alternative {
    #[default]
    Greater,
    Less,
    TwoSided,
}

impl Alternative {
    /// p-value of a standard normal statistic.
    pub fn normal_p(self, z: f64) -> f64 {
        match self {
            Alternative::Greater => std_normal_sf(z),
            Alternative::Less => std_normal_cdf(z),
            Alternative::TwoSided => (2.0 * std_normal_sf(z.abs())).min(1.0),
        }
    }
}

/// Aligned per-unit scores of two systems on one dataset.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct PairedScores {
    unit_ids: Vec<String>,
    scores_a: Vec<f64>,
    scores_b: Vec<f64>,
}

impl PairedScores {
    pub fn new(unit_ids: Vec<String>, scores_a: Vec<f64>, scores_b: Vec<f64>) -> Result<Self> {
        let n = unit_ids.len();
        for len in [scores_a.len(), scores_b.len()] {
            if len != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: len,
                });
            }
        }
        if n < 2 {
            return Err(Error::TooSmall {
                what: "number of paired units",
                min: 2,
                got: n,
            });
        }
        let mut seen = BTreeSet::new();
        for id in &unit_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateName(id.clone()));
            }
        }
        if let Some(&bad) = scores_a.iter().chain(&scores_b).find(|v| !v.is_finite()) {
            return Err(Error::Domain {
                function: "PairedScores::new",
                value: bad,
                expected: "finite scores",
            });
        }
        Ok(Self {
            unit_ids,
            scores_a,
            scores_b,
        })
    }

    /// Scores with unit ids `0..n`.
    pub fn from_scores(scores_a: Vec<f64>, scores_b: Vec<f64>) -> Result<Self> {
        let ids = (0..scores_a.len()).map(|i| alloc::format!("{i}")).collect();
        Self::new(ids, scores_a, scores_b)
    }

    pub fn len(&self) -> usize {
        self.unit_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unit_ids.is_empty()
    }

    pub fn unit_ids(&self) -> &[String] {
        &self.unit_ids
    }

    pub fn scores_a(&self) -> &[f64] {
        &self.scores_a
    }

    pub fn scores_b(&self) -> &[f64] {
        &self.scores_b
    }

    /// `a_i - b_i` in input order.
    pub fn differences(&self) -> Vec<f64> {
        self.scores_a
            .iter()
            .zip(&self.scores_b)
            .map(|(a, b)| a - b)
            .collect()
    }

    /// `mean(a) - mean(b)`.
    pub fn mean_difference(&self) -> f64 {
        self.differences().iter().sum::<f64>() / self.len() as f64
    }

    /// Differences ordered by unit id.
    fn canonical_differences(&self) -> Vec<f64> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&x, &y| self.unit_ids[x].cmp(&self.unit_ids[y]));
        order
            .into_iter()
            .map(|i| self.scores_a[i] - self.scores_b[i])
            .collect()
    }
}

/// Paired bootstrap test of `δ > 0`.
///
/// Draws `repetitions` resamples of `bootstrap_size` units with replacement
/// and returns the fraction whose mean difference exceeds `2δ`, where `δ` is
/// the full-sample mean difference. Units are resampled in unit-id order so
/// the result does not depend on row order. All-zero differences give 1.
pub fn paired_bootstrap(
    scores: &PairedScores,
    bootstrap_size: usize,
    repetitions: usize,
    seed: u64,
) -> Result<f64> {
    if bootstrap_size == 0 {
        return Err(Error::TooSmall {
            what: "bootstrap_size",
            min: 1,
            got: 0,
        });
    }
    if repetitions == 0 {
        return Err(Error::TooSmall {
            what: "repetitions",
            min: 1,
            got: 0,
        });
    }
    let diffs = scores.canonical_differences();
    if diffs.iter().all(|&d| d == 0.0) {
        return Ok(1.0);
    }
    let n = diffs.len();
    let threshold = 2.0 * diffs.iter().sum::<f64>() / n as f64;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut exceed = 0usize;
    for _ in 0..repetitions {
        let total: f64 = (0..bootstrap_size)
            .map(|_| diffs[rng.random_range(0..n)])
            .sum();
        if total / bootstrap_size as f64 > threshold {
            exceed += 1;
        }
    }
    Ok(exceed as f64 / repetitions as f64)
}

/// How the Wilcoxon signed-rank p-value is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum WilcoxonMethod {
    /// Exact for up to [`WILCOXON_EXACT_MAX`] nonzero differences, normal otherwise.
    #[default]
    Auto,
    Exact,
    Normal,
}

/// Largest number of nonzero differences handled by the exact path in `Auto`.
pub const WILCOXON_EXACT_MAX: usize = 20;

/// Result of a Wilcoxon signed-rank test.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct WilcoxonOutcome {
    pub p_value: f64,
    /// Sum of the ranks of the positive differences.
    pub w_plus: f64,
    /// Number of nonzero differences.
    pub n_used: usize,
    /// Zero differences dropped before ranking.
    pub zeros_discarded: usize,
    pub exact: bool,
}

/// Wilcoxon signed-rank p-value for paired scores.
pub fn wilcoxon_signed_rank(scores: &PairedScores, alternative: Alternative) -> Result<f64> {
    wilcoxon_test(&scores.differences(), alternative, WilcoxonMethod::Auto).map(|o| o.p_value)
}

/// Wilcoxon signed-rank test on raw differences.
///
/// Zero differences are discarded; tied `|d|` get average ranks. The exact
/// path counts all `2^m` sign assignments (via the subset-sum distribution
/// of doubled ranks). The normal path uses the tie-corrected variance and a
/// 0.5 continuity correction.
pub fn wilcoxon_test(
    differences: &[f64],
    alternative: Alternative,
    method: WilcoxonMethod,
) -> Result<WilcoxonOutcome> {
    let nonzero: Vec<f64> = differences.iter().copied().filter(|&d| d != 0.0).collect();
    if nonzero.is_empty() {
        return Err(Error::AllDifferencesZero);
    }
    let m = nonzero.len();
    let abs: Vec<f64> = nonzero.iter().map(|d| d.abs()).collect();
    let ranks = rank_average_ties(&abs)?;
    let w_plus: f64 = nonzero
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();

    let exact = match method {
        WilcoxonMethod::Auto => m <= WILCOXON_EXACT_MAX,
        WilcoxonMethod::Exact => true,
        WilcoxonMethod::Normal => false,
    };
    let p_value = if exact {
        exact_signed_rank_p(&ranks, w_plus, alternative)
    } else {
        normal_signed_rank_p(&abs, w_plus, alternative)
    };
    Ok(WilcoxonOutcome {
        p_value,
        w_plus,
        n_used: m,
        zeros_discarded: differences.len() - m,
        exact,
    })
}

fn exact_signed_rank_p(ranks: &[f64], w_plus: f64, alternative: Alternative) -> f64 {
    // average ranks are multiples of 1/2, so doubled ranks are integers
    let doubled: Vec<usize> = ranks
        .iter()
        .map(|r| libm::round(2.0 * r) as usize)
        .collect();
    let total: usize = doubled.iter().sum();
    let mut counts = alloc::vec![0f64; total + 1];
    counts[0] = 1.0;
    for &r in &doubled {
        for s in (r..=total).rev() {
            counts[s] += counts[s - r];
        }
    }
    let observed = libm::round(2.0 * w_plus) as usize;
    let patterns = libm::ldexp(1.0, ranks.len() as i32);
    let upper = counts[observed..].iter().sum::<f64>() / patterns;
    let lower = counts[..=observed].iter().sum::<f64>() / patterns;
    match alternative {
        Alternative::Greater => upper,
        Alternative::Less => lower,
        Alternative::TwoSided => (2.0 * upper.min(lower)).min(1.0),
    }
}

fn normal_signed_rank_p(abs: &[f64], w_plus: f64, alternative: Alternative) -> f64 {
    let m = abs.len() as f64;
    let mean = m * (m + 1.0) / 4.0;
    let tie_term: f64 = tie_group_sizes(abs)
        .into_iter()
        .map(|t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum();
    let sd = libm::sqrt(m * (m + 1.0) * (2.0 * m + 1.0) / 24.0 - tie_term / 48.0);
    let dev = w_plus - mean;
    match alternative {
        Alternative::Greater => std_normal_sf((dev - 0.5) / sd),
        Alternative::Less => std_normal_cdf((dev + 0.5) / sd),
        Alternative::TwoSided => {
            let z = ((dev.abs() - 0.5) / sd).max(0.0);
            (2.0 * std_normal_sf(z)).min(1.0)
        }
    }
}

/// Paired 2x2 table: `nXY` counts units where A is X and B is Y (1 = correct).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ContingencyCounts {
    pub n00: u64,
    pub n01: u64,
    pub n10: u64,
    pub n11: u64,
}

impl ContingencyCounts {
    pub fn new(n00: u64, n01: u64, n10: u64, n11: u64) -> Result<Self> {
        if n00 + n01 + n10 + n11 == 0 {
            return Err(Error::EmptyInput);
        }
        Ok(Self { n00, n01, n10, n11 })
    }

    /// Tallies paired 0/1 outcomes (1 = correct).
    pub fn from_scores(scores: &PairedScores) -> Result<Self> {
        let mut counts = Self::default();
        for (&a, &b) in scores.scores_a().iter().zip(scores.scores_b()) {
            let bit = |v: f64| match v {
                0.0 => Ok(0u8),
                1.0 => Ok(1u8),
                other => Err(Error::Domain {
                    function: "ContingencyCounts::from_scores",
                    value: other,
                    expected: "binary outcomes 0 or 1",
                }),
            };
            match (bit(a)?, bit(b)?) {
                (0, 0) => counts.n00 += 1,
                (0, _) => counts.n01 += 1,
                (_, 0) => counts.n10 += 1,
                _ => counts.n11 += 1,
            }
        }
        Ok(counts)
    }

    /// Units where A is right and B wrong.
    pub fn a_only(&self) -> u64 {
        self.n10
    }

    /// Units where B is right and A wrong.
    pub fn b_only(&self) -> u64 {
        self.n01
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum McNemarMode {
    /// Two-sided exact binomial test on the discordant pairs.
    #[default]
    Exact,
    /// Chi-squared with continuity correction, one degree of freedom.
    ChiSquaredCc,
}

/// McNemar's test for paired nominal outcomes (two-sided).
pub fn mcnemar(counts: &ContingencyCounts, mode: McNemarMode) -> Result<f64> {
    let b = counts.a_only();
    let c = counts.b_only();
    let n = b + c;
    if n == 0 {
        return Err(Error::NoDiscordantPairs);
    }
    match mode {
        McNemarMode::Exact => Ok((2.0 * binomial_half_upper_tail(n, b.max(c))).min(1.0)),
        McNemarMode::ChiSquaredCc => {
            let diff = (b.abs_diff(c) as f64 - 1.0).max(0.0);
            chi_square_sf(diff * diff / n as f64, 1)
        }
    }
}

/// Largest `n` for which the binomial tail is summed in exact integer arithmetic.
const EXACT_BINOMIAL_MAX: u64 = 120;

/// `P(Bin(n, 1/2) >= k)`.
fn binomial_half_upper_tail(n: u64, k: u64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    if n <= EXACT_BINOMIAL_MAX {
        let mut coef: u128 = 1; // C(n, 0)
        let mut tail: u128 = 0;
        for j in 0..=n {
            if j >= k {
                tail += coef;
            }
            if j < n {
                coef = coef * u128::from(n - j) / u128::from(j + 1);
            }
        }
        return libm::ldexp(tail as f64, -(n as i32));
    }
    let nf = n as f64;
    let ln_norm = libm::lgamma(nf + 1.0) - nf * core::f64::consts::LN_2;
    let mut sum = 0.0;
    for j in k..=n {
        let jf = j as f64;
        let term = libm::exp(ln_norm - libm::lgamma(jf + 1.0) - libm::lgamma(nf - jf + 1.0));
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum.min(1.0)
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(Error::TooSmall {
            what: "correlation sample size",
            min: 3,
            got: x.len(),
        });
    }
    Ok(())
}

/// Pearson product-moment correlation.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    pearson(x, y)
}

/// Spearman's rank correlation: Pearson correlation of average-tie ranks.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    pearson(&rank_average_ties(x)?, &rank_average_ties(y)?)
}

/// Correlations of a gold standard `j` with systems `k` (A) and `h` (B), and
/// between the two systems, over `n` items.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct CorrelationTriple {
    pub r_jk: f64,
    pub r_jh: f64,
    pub r_kh: f64,
    pub n: usize,
}

impl CorrelationTriple {
    pub fn new(r_jk: f64, r_jh: f64, r_kh: f64, n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::TooSmall {
                what: "Steiger sample size",
                min: 4,
                got: n,
            });
        }
        for r in [r_jk, r_jh, r_kh] {
            if !(r.abs() < 1.0) {
                return Err(Error::Domain {
                    function: "CorrelationTriple::new",
                    value: r,
                    expected: "|r| < 1",
                });
            }
        }
        Ok(Self {
            r_jk,
            r_jh,
            r_kh,
            n,
        })
    }

    /// Spearman correlations of `gold` with `a`, `gold` with `b` and `a` with `b`.
    pub fn from_spearman(gold: &[f64], a: &[f64], b: &[f64]) -> Result<Self> {
        Self::new(
            spearman_rho(gold, a)?,
            spearman_rho(gold, b)?,
            spearman_rho(a, b)?,
            gold.len(),
        )
    }

    /// Same as [`from_spearman`](Self::from_spearman) with Pearson correlations.
    pub fn from_pearson(gold: &[f64], a: &[f64], b: &[f64]) -> Result<Self> {
        Self::new(
            pearson_r(gold, a)?,
            pearson_r(gold, b)?,
            pearson_r(a, b)?,
            gold.len(),
        )
    }
}

/// Steiger's `Z1*` statistic for `r_jk` vs `r_jh`.
///
/// The covariance of the two Fisher-transformed correlations is estimated at
/// the pooled `r̄ = (r_jk + r_jh) / 2`.
pub fn steiger_z(triple: &CorrelationTriple) -> Result<f64> {
    let t = CorrelationTriple::new(triple.r_jk, triple.r_jh, triple.r_kh, triple.n)?;
    let r_bar = (t.r_jk + t.r_jh) / 2.0;
    let r2 = r_bar * r_bar;
    let psi = t.r_kh * (1.0 - 2.0 * r2) - 0.5 * r2 * (1.0 - 2.0 * r2 - t.r_kh * t.r_kh);
    let s_bar = psi / ((1.0 - r2) * (1.0 - r2));
    if !(s_bar < 1.0) {
        return Err(Error::Domain {
            function: "steiger_z",
            value: s_bar,
            expected: "covariance estimate < 1",
        });
    }
    let diff = fisher_z(t.r_jk)? - fisher_z(t.r_jh)?;
    Ok(diff * libm::sqrt((t.n as f64 - 3.0) / (2.0 * (1.0 - s_bar))))
}

/// Steiger test for two dependent correlations sharing one variable.
pub fn steiger_dependent_corr(triple: &CorrelationTriple, alternative: Alternative) -> Result<f64> {
    Ok(alternative.normal_p(steiger_z(triple)?))
}
