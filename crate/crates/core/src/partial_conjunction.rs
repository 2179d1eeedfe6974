//! Partial conjunction p-values and the `k̂` estimators.
//!
//! For ordered p-values `p_(1) <= … <= p_(N)` the partial conjunction null
//! `H^{u/N}` says fewer than `u` of the `N` per-dataset nulls are false. Two
//! combinations are provided:
//!
//! * Bonferroni: `min(1, (N-u+1) p_(u))`, valid under any dependence.
//! * Fisher: `P(χ²_{2(N-u+1)} >= -2 Σ_{i>=u} ln p_(i))`, valid for
//!   independent datasets.
//!
//! `k̂` is the largest `u` whose running-maximum p-value is `<= alpha`.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::special::chi_square_sf;
use crate::{check_alpha, Error, Result};

/// Assumed dependence between the per-dataset test statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Dependence {
    Independent,
    #[default]
    DependentUnknown,
}

/// p-value combination used to build partial conjunction p-values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PcMethod {
    Bonferroni,
    Fisher,
}

/// Estimator of the number of datasets with a true effect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Estimator {
    Count,
    Bonferroni,
    Fisher,
}

impl From<PcMethod> for Estimator {
    fn from(m: PcMethod) -> Self {
        match m {
            PcMethod::Bonferroni => Estimator::Bonferroni,
            PcMethod::Fisher => Estimator::Fisher,
        }
    }
}

/// Named per-dataset p-values for one A-vs-B comparison.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct ComparisonSet {
    dataset_names: Vec<String>,
    p_values: Vec<f64>,
    dependence: Dependence,
}

impl ComparisonSet {
    pub fn new(
        dataset_names: Vec<String>,
        p_values: Vec<f64>,
        dependence: Dependence,
    ) -> Result<Self> {
        if p_values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if dataset_names.len() != p_values.len() {
            return Err(Error::LengthMismatch {
                expected: p_values.len(),
                found: dataset_names.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for (name, &p) in dataset_names.iter().zip(&p_values) {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateName(name.clone()));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidPValue {
                    name: name.clone(),
                    value: p,
                });
            }
        }
        Ok(Self {
            dataset_names,
            p_values,
            dependence,
        })
    }

    /// Builds a set from `(name, p)` pairs.
    pub fn from_pairs<'a, I>(pairs: I, dependence: Dependence) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, f64)>,
    {
        let (names, ps): (Vec<String>, Vec<f64>) =
            pairs.into_iter().map(|(n, p)| (String::from(n), p)).unzip();
        Self::new(names, ps, dependence)
    }

    /// Anonymous set with names `d1..dN`, handy for simulations.
    pub fn unnamed(p_values: Vec<f64>, dependence: Dependence) -> Result<Self> {
        let names = (1..=p_values.len())
            .map(|i| alloc::format!("d{i}"))
            .collect();
        Self::new(names, p_values, dependence)
    }

    pub fn len(&self) -> usize {
        self.p_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p_values.is_empty()
    }

    pub fn dataset_names(&self) -> &[String] {
        &self.dataset_names
    }

    pub fn p_values(&self) -> &[f64] {
        &self.p_values
    }

    pub fn dependence(&self) -> Dependence {
        self.dependence
    }

    pub fn with_dependence(mut self, dependence: Dependence) -> Self {
        self.dependence = dependence;
        self
    }

    /// Dataset indices ordered by ascending p-value, ties broken by index.
    pub fn ascending_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.p_values[a]
                .total_cmp(&self.p_values[b])
                .then(a.cmp(&b))
        });
        order
    }

    pub fn sorted_p_values(&self) -> Vec<f64> {
        self.ascending_order()
            .into_iter()
            .map(|i| self.p_values[i])
            .collect()
    }
}

/// Raw and monotonized partial conjunction p-values for `u = 1..=N`.
///
/// Index `u - 1` of each vector holds the value for `u`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct PartialConjunctionCurve {
    pub method: PcMethod,
    pub raw: Vec<f64>,
    pub monotonized: Vec<f64>,
}

impl PartialConjunctionCurve {
    /// Largest `u` with `monotonized[u] <= alpha`, or 0.
    pub fn k_hat(&self, alpha: f64) -> usize {
        // monotonized is nondecreasing, so the qualifying u form a prefix
        self.monotonized.partition_point(|&p| p <= alpha)
    }
}

/// Estimated lower bound on the number of datasets with a true effect.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct KHat {
    pub estimator: Estimator,
    pub value: usize,
    pub alpha: f64,
}

fn check_sorted_and_u(sorted_p: &[f64], u: usize) -> Result<()> {
    if u == 0 || u > sorted_p.len() {
        return Err(Error::IndexOutOfRange {
            index: u,
            len: sorted_p.len(),
        });
    }
    if sorted_p.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Unsorted);
    }
    Ok(())
}

/// `min(1, (N-u+1) p_(u))` for 1-based `u`.
pub fn pc_pvalue_bonferroni(sorted_p: &[f64], u: usize) -> Result<f64> {
    check_sorted_and_u(sorted_p, u)?;
    let n = sorted_p.len();
    Ok(((n - u + 1) as f64 * sorted_p[u - 1]).min(1.0))
}

/// `P(χ²_{2(N-u+1)} >= -2 Σ_{i=u}^{N} ln p_(i))` for 1-based `u`.
///
/// An exact zero among the summed p-values makes the statistic infinite and
/// the result 0.
pub fn pc_pvalue_fisher(sorted_p: &[f64], u: usize) -> Result<f64> {
    check_sorted_and_u(sorted_p, u)?;
    let tail = &sorted_p[u - 1..];
    if let [p] = tail {
        // survival of χ²_2 at -2 ln p is p itself
        return Ok(*p);
    }
    let statistic = -2.0 * tail.iter().map(|&p| libm::log(p)).sum::<f64>();
    fisher_tail(statistic, tail.len())
}

fn fisher_tail(statistic: f64, terms: usize) -> Result<f64> {
    if statistic.is_infinite() {
        return Ok(0.0);
    }
    // -0.0 when every p is 1
    chi_square_sf(statistic.max(0.0), 2 * terms as u32)
}

/// Computes the full curve for `u = 1..=N` and its running maximum.
pub fn build_curve(set: &ComparisonSet, method: PcMethod) -> PartialConjunctionCurve {
    curve_from_sorted(&set.sorted_p_values(), method)
}

/// Curve from p-values already sorted ascending.
pub(crate) fn curve_from_sorted(sorted: &[f64], method: PcMethod) -> PartialConjunctionCurve {
    let n = sorted.len();
    let raw: Vec<f64> = match method {
        PcMethod::Bonferroni => sorted
            .iter()
            .enumerate()
            .map(|(i, &p)| ((n - i) as f64 * p).min(1.0))
            .collect(),
        PcMethod::Fisher => {
            let mut out = alloc::vec![0.0; n];
            let mut log_sum = 0.0;
            for i in (0..n).rev() {
                log_sum += libm::log(sorted[i]);
                out[i] = if i == n - 1 {
                    sorted[i]
                } else {
                    fisher_tail(-2.0 * log_sum, n - i).expect("statistic is nonnegative")
                };
            }
            out
        }
    };
    let monotonized = raw
        .iter()
        .scan(f64::NEG_INFINITY, |running, &p| {
            *running = running.max(p);
            Some(*running)
        })
        .collect();
    PartialConjunctionCurve {
        method,
        raw,
        monotonized,
    }
}

/// `max{u : p*^{u/N} <= alpha}` (0 when no `u` qualifies).
pub fn k_hat(set: &ComparisonSet, alpha: f64, method: PcMethod) -> Result<KHat> {
    check_alpha(alpha)?;
    Ok(KHat {
        estimator: method.into(),
        value: build_curve(set, method).k_hat(alpha),
        alpha,
    })
}

/// `#{i : p_i <= alpha}`. Carries no error guarantee.
pub fn k_hat_count(set: &ComparisonSet, alpha: f64) -> Result<KHat> {
    check_alpha(alpha)?;
    Ok(KHat {
        estimator: Estimator::Count,
        value: set.p_values().iter().filter(|&&p| p <= alpha).count(),
        alpha,
    })
}
