//! Which datasets show an effect: Holm step-down, plain Bonferroni
//! correction, and the uncorrected per-dataset rule kept for contrast.

use alloc::string::String;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::partial_conjunction::ComparisonSet;
use crate::{check_alpha, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Procedure {
    Holm,
    BonferroniCorrection,
    Naive,
}

impl Procedure {
    /// Whether the procedure bounds the family-wise error rate at `alpha`.
    pub fn controls_fwer(self) -> bool {
        !matches!(self, Procedure::Naive)
    }
}

/// One dataset's position in the ascending p-value order and its outcome.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct RankedDecision {
    /// 1-based rank by ascending p-value.
    pub rank: usize,
    pub name: String,
    pub p_value: f64,
    pub threshold: f64,
    pub rejected: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct RejectionList {
    pub procedure: Procedure,
    pub alpha: f64,
    pub fwer_controlled: bool,
    /// Rejected dataset names, smallest p-value first.
    pub rejected: Vec<String>,
    /// Cutoffs actually compared against, by rank.
    pub thresholds: Vec<f64>,
    /// Every dataset in rank order.
    pub decisions: Vec<RankedDecision>,
}

impl RejectionList {
    pub fn len(&self) -> usize {
        self.rejected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rejected.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.rejected.iter().any(|r| r == name)
    }

    fn build(
        set: &ComparisonSet,
        procedure: Procedure,
        alpha: f64,
        threshold_for_rank: impl Fn(usize) -> f64,
        compared_ranks: usize,
        rejected_ranks: impl Fn(usize, f64, f64) -> bool,
    ) -> Self {
        let decisions: Vec<RankedDecision> = set
            .ascending_order()
            .into_iter()
            .enumerate()
            .map(|(i, idx)| {
                let rank = i + 1;
                let p = set.p_values()[idx];
                let threshold = threshold_for_rank(rank);
                RankedDecision {
                    rank,
                    name: set.dataset_names()[idx].clone(),
                    p_value: p,
                    threshold,
                    rejected: rejected_ranks(rank, p, threshold),
                }
            })
            .collect();
        Self {
            procedure,
            alpha,
            fwer_controlled: procedure.controls_fwer(),
            rejected: decisions
                .iter()
                .filter(|d| d.rejected)
                .map(|d| d.name.clone())
                .collect(),
            thresholds: decisions
                .iter()
                .take(compared_ranks)
                .map(|d| d.threshold)
                .collect(),
            decisions,
        }
    }
}

/// Holm step-down: with `k` the smallest rank where `p_(k) > alpha/(N+1-k)`,
/// reject ranks `1..k`; reject all if no such rank exists.
pub fn holm(set: &ComparisonSet, alpha: f64) -> Result<RejectionList> {
    check_alpha(alpha)?;
    let n = set.len();
    let threshold = |rank: usize| alpha / (n + 1 - rank) as f64;
    let stop = set
        .sorted_p_values()
        .iter()
        .enumerate()
        .position(|(i, &p)| p > threshold(i + 1))
        .map(|i| i + 1);
    let (compared, rejected_below) = match stop {
        Some(k) => (k, k),
        None => (n, n + 1),
    };
    Ok(RejectionList::build(
        set,
        Procedure::Holm,
        alpha,
        threshold,
        compared,
        |rank, _, _| rank < rejected_below,
    ))
}

/// Tests every dataset at `alpha / N`.
pub fn bonferroni_correction(set: &ComparisonSet, alpha: f64) -> Result<RejectionList> {
    check_alpha(alpha)?;
    let cutoff = alpha / set.len() as f64;
    Ok(RejectionList::build(
        set,
        Procedure::BonferroniCorrection,
        alpha,
        |_| cutoff,
        set.len(),
        |_, p, t| p <= t,
    ))
}

/// Rejects every `p_i <= alpha` with no multiplicity adjustment.
pub fn naive_identification(set: &ComparisonSet, alpha: f64) -> Result<RejectionList> {
    check_alpha(alpha)?;
    Ok(RejectionList::build(
        set,
        Procedure::Naive,
        alpha,
        |_| alpha,
        set.len(),
        |_, p, t| p <= t,
    ))
}
