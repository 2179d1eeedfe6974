//! Replicability analysis for comparing two algorithms across many datasets.
//!
//! Given one p-value per dataset (or the raw paired scores they come from),
//! this crate answers two questions with error control at level `alpha`:
//!
//! * **Counting**: on how many datasets does algorithm A truly beat B? The
//!   partial conjunction estimators [`k_hat`] (Bonferroni or Fisher
//!   combination) give a lower bound `k̂` with `P(k̂ > k) <= alpha`.
//! * **Identification**: which datasets? The [`holm`] step-down procedure
//!   controls the family-wise error rate under any dependence.
//!
//! The naive practice of counting datasets with `p <= alpha` is provided as
//! [`k_hat_count`] / [`naive_identification`] for contrast only.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, report
//! rendering and the command-line tool live in the `replicability` crate.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;

pub mod fixtures;
pub mod identification;
pub mod partial_conjunction;
pub mod report;
pub mod significance;
pub mod simulation;
pub mod special;

pub use error::{Error, Result};
pub use fixtures::{reproduce_fixture, Fixture, FIXTURES};
pub use identification::{
    bonferroni_correction, holm, naive_identification, Procedure, RankedDecision, RejectionList,
};
pub use partial_conjunction::{
    build_curve, k_hat, k_hat_count, pc_pvalue_bonferroni, pc_pvalue_fisher, ComparisonSet,
    Dependence, Estimator, KHat, PartialConjunctionCurve, PcMethod,
};
pub use report::{analyze, analyze_with, DatasetRow, MethodChoice, ReplicabilityReport};
pub use significance::{
    mcnemar, paired_bootstrap, spearman_rho, steiger_dependent_corr, wilcoxon_signed_rank,
    Alternative, ContingencyCounts, CorrelationTriple, McNemarMode, PairedScores, WilcoxonMethod,
};
pub use simulation::{run_simulation, Block, SimulationOutcome, SimulationSpec};

/// Validates a significance level.
pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange(alpha))
    }
}
