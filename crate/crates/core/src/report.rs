//! End-to-end analysis of one comparison: all three `k̂` values, the Holm
//! rejection list, and which estimator to report.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::identification::{holm, naive_identification, RejectionList};
use crate::partial_conjunction::{
    build_curve, k_hat_count, ComparisonSet, Dependence, Estimator, PartialConjunctionCurve,
    PcMethod,
};
use crate::{check_alpha, Result};

/// Version of the serialized report layout.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Which estimator to headline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MethodChoice {
    /// Fisher for independent datasets, Bonferroni otherwise.
    #[default]
    Auto,
    Bonferroni,
    Fisher,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct DatasetRow {
    pub name: String,
    pub p_value: f64,
    pub rank: usize,
    pub holm_threshold: f64,
    pub rejected: bool,
    /// `p <= alpha` without any multiplicity adjustment.
    pub nominally_significant: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ReplicabilityReport {
    pub schema_version: u32,
    pub comparison_name: String,
    pub alpha: f64,
    pub dependence: Dependence,
    pub n_datasets: usize,
    pub k_count: usize,
    pub k_bonferroni: usize,
    pub k_fisher: usize,
    /// Fisher iff the datasets are declared independent.
    pub recommended_estimator: PcMethod,
    pub recommended_k: usize,
    /// Estimator the user asked to headline (the recommended one by default).
    pub selected_estimator: PcMethod,
    pub selected_k: usize,
    pub holm_rejections: RejectionList,
    /// Per-dataset `p <= alpha`; no family-wise error guarantee.
    pub naive_rejections: RejectionList,
    pub bonferroni_curve: PartialConjunctionCurve,
    pub fisher_curve: PartialConjunctionCurve,
    /// Datasets in input order.
    pub per_dataset: Vec<DatasetRow>,
    pub warnings: Vec<String>,
}

impl ReplicabilityReport {
    pub fn k(&self, estimator: Estimator) -> usize {
        match estimator {
            Estimator::Count => self.k_count,
            Estimator::Bonferroni => self.k_bonferroni,
            Estimator::Fisher => self.k_fisher,
        }
    }

    /// `(k̂_count, k̂_Bonferroni, k̂_Fisher)`.
    pub fn triple(&self) -> (usize, usize, usize) {
        (self.k_count, self.k_bonferroni, self.k_fisher)
    }
}

/// [`analyze_with`] using the estimator recommended for the set's dependence.
pub fn analyze(set: &ComparisonSet, alpha: f64) -> Result<ReplicabilityReport> {
    analyze_with(set, alpha, MethodChoice::Auto)
}

pub fn analyze_with(
    set: &ComparisonSet,
    alpha: f64,
    choice: MethodChoice,
) -> Result<ReplicabilityReport> {
    check_alpha(alpha)?;
    let bonferroni_curve = build_curve(set, PcMethod::Bonferroni);
    let fisher_curve = build_curve(set, PcMethod::Fisher);
    let k_bonferroni = bonferroni_curve.k_hat(alpha);
    let k_fisher = fisher_curve.k_hat(alpha);
    let k_count = k_hat_count(set, alpha)?.value;
    let holm_rejections = holm(set, alpha)?;
    let naive_rejections = naive_identification(set, alpha)?;

    let k_of = |m: PcMethod| match m {
        PcMethod::Bonferroni => k_bonferroni,
        PcMethod::Fisher => k_fisher,
    };
    let recommended_estimator = match set.dependence() {
        Dependence::Independent => PcMethod::Fisher,
        Dependence::DependentUnknown => PcMethod::Bonferroni,
    };
    let selected_estimator = match choice {
        MethodChoice::Auto => recommended_estimator,
        MethodChoice::Bonferroni => PcMethod::Bonferroni,
        MethodChoice::Fisher => PcMethod::Fisher,
    };

    let mut warnings = Vec::new();
    if set.dependence() == Dependence::DependentUnknown {
        if k_fisher > k_bonferroni {
            warnings.push(format!(
                "k_fisher = {k_fisher} assumes independent datasets and is not valid under \
                 dependence; report k_bonferroni = {k_bonferroni}"
            ));
        } else if selected_estimator == PcMethod::Fisher {
            warnings.push(String::from(
                "Fisher combination selected although datasets are not declared independent",
            ));
        }
    }
    let zeros: Vec<&str> = set
        .dataset_names()
        .iter()
        .zip(set.p_values())
        .filter(|(_, &p)| p == 0.0)
        .map(|(n, _)| n.as_str())
        .collect();
    if !zeros.is_empty() {
        warnings.push(format!(
            "p-values of exactly 0 for {} are treated as exact zeros; if they were rounded, \
             supply the unrounded values",
            zeros.join(", ")
        ));
    }

    let mut per_dataset: Vec<DatasetRow> = Vec::with_capacity(set.len());
    for (name, &p) in set.dataset_names().iter().zip(set.p_values()) {
        let decision = holm_rejections
            .decisions
            .iter()
            .find(|d| &d.name == name)
            .expect("every dataset is ranked");
        per_dataset.push(DatasetRow {
            name: name.clone(),
            p_value: p,
            rank: decision.rank,
            holm_threshold: decision.threshold,
            rejected: decision.rejected,
            nominally_significant: p <= alpha,
        });
    }

    Ok(ReplicabilityReport {
        schema_version: REPORT_SCHEMA_VERSION,
        comparison_name: String::new(),
        alpha,
        dependence: set.dependence(),
        n_datasets: set.len(),
        k_count,
        k_bonferroni,
        k_fisher,
        recommended_estimator,
        recommended_k: k_of(recommended_estimator),
        selected_estimator,
        selected_k: k_of(selected_estimator),
        holm_rejections,
        naive_rejections,
        bonferroni_curve,
        fisher_curve,
        per_dataset,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{reproduce_fixture, Fixture};
    use crate::Error;

    #[test]
    fn mate_spacy_all_seven() {
        let r = reproduce_fixture("parsing_mate_spacy", 0.05).unwrap();
        assert_eq!(r.triple(), (7, 7, 7));
        assert_eq!(r.holm_rejections.len(), 7);
        assert_eq!(r.recommended_estimator, PcMethod::Fisher);
        assert!(r.warnings.iter().any(|w| w.contains("exact zeros")));
    }

    #[test]
    fn pos_recommends_fisher() {
        let r = reproduce_fixture("pos_mimick_chartag", 0.05).unwrap();
        assert_eq!(r.triple(), (11, 6, 16));
        assert_eq!(r.recommended_k, 16);
    }

    #[test]
    fn wordsim_dependent() {
        let r = reproduce_fixture("wordsim_w2v_glove", 0.05).unwrap();
        assert_eq!(r.triple(), (8, 6, 7));
        assert_eq!(r.recommended_estimator, PcMethod::Bonferroni);
        assert_eq!(r.recommended_k, 6);
        assert!(r
            .warnings
            .iter()
            .any(|w| w.contains("not valid under dependence")));
    }

    #[test]
    fn method_override() {
        let set = Fixture::by_name("wordsim_w2v_glove")
            .unwrap()
            .comparison_set();
        let r = analyze_with(&set, 0.05, MethodChoice::Fisher).unwrap();
        assert_eq!(r.recommended_estimator, PcMethod::Bonferroni);
        assert_eq!((r.selected_estimator, r.selected_k), (PcMethod::Fisher, 7));
    }

    #[test]
    fn per_dataset_rows_follow_input_order() {
        let r = reproduce_fixture("parsing_mate_redshift", 0.05).unwrap();
        let names: Vec<&str> = r.per_dataset.iter().map(|d| d.name.as_str()).collect();
        assert_eq!(names, ["BC", "BN", "MZ", "NW", "PT", "TC", "WB"]);
        let mz = &r.per_dataset[2];
        assert!(mz.rejected && mz.rank == 1);
        assert!(r.per_dataset.iter().filter(|d| d.rejected).count() == 1);
        assert_eq!(
            r.per_dataset
                .iter()
                .filter(|d| d.nominally_significant)
                .count(),
            2
        );
    }

    #[test]
    fn errors() {
        assert_eq!(
            reproduce_fixture("nope", 0.05),
            Err(Error::UnknownFixture("nope".into()))
        );
        assert!(reproduce_fixture("parsing_mate_spacy", 1.0).is_err());
    }
}
