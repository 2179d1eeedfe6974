//! Per-dataset p-values from paired per-unit scores.

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use replicability_core::{
    mcnemar, paired_bootstrap, steiger_dependent_corr, wilcoxon_signed_rank, Alternative,
    ContingencyCounts, CorrelationTriple, Error as CoreError, McNemarMode, PairedScores,
};

use crate::input::ScoreGroup;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    /// Paired bootstrap on the mean score difference.
    Bootstrap,
    /// Wilcoxon signed-rank test on the per-unit differences.
    Wilcoxon,
    /// McNemar's exact test; scores must be 0/1 correctness indicators.
    #[value(name = "mcnemar")]
    #[serde(rename = "mcnemar")]
    McNemar,
    /// Steiger's test on Spearman correlations with a `gold` column.
    Steiger,
}

impl TestKind {
    pub fn name(self) -> &'static str {
        match self {
            TestKind::Bootstrap => "bootstrap",
            TestKind::Wilcoxon => "wilcoxon",
            TestKind::McNemar => "mcnemar",
            TestKind::Steiger => "steiger",
        }
    }

    /// McNemar is two-sided; the others default to "A better than B".
    pub fn default_alternative(self) -> Alternative {
        match self {
            TestKind::McNemar => Alternative::TwoSided,
            _ => Alternative::Greater,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestOptions {
    pub test: TestKind,
    pub alternative: Alternative,
    /// Units per bootstrap resample; the dataset size when `None`.
    pub bootstrap_size: Option<usize>,
    pub repetitions: usize,
    pub seed: u64,
}

impl TestOptions {
    pub fn new(test: TestKind) -> Self {
        Self {
            test,
            alternative: test.default_alternative(),
            bootstrap_size: None,
            repetitions: 1000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetPValue {
    pub dataset: String,
    pub n_units: usize,
    pub p_value: f64,
    /// Set when the data carried no evidence either way and `p = 1` was used.
    pub note: Option<String>,
}

/// One p-value per dataset, in input order.
pub fn dataset_pvalues(groups: &[ScoreGroup], options: &TestOptions) -> Result<Vec<DatasetPValue>> {
    if options.test == TestKind::McNemar && options.alternative != Alternative::TwoSided {
        return Err(Error::Unsupported(
            "mcnemar is a two-sided test; use --alternative two-sided".into(),
        ));
    }
    groups.iter().map(|g| test_dataset(g, options)).collect()
}

fn test_dataset(group: &ScoreGroup, options: &TestOptions) -> Result<DatasetPValue> {
    let dataset_error = |source: CoreError| Error::Dataset {
        dataset: group.dataset.clone(),
        source,
    };
    let ids: Vec<String> = group.units.iter().map(|u| u.unit_id.clone()).collect();
    let a: Vec<f64> = group.units.iter().map(|u| u.score_a).collect();
    let b: Vec<f64> = group.units.iter().map(|u| u.score_b).collect();
    let scores = PairedScores::new(ids.clone(), a.clone(), b.clone()).map_err(dataset_error)?;

    let outcome = match options.test {
        TestKind::Bootstrap => {
            let size = options.bootstrap_size.unwrap_or(scores.len());
            let seed = options.seed ^ name_hash(&group.dataset);
            let run = |s: &PairedScores| paired_bootstrap(s, size, options.repetitions, seed);
            match options.alternative {
                Alternative::Greater => run(&scores),
                Alternative::Less => PairedScores::new(ids, b, a).and_then(|s| run(&s)),
                Alternative::TwoSided => PairedScores::new(ids, b, a)
                    .and_then(|flipped| Ok((2.0 * run(&scores)?.min(run(&flipped)?)).min(1.0))),
            }
        }
        TestKind::Wilcoxon => wilcoxon_signed_rank(&scores, options.alternative),
        TestKind::McNemar => {
            ContingencyCounts::from_scores(&scores).and_then(|c| mcnemar(&c, McNemarMode::Exact))
        }
        TestKind::Steiger => {
            let gold: Option<Vec<f64>> = group.units.iter().map(|u| u.gold).collect();
            let gold = gold.ok_or_else(|| {
                Error::Unsupported(format!(
                    "dataset `{}`: steiger needs a `gold` value on every unit",
                    group.dataset
                ))
            })?;
            CorrelationTriple::from_spearman(&gold, &a, &b)
                .and_then(|t| steiger_dependent_corr(&t, options.alternative))
        }
    };

    let (p_value, note) = match outcome {
        Ok(p) => (p, None),
        Err(e @ (CoreError::AllDifferencesZero | CoreError::NoDiscordantPairs)) => (
            1.0,
            Some(format!("{}: {e}; p-value set to 1", group.dataset)),
        ),
        Err(e) => return Err(dataset_error(e)),
    };
    Ok(DatasetPValue {
        dataset: group.dataset.clone(),
        n_units: group.units.len(),
        p_value,
        note,
    })
}

/// FNV-1a, so each dataset gets its own bootstrap stream regardless of order.
fn name_hash(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}
