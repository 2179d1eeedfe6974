//! Monte-Carlo check of how often each `k̂` overstates the number of false
//! nulls when every null is true.
//!
//! Test statistics are standard normal and grouped into blocks. Within a
//! block of correlation `ρ` they share one Gaussian factor:
//! `Z_i = √ρ·Z_0 + √(1-ρ)·ξ_i`, so every pair in the block has correlation
//! `ρ` and each marginal stays standard normal. One-sided p-values
//! `1 - Φ(Z_i)` are therefore uniform whatever the block structure.
//!
//! Replication `r` draws from ChaCha stream `r` of the spec's seed, so a run
//! gives the same outcome regardless of the order replications execute in.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::partial_conjunction::{curve_from_sorted, PcMethod};
use crate::special::std_normal_sf;
use crate::{check_alpha, Error, Result};

/// A group of `size` statistics with pairwise correlation `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Block {
    pub size: usize,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SimulationSpec {
    pub n_hypotheses: usize,
    pub replications: usize,
    pub alpha: f64,
    /// Threshold for counting an overestimate. Statistics are always drawn
    /// under the null.
    pub true_k: usize,
    pub blocks: Vec<Block>,
    pub seed: u64,
}

impl SimulationSpec {
    /// `n` independent null p-values.
    pub fn independent(n: usize, replications: usize, alpha: f64, seed: u64) -> Self {
        Self {
            n_hypotheses: n,
            replications,
            alpha,
            true_k: 0,
            blocks: alloc::vec![Block { size: n, rho: 0.0 }],
            seed,
        }
    }

    /// 34 independent statistics plus blocks of 33 at ρ = 0.2 and ρ = 0.5.
    pub fn block_dependent(replications: usize, alpha: f64, seed: u64) -> Self {
        Self {
            n_hypotheses: 100,
            replications,
            alpha,
            true_k: 0,
            blocks: alloc::vec![
                Block { size: 34, rho: 0.0 },
                Block { size: 33, rho: 0.2 },
                Block { size: 33, rho: 0.5 },
            ],
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        let invalid = |msg: &str| Err(Error::InvalidSpec(msg.into()));
        if self.n_hypotheses == 0 {
            return invalid("n_hypotheses must be positive");
        }
        if self.replications == 0 {
            return invalid("replications must be positive");
        }
        if self.blocks.iter().map(|b| b.size).sum::<usize>() != self.n_hypotheses {
            return invalid("block sizes must sum to n_hypotheses");
        }
        if self.blocks.iter().any(|b| !(0.0..1.0).contains(&b.rho)) {
            return invalid("block correlation must lie in [0, 1)");
        }
        if self.true_k > self.n_hypotheses {
            return invalid("true_k exceeds n_hypotheses");
        }
        Ok(())
    }

    fn check_index(&self, replication_index: usize) -> Result<()> {
        if replication_index >= self.replications {
            return Err(Error::IndexOutOfRange {
                index: replication_index,
                len: self.replications,
            });
        }
        Ok(())
    }
}

/// Null test statistics for one replication.
pub fn generate_null_statistics(
    spec: &SimulationSpec,
    replication_index: usize,
) -> Result<Vec<f64>> {
    spec.validate()?;
    spec.check_index(replication_index)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(replication_index as u64);

    let mut z = Vec::with_capacity(spec.n_hypotheses);
    for block in &spec.blocks {
        if block.rho == 0.0 {
            z.extend((0..block.size).map(|_| -> f64 { StandardNormal.sample(&mut rng) }));
        } else {
            let shared: f64 = StandardNormal.sample(&mut rng);
            let (a, b) = (libm::sqrt(block.rho), libm::sqrt(1.0 - block.rho));
            z.extend((0..block.size).map(|_| {
                let own: f64 = StandardNormal.sample(&mut rng);
                a * shared + b * own
            }));
        }
    }
    Ok(z)
}

/// One-sided null p-values `1 - Φ(Z_i)` for one replication.
pub fn generate_null_pvalues(spec: &SimulationSpec, replication_index: usize) -> Result<Vec<f64>> {
    Ok(generate_null_statistics(spec, replication_index)?
        .into_iter()
        .map(std_normal_sf)
        .collect())
}

/// The three estimates for one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ReplicationResult {
    pub k_count: usize,
    pub k_bonferroni: usize,
    pub k_fisher: usize,
}

pub fn run_replication(
    spec: &SimulationSpec,
    replication_index: usize,
) -> Result<ReplicationResult> {
    let mut p = generate_null_pvalues(spec, replication_index)?;
    p.sort_by(f64::total_cmp);
    Ok(ReplicationResult {
        k_count: p.partition_point(|&v| v <= spec.alpha),
        k_bonferroni: curve_from_sorted(&p, PcMethod::Bonferroni).k_hat(spec.alpha),
        k_fisher: curve_from_sorted(&p, PcMethod::Fisher).k_hat(spec.alpha),
    })
}

/// Empirical `P(k̂ > true_k)` per estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Exceedance {
    pub count: f64,
    pub bonferroni: f64,
    pub fisher: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SimulationOutcome {
    pub exceedance: Exceedance,
    pub replications_run: usize,
    pub seed: u64,
    pub alpha: f64,
    pub true_k: usize,
    pub n_hypotheses: usize,
}

impl SimulationOutcome {
    /// Aggregates per-replication results; order does not matter.
    pub fn from_results<I>(spec: &SimulationSpec, results: I) -> Self
    where
        I: IntoIterator<Item = ReplicationResult>,
    {
        let (mut runs, mut count, mut bonf, mut fisher) = (0usize, 0usize, 0usize, 0usize);
        for r in results {
            runs += 1;
            count += usize::from(r.k_count > spec.true_k);
            bonf += usize::from(r.k_bonferroni > spec.true_k);
            fisher += usize::from(r.k_fisher > spec.true_k);
        }
        let frac = |c: usize| {
            if runs == 0 {
                0.0
            } else {
                c as f64 / runs as f64
            }
        };
        Self {
            exceedance: Exceedance {
                count: frac(count),
                bonferroni: frac(bonf),
                fisher: frac(fisher),
            },
            replications_run: runs,
            seed: spec.seed,
            alpha: spec.alpha,
            true_k: spec.true_k,
            n_hypotheses: spec.n_hypotheses,
        }
    }
}

/// Runs every replication sequentially.
pub fn run_simulation(spec: &SimulationSpec) -> Result<SimulationOutcome> {
    spec.validate()?;
    let results = (0..spec.replications)
        .map(|r| run_replication(spec, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(SimulationOutcome::from_results(spec, results))
}
