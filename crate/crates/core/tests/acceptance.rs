//! Acceptance suite. Prints one PASS/FAIL line per criterion, with details
//! underneath, and exits nonzero if any criterion fails.
//!
//! Run with `cargo test -p replicability-core --test acceptance`.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use replicability_core::significance::{wilcoxon_test, WilcoxonMethod};
use replicability_core::simulation::{run_simulation, SimulationSpec};
use replicability_core::special::chi_square_sf;
use replicability_core::{
    analyze, bonferroni_correction, build_curve, holm, k_hat, k_hat_count, mcnemar,
    naive_identification, paired_bootstrap, reproduce_fixture, steiger_dependent_corr,
    wilcoxon_signed_rank, Alternative, ComparisonSet, ContingencyCounts, CorrelationTriple,
    Dependence, McNemarMode, PairedScores, PcMethod,
};

struct Criterion {
    id: &'static str,
    title: &'static str,
    details: Vec<String>,
    failures: usize,
}

impl Criterion {
    fn new(id: &'static str, title: &'static str) -> Self {
        Self {
            id,
            title,
            details: Vec::new(),
            failures: 0,
        }
    }

    fn check(&mut self, ok: bool, detail: String) {
        if !ok {
            self.failures += 1;
        }
        self.details
            .push(format!("    {} {detail}", if ok { "ok  " } else { "FAIL" }));
    }

    fn runtime(&mut self, started: Instant, limit: Duration) {
        let took = started.elapsed();
        self.check(took < limit, format!("runtime {took:.2?} < {limit:?}"));
    }

    fn report(&self) -> bool {
        let pass = self.failures == 0;
        println!(
            "[{}] {} {}",
            if pass { "PASS" } else { "FAIL" },
            self.id,
            self.title
        );
        for d in &self.details {
            println!("{d}");
        }
        pass
    }
}

fn published_triples() -> Criterion {
    let mut c = Criterion::new("AC1", "Published (k_count, k_bonferroni, k_fisher) triples");
    let started = Instant::now();
    let expected: &[(&str, f64, (usize, usize, usize))] = &[
        ("parsing_mate_spacy", 0.05, (7, 7, 7)),
        ("parsing_mate_redshift", 0.05, (2, 1, 5)),
        ("pos_mimick_chartag", 0.05, (11, 6, 16)),
        ("sentiment_ae_msda", 0.05, (10, 6, 10)),
        ("wordsim_w2v_glove", 0.05, (8, 6, 7)),
        ("sentiment_ae_msda", 0.01, (6, 2, 8)),
        ("wordsim_w2v_glove", 0.01, (6, 4, 6)),
        ("parsing_mate_spacy", 0.01, (7, 7, 7)),
        ("parsing_mate_redshift", 0.01, (1, 0, 2)),
        ("pos_mimick_chartag", 0.01, (7, 5, 13)),
    ];
    for &(name, alpha, want) in expected {
        let got = reproduce_fixture(name, alpha).unwrap().triple();
        c.check(
            got == want,
            format!("{name} alpha={alpha}: got {got:?}, published {want:?}"),
        );
    }
    c.runtime(started, Duration::from_secs(1));
    c
}

fn holm_markers() -> Criterion {
    let mut c = Criterion::new("AC2", "Holm identification matches the published markers");
    let expected: &[(&str, f64, &[&str])] = &[
        (
            "parsing_mate_spacy",
            0.05,
            &["BC", "BN", "MZ", "NW", "PT", "TC", "WB"],
        ),
        ("parsing_mate_redshift", 0.05, &["MZ"]),
        (
            "pos_mimick_chartag",
            0.05,
            &[
                "Tamil",
                "Hungarian",
                "Basque",
                "Indonesian",
                "Chinese",
                "Czech",
            ],
        ),
        (
            "sentiment_ae_msda",
            0.05,
            &["B→D", "K→B", "K→D", "D→K", "D→E", "E→D"],
        ),
        ("sentiment_ae_msda", 0.01, &["K→D", "E→D"]),
        (
            "wordsim_w2v_glove",
            0.05,
            &["WS353", "WS353-SIM", "MC-30", "MEN", "YP-130", "SimLex999"],
        ),
        (
            "wordsim_w2v_glove",
            0.01,
            &["WS353", "WS353-SIM", "MC-30", "YP-130"],
        ),
    ];
    for &(name, alpha, want) in expected {
        let report = reproduce_fixture(name, alpha).unwrap();
        let got: BTreeSet<&str> = report
            .holm_rejections
            .rejected
            .iter()
            .map(String::as_str)
            .collect();
        let want: BTreeSet<&str> = want.iter().copied().collect();
        c.check(
            got == want,
            format!("{name} alpha={alpha}: {} datasets {got:?}", got.len()),
        );
    }
    c
}

fn simulation_criterion(
    id: &'static str,
    title: &'static str,
    spec: SimulationSpec,
    fisher_should_exceed: bool,
    published: (f64, f64, f64),
    limit: Duration,
) -> Criterion {
    let mut c = Criterion::new(id, title);
    let started = Instant::now();
    let out = run_simulation(&spec).unwrap();
    let e = out.exceedance;
    c.details.push(format!(
        "    info seed={} reps={} exceedance count={:.3} bonferroni={:.3} fisher={:.3}",
        spec.seed, out.replications_run, e.count, e.bonferroni, e.fisher
    ));
    c.details.push(format!(
        "    info published Monte-Carlo estimates: count={} bonferroni={} fisher={}; \
         analytic P(k_count > 0) = 1 - 0.95^100 = {:.4}",
        published.0,
        published.1,
        published.2,
        1.0 - 0.95f64.powi(100)
    ));
    c.check(e.count >= 0.9, format!("count {:.3} >= 0.9", e.count));
    c.check(
        e.bonferroni <= 0.07,
        format!("bonferroni {:.3} <= 0.07", e.bonferroni),
    );
    let validity =
        spec.alpha + 3.0 * (spec.alpha * (1.0 - spec.alpha) / spec.replications as f64).sqrt();
    c.check(
        e.bonferroni <= validity,
        format!(
            "bonferroni {:.3} <= alpha + 3 s.e. = {validity:.4}",
            e.bonferroni
        ),
    );
    if fisher_should_exceed {
        c.check(e.fisher > 0.1, format!("fisher {:.3} > 0.1", e.fisher));
    } else {
        c.check(e.fisher <= 0.07, format!("fisher {:.3} <= 0.07", e.fisher));
    }
    c.check(
        e.count >= e.bonferroni,
        "count exceedance >= bonferroni exceedance".into(),
    );
    c.runtime(started, limit);
    c
}

fn fuzzed_p_vector(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = rng.random_range(1..=200);
    let grid = [0.0, 1e-4, 0.001, 0.01, 0.05, 0.5, 1.0];
    (0..n)
        .map(|_| match rng.random_range(0..10) {
            0 => grid[rng.random_range(0..grid.len())],
            1 | 2 => rng.random_range(0.0..0.01),
            _ => rng.random_range(0.0..=1.0),
        })
        .collect()
}

fn property_suite() -> Criterion {
    let mut c = Criterion::new("AC5", "Property suite over fuzzed p-vectors");
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE);
    let cases = 1500;
    let (mut holm_eq, mut kb_le, mut nested, mut ends, mut perm) = (0, 0, 0, 0, 0);
    for case in 0..cases {
        let ps = fuzzed_p_vector(&mut rng);
        let alpha = [0.05, 0.01, rng.random_range(0.001..0.2)][case % 3];
        let set = ComparisonSet::unnamed(ps.clone(), Dependence::DependentUnknown).unwrap();

        let h = holm(&set, alpha).unwrap();
        let kb = k_hat(&set, alpha, PcMethod::Bonferroni).unwrap().value;
        let kc = k_hat_count(&set, alpha).unwrap().value;
        holm_eq += usize::from(h.len() == kb);
        kb_le += usize::from(kb <= kc);

        let bonf = bonferroni_correction(&set, alpha).unwrap();
        let naive = naive_identification(&set, alpha).unwrap();
        let bs: BTreeSet<&String> = bonf.rejected.iter().collect();
        let hs: BTreeSet<&String> = h.rejected.iter().collect();
        let ns: BTreeSet<&String> = naive.rejected.iter().collect();
        nested += usize::from(bs.is_subset(&hs) && hs.is_subset(&ns));

        let p_max = ps.iter().cloned().fold(0.0, f64::max);
        let ok_ends = [PcMethod::Bonferroni, PcMethod::Fisher].iter().all(|&m| {
            let curve = build_curve(&set, m);
            (curve.raw[ps.len() - 1] - p_max).abs() <= 1e-12
        });
        ends += usize::from(ok_ends);

        let mut idx: Vec<usize> = (0..ps.len()).collect();
        for i in (1..idx.len()).rev() {
            idx.swap(i, rng.random_range(0..=i));
        }
        let shuffled = ComparisonSet::new(
            idx.iter()
                .map(|&i| set.dataset_names()[i].clone())
                .collect(),
            idx.iter().map(|&i| ps[i]).collect(),
            Dependence::DependentUnknown,
        )
        .unwrap();
        let r1 = analyze(&set, alpha).unwrap();
        let r2 = analyze(&shuffled, alpha).unwrap();
        let h1: BTreeSet<&String> = r1.holm_rejections.rejected.iter().collect();
        let h2: BTreeSet<&String> = r2.holm_rejections.rejected.iter().collect();
        perm += usize::from(
            r1.triple() == r2.triple()
                && h1 == h2
                && r1.bonferroni_curve == r2.bonferroni_curve
                && r1.fisher_curve == r2.fisher_curve,
        );
    }
    c.check(
        holm_eq == cases,
        format!("|Holm| == k_bonferroni: {holm_eq}/{cases}"),
    );
    c.check(
        kb_le == cases,
        format!("k_bonferroni <= k_count: {kb_le}/{cases}"),
    );
    c.check(
        nested == cases,
        format!("Bonferroni ⊆ Holm ⊆ naive: {nested}/{cases}"),
    );
    c.check(
        ends == cases,
        format!("curves end at p_(N) within 1e-12: {ends}/{cases}"),
    );
    c.check(
        perm == cases,
        format!("permutation invariance: {perm}/{cases}"),
    );
    c
}

fn chi_square_closed_form(x: f64, df: u32) -> f64 {
    let y = x / 2.0;
    if df.is_multiple_of(2) {
        let mut term = (-y).exp();
        let mut sum = term;
        for k in 1..df / 2 {
            term *= y / f64::from(k);
            sum += term;
        }
        sum
    } else {
        let mut sum = libm::erfc(y.sqrt());
        let mut term = (-y).exp() * y.sqrt() / (std::f64::consts::PI.sqrt() / 2.0);
        for k in 1..=(df - 1) / 2 {
            sum += term;
            term *= y / (f64::from(k) + 0.5);
        }
        sum
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    Distribution::<f64>::sample(&StandardNormal, rng)
}

/// Fraction of `reps` null replications with `p <= 0.05`.
fn rejection_rate(reps: usize, mut p_of: impl FnMut(usize) -> f64) -> f64 {
    (0..reps).filter(|&r| p_of(r) <= 0.05).count() as f64 / reps as f64
}

fn exchangeable_scores(rng: &mut ChaCha8Rng, n: usize) -> PairedScores {
    let (mut a, mut b) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for _ in 0..n {
        let unit = normal(rng);
        a.push(unit + normal(rng));
        b.push(unit + normal(rng));
    }
    PairedScores::from_scores(a, b).unwrap()
}

fn numerics() -> Criterion {
    let mut c = Criterion::new("AC6", "Numerics and significance-test validity");

    let mut worst = 0.0f64;
    for df in 1..=60u32 {
        for i in 0..=800 {
            let x = f64::from(i) * 0.25;
            let want = chi_square_closed_form(x, df);
            let got = chi_square_sf(x, df).unwrap();
            worst = worst.max(((got - want) / want).abs());
        }
    }
    c.check(
        worst <= 1e-10,
        format!("chi_square_sf vs closed form, df <= 60, x <= 200: max rel err {worst:.2e}"),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(612);
    let mut worst = 0.0f64;
    for _ in 0..300 {
        let m = rng.random_range(5..=12);
        let diffs: Vec<f64> = (0..m).map(|_| 0.3 + normal(&mut rng)).collect();
        let ranks: Vec<f64> = {
            let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
            abs.iter()
                .map(|&v| {
                    let below = abs.iter().filter(|&&o| o < v).count() as f64;
                    let eq = abs.iter().filter(|&&o| o == v).count() as f64;
                    below + (eq + 1.0) / 2.0
                })
                .collect()
        };
        let w: f64 = diffs
            .iter()
            .zip(&ranks)
            .filter(|(d, _)| **d > 0.0)
            .map(|(_, r)| r)
            .sum();
        let hits = (0u32..1 << m)
            .filter(|mask| {
                (0..m)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| ranks[i])
                    .sum::<f64>()
                    >= w
            })
            .count();
        let enumerated = hits as f64 / f64::from(1u32 << m);
        let normal_p = wilcoxon_test(&diffs, Alternative::Greater, WilcoxonMethod::Normal)
            .unwrap()
            .p_value;
        worst = worst.max((enumerated - normal_p).abs());
    }
    c.check(
        worst <= 0.02,
        format!("Wilcoxon normal vs enumeration, m in 5..=12: max abs diff {worst:.4}"),
    );

    let mut mismatches = 0;
    let mut row = vec![1u128];
    for n in 1..=100usize {
        let mut next = vec![1u128; n + 1];
        for k in 1..n {
            next[k] = row[k - 1] + row[k];
        }
        row = next;
        for b in 0..=n {
            let tail: u128 = row[b.max(n - b)..].iter().sum();
            let want = (2.0 * libm::ldexp(tail as f64, -(n as i32))).min(1.0);
            let counts = ContingencyCounts::new(0, (n - b) as u64, b as u64, 0).unwrap();
            mismatches += usize::from(mcnemar(&counts, McNemarMode::Exact).unwrap() != want);
        }
    }
    c.check(
        mismatches == 0,
        format!("McNemar exact vs binomial tail, n <= 100: {mismatches} mismatches"),
    );

    let reps = 2000;
    let mut rates: Vec<(&str, f64)> = Vec::new();

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    rates.push((
        "paired bootstrap (n=40, size 40, 500 resamples)",
        rejection_rate(reps, |r| {
            let s = exchangeable_scores(&mut rng, 40);
            paired_bootstrap(&s, 40, 500, r as u64).unwrap()
        }),
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    rates.push((
        "Wilcoxon exact path (n=15)",
        rejection_rate(reps, |_| {
            wilcoxon_signed_rank(&exchangeable_scores(&mut rng, 15), Alternative::Greater).unwrap()
        }),
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    rates.push((
        "Wilcoxon normal path (n=40)",
        rejection_rate(reps, |_| {
            wilcoxon_signed_rank(&exchangeable_scores(&mut rng, 40), Alternative::Greater).unwrap()
        }),
    ));
    for (label, mode, seed) in [
        ("McNemar exact (n=80)", McNemarMode::Exact, 4u64),
        (
            "McNemar chi-squared cc (n=80)",
            McNemarMode::ChiSquaredCc,
            5,
        ),
    ] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rates.push((
            label,
            rejection_rate(reps, |_| {
                let mut counts = ContingencyCounts::default();
                for _ in 0..80 {
                    match (rng.random_bool(0.7), rng.random_bool(0.7)) {
                        (false, false) => counts.n00 += 1,
                        (false, true) => counts.n01 += 1,
                        (true, false) => counts.n10 += 1,
                        (true, true) => counts.n11 += 1,
                    }
                }
                mcnemar(&counts, mode).unwrap_or(1.0)
            }),
        ));
    }
    for (label, spearman, seed) in [
        ("Steiger on Pearson r (n=50)", false, 6u64),
        ("Steiger on Spearman rho (n=50)", true, 7),
    ] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rates.push((
            label,
            rejection_rate(reps, |_| {
                let (mut g, mut a, mut b) = (Vec::new(), Vec::new(), Vec::new());
                for _ in 0..50 {
                    let gold = normal(&mut rng);
                    g.push(gold);
                    a.push(0.6 * gold + 0.8 * normal(&mut rng));
                    b.push(0.6 * gold + 0.8 * normal(&mut rng));
                }
                let t = if spearman {
                    CorrelationTriple::from_spearman(&g, &a, &b)
                } else {
                    CorrelationTriple::from_pearson(&g, &a, &b)
                }
                .unwrap();
                steiger_dependent_corr(&t, Alternative::Greater).unwrap()
            }),
        ));
    }
    for (label, rate) in rates {
        c.check(
            rate <= 0.07,
            format!("{label}: P(p <= 0.05) = {rate:.4} <= 0.07 over {reps} null replications"),
        );
    }
    c
}

fn main() -> ExitCode {
    let criteria = [
        published_triples(),
        holm_markers(),
        simulation_criterion(
            "AC3",
            "Independent-null simulation (N=100, 1000 reps, alpha=0.05)",
            SimulationSpec::independent(100, 1000, 0.05, 2017),
            false,
            (0.963, 0.001, 0.021),
            Duration::from_secs(30),
        ),
        simulation_criterion(
            "AC4",
            "Block-dependent null simulation (34 + 33@0.2 + 33@0.5, 1000 reps)",
            SimulationSpec::block_dependent(1000, 0.05, 2017),
            true,
            (0.943, 0.046, 0.234),
            Duration::from_secs(60),
        ),
        property_suite(),
        numerics(),
    ];
    let mut failed = 0;
    for c in &criteria {
        if !c.report() {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
