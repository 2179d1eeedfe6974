use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use replicability::core::{
    analyze_with, Alternative, Block, ComparisonSet, Dependence, Fixture, MethodChoice,
    ReplicabilityReport, SimulationSpec, FIXTURES,
};
use replicability::input::{FileFormat, Payload};
use replicability::{
    dataset_pvalues, parse_input, render_report, render_simulation, run_simulation_parallel,
    OutputFormat, TestKind, TestOptions,
};

/// Replicability analysis across multiple datasets: how many datasets show a
/// real difference between two algorithms, and which ones.
#[derive(Parser)]
#[command(name = "replicability", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a file of per-dataset p-values (columns: dataset, p_value).
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        analysis: AnalysisArgs,
        #[arg(long, value_enum, default_value_t = DependenceArg::Unknown)]
        dependence: DependenceArg,
        #[arg(long, value_enum)]
        input_format: Option<FileFormat>,
    },
    /// Compute per-dataset p-values from paired scores, then analyze them
    /// (columns: dataset, unit_id, score_a, score_b[, gold]).
    Test {
        scores_file: PathBuf,
        /// Significance test; may also be given in a JSON document as `test`.
        #[arg(long = "test", value_enum)]
        test: Option<TestKind>,
        /// Direction in terms of A minus B [default: greater; two-sided for mcnemar].
        #[arg(long, value_enum)]
        alternative: Option<AlternativeArg>,
        /// Units per bootstrap resample [default: the dataset size].
        #[arg(long)]
        bootstrap_size: Option<usize>,
        /// Bootstrap resamples [default: 1000].
        #[arg(long)]
        reps: Option<usize>,
        /// Bootstrap seed [default: 0].
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        analysis: AnalysisArgs,
        #[arg(long, value_enum, default_value_t = DependenceArg::Unknown)]
        dependence: DependenceArg,
        #[arg(long, value_enum)]
        input_format: Option<FileFormat>,
    },
    /// Estimate P(k̂ > k) for each estimator by simulating null p-values.
    Simulate {
        #[arg(long, value_enum, default_value_t = Scenario::Independent)]
        scenario: Scenario,
        /// Number of hypotheses in the independent scenario.
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// Custom correlation block SIZE:RHO; repeat to add blocks. Overrides --scenario.
        #[arg(long = "block", value_parser = parse_block)]
        blocks: Vec<Block>,
        /// Overestimation threshold k.
        #[arg(long, default_value_t = 0)]
        true_k: usize,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
    },
    /// Analyze one of the bundled example comparisons.
    Reproduce {
        #[arg(value_parser = fixture_names())]
        fixture: String,
        #[command(flatten)]
        analysis: AnalysisArgs,
        /// Override the fixture's dependence assumption.
        #[arg(long, value_enum)]
        dependence: Option<DependenceArg>,
    },
}

#[derive(Args)]
struct AnalysisArgs {
    /// Significance level.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Estimator to headline; auto picks Fisher for independent datasets and
    /// Bonferroni otherwise.
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    #[arg(long, value_enum, default_value_t = OutputFormat::Markdown)]
    format: OutputFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum DependenceArg {
    Independent,
    Unknown,
}

impl From<DependenceArg> for Dependence {
    fn from(d: DependenceArg) -> Self {
        match d {
            DependenceArg::Independent => Dependence::Independent,
            DependenceArg::Unknown => Dependence::DependentUnknown,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Bonferroni,
    Fisher,
}

impl From<MethodArg> for MethodChoice {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => MethodChoice::Auto,
            MethodArg::Bonferroni => MethodChoice::Bonferroni,
            MethodArg::Fisher => MethodChoice::Fisher,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlternativeArg {
    Greater,
    Less,
    TwoSided,
}

impl From<AlternativeArg> for Alternative {
    fn from(a: AlternativeArg) -> Self {
        match a {
            AlternativeArg::Greater => Alternative::Greater,
            AlternativeArg::Less => Alternative::Less,
            AlternativeArg::TwoSided => Alternative::TwoSided,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Scenario {
    /// N independent p-values.
    Independent,
    /// 34 independent, 33 with rho = 0.2 and 33 with rho = 0.5.
    Dependent,
}

fn parse_block(s: &str) -> std::result::Result<Block, String> {
    let (size, rho) = s
        .split_once(':')
        .ok_or_else(|| format!("expected SIZE:RHO, got `{s}`"))?;
    Ok(Block {
        size: size
            .trim()
            .parse()
            .map_err(|e| format!("block size `{size}`: {e}"))?,
        rho: rho
            .trim()
            .parse()
            .map_err(|e| format!("block rho `{rho}`: {e}"))?,
    })
}

fn fixture_names() -> clap::builder::PossibleValuesParser {
    clap::builder::PossibleValuesParser::new(FIXTURES.iter().map(|f| f.name))
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn finish(
    set: &ComparisonSet,
    name: String,
    analysis: &AnalysisArgs,
    notes: Vec<String>,
) -> Result<String> {
    let mut report: ReplicabilityReport =
        analyze_with(set, analysis.alpha, analysis.method.into())?;
    report.comparison_name = name;
    report.warnings.extend(notes);
    Ok(render_report(&report, analysis.format))
}

fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Analyze {
            file,
            analysis,
            dependence,
            input_format,
        } => {
            let format = input_format.unwrap_or_else(|| FileFormat::from_path(&file));
            let doc = parse_input(&file, format)
                .with_context(|| format!("reading {}", file.display()))?;
            let Some(set) = doc.comparison_set(dependence.into()) else {
                bail!(
                    "{} holds paired scores; use `replicability test` to compute p-values first",
                    file.display()
                );
            };
            finish(&set?, file_stem(&file), &analysis, Vec::new())
        }
        Command::Test {
            scores_file,
            test,
            alternative,
            bootstrap_size,
            reps,
            seed,
            analysis,
            dependence,
            input_format,
        } => {
            let format = input_format.unwrap_or_else(|| FileFormat::from_path(&scores_file));
            let doc = parse_input(&scores_file, format)
                .with_context(|| format!("reading {}", scores_file.display()))?;
            let Payload::PairedScores(groups) = &doc.payload else {
                bail!(
                    "{} holds p-values, not paired scores; use `replicability analyze`",
                    scores_file.display()
                );
            };
            let Some(test) = test.or(doc.declared_test) else {
                bail!(
                    "no significance test chosen; pass --test bootstrap|wilcoxon|mcnemar|steiger"
                );
            };
            let params = &doc.test_params;
            let mut options = TestOptions::new(test);
            if let Some(a) = alternative.map(Alternative::from).or(params.alternative) {
                options.alternative = a;
            }
            options.bootstrap_size = bootstrap_size.or(params.bootstrap_size);
            options.repetitions = reps.or(params.reps).unwrap_or(options.repetitions);
            options.seed = seed.or(params.seed).unwrap_or(options.seed);

            let pvalues = dataset_pvalues(groups, &options)?;
            let set = ComparisonSet::new(
                pvalues.iter().map(|p| p.dataset.clone()).collect(),
                pvalues.iter().map(|p| p.p_value).collect(),
                dependence.into(),
            )?;
            let name = format!(
                "{} ({}, {})",
                file_stem(&scores_file),
                test.name(),
                alternative_name(options.alternative)
            );
            let notes = pvalues.into_iter().filter_map(|p| p.note).collect();
            finish(&set, name, &analysis, notes)
        }
        Command::Simulate {
            scenario,
            n,
            blocks,
            true_k,
            reps,
            seed,
            alpha,
            format,
        } => {
            let mut spec = match scenario {
                Scenario::Independent => SimulationSpec::independent(n, reps, alpha, seed),
                Scenario::Dependent => SimulationSpec::block_dependent(reps, alpha, seed),
            };
            if !blocks.is_empty() {
                spec.n_hypotheses = blocks.iter().map(|b| b.size).sum();
                spec.blocks = blocks;
            }
            spec.true_k = true_k;
            let outcome = run_simulation_parallel(&spec)?;
            Ok(render_simulation(&spec, &outcome, format))
        }
        Command::Reproduce {
            fixture,
            analysis,
            dependence,
        } => {
            let fx = Fixture::by_name(&fixture)?;
            let dep = dependence.map_or(fx.dependence, Dependence::from);
            let mut report = analyze_with(
                &fx.comparison_set().with_dependence(dep),
                analysis.alpha,
                analysis.method.into(),
            )?;
            report.comparison_name = fx.comparison.to_string();
            Ok(render_report(&report, analysis.format))
        }
    }
}

fn alternative_name(a: Alternative) -> &'static str {
    match a {
        Alternative::Greater => "greater",
        Alternative::Less => "less",
        Alternative::TwoSided => "two-sided",
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(output) => {
            print!("{output}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
