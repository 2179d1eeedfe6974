//! JSON and markdown output.

use std::fmt::Write;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use replicability_core::report::REPORT_SCHEMA_VERSION;
use replicability_core::{
    Dependence, PcMethod, ReplicabilityReport, SimulationOutcome, SimulationSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Markdown,
}

/// Marker placed next to datasets rejected by Holm.
pub const HOLM_MARKER: &str = "*";

pub fn render_report(report: &ReplicabilityReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => to_json(report),
        OutputFormat::Markdown => report_markdown(report),
    }
}

/// Serialized form of a simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub schema_version: u32,
    pub spec: SimulationSpec,
    pub outcome: SimulationOutcome,
}

pub fn render_simulation(
    spec: &SimulationSpec,
    outcome: &SimulationOutcome,
    format: OutputFormat,
) -> String {
    match format {
        OutputFormat::Json => to_json(&SimulationReport {
            schema_version: REPORT_SCHEMA_VERSION,
            spec: spec.clone(),
            outcome: outcome.clone(),
        }),
        OutputFormat::Markdown => simulation_markdown(spec, outcome),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports contain only finite numbers");
    s.push('\n');
    s
}

fn fmt_p(p: f64) -> String {
    if p == 0.0 {
        "0".into()
    } else if p < 1e-3 {
        format!("{p:.2e}")
    } else {
        format!("{p:.4}")
    }
}

fn estimator_label(m: PcMethod) -> &'static str {
    match m {
        PcMethod::Bonferroni => "Bonferroni",
        PcMethod::Fisher => "Fisher",
    }
}

fn dependence_label(d: Dependence) -> &'static str {
    match d {
        Dependence::Independent => "independent",
        Dependence::DependentUnknown => "dependent (unknown structure)",
    }
}

fn cell(s: &str) -> String {
    s.replace('|', "\\|")
}

fn report_markdown(r: &ReplicabilityReport) -> String {
    let mut out = String::new();
    let title = if r.comparison_name.is_empty() {
        "Replicability analysis".to_string()
    } else {
        format!("Replicability analysis: {}", r.comparison_name)
    };
    let _ = writeln!(out, "# {title}\n");
    let _ = writeln!(
        out,
        "**alpha = {}** | datasets: {} | dependence: {}\n",
        r.alpha,
        r.n_datasets,
        dependence_label(r.dependence)
    );

    let bold = |m: PcMethod, k: usize| {
        if m == r.recommended_estimator {
            format!("**{k}**")
        } else {
            k.to_string()
        }
    };
    out.push_str("| k̂ count | k̂ Bonferroni | k̂ Fisher |\n|---:|---:|---:|\n");
    let _ = writeln!(
        out,
        "| {} | {} | {} |\n",
        r.k_count,
        bold(PcMethod::Bonferroni, r.k_bonferroni),
        bold(PcMethod::Fisher, r.k_fisher)
    );
    let _ = writeln!(
        out,
        "With confidence {:.0}%, at least **{}** of {} datasets show a true effect \
         (k̂ {}, the estimator for {} datasets; bold above).",
        (1.0 - r.alpha) * 100.0,
        r.recommended_k,
        r.n_datasets,
        estimator_label(r.recommended_estimator),
        dependence_label(r.dependence)
    );
    if r.selected_estimator != r.recommended_estimator {
        let _ = writeln!(
            out,
            "Requested estimator: k̂ {} = {}.",
            estimator_label(r.selected_estimator),
            r.selected_k
        );
    }
    out.push_str(
        "k̂ count is the number of datasets with p <= alpha and carries no error guarantee.\n\n",
    );

    out.push_str("## Datasets\n\n");
    out.push_str(
        "| dataset | p-value | rank | Holm threshold | Holm |\n|---|---:|---:|---:|:---:|\n",
    );
    for d in &r.per_dataset {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} |",
            cell(&d.name),
            fmt_p(d.p_value),
            d.rank,
            fmt_p(d.holm_threshold),
            if d.rejected { HOLM_MARKER } else { "" }
        );
    }
    let _ = writeln!(
        out,
        "\n`{HOLM_MARKER}` rejected by Holm's step-down procedure \
         (family-wise error rate <= {}).\n",
        r.alpha
    );
    let list = |names: &[String]| {
        if names.is_empty() {
            "none".to_string()
        } else {
            names.join(", ")
        }
    };
    let _ = writeln!(
        out,
        "Holm identifies {} of {}: {}.",
        r.holm_rejections.len(),
        r.n_datasets,
        list(&r.holm_rejections.rejected)
    );
    let _ = writeln!(
        out,
        "Naive p <= alpha, no FWER guarantee ({}): {}.",
        r.naive_rejections.len(),
        list(&r.naive_rejections.rejected)
    );

    if !r.warnings.is_empty() {
        out.push_str("\n## Warnings\n\n");
        for w in &r.warnings {
            let _ = writeln!(out, "- {w}");
        }
    }
    out
}

fn simulation_markdown(spec: &SimulationSpec, o: &SimulationOutcome) -> String {
    let mut out = String::from("# Null simulation\n\n");
    let blocks: Vec<String> = spec
        .blocks
        .iter()
        .map(|b| format!("{}@rho={}", b.size, b.rho))
        .collect();
    let _ = writeln!(
        out,
        "**alpha = {}** | N = {} | blocks: {} | replications: {} | seed: {} | true k = {}\n",
        o.alpha,
        o.n_hypotheses,
        blocks.join(" + "),
        o.replications_run,
        o.seed,
        o.true_k
    );
    out.push_str("| estimator | P̂(k̂ > k) |\n|---|---:|\n");
    for (name, v) in [
        ("count", o.exceedance.count),
        ("Bonferroni", o.exceedance.bonferroni),
        ("Fisher", o.exceedance.fisher),
    ] {
        let _ = writeln!(out, "| {name} | {v:.3} |");
    }
    out
}
