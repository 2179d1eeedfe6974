//! File ingestion, report rendering and parallel simulation on top of
//! [`replicability_core`].
//!
//! The `replicability` binary wires these together; see `--help`.

pub mod input;
pub mod paired;
pub mod parallel;
pub mod render;

pub use input::{
    parse_input, parse_str, FileFormat, InputDocument, InputError, InputKind, Payload,
};
pub use paired::{dataset_pvalues, DatasetPValue, TestKind, TestOptions};
pub use parallel::run_simulation_parallel;
pub use render::{render_report, render_simulation, OutputFormat, SimulationReport};

pub use replicability_core as core;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Core(#[from] replicability_core::Error),
    #[error("dataset `{dataset}`: {source}")]
    Dataset {
        dataset: String,
        #[source]
        source: replicability_core::Error,
    },
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
