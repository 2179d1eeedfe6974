use rayon::prelude::*;

use replicability_core::simulation::{run_replication, SimulationOutcome, SimulationSpec};
use replicability_core::Result;

/// Same result as [`replicability_core::run_simulation`], with replications
/// spread over the rayon thread pool. Each replication draws from its own
/// random stream, so the outcome does not depend on scheduling.
pub fn run_simulation_parallel(spec: &SimulationSpec) -> Result<SimulationOutcome> {
    spec.validate()?;
    let results = (0..spec.replications)
        .into_par_iter()
        .map(|r| run_replication(spec, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(SimulationOutcome::from_results(spec, results))
}
