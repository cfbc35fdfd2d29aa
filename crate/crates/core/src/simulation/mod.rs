//! Simulation harness: data generation, missingness, replication and the
//! registry of named scenarios.

mod generator;
mod presets;
mod scenario;

pub use generator::{
    apply_missingness, binormal_curve, generate_population, true_roc_on_grid, GeneratorSpec, MissingMechanism, Model,
};
pub use presets::{find_preset, presets, Preset};
pub use scenario::{
    replication_data, replication_rng, run_scenario, EstimatorSummary, PerPopulation, PropensityMode,
    ReplicationCurves, ScenarioConfig, ScenarioReport, SCENARIO_METHODS,
};
