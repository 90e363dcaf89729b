//! Monte Carlo sweeps over placement sizes, mapping systems and multicast
//! parameters, with CSV/JSON output.

mod config;
mod dataset;
mod ecdf;
mod output;
mod run;
mod seed;

pub use config::{CatalogueSpec, ExperimentConfig, Grids, System};
pub use dataset::{Metrics, ResultRow, ResultsDataset, RowKey};
pub use ecdf::{ecdf, ecdf_at, EcdfPoint};
pub use output::{
    emit_results, read_manifest, read_results, Format, Manifest, ECDF_FILE, JSON_FILE,
    MANIFEST_FILE, METRICS_FILE,
};
pub use run::{run_experiment, run_experiment_with, run_scenario, Scenario};
pub use seed::derive_rng;
