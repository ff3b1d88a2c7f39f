//! Experiment plumbing: config files, the scenario catalog, output files
//! and the property suite behind the `check` command.
//!
//! A run writes three files into the output directory, all named after the
//! scenario: `<stem>_data.csv`, `<stem>_summary.json` and
//! `<stem>_manifest.json`. Data and summary are deterministic functions of
//! the experiment; only the manifest records wall-clock time.

mod checks;
mod config;
mod output;
mod plot;
mod run;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::dynamics::{InitialDistribution, ModelSpec};
use crate::lattice::Topology;

pub use checks::{run_property_suite, PropertyOutcome};
pub use config::{default_output_dir, emit_config, parse_config, parse_config_with_default, OUTPUT_DIR_ENV};
pub use output::{
    CheckRecord, FileDigest, Observation, RunManifest, StreamRecord, Summary, CSV_HEADER,
};
pub use plot::{emit_plot_script, plot_script_for};
pub use run::{run_experiment, run_oracle, RunOutcome};

/// Scenario of the catalog, with the parameters only it uses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id")]
pub enum Scenario {
    /// Density relaxation of the SF process.
    E1,
    /// Freezing above the critical addition rate.
    E2 { epsilon: f64, t_max: f64 },
    /// Stationary density below criticality and the non-product witnesses.
    E3 {
        average_from: f64,
        block_sizes: Vec<usize>,
        block_samples: usize,
    },
    /// Stationary density across an α grid for Glauber or biased flips.
    E4 { alpha_grid: Vec<f64>, average_from: f64 },
    /// SA drift and absorption.
    E5,
    /// SA conservation at α = β, plus the SA block identity.
    E6 {
        block_sizes: Vec<usize>,
        block_samples: usize,
    },
    /// Vanishing time of a lone height-1 site across lattice sizes.
    E7 { sizes: Vec<usize>, window: usize },
    Custom,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::E1 => "E1",
            Scenario::E2 { .. } => "E2",
            Scenario::E3 { .. } => "E3",
            Scenario::E4 { .. } => "E4",
            Scenario::E5 => "E5",
            Scenario::E6 { .. } => "E6",
            Scenario::E7 { .. } => "E7",
            Scenario::Custom => "custom",
        }
    }

    /// Prefix of the output file names.
    pub fn file_stem(&self) -> String {
        self.name().to_lowercase()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub scenario: Scenario,
    pub model: ModelSpec,
    pub topology: Topology,
    pub initial: InitialDistribution,
    pub replicas: usize,
    pub sample_times: Vec<f64>,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Overrides the scenario's default tolerance for its checks.
    pub tolerance: Option<f64>,
    /// Per-replica event budget; exceeding it stops the run and flags the
    /// results as partial.
    pub max_events: Option<u64>,
}

impl ExperimentSpec {
    /// Expected initial density of height-1 sites.
    pub fn initial_density(&self) -> f64 {
        match self.initial {
            InitialDistribution::Product { rho } => rho,
            InitialDistribution::AllOnes => 1.0,
            InitialDistribution::AllTwos => 0.0,
            InitialDistribution::SingleOne { .. } => 1.0 / self.topology.len() as f64,
        }
    }
}

#[cfg(test)]
mod tests;
