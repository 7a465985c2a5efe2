//! Monte Carlo operating characteristics of the composite, relevant and
//! adaptive designs.

mod grid;
mod runner;
mod scenario;

pub use grid::{build_grid, DesignRow, GridBuild, GridSpec, Hypothesis};
pub use runner::{run_scenario, ScenarioResult};
pub use scenario::{simulate_trial, Design, Estimator, PreparedScenario, Scenario, SizingBasis, TrialOutcome};
