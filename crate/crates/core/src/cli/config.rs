//! Configuration files.
//!
//! TOML, parsed strictly: unknown keys and out-of-range values are errors
//! reported with their line and column.

use std::path::Path;

use serde::de::{self, Deserializer};
use serde::Deserialize;

use crate::adaptive::SelectedEndpoint;
use crate::design::DesignConfig;
use crate::estimation::BlindedSummary;
use crate::sim::{Design, DesignRow, Estimator, GridSpec, Hypothesis};
use crate::trial_model::EndpointSpec;

use super::CliError;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDesign {
    alpha: f64,
    power: f64,
    #[serde(default = "half")]
    allocation: f64,
    #[serde(default = "one")]
    arms: u32,
}

fn half() -> f64 {
    0.5
}

fn one() -> u32 {
    1
}

fn design_config<'de, D: Deserializer<'de>>(d: D) -> Result<DesignConfig, D::Error> {
    let raw = RawDesign::deserialize(d)?;
    DesignConfig::new(raw.alpha, raw.power, raw.allocation, raw.arms).map_err(de::Error::custom)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEndpoint {
    p0: f64,
    odds_ratio: f64,
}

fn endpoint<'de, D: Deserializer<'de>>(d: D) -> Result<EndpointSpec, D::Error> {
    let raw = RawEndpoint::deserialize(d)?;
    EndpointSpec::new(raw.p0, raw.odds_ratio).map_err(de::Error::custom)
}

fn correlations<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
    let values = Vec::<f64>::deserialize(d)?;
    if let Some(bad) = values.iter().find(|r| !(-1.0..=1.0).contains(*r)) {
        return Err(de::Error::custom(format!("correlation {bad} outside [-1, 1]")));
    }
    Ok(values)
}

/// Inputs of `design-calc`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignCalcConfig {
    #[serde(deserialize_with = "design_config")]
    pub design: DesignConfig,
    #[serde(deserialize_with = "endpoint")]
    pub relevant: EndpointSpec,
    #[serde(deserialize_with = "endpoint")]
    pub additional: EndpointSpec,
    #[serde(deserialize_with = "correlations")]
    pub rho: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBlinded {
    n_tilde: u64,
    n_control: u64,
    events_relevant: u64,
    events_additional: u64,
    events_composite: u64,
}

fn blinded<'de, D: Deserializer<'de>>(d: D) -> Result<BlindedSummary, D::Error> {
    let r = RawBlinded::deserialize(d)?;
    BlindedSummary::new(r.n_tilde, r.n_control, r.events_relevant, r.events_additional, r.events_composite)
        .map_err(de::Error::custom)
}

fn selected_endpoint<'de, D: Deserializer<'de>>(d: D) -> Result<SelectedEndpoint, D::Error> {
    match String::deserialize(d)?.as_str() {
        "relevant" => Ok(SelectedEndpoint::Relevant),
        "composite" => Ok(SelectedEndpoint::COMPOSITE),
        other => Err(de::Error::custom(format!("unknown endpoint {other:?}, expected \"relevant\" or \"composite\""))),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSection {
    pub planned_n: u64,
    #[serde(deserialize_with = "selected_endpoint")]
    pub planned_endpoint: SelectedEndpoint,
    pub reassess: bool,
}

/// Inputs of `select`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectConfig {
    #[serde(deserialize_with = "design_config")]
    pub design: DesignConfig,
    #[serde(deserialize_with = "endpoint")]
    pub relevant: EndpointSpec,
    #[serde(deserialize_with = "endpoint")]
    pub additional: EndpointSpec,
    #[serde(deserialize_with = "blinded")]
    pub blinded: BlindedSummary,
    pub plan: PlanSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    p1_0: Vec<f64>,
    p2_0: Vec<f64>,
    or1: Vec<f64>,
    or2: Vec<f64>,
    #[serde(deserialize_with = "correlations")]
    rho: Vec<f64>,
    #[serde(default)]
    rows: Vec<DesignRow>,
    #[serde(default = "all_designs")]
    designs: Vec<Design>,
    #[serde(default = "alternative_only")]
    hypotheses: Vec<Hypothesis>,
}

fn all_designs() -> Vec<Design> {
    Design::ALL.to_vec()
}

fn alternative_only() -> Vec<Hypothesis> {
    vec![Hypothesis::Alternative]
}

/// Inputs of `simulate`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(default = "default_reps")]
    replications: u64,
    #[serde(default)]
    estimator: Estimator,
    #[serde(deserialize_with = "design_config")]
    design: DesignConfig,
    grid: GridSection,
}

fn default_seed() -> u64 {
    super::DEFAULT_SEED
}

fn default_reps() -> u64 {
    10_000
}

impl SimulateConfig {
    pub fn into_grid(self) -> GridSpec {
        GridSpec {
            p1_0: self.grid.p1_0,
            p2_0: self.grid.p2_0,
            or1: self.grid.or1,
            or2: self.grid.or2,
            rho: self.grid.rho,
            rows: self.grid.rows,
            designs: self.grid.designs,
            hypotheses: self.grid.hypotheses,
            estimator: self.estimator,
            cfg: self.design,
            replications: self.replications,
            seed: self.seed,
        }
    }
}

/// Reads and parses a TOML file.
pub fn load<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text).map_err(|msg| CliError::Config(format!("{}: {msg}", path.display())))
}

/// Parses TOML text; the error message carries the offending line.
pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, String> {
    toml::from_str(text).map_err(|e| {
        let line = e.span().map(|span| text[..span.start.min(text.len())].matches('\n').count() + 1);
        match line {
            Some(line) => format!("line {line}: {}", e.message()),
            None => e.message().to_string(),
        }
    })
}
