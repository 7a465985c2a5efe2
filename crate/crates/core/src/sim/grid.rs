use serde::{Deserialize, Serialize};

use crate::design::DesignConfig;
use crate::error::Error;
use crate::sim::scenario::{Design, Estimator, Scenario, SizingBasis};
use crate::trial_model::{arm_models, EndpointSpec};

/// Sizing and selection timing shared by the designs of one comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignRow {
    pub sizing: SizingBasis,
    pub omega: f64,
    pub reassess: bool,
}

impl DesignRow {
    /// Selection at the planned end, sized for the relevant endpoint.
    pub const END_OF_TRIAL: DesignRow = DesignRow { sizing: SizingBasis::Relevant, omega: 1.0, reassess: false };
    /// Selection at half the planned size with reassessment, sized for the
    /// composite at zero correlation.
    pub const INTERIM_REASSESS: DesignRow =
        DesignRow { sizing: SizingBasis::CompositeRho0, omega: 0.5, reassess: true };
    /// Selection at half the planned size without reassessment.
    pub const INTERIM_FIXED: DesignRow = DesignRow { sizing: SizingBasis::Relevant, omega: 0.5, reassess: false };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    /// Data generated with the assumed odds ratios.
    Alternative,
    /// Same sizing, data generated with both odds ratios equal to 1.
    Null,
}

/// Cartesian parameter grid crossed with design rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub p1_0: Vec<f64>,
    pub p2_0: Vec<f64>,
    pub or1: Vec<f64>,
    pub or2: Vec<f64>,
    pub rho: Vec<f64>,
    pub rows: Vec<DesignRow>,
    pub designs: Vec<Design>,
    pub hypotheses: Vec<Hypothesis>,
    #[serde(default)]
    pub estimator: Estimator,
    pub cfg: DesignConfig,
    pub replications: u64,
    pub seed: u64,
}

impl GridSpec {
    /// Full factorial grid of the reference simulation study.
    pub fn reference(replications: u64, seed: u64) -> Self {
        GridSpec {
            p1_0: vec![0.1, 0.2],
            p2_0: vec![0.1, 0.25],
            or1: vec![0.6, 0.8, 1.0],
            or2: vec![0.75, 0.8, 1.0],
            rho: (0..=8).map(|i| f64::from(i) / 10.0).collect(),
            rows: vec![DesignRow::END_OF_TRIAL, DesignRow::INTERIM_REASSESS, DesignRow::INTERIM_FIXED],
            designs: Design::ALL.to_vec(),
            hypotheses: vec![Hypothesis::Alternative, Hypothesis::Null],
            estimator: Estimator::Blinded,
            cfg: DesignConfig::default(),
            replications,
            seed,
        }
    }

    /// The reference grid restricted to effects in both components.
    pub fn reference_alternatives(replications: u64, seed: u64) -> Self {
        GridSpec { or1: vec![0.6, 0.8], or2: vec![0.75, 0.8], ..GridSpec::reference(replications, seed) }
    }
}

/// Expanded grid and what was left out of it.
#[derive(Debug, Clone, PartialEq)]
pub struct GridBuild {
    pub scenarios: Vec<Scenario>,
    /// Parameter combinations whose correlation is infeasible in some arm.
    pub dropped_invalid_rho: usize,
    /// (combination, row) pairs whose sizing endpoint has no effect.
    pub dropped_no_effect: usize,
}

impl GridBuild {
    /// Distinct parameter settings, counting one per stream.
    pub fn settings(&self) -> usize {
        let mut streams: Vec<u64> = self.scenarios.iter().map(|s| s.stream).collect();
        streams.dedup();
        streams.len()
    }
}

/// Expands `spec` in a fixed order: `p1_0`, `p2_0`, `or1`, `or2`, `rho`,
/// row, hypothesis, design. All designs of one setting share a random
/// stream. Null scenarios are generated only for settings with an effect in
/// both components and reuse the alternative's sizing.
pub fn build_grid(spec: &GridSpec) -> Result<GridBuild, Error> {
    spec.cfg.validate()?;
    let mut scenarios = Vec::new();
    let mut dropped_invalid_rho = 0;
    let mut dropped_no_effect = 0;
    let mut stream = 0u64;

    for &p1 in &spec.p1_0 {
        for &p2 in &spec.p2_0 {
            for &or1 in &spec.or1 {
                for &or2 in &spec.or2 {
                    let e1 = EndpointSpec::new(p1, or1)?;
                    let e2 = EndpointSpec::new(p2, or2)?;
                    let both_effects = or1 != 1.0 && or2 != 1.0;
                    for &rho in &spec.rho {
                        if arm_models(&e1, &e2, rho).is_err() {
                            dropped_invalid_rho += 1;
                            continue;
                        }
                        for row in &spec.rows {
                            let base = Scenario {
                                assumed: (e1, e2),
                                truth: (e1, e2),
                                rho_true: rho,
                                omega: row.omega,
                                design: Design::Adaptive,
                                reassess: row.reassess,
                                sizing_basis: row.sizing,
                                estimator: spec.estimator,
                                cfg: spec.cfg,
                                replications: spec.replications,
                                seed: spec.seed,
                                stream: 0,
                            };
                            if base.plan_initial_n().is_err() {
                                dropped_no_effect += 1;
                                continue;
                            }
                            for hyp in &spec.hypotheses {
                                let truth = match hyp {
                                    Hypothesis::Alternative => base.clone(),
                                    Hypothesis::Null if both_effects => base.under_null(),
                                    Hypothesis::Null => continue,
                                };
                                for &design in &spec.designs {
                                    scenarios.push(Scenario { design, stream, ..truth.clone() });
                                }
                                stream += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(GridBuild { scenarios, dropped_invalid_rho, dropped_no_effect })
}
