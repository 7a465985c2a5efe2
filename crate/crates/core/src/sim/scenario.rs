use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::adaptive::{keep_plan, select_and_reassess, select_from_estimates, AdaptivePlan, SelectedEndpoint};
use crate::design::{
    control_size, round_to_allocation, sample_size_composite, sample_size_single, wald_logor_test, DesignConfig,
};
use crate::error::{Error, Result};
use crate::estimation::{estimate_unblinded_counts, BlindedSummary};
use crate::rng::stream_rng;
use crate::trial_model::{arm_models, sample_cell_counts, ArmModel, CellCounts, EndpointSpec};

/// Trial design compared in the simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Design {
    /// Composite endpoint fixed as primary.
    #[serde(rename = "CD")]
    Composite,
    /// Most relevant endpoint fixed as primary.
    #[serde(rename = "RD")]
    Relevant,
    /// Primary endpoint selected from interim data.
    #[serde(rename = "AD")]
    Adaptive,
}

impl Design {
    pub const ALL: [Design; 3] = [Design::Composite, Design::Relevant, Design::Adaptive];

    pub fn label(&self) -> &'static str {
        match self {
            Design::Composite => "CD",
            Design::Relevant => "RD",
            Design::Adaptive => "AD",
        }
    }
}

impl fmt::Display for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Design {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "CD" => Ok(Design::Composite),
            "RD" => Ok(Design::Relevant),
            "AD" => Ok(Design::Adaptive),
            other => Err(format!("unknown design {other:?}, expected CD, RD or AD")),
        }
    }
}

/// Which endpoint the initial sample size is computed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizingBasis {
    /// Most relevant endpoint.
    Relevant,
    /// Composite endpoint assuming uncorrelated components.
    CompositeRho0,
}

impl SizingBasis {
    pub fn label(&self) -> &'static str {
        match self {
            SizingBasis::Relevant => "relevant",
            SizingBasis::CompositeRho0 => "composite_rho0",
        }
    }
}

/// Data the adaptive design may look at when selecting.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    #[default]
    Blinded,
    Unblinded,
}

/// One simulated configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Design-stage assumptions (sizing and estimation use these).
    pub assumed: (EndpointSpec, EndpointSpec),
    /// Parameters generating the data.
    pub truth: (EndpointSpec, EndpointSpec),
    pub rho_true: f64,
    /// Fraction of the planned sample observed at selection.
    pub omega: f64,
    pub design: Design,
    pub reassess: bool,
    pub sizing_basis: SizingBasis,
    pub estimator: Estimator,
    pub cfg: DesignConfig,
    pub replications: u64,
    pub seed: u64,
    /// Random stream id. Scenarios sharing a stream see identical trial
    /// data as far as their sample sizes agree.
    pub stream: u64,
}

impl Scenario {
    /// Alternative-hypothesis scenario with truth equal to the assumptions.
    pub fn alternative(e1: EndpointSpec, e2: EndpointSpec, rho_true: f64, design: Design) -> Self {
        Scenario {
            assumed: (e1, e2),
            truth: (e1, e2),
            rho_true,
            omega: 1.0,
            design,
            reassess: false,
            sizing_basis: SizingBasis::Relevant,
            estimator: Estimator::Blinded,
            cfg: DesignConfig::default(),
            replications: 10_000,
            seed: 0,
            stream: 0,
        }
    }

    /// Same scenario simulated under the global null.
    pub fn under_null(&self) -> Self {
        Scenario { truth: (self.truth.0.under_null(), self.truth.1.under_null()), ..self.clone() }
    }

    pub fn is_global_null(&self) -> bool {
        self.truth.0.odds_ratio() == 1.0 && self.truth.1.odds_ratio() == 1.0
    }

    /// Label used in reports for the design column.
    pub fn design_label(&self) -> String {
        match (self.design, self.estimator) {
            (Design::Adaptive, Estimator::Unblinded) => "AD-unblinded".to_string(),
            (d, _) => d.label().to_string(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        if self.cfg.arms != 1 {
            return Err(Error::invalid("the simulator covers two-arm trials only"));
        }
        if !(self.omega > 0.0 && self.omega <= 1.0) {
            return Err(Error::invalid(format!("omega = {} must lie in (0, 1]", self.omega)));
        }
        if self.replications == 0 {
            return Err(Error::invalid("at least one replication is required"));
        }
        arm_models(&self.truth.0, &self.truth.1, self.rho_true)?;
        arm_models(&self.assumed.0, &self.assumed.1, self.rho_true)?;
        Ok(())
    }

    /// Planned total sample size under the sizing basis.
    pub fn plan_initial_n(&self) -> Result<u64> {
        let (e1, e2) = &self.assumed;
        match self.sizing_basis {
            SizingBasis::Relevant => sample_size_single(e1.p0(), e1.odds_ratio(), &self.cfg),
            SizingBasis::CompositeRho0 => sample_size_composite(e1, e2, 0.0, &self.cfg),
        }
    }

    pub fn prepare(&self) -> Result<PreparedScenario> {
        self.validate()?;
        let planned_n = self.plan_initial_n()?;
        let interim_n = if self.omega >= 1.0 {
            planned_n
        } else {
            round_to_allocation(self.omega * planned_n as f64, self.cfg.allocation).min(planned_n)
        };
        let (control, treated) = arm_models(&self.truth.0, &self.truth.1, self.rho_true)?;
        let planned_endpoint = match self.sizing_basis {
            SizingBasis::Relevant => SelectedEndpoint::Relevant,
            SizingBasis::CompositeRho0 => SelectedEndpoint::COMPOSITE,
        };
        Ok(PreparedScenario {
            scenario: self.clone(),
            planned_n,
            interim_n,
            control,
            treated,
            plan: AdaptivePlan {
                relevant: self.assumed.0,
                additional: self.assumed.1,
                planned_n,
                planned_endpoint,
                reassess: self.reassess,
            },
        })
    }
}

/// Result of one simulated trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub reject: bool,
    pub final_n: u64,
    pub selected: SelectedEndpoint,
}

/// Scenario with its sample sizes and arm models resolved.
#[derive(Debug, Clone)]
pub struct PreparedScenario {
    pub scenario: Scenario,
    pub planned_n: u64,
    pub interim_n: u64,
    control: ArmModel,
    treated: ArmModel,
    plan: AdaptivePlan,
}

impl PreparedScenario {
    /// Simulates replication `index`.
    ///
    /// Subjects are drawn in two stages, the first `interim_n` and then the
    /// rest up to the final size, with exact block allocation to control.
    /// All designs sharing a stream draw identical first stages.
    pub fn simulate_trial(&self, index: u64) -> Result<TrialOutcome> {
        let s = &self.scenario;
        let pi = s.cfg.allocation;
        let mut rng = stream_rng(s.seed, s.stream, index);

        let n0_interim = control_size(self.interim_n, pi);
        let n1_interim = self.interim_n - n0_interim;
        let stage1_control = sample_cell_counts(&self.control.joint, n0_interim, &mut rng);
        let stage1_treated = sample_cell_counts(&self.treated.joint, n1_interim, &mut rng);

        let (selected, final_n) = match s.design {
            Design::Composite => (SelectedEndpoint::COMPOSITE, self.planned_n),
            Design::Relevant => (SelectedEndpoint::Relevant, self.planned_n),
            Design::Adaptive => {
                let outcome = match s.estimator {
                    Estimator::Blinded => {
                        let summary = BlindedSummary::from_arms(&stage1_control, &stage1_treated)?;
                        select_and_reassess(&summary, &self.plan, &s.cfg)
                    }
                    Estimator::Unblinded => {
                        let (or1, or2) = (self.plan.relevant.odds_ratio(), self.plan.additional.odds_ratio());
                        match estimate_unblinded_counts(&stage1_control, &stage1_treated, or1, or2) {
                            Ok(est) => select_from_estimates(&est, &self.plan, &s.cfg, self.interim_n),
                            Err(e) => keep_plan(&self.plan, self.interim_n, e.to_string()),
                        }
                    }
                };
                (outcome.selected, outcome.n_a.max(self.interim_n))
            }
        };

        let n0_final = control_size(final_n, pi).max(n0_interim);
        let n1_final = (final_n - n0_final).max(n1_interim);
        let control = stage1_control + sample_cell_counts(&self.control.joint, n0_final - n0_interim, &mut rng);
        let treated = stage1_treated + sample_cell_counts(&self.treated.joint, n1_final - n1_interim, &mut rng);

        let events = |c: &CellCounts| match selected {
            SelectedEndpoint::Relevant => c.x1(),
            SelectedEndpoint::Composite { .. } => c.union(),
        };
        let test = wald_logor_test(
            events(&control),
            control.total(),
            events(&treated),
            treated.total(),
            s.cfg.comparison_alpha(),
        )?;
        Ok(TrialOutcome { reject: test.reject, final_n: control.total() + treated.total(), selected })
    }
}

/// Simulates one replication of `scenario`.
pub fn simulate_trial(scenario: &Scenario, index: u64) -> Result<TrialOutcome> {
    scenario.prepare()?.simulate_trial(index)
}
