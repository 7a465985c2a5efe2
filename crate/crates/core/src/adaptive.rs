//! Endpoint selection and sample size reassessment.
//!
//! The decision ratio compares the sample size needed for the most relevant
//! endpoint with that of the composite; a ratio of at least one selects the
//! composite. Selection runs on estimates from blinded interim data and the
//! design odds ratios, after which the total is recomputed for the selected
//! endpoint and floored at the number of subjects already recruited.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::design::{
    composite_endpoint, multiarm_total, required_size, required_size_composite, round_to_allocation, DesignConfig,
};
use crate::error::{Error, Result};
use crate::estimation::{estimate_blinded, BlindedEstimates, BlindedSummary};
use crate::trial_model::EndpointSpec;

/// Primary endpoint chosen by the adaptive procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectedEndpoint {
    /// The most relevant component alone.
    Relevant,
    /// Union of the first `components` endpoints in importance order.
    Composite { components: usize },
}

impl SelectedEndpoint {
    /// Union of the two endpoints of a two-component design.
    pub const COMPOSITE: SelectedEndpoint = SelectedEndpoint::Composite { components: 2 };

    pub fn is_composite(&self) -> bool {
        matches!(self, SelectedEndpoint::Composite { .. })
    }
}

impl fmt::Display for SelectedEndpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectedEndpoint::Relevant => f.write_str("relevant"),
            SelectedEndpoint::Composite { components: 2 } => f.write_str("composite"),
            SelectedEndpoint::Composite { components } => write!(f, "composite:{components}"),
        }
    }
}

/// Result of one selection and reassessment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionOutcome {
    pub selected: SelectedEndpoint,
    /// Decision ratio at the step that fixed the selection; `None` on fallback.
    pub d_value: Option<f64>,
    /// Reassessed total sample size.
    pub n_a: u64,
    pub estimates: Option<BlindedEstimates>,
    /// Candidate totals at the deciding step, `None` when the candidate has
    /// no effect.
    pub n_relevant: Option<u64>,
    pub n_composite: Option<u64>,
    /// Reason the planned endpoint and size were kept, if estimation failed.
    pub fallback: Option<String>,
}

/// Design-stage inputs of the two-endpoint adaptive procedure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptivePlan {
    /// Assumed parameters of the most relevant endpoint.
    pub relevant: EndpointSpec,
    /// Assumed parameters of the additional component.
    pub additional: EndpointSpec,
    /// Initially planned total sample size.
    pub planned_n: u64,
    /// Endpoint the trial was planned around, kept on fallback.
    pub planned_endpoint: SelectedEndpoint,
    pub reassess: bool,
}

/// How to turn a per-comparison sample size into a trial total.
#[derive(Clone, Copy)]
enum Scale {
    TwoArm,
    SharedControl,
}

impl Scale {
    fn apply(self, n: u64, cfg: &DesignConfig) -> u64 {
        match self {
            Scale::TwoArm => n,
            Scale::SharedControl => multiarm_total(n, cfg),
        }
    }
}

fn finite_round(raw: f64, cfg: &DesignConfig) -> Option<u64> {
    raw.is_finite().then(|| round_to_allocation(raw, cfg.allocation))
}

fn ratio(n_relevant: f64, n_composite: f64) -> Result<f64> {
    match (n_relevant.is_finite(), n_composite.is_finite()) {
        (false, false) => Err(Error::EffectAbsent),
        (false, true) => Ok(f64::INFINITY),
        (true, false) => Ok(0.0),
        (true, true) => Ok(n_relevant / n_composite),
    }
}

/// Ratio of the relevant endpoint's to the composite's required sample
/// size, on unrounded sizes.
pub fn decision_ratio(e1: &EndpointSpec, e2: &EndpointSpec, rho: f64, cfg: &DesignConfig) -> Result<f64> {
    let n1 = required_size(e1.p0(), e1.odds_ratio(), cfg);
    let n_star = required_size_composite(e1, e2, rho, cfg)?;
    ratio(n1, n_star)
}

/// Endpoint selected for a decision ratio.
pub fn select_by_ratio(d: f64) -> SelectedEndpoint {
    if d >= 1.0 {
        SelectedEndpoint::COMPOSITE
    } else {
        SelectedEndpoint::Relevant
    }
}

/// Blinded sample size at which to select: the smaller of the relevant
/// endpoint's size and the composite's size at zero correlation.
pub fn interim_size(e1: &EndpointSpec, e2: &EndpointSpec, cfg: &DesignConfig) -> Result<u64> {
    let n1 = finite_round(required_size(e1.p0(), e1.odds_ratio(), cfg), cfg);
    let n_star = finite_round(required_size_composite(e1, e2, 0.0, cfg)?, cfg);
    match (n1, n_star) {
        (Some(a), Some(b)) => Ok(a.min(b)),
        (Some(a), None) | (None, Some(a)) => Ok(a),
        (None, None) => Err(Error::EffectAbsent),
    }
}

/// Outcome that keeps the planned endpoint and size, recording why.
pub fn keep_plan(plan: &AdaptivePlan, n_tilde: u64, reason: String) -> SelectionOutcome {
    fallback(plan.planned_endpoint, plan.planned_n, n_tilde, reason)
}

fn fallback(plan_endpoint: SelectedEndpoint, planned_n: u64, n_tilde: u64, reason: String) -> SelectionOutcome {
    SelectionOutcome {
        selected: plan_endpoint,
        d_value: None,
        n_a: planned_n.max(n_tilde),
        estimates: None,
        n_relevant: None,
        n_composite: None,
        fallback: Some(reason),
    }
}

fn decide(
    estimates: &BlindedEstimates,
    plan: &AdaptivePlan,
    cfg: &DesignConfig,
    n_tilde: u64,
    scale: Scale,
) -> Result<SelectionOutcome> {
    let e1 = EndpointSpec::new(estimates.p1_control, plan.relevant.odds_ratio())?;
    let e2 = EndpointSpec::new(estimates.p2_control, plan.additional.odds_ratio())?;
    let raw_relevant = required_size(e1.p0(), e1.odds_ratio(), cfg);
    let raw_composite = required_size_composite(&e1, &e2, estimates.rho, cfg)?;
    let d = ratio(raw_relevant, raw_composite)?;
    let selected = select_by_ratio(d);

    let n_relevant = finite_round(raw_relevant, cfg).map(|n| scale.apply(n, cfg));
    let n_composite = finite_round(raw_composite, cfg).map(|n| scale.apply(n, cfg));
    let n_a = if plan.reassess {
        let target = match selected {
            SelectedEndpoint::Relevant => n_relevant,
            SelectedEndpoint::Composite { .. } => n_composite,
        };
        n_tilde.max(target.expect("selected endpoint has a finite size"))
    } else {
        plan.planned_n
    };
    Ok(SelectionOutcome {
        selected,
        d_value: Some(d),
        n_a,
        estimates: Some(*estimates),
        n_relevant,
        n_composite,
        fallback: None,
    })
}

/// Selection and reassessment from already computed estimates.
///
/// Used directly by the unblinded comparison variant; ordinary use goes
/// through [`select_and_reassess`].
pub fn select_from_estimates(
    estimates: &BlindedEstimates,
    plan: &AdaptivePlan,
    cfg: &DesignConfig,
    n_tilde: u64,
) -> SelectionOutcome {
    decide(estimates, plan, cfg, n_tilde, Scale::TwoArm)
        .unwrap_or_else(|e| fallback(plan.planned_endpoint, plan.planned_n, n_tilde, e.to_string()))
}

/// Blinded endpoint selection and optional sample size reassessment for a
/// two-arm trial.
///
/// Estimation failures keep the planned endpoint and size.
pub fn select_and_reassess(summary: &BlindedSummary, plan: &AdaptivePlan, cfg: &DesignConfig) -> SelectionOutcome {
    run_two_endpoint(summary, plan, cfg, Scale::TwoArm)
}

fn run_two_endpoint(
    summary: &BlindedSummary,
    plan: &AdaptivePlan,
    cfg: &DesignConfig,
    scale: Scale,
) -> SelectionOutcome {
    let n_tilde = summary.n_tilde();
    estimate_blinded(summary, plan.relevant.odds_ratio(), plan.additional.odds_ratio())
        .and_then(|est| decide(&est, plan, cfg, n_tilde, scale))
        .unwrap_or_else(|e| fallback(plan.planned_endpoint, plan.planned_n, n_tilde, e.to_string()))
}

/// Shared-control trial with `cfg.arms` treatment arms: one endpoint for all
/// arms, per-comparison sizes at level `alpha / arms`, totals scaled for the
/// shared control.
///
/// The blinded summary pools all arms; its control count fixes the mixture
/// weight.
pub fn multiarm_select(summary: &BlindedSummary, plan: &AdaptivePlan, cfg: &DesignConfig) -> SelectionOutcome {
    run_two_endpoint(summary, plan, cfg, Scale::SharedControl)
}

/// Blinded records of `k` binary endpoints, tallied by response pattern.
///
/// Bit `j` of a pattern is the response of endpoint `j` (importance order).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlindedRecords {
    k: usize,
    n0_tilde: u64,
    counts: Vec<u64>,
}

impl BlindedRecords {
    pub fn from_counts(k: usize, n0_tilde: u64, counts: Vec<u64>) -> Result<Self> {
        if !(2..=16).contains(&k) {
            return Err(Error::invalid(format!("need 2 to 16 endpoints, got {k}")));
        }
        if counts.len() != 1 << k {
            return Err(Error::invalid(format!(
                "expected {} pattern counts for {k} endpoints, got {}",
                1usize << k,
                counts.len()
            )));
        }
        Ok(BlindedRecords { k, n0_tilde, counts })
    }

    /// Tallies per-subject patterns.
    pub fn from_patterns<I: IntoIterator<Item = u32>>(k: usize, n0_tilde: u64, patterns: I) -> Result<Self> {
        let mut counts = vec![0u64; 1 << k.min(16)];
        for p in patterns {
            let slot = counts
                .get_mut(p as usize)
                .ok_or_else(|| Error::invalid(format!("pattern {p:#b} has bits beyond {k} endpoints")))?;
            *slot += 1;
        }
        BlindedRecords::from_counts(k, n0_tilde, counts)
    }

    pub fn endpoints(&self) -> usize {
        self.k
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Records with at least one event among the endpoints in `mask`.
    pub fn count_any(&self, mask: u32) -> u64 {
        self.counts.iter().enumerate().filter(|(pattern, _)| *pattern as u32 & mask != 0).map(|(_, c)| c).sum()
    }

    /// Pooled summary for the union of the first `i` endpoints against
    /// endpoint `i` (zero-based).
    pub fn summary_for_step(&self, i: usize) -> Result<BlindedSummary> {
        let prefix = (1u32 << i) - 1;
        let next = 1u32 << i;
        BlindedSummary::new(
            self.total(),
            self.n0_tilde,
            self.count_any(prefix),
            self.count_any(next),
            self.count_any(prefix | next),
        )
    }
}

/// Design-stage inputs for `K >= 2` endpoints ordered by decreasing
/// importance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KEndpointPlan {
    endpoints: Vec<EndpointSpec>,
    pub planned_n: u64,
    pub planned_endpoint: SelectedEndpoint,
    pub reassess: bool,
}

impl KEndpointPlan {
    pub fn new(
        endpoints: Vec<EndpointSpec>,
        planned_n: u64,
        planned_endpoint: SelectedEndpoint,
        reassess: bool,
    ) -> Result<Self> {
        if endpoints.len() < 2 {
            return Err(Error::invalid("at least two endpoints are required"));
        }
        Ok(KEndpointPlan { endpoints, planned_n, planned_endpoint, reassess })
    }

    pub fn endpoints(&self) -> &[EndpointSpec] {
        &self.endpoints
    }
}

impl From<&AdaptivePlan> for KEndpointPlan {
    fn from(plan: &AdaptivePlan) -> Self {
        KEndpointPlan {
            endpoints: vec![plan.relevant, plan.additional],
            planned_n: plan.planned_n,
            planned_endpoint: plan.planned_endpoint,
            reassess: plan.reassess,
        }
    }
}

/// Recursive selection over `K` endpoints.
///
/// Step `i` compares the composite of the first `i` endpoints, treated as a
/// single endpoint with parameters carried from step `i - 1`, with its union
/// with endpoint `i + 1`; the correlation between the two is estimated from
/// the same blinded records at every step. The first step with a ratio
/// below one fixes the selection, and the total is reassessed for it.
pub fn recursive_select(records: &BlindedRecords, plan: &KEndpointPlan, cfg: &DesignConfig) -> SelectionOutcome {
    let n_tilde = records.total();
    let endpoints = plan.endpoints();
    if records.endpoints() != endpoints.len() {
        return fallback(
            plan.planned_endpoint,
            plan.planned_n,
            n_tilde,
            format!("records carry {} endpoints, plan has {}", records.endpoints(), endpoints.len()),
        );
    }

    // Current candidate: union of the first `level` endpoints (level 1 is
    // the relevant endpoint alone) with its assumed parameters.
    let mut level = 1;
    let mut current = endpoints[0];
    let mut last: Option<SelectionOutcome> = None;

    for (i, next) in endpoints.iter().enumerate().skip(1) {
        let step = records
            .summary_for_step(i)
            .and_then(|summary| estimate_blinded(&summary, current.odds_ratio(), next.odds_ratio()))
            .and_then(|est| {
                let pair = AdaptivePlan {
                    relevant: current,
                    additional: *next,
                    planned_n: plan.planned_n,
                    planned_endpoint: plan.planned_endpoint,
                    reassess: plan.reassess,
                };
                let outcome = decide(&est, &pair, cfg, n_tilde, Scale::TwoArm)?;
                Ok((est, outcome))
            });

        let (est, mut outcome) = match step {
            Ok(v) => v,
            Err(e) if level == 1 => {
                return fallback(plan.planned_endpoint, plan.planned_n, n_tilde, e.to_string());
            }
            Err(e) => {
                // Keep the composite built so far.
                let mut outcome = last.expect("an earlier step succeeded");
                outcome.fallback = Some(e.to_string());
                return outcome;
            }
        };

        if outcome.selected == SelectedEndpoint::Relevant {
            outcome.selected = candidate(level);
            return outcome;
        }

        let merged = EndpointSpec::new(est.p1_control, current.odds_ratio()).and_then(|cur| {
            let add = EndpointSpec::new(est.p2_control, next.odds_ratio())?;
            composite_endpoint(&cur, &add, est.rho)
        });
        level += 1;
        outcome.selected = candidate(level);
        match merged {
            Ok(c) => current = c,
            Err(e) => {
                outcome.fallback = Some(e.to_string());
                return outcome;
            }
        }
        last = Some(outcome);
    }
    last.expect("at least one step ran")
}

fn candidate(level: usize) -> SelectedEndpoint {
    if level == 1 {
        SelectedEndpoint::Relevant
    } else {
        SelectedEndpoint::Composite { components: level }
    }
}
