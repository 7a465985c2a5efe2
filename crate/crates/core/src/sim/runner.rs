use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::sim::scenario::{Design, PreparedScenario, Scenario};

/// Replications per parallel work unit.
const CHUNK: u64 = 256;

/// Exact integer tallies over replications; merging is associative and
/// commutative, so the aggregate does not depend on scheduling.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    replications: u64,
    rejections: u64,
    composite_selected: u64,
    sum_n: u128,
    sum_n_sq: u128,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            replications: self.replications + o.replications,
            rejections: self.rejections + o.rejections,
            composite_selected: self.composite_selected + o.composite_selected,
            sum_n: self.sum_n + o.sum_n,
            sum_n_sq: self.sum_n_sq + o.sum_n_sq,
        }
    }
}

/// Aggregated Monte Carlo output of one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub scenario: Scenario,
    pub planned_n: u64,
    pub interim_n: u64,
    pub replications: u64,
    pub rejections: u64,
    pub rejection_rate: f64,
    /// `sqrt(r (1 - r) / R)`.
    pub mc_se: f64,
    pub mean_n: f64,
    pub sd_n: f64,
    /// Share of trials testing the composite; adaptive designs only.
    pub prop_composite_selected: Option<f64>,
}

fn run_chunk(prepared: &PreparedScenario, start: u64, end: u64) -> Result<Tally> {
    let mut t = Tally::default();
    for i in start..end {
        let out = prepared.simulate_trial(i)?;
        let n = u128::from(out.final_n);
        t.replications += 1;
        t.rejections += u64::from(out.reject);
        t.composite_selected += u64::from(out.selected.is_composite());
        t.sum_n += n;
        t.sum_n_sq += n * n;
    }
    Ok(t)
}

/// Runs all replications of `scenario` on the current rayon pool.
pub fn run_scenario(scenario: &Scenario) -> Result<ScenarioResult> {
    let prepared = scenario.prepare()?;
    let reps = scenario.replications;
    let chunks = reps.div_ceil(CHUNK);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|c| run_chunk(&prepared, c * CHUNK, ((c + 1) * CHUNK).min(reps)))
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    Ok(summarize(&prepared, tally))
}

fn summarize(prepared: &PreparedScenario, t: Tally) -> ScenarioResult {
    let r = t.replications as f64;
    let rate = t.rejections as f64 / r;
    let mean_n = t.sum_n as f64 / r;
    let sd_n = if t.replications > 1 {
        let reps = u128::from(t.replications);
        // R * sum(n^2) - (sum n)^2 is exact in integers.
        let num = reps * t.sum_n_sq - t.sum_n * t.sum_n;
        (num as f64 / (r * (r - 1.0))).sqrt()
    } else {
        0.0
    };
    let scenario = prepared.scenario.clone();
    let prop_composite_selected = (scenario.design == Design::Adaptive).then(|| t.composite_selected as f64 / r);
    ScenarioResult {
        planned_n: prepared.planned_n,
        interim_n: prepared.interim_n,
        replications: t.replications,
        rejections: t.rejections,
        rejection_rate: rate,
        mc_se: (rate * (1.0 - rate) / r).sqrt(),
        mean_n,
        sd_n,
        prop_composite_selected,
        scenario,
    }
}
