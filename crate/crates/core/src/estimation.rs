//! Estimation of control-arm event probabilities and the between-endpoint
//! correlation.
//!
//! The blinded estimator only sees pooled counts. With the odds ratios fixed
//! at their design values, each pooled probability is a known mixture
//! `pi * p0 + (1 - pi) * treated_prob(p0, or)` which is inverted for `p0`;
//! the pooled union frequency then pins down the correlation. The unblinded
//! variant reads the control arm directly and is kept for comparison only:
//! selecting on it inflates the type 1 error of the final test.

use serde::{Deserialize, Serialize};

use crate::design::treated_prob;
use crate::error::{Arm, Error, Result};
use crate::root::bisect;
use crate::trial_model::{valid_correlation_range, CellCounts};

/// Absolute tolerance of the pooled-mixture inversion.
pub const CONTROL_PROB_TOL: f64 = 1e-10;
pub const CONTROL_PROB_MAX_ITER: u32 = 60;
const BRACKET: (f64, f64) = (1e-12, 1.0 - 1e-12);

/// Treatment-blinded interim data: pooled counts of each event and of their
/// union.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlindedSummary {
    n_tilde: u64,
    n0_tilde: u64,
    c1: u64,
    c2: u64,
    c_star: u64,
}

impl BlindedSummary {
    /// `n_tilde` subjects of which `n0_tilde` are (by design) controls;
    /// `c1`, `c2` and `c_star` count the first event, the second event and
    /// their union.
    pub fn new(n_tilde: u64, n0_tilde: u64, c1: u64, c2: u64, c_star: u64) -> Result<Self> {
        if n0_tilde == 0 || n0_tilde >= n_tilde {
            return Err(Error::invalid(format!(
                "control count {n0_tilde} must lie strictly between 0 and n_tilde = {n_tilde}"
            )));
        }
        if c1 > n_tilde || c2 > n_tilde {
            return Err(Error::invalid(format!(
                "event counts must not exceed n_tilde: c1 = {c1}, c2 = {c2}, n_tilde = {n_tilde}"
            )));
        }
        if c_star < c1.max(c2) {
            return Err(Error::invalid(format!(
                "union count below a component count (c_star >= max(c1, c2)): c_star = {c_star}, c1 = {c1}, c2 = {c2}"
            )));
        }
        if c_star > (c1 + c2).min(n_tilde) {
            return Err(Error::invalid(format!(
                "union count too large (c_star <= min(c1 + c2, n_tilde)): c_star = {c_star}, c1 = {c1}, c2 = {c2}, n_tilde = {n_tilde}"
            )));
        }
        Ok(BlindedSummary { n_tilde, n0_tilde, c1, c2, c_star })
    }

    /// Pools two arms' cell counts, hiding the treatment labels.
    pub fn from_arms(control: &CellCounts, treated: &CellCounts) -> Result<Self> {
        let pooled = *control + *treated;
        BlindedSummary::new(pooled.total(), control.total(), pooled.x1(), pooled.x2(), pooled.union())
    }

    pub fn n_tilde(&self) -> u64 {
        self.n_tilde
    }

    pub fn n0_tilde(&self) -> u64 {
        self.n0_tilde
    }

    pub fn c1(&self) -> u64 {
        self.c1
    }

    pub fn c2(&self) -> u64 {
        self.c2
    }

    pub fn c_star(&self) -> u64 {
        self.c_star
    }

    /// Control fraction of the blinded sample.
    pub fn control_fraction(&self) -> f64 {
        self.n0_tilde as f64 / self.n_tilde as f64
    }
}

/// Estimated event probabilities per arm and the shared correlation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlindedEstimates {
    pub p1_control: f64,
    pub p2_control: f64,
    pub p1_treated: f64,
    pub p2_treated: f64,
    /// Correlation clamped to the range admissible in both arms.
    pub rho: f64,
    /// Correlation before clamping.
    pub rho_raw: f64,
}

fn clamp_half_count(p: f64, n: u64) -> f64 {
    let half = 0.5 / n as f64;
    p.clamp(half, 1.0 - half)
}

/// Control-arm probability whose mixture with the implied treated-arm
/// probability equals `pooled_p`.
pub fn estimate_control_prob(pooled_p: f64, odds_ratio: f64, pi: f64) -> Result<f64> {
    if !(pooled_p > 0.0 && pooled_p < 1.0) {
        return Err(Error::DegenerateEstimate(format!("pooled event probability {pooled_p} on the boundary")));
    }
    if odds_ratio.is_nan() || odds_ratio <= 0.0 || pi.is_nan() || pi <= 0.0 || pi >= 1.0 {
        return Err(Error::invalid(format!(
            "odds ratio {odds_ratio} and allocation {pi} must be positive, allocation below 1"
        )));
    }
    let mixture = |p0: f64| pi * p0 + (1.0 - pi) * treated_prob(p0, odds_ratio) - pooled_p;
    bisect(mixture, BRACKET.0, BRACKET.1, CONTROL_PROB_TOL, CONTROL_PROB_MAX_ITER)
        .map(|b| b.root)
        .ok_or_else(|| Error::DegenerateEstimate(format!("pooled probability {pooled_p} outside the invertible range")))
}

fn clamp_to_arms(rho_raw: f64, p1c: f64, p2c: f64, p1t: f64, p2t: f64) -> f64 {
    valid_correlation_range(p1c, p2c).intersect(&valid_correlation_range(p1t, p2t)).clamp(rho_raw)
}

/// Blinded estimates from pooled counts and the pre-specified odds ratios.
pub fn estimate_blinded(summary: &BlindedSummary, or1: f64, or2: f64) -> Result<BlindedEstimates> {
    let n = summary.n_tilde;
    if summary.c_star == 0 || summary.c_star == n {
        return Err(Error::DegenerateEstimate(format!(
            "union event count {} of {n}: correlation not identifiable",
            summary.c_star
        )));
    }
    let nf = n as f64;
    let pi = summary.control_fraction();
    let p1 = clamp_half_count(summary.c1 as f64 / nf, n);
    let p2 = clamp_half_count(summary.c2 as f64 / nf, n);
    let p_star = summary.c_star as f64 / nf;

    let p1c = estimate_control_prob(p1, or1, pi)?;
    let p2c = estimate_control_prob(p2, or2, pi)?;
    let p1t = treated_prob(p1c, or1);
    let p2t = treated_prob(p2c, or2);
    let (w0, w1) = (pi, 1.0 - pi);

    let independent = w0 * (1.0 - (1.0 - p1c) * (1.0 - p2c)) + w1 * (1.0 - (1.0 - p1t) * (1.0 - p2t));
    let spread =
        -w0 * (p1c * p2c * (1.0 - p1c) * (1.0 - p2c)).sqrt() - w1 * (p1t * p2t * (1.0 - p1t) * (1.0 - p2t)).sqrt();
    let rho_raw = (p_star - independent) / spread;

    Ok(BlindedEstimates {
        p1_control: p1c,
        p2_control: p2c,
        p1_treated: p1t,
        p2_treated: p2t,
        rho: clamp_to_arms(rho_raw, p1c, p2c, p1t, p2t),
        rho_raw,
    })
}

/// One subject's arm and responses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubjectRecord {
    pub arm: Arm,
    pub x1: bool,
    pub x2: bool,
}

/// Sample Pearson correlation of the two indicators in one arm, `None` if
/// either column is constant.
fn within_arm_correlation(c: &CellCounts) -> Option<f64> {
    let n = c.total() as f64;
    let (x1, x2) = (c.x1() as f64, c.x2() as f64);
    let var = x1 * (n - x1) * x2 * (n - x2);
    (var > 0.0).then(|| (n * c.n11 as f64 - x1 * x2) / var.sqrt())
}

/// Unblinded estimates from per-arm cell counts.
///
/// Control probabilities are the observed control frequencies (half-count
/// clamped); treated probabilities follow from the design odds ratios. The
/// correlation is the arm-size weighted mean of the within-arm sample
/// correlations, skipping arms where a column is constant.
pub fn estimate_unblinded_counts(
    control: &CellCounts,
    treated: &CellCounts,
    or1: f64,
    or2: f64,
) -> Result<BlindedEstimates> {
    let (n0, n1) = (control.total(), treated.total());
    if n0 < 2 || n1 < 2 {
        return Err(Error::invalid(format!("each arm needs at least 2 subjects, got {n0} control and {n1} treated")));
    }
    let p1c = clamp_half_count(control.x1() as f64 / n0 as f64, n0);
    let p2c = clamp_half_count(control.x2() as f64 / n0 as f64, n0);
    let p1t = treated_prob(p1c, or1);
    let p2t = treated_prob(p2c, or2);

    let (mut weighted, mut weight) = (0.0, 0.0);
    for arm in [control, treated] {
        if let Some(r) = within_arm_correlation(arm) {
            weighted += arm.total() as f64 * r;
            weight += arm.total() as f64;
        }
    }
    if weight == 0.0 {
        return Err(Error::DegenerateEstimate("an endpoint is constant within both arms".into()));
    }
    let rho_raw = weighted / weight;
    Ok(BlindedEstimates {
        p1_control: p1c,
        p2_control: p2c,
        p1_treated: p1t,
        p2_treated: p2t,
        rho: clamp_to_arms(rho_raw, p1c, p2c, p1t, p2t),
        rho_raw,
    })
}

/// Unblinded estimates from per-subject records.
pub fn estimate_unblinded(records: &[SubjectRecord], or1: f64, or2: f64) -> Result<BlindedEstimates> {
    let mut control = CellCounts::default();
    let mut treated = CellCounts::default();
    for r in records {
        match r.arm {
            Arm::Control => control.record(r.x1, r.x2),
            Arm::Treated => treated.record(r.x1, r.x2),
        }
    }
    estimate_unblinded_counts(&control, &treated, or1, or2)
}
