//! Endpoint parameters, the joint law of two binary endpoints within one arm,
//! and sampling of correlated binary responses.
//!
//! A pair of binary endpoints `(X1, X2)` with marginals `p1`, `p2` and Pearson
//! correlation `rho` is represented by its four cell probabilities. The
//! shared-correlation assumption across arms is enforced by building both
//! arms from the same `rho`.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Arm, Error, Result};
use crate::rng::stream_rng;

/// Slack allowed when deciding whether a correlation sits on a Fréchet bound.
const RANGE_SLACK: f64 = 1e-12;

pub(crate) fn check_probability(name: &str, p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} = {p} must lie in (0, 1)")))
    }
}

/// Marginal design parameters of one binary endpoint: the control-arm event
/// probability and the odds ratio of treatment versus control.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointSpec {
    p0: f64,
    odds_ratio: f64,
}

impl EndpointSpec {
    pub fn new(p0: f64, odds_ratio: f64) -> Result<Self> {
        check_probability("control event probability", p0)?;
        if !(odds_ratio > 0.0 && odds_ratio.is_finite()) {
            return Err(Error::invalid(format!("odds ratio {odds_ratio} must be positive and finite")));
        }
        Ok(EndpointSpec { p0, odds_ratio })
    }

    /// Control-arm event probability.
    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn odds_ratio(&self) -> f64 {
        self.odds_ratio
    }

    /// Event probability in the treated arm implied by `p0` and the odds ratio.
    pub fn treated_prob(&self) -> f64 {
        crate::design::treated_prob(self.p0, self.odds_ratio)
    }

    /// The same endpoint with no treatment effect.
    pub fn under_null(&self) -> Self {
        EndpointSpec { p0: self.p0, odds_ratio: 1.0 }
    }
}

/// Closed interval of admissible Pearson correlations for two Bernoulli
/// marginals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRange {
    pub lower: f64,
    pub upper: f64,
}

impl CorrelationRange {
    pub fn contains(&self, rho: f64) -> bool {
        rho >= self.lower - RANGE_SLACK && rho <= self.upper + RANGE_SLACK
    }

    pub fn intersect(&self, other: &CorrelationRange) -> CorrelationRange {
        CorrelationRange { lower: self.lower.max(other.lower), upper: self.upper.min(other.upper) }
    }

    pub fn clamp(&self, rho: f64) -> f64 {
        rho.clamp(self.lower, self.upper)
    }

    fn check(&self, rho: f64) -> Result<()> {
        if rho.is_finite() && self.contains(rho) {
            Ok(())
        } else {
            Err(Error::RhoOutOfBounds { rho, lower: self.lower, upper: self.upper, arm: None })
        }
    }
}

/// Set of correlations for which every cell of [`build_joint`] is
/// nonnegative.
pub fn valid_correlation_range(p1: f64, p2: f64) -> CorrelationRange {
    let (q1, q2) = (1.0 - p1, 1.0 - p2);
    let lower = -((p1 * p2) / (q1 * q2)).sqrt().min(((q1 * q2) / (p1 * p2)).sqrt());
    let upper = ((p1 * q2) / (q1 * p2)).sqrt().min(((q1 * p2) / (p1 * q2)).sqrt());
    CorrelationRange { lower, upper }
}

/// The four cell probabilities of `(X1, X2)` within one arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointBinaryModel {
    p11: f64,
    p10: f64,
    p01: f64,
    p00: f64,
}

impl JointBinaryModel {
    pub fn from_cells(p11: f64, p10: f64, p01: f64, p00: f64) -> Result<Self> {
        let cells = [p11, p10, p01, p00];
        if cells.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::invalid(format!("cell probabilities {cells:?} must be nonnegative")));
        }
        let total: f64 = cells.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("cell probabilities sum to {total}, not 1")));
        }
        Ok(JointBinaryModel { p11, p10, p01, p00 })
    }

    pub fn p11(&self) -> f64 {
        self.p11
    }

    pub fn p10(&self) -> f64 {
        self.p10
    }

    pub fn p01(&self) -> f64 {
        self.p01
    }

    pub fn p00(&self) -> f64 {
        self.p00
    }

    /// Marginal probability of the first endpoint.
    pub fn p1(&self) -> f64 {
        self.p11 + self.p10
    }

    /// Marginal probability of the second endpoint.
    pub fn p2(&self) -> f64 {
        self.p11 + self.p01
    }

    /// Probability of the union event.
    pub fn composite_prob(&self) -> f64 {
        1.0 - self.p00
    }

    /// Pearson correlation of the two indicators, `None` if a marginal is
    /// degenerate.
    pub fn correlation(&self) -> Option<f64> {
        let (p1, p2) = (self.p1(), self.p2());
        let denom = (p1 * (1.0 - p1) * p2 * (1.0 - p2)).sqrt();
        (denom > 0.0).then(|| (self.p11 - p1 * p2) / denom)
    }
}

/// Joint law with marginals `p1`, `p2` and Pearson correlation `rho`.
pub fn build_joint(p1: f64, p2: f64, rho: f64) -> Result<JointBinaryModel> {
    check_probability("p1", p1)?;
    check_probability("p2", p2)?;
    valid_correlation_range(p1, p2).check(rho)?;
    let (q1, q2) = (1.0 - p1, 1.0 - p2);
    let p11 = p1 * p2 + rho * (p1 * q1 * p2 * q2).sqrt();
    // On a bound one cell is zero up to rounding.
    let p11 = p11.clamp(0.0, p1.min(p2));
    let p10 = (p1 - p11).max(0.0);
    let p01 = (p2 - p11).max(0.0);
    let p00 = (1.0 - p11 - p10 - p01).max(0.0);
    Ok(JointBinaryModel { p11, p10, p01, p00 })
}

/// Pearson correlation implied by the conditional probability
/// `cond = P(X2 = 1 | X1 = 1)`.
pub fn corr_from_conditional(p1: f64, p2: f64, cond: f64) -> Result<f64> {
    check_probability("p1", p1)?;
    check_probability("p2", p2)?;
    if !(0.0..=1.0).contains(&cond) {
        return Err(Error::invalid(format!("conditional probability {cond} must lie in [0, 1]")));
    }
    let (q1, q2) = (1.0 - p1, 1.0 - p2);
    let rho = (cond * p1 - p1 * p2) / (p1 * q1 * p2 * q2).sqrt();
    valid_correlation_range(p1, p2).check(rho)?;
    Ok(rho)
}

/// Ground truth for one arm of a simulated trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmModel {
    /// Arm identifier, 0 for control.
    pub label: u32,
    pub joint: JointBinaryModel,
}

/// Control and treated arm models for two endpoints sharing correlation
/// `rho` in both arms.
pub fn arm_models(e1: &EndpointSpec, e2: &EndpointSpec, rho: f64) -> Result<(ArmModel, ArmModel)> {
    let control = build_joint(e1.p0(), e2.p0(), rho).map_err(|e| e.in_arm(Arm::Control))?;
    let treated = build_joint(e1.treated_prob(), e2.treated_prob(), rho).map_err(|e| e.in_arm(Arm::Treated))?;
    Ok((ArmModel { label: 0, joint: control }, ArmModel { label: 1, joint: treated }))
}

/// Intersection of the admissible correlation ranges of both arms.
pub fn joint_correlation_range(e1: &EndpointSpec, e2: &EndpointSpec) -> CorrelationRange {
    valid_correlation_range(e1.p0(), e2.p0()).intersect(&valid_correlation_range(e1.treated_prob(), e2.treated_prob()))
}

/// Tallies of the four response patterns in a group of subjects.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CellCounts {
    pub n11: u64,
    pub n10: u64,
    pub n01: u64,
    pub n00: u64,
}

impl CellCounts {
    pub fn total(&self) -> u64 {
        self.n11 + self.n10 + self.n01 + self.n00
    }

    /// Subjects with the first event.
    pub fn x1(&self) -> u64 {
        self.n11 + self.n10
    }

    /// Subjects with the second event.
    pub fn x2(&self) -> u64 {
        self.n11 + self.n01
    }

    /// Subjects with at least one event.
    pub fn union(&self) -> u64 {
        self.n11 + self.n10 + self.n01
    }

    pub fn record(&mut self, x1: bool, x2: bool) {
        match (x1, x2) {
            (true, true) => self.n11 += 1,
            (true, false) => self.n10 += 1,
            (false, true) => self.n01 += 1,
            (false, false) => self.n00 += 1,
        }
    }

    pub fn from_pairs<I: IntoIterator<Item = (bool, bool)>>(pairs: I) -> Self {
        let mut counts = CellCounts::default();
        for (x1, x2) in pairs {
            counts.record(x1, x2);
        }
        counts
    }
}

impl std::ops::Add for CellCounts {
    type Output = CellCounts;

    fn add(self, rhs: CellCounts) -> CellCounts {
        CellCounts {
            n11: self.n11 + rhs.n11,
            n10: self.n10 + rhs.n10,
            n01: self.n01 + rhs.n01,
            n00: self.n00 + rhs.n00,
        }
    }
}

/// One categorical draw from the four-cell law.
pub fn draw_pair<R: Rng + ?Sized>(model: &JointBinaryModel, rng: &mut R) -> (bool, bool) {
    let u: f64 = rng.random();
    if u < model.p11 {
        (true, true)
    } else if u < model.p11 + model.p10 {
        (true, false)
    } else if u < model.p11 + model.p10 + model.p01 {
        (false, true)
    } else {
        (false, false)
    }
}

/// `n` independent response pairs from `model`, reproducible from `seed`.
pub fn sample_pairs(model: &JointBinaryModel, n: usize, seed: u64) -> Result<Vec<(bool, bool)>> {
    if n == 0 {
        return Err(Error::invalid("sample size must be at least 1"));
    }
    let mut rng = stream_rng(seed, 0, 0);
    Ok((0..n).map(|_| draw_pair(model, &mut rng)).collect())
}

fn binomial<R: Rng + ?Sized>(rng: &mut R, n: u64, p: f64) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p).expect("probability checked above").sample(rng)
}

/// Cell counts of `n` subjects drawn from `model`.
///
/// Exact multinomial law, sampled as a chain of conditional binomials; it is
/// distributed as the tally of `n` calls to [`draw_pair`].
pub fn sample_cell_counts<R: Rng + ?Sized>(model: &JointBinaryModel, n: u64, rng: &mut R) -> CellCounts {
    let n11 = binomial(rng, n, model.p11);
    let rest = 1.0 - model.p11;
    let n10 = if rest > 0.0 { binomial(rng, n - n11, model.p10 / rest) } else { 0 };
    let rest = rest - model.p10;
    let n01 = if rest > 0.0 { binomial(rng, n - n11 - n10, model.p01 / rest) } else { 0 };
    CellCounts { n11, n10, n01, n00: n - n11 - n10 - n01 }
}
