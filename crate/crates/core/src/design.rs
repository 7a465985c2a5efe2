//! Wald test on the log odds ratio scale and the sample size formulas built
//! on it. Composite parameters follow from the two components.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, ContinuousCDF, Discrete, Normal};

use crate::error::{Arm, Error, Result};
use crate::trial_model::{check_probability, valid_correlation_range, EndpointSpec};

fn standard_normal() -> Normal {
    Normal::standard()
}

/// Lower-tail quantile of the standard normal distribution.
pub fn normal_quantile(p: f64) -> f64 {
    standard_normal().inverse_cdf(p)
}

/// Global trial design settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignConfig {
    /// One-sided significance level of the whole trial.
    pub alpha: f64,
    /// Target power `1 - beta`.
    pub power: f64,
    /// Fraction of each comparison's subjects allocated to control.
    pub allocation: f64,
    /// Number of treatment arms sharing the control.
    pub arms: u32,
}

impl Default for DesignConfig {
    fn default() -> Self {
        DesignConfig { alpha: 0.05, power: 0.8, allocation: 0.5, arms: 1 }
    }
}

impl DesignConfig {
    pub fn new(alpha: f64, power: f64, allocation: f64, arms: u32) -> Result<Self> {
        let cfg = DesignConfig { alpha, power, allocation, arms };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(Error::invalid(format!("alpha = {} must lie in (0, 0.5)", self.alpha)));
        }
        if !(self.power > 0.5 && self.power < 1.0) {
            return Err(Error::invalid(format!("power = {} must lie in (0.5, 1)", self.power)));
        }
        check_probability("allocation", self.allocation)?;
        if self.arms == 0 {
            return Err(Error::invalid("at least one treatment arm is required"));
        }
        Ok(())
    }

    /// Bonferroni-adjusted level of each treatment-control comparison.
    pub fn comparison_alpha(&self) -> f64 {
        self.alpha / f64::from(self.arms)
    }

    /// Rejection threshold for the test statistic (lower-tail quantile).
    pub fn critical_value(&self) -> f64 {
        normal_quantile(self.comparison_alpha())
    }

    /// `(z_alpha + z_beta)^2` with both quantiles taken as magnitudes.
    pub fn z_factor(&self) -> f64 {
        let z_alpha = -normal_quantile(self.comparison_alpha());
        let z_beta = -normal_quantile(1.0 - self.power);
        (z_alpha + z_beta).powi(2)
    }

    /// Same design with a different number of treatment arms.
    pub fn with_arms(&self, arms: u32) -> Self {
        DesignConfig { arms, ..*self }
    }
}

/// Outcome of a one-sided Wald test for a reduction in the odds of the event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub log_or_hat: f64,
    pub reject: bool,
    /// Whether the half-count correction was applied to the 2x2 table.
    pub corrected: bool,
}

/// Wald test of the log odds ratio, treated (`x1` of `n1`) versus control
/// (`x0` of `n0`), rejecting when the statistic falls below the
/// `alpha`-quantile.
///
/// When any cell of the 2x2 table is empty, 0.5 is added to all four cells.
pub fn wald_logor_test(x0: u64, n0: u64, x1: u64, n1: u64, alpha: f64) -> Result<TestResult> {
    if n0 < 2 || n1 < 2 || x0 > n0 || x1 > n1 {
        return Err(Error::invalid(format!("invalid 2x2 table: {x0}/{n0} control, {x1}/{n1} treated")));
    }
    let mut cells = [x0 as f64, (n0 - x0) as f64, x1 as f64, (n1 - x1) as f64];
    let corrected = cells.contains(&0.0);
    if corrected {
        for c in &mut cells {
            *c += 0.5;
        }
    }
    let [a, b, c, d] = cells;
    let log_or_hat = (c / d).ln() - (a / b).ln();
    // 1/(n p q) = 1/events + 1/non-events
    let se = (1.0 / a + 1.0 / b + 1.0 / c + 1.0 / d).sqrt();
    let statistic = log_or_hat / se;
    Ok(TestResult { statistic, log_or_hat, reject: statistic < normal_quantile(alpha), corrected })
}

/// Exact rejection probability of [`wald_logor_test`] when the control and
/// treated event probabilities are `p0` and `p1`, enumerating both binomial
/// counts. Count pairs with probability below 1e-18 are skipped.
pub fn exact_rejection_prob(p0: f64, p1: f64, n0: u64, n1: u64, alpha: f64) -> Result<f64> {
    check_probability("p0", p0)?;
    check_probability("p1", p1)?;
    let pmf = |n: u64, p: f64| -> Result<Vec<f64>> {
        let b = Binomial::new(p, n).map_err(|e| Error::invalid(e.to_string()))?;
        Ok((0..=n).map(|x| b.pmf(x)).collect())
    };
    let (w0, w1) = (pmf(n0, p0)?, pmf(n1, p1)?);
    let mut total = 0.0;
    for (x0, &a) in w0.iter().enumerate() {
        for (x1, &b) in w1.iter().enumerate() {
            if a * b < 1e-18 {
                continue;
            }
            if wald_logor_test(x0 as u64, n0, x1 as u64, n1, alpha)?.reject {
                total += a * b;
            }
        }
    }
    Ok(total)
}

/// Treated-arm event probability for control probability `p0` and odds
/// ratio `odds_ratio`.
pub fn treated_prob(p0: f64, odds_ratio: f64) -> f64 {
    let odds = odds_ratio * p0 / (1.0 - p0);
    odds / (1.0 + odds)
}

/// Unrounded total sample size for a two-arm comparison; infinite when
/// there is no effect.
pub fn required_size(p0: f64, odds_ratio: f64, cfg: &DesignConfig) -> f64 {
    let log_or = odds_ratio.ln();
    if log_or == 0.0 {
        return f64::INFINITY;
    }
    let pi = cfg.allocation;
    let p1 = treated_prob(p0, odds_ratio);
    cfg.z_factor() / log_or.powi(2) * (1.0 / (pi * p0 * (1.0 - p0)) + 1.0 / ((1.0 - pi) * p1 * (1.0 - p1)))
}

/// Smallest integer total at or above `raw` that splits into integer arm
/// sizes under allocation `pi`.
///
/// Falls back to the plain ceiling when `pi` has no small denominator.
pub fn round_to_allocation(raw: f64, pi: f64) -> u64 {
    let start = (raw - 1e-9).ceil().max(2.0) as u64;
    (start..start + 10_000)
        .find(|&n| {
            let control = pi * n as f64;
            let whole = control.round();
            (control - whole).abs() < 1e-9 && whole >= 1.0 && whole < n as f64
        })
        .unwrap_or(start)
}

/// Control-arm size of a trial with `total` subjects under allocation `pi`.
pub fn control_size(total: u64, pi: f64) -> u64 {
    ((pi * total as f64).round() as u64).clamp(1, total.saturating_sub(1))
}

/// Total sample size for testing an endpoint with control probability `p0`
/// and odds ratio `odds_ratio`, rounded up to whole arms.
pub fn sample_size_single(p0: f64, odds_ratio: f64, cfg: &DesignConfig) -> Result<u64> {
    check_probability("control event probability", p0)?;
    if odds_ratio == 1.0 {
        return Err(Error::EffectAbsent);
    }
    let raw = required_size(p0, odds_ratio, cfg);
    if !raw.is_finite() {
        return Err(Error::EffectAbsent);
    }
    Ok(round_to_allocation(raw, cfg.allocation))
}

/// Probability of the union of two events with marginals `p1`, `p2` and
/// correlation `rho`.
pub fn composite_event_prob(p1: f64, p2: f64, rho: f64) -> Result<f64> {
    check_probability("p1", p1)?;
    check_probability("p2", p2)?;
    let range = valid_correlation_range(p1, p2);
    if !(rho.is_finite() && range.contains(rho)) {
        return Err(Error::RhoOutOfBounds { rho, lower: range.lower, upper: range.upper, arm: None });
    }
    let (q1, q2) = (1.0 - p1, 1.0 - p2);
    Ok(1.0 - q1 * q2 - rho * (p1 * p2 * q1 * q2).sqrt())
}

/// Composite endpoint as a single endpoint: its control probability and
/// odds ratio, assuming the same correlation in both arms.
pub fn composite_endpoint(e1: &EndpointSpec, e2: &EndpointSpec, rho: f64) -> Result<EndpointSpec> {
    let control = composite_event_prob(e1.p0(), e2.p0(), rho).map_err(|e| e.in_arm(Arm::Control))?;
    let treated =
        composite_event_prob(e1.treated_prob(), e2.treated_prob(), rho).map_err(|e| e.in_arm(Arm::Treated))?;
    let odds_ratio = (treated / (1.0 - treated)) / (control / (1.0 - control));
    EndpointSpec::new(control, odds_ratio)
}

/// Odds ratio of the composite endpoint.
pub fn composite_odds_ratio(e1: &EndpointSpec, e2: &EndpointSpec, rho: f64) -> Result<f64> {
    composite_endpoint(e1, e2, rho).map(|c| c.odds_ratio())
}

/// Unrounded composite sample size; infinite when the composite has no
/// effect.
pub fn required_size_composite(e1: &EndpointSpec, e2: &EndpointSpec, rho: f64, cfg: &DesignConfig) -> Result<f64> {
    let c = composite_endpoint(e1, e2, rho)?;
    Ok(required_size(c.p0(), c.odds_ratio(), cfg))
}

/// Total sample size when the composite endpoint is primary.
pub fn sample_size_composite(e1: &EndpointSpec, e2: &EndpointSpec, rho: f64, cfg: &DesignConfig) -> Result<u64> {
    let c = composite_endpoint(e1, e2, rho)?;
    if (c.odds_ratio() - 1.0).abs() < 1e-14 {
        return Err(Error::EffectAbsent);
    }
    sample_size_single(c.p0(), c.odds_ratio(), cfg)
}

/// Trial total for `cfg.arms` treatment arms sharing one control, given the
/// size of a single treatment-control comparison.
pub fn multiarm_total(n_per_comparison: u64, cfg: &DesignConfig) -> u64 {
    if cfg.arms <= 1 {
        return n_per_comparison;
    }
    let m = f64::from(cfg.arms);
    let total = n_per_comparison as f64 * (m - (m - 1.0) * cfg.allocation);
    (total - 1e-9).ceil() as u64
}
