//! Invariants of the joint model and the formulas built on it.

use approx::assert_abs_diff_eq;
use endpoint_select::adaptive::AdaptivePlan;
use endpoint_select::design::{required_size, required_size_composite};
use endpoint_select::trial_model::{arm_models, joint_correlation_range, sample_cell_counts};
use endpoint_select::{
    build_joint, composite_event_prob, composite_odds_ratio, decision_ratio, estimate_blinded, sample_pairs,
    sample_size_composite, select_and_reassess, valid_correlation_range, BlindedSummary, CellCounts, DesignConfig,
    EndpointSpec, SelectedEndpoint,
};
use proptest::prelude::*;

const TABLE_P1: [f64; 2] = [0.1, 0.2];
const TABLE_P2: [f64; 2] = [0.1, 0.25];
const TABLE_OR1: [f64; 3] = [0.6, 0.8, 1.0];
const TABLE_OR2: [f64; 3] = [0.75, 0.8, 1.0];

/// A valid (p1, p2, rho) triple: rho is placed at fraction `t` of the
/// admissible range.
fn triple() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.01f64..0.99, 0.01f64..0.99, 0.0f64..=1.0).prop_map(|(p1, p2, t)| {
        let r = valid_correlation_range(p1, p2);
        (p1, p2, r.lower + t * (r.upper - r.lower))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn composite_prob_matches_joint_cells((p1, p2, rho) in triple()) {
        let joint = build_joint(p1, p2, rho).unwrap();
        let direct = composite_event_prob(p1, p2, rho).unwrap();
        prop_assert!((direct - (1.0 - joint.p00())).abs() <= 1e-12);
    }

    #[test]
    fn joint_cells_are_exact((p1, p2, rho) in triple()) {
        let j = build_joint(p1, p2, rho).unwrap();
        prop_assert!((j.p11() + j.p10() + j.p01() + j.p00() - 1.0).abs() <= 1e-12);
        prop_assert!((j.p1() - p1).abs() <= 1e-12);
        prop_assert!((j.p2() - p2).abs() <= 1e-12);
        prop_assert!((j.correlation().unwrap() - rho).abs() <= 1e-12);
        prop_assert!(j.p11() >= 0.0 && j.p10() >= 0.0 && j.p01() >= 0.0 && j.p00() >= 0.0);
    }
}

proptest! {
    #[test]
    fn range_is_exactly_the_nonnegative_set(p1 in 0.01f64..0.99, p2 in 0.01f64..0.99) {
        let r = valid_correlation_range(p1, p2);
        for bound in [r.lower, r.upper] {
            let j = build_joint(p1, p2, bound).unwrap();
            let min_cell = j.p11().min(j.p10()).min(j.p01()).min(j.p00());
            prop_assert!(min_cell.abs() <= 1e-12, "bound {bound} leaves min cell {min_cell}");
        }
        prop_assert!(build_joint(p1, p2, r.lower - 1e-6).is_err());
        prop_assert!(build_joint(p1, p2, r.upper + 1e-6).is_err());
    }

    #[test]
    fn decision_ratio_ignores_alpha_and_power(
        (p1, p2, _) in triple(),
        or1 in 0.3f64..0.95,
        or2 in 0.3f64..0.95,
        t in 0.0f64..=1.0,
        power in 0.6f64..0.95,
    ) {
        let e1 = EndpointSpec::new(p1, or1).unwrap();
        let e2 = EndpointSpec::new(p2, or2).unwrap();
        let range = joint_correlation_range(&e1, &e2);
        let rho = range.lower + t * (range.upper - range.lower);
        let base = decision_ratio(&e1, &e2, rho, &DesignConfig::default()).unwrap();
        for alpha in [0.01, 0.025, 0.05] {
            let cfg = DesignConfig::new(alpha, power, 0.5, 1).unwrap();
            let d = decision_ratio(&e1, &e2, rho, &cfg).unwrap();
            prop_assert!((d - base).abs() <= 1e-12 * base.max(1.0), "{d} vs {base}");
        }
    }

    #[test]
    fn null_effects_give_null_composite((p1, p2, rho) in triple()) {
        let e1 = EndpointSpec::new(p1, 1.0).unwrap();
        let e2 = EndpointSpec::new(p2, 1.0).unwrap();
        let or_star = composite_odds_ratio(&e1, &e2, rho).unwrap();
        prop_assert!((or_star - 1.0).abs() <= 1e-12);
    }

    /// Any counts satisfying the summary invariants give a clamped estimate,
    /// a reassessed size at least the interim size, and a size no larger than
    /// the worst case at the estimated marginals.
    #[test]
    fn blinded_estimates_are_admissible(
        n in 20u64..5000,
        control_share in 0.2f64..0.8,
        a in 0.0f64..=1.0,
        b in 0.0f64..=1.0,
        c in 0.0f64..=1.0,
        or1 in 0.4f64..0.95,
        or2 in 0.4f64..0.95,
    ) {
        let n0 = ((n as f64 * control_share) as u64).clamp(1, n - 1);
        let c1 = (a * n as f64) as u64;
        let c2 = (b * n as f64) as u64;
        let lo = c1.max(c2);
        let hi = (c1 + c2).min(n);
        let c_star = lo + (c * (hi - lo) as f64) as u64;
        let summary = BlindedSummary::new(n, n0, c1, c2, c_star).unwrap();
        let Ok(est) = estimate_blinded(&summary, or1, or2) else { return Ok(()) };
        let control = valid_correlation_range(est.p1_control, est.p2_control);
        let treated = valid_correlation_range(est.p1_treated, est.p2_treated);
        let admissible = control.intersect(&treated);
        prop_assert!(est.rho >= admissible.lower - 1e-12 && est.rho <= admissible.upper + 1e-12);

        let planned = endpoint_select::interim_size(
            &EndpointSpec::new(0.3, or1).unwrap(),
            &EndpointSpec::new(0.3, or2).unwrap(),
            &DesignConfig::default(),
        ).unwrap();
        let plan = AdaptivePlan {
            relevant: EndpointSpec::new(0.3, or1).unwrap(),
            additional: EndpointSpec::new(0.3, or2).unwrap(),
            planned_n: planned,
            planned_endpoint: SelectedEndpoint::COMPOSITE,
            reassess: true,
        };
        let cfg = DesignConfig::default();
        let out = select_and_reassess(&summary, &plan, &cfg);
        prop_assert!(out.n_a >= n);
        if out.fallback.is_none() {
            let e1 = EndpointSpec::new(est.p1_control, or1).unwrap();
            let e2 = EndpointSpec::new(est.p2_control, or2).unwrap();
            let worst = required_size(e1.p0(), or1, &cfg)
                .max(required_size_composite(&e1, &e2, admissible.upper, &cfg).unwrap());
            let bound = endpoint_select::design::round_to_allocation(worst, cfg.allocation).max(n);
            prop_assert!(out.n_a <= bound, "n_a {} above bound {}", out.n_a, bound);
        }
    }
}

/// At least 100 parameter sets with beneficial effects, 9 correlations each.
#[test]
fn composite_size_nondecreasing_and_ratio_nonincreasing_in_rho() {
    let cfg = DesignConfig::default();
    let probs = [0.05, 0.1, 0.2, 0.3, 0.45];
    let ors = [0.5, 0.6, 0.75, 0.8, 0.9];
    let mut sets = 0;
    for &p1 in &probs {
        for &p2 in &probs {
            for &or1 in &ors {
                for &or2 in &[0.6, 0.8] {
                    let e1 = EndpointSpec::new(p1, or1).unwrap();
                    let e2 = EndpointSpec::new(p2, or2).unwrap();
                    let range = joint_correlation_range(&e1, &e2);
                    let lo = range.lower.max(0.0);
                    let rhos: Vec<f64> = (0..9).map(|i| lo + (range.upper - lo) * f64::from(i) / 8.0).collect();
                    let sizes: Vec<u64> =
                        rhos.iter().map(|&r| sample_size_composite(&e1, &e2, r, &cfg).unwrap()).collect();
                    let ratios: Vec<f64> = rhos.iter().map(|&r| decision_ratio(&e1, &e2, r, &cfg).unwrap()).collect();
                    assert!(sizes.windows(2).all(|w| w[0] <= w[1]), "{p1} {p2} {or1} {or2}: {sizes:?}");
                    assert!(ratios.windows(2).all(|w| w[0] >= w[1] - 1e-12), "{ratios:?}");
                    sets += 1;
                }
            }
        }
    }
    assert!(sets >= 100);
}

#[test]
fn ratio_nonincreasing_on_reference_grid() {
    let cfg = DesignConfig::default();
    for p1 in TABLE_P1 {
        for p2 in TABLE_P2 {
            for or1 in TABLE_OR1 {
                for or2 in TABLE_OR2 {
                    if or1 == 1.0 && or2 == 1.0 {
                        continue;
                    }
                    let e1 = EndpointSpec::new(p1, or1).unwrap();
                    let e2 = EndpointSpec::new(p2, or2).unwrap();
                    let d: Vec<f64> = (0..=8)
                        .map(|i| f64::from(i) / 10.0)
                        .filter(|&r| arm_models(&e1, &e2, r).is_ok())
                        .map(|r| decision_ratio(&e1, &e2, r, &cfg).unwrap())
                        .collect();
                    assert!(d.windows(2).all(|w| w[0] >= w[1] - 1e-12), "{p1} {p2} {or1} {or2}: {d:?}");
                }
            }
        }
    }
}

/// Pure dilution: an additional component without effect never pays off.
#[test]
fn null_additional_component_never_selected() {
    let cfg = DesignConfig::default();
    let e1 = EndpointSpec::new(0.3, 0.6).unwrap();
    let e2 = EndpointSpec::new(0.3, 1.0).unwrap();
    let range = joint_correlation_range(&e1, &e2);
    for i in 0..=20 {
        let rho = range.upper * f64::from(i) / 20.0;
        assert!(decision_ratio(&e1, &e2, rho, &cfg).unwrap() < 1.0);
    }
}

#[test]
fn sampled_cells_converge() {
    let (p1, p2, rho) = (0.3, 0.2, 0.25);
    let joint = build_joint(p1, p2, rho).unwrap();
    let truth = [joint.p11(), joint.p10(), joint.p01(), joint.p00()];
    let n = 1_000_000usize;
    let seeds = 100;
    let mut within = [0usize; 4];
    for seed in 0..seeds {
        let c = CellCounts::from_pairs(sample_pairs(&joint, n, seed).unwrap());
        let freq = [c.n11, c.n10, c.n01, c.n00].map(|k| k as f64 / n as f64);
        for (cell, (f, p)) in freq.iter().zip(truth).enumerate() {
            within[cell] += usize::from((f - p).abs() <= 3.0 * (p * (1.0 - p) / n as f64).sqrt());
        }
    }
    assert!(within.iter().all(|&w| w >= 99), "seeds within 3 sigma per cell: {within:?}");
}

#[test]
fn cell_count_sampler_matches_pair_sampler_in_law() {
    let joint = build_joint(0.4, 0.35, -0.2).unwrap();
    let mut rng = endpoint_select::rng::stream_rng(5, 0, 0);
    let mut total = CellCounts::default();
    for _ in 0..200 {
        total = total + sample_cell_counts(&joint, 5_000, &mut rng);
    }
    let n = total.total() as f64;
    assert_abs_diff_eq!(total.n11 as f64 / n, joint.p11(), epsilon = 3e-3);
    assert_abs_diff_eq!(total.n00 as f64 / n, joint.p00(), epsilon = 3e-3);
}
