//! Selection and reassessment on constructed data.

use endpoint_select::adaptive::{keep_plan, recursive_select};
use endpoint_select::rng::stream_rng;
use endpoint_select::trial_model::{arm_models, sample_cell_counts};
use endpoint_select::{
    estimate_blinded, multiarm_select, sample_size_composite, sample_size_single, select_and_reassess, treated_prob,
    AdaptivePlan, BlindedRecords, BlindedSummary, DesignConfig, EndpointSpec, KEndpointPlan, SelectedEndpoint,
};
use rand::Rng;

/// Blinded counts equal to their expectations over a large interim sample.
fn expected_summary(e1: &EndpointSpec, e2: &EndpointSpec, rho: f64, n_arm: u64) -> BlindedSummary {
    let (c, t) = arm_models(e1, e2, rho).unwrap();
    let k = |p: f64| (p * n_arm as f64).round() as u64;
    BlindedSummary::new(
        2 * n_arm,
        n_arm,
        k(c.joint.p1()) + k(t.joint.p1()),
        k(c.joint.p2()) + k(t.joint.p2()),
        k(c.joint.composite_prob()) + k(t.joint.composite_prob()),
    )
    .unwrap()
}

fn peritoneal_plan(reassess: bool) -> AdaptivePlan {
    let relevant = EndpointSpec::new(0.615, 0.52).unwrap();
    let additional = EndpointSpec::new(0.15, 0.66).unwrap();
    AdaptivePlan {
        relevant,
        additional,
        planned_n: sample_size_composite(&relevant, &additional, 0.0, &DesignConfig::default()).unwrap(),
        planned_endpoint: SelectedEndpoint::COMPOSITE,
        reassess,
    }
}

#[test]
fn noiseless_weak_correlation_selects_composite() {
    let plan = peritoneal_plan(true);
    let cfg = DesignConfig::default();
    let summary = expected_summary(&plan.relevant, &plan.additional, 0.05, 50_000_000);
    let out = select_and_reassess(&summary, &plan, &cfg);
    assert_eq!(out.selected, SelectedEndpoint::COMPOSITE);
    let est = out.estimates.unwrap();
    assert!((est.rho - 0.05).abs() < 1e-6);
    let expected = sample_size_composite(&plan.relevant, &plan.additional, 0.05, &cfg).unwrap();
    assert_eq!(out.n_composite, Some(expected));
    assert!(expected >= plan.planned_n);
}

#[test]
fn noiseless_strong_correlation_selects_relevant() {
    let plan = peritoneal_plan(true);
    let cfg = DesignConfig::default();
    let summary = expected_summary(&plan.relevant, &plan.additional, 0.3, 50_000_000);
    let out = select_and_reassess(&summary, &plan, &cfg);
    assert_eq!(out.selected, SelectedEndpoint::Relevant);
    let p1 = out.estimates.unwrap().p1_control;
    let n1 = sample_size_single(p1, 0.52, &cfg).unwrap();
    assert_eq!(out.n_a, n1.max(summary.n_tilde()));
}

#[test]
fn reassessment_off_keeps_planned_size() {
    let plan = peritoneal_plan(false);
    let summary = expected_summary(&plan.relevant, &plan.additional, 0.3, 116);
    let out = select_and_reassess(&summary, &plan, &DesignConfig::default());
    assert_eq!(out.n_a, plan.planned_n);
}

#[test]
fn degenerate_interim_falls_back_to_plan() {
    let plan = peritoneal_plan(true);
    let summary = BlindedSummary::new(232, 116, 0, 0, 0).unwrap();
    let out = select_and_reassess(&summary, &plan, &DesignConfig::default());
    assert_eq!(out, keep_plan(&plan, 232, out.fallback.clone().unwrap()));
    assert_eq!(out.selected, plan.planned_endpoint);
}

/// Two-endpoint recursion is the ordinary procedure on the same data.
#[test]
fn recursion_with_two_endpoints_matches_pairwise_selection() {
    let cfg = DesignConfig::default();
    let mut rng = stream_rng(77, 0, 0);
    for _ in 0..1_000 {
        let p1 = rng.random_range(0.05..0.6);
        let p2 = rng.random_range(0.05..0.6);
        let e1 = EndpointSpec::new(p1, rng.random_range(0.4..0.95)).unwrap();
        let e2 = EndpointSpec::new(p2, rng.random_range(0.4..1.0)).unwrap();
        let range = endpoint_select::trial_model::joint_correlation_range(&e1, &e2);
        let rho = rng.random_range(range.lower.max(-0.2)..=range.upper.min(0.6));
        let n_arm = rng.random_range(20..400);
        let (c, t) = arm_models(&e1, &e2, rho).unwrap();
        let control = sample_cell_counts(&c.joint, n_arm, &mut rng);
        let treated = sample_cell_counts(&t.joint, n_arm, &mut rng);
        let all = control + treated;
        // Bit 0 is the relevant endpoint.
        let records = BlindedRecords::from_counts(2, n_arm, vec![all.n00, all.n10, all.n01, all.n11]).unwrap();
        let plan = AdaptivePlan {
            relevant: e1,
            additional: e2,
            planned_n: 300,
            planned_endpoint: SelectedEndpoint::Relevant,
            reassess: rng.random_bool(0.7),
        };
        let direct = select_and_reassess(&BlindedSummary::from_arms(&control, &treated).unwrap(), &plan, &cfg);
        let recursive = recursive_select(&records, &KEndpointPlan::from(&plan), &cfg);
        assert_eq!(direct, recursive);
    }
}

/// Exact expected pattern counts for independent endpoints.
fn independent_records(endpoints: &[EndpointSpec], n_arm: u64) -> BlindedRecords {
    let k = endpoints.len();
    let mut counts = vec![0u64; 1 << k];
    for treated in [false, true] {
        for (pattern, slot) in counts.iter_mut().enumerate() {
            let prob: f64 = endpoints
                .iter()
                .enumerate()
                .map(|(j, e)| {
                    let p = if treated { treated_prob(e.p0(), e.odds_ratio()) } else { e.p0() };
                    if pattern >> j & 1 == 1 {
                        p
                    } else {
                        1.0 - p
                    }
                })
                .product();
            *slot += (prob * n_arm as f64).round() as u64;
        }
    }
    BlindedRecords::from_counts(k, n_arm, counts).unwrap()
}

#[test]
fn three_beneficial_independent_endpoints_are_all_combined() {
    let e = EndpointSpec::new(0.2, 0.7).unwrap();
    let plan = KEndpointPlan::new(vec![e; 3], 600, SelectedEndpoint::Relevant, true).unwrap();
    let out = recursive_select(&independent_records(&[e; 3], 10_000_000), &plan, &DesignConfig::default());
    assert_eq!(out.selected, SelectedEndpoint::Composite { components: 3 });
}

#[test]
fn null_third_endpoint_stops_the_recursion() {
    let eps = [
        EndpointSpec::new(0.2, 0.6).unwrap(),
        EndpointSpec::new(0.2, 0.6).unwrap(),
        EndpointSpec::new(0.4, 1.0).unwrap(),
    ];
    let plan = KEndpointPlan::new(eps.to_vec(), 600, SelectedEndpoint::Relevant, true).unwrap();
    let out = recursive_select(&independent_records(&eps, 10_000_000), &plan, &DesignConfig::default());
    assert_eq!(out.selected, SelectedEndpoint::COMPOSITE);
    assert!(out.d_value.unwrap() < 1.0);
}

#[test]
fn single_arm_multiarm_is_the_two_arm_procedure() {
    let plan = peritoneal_plan(true);
    let cfg = DesignConfig::default();
    let summary = expected_summary(&plan.relevant, &plan.additional, 0.1, 116);
    assert_eq!(multiarm_select(&summary, &plan, &cfg), select_and_reassess(&summary, &plan, &cfg));
}

#[test]
fn multiarm_uses_split_level_and_shared_control_total() {
    let plan = peritoneal_plan(true);
    let two = DesignConfig::default().with_arms(2);
    let summary = expected_summary(&plan.relevant, &plan.additional, 0.3, 5_000_000);
    let out = multiarm_select(&summary, &plan, &two);
    let est = estimate_blinded(&summary, 0.52, 0.66).unwrap();
    let per_comparison = sample_size_single(est.p1_control, 0.52, &two).unwrap();
    assert_eq!(out.selected, SelectedEndpoint::Relevant);
    assert_eq!(out.n_relevant, Some(endpoint_select::multiarm_total(per_comparison, &two)));
}
