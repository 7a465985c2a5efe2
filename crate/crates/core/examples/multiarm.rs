//! Shared-control trial with several treatment arms: one endpoint chosen
//! for all comparisons, each tested at alpha / M.
//!
//! Run: `cargo run --example multiarm`

use endpoint_select::{
    multiarm_select, multiarm_total, sample_size_composite, AdaptivePlan, BlindedSummary, DesignConfig, EndpointSpec,
    SelectedEndpoint,
};

fn main() -> endpoint_select::Result<()> {
    let relevant = EndpointSpec::new(0.615, 0.52)?;
    let additional = EndpointSpec::new(0.15, 0.66)?;

    for arms in 1..=3 {
        let cfg = DesignConfig::default().with_arms(arms);
        let per_comparison = sample_size_composite(&relevant, &additional, 0.0, &cfg)?;
        let total = multiarm_total(per_comparison, &cfg);
        let plan = AdaptivePlan {
            relevant,
            additional,
            planned_n: total,
            planned_endpoint: SelectedEndpoint::COMPOSITE,
            reassess: true,
        };
        // Blinded look at half the planned total, control share pi / (M - (M - 1) pi).
        let look = total / 2;
        let n_control =
            (look as f64 * cfg.allocation / (f64::from(arms) - f64::from(arms - 1) * cfg.allocation)) as u64;
        let summary = BlindedSummary::new(look, n_control, look * 53 / 100, look * 13 / 100, look * 58 / 100)?;
        let out = multiarm_select(&summary, &plan, &cfg);
        println!(
            "M = {arms}: alpha per comparison {:.4}, planned total {total}, select {}, reassessed total {}",
            cfg.comparison_alpha(),
            out.selected,
            out.n_a
        );
    }

    let cfg = DesignConfig::default().with_arms(2);
    println!("240 per comparison with two arms and pi = 0.5 needs {} in total", multiarm_total(240, &cfg));
    Ok(())
}
