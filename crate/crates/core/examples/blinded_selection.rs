//! Interim decision of the adaptive design: estimate from blinded counts,
//! choose the primary endpoint and recompute the sample size.
//!
//! Run: `cargo run --example blinded_selection`

use endpoint_select::{
    interim_size, sample_size_composite, select_and_reassess, AdaptivePlan, BlindedSummary, DesignConfig, EndpointSpec,
    SelectedEndpoint,
};

fn main() -> endpoint_select::Result<()> {
    let relevant = EndpointSpec::new(0.615, 0.52)?;
    let additional = EndpointSpec::new(0.15, 0.66)?;
    let cfg = DesignConfig::default();
    let planned_n = sample_size_composite(&relevant, &additional, 0.0, &cfg)?;
    let look = interim_size(&relevant, &additional, &cfg)?;
    let plan =
        AdaptivePlan { relevant, additional, planned_n, planned_endpoint: SelectedEndpoint::COMPOSITE, reassess: true };
    println!("planned n = {planned_n}, blinded look after {look}");

    // Two interim datasets: weakly and strongly overlapping events.
    for (label, union) in [("weak overlap", 137), ("strong overlap", 126)] {
        let summary = BlindedSummary::new(look, look / 2, 124, 30, union)?;
        let out = select_and_reassess(&summary, &plan, &cfg);
        let rho = out.estimates.map_or(f64::NAN, |e| e.rho);
        println!(
            "{label:>15}: rho_hat = {rho:.3}, d = {:.3}, select {}, final n = {}",
            out.d_value.unwrap_or(f64::NAN),
            out.selected,
            out.n_a
        );
    }

    // Nobody had either event: the estimator cannot work, the plan stands.
    let empty = BlindedSummary::new(look, look / 2, 0, 0, 0)?;
    let out = select_and_reassess(&empty, &plan, &cfg);
    println!("no events: keep {} with n = {} ({})", out.selected, out.n_a, out.fallback.unwrap_or_default());
    Ok(())
}
