//! Required sample sizes for the relevant endpoint and the composite as the
//! correlation between components grows, with the resulting choice.
//!
//! Run: `cargo run --example sample_size_curve`

use endpoint_select::design::required_size_composite;
use endpoint_select::trial_model::joint_correlation_range;
use endpoint_select::{
    decision_ratio, interim_size, sample_size_composite, sample_size_single, DesignConfig, EndpointSpec,
    SelectedEndpoint,
};

fn main() -> endpoint_select::Result<()> {
    // One-year survival (relevant) and grade 3-4 complications (additional).
    let relevant = EndpointSpec::new(0.615, 0.52)?;
    let additional = EndpointSpec::new(0.15, 0.66)?;
    let cfg = DesignConfig::default();

    let n1 = sample_size_single(relevant.p0(), relevant.odds_ratio(), &cfg)?;
    let range = joint_correlation_range(&relevant, &additional);
    println!("relevant endpoint alone: n = {n1}");
    println!("admissible correlation: [{:.3}, {:.3}]", range.lower, range.upper);
    println!("{:>5} {:>9} {:>8} {:>10}", "rho", "N*", "d", "choice");

    for i in 0..=6 {
        let rho = 0.05 * f64::from(i);
        let n_star = sample_size_composite(&relevant, &additional, rho, &cfg)?;
        let d = decision_ratio(&relevant, &additional, rho, &cfg)?;
        let choice = if d >= 1.0 { SelectedEndpoint::COMPOSITE } else { SelectedEndpoint::Relevant };
        println!("{rho:>5.2} {n_star:>9} {d:>8.4} {choice:>10}");
    }

    // Unrounded composite size grows with rho, so the ratio falls.
    let raw = |rho| required_size_composite(&relevant, &additional, rho, &cfg);
    println!("unrounded N* at 0 and 0.3: {:.1} and {:.1}", raw(0.0)?, raw(0.3)?);
    println!("blinded interim look after {} patients", interim_size(&relevant, &additional, &cfg)?);
    Ok(())
}
