//! Why the interim look must stay blinded: selecting the endpoint on
//! unblinded data inflates the type I error, blinded selection does not.
//!
//! Run: `cargo run --release --example unblinded_inflation`

use endpoint_select::sim::{run_scenario, Design, Estimator, Scenario, SizingBasis};
use endpoint_select::EndpointSpec;

fn main() -> endpoint_select::Result<()> {
    let relevant = EndpointSpec::new(0.1, 0.6)?;
    let additional = EndpointSpec::new(0.25, 0.75)?;
    let reps = 20_000;
    println!("global null, adaptive design with reassessment, {reps} trials");
    for rho in [0.0, 0.3, 0.5] {
        let mut rates = Vec::new();
        for estimator in [Estimator::Blinded, Estimator::Unblinded] {
            let scenario = Scenario {
                omega: 0.5,
                reassess: true,
                sizing_basis: SizingBasis::CompositeRho0,
                estimator,
                replications: reps,
                seed: 11,
                ..Scenario::alternative(relevant, additional, rho, Design::Adaptive)
            }
            .under_null();
            let r = run_scenario(&scenario)?;
            rates.push((r.rejection_rate, r.mc_se));
        }
        println!(
            "rho = {rho:.1}: blinded {:.4} (se {:.4}), unblinded {:.4} (se {:.4})",
            rates[0].0, rates[0].1, rates[1].0, rates[1].1
        );
    }
    Ok(())
}
