//! Monte Carlo power of each design as the true correlation varies, plus
//! type I error under the global null.
//!
//! Run: `cargo run --release --example power_simulation`

use endpoint_select::sim::{run_scenario, Design, Scenario, SizingBasis};
use endpoint_select::EndpointSpec;

fn main() -> endpoint_select::Result<()> {
    let relevant = EndpointSpec::new(0.615, 0.52)?;
    let additional = EndpointSpec::new(0.15, 0.66)?;
    let reps = 4_000;

    println!("interim look at half the planned size, reassessment on, {reps} trials each");
    println!("{:>5} {:>7} {:>7} {:>7} {:>9} {:>8}", "rho", "CD", "RD", "AD", "AD mean n", "AD null");
    for rho in [0.0, 0.1, 0.2, 0.3] {
        let mut row = Vec::new();
        let mut mean_n = 0.0;
        let mut null_rate = 0.0;
        for design in Design::ALL {
            let scenario = Scenario {
                omega: 0.5,
                reassess: true,
                sizing_basis: SizingBasis::CompositeRho0,
                replications: reps,
                seed: 7,
                ..Scenario::alternative(relevant, additional, rho, design)
            };
            let result = run_scenario(&scenario)?;
            row.push(result.rejection_rate);
            if design == Design::Adaptive {
                mean_n = result.mean_n;
                null_rate = run_scenario(&scenario.under_null())?.rejection_rate;
            }
        }
        println!("{rho:>5.1} {:>7.3} {:>7.3} {:>7.3} {mean_n:>9.1} {null_rate:>8.3}", row[0], row[1], row[2]);
    }
    Ok(())
}
