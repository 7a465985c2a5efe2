//! Recursive selection over three endpoints ordered by importance: keep
//! adding the next component while the union lowers the required size.
//!
//! Run: `cargo run --example recursive_three_components`

use endpoint_select::{
    recursive_select, treated_prob, BlindedRecords, DesignConfig, EndpointSpec, KEndpointPlan, SelectedEndpoint,
};

/// Expected pattern counts for independent endpoints in both arms.
fn expected_records(endpoints: &[EndpointSpec], n_arm: u64) -> endpoint_select::Result<BlindedRecords> {
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
    BlindedRecords::from_counts(k, n_arm, counts)
}

fn run(label: &str, endpoints: Vec<EndpointSpec>) -> endpoint_select::Result<()> {
    let cfg = DesignConfig::default();
    let records = expected_records(&endpoints, 250)?;
    let plan = KEndpointPlan::new(endpoints, 600, SelectedEndpoint::Relevant, true)?;
    let out = recursive_select(&records, &plan, &cfg);
    println!(
        "{label}: select {} (d at deciding step {:.3}), final n = {}",
        out.selected,
        out.d_value.unwrap_or(f64::NAN),
        out.n_a
    );
    Ok(())
}

fn main() -> endpoint_select::Result<()> {
    let beneficial = EndpointSpec::new(0.2, 0.7)?;
    run("three equally beneficial, independent", vec![beneficial; 3])?;
    run(
        "third component without effect",
        vec![EndpointSpec::new(0.2, 0.6)?, EndpointSpec::new(0.2, 0.6)?, EndpointSpec::new(0.4, 1.0)?],
    )?;
    Ok(())
}
