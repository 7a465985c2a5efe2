//! Recovers per-arm event probabilities and the correlation from pooled,
//! treatment-blinded counts.
//!
//! Run: `cargo run --example blinded_estimation`

use endpoint_select::{build_joint, estimate_blinded, estimate_control_prob, treated_prob, BlindedSummary};

fn main() -> endpoint_select::Result<()> {
    let (p1, p2, or1, or2, rho) = (0.2, 0.25, 0.6, 0.8, 0.3);
    let n_arm = 500u64;

    // Exact expected counts in each arm, pooled the way a blinded
    // statistician would see them.
    let control = build_joint(p1, p2, rho)?;
    let treated = build_joint(treated_prob(p1, or1), treated_prob(p2, or2), rho)?;
    let expect = |p: f64| (p * n_arm as f64).round() as u64;
    let c1 = expect(control.p1()) + expect(treated.p1());
    let c2 = expect(control.p2()) + expect(treated.p2());
    let union = expect(control.composite_prob()) + expect(treated.composite_prob());
    let summary = BlindedSummary::new(2 * n_arm, n_arm, c1, c2, union)?;
    println!("blinded: n = {}, events {c1} / {c2}, either event {union}", summary.n_tilde());

    let pooled = c1 as f64 / summary.n_tilde() as f64;
    let p1_hat = estimate_control_prob(pooled, or1, summary.control_fraction())?;
    println!("pooled rate {pooled:.4} inverts to a control rate of {p1_hat:.4} (true {p1})");

    let est = estimate_blinded(&summary, or1, or2)?;
    println!("control  p1 = {:.4}, p2 = {:.4}", est.p1_control, est.p2_control);
    println!("treated  p1 = {:.4}, p2 = {:.4}", est.p1_treated, est.p2_treated);
    println!("correlation {:.4} (true {rho})", est.rho);
    Ok(())
}
