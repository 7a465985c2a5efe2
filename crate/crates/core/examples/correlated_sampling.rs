//! Joint law of two correlated binary events and reproducible sampling
//! from it.
//!
//! Run: `cargo run --example correlated_sampling`

use endpoint_select::{build_joint, corr_from_conditional, sample_pairs, valid_correlation_range, CellCounts};

fn main() -> endpoint_select::Result<()> {
    let (p1, p2) = (0.3, 0.2);
    let range = valid_correlation_range(p1, p2);
    println!("p1 = {p1}, p2 = {p2}: correlation must lie in [{:.4}, {:.4}]", range.lower, range.upper);

    let joint = build_joint(p1, p2, 0.4)?;
    println!(
        "cells p11 = {:.4}, p10 = {:.4}, p01 = {:.4}, p00 = {:.4}",
        joint.p11(),
        joint.p10(),
        joint.p01(),
        joint.p00()
    );
    println!("composite probability 1 - p00 = {:.4}", joint.composite_prob());

    // Elicitation: "given event 1, event 2 occurs half the time".
    let rho = corr_from_conditional(p1, p2, 0.5)?;
    println!("P(E2 | E1) = 0.5 corresponds to rho = {rho:.4}");

    let n = 200_000;
    let pairs = sample_pairs(&joint, n, 42)?;
    let counts = CellCounts::from_pairs(pairs.iter().copied());
    let freq = |k: u64| k as f64 / n as f64;
    println!(
        "empirical from {n} draws: p1 = {:.4}, p2 = {:.4}, union = {:.4}",
        freq(counts.x1()),
        freq(counts.x2()),
        freq(counts.union())
    );
    assert_eq!(pairs, sample_pairs(&joint, n, 42)?, "same seed, same draws");

    match build_joint(0.1, 0.5, 0.9) {
        Err(e) => println!("rho = 0.9 with p = (0.1, 0.5): {e}"),
        Ok(_) => unreachable!("outside the Frechet range"),
    }
    Ok(())
}
