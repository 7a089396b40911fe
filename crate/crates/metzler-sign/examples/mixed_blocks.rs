//! Sign-stability of a block matrix mixing one sign block with real blocks.
//! Cycles are tolerated inside the real part; what matters is that the
//! coupling response through the real block stays structurally nilpotent
//! against the sign block's inverse pattern.
//!
//! ```bash
//! cargo run -p metzler-sign --example mixed_blocks
//! ```

use metzler_sign::mixed::{
    instability_realization, m_phi, m_sigma, mixed_sign_stable, MixedSystem,
};
use metzler_sign::numeric::spectral_abscissa_metzler;
use metzler_sign::signs::RealMatrix;

fn system(b_phi: Vec<Vec<f64>>) -> Result<MixedSystem, Box<dyn std::error::Error>> {
    Ok(MixedSystem::new(
        "- + ; 0 -".parse()?,
        RealMatrix::from_rows(vec![vec![-1.0, 2.0], vec![1.0, -5.0]])?,
        RealMatrix::from_rows(b_phi)?,
        RealMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 0.0]])?,
    )?)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Coupling into the second real state: the loop never closes.
    let stable = system(vec![vec![0.0, 0.0], vec![0.0, 1.0]])?;
    println!("m_sigma:\n{}", m_sigma(&stable)?);
    println!("m_phi:\n{}\n", m_phi(&stable)?);
    let report = mixed_sign_stable(&stable)?;
    println!("verdict: {}", report.verdict);
    println!("  nilpotency route: {:?}", report.nilpotency_path);
    println!("  bipartite route:  {:?}", report.bipartite_path);
    println!("  LP route:         {:?}", report.lp_path);
    println!("  float rho (diagnostic only): {:.3e}", report.rho_diagnostic.unwrap());

    // Coupling into the first real state closes a loop through the sign
    // block; the class then contains singular and unstable members.
    let unstable = system(vec![vec![0.0, 0.0], vec![1.0, 0.0]])?;
    let report = mixed_sign_stable(&unstable)?;
    println!("\nmoved coupling verdict: {}", report.verdict);
    if let Some(cycle) = &report.bipartite_cycle {
        println!("  bipartite cycle: {cycle}");
    }
    let boundary = instability_realization(&unstable)?;
    println!(
        "  boundary realization abscissa: {:.3e}",
        spectral_abscissa_metzler(&boundary)?
    );
    Ok(())
}
