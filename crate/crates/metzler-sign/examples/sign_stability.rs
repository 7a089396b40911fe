//! Decide sign-stability of Metzler sign patterns and inspect the evidence.
//!
//! ```bash
//! cargo run -p metzler-sign --example sign_stability
//! ```

use metzler_sign::signs::QualMatrix;
use metzler_sign::stability::{
    instability_witness, monte_carlo_soundness, necessary_violations, sign_stable_checked,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Mutual positive coupling with negative diagonal: the 2-cycle ruins it.
    let exchange: QualMatrix = "- + ; + -".parse()?;
    println!("pattern:\n{exchange}\n");

    let verdict = sign_stable_checked(&exchange)?;
    println!("sign-stable: {}", verdict.verdict);
    println!("  graph statement:       {:?}", verdict.graph_path);
    println!("  linear program:        {:?}", verdict.lp_path);
    println!("  permutation statement: {:?}", verdict.permutation_path);
    if let Some(cycle) = &verdict.cycle {
        println!("  cycle witness:         {cycle}");
    }

    for v in necessary_violations(&exchange)? {
        println!("  violated necessary condition: {v:?}");
    }

    // A concrete member of the class with spectral abscissa >= 1e-6.
    let witness = instability_witness(&exchange)?;
    println!("instability witness:\n{witness}\n");

    // A triangular chain with negative diagonal passes every route.
    let chain: QualMatrix = "- + 0 ; 0 - + ; 0 0 -".parse()?;
    let verdict = sign_stable_checked(&chain)?;
    println!("chain pattern sign-stable: {}", verdict.verdict);
    if let Some(cert) = &verdict.lyapunov {
        println!("  Lyapunov vector: {:?} (margin {})", cert.point, cert.margin);
    }
    if let Some(perm) = &verdict.permutation {
        println!("  triangularizing order: {perm:?}");
    }

    // Every member of the class must be Hurwitz; spot-check 1000 draws.
    let sweep = monte_carlo_soundness(&chain, 1000, 7, &[1e-3, 1.0, 1e3])?;
    println!(
        "  {} random members over scales {:?}: all Hurwitz = {}",
        sweep.samples,
        sweep.scales,
        sweep.all_consistent()
    );
    Ok(())
}
