//! Sign-stability of the convex hull of a pattern family, with common linear
//! and diagonal quadratic Lyapunov functions for sampled realization tuples.
//! This is the structural test behind arbitrary-switching stability.
//!
//! ```bash
//! cargo run -p metzler-sign --example convex_hull_switching
//! ```

use metzler_sign::hull::{
    common_linear_lyapunov, common_quadratic_lyapunov, convex_combination, hull_sign_stable,
    hull_sign_stable_enumerated, sign_summable, validate_linear_certificate,
    validate_quadratic_certificate, Family,
};
use metzler_sign::signs::{QualMatrix, RealMatrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a1: QualMatrix = "- + ; 0 -".parse()?;
    let a2: QualMatrix = "- 0 ; 0 -".parse()?;
    let family = Family::new(vec![a1.clone(), a2.clone()])?;

    let (summable, _) = sign_summable(&family);
    println!("family sign-summable: {summable}");
    let report = hull_sign_stable(&family)?;
    println!("hull sign-stable (sum test):     {}", report.verdict);
    println!(
        "hull sign-stable (subset route): {}",
        hull_sign_stable_enumerated(&family)?
    );

    // One realization per member; the certificates hold on the whole segment
    // between them.
    let tuple: Vec<RealMatrix> = vec![a1.sample(1, 1.0)?, a2.sample(2, 1.0)?];
    let v = common_linear_lyapunov(&tuple)?;
    let q = common_quadratic_lyapunov(&tuple)?;
    println!("common vector v:       {v:?}");
    println!("common diagonal of Q:  {q:?}");

    let midpoint = convex_combination(&tuple, &[0.5, 0.5])?;
    println!(
        "v valid on members + midpoint: {}",
        validate_linear_certificate(&v, &[tuple[0].clone(), tuple[1].clone(), midpoint.clone()])?
    );
    println!(
        "Q valid on members + midpoint: {}",
        validate_quadratic_certificate(&q, &[tuple[0].clone(), tuple[1].clone(), midpoint])?
    );

    // Opposed couplings sum to a cycle: some convex combination is unstable.
    let clash = Family::new(vec!["- + ; 0 -".parse()?, "- 0 ; + -".parse()?])?;
    let report = hull_sign_stable(&clash)?;
    println!(
        "\nopposed family hull sign-stable: {} (cycle {:?})",
        report.verdict,
        report.sum_verdict.and_then(|v| v.cycle).map(|c| c.nodes)
    );
    Ok(())
}
