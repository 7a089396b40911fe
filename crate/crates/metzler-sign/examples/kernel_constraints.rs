//! Kernel-constrained sign-stability: certify that every realization A of a
//! pattern admits v > 0 with v^T A < 0 and v^T B = 0. The decision expands
//! the (possibly indefinite) pattern of B^T A^{-T} and checks each member
//! with the L+ scaling enumeration.
//!
//! ```bash
//! cargo run -p metzler-sign --example kernel_constraints
//! ```

use metzler_sign::kernel::{
    is_lplus, ker_b_sign_stable, kernel_pattern, lplus_complexity_estimate, sign_inverse,
    sq_expand, KerBOptions,
};
use metzler_sign::signs::{QualMatrix, RealMatrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a: QualMatrix = "- 0 ; 0 -".parse()?;
    let balanced = RealMatrix::from_rows(vec![vec![1.0], vec![-1.0]])?;
    let unbalanced = RealMatrix::from_rows(vec![vec![1.0], vec![1.0]])?;

    // The kernel pattern collects contribution signs of B^T A^{-T}.
    let inv = sign_inverse(&a)?;
    println!("kernel pattern for the balanced column:   {}", kernel_pattern(&balanced, &inv)?);
    println!("kernel pattern for the unbalanced column: {}", kernel_pattern(&unbalanced, &inv)?);
    println!("workload estimate: {} scaling checks\n", lplus_complexity_estimate(&a, &balanced));

    let opts = KerBOptions {
        samples: 3,
        seed: 9,
        ..KerBOptions::default()
    };
    let verdict = ker_b_sign_stable(&a, &balanced, &opts)?;
    println!("balanced column: {:?}", verdict.status);
    for cert in &verdict.certificates {
        println!(
            "  seed {}: v = {:?}, margin {:.3}, |v^T B| = {:.2e}",
            cert.seed, cert.v, cert.margin, cert.b_residual
        );
    }

    let verdict = ker_b_sign_stable(&a, &unbalanced, &opts)?;
    println!("unbalanced column: {:?}", verdict.status);
    if let Some((member, scaling)) = &verdict.failing_member {
        println!("  member {member} fails the L+ test under scaling {scaling:?}");
    }

    // Indefinite entries expand into all definite completions.
    let indefinite: QualMatrix = "- ?".parse()?;
    let members = sq_expand(&indefinite, 12)?;
    println!("\nexpansion of '{indefinite}': {} members", members.len());
    for m in &members {
        println!("  {m}  L+: {}", is_lplus(m, 16)?.is_lplus);
    }
    Ok(())
}
