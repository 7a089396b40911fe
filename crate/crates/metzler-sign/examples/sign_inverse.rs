//! The inverse of a sign-stable Metzler pattern is again a sign pattern:
//! negative on the diagonal, negative wherever a directed path runs, zero
//! elsewhere. Numeric inverses of class members all match it.
//!
//! ```bash
//! cargo run -p metzler-sign --example sign_inverse
//! ```

use metzler_sign::kernel::sign_inverse;
use metzler_sign::numeric::{real_inverse, real_inverse_with_residual};
use metzler_sign::signs::{QualMatrix, RealMatrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let chain: QualMatrix = "- + 0 ; 0 - + ; 0 0 -".parse()?;
    let inverse_pattern = sign_inverse(&chain)?;
    println!("pattern:\n{chain}\n");
    println!("inverse pattern (paths fill in above the diagonal):\n{inverse_pattern}\n");

    for seed in 0..3 {
        let member = chain.sample(seed, 1.0)?;
        let inv = real_inverse(&member)?;
        let observed = inv.sign_pattern_with_tol(1e-10 * inv.inf_norm());
        println!(
            "draw {seed}: numeric inverse matches the pattern: {}",
            observed == inverse_pattern
        );
    }

    // Note: the inverse of a nonpositive matrix need not be Metzler; sign
    // inversion is a one-way trip.
    let m = RealMatrix::from_rows(vec![
        vec![-1.0, -1.0, -2.0, -4.0],
        vec![0.0, -1.0, -1.0, -5.0],
        vec![0.0, 0.0, -1.0, -1.0],
        vec![0.0, 0.0, 0.0, -1.0],
    ])?;
    let (inv, residual) = real_inverse_with_residual(&m)?;
    println!("a nonpositive triangular matrix:\n{m}\n");
    println!("its integer inverse (mixed signs, not Metzler):\n{inv}\n");
    println!("residual of the inversion: {residual:.2e}");
    Ok(())
}
