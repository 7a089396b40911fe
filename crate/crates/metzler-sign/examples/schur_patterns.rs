//! Schur-type sign-stability of nonnegative patterns: every realization has
//! zero spectral radius exactly when the diagonal is zero and the graph is
//! acyclic.
//!
//! ```bash
//! cargo run -p metzler-sign --example schur_patterns
//! ```

use metzler_sign::numeric::spectral_abscissa_metzler;
use metzler_sign::signs::QualMatrix;
use metzler_sign::stability::schur_sign_stable_checked;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let shift: QualMatrix = "0 + 0 ; 0 0 + ; 0 0 0".parse()?;
    let v = schur_sign_stable_checked(&shift)?;
    println!("strictly-triangular pattern: every realization nilpotent = {}", v.verdict);

    // spectral radius of a realization = abscissa of the nonnegative matrix
    let m = shift.sample(5, 1000.0)?;
    println!("spectral radius of a wide-magnitude draw: {:.3e}", spectral_abscissa_metzler(&m)?);

    let diagonal: QualMatrix = "+ 0 ; 0 0".parse()?;
    let v = schur_sign_stable_checked(&diagonal)?;
    println!(
        "positive-diagonal pattern: holds = {} (diagonal index {:?})",
        v.verdict, v.bad_diagonal
    );

    let swap: QualMatrix = "0 + ; + 0".parse()?;
    let v = schur_sign_stable_checked(&swap)?;
    println!(
        "exchange pattern: holds = {} (cycle {:?})",
        v.verdict,
        v.cycle.map(|c| c.nodes)
    );
    Ok(())
}
