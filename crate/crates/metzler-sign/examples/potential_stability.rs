//! Potential sign-stability: does the qualitative class contain at least one
//! Hurwitz member? For Metzler patterns this reduces to diagonal negativity,
//! and a small-gain member witnesses it.
//!
//! ```bash
//! cargo run -p metzler-sign --example potential_stability
//! ```

use metzler_sign::numeric::{hurwitz_metzler, spectral_abscissa_metzler};
use metzler_sign::signs::QualMatrix;
use metzler_sign::stability::potentially_sign_stable;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Not sign-stable (2-cycle), yet potentially stable.
    let exchange: QualMatrix = "- + ; + -".parse()?;
    let (yes, witness) = potentially_sign_stable(&exchange)?;
    println!("exchange pattern potentially sign-stable: {yes}");
    if let Some(m) = witness {
        let report = hurwitz_metzler(&m)?;
        println!("witness member:\n{m}");
        println!(
            "Hurwitz: {} (abscissa {:.6})",
            report.verdict,
            report.abscissa_estimate.unwrap()
        );
        // growing the couplings leaves the class but not the verdict's reach:
        // another member of the very same pattern is unstable
        let mut loud = m.clone();
        loud.set(0, 1, 5.0);
        loud.set(1, 0, 5.0);
        println!(
            "a louder member of the same class has abscissa {:.6}",
            spectral_abscissa_metzler(&loud)?
        );
    }

    // A zero diagonal entry rules even potential stability out.
    let zero_diag: QualMatrix = "0 + ; 0 -".parse()?;
    let (yes, _) = potentially_sign_stable(&zero_diag)?;
    println!("zero-diagonal pattern potentially sign-stable: {yes}");
    Ok(())
}
