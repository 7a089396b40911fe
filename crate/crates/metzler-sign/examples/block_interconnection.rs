//! Stability of interconnected Metzler blocks through the multiplier linear
//! program, without ever assembling the full matrix.
//!
//! ```bash
//! cargo run -p metzler-sign --example block_interconnection
//! ```

use std::collections::BTreeMap;

use metzler_sign::blocks::{
    block_hurwitz, block_sign_stable, qc_product_equality, sgn_product_equality,
    validate_multipliers_sign, BlockSystem, Coupling, MultiplierForm,
};
use metzler_sign::signs::{QualMatrix, RealMatrix};

fn qm(s: &str) -> QualMatrix {
    s.parse().unwrap()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Two 2x2 sign blocks tied by rank-one factored couplings.
    let mut couplings = BTreeMap::new();
    couplings.insert((0, 1), Coupling { b: qm("+ ; 0"), c: qm("+ 0") });
    couplings.insert((1, 0), Coupling { b: qm("0 ; +"), c: qm("0 +") });
    let sys = BlockSystem::<QualMatrix>::new(
        vec![qm("- 0 ; + -"), qm("- 0 ; 0 -")],
        couplings.clone(),
    )?;

    // The structural product hypotheses make the LP answer exact here.
    for (key, cp) in &couplings {
        println!(
            "coupling {:?}: class product equality {} / unit product equality {}",
            key,
            qc_product_equality(&cp.b, &cp.c)?,
            sgn_product_equality(&cp.b, &cp.c)?
        );
    }

    let report = block_sign_stable(&sys, MultiplierForm::Factored)?;
    println!("\nblock system sign-stable: {}", report.verdict);
    if let Some(cert) = report.lp.certificate() {
        println!("  v blocks:       {:?}", cert.v);
        println!("  multipliers:    {:?}", cert.multipliers);
        println!("  solver margin:  {:.3}", cert.margin);
        println!(
            "  substitution margin: {:.3}",
            validate_multipliers_sign(cert, &sys)?
        );
    }

    // Adding a coupling inside the second block closes a long cycle.
    let modified = BlockSystem::<QualMatrix>::new(
        vec![qm("- 0 ; + -"), qm("- + ; 0 -")],
        couplings,
    )?;
    let report = block_sign_stable(&modified, MultiplierForm::Factored)?;
    println!("modified system sign-stable: {}", report.verdict);

    // Real-valued blocks run through the coupled Hurwitz program instead.
    let mut real_couplings = BTreeMap::new();
    real_couplings.insert(
        (0, 1),
        Coupling {
            b: RealMatrix::from_rows(vec![vec![0.5], vec![0.0]])?,
            c: RealMatrix::from_rows(vec![vec![1.0, 0.25]])?,
        },
    );
    let real_sys = BlockSystem::<RealMatrix>::new(
        vec![
            RealMatrix::from_rows(vec![vec![-1.0, 0.3], vec![0.2, -1.0]])?,
            RealMatrix::from_rows(vec![vec![-2.0, 0.1], vec![0.4, -1.5]])?,
        ],
        real_couplings,
    )?;
    let lp = block_hurwitz(&real_sys)?;
    println!("\nreal block system Hurwitz: {}", lp.is_feasible());
    Ok(())
}
