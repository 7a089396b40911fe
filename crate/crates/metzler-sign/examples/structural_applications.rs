//! The application wrappers: delayed, switched, impulsive, nonlinear
//! positive, and stochastic reaction-network systems, each mapped onto the
//! core structural deciders.
//!
//! ```bash
//! cargo run -p metzler-sign --example structural_applications
//! ```

use metzler_sign::applications::{
    delay_ct_structural, delay_dt_structural, ergodicity_structural, impulsive_common_vector,
    impulsive_structural, nonlinear_invariance_structural, switched_structural,
    ReactionNetworkSigns,
};
use metzler_sign::kernel::KerBOptions;
use metzler_sign::signs::{IntMatrix, QualMatrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let flow: QualMatrix = "- + ; 0 -".parse()?;

    // Continuous-time delays: the flow plus all delay terms must sum to a
    // sign-stable pattern.
    let benign: QualMatrix = "0 + ; 0 0".parse()?;
    let report = delay_ct_structural(&flow, std::slice::from_ref(&benign))?;
    println!("delay (feedforward term): {}", report.verdict);
    let feedback: QualMatrix = "0 0 ; + 0".parse()?;
    let report = delay_ct_structural(&flow, &[feedback])?;
    println!("delay (feedback term):    {}", report.verdict);

    // Discrete-time delays go through the Schur-type test on the sum.
    let dt = delay_dt_structural(&["0 + ; 0 0".parse()?, "0 0 ; 0 0".parse()?])?;
    println!("discrete-time delays:     {}", if dt.verdict { "holds" } else { "fails" });

    // Arbitrary switching: the mode family's hull must be sign-stable; one
    // sampled tuple gets explicit common Lyapunov certificates.
    let switched = switched_structural(&[flow.clone(), "- 0 ; 0 -".parse()?], Some(11))?;
    println!("switched modes:           {}", switched.verdict);
    println!("  common vector:  {:?}", switched.sampled_linear.unwrap());
    println!("  diagonal of Q:  {:?}", switched.sampled_quadratic.unwrap());

    // Impulsive systems: negative flow diagonal, zero jump diagonal, and a
    // sign-stable flow-plus-jump pattern; one vector serves both phases.
    let jump: QualMatrix = "0 + ; 0 0".parse()?;
    let impulsive = impulsive_structural(&flow, &jump)?;
    println!("impulsive pair:           {}", impulsive.verdict);
    println!(
        "  shared vector for a sampled pair: {:?}",
        impulsive_common_vector(&flow, &jump, 4)?
    );

    // Nonlinear positive interactions and reaction-network ergodicity both
    // reduce to the kernel-constrained test.
    let opts = KerBOptions::default();
    let pattern: QualMatrix = "- 0 ; 0 -".parse()?;
    let structure = IntMatrix::from_rows(vec![vec![1], vec![-1]])?;
    let nl = nonlinear_invariance_structural(&pattern, &structure, &opts)?;
    println!("nonlinear invariance:     {:?}", nl.status);

    let net = ReactionNetworkSigns {
        interaction_pattern: pattern,
        bimolecular_stoichiometry: structure,
        irreducible_state_space: true,
    };
    let ergodic = ergodicity_structural(&net, &opts)?;
    println!(
        "network ergodicity:       {:?} (irreducibility declared: {})",
        ergodic.status, ergodic.irreducible_declared
    );
    Ok(())
}
