//! Structural stability wrappers for concrete system classes. Each wrapper
//! validates its domain preconditions, maps the data onto one of the core
//! deciders, and labels the certificates; none of them reimplements any
//! mathematics.

use crate::error::{Error, Result};
use crate::hull::{
    common_linear_lyapunov, common_quadratic_lyapunov, hull_sign_stable, Family, HullReport,
};
use crate::kernel::{ker_b_sign_stable, kernel_pattern, sign_inverse, KerBOptions, KerBVerdict};
use crate::signs::{IntMatrix, QualMatrix, RealMatrix, SignValue};
use crate::stability::{schur_sign_stable, sign_stable, SignStabilityVerdict};
use crate::Verdict;

/// Verdict for a continuous-time system with discrete delays: the flow
/// pattern plus all delay patterns must be sign-summable and their sum
/// sign-stable.
#[derive(Debug, Clone)]
pub struct DelaySumReport {
    pub verdict: Verdict,
    /// Diagonal position clashing between the flow and delay patterns.
    pub conflict_position: Option<usize>,
    pub sum_verdict: Option<SignStabilityVerdict>,
}

/// Delay-independent structural stability of a continuous-time positive
/// system: `flow` Metzler, each delay term nonnegative; decided on the sum.
pub fn delay_ct_structural(
    flow: &QualMatrix,
    delays: &[QualMatrix],
) -> Result<DelaySumReport> {
    flow.require_definite()?;
    flow.require_metzler()?;
    for d in delays {
        d.require_definite()?;
        d.require_nonneg()?;
        if d.rows() != flow.rows() || d.cols() != flow.cols() {
            return Err(Error::ShapeMismatch {
                left: (flow.rows(), flow.cols()),
                right: (d.rows(), d.cols()),
            });
        }
    }
    // summability: a delay term with a positive diagonal entry clashes with
    // a negative flow diagonal and leaves the sum indefinite
    let mut sum = flow.clone();
    for d in delays {
        sum = sum.add(d)?;
    }
    if let Some((r, _)) = sum.first_indefinite() {
        return Ok(DelaySumReport {
            verdict: Verdict::Fails,
            conflict_position: Some(r),
            sum_verdict: None,
        });
    }
    let sum_verdict = sign_stable(&sum)?;
    Ok(DelaySumReport {
        verdict: Verdict::from_bool(sum_verdict.verdict),
        conflict_position: None,
        sum_verdict: Some(sum_verdict),
    })
}

/// Delay-independent structural stability of a discrete-time positive
/// system: all terms nonnegative; the sum must be Schur sign-stable.
pub fn delay_dt_structural(terms: &[QualMatrix]) -> Result<SignStabilityVerdict> {
    let Some(first) = terms.first() else {
        return Err(Error::EmptyFamily);
    };
    let mut sum = first.clone();
    first.require_definite()?;
    first.require_nonneg()?;
    for t in &terms[1..] {
        t.require_definite()?;
        t.require_nonneg()?;
        sum = sum.add(t)?;
    }
    schur_sign_stable(&sum)
}

/// Verdict for a positive switched system under arbitrary switching,
/// together with per-tuple Lyapunov certificates for one sampled
/// realization tuple.
#[derive(Debug, Clone)]
pub struct SwitchedReport {
    pub verdict: Verdict,
    pub hull: HullReport,
    /// v > 0 valid for one sampled tuple (and its convex hull).
    pub sampled_linear: Option<Vec<f64>>,
    /// Diagonal of Q > 0 valid for the same tuple.
    pub sampled_quadratic: Option<Vec<f64>>,
    pub tuple_seed: Option<u64>,
}

/// Structural stability of a positive switched system under arbitrary
/// switching: the mode family's convex hull must be sign-stable. On a
/// positive verdict and a given seed, one realization tuple is drawn and its
/// common linear/quadratic certificates are constructed and validated.
pub fn switched_structural(
    modes: &[QualMatrix],
    tuple_seed: Option<u64>,
) -> Result<SwitchedReport> {
    let family = Family::new(modes.to_vec())?;
    let hull = hull_sign_stable(&family)?;
    let verdict = hull.verdict;
    let mut report = SwitchedReport {
        verdict,
        hull,
        sampled_linear: None,
        sampled_quadratic: None,
        tuple_seed,
    };
    if verdict.holds() {
        if let Some(seed) = tuple_seed {
            let tuple: Vec<RealMatrix> = modes
                .iter()
                .enumerate()
                .map(|(i, m)| m.sample(seed ^ (i as u64), 1.0))
                .collect::<Result<_>>()?;
            report.sampled_linear = Some(common_linear_lyapunov(&tuple)?);
            report.sampled_quadratic = Some(common_quadratic_lyapunov(&tuple)?);
        }
    }
    Ok(report)
}

/// Verdict for a positive impulsive system.
#[derive(Debug, Clone)]
pub struct ImpulsiveReport {
    pub verdict: Verdict,
    /// Index of a flow diagonal entry that is not negative.
    pub flow_diagonal: Option<usize>,
    /// Index of a jump diagonal entry that is not zero.
    pub jump_diagonal: Option<usize>,
    pub sum_verdict: Option<SignStabilityVerdict>,
}

/// Structural stability of a positive impulsive system: negative flow
/// diagonal, zero jump diagonal, and a sign-stable flow-plus-jump pattern.
/// A single positive vector then handles both the flow and the jumps.
pub fn impulsive_structural(flow: &QualMatrix, jump: &QualMatrix) -> Result<ImpulsiveReport> {
    flow.require_definite()?;
    flow.require_metzler()?;
    jump.require_definite()?;
    jump.require_nonneg()?;
    if flow.rows() != jump.rows() || flow.cols() != jump.cols() {
        return Err(Error::ShapeMismatch {
            left: (flow.rows(), flow.cols()),
            right: (jump.rows(), jump.cols()),
        });
    }
    let flow_diagonal = (0..flow.rows()).find(|&i| flow.get(i, i) != SignValue::Neg);
    let jump_diagonal = (0..jump.rows()).find(|&i| jump.get(i, i) != SignValue::Zero);
    if flow_diagonal.is_some() || jump_diagonal.is_some() {
        return Ok(ImpulsiveReport {
            verdict: Verdict::Fails,
            flow_diagonal,
            jump_diagonal,
            sum_verdict: None,
        });
    }
    let sum_verdict = sign_stable(&flow.add(jump)?)?;
    Ok(ImpulsiveReport {
        verdict: Verdict::from_bool(sum_verdict.verdict),
        flow_diagonal: None,
        jump_diagonal: None,
        sum_verdict: Some(sum_verdict),
    })
}

/// One positive vector valid for a sampled (flow, jump) pair: v^T A < 0 and
/// v^T (J - I) < 0. Used to spot-check a positive impulsive verdict.
pub fn impulsive_common_vector(
    flow: &QualMatrix,
    jump: &QualMatrix,
    seed: u64,
) -> Result<Vec<f64>> {
    let a = flow.sample(seed, 1.0)?;
    let j = jump.sample(seed ^ 0x9e37_79b9, 1.0)?;
    let n = j.rows();
    let mut j_minus_i = j;
    for i in 0..n {
        j_minus_i.set(i, i, j_minus_i.get(i, i) - 1.0);
    }
    common_linear_lyapunov(&[a, j_minus_i])
}

/// Structural boundedness and attractivity data for a nonlinear positive
/// system with integer interaction structure `b`: delegates to the
/// kernel-constrained decider.
pub fn nonlinear_invariance_structural(
    m: &QualMatrix,
    b: &IntMatrix,
    opts: &KerBOptions,
) -> Result<KerBVerdict> {
    ker_b_sign_stable(m, &b.to_real(), opts)
}

/// Sign data of a bimolecular reaction network: the pattern of the linear
/// interaction matrix and the bimolecular stoichiometry columns. State-space
/// irreducibility is a declared property of the model, recorded but not
/// checked here.
#[derive(Debug, Clone)]
pub struct ReactionNetworkSigns {
    pub interaction_pattern: QualMatrix,
    pub bimolecular_stoichiometry: IntMatrix,
    pub irreducible_state_space: bool,
}

/// Verdict on structural ergodicity.
#[derive(Debug, Clone)]
pub struct ErgodicityReport {
    pub status: crate::kernel::KerBStatus,
    /// Positions where the kernel pattern is indefinite; a nonempty list
    /// leaves the test inconclusive before any enumeration runs.
    pub indefinite_positions: Vec<(usize, usize)>,
    pub kerb: Option<KerBVerdict>,
    pub irreducible_declared: bool,
}

/// Structural ergodicity of a stochastic bimolecular reaction network:
/// the interaction pattern must be sign-stable and the kernel pattern
/// against the bimolecular stoichiometry definite and L+. A positive answer
/// certifies, for every realization A of the pattern, a vector v > 0 with
/// v^T A < 0 and v^T S_b = 0.
pub fn ergodicity_structural(
    net: &ReactionNetworkSigns,
    opts: &KerBOptions,
) -> Result<ErgodicityReport> {
    let z = &net.interaction_pattern;
    let s_b = net.bimolecular_stoichiometry.to_real();
    if s_b.cols() > 0 {
        let verdict = sign_stable(z)?;
        if !verdict.verdict {
            return Err(Error::NotSignStable);
        }
        let pattern = kernel_pattern(&s_b, &sign_inverse(z)?)?;
        let indefinite = pattern.indefinite_positions();
        if !indefinite.is_empty() {
            return Ok(ErgodicityReport {
                status: crate::kernel::KerBStatus::Unknown,
                indefinite_positions: indefinite,
                kerb: None,
                irreducible_declared: net.irreducible_state_space,
            });
        }
    }
    let kerb = ker_b_sign_stable(z, &s_b, opts)?;
    Ok(ErgodicityReport {
        status: kerb.status,
        indefinite_positions: Vec::new(),
        kerb: Some(kerb),
        irreducible_declared: net.irreducible_state_space,
    })
}
