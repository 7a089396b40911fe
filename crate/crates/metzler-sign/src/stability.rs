//! Sign-stability of Metzler sign-matrices.
//!
//! A Metzler pattern is sign-stable exactly when every matrix in its
//! qualitative class is Hurwitz stable, and that holds iff the diagonal is
//! all-negative and the associated graph is acyclic. Several equivalent
//! statement paths are computed here and must agree: the graph test, the
//! Lyapunov linear program on the unit sign-matrix, and the triangularizing
//! permutation. The Schur variant does the same for nonnegative patterns
//! (all realizations have zero spectral radius).

use crate::error::{Error, Result};
use crate::graph::{CycleWitness, Digraph};
use crate::numeric::{
    self, abscissa_at_least, is_hurwitz_metzler, lyapunov_vector, LpCertificate,
};
use crate::parallel;
use crate::signs::{QualMatrix, RealMatrix, SignValue};

/// Verdict of a sign-stability (or Schur sign-stability) decision together
/// with the per-statement results and the evidence backing each side.
#[derive(Debug, Clone)]
pub struct SignStabilityVerdict {
    pub verdict: bool,
    /// Negative diagonal + acyclic graph.
    pub graph_path: Option<bool>,
    /// Feasibility of the Lyapunov linear program on the unit sign-matrix.
    pub lp_path: Option<bool>,
    /// Existence of the triangularizing permutation.
    pub permutation_path: Option<bool>,
    pub lyapunov: Option<LpCertificate>,
    /// Relabeling that makes the pattern upper-triangular, when acyclic.
    pub permutation: Option<Vec<usize>>,
    /// First diagonal index violating the required diagonal signs.
    pub bad_diagonal: Option<usize>,
    pub cycle: Option<CycleWitness>,
    /// A member of the qualitative class refuting stability, when one with
    /// spectral abscissa >= 1e-6 exists (a cycle or a positive diagonal
    /// entry). Patterns failing only through zero diagonal entries pin the
    /// abscissa of every realization at exactly zero, so no such member
    /// exists and the field stays empty.
    pub counterexample: Option<RealMatrix>,
}

/// Diagonal sign a stability flavor requires.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DiagonalRule {
    Negative,
    Zero,
}

fn diagonal_violation(a: &QualMatrix, rule: DiagonalRule) -> Option<usize> {
    (0..a.rows()).find(|&i| match rule {
        DiagonalRule::Negative => a.get(i, i) != SignValue::Neg,
        DiagonalRule::Zero => a.get(i, i) != SignValue::Zero,
    })
}

/// Instability witness floor: every reported counterexample reaches at least
/// this spectral abscissa.
pub const WITNESS_ABSCISSA: f64 = 1e-6;

fn decide(
    a: &QualMatrix,
    rule: DiagonalRule,
    full: bool,
    with_counterexample: bool,
) -> Result<SignStabilityVerdict> {
    let graph = Digraph::of_matrix(a)?;
    let bad_diagonal = diagonal_violation(a, rule);
    let cycle = graph.find_cycle();
    let graph_verdict = bad_diagonal.is_none() && cycle.is_none();

    let mut verdict = SignStabilityVerdict {
        verdict: graph_verdict,
        graph_path: Some(graph_verdict),
        lp_path: None,
        permutation_path: None,
        lyapunov: None,
        permutation: None,
        bad_diagonal,
        cycle,
        counterexample: None,
    };

    if full {
        // statement path: v > 0 with v^T sgn(A) < 0 (minus the identity for
        // the Schur flavor)
        let mut u = a.unit_sign()?.to_real();
        if rule == DiagonalRule::Zero {
            for i in 0..u.rows() {
                u.set(i, i, u.get(i, i) - 1.0);
            }
        }
        let lp = lyapunov_vector(&u)?;
        verdict.lp_path = Some(lp.is_feasible());
        verdict.lyapunov = lp.certificate().cloned();

        // statement path: triangularizing permutation
        let perm = graph.topo_permutation();
        let perm_verdict = perm.is_ok() && bad_diagonal.is_none();
        verdict.permutation_path = Some(perm_verdict);
        if graph_verdict {
            verdict.permutation = Some(perm.expect("acyclic graph has a permutation"));
        }

        if verdict.lp_path != Some(graph_verdict) || verdict.permutation_path != Some(graph_verdict)
        {
            return Err(Error::Disagreement {
                context: format!(
                    "sign-stability paths differ: graph {graph_verdict:?}, lp {:?}, permutation {:?}",
                    verdict.lp_path, verdict.permutation_path
                ),
            });
        }
    } else if graph_verdict {
        verdict.permutation = Some(graph.topo_permutation()?);
    }

    if with_counterexample && !graph_verdict && rule == DiagonalRule::Negative {
        let positive_diag = (0..a.rows()).any(|i| a.get(i, i) == SignValue::Pos);
        if verdict.cycle.is_some() || positive_diag {
            verdict.counterexample = Some(construct_witness(a, verdict.cycle.as_ref())?);
        }
    }

    Ok(verdict)
}

/// Sign-stability of a definite Metzler pattern. The graph statement is
/// always evaluated; debug builds additionally run the linear-program and
/// permutation statements and insist on agreement (use
/// [`sign_stable_checked`] to force that in any build).
pub fn sign_stable(a: &QualMatrix) -> Result<SignStabilityVerdict> {
    a.require_definite()?;
    a.require_metzler()?;
    decide(a, DiagonalRule::Negative, cfg!(debug_assertions), false)
}

/// Sign-stability with every equivalent statement path evaluated and checked
/// for agreement; failing patterns carry a counterexample when one exists.
pub fn sign_stable_checked(a: &QualMatrix) -> Result<SignStabilityVerdict> {
    a.require_definite()?;
    a.require_metzler()?;
    decide(a, DiagonalRule::Negative, true, true)
}

/// Schur sign-stability of a nonnegative pattern: every realization has
/// zero spectral radius, equivalently zero diagonal plus acyclic graph.
pub fn schur_sign_stable(a: &QualMatrix) -> Result<SignStabilityVerdict> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    a.require_nonneg()?;
    decide(a, DiagonalRule::Zero, cfg!(debug_assertions), false)
}

/// Schur sign-stability with all statement paths forced.
pub fn schur_sign_stable_checked(a: &QualMatrix) -> Result<SignStabilityVerdict> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    a.require_nonneg()?;
    decide(a, DiagonalRule::Zero, true, false)
}

/// Potential sign-stability: some member of the class is Hurwitz. True
/// exactly when every diagonal entry is negative; the witness fixes -1 on
/// the negative slots and a small epsilon on the positive ones, halving
/// epsilon until the Hurwitz test passes.
pub fn potentially_sign_stable(a: &QualMatrix) -> Result<(bool, Option<RealMatrix>)> {
    a.require_definite()?;
    a.require_metzler()?;
    if diagonal_violation(a, DiagonalRule::Negative).is_some() {
        return Ok((false, None));
    }
    let mut eps = 1.0f64;
    for _ in 0..200 {
        let m = epsilon_member(a, eps)?;
        if is_hurwitz_metzler(&m)? {
            return Ok((true, Some(m)));
        }
        eps *= 0.5;
    }
    Err(Error::SearchExhausted {
        what: "epsilon witness for potential sign-stability",
    })
}

fn epsilon_member(a: &QualMatrix, eps: f64) -> Result<RealMatrix> {
    let n = a.rows();
    let mut m = RealMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            match a.get(r, c) {
                SignValue::Neg => m.set(r, c, -1.0),
                SignValue::Pos => m.set(r, c, eps),
                SignValue::Zero => {}
                SignValue::Indef => unreachable!("checked definite"),
            }
        }
    }
    Ok(m)
}

/// One necessary condition for sign-stability that the pattern violates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Diagonal entry at `index` is zero or positive.
    NonnegativeDiagonal { index: usize },
    /// Off-diagonal entries (i, j) and (j, i) are both positive.
    SymmetricPositivePair { i: usize, j: usize },
    /// The graph has a cycle.
    Cycle(CycleWitness),
    /// The pattern is irreducible (its graph is strongly connected).
    Irreducible,
}

/// Necessary-condition screening. Any reported violation refutes
/// sign-stability; an empty list proves nothing on its own.
pub fn necessary_violations(a: &QualMatrix) -> Result<Vec<Violation>> {
    a.require_definite()?;
    a.require_metzler()?;
    let n = a.rows();
    let mut out = Vec::new();
    for i in 0..n {
        if a.get(i, i) != SignValue::Neg {
            out.push(Violation::NonnegativeDiagonal { index: i });
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if a.get(i, j) == SignValue::Pos && a.get(j, i) == SignValue::Pos {
                out.push(Violation::SymmetricPositivePair { i, j });
            }
        }
    }
    let graph = Digraph::of_matrix(a)?;
    if let Some(cycle) = graph.find_cycle() {
        out.push(Violation::Cycle(cycle));
    }
    // strong connectivity forces a cycle once there are two or more nodes
    if n >= 2 && graph.is_strongly_connected() {
        out.push(Violation::Irreducible);
    }
    Ok(out)
}

/// A member of the qualitative class witnessing instability, for patterns
/// that are not sign-stable.
///
/// With a cycle present: class-respecting diagonal (-1 / 0 / 1e-3), gain 1
/// on the cycle edges except the first, which carries a gain doubled from 1
/// until the spectral abscissa clears [`WITNESS_ABSCISSA`]. Without a cycle,
/// all positive slots get 1e-3; a positive diagonal slot then already forces
/// abscissa >= 1e-3, and a zero diagonal slot pins it at exactly 0.
pub fn instability_witness(a: &QualMatrix) -> Result<RealMatrix> {
    a.require_definite()?;
    a.require_metzler()?;
    let base = sign_stable(a)?;
    if base.verdict {
        return Err(Error::SignStable);
    }
    construct_witness(a, base.cycle.as_ref())
}

fn construct_witness(a: &QualMatrix, cycle: Option<&CycleWitness>) -> Result<RealMatrix> {
    let n = a.rows();
    let Some(cycle) = cycle else {
        // acyclic: some diagonal entry is zero or positive
        return epsilon_member(a, 1e-3);
    };

    // matrix entry behind the edge (from, to) is (to, from)
    let cycle_entries: Vec<(usize, usize)> = cycle
        .nodes
        .windows(2)
        .map(|w| (w[1], w[0]))
        .collect();
    let first_entry = cycle_entries[0];

    let mut gain = 1.0f64;
    for _ in 0..200 {
        let mut m = RealMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                match a.get(r, c) {
                    SignValue::Neg => m.set(r, c, -1.0),
                    SignValue::Zero => {}
                    SignValue::Pos => {
                        let v = if (r, c) == first_entry {
                            gain
                        } else if cycle_entries.contains(&(r, c)) {
                            1.0
                        } else {
                            1e-3
                        };
                        m.set(r, c, v);
                    }
                    SignValue::Indef => unreachable!("checked definite"),
                }
            }
        }
        if abscissa_at_least(&m, WITNESS_ABSCISSA)? {
            return Ok(m);
        }
        gain *= 2.0;
    }
    Err(Error::SearchExhausted {
        what: "cycle gain for instability witness",
    })
}

/// Result of a Monte-Carlo soundness sweep over the qualitative class.
#[derive(Debug, Clone)]
pub struct SoundnessReport {
    pub samples: usize,
    pub scales: Vec<f64>,
    /// Seeds of draws that contradicted the verdict (empty on success).
    pub failures: Vec<u64>,
}

impl SoundnessReport {
    pub fn all_consistent(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Draw `samples` members of Q(A) across the given scales and check each
/// against the sign-stability verdict: every draw of a sign-stable pattern
/// must be Hurwitz. Per-sample seeds derive as `seed ^ index`, so results
/// are independent of evaluation order; work is spread over threads.
pub fn monte_carlo_soundness(
    a: &QualMatrix,
    samples: usize,
    seed: u64,
    scales: &[f64],
) -> Result<SoundnessReport> {
    let verdict = sign_stable(a)?;
    if !verdict.verdict {
        return Err(Error::NotSignStable);
    }
    let scales: Vec<f64> = if scales.is_empty() {
        vec![1.0]
    } else {
        scales.to_vec()
    };
    let results = parallel::par_map(samples, |i| {
        let sample_seed = seed ^ (i as u64);
        let scale = scales[i % scales.len()];
        let m = a.sample(sample_seed, scale)?;
        Ok::<(u64, bool), Error>((sample_seed, is_hurwitz_metzler(&m)?))
    });
    let mut failures = Vec::new();
    for r in results {
        let (s, hurwitz) = r?;
        if !hurwitz {
            failures.push(s);
        }
    }
    Ok(SoundnessReport {
        samples,
        scales,
        failures,
    })
}

/// Validate an instability witness: in-class membership plus the abscissa
/// floor it is expected to reach.
pub fn validate_witness(a: &QualMatrix, witness: &RealMatrix) -> Result<bool> {
    if !a.contains(witness)? {
        return Ok(false);
    }
    let has_cycle = Digraph::of_matrix(a)?.find_cycle().is_some();
    let positive_diag = (0..a.rows()).any(|i| a.get(i, i) == SignValue::Pos);
    if has_cycle || positive_diag {
        abscissa_at_least(witness, WITNESS_ABSCISSA)
    } else {
        // zero-diagonal acyclic case: abscissa is exactly zero
        let tol = 1e-9 * (1.0 + witness.inf_norm());
        let abscissa = numeric::spectral_abscissa_metzler(witness)?;
        Ok(abscissa.abs() <= tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qm(s: &str) -> QualMatrix {
        s.parse().unwrap()
    }

    #[test]
    fn exchange_pattern_not_sign_stable() {
        let m1 = qm("- + ; + -");
        let v = sign_stable_checked(&m1).unwrap();
        assert!(!v.verdict);
        assert_eq!(v.cycle.as_ref().unwrap().nodes, vec![0, 1, 0]);
        assert_eq!(v.lp_path, Some(false));
        let cx = v.counterexample.unwrap();
        assert!(m1.contains(&cx).unwrap());
    }

    #[test]
    fn triangular_pattern_sign_stable() {
        let a = qm("- + ; 0 -");
        let v = sign_stable_checked(&a).unwrap();
        assert!(v.verdict);
        assert_eq!(v.permutation, Some(vec![0, 1]));
        assert!(v.lyapunov.is_some());
        assert!(v.cycle.is_none() && v.bad_diagonal.is_none());
    }

    #[test]
    fn diagonal_pattern_sign_stable() {
        let a = QualMatrix::from_rows(vec![
            vec![SignValue::Neg, SignValue::Zero, SignValue::Zero, SignValue::Zero, SignValue::Zero],
            vec![SignValue::Zero, SignValue::Neg, SignValue::Zero, SignValue::Zero, SignValue::Zero],
            vec![SignValue::Zero, SignValue::Zero, SignValue::Neg, SignValue::Zero, SignValue::Zero],
            vec![SignValue::Zero, SignValue::Zero, SignValue::Zero, SignValue::Neg, SignValue::Zero],
            vec![SignValue::Zero, SignValue::Zero, SignValue::Zero, SignValue::Zero, SignValue::Neg],
        ])
        .unwrap();
        assert!(sign_stable_checked(&a).unwrap().verdict);
    }

    #[test]
    fn non_metzler_rejected() {
        let m2 = qm("- - ; + -");
        assert!(matches!(
            sign_stable(&m2),
            Err(Error::NotMetzler { row: 0, col: 1 })
        ));
        let indef = qm("- ? ; 0 -");
        assert!(matches!(
            sign_stable(&indef),
            Err(Error::IndefiniteEntry { .. })
        ));
    }

    #[test]
    fn potential_stability_is_diagonal_negativity() {
        let m1 = qm("- + ; + -");
        let (yes, witness) = potentially_sign_stable(&m1).unwrap();
        assert!(yes);
        let w = witness.unwrap();
        assert!(m1.contains(&w).unwrap());
        assert!(is_hurwitz_metzler(&w).unwrap());

        let zero_diag = qm("0 + ; 0 -");
        assert!(!potentially_sign_stable(&zero_diag).unwrap().0);

        let stable = qm("- + ; 0 -");
        assert!(potentially_sign_stable(&stable).unwrap().0);
    }

    #[test]
    fn violations_fire_together_on_exchange() {
        let m1 = qm("- + ; + -");
        let v = necessary_violations(&m1).unwrap();
        assert!(v.iter().any(|x| matches!(x, Violation::SymmetricPositivePair { i: 0, j: 1 })));
        assert!(v.iter().any(|x| matches!(x, Violation::Cycle(_))));
        assert!(v.iter().any(|x| matches!(x, Violation::Irreducible)));
        assert!(!v.iter().any(|x| matches!(x, Violation::NonnegativeDiagonal { .. })));

        assert!(necessary_violations(&qm("- + ; 0 -")).unwrap().is_empty());

        let zero_diag = qm("0 + ; 0 -");
        assert!(necessary_violations(&zero_diag)
            .unwrap()
            .iter()
            .any(|x| matches!(x, Violation::NonnegativeDiagonal { index: 0 })));
    }

    #[test]
    fn schur_cases() {
        assert!(schur_sign_stable_checked(&qm("0 + ; 0 0")).unwrap().verdict);
        let nonzero_diag = schur_sign_stable_checked(&qm("+ 0 ; 0 0")).unwrap();
        assert!(!nonzero_diag.verdict);
        assert_eq!(nonzero_diag.bad_diagonal, Some(0));
        let cyclic = schur_sign_stable_checked(&qm("0 + ; + 0")).unwrap();
        assert!(!cyclic.verdict);
        assert!(cyclic.cycle.is_some());
        assert!(matches!(
            schur_sign_stable(&qm("- 0 ; 0 0")),
            Err(Error::NegativeEntry { .. })
        ));
    }

    #[test]
    fn schur_equals_dressed_sign_stability() {
        // zero-diagonal nonnegative pattern with the diagonal replaced by
        // negatives decides the same way through the Metzler route
        for pat in ["0 + ; 0 0", "0 + ; + 0", "0 0 + ; + 0 0 ; 0 + 0"] {
            let a = qm(pat);
            let schur = schur_sign_stable_checked(&a).unwrap().verdict;
            let mut dressed = a.clone();
            for i in 0..a.rows() {
                dressed.set(i, i, SignValue::Neg);
            }
            let metzler = sign_stable_checked(&dressed).unwrap().verdict;
            assert_eq!(schur, metzler, "{pat}");
        }
    }

    #[test]
    fn witness_matches_closed_form_for_exchange() {
        let m1 = qm("- + ; + -");
        let w = instability_witness(&m1).unwrap();
        assert_eq!(
            w,
            RealMatrix::from_rows(vec![vec![-1.0, 1.0], vec![2.0, -1.0]]).unwrap()
        );
        let abscissa = numeric::spectral_abscissa_metzler(&w).unwrap();
        assert!((abscissa - (2f64.sqrt() - 1.0)).abs() < 1e-9);
        assert!(validate_witness(&m1, &w).unwrap());
    }

    #[test]
    fn witness_zero_diagonal_case() {
        let a = qm("0 + ; 0 -");
        let w = instability_witness(&a).unwrap();
        assert!(a.contains(&w).unwrap());
        assert!(validate_witness(&a, &w).unwrap());
        let abscissa = numeric::spectral_abscissa_metzler(&w).unwrap();
        assert!(abscissa.abs() <= 1e-9);
    }

    #[test]
    fn witness_refused_for_stable_pattern() {
        assert!(matches!(
            instability_witness(&qm("- + ; 0 -")),
            Err(Error::SignStable)
        ));
    }

    #[test]
    fn soundness_sweep_on_stable_pattern() {
        let a = qm("- + 0 ; 0 - + ; 0 0 -");
        let report = monte_carlo_soundness(&a, 64, 77, &[1e-3, 1.0, 1e3]).unwrap();
        assert!(report.all_consistent());
    }
}
