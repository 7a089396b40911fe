//! Sign-stability of block-structured matrices mixing one sign block with
//! real blocks: the top-left block is a Metzler sign pattern, the bottom
//! right a real Metzler matrix, and the couplings are nonnegative real.
//!
//! The decision reduces to: the sign block is sign-stable, the real block is
//! Hurwitz, and the product of the sign-inverse pattern with the coupling
//! response matrix is nilpotent. Nilpotency is decided combinatorially on
//! the zero/nonzero pattern (never by floating-point spectral radius, which
//! is reported as a diagnostic only), once directly, once through the
//! bipartite-graph cycle test, and once through a linear program; the three
//! routes must agree.

use crate::error::{Error, Result};
use crate::graph::{bipartite_cycle_free, bipartite_graph, CycleWitness, Digraph};
use crate::numeric::{
    hurwitz_metzler, lyapunov_vector, real_inverse, spectral_abscissa_metzler, Feasibility,
    HurwitzReport, LpCertificate,
};
use crate::signs::{IntMatrix, MixedEntry, MixedMatrix, QualMatrix, RealMatrix, SignValue};
use crate::stability::{sign_stable, schur_sign_stable, SignStabilityVerdict};

/// Relative threshold under which computed coupling entries are read as
/// structural zeros when patterns are formed.
const PATTERN_ZERO_REL: f64 = 1e-10;

/// Block-structured mixed matrix: sign block `a_sigma`, real Metzler block
/// `a_phi`, nonnegative couplings `b_phi` (into the real block) and `c_phi`
/// (back into the sign block).
#[derive(Debug, Clone)]
pub struct MixedSystem {
    a_sigma: QualMatrix,
    a_phi: RealMatrix,
    b_phi: RealMatrix,
    c_phi: RealMatrix,
}

impl MixedSystem {
    pub fn new(
        a_sigma: QualMatrix,
        a_phi: RealMatrix,
        b_phi: RealMatrix,
        c_phi: RealMatrix,
    ) -> Result<Self> {
        a_sigma.require_definite()?;
        a_sigma.require_metzler()?;
        a_phi.require_metzler()?;
        let n_sigma = a_sigma.rows();
        let n_phi = a_phi.rows();
        if b_phi.rows() != n_phi || b_phi.cols() != n_sigma {
            return Err(Error::ShapeMismatch {
                left: (n_phi, n_sigma),
                right: (b_phi.rows(), b_phi.cols()),
            });
        }
        if c_phi.rows() != n_sigma || c_phi.cols() != n_phi {
            return Err(Error::ShapeMismatch {
                left: (n_sigma, n_phi),
                right: (c_phi.rows(), c_phi.cols()),
            });
        }
        b_phi.require_nonneg()?;
        c_phi.require_nonneg()?;
        Ok(MixedSystem {
            a_sigma,
            a_phi,
            b_phi,
            c_phi,
        })
    }

    pub fn n_sigma(&self) -> usize {
        self.a_sigma.rows()
    }

    pub fn n_phi(&self) -> usize {
        self.a_phi.rows()
    }

    pub fn a_sigma(&self) -> &QualMatrix {
        &self.a_sigma
    }

    pub fn a_phi(&self) -> &RealMatrix {
        &self.a_phi
    }

    pub fn b_phi(&self) -> &RealMatrix {
        &self.b_phi
    }

    pub fn c_phi(&self) -> &RealMatrix {
        &self.c_phi
    }

    /// Assemble the real block matrix with `m` standing in for the sign
    /// block. `m` must belong to the sign block's qualitative class.
    pub fn assemble_with(&self, m: &RealMatrix) -> Result<RealMatrix> {
        if !self.a_sigma.contains(m)? {
            return Err(Error::Invalid {
                message: "replacement block is outside the sign block's qualitative class".into(),
            });
        }
        let (ns, np) = (self.n_sigma(), self.n_phi());
        let n = ns + np;
        let mut out = RealMatrix::zeros(n, n);
        for r in 0..ns {
            for c in 0..ns {
                out.set(r, c, m.get(r, c));
            }
            for c in 0..np {
                out.set(r, ns + c, self.c_phi.get(r, c));
            }
        }
        for r in 0..np {
            for c in 0..ns {
                out.set(ns + r, c, self.b_phi.get(r, c));
            }
            for c in 0..np {
                out.set(ns + r, ns + c, self.a_phi.get(r, c));
            }
        }
        Ok(out)
    }

    /// The full mixed matrix as one container (sign block kept symbolic).
    pub fn assemble_mixed(&self) -> MixedMatrix {
        let (ns, np) = (self.n_sigma(), self.n_phi());
        let n = ns + np;
        let mut rows = vec![vec![MixedEntry::Real(0.0); n]; n];
        for r in 0..ns {
            for c in 0..ns {
                rows[r][c] = MixedEntry::Sign(self.a_sigma.get(r, c));
            }
            for c in 0..np {
                rows[r][ns + c] = MixedEntry::Real(self.c_phi.get(r, c));
            }
        }
        for r in 0..np {
            for c in 0..ns {
                rows[ns + r][c] = MixedEntry::Real(self.b_phi.get(r, c));
            }
            for c in 0..np {
                rows[ns + r][ns + c] = MixedEntry::Real(self.a_phi.get(r, c));
            }
        }
        MixedMatrix::from_rows(rows).expect("consistent dimensions")
    }
}

/// Coupling response through the real block: C A^{-1} B; entrywise
/// nonpositive because the inverse of a Hurwitz Metzler block is.
pub fn m_phi(sys: &MixedSystem) -> Result<RealMatrix> {
    if !hurwitz_metzler(&sys.a_phi)?.verdict {
        return Err(Error::NotHurwitz { what: "real block" });
    }
    sys.c_phi.matmul(&real_inverse(&sys.a_phi)?)?.matmul(&sys.b_phi)
}

/// Unit sign of the sign block's inverse pattern.
pub fn m_sigma(sys: &MixedSystem) -> Result<IntMatrix> {
    crate::kernel::sign_inverse(&sys.a_sigma)?.unit_sign()
}

/// Verdict on a mixed system with every computed statement path.
#[derive(Debug, Clone)]
pub struct MixedReport {
    pub verdict: bool,
    pub sigma_verdict: SignStabilityVerdict,
    pub phi_report: HurwitzReport,
    /// Combinatorial nilpotency of the product pattern (None when the
    /// preliminary conditions already failed).
    pub nilpotency_path: Option<bool>,
    pub bipartite_path: Option<bool>,
    pub lp_path: Option<bool>,
    pub bipartite_cycle: Option<CycleWitness>,
    pub m_sigma: Option<IntMatrix>,
    pub m_phi: Option<RealMatrix>,
    /// Floating-point spectral radius of the product, diagnostics only.
    pub rho_diagnostic: Option<f64>,
    /// Lyapunov vectors for the sign block, the real block, and the shifted
    /// product pattern, when all three linear programs are feasible.
    pub lp_certificates: Option<(LpCertificate, LpCertificate, LpCertificate)>,
}

/// Sign-stability of the mixed system. The three product-level routes
/// (pattern nilpotency, bipartite cycle test, linear program) must agree;
/// any mismatch is an internal error rather than a verdict.
pub fn mixed_sign_stable(sys: &MixedSystem) -> Result<MixedReport> {
    let sigma_verdict = sign_stable(&sys.a_sigma)?;
    let phi_report = hurwitz_metzler(&sys.a_phi)?;

    let mut report = MixedReport {
        verdict: false,
        sigma_verdict,
        phi_report,
        nilpotency_path: None,
        bipartite_path: None,
        lp_path: None,
        bipartite_cycle: None,
        m_sigma: None,
        m_phi: None,
        rho_diagnostic: None,
        lp_certificates: None,
    };
    if !report.sigma_verdict.verdict || !report.phi_report.verdict {
        return Ok(report);
    }

    let ms = m_sigma(sys)?;
    let mp = m_phi(sys)?;
    let mp_tol = PATTERN_ZERO_REL * mp.inf_norm();

    // products are nonnegative (both factors are nonpositive)
    let prod_sigma_phi = clamp_nonneg(&ms.to_real().matmul(&mp)?)?;
    let prod_phi_sigma = clamp_nonneg(&mp.matmul(&ms.to_real())?)?;
    let pattern_sp = prod_sigma_phi.sign_pattern_with_tol(PATTERN_ZERO_REL * prod_sigma_phi.inf_norm());
    let pattern_ps = prod_phi_sigma.sign_pattern_with_tol(PATTERN_ZERO_REL * prod_phi_sigma.inf_norm());

    // route 1: nilpotency of the pattern, decided as Schur sign-stability
    let nilpotent = schur_sign_stable(&pattern_sp)?.verdict;

    // route 2: no cycle in the bipartite graph of the factor patterns
    let abs_ms = abs_pattern_int(&ms);
    let abs_mp = mp.scaled(-1.0).sign_pattern_with_tol(mp_tol);
    let (cycle_free, cycle) = bipartite_cycle_free(&abs_ms, &abs_mp)?;

    // route 3: the three decoupled linear programs
    let v_lp = lyapunov_vector(&ms.to_real())?;
    let w_lp = lyapunov_vector(&sys.a_phi)?;
    let mut shifted = pattern_ps.unit_sign()?.to_real();
    for i in 0..shifted.rows() {
        shifted.set(i, i, shifted.get(i, i) - 1.0);
    }
    let z_lp = lyapunov_vector(&shifted)?;
    let lp_ok = v_lp.is_feasible() && w_lp.is_feasible() && z_lp.is_feasible();

    report.nilpotency_path = Some(nilpotent);
    report.bipartite_path = Some(cycle_free);
    report.lp_path = Some(lp_ok);
    report.bipartite_cycle = cycle;
    report.rho_diagnostic = Some(spectral_abscissa_metzler(&prod_sigma_phi)?);
    report.m_sigma = Some(ms);
    report.m_phi = Some(mp);

    if nilpotent != cycle_free || nilpotent != lp_ok {
        return Err(Error::Disagreement {
            context: format!(
                "mixed product routes differ: nilpotency {nilpotent}, bipartite {cycle_free}, lp {lp_ok}"
            ),
        });
    }
    report.verdict = nilpotent;
    if let (Feasibility::Feasible(v), Feasibility::Feasible(w), Feasibility::Feasible(z)) =
        (v_lp, w_lp, z_lp)
    {
        report.lp_certificates = Some((v, w, z));
    }
    Ok(report)
}

/// Zero out rounding dust in a matrix that is nonnegative by construction;
/// a significantly negative entry is an internal error.
fn clamp_nonneg(m: &RealMatrix) -> Result<RealMatrix> {
    let tol = PATTERN_ZERO_REL * (1.0 + m.inf_norm());
    let mut out = m.clone();
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let v = m.get(r, c);
            if v < 0.0 {
                if v < -tol {
                    return Err(Error::Disagreement {
                        context: format!("expected a nonnegative product, entry ({r},{c}) = {v}"),
                    });
                }
                out.set(r, c, 0.0);
            }
        }
    }
    Ok(out)
}

fn abs_pattern_int(m: &IntMatrix) -> QualMatrix {
    let mut out = QualMatrix::filled(m.rows(), m.cols(), SignValue::Zero)
        .expect("positive dimensions");
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if m.get(r, c) != 0 {
                out.set(r, c, SignValue::Pos);
            }
        }
    }
    out
}

/// For a mixed system whose preliminary conditions hold but whose product
/// test fails, produce an assembled realization at the stability boundary:
/// the unit realization of the sign block scaled to put an eigenvalue of the
/// assembled matrix at zero. Its spectral abscissa is >= 0 up to numerics.
pub fn instability_realization(sys: &MixedSystem) -> Result<RealMatrix> {
    let report = mixed_sign_stable(sys)?;
    if !report.sigma_verdict.verdict || !report.phi_report.verdict {
        return Err(Error::Invalid {
            message: "instability realization needs the block conditions to hold".into(),
        });
    }
    if report.verdict {
        return Err(Error::SignStable);
    }
    let unit = sys.a_sigma.unit_sign()?.to_real();
    let mp = report.m_phi.expect("computed when blocks pass");
    let product = clamp_nonneg(&real_inverse(&unit)?.matmul(&mp)?)?;
    let critical = spectral_abscissa_metzler(&product)?;
    if critical <= 0.0 {
        return Err(Error::Disagreement {
            context: "expected a positive critical scaling".into(),
        });
    }
    sys.assemble_with(&unit.scaled(critical))
}

/// The bipartite graph driving the mixed cycle test, for DOT export.
pub fn mixed_bipartite_graph(sys: &MixedSystem) -> Result<Digraph> {
    let ms = m_sigma(sys)?;
    let mp = m_phi(sys)?;
    let abs_ms = abs_pattern_int(&ms);
    let abs_mp = mp.scaled(-1.0).sign_pattern_with_tol(PATTERN_ZERO_REL * mp.inf_norm());
    bipartite_graph(&abs_ms, &abs_mp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_system(b_phi: Vec<Vec<f64>>) -> MixedSystem {
        MixedSystem::new(
            "- + ; 0 -".parse().unwrap(),
            RealMatrix::from_rows(vec![vec![-1.0, 2.0], vec![1.0, -5.0]]).unwrap(),
            RealMatrix::from_rows(b_phi).unwrap(),
            RealMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn coupling_response_closed_form() {
        // variant with the coupling feeding the second real state
        let sys = example_system(vec![vec![0.0, 0.0], vec![0.0, 1.0]]);
        let mp = m_phi(&sys).unwrap();
        let expected = RealMatrix::from_rows(vec![vec![0.0, -2.0 / 3.0], vec![0.0, 0.0]]).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                assert!((mp.get(r, c) - expected.get(r, c)).abs() < 1e-12);
            }
        }
        let zero = example_system(vec![vec![0.0, 0.0], vec![0.0, 0.0]]);
        assert_eq!(m_phi(&zero).unwrap(), RealMatrix::zeros(2, 2));
    }

    #[test]
    fn sign_block_inverse_sign() {
        let sys = example_system(vec![vec![0.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(
            m_sigma(&sys).unwrap(),
            IntMatrix::from_rows(vec![vec![-1, -1], vec![0, -1]]).unwrap()
        );
        let diag = MixedSystem::new(
            "- 0 ; 0 -".parse().unwrap(),
            RealMatrix::from_rows(vec![vec![-1.0]]).unwrap(),
            RealMatrix::zeros(1, 2),
            RealMatrix::zeros(2, 1),
        )
        .unwrap();
        assert_eq!(
            m_sigma(&diag).unwrap(),
            IntMatrix::from_rows(vec![vec![-1, 0], vec![0, -1]]).unwrap()
        );
    }

    #[test]
    fn stable_variant() {
        let sys = example_system(vec![vec![0.0, 0.0], vec![0.0, 1.0]]);
        let report = mixed_sign_stable(&sys).unwrap();
        assert!(report.verdict);
        assert_eq!(report.nilpotency_path, Some(true));
        assert_eq!(report.bipartite_path, Some(true));
        assert_eq!(report.lp_path, Some(true));
        assert!(report.lp_certificates.is_some());
        assert!(report.rho_diagnostic.unwrap().abs() < 1e-9);
    }

    #[test]
    fn unstable_variant() {
        let sys = example_system(vec![vec![0.0, 0.0], vec![1.0, 0.0]]);
        let report = mixed_sign_stable(&sys).unwrap();
        assert!(!report.verdict);
        assert!(report.bipartite_cycle.is_some());
        assert!(report.rho_diagnostic.unwrap() > 0.1);

        let witness = instability_realization(&sys).unwrap();
        let abscissa = spectral_abscissa_metzler(&witness).unwrap();
        assert!(abscissa >= -1e-9 * (1.0 + witness.inf_norm()));
    }

    #[test]
    fn decoupled_blocks() {
        let sys = example_system(vec![vec![0.0, 0.0], vec![0.0, 0.0]]);
        let report = mixed_sign_stable(&sys).unwrap();
        assert!(report.verdict);
    }

    #[test]
    fn failing_preconditions_reported() {
        let bad_sigma = MixedSystem::new(
            "- + ; + -".parse().unwrap(),
            RealMatrix::from_rows(vec![vec![-1.0]]).unwrap(),
            RealMatrix::zeros(1, 2),
            RealMatrix::zeros(2, 1),
        )
        .unwrap();
        let report = mixed_sign_stable(&bad_sigma).unwrap();
        assert!(!report.verdict);
        assert!(!report.sigma_verdict.verdict);
        assert!(report.nilpotency_path.is_none());
    }
}
