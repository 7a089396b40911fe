//! Sign-matrix inverses and kernel-constrained sign-stability.
//!
//! A sign-stable Metzler pattern has a well-defined sign inverse: negative
//! diagonal, negative where a directed path runs between the nodes, zero
//! elsewhere. Combining that inverse with a real constraint matrix B gives a
//! pattern (possibly indefinite) whose members must all be L+ for the
//! kernel-constrained property to be certified: then every realization A'
//! admits v > 0 with v^T A' < 0 and v^T B = 0. The test is sufficient only;
//! a miss reports `Unknown`, never a refutation.

use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::numeric::{positive_null_vector, real_inverse, Feasibility};
use crate::signs::{QualMatrix, RealMatrix, SignValue};
use crate::stability::sign_stable;

/// Default cap on the number of indefinite entries expanded (3^p members).
pub const DEFAULT_SQ_CAP: usize = 12;
/// Default cap on the row count of the L+ enumeration (3^l - 1 scalings).
pub const DEFAULT_LPLUS_CAP: usize = 16;

/// Sign pattern of the inverse of a sign-stable Metzler pattern: negative
/// diagonal, entry (i, j) negative iff the graph has a path from j to i.
pub fn sign_inverse(a: &QualMatrix) -> Result<QualMatrix> {
    let verdict = sign_stable(a)?;
    if !verdict.verdict {
        return Err(Error::NotSignStable);
    }
    let n = a.rows();
    let reach = Digraph::of_matrix(a)?.reachability();
    let mut inv = QualMatrix::filled(n, n, SignValue::Zero)?;
    for i in 0..n {
        inv.set(i, i, SignValue::Neg);
        for j in 0..n {
            if i != j && reach[j][i] {
                inv.set(i, j, SignValue::Neg);
            }
        }
    }
    Ok(inv)
}

/// All definite patterns obtained by substituting each indefinite entry with
/// negative, zero, and positive, in that digit order over row-major
/// positions. A definite input expands to itself alone.
pub fn sq_expand(a: &QualMatrix, cap: usize) -> Result<Vec<QualMatrix>> {
    let positions = a.indefinite_positions();
    let p = positions.len();
    if p > cap {
        return Err(Error::CapExceeded {
            what: "indefinite-entry expansion",
            needed: 3u128.pow(p.min(100) as u32),
            cap: 3u128.pow(cap.min(100) as u32),
        });
    }
    let count = 3usize.pow(p as u32);
    let mut out = Vec::with_capacity(count);
    for index in 0..count {
        let mut m = a.clone();
        let mut rest = index;
        for &(r, c) in &positions {
            let digit = rest % 3;
            rest /= 3;
            m.set(
                r,
                c,
                match digit {
                    0 => SignValue::Neg,
                    1 => SignValue::Zero,
                    _ => SignValue::Pos,
                },
            );
        }
        out.push(m);
    }
    Ok(out)
}

/// Outcome of the L+ decision with the refuting diagonal scaling, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LplusResult {
    pub is_lplus: bool,
    /// Diagonal of a nonzero scaling D in {-1,0,1} under which no column of
    /// D R is nonzero and nonnegative (present iff not L+).
    pub witness: Option<Vec<i8>>,
}

/// L+ decision for a definite pattern R: for every nonzero diagonal scaling
/// D over {-1,0,1}, some column of D R must be nonzero and nonnegative.
/// Exponential in the row count, capped at `cap`; a zero row refutes
/// immediately.
pub fn is_lplus(r: &QualMatrix, cap: usize) -> Result<LplusResult> {
    r.require_definite()?;
    let rows = r.rows();
    if rows > cap {
        return Err(Error::SizeExceeded {
            what: "L+ scaling enumeration",
            size: rows,
            cap,
        });
    }
    let u = r.unit_sign()?;
    for zr in 0..rows {
        if (0..r.cols()).all(|c| u.get(zr, c) == 0) {
            // a zero row: the scaling touching only that row kills every column
            let mut witness = vec![0i8; rows];
            witness[zr] = 1;
            return Ok(LplusResult {
                is_lplus: false,
                witness: Some(witness),
            });
        }
    }
    let total = 3usize.pow(rows as u32);
    'scalings: for index in 0..total {
        let mut d = Vec::with_capacity(rows);
        let mut rest = index;
        for _ in 0..rows {
            d.push((rest % 3) as i8 - 1);
            rest /= 3;
        }
        if d.iter().all(|&x| x == 0) {
            continue;
        }
        for c in 0..r.cols() {
            let mut any_positive = false;
            let mut any_negative = false;
            for (row, &scale) in d.iter().enumerate() {
                let v = i64::from(scale) * u.get(row, c);
                if v > 0 {
                    any_positive = true;
                } else if v < 0 {
                    any_negative = true;
                    break;
                }
            }
            if any_positive && !any_negative {
                continue 'scalings;
            }
        }
        return Ok(LplusResult {
            is_lplus: false,
            witness: Some(d),
        });
    }
    Ok(LplusResult {
        is_lplus: true,
        witness: None,
    })
}

/// Sign pattern of B^T times the transpose of a sign inverse. Contribution
/// signs are folded entrywise: agreeing contributions keep their sign,
/// clashing ones go indefinite, none give zero.
pub fn kernel_pattern(b: &RealMatrix, a_inv: &QualMatrix) -> Result<QualMatrix> {
    if b.rows() != a_inv.rows() {
        return Err(Error::ShapeMismatch {
            left: (b.rows(), b.cols()),
            right: (a_inv.rows(), a_inv.cols()),
        });
    }
    b.transpose().sign_pattern().mul(&a_inv.transpose())
}

/// Status of the kernel-constrained decision. The underlying condition is
/// sufficient only, so the negative branch is `Unknown`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KerBStatus {
    SufficientYes,
    Unknown,
}

/// Per-sample certificate: v > 0 with v^T A' < 0 and v^T B numerically zero.
#[derive(Debug, Clone)]
pub struct KerBCertificate {
    pub seed: u64,
    pub v: Vec<f64>,
    /// min over the strict inequalities v > 0 and v^T A' < 0.
    pub margin: f64,
    /// Achieved infinity norm of v^T B.
    pub b_residual: f64,
}

/// Verdict of the kernel-constrained sign-stability test.
#[derive(Debug, Clone)]
pub struct KerBVerdict {
    pub status: KerBStatus,
    /// The (possibly indefinite) pattern whose members were checked.
    pub pattern: QualMatrix,
    pub checked_count: usize,
    pub per_member: Vec<bool>,
    /// Index and refuting scaling of the first member that is not L+.
    pub failing_member: Option<(usize, Vec<i8>)>,
    pub certificates: Vec<KerBCertificate>,
}

/// Knobs for [`ker_b_sign_stable`].
#[derive(Debug, Clone)]
pub struct KerBOptions {
    pub cap_sq: usize,
    pub cap_lplus: usize,
    /// Number of per-sample certificates produced on a positive verdict.
    pub samples: usize,
    pub seed: u64,
    pub scale: f64,
}

impl Default for KerBOptions {
    fn default() -> Self {
        KerBOptions {
            cap_sq: DEFAULT_SQ_CAP,
            cap_lplus: DEFAULT_LPLUS_CAP,
            samples: 0,
            seed: 0,
            scale: 1.0,
        }
    }
}

fn column_rank_full(b: &RealMatrix) -> bool {
    // column-pivoted elimination with a relative threshold
    let (rows, cols) = (b.rows(), b.cols());
    if cols > rows {
        return false;
    }
    let threshold = 1e-10 * b.inf_norm().max(1e-300);
    let mut w: Vec<Vec<f64>> = (0..rows)
        .map(|r| (0..cols).map(|c| b.get(r, c)).collect())
        .collect();
    for c in 0..cols {
        let mut best = c;
        for r in c..rows {
            if w[r][c].abs() > w[best][c].abs() {
                best = r;
            }
        }
        if w[best][c].abs() <= threshold {
            return false;
        }
        w.swap(c, best);
        let piv = w[c][c];
        for r in c + 1..rows {
            let f = w[r][c] / piv;
            if f != 0.0 {
                for cc in c..cols {
                    w[r][cc] -= f * w[c][cc];
                }
            }
        }
    }
    true
}

/// Kernel-constrained sign-stability of a sign-stable Metzler pattern
/// against a full-column-rank constraint matrix B with fewer columns than
/// rows. `SufficientYes` when every expanded member of the kernel pattern is
/// L+; `Unknown` otherwise. With `samples > 0`, a positive verdict also
/// produces substitution-validated per-sample certificates.
pub fn ker_b_sign_stable(
    a: &QualMatrix,
    b: &RealMatrix,
    opts: &KerBOptions,
) -> Result<KerBVerdict> {
    let verdict = sign_stable(a)?;
    if !verdict.verdict {
        return Err(Error::NotSignStable);
    }
    let n = a.rows();
    let ell = b.cols();
    if b.rows() != n {
        return Err(Error::ShapeMismatch {
            left: (n, n),
            right: (b.rows(), b.cols()),
        });
    }
    if ell == 0 {
        // no constraints left: plain sign-stability, already verified
        return Ok(KerBVerdict {
            status: KerBStatus::SufficientYes,
            pattern: QualMatrix::filled(1, n, SignValue::Zero)?,
            checked_count: 0,
            per_member: Vec::new(),
            failing_member: None,
            certificates: Vec::new(),
        });
    }
    if ell >= n {
        return Err(Error::Invalid {
            message: format!("constraint matrix must have fewer columns ({ell}) than rows ({n})"),
        });
    }
    if !column_rank_full(b) {
        return Err(Error::RankDeficient);
    }

    let pattern = kernel_pattern(b, &sign_inverse(a)?)?;
    let members = sq_expand(&pattern, opts.cap_sq)?;
    let mut per_member = Vec::with_capacity(members.len());
    let mut failing_member = None;
    for (k, m) in members.iter().enumerate() {
        let res = is_lplus(m, opts.cap_lplus)?;
        if !res.is_lplus && failing_member.is_none() {
            failing_member = Some((k, res.witness.clone().unwrap_or_default()));
        }
        per_member.push(res.is_lplus);
    }
    let all = per_member.iter().all(|&ok| ok);
    let status = if all {
        KerBStatus::SufficientYes
    } else {
        KerBStatus::Unknown
    };

    let mut certificates = Vec::new();
    if all && opts.samples > 0 {
        for i in 0..opts.samples {
            let seed = opts.seed ^ (i as u64);
            certificates.push(sample_certificate(a, b, seed, opts.scale)?);
        }
    }

    Ok(KerBVerdict {
        status,
        pattern,
        checked_count: members.len(),
        per_member,
        failing_member,
        certificates,
    })
}

/// Produce one validated certificate for a realization of the pattern: draw
/// A', find w >= 1 with B^T A'^{-T} w = 0 by linear programming, and map it
/// through v = -A'^{-T} w.
fn sample_certificate(
    a: &QualMatrix,
    b: &RealMatrix,
    seed: u64,
    scale: f64,
) -> Result<KerBCertificate> {
    let sample = a.sample(seed, scale)?;
    let inv = real_inverse(&sample)?;
    let m = b.transpose().matmul(&inv.transpose())?;

    let w = match positive_null_vector(&m)? {
        Feasibility::Feasible(cert) => cert.point,
        Feasibility::Infeasible => {
            return Err(Error::Disagreement {
                context: format!("kernel certificate LP infeasible for seed {seed}"),
            })
        }
    };

    let minus_inv_t = inv.transpose().scaled(-1.0);
    let v = minus_inv_t.matvec(&w)?;
    let va = sample.vecmat(&v)?;
    let vb = b.vecmat(&v)?;
    let margin = v
        .iter()
        .copied()
        .chain(va.iter().map(|x| -x))
        .fold(f64::INFINITY, f64::min);
    if margin <= 0.0 {
        return Err(Error::Disagreement {
            context: format!("kernel certificate fails strict inequalities for seed {seed}"),
        });
    }
    let b_residual = vb.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let v_norm = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if b_residual > 1e-8 * v_norm * b.inf_norm().max(1.0) {
        return Err(Error::Disagreement {
            context: format!("kernel certificate residual too large for seed {seed}"),
        });
    }
    Ok(KerBCertificate {
        seed,
        v,
        margin,
        b_residual,
    })
}

/// Size of the L+ workload: (3^l - 1) scalings for each of the 3^p expanded
/// members. Used to pre-flight the caps.
pub fn lplus_complexity(ell: usize, indef_count: usize) -> u128 {
    if ell == 0 {
        return 0;
    }
    (3u128.pow(ell as u32) - 1) * 3u128.pow(indef_count as u32)
}

/// Workload estimate for a concrete (pattern, constraint) pair. Patterns
/// that are not sign-stable have no inverse to expand; they count a single
/// member.
pub fn lplus_complexity_estimate(a: &QualMatrix, b: &RealMatrix) -> u128 {
    let ell = b.cols();
    if ell == 0 {
        return 0;
    }
    let indef = sign_inverse(a)
        .and_then(|inv| kernel_pattern(b, &inv))
        .map(|p| p.indefinite_positions().len())
        .unwrap_or(0);
    lplus_complexity(ell, indef)
}
