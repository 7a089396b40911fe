//! Convex hulls of Metzler sign-matrix families: sign-summability, hull
//! sign-stability, and construction of common Lyapunov functions.
//!
//! A family is sign-summable iff the nonzero diagonal entries at each
//! position share one sign; its convex hull then collapses to the finitely
//! many binary subset sums. The hull is sign-stable iff every member has a
//! negative diagonal and the full sum is sign-stable, which also guarantees
//! the per-tuple Lyapunov constructions below succeed for every realization
//! tuple.

use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::numeric::{is_hurwitz_metzler, is_positive_definite};
use crate::signs::{QualMatrix, RealMatrix, SignValue};
use crate::stability::{sign_stable, SignStabilityVerdict};
use crate::Verdict;

/// Nonempty family of equally sized definite Metzler patterns.
#[derive(Debug, Clone)]
pub struct Family {
    members: Vec<QualMatrix>,
}

impl Family {
    pub fn new(members: Vec<QualMatrix>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(Error::EmptyFamily);
        };
        let n = first.rows();
        for m in &members {
            m.require_definite()?;
            m.require_metzler()?;
            if m.rows() != n {
                return Err(Error::ShapeMismatch {
                    left: (n, n),
                    right: (m.rows(), m.cols()),
                });
            }
        }
        Ok(Family { members })
    }

    pub fn members(&self) -> &[QualMatrix] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn size(&self) -> usize {
        self.members[0].rows()
    }

    /// Qualitative sum of all members; may contain indefinite entries when
    /// the family is not sign-summable.
    pub fn sum(&self) -> QualMatrix {
        let mut acc = self.members[0].clone();
        for m in &self.members[1..] {
            acc = acc.add(m).expect("validated equal shapes");
        }
        acc
    }
}

/// Sign-summability: per diagonal position, the nonzero diagonal entries of
/// the members must agree in sign. Returns the first conflicting position
/// otherwise.
pub fn sign_summable(family: &Family) -> (bool, Option<usize>) {
    let n = family.size();
    for j in 0..n {
        let mut seen: Option<SignValue> = None;
        for m in family.members() {
            let s = m.get(j, j);
            if s == SignValue::Zero {
                continue;
            }
            match seen {
                None => seen = Some(s),
                Some(prev) if prev != s => return (false, Some(j)),
                _ => {}
            }
        }
    }
    (true, None)
}

/// Verdict on the sign-stability of a family's convex hull.
#[derive(Debug, Clone)]
pub struct HullReport {
    pub verdict: Verdict,
    /// Diagonal position where member signs clash (hull not well-defined).
    pub conflict_position: Option<usize>,
    /// (member index, diagonal index) of the first non-negative diagonal.
    pub diagonal_violation: Option<(usize, usize)>,
    /// Sign-stability of the member sum, once the diagonals check out.
    pub sum_verdict: Option<SignStabilityVerdict>,
}

impl HullReport {
    pub fn holds(&self) -> bool {
        self.verdict.holds()
    }
}

/// Hull sign-stability: all member diagonals negative and the member sum
/// sign-stable. A summability conflict is reported as `Fails` with the
/// conflicting position (the hull is not even well-defined).
pub fn hull_sign_stable(family: &Family) -> Result<HullReport> {
    let (summable, conflict_position) = sign_summable(family);
    if !summable {
        return Ok(HullReport {
            verdict: Verdict::Fails,
            conflict_position,
            diagonal_violation: None,
            sum_verdict: None,
        });
    }
    for (k, m) in family.members().iter().enumerate() {
        for j in 0..m.rows() {
            if m.get(j, j) != SignValue::Neg {
                return Ok(HullReport {
                    verdict: Verdict::Fails,
                    conflict_position: None,
                    diagonal_violation: Some((k, j)),
                    sum_verdict: None,
                });
            }
        }
    }
    let sum_verdict = sign_stable(&family.sum())?;
    Ok(HullReport {
        verdict: Verdict::from_bool(sum_verdict.verdict),
        conflict_position: None,
        diagonal_violation: None,
        sum_verdict: Some(sum_verdict),
    })
}

/// Cap on the family size accepted by the subset-enumeration oracle.
pub const ENUMERATION_CAP: usize = 16;

/// Oracle route: enumerate every nonzero binary combination of the members
/// and require each subset sum to exist (stay definite) and be sign-stable.
/// Exponential in the family size, capped at [`ENUMERATION_CAP`].
pub fn hull_sign_stable_enumerated(family: &Family) -> Result<Verdict> {
    let n = family.len();
    if n > ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            what: "hull subset enumeration",
            needed: (1u128 << n) - 1,
            cap: (1u128 << ENUMERATION_CAP) - 1,
        });
    }
    for mask in 1u32..(1u32 << n) {
        let mut acc: Option<QualMatrix> = None;
        for (k, m) in family.members().iter().enumerate() {
            if mask & (1 << k) != 0 {
                acc = Some(match acc {
                    None => m.clone(),
                    Some(prev) => prev.add(m)?,
                });
            }
        }
        let subset_sum = acc.expect("mask is nonzero");
        if !subset_sum.is_definite() {
            return Ok(Verdict::Fails);
        }
        if !sign_stable(&subset_sum)?.verdict {
            return Ok(Verdict::Fails);
        }
    }
    Ok(Verdict::Holds)
}

fn union_permutation(samples: &[RealMatrix]) -> Result<Vec<usize>> {
    let n = samples[0].rows();
    let mut union = RealMatrix::zeros(n, n);
    for m in samples {
        for r in 0..n {
            for c in 0..n {
                if m.get(r, c) != 0.0 {
                    union.set(r, c, 1.0);
                }
            }
        }
    }
    Digraph::of_matrix(&union)?
        .topo_permutation()
        .map_err(|_| Error::NotTriangularizable)
}

fn validate_samples(samples: &[RealMatrix]) -> Result<usize> {
    let Some(first) = samples.first() else {
        return Err(Error::EmptyFamily);
    };
    let n = first.rows();
    for m in samples {
        m.require_metzler()?;
        if m.rows() != n {
            return Err(Error::ShapeMismatch {
                left: (n, n),
                right: (m.rows(), m.cols()),
            });
        }
        if !is_hurwitz_metzler(m)? {
            return Err(Error::NotHurwitz {
                what: "sample matrix",
            });
        }
    }
    Ok(n)
}

/// A single positive vector v with v^T A < 0 for every sample, hence for the
/// whole convex hull of the samples. Requires the samples to be Metzler,
/// Hurwitz, and simultaneously triangularizable; v is built by a forward
/// column recursion in the triangularized basis.
pub fn common_linear_lyapunov(samples: &[RealMatrix]) -> Result<Vec<f64>> {
    let n = validate_samples(samples)?;
    let perm = union_permutation(samples)?;
    let tri: Vec<RealMatrix> = samples
        .iter()
        .map(|m| m.permute(&perm))
        .collect::<Result<_>>()?;

    let mut v = vec![0.0f64; n];
    for j in 0..n {
        let mut needed = 0.0f64;
        for t in &tri {
            let above: f64 = (0..j).map(|i| v[i] * t.get(i, j)).sum();
            needed = needed.max(above / -t.get(j, j));
        }
        v[j] = needed + 1.0;
    }

    // map back to the original coordinates
    let mut out = vec![0.0f64; n];
    for (new_idx, &old_idx) in perm.iter().enumerate() {
        out[old_idx] = v[new_idx];
    }
    for m in samples {
        let row = m.vecmat(&out)?;
        if row.iter().any(|&x| x >= 0.0) {
            return Err(Error::Disagreement {
                context: "constructed common vector fails a sample".into(),
            });
        }
    }
    Ok(out)
}

/// Diagonal of a positive matrix Q with A^T Q + Q A negative definite for
/// every sample. Built backward in the triangularized basis: the last weight
/// is 1 and each earlier weight is halved until the trailing principal block
/// of -(A^T Q + Q A) passes the Cholesky test for every sample.
pub fn common_quadratic_lyapunov(samples: &[RealMatrix]) -> Result<Vec<f64>> {
    let n = validate_samples(samples)?;
    let perm = union_permutation(samples)?;
    let tri: Vec<RealMatrix> = samples
        .iter()
        .map(|m| m.permute(&perm))
        .collect::<Result<_>>()?;

    let mut q = vec![1.0f64; n];
    for k in (0..n.saturating_sub(1)).rev() {
        let mut halvings = 0;
        loop {
            if tri
                .iter()
                .map(|t| trailing_block_pd(t, &q, k))
                .collect::<Result<Vec<bool>>>()?
                .into_iter()
                .all(|ok| ok)
            {
                break;
            }
            q[k] *= 0.5;
            halvings += 1;
            if halvings > 100 {
                return Err(Error::SearchExhausted {
                    what: "diagonal weight search for the common quadratic function",
                });
            }
        }
    }

    let mut out = vec![0.0f64; n];
    for (new_idx, &old_idx) in perm.iter().enumerate() {
        out[old_idx] = q[new_idx];
    }
    for m in samples {
        if !validate_quadratic_certificate(&out, std::slice::from_ref(m))? {
            return Err(Error::Disagreement {
                context: "constructed diagonal Q fails a sample".into(),
            });
        }
    }
    Ok(out)
}

/// Positive definiteness of the trailing block k..n of -(A^T Q + Q A).
fn trailing_block_pd(t: &RealMatrix, q: &[f64], k: usize) -> Result<bool> {
    let n = t.rows();
    let m = n - k;
    let mut s = RealMatrix::zeros(m, m);
    for r in 0..m {
        for c in 0..m {
            let (i, j) = (k + r, k + c);
            s.set(r, c, -(t.get(j, i) * q[j] + q[i] * t.get(i, j)));
        }
    }
    is_positive_definite(&s)
}

/// Substitution check: v > 0 and v^T A < 0 on every sample.
pub fn validate_linear_certificate(v: &[f64], samples: &[RealMatrix]) -> Result<bool> {
    if v.iter().any(|&x| x <= 0.0) {
        return Ok(false);
    }
    for m in samples {
        if m.vecmat(v)?.iter().any(|&x| x >= 0.0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Cholesky check: diag(q) > 0 and -(A^T Q + Q A) positive definite on every
/// sample.
pub fn validate_quadratic_certificate(q: &[f64], samples: &[RealMatrix]) -> Result<bool> {
    if q.iter().any(|&x| x <= 0.0) {
        return Ok(false);
    }
    for m in samples {
        let n = m.rows();
        if q.len() != n {
            return Err(Error::ShapeMismatch {
                left: (n, n),
                right: (q.len(), 1),
            });
        }
        let mut s = RealMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                s.set(i, j, -(m.get(j, i) * q[j] + q[i] * m.get(i, j)));
            }
        }
        if !is_positive_definite(&s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Convex combination of samples with the given weights (not checked to sum
/// to one; intended for validation sweeps).
pub fn convex_combination(samples: &[RealMatrix], weights: &[f64]) -> Result<RealMatrix> {
    if samples.is_empty() || samples.len() != weights.len() {
        return Err(Error::Invalid {
            message: "need one weight per sample".into(),
        });
    }
    let mut acc = samples[0].scaled(weights[0]);
    for (m, &w) in samples.iter().zip(weights).skip(1) {
        acc = acc.add(&m.scaled(w))?;
    }
    Ok(acc)
}
