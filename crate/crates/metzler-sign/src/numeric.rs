//! Numerical kernels: strict-feasibility linear programs, Hurwitz tests for
//! real Metzler matrices, dense inversion, the spectral-abscissa oracle and
//! the Schur-complement split.
//!
//! Strict inequalities are normalized to margin 1 (x >= 1, rows <= -1). The
//! normalization is valid because every constraint system solved here is
//! positively homogeneous in its unknowns; it must not be reused for
//! non-homogeneous systems.

use crate::error::{Error, Result};
use crate::signs::RealMatrix;

/// Numerical thresholds. The defaults are used by every plain entry point;
/// `hurwitz_metzler_with` accepts overrides.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Relative pivot threshold for declaring a matrix singular.
    pub pivot_rel: f64,
    /// Relative entrywise threshold for the inverse-nonpositivity test.
    pub inverse_nonpos_rel: f64,
    /// Absolute tolerance used when equivalent verdict paths are compared.
    pub agreement: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            pivot_rel: 1e-12,
            inverse_nonpos_rel: 1e-12,
            agreement: 1e-7,
        }
    }
}

/// Maximum dimension accepted by the spectral-abscissa oracle.
pub const ABSCISSA_SIZE_CAP: usize = 200;

/// Sense of one constraint row in the normalized feasibility form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    /// Row encodes a strict inequality: a.x <= -1 after normalization.
    Strict,
    /// Row encodes a non-strict inequality: a.x <= 0.
    NonStrict,
}

/// A feasible point together with the margin it achieves. The margin is the
/// smallest slack over the strict constraints (variable positivity included);
/// it is at least 1 by construction of the normalized form.
#[derive(Debug, Clone, PartialEq)]
pub struct LpCertificate {
    pub point: Vec<f64>,
    pub margin: f64,
}

/// Outcome of a feasibility problem.
#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility<C> {
    Feasible(C),
    Infeasible,
}

impl<C> Feasibility<C> {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }

    pub fn certificate(&self) -> Option<&C> {
        match self {
            Feasibility::Feasible(c) => Some(c),
            Feasibility::Infeasible => None,
        }
    }
}

/// Generalized feasibility problem solved by the phase-1 simplex below:
/// find x with x_k >= 1 for bounded variables (free variables unrestricted)
/// such that every row satisfies a.x <= -1 (strict) or a.x <= 0 (non-strict).
#[derive(Debug, Clone)]
pub(crate) struct FeasibilityProblem {
    pub num_vars: usize,
    pub free: Vec<bool>,
    pub rows: Vec<(Vec<f64>, RowSense)>,
}

impl FeasibilityProblem {
    pub(crate) fn all_bounded(num_vars: usize, rows: Vec<(Vec<f64>, RowSense)>) -> Self {
        FeasibilityProblem {
            num_vars,
            free: vec![false; num_vars],
            rows,
        }
    }
}

const SIMPLEX_EPS: f64 = 1e-9;

/// Phase-1 simplex with Bland's rule; termination is guaranteed. Returns the
/// found point (substitution-validated) or infeasibility.
pub(crate) fn solve_feasibility(p: &FeasibilityProblem) -> Result<Feasibility<LpCertificate>> {
    for (coeffs, _) in &p.rows {
        if coeffs.len() != p.num_vars {
            return Err(Error::Invalid {
                message: "constraint row length does not match variable count".into(),
            });
        }
        if coeffs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: 0, col: 0 });
        }
    }
    if p.rows.is_empty() {
        // trivially feasible at the all-ones point
        return Ok(Feasibility::Feasible(LpCertificate {
            point: vec![1.0; p.num_vars],
            margin: 1.0,
        }));
    }

    // Column layout in y-space: bounded x_k = y_j + 1 (one column), free
    // x_k = y_j - y_{j+1} (two columns).
    let mut col_of_var = Vec::with_capacity(p.num_vars);
    let mut ny = 0usize;
    for k in 0..p.num_vars {
        col_of_var.push(ny);
        ny += if p.free[k] { 2 } else { 1 };
    }

    let m = p.rows.len();
    // Row scaling for conditioning; positive scaling preserves the
    // margin-normalized feasible set exactly.
    let mut work_rows = Vec::with_capacity(m);
    for (coeffs, sense) in &p.rows {
        let rhs = match sense {
            RowSense::Strict => -1.0,
            RowSense::NonStrict => 0.0,
        };
        let scale = coeffs.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
        let scaled: Vec<f64> = coeffs.iter().map(|v| v / scale).collect();
        work_rows.push((scaled, rhs / scale));
    }

    // Tableau columns: ny structural + m slacks + up to m artificials + rhs.
    let mut art_of_row = vec![usize::MAX; m];
    let mut num_art = 0usize;
    let mut rhs_shifted = Vec::with_capacity(m);
    for (r, (coeffs, rhs)) in work_rows.iter().enumerate() {
        let shift: f64 = (0..p.num_vars)
            .filter(|&k| !p.free[k])
            .map(|k| coeffs[k])
            .sum();
        let d = rhs - shift;
        rhs_shifted.push(d);
        if d < 0.0 {
            art_of_row[r] = num_art;
            num_art += 1;
        }
    }
    let total = ny + m + num_art;
    let mut tab = vec![vec![0.0f64; total + 1]; m];
    let mut basis = vec![0usize; m];
    for (r, (coeffs, _)) in work_rows.iter().enumerate() {
        let flip = if rhs_shifted[r] < 0.0 { -1.0 } else { 1.0 };
        for k in 0..p.num_vars {
            let j = col_of_var[k];
            tab[r][j] = flip * coeffs[k];
            if p.free[k] {
                tab[r][j + 1] = -flip * coeffs[k];
            }
        }
        tab[r][ny + r] = flip; // slack
        tab[r][total] = flip * rhs_shifted[r];
        if flip < 0.0 {
            let a = ny + m + art_of_row[r];
            tab[r][a] = 1.0;
            basis[r] = a;
        } else {
            basis[r] = ny + r;
        }
    }

    // Objective: minimize the sum of artificials. Reduced-cost row
    // r_j = c_j - sum over artificial-basis rows of tab[r][j].
    let mut obj = vec![0.0f64; total + 1];
    for r in 0..m {
        if basis[r] >= ny + m {
            for j in 0..=total {
                obj[j] -= tab[r][j];
            }
        }
    }
    for k in 0..num_art {
        obj[ny + m + k] += 1.0;
    }

    let max_iters = 2000 + 200 * (m + total);
    let mut iters = 0usize;
    loop {
        // Bland: entering column = smallest index with negative reduced cost
        let mut entering = None;
        for (j, &c) in obj.iter().enumerate().take(total) {
            if c < -SIMPLEX_EPS {
                entering = Some(j);
                break;
            }
        }
        let Some(e) = entering else { break };

        // ratio test; ties broken by smallest basic variable index (Bland)
        let mut leaving: Option<(usize, f64)> = None;
        for r in 0..m {
            let a = tab[r][e];
            if a > SIMPLEX_EPS {
                let ratio = tab[r][total] / a;
                match leaving {
                    None => leaving = Some((r, ratio)),
                    Some((lr, lratio)) => {
                        if ratio < lratio - SIMPLEX_EPS
                            || (ratio < lratio + SIMPLEX_EPS && basis[r] < basis[lr])
                        {
                            leaving = Some((r, ratio));
                        }
                    }
                }
            }
        }
        let Some((lr, _)) = leaving else {
            // phase-1 objective is bounded below by zero; an unbounded ray
            // here means numerics went bad
            return Err(Error::Invalid {
                message: "phase-1 simplex detected an unbounded direction".into(),
            });
        };

        // pivot
        let piv = tab[lr][e];
        for j in 0..=total {
            tab[lr][j] /= piv;
        }
        for r in 0..m {
            if r != lr {
                let f = tab[r][e];
                if f != 0.0 {
                    for j in 0..=total {
                        tab[r][j] -= f * tab[lr][j];
                    }
                }
            }
        }
        let f = obj[e];
        if f != 0.0 {
            for j in 0..=total {
                obj[j] -= f * tab[lr][j];
            }
        }
        basis[lr] = e;

        iters += 1;
        if iters > max_iters {
            return Err(Error::SearchExhausted {
                what: "phase-1 simplex iteration cap",
            });
        }
    }

    let objective = -obj[total];
    if objective > 1e-7 {
        return Ok(Feasibility::Infeasible);
    }

    // Recover x from the basic solution.
    let mut y = vec![0.0f64; total];
    for r in 0..m {
        y[basis[r]] = tab[r][total];
    }
    let mut x = vec![0.0f64; p.num_vars];
    for k in 0..p.num_vars {
        let j = col_of_var[k];
        x[k] = if p.free[k] {
            y[j] - y[j + 1]
        } else {
            y[j] + 1.0
        };
    }

    // Substitution check against the original rows.
    let mut margin = f64::INFINITY;
    for (k, &xk) in x.iter().enumerate() {
        if !p.free[k] {
            margin = margin.min(xk);
        }
    }
    for (coeffs, sense) in &p.rows {
        let val: f64 = coeffs.iter().zip(&x).map(|(a, b)| a * b).sum();
        let scale = coeffs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        match sense {
            RowSense::Strict => {
                if val > -0.5 {
                    return Err(Error::Disagreement {
                        context: format!("simplex point violates a strict row ({val} > -0.5)"),
                    });
                }
                margin = margin.min(-val);
            }
            RowSense::NonStrict => {
                if val > 1e-7 * scale {
                    return Err(Error::Disagreement {
                        context: format!("simplex point violates a non-strict row ({val} > 0)"),
                    });
                }
            }
        }
    }
    Ok(Feasibility::Feasible(LpCertificate { point: x, margin }))
}

/// Strict feasibility of x >= 1, Gx <= -1 (strict rows) / Gx <= 0
/// (non-strict rows). `senses` must name one sense per row of `g`.
pub fn lp_strict_feasible(
    g: &RealMatrix,
    senses: &[RowSense],
) -> Result<Feasibility<LpCertificate>> {
    if senses.len() != g.rows() {
        return Err(Error::Invalid {
            message: format!("expected {} row senses, got {}", g.rows(), senses.len()),
        });
    }
    let rows = (0..g.rows())
        .map(|r| {
            let coeffs = (0..g.cols()).map(|c| g.get(r, c)).collect();
            (coeffs, senses[r])
        })
        .collect();
    solve_feasibility(&FeasibilityProblem::all_bounded(g.cols(), rows))
}

/// All rows strict: x >= 1 with Gx <= -1.
pub fn lp_all_strict(g: &RealMatrix) -> Result<Feasibility<LpCertificate>> {
    lp_strict_feasible(g, &vec![RowSense::Strict; g.rows()])
}

/// Existence of v > 0 with v^T A < 0, reported with a validated certificate.
pub fn lyapunov_vector(a: &RealMatrix) -> Result<Feasibility<LpCertificate>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    lp_all_strict(&a.transpose())
}

/// Existence of v >= 1 with M v = 0, the equality rows written as two
/// non-strict inequality families.
pub fn positive_null_vector(m: &RealMatrix) -> Result<Feasibility<LpCertificate>> {
    let mut rows = Vec::with_capacity(2 * m.rows());
    for r in 0..m.rows() {
        let row: Vec<f64> = (0..m.cols()).map(|c| m.get(r, c)).collect();
        rows.push((row.iter().map(|x| -x).collect(), RowSense::NonStrict));
        rows.push((row, RowSense::NonStrict));
    }
    solve_feasibility(&FeasibilityProblem::all_bounded(m.cols(), rows))
}

fn lu_inverse(a: &RealMatrix, pivot_rel: f64) -> Result<RealMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let threshold = pivot_rel * a.inf_norm().max(1e-300);
    // augmented [A | I], Gauss-Jordan with partial pivoting
    let mut w = vec![vec![0.0f64; 2 * n]; n];
    for r in 0..n {
        for c in 0..n {
            w[r][c] = a.get(r, c);
        }
        w[r][n + r] = 1.0;
    }
    for col in 0..n {
        let mut best = col;
        for r in col + 1..n {
            if w[r][col].abs() > w[best][col].abs() {
                best = r;
            }
        }
        if w[best][col].abs() <= threshold {
            return Err(Error::Singular);
        }
        w.swap(col, best);
        let piv = w[col][col];
        for c in 0..2 * n {
            w[col][c] /= piv;
        }
        for r in 0..n {
            if r != col && w[r][col] != 0.0 {
                let f = w[r][col];
                for c in 0..2 * n {
                    w[r][c] -= f * w[col][c];
                }
            }
        }
    }
    let entries = w.iter().flat_map(|row| row[n..].iter().copied()).collect();
    RealMatrix::new(n, n, entries)
}

/// Dense inverse by Gaussian elimination with partial pivoting, together
/// with the achieved residual norm of A A^{-1} - I.
pub fn real_inverse_with_residual(a: &RealMatrix) -> Result<(RealMatrix, f64)> {
    let inv = lu_inverse(a, Tolerances::default().pivot_rel)?;
    let residual = a
        .matmul(&inv)?
        .sub(&RealMatrix::identity(a.rows()))?
        .inf_norm();
    Ok((inv, residual))
}

pub fn real_inverse(a: &RealMatrix) -> Result<RealMatrix> {
    Ok(real_inverse_with_residual(a)?.0)
}

/// M-matrix style predicate: Gaussian elimination of -A without row
/// exchanges keeps all pivots positive exactly when the Metzler matrix A is
/// Hurwitz stable. Cheap enough for bulk Monte-Carlo use.
pub fn is_hurwitz_metzler(a: &RealMatrix) -> Result<bool> {
    a.require_metzler()?;
    Ok(m_matrix_pivots_positive(a))
}

/// Pivot test on -A. Expects `a` Metzler.
fn m_matrix_pivots_positive(a: &RealMatrix) -> bool {
    let n = a.rows();
    let mut w = vec![vec![0.0f64; n]; n];
    for r in 0..n {
        for c in 0..n {
            w[r][c] = -a.get(r, c);
        }
    }
    for k in 0..n {
        let piv = w[k][k];
        if piv <= 1e-300 {
            return false;
        }
        for r in k + 1..n {
            let f = w[r][k] / piv;
            if f == 0.0 {
                continue;
            }
            for c in k..n {
                w[r][c] -= f * w[k][c];
            }
        }
    }
    true
}

/// Whether the spectral abscissa of a Metzler matrix is >= `lambda`.
pub fn abscissa_at_least(a: &RealMatrix, lambda: f64) -> Result<bool> {
    a.require_metzler()?;
    let shifted = shift_diagonal(a, -lambda);
    Ok(!m_matrix_pivots_positive(&shifted))
}

fn shift_diagonal(a: &RealMatrix, delta: f64) -> RealMatrix {
    let mut out = a.clone();
    for i in 0..a.rows() {
        out.set(i, i, a.get(i, i) + delta);
    }
    out
}

/// Spectral abscissa of a Metzler matrix (its Perron-Frobenius eigenvalue).
///
/// Bisection on lambda over the M-matrix characterization of
/// Hurwitz stability of A - lambda I. The bracket starts at
/// [max diagonal, max row sum], both valid bounds for Metzler matrices, and
/// shrinks to relative width 1e-13. Exact for reducible matrices; no
/// irreducibility or perturbation is needed.
pub fn spectral_abscissa_metzler(a: &RealMatrix) -> Result<f64> {
    a.require_metzler()?;
    let n = a.rows();
    if n > ABSCISSA_SIZE_CAP {
        return Err(Error::SizeExceeded {
            what: "spectral abscissa",
            size: n,
            cap: ABSCISSA_SIZE_CAP,
        });
    }
    let mut lo = (0..n).map(|i| a.get(i, i)).fold(f64::NEG_INFINITY, f64::max);
    let mut hi = (0..n)
        .map(|i| (0..n).map(|j| a.get(i, j)).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        // diagonal-dominant degenerate bracket: the abscissa is max a_ii
        return Ok(lo);
    }
    // ensure the upper end certifies "abscissa < hi"
    let pad = 1e-9 * (1.0 + hi.abs());
    hi += pad;
    let tol_of = |lo: f64, hi: f64| 1e-13 * (1.0 + lo.abs().max(hi.abs()));
    let mut iters = 0;
    while hi - lo > tol_of(lo, hi) && iters < 200 {
        let mid = 0.5 * (lo + hi);
        let hurwitz = m_matrix_pivots_positive(&shift_diagonal(a, -mid));
        if hurwitz {
            hi = mid;
        } else {
            lo = mid;
        }
        iters += 1;
    }
    Ok(0.5 * (lo + hi))
}

/// Verdict of the Hurwitz test with the evidence from both routes.
#[derive(Debug, Clone)]
pub struct HurwitzReport {
    pub verdict: bool,
    /// v > 0 with v^T A < 0, present iff the verdict is true.
    pub lyapunov: Option<LpCertificate>,
    /// Whether the computed inverse is entrywise nonpositive (None when A is
    /// numerically singular, which already refutes Hurwitz stability).
    pub inverse_nonpositive: Option<bool>,
    /// Spectral abscissa, available up to the size cap.
    pub abscissa_estimate: Option<f64>,
}

/// Hurwitz stability of a real Metzler matrix, decided twice: once by the
/// Lyapunov-vector linear program and once by inverse nonpositivity. The two
/// routes must agree; the abscissa estimate is cross-checked against the
/// verdict sign.
pub fn hurwitz_metzler(a: &RealMatrix) -> Result<HurwitzReport> {
    hurwitz_metzler_with(a, &Tolerances::default())
}

pub fn hurwitz_metzler_with(a: &RealMatrix, tol: &Tolerances) -> Result<HurwitzReport> {
    a.require_metzler()?;
    let lp = lyapunov_vector(a)?;
    let lp_verdict = lp.is_feasible();

    let (inverse_nonpositive, inv_verdict) = match lu_inverse(a, tol.pivot_rel) {
        Ok(inv) => {
            let bound = tol.inverse_nonpos_rel * inv.inf_norm();
            let nonpos = (0..inv.rows())
                .all(|r| (0..inv.cols()).all(|c| inv.get(r, c) <= bound));
            (Some(nonpos), nonpos)
        }
        Err(Error::Singular) => (None, false),
        Err(e) => return Err(e),
    };

    if lp_verdict != inv_verdict {
        return Err(Error::Disagreement {
            context: format!(
                "Hurwitz routes differ: Lyapunov LP says {lp_verdict}, inverse says {inv_verdict}"
            ),
        });
    }

    let abscissa_estimate = if a.rows() <= ABSCISSA_SIZE_CAP {
        let abscissa = spectral_abscissa_metzler(a)?;
        let band = 1e-9 * (1.0 + a.inf_norm());
        if lp_verdict && abscissa >= band {
            return Err(Error::Disagreement {
                context: format!("verdict Hurwitz but abscissa = {abscissa}"),
            });
        }
        if !lp_verdict && abscissa <= -band {
            return Err(Error::Disagreement {
                context: format!("verdict not Hurwitz but abscissa = {abscissa}"),
            });
        }
        Some(abscissa)
    } else {
        None
    };

    Ok(HurwitzReport {
        verdict: lp_verdict,
        lyapunov: lp.certificate().cloned(),
        inverse_nonpositive,
        abscissa_estimate,
    })
}

/// Hurwitz stability of a 2x2-blocked Metzler matrix decided through the
/// Schur complement of the leading block: with M11 Hurwitz (checked), the
/// whole matrix is Hurwitz iff M22 - M21 M11^{-1} M12 is.
pub fn schur_split_hurwitz(m: &RealMatrix, n1: usize) -> Result<bool> {
    m.require_metzler()?;
    let n = m.rows();
    if n1 == 0 || n1 >= n {
        return Err(Error::Invalid {
            message: format!("split index {n1} must lie strictly inside 1..{n}"),
        });
    }
    let block = |r0: usize, r1: usize, c0: usize, c1: usize| -> RealMatrix {
        let mut out = RealMatrix::zeros(r1 - r0, c1 - c0);
        for r in r0..r1 {
            for c in c0..c1 {
                out.set(r - r0, c - c0, m.get(r, c));
            }
        }
        out
    };
    let m11 = block(0, n1, 0, n1);
    let m12 = block(0, n1, n1, n);
    let m21 = block(n1, n, 0, n1);
    let m22 = block(n1, n, n1, n);
    if !is_hurwitz_metzler(&m11)? {
        return Err(Error::NotHurwitz {
            what: "leading diagonal block",
        });
    }
    let complement = m22.sub(&m21.matmul(&real_inverse(&m11)?)?.matmul(&m12)?)?;
    // the complement is Metzler again: -M11^{-1} is nonnegative
    Ok(hurwitz_metzler(&complement)?.verdict)
}

/// Positive definiteness via Cholesky; the input is symmetrized first.
pub fn is_positive_definite(s: &RealMatrix) -> Result<bool> {
    if !s.is_square() {
        return Err(Error::NotSquare {
            rows: s.rows(),
            cols: s.cols(),
        });
    }
    let n = s.rows();
    let tol = 1e-12 * (1.0 + s.inf_norm());
    let mut l = vec![vec![0.0f64; n]; n];
    for j in 0..n {
        for i in j..n {
            let sym = 0.5 * (s.get(i, j) + s.get(j, i));
            let mut sum = sym;
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if sum <= tol {
                    return Ok(false);
                }
                l[j][j] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signs::QualMatrix;

    fn rm(rows: Vec<Vec<f64>>) -> RealMatrix {
        RealMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn lp_feasible_for_triangular_pattern() {
        // v^T U < 0 for U = [[-1,1],[0,-1]]
        let u = rm(vec![vec![-1.0, 1.0], vec![0.0, -1.0]]);
        let out = lyapunov_vector(&u).unwrap();
        let cert = out.certificate().expect("feasible");
        let prod = u.vecmat(&cert.point).unwrap();
        assert!(prod.iter().all(|&v| v < 0.0));
        assert!(cert.point.iter().all(|&v| v > 0.0));
        assert!(cert.margin >= 1.0 - 1e-9);
    }

    #[test]
    fn lp_infeasible_for_exchange_pattern() {
        let u = rm(vec![vec![-1.0, 1.0], vec![1.0, -1.0]]);
        assert!(!lyapunov_vector(&u).unwrap().is_feasible());
    }

    #[test]
    fn lp_empty_constraints() {
        let g = RealMatrix::zeros(0, 3);
        let out = lp_strict_feasible(&g, &[]).unwrap();
        assert_eq!(out.certificate().unwrap().point, vec![1.0; 3]);
    }

    #[test]
    fn lp_free_variables() {
        // find x1 >= 1 and free x2 with x1 - x2 <= -1: needs x2 >= 2
        let p = FeasibilityProblem {
            num_vars: 2,
            free: vec![false, true],
            rows: vec![(vec![1.0, -1.0], RowSense::Strict)],
        };
        let out = solve_feasibility(&p).unwrap();
        let c = out.certificate().unwrap();
        assert!(c.point[0] >= 1.0 - 1e-9);
        assert!(c.point[0] - c.point[1] <= -1.0 + 1e-9);
    }

    #[test]
    fn lp_mixed_senses() {
        // x >= 1, x <= 0 is infeasible even non-strictly
        let p = FeasibilityProblem {
            num_vars: 1,
            free: vec![false],
            rows: vec![(vec![1.0], RowSense::NonStrict)],
        };
        assert!(!solve_feasibility(&p).unwrap().is_feasible());
    }

    #[test]
    fn hurwitz_two_by_two() {
        let stable = rm(vec![vec![-1.0, 2.0], vec![1.0, -5.0]]);
        let rep = hurwitz_metzler(&stable).unwrap();
        assert!(rep.verdict);
        assert_eq!(rep.inverse_nonpositive, Some(true));
        let unstable = rm(vec![vec![-1.0, 2.0], vec![1.0, -1.0]]);
        let rep = hurwitz_metzler(&unstable).unwrap();
        assert!(!rep.verdict);
        assert!(hurwitz_metzler(&rm(vec![vec![-1.0, 0.0], vec![0.0, -1.0]])).unwrap().verdict);
        let not_metzler = rm(vec![vec![-1.0, -2.0], vec![1.0, -1.0]]);
        assert!(matches!(
            hurwitz_metzler(&not_metzler),
            Err(Error::NotMetzler { .. })
        ));
    }

    #[test]
    fn inverse_reproduces_closed_form() {
        let a = rm(vec![vec![-1.0, 2.0], vec![1.0, -5.0]]);
        let inv = real_inverse(&a).unwrap();
        let expected = rm(vec![
            vec![-5.0 / 3.0, -2.0 / 3.0],
            vec![-1.0 / 3.0, -1.0 / 3.0],
        ]);
        for r in 0..2 {
            for c in 0..2 {
                assert!((inv.get(r, c) - expected.get(r, c)).abs() < 1e-12);
            }
        }
        let (id_inv, residual) = real_inverse_with_residual(&RealMatrix::identity(4)).unwrap();
        assert_eq!(id_inv, RealMatrix::identity(4));
        assert!(residual < 1e-14);
        let singular = rm(vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert!(matches!(real_inverse(&singular), Err(Error::Singular)));
    }

    #[test]
    fn abscissa_on_cycle_and_diagonal() {
        // 3-cycle permutation minus identity has abscissa 0
        let p_minus_i = rm(vec![
            vec![-1.0, 1.0, 0.0],
            vec![0.0, -1.0, 1.0],
            vec![1.0, 0.0, -1.0],
        ]);
        let val = spectral_abscissa_metzler(&p_minus_i).unwrap();
        assert!(val.abs() <= 1e-9, "got {val}");

        let d = rm(vec![vec![-1.0, 0.0], vec![0.0, -3.0]]);
        assert!((spectral_abscissa_metzler(&d).unwrap() + 1.0).abs() <= 1e-12);

        // closed form for a symmetric exchange realization: -1 + sqrt(2)
        let w = rm(vec![vec![-1.0, 1.0], vec![2.0, -1.0]]);
        let expect = 2f64.sqrt() - 1.0;
        assert!((spectral_abscissa_metzler(&w).unwrap() - expect).abs() <= 1e-9);
    }

    #[test]
    fn abscissa_monotone_in_entries() {
        let a = rm(vec![vec![-2.0, 0.5], vec![0.3, -1.0]]);
        let b = rm(vec![vec![-1.5, 0.9], vec![0.3, -0.7]]);
        let va = spectral_abscissa_metzler(&a).unwrap();
        let vb = spectral_abscissa_metzler(&b).unwrap();
        assert!(va <= vb + 1e-7);
    }

    #[test]
    fn abscissa_matches_hurwitz_predicate() {
        let qm: QualMatrix = "- + 0 ; 0 - + ; + 0 -".parse().unwrap();
        for seed in 0..100u64 {
            let m = qm.sample(seed, 1.0).unwrap();
            let fast = is_hurwitz_metzler(&m).unwrap();
            let abscissa = spectral_abscissa_metzler(&m).unwrap();
            assert_eq!(fast, abscissa < 0.0, "seed {seed}: abscissa {abscissa}");
        }
    }

    #[test]
    fn schur_split_matches_direct_test() {
        let block_diag = rm(vec![
            vec![-1.0, 0.5, 0.0, 0.0],
            vec![0.2, -2.0, 0.0, 0.0],
            vec![0.0, 0.0, -1.0, 0.1],
            vec![0.0, 0.0, 0.3, -1.0],
        ]);
        assert!(schur_split_hurwitz(&block_diag, 2).unwrap());

        let m22_unstable = rm(vec![
            vec![-1.0, 0.0, 0.0],
            vec![0.0, -1.0, 2.0],
            vec![0.0, 3.0, -1.0],
        ]);
        assert!(!schur_split_hurwitz(&m22_unstable, 1).unwrap());

        let m11_unstable = rm(vec![vec![1.0, 0.0], vec![0.0, -1.0]]);
        assert!(matches!(
            schur_split_hurwitz(&m11_unstable, 1),
            Err(Error::NotHurwitz { .. })
        ));
    }

    #[test]
    fn cholesky_detects_definiteness() {
        let pd = rm(vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert!(is_positive_definite(&pd).unwrap());
        let indef = rm(vec![vec![1.0, 3.0], vec![3.0, 1.0]]);
        assert!(!is_positive_definite(&indef).unwrap());
    }

    #[test]
    fn certificates_revalidate_by_substitution() {
        let qm: QualMatrix = "- + + ; 0 - 0 ; 0 + -".parse().unwrap();
        for seed in 0..50u64 {
            let m = qm.sample(seed, 1.0).unwrap();
            let rep = hurwitz_metzler(&m).unwrap();
            if let Some(cert) = rep.lyapunov {
                let prod = m.vecmat(&cert.point).unwrap();
                for v in prod {
                    assert!(v <= -cert.margin + 1e-9);
                }
            }
        }
    }
}
