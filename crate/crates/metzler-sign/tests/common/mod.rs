//! Shared oracles and generators for the integration suites. Everything here
//! is implemented independently of the library routines it is used to check:
//! the abscissa oracle goes through resolvent nonnegativity with its own
//! Gauss-Jordan elimination, reachability closure through boolean matrix
//! powers, and nilpotency through boolean pattern powers.

#![allow(dead_code)]

use metzler_sign::signs::{QualMatrix, RealMatrix, SignValue};

/// Test-local splitmix64; the suites never rely on the library's stream.
pub struct TestRng {
    state: u64,
}

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.f64() < p
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + self.f64() * (hi - lo)
    }
}

/// Oracle spectral abscissa of a Metzler matrix: bisection on resolvent
/// nonnegativity, (lambda I - A)^{-1} >= 0 entrywise iff lambda exceeds the
/// abscissa, with a self-contained partial-pivoted inversion.
pub fn oracle_abscissa(a: &RealMatrix) -> f64 {
    let n = a.rows();
    assert_eq!(n, a.cols(), "oracle needs a square matrix");
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        lo = lo.max(a.get(i, i));
        let row: f64 = (0..n).map(|j| a.get(i, j)).sum();
        hi = hi.max(row);
    }
    if hi <= lo {
        return lo;
    }
    hi += 1e-9 * (1.0 + hi.abs());
    for _ in 0..200 {
        if hi - lo <= 1e-13 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if resolvent_nonnegative(a, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn resolvent_nonnegative(a: &RealMatrix, lambda: f64) -> bool {
    let n = a.rows();
    // w = [lambda I - A | I], Gauss-Jordan with partial pivoting
    let mut w = vec![vec![0.0f64; 2 * n]; n];
    let mut scale = 0.0f64;
    for r in 0..n {
        for c in 0..n {
            let v = if r == c { lambda - a.get(r, c) } else { -a.get(r, c) };
            w[r][c] = v;
            scale = scale.max(v.abs());
        }
        w[r][n + r] = 1.0;
    }
    let threshold = 1e-13 * scale.max(1e-300);
    for col in 0..n {
        let mut best = col;
        for r in col + 1..n {
            if w[r][col].abs() > w[best][col].abs() {
                best = r;
            }
        }
        if w[best][col].abs() <= threshold {
            return false; // singular: lambda sits on the spectrum
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
    let mut inf_norm = 0.0f64;
    for row in &w {
        let s: f64 = row[n..].iter().map(|v| v.abs()).sum();
        inf_norm = inf_norm.max(s);
    }
    let tol = 1e-10 * inf_norm.max(1.0);
    w.iter().all(|row| row[n..].iter().all(|&v| v >= -tol))
}

/// Boolean reachability closure of the adjacency relation (paths of length
/// >= 1) by iterated boolean matrix products.
pub fn boolean_closure(adj: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = adj.len();
    let mut reach = adj.to_vec();
    let mut power = adj.to_vec();
    for _ in 1..n {
        let mut next = vec![vec![false; n]; n];
        for i in 0..n {
            for k in 0..n {
                if power[i][k] {
                    for j in 0..n {
                        if adj[k][j] {
                            next[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                reach[i][j] |= next[i][j];
            }
        }
        power = next;
    }
    reach
}

/// Nilpotency of a nonnegative zero/nonzero pattern via boolean powers.
pub fn boolean_nilpotent(adj: &[Vec<bool>]) -> bool {
    let n = adj.len();
    let mut power = adj.to_vec();
    for _ in 0..n {
        if power.iter().all(|row| row.iter().all(|&b| !b)) {
            return true;
        }
        let mut next = vec![vec![false; n]; n];
        for i in 0..n {
            for k in 0..n {
                if power[i][k] {
                    for j in 0..n {
                        if adj[k][j] {
                            next[i][j] = true;
                        }
                    }
                }
            }
        }
        power = next;
    }
    power.iter().all(|row| row.iter().all(|&b| !b))
}

pub fn sign(rng: &mut TestRng, neg: f64, zero: f64) -> SignValue {
    let x = rng.f64();
    if x < neg {
        SignValue::Neg
    } else if x < neg + zero {
        SignValue::Zero
    } else {
        SignValue::Pos
    }
}

/// Random definite Metzler pattern. Half the draws are acyclic by
/// construction (upper-triangular under a random relabeling with a negative
/// diagonal), the other half unrestricted, so both verdicts appear often.
pub fn random_metzler_pattern(rng: &mut TestRng, n: usize) -> QualMatrix {
    let stable_biased = rng.chance(0.5);
    let perm: Vec<usize> = random_permutation(rng, n);
    let mut rows = vec![vec![SignValue::Zero; n]; n];
    for r in 0..n {
        for c in 0..n {
            if r == c {
                rows[r][c] = if stable_biased {
                    SignValue::Neg
                } else {
                    sign(rng, 0.6, 0.2)
                };
            } else if rng.chance(0.35) {
                let allowed = !stable_biased || perm[r] < perm[c];
                if allowed {
                    rows[r][c] = SignValue::Pos;
                }
            }
        }
    }
    QualMatrix::from_rows(rows).unwrap()
}

/// Random sign-stable pattern: negative diagonal, positive entries only
/// above the diagonal of a random relabeling.
pub fn random_sign_stable_pattern(rng: &mut TestRng, n: usize, density: f64) -> QualMatrix {
    let perm = random_permutation(rng, n);
    let mut rows = vec![vec![SignValue::Zero; n]; n];
    for r in 0..n {
        rows[r][r] = SignValue::Neg;
        for c in 0..n {
            if r != c && perm[r] < perm[c] && rng.chance(density) {
                rows[r][c] = SignValue::Pos;
            }
        }
    }
    QualMatrix::from_rows(rows).unwrap()
}

pub fn random_permutation(rng: &mut TestRng, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.below(i + 1);
        perm.swap(i, j);
    }
    perm
}

/// Random real Metzler matrix with moderate magnitudes; `hurwitz_bias`
/// skews toward diagonally dominant (hence Hurwitz) draws.
pub fn random_real_metzler(rng: &mut TestRng, n: usize, hurwitz_bias: bool) -> RealMatrix {
    let mut rows = vec![vec![0.0f64; n]; n];
    for r in 0..n {
        for c in 0..n {
            if r != c && rng.chance(0.5) {
                rows[r][c] = rng.range(0.05, 1.5);
            }
        }
    }
    for r in 0..n {
        let off: f64 = rows[r].iter().sum();
        rows[r][r] = if hurwitz_bias && rng.chance(0.8) {
            -(off + rng.range(0.1, 2.0))
        } else {
            -rng.range(0.1, 3.0)
        };
    }
    RealMatrix::from_rows(rows).unwrap()
}

/// Random definite pattern over all three signs (not necessarily Metzler).
pub fn random_pattern(rng: &mut TestRng, rows: usize, cols: usize) -> QualMatrix {
    let grid = (0..rows)
        .map(|_| (0..cols).map(|_| sign(rng, 0.3, 0.35)).collect())
        .collect();
    QualMatrix::from_rows(grid).unwrap()
}

/// Random nonnegative pattern.
pub fn random_nonneg_pattern(rng: &mut TestRng, n: usize, density: f64) -> QualMatrix {
    let grid = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    if rng.chance(density) {
                        SignValue::Pos
                    } else {
                        SignValue::Zero
                    }
                })
                .collect()
        })
        .collect();
    QualMatrix::from_rows(grid).unwrap()
}
