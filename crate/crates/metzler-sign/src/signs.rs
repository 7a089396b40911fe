//! Sign algebra and the matrix containers used throughout the crate.
//!
//! A sign-matrix stores qualitative entries only: negative, zero, positive,
//! or indefinite. Its qualitative class is the set of real matrices matching
//! the pattern entrywise; `contains` decides membership and `sample` draws a
//! member reproducibly from a seed.

use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rng::Rng;

/// A qualitative sign value. `Indef` stands for a sign that cannot be
/// resolved, e.g. the sum of a positive and a negative entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignValue {
    Neg,
    Zero,
    Pos,
    Indef,
}

use SignValue::{Indef, Neg, Pos, Zero};

impl SignValue {
    /// Exact sign of a real number.
    pub fn of(x: f64) -> SignValue {
        if x > 0.0 {
            Pos
        } else if x < 0.0 {
            Neg
        } else {
            Zero
        }
    }

    /// Sign of a real number with entries below `tol` in magnitude read as zero.
    pub fn of_with_tol(x: f64, tol: f64) -> SignValue {
        if x.abs() <= tol {
            Zero
        } else if x > 0.0 {
            Pos
        } else {
            Neg
        }
    }

    pub fn is_definite(self) -> bool {
        self != Indef
    }

    /// Integer representative: -1, 0, +1. Indefinite entries have none.
    pub fn unit(self) -> Option<i64> {
        match self {
            Neg => Some(-1),
            Zero => Some(0),
            Pos => Some(1),
            Indef => None,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Neg => "-",
            Zero => "0",
            Pos => "+",
            Indef => "?",
        }
    }
}

impl Add for SignValue {
    type Output = SignValue;

    fn add(self, rhs: SignValue) -> SignValue {
        match (self, rhs) {
            (Zero, x) | (x, Zero) => x,
            (Pos, Pos) => Pos,
            (Neg, Neg) => Neg,
            // opposite definite signs, or anything already indefinite
            _ => Indef,
        }
    }
}

impl Mul for SignValue {
    type Output = SignValue;

    fn mul(self, rhs: SignValue) -> SignValue {
        // Zero annihilates, including Zero * Indef: every realization of an
        // indefinite entry times zero is zero.
        match (self, rhs) {
            (Zero, _) | (_, Zero) => Zero,
            (Indef, _) | (_, Indef) => Indef,
            (Pos, Pos) | (Neg, Neg) => Pos,
            _ => Neg,
        }
    }
}

impl fmt::Display for SignValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Shared row-major storage plumbing.
macro_rules! grid_common {
    ($ty:ident, $elem:ty) => {
        impl $ty {
            pub fn rows(&self) -> usize {
                self.rows
            }

            pub fn cols(&self) -> usize {
                self.cols
            }

            pub fn is_square(&self) -> bool {
                self.rows == self.cols
            }

            pub fn get(&self, row: usize, col: usize) -> $elem {
                self.entries[row * self.cols + col]
            }

            pub fn set(&mut self, row: usize, col: usize, value: $elem) {
                self.entries[row * self.cols + col] = value;
            }

            pub fn transpose(&self) -> $ty {
                let mut entries = Vec::with_capacity(self.entries.len());
                for c in 0..self.cols {
                    for r in 0..self.rows {
                        entries.push(self.get(r, c));
                    }
                }
                $ty {
                    rows: self.cols,
                    cols: self.rows,
                    entries,
                }
            }

            /// Simultaneous row/column relabeling: entry (r, c) of the result
            /// is entry (perm[r], perm[c]) of `self`. Requires a square matrix
            /// and a permutation of 0..n.
            pub fn permute(&self, perm: &[usize]) -> Result<$ty> {
                let n = self.rows;
                if !self.is_square() {
                    return Err(Error::NotSquare {
                        rows: self.rows,
                        cols: self.cols,
                    });
                }
                let mut seen = vec![false; n];
                if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
                    return Err(Error::Invalid {
                        message: format!("not a permutation of 0..{n}"),
                    });
                }
                let mut out = self.clone();
                for r in 0..n {
                    for c in 0..n {
                        out.set(r, c, self.get(perm[r], perm[c]));
                    }
                }
                Ok(out)
            }
        }
    };
}

/// A matrix of sign values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QualMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<SignValue>,
}

grid_common!(QualMatrix, SignValue);

impl QualMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<SignValue>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::Invalid {
                message: format!(
                    "sign-matrix needs positive dimensions and {} entries, got {}",
                    rows * cols,
                    entries.len()
                ),
            });
        }
        Ok(QualMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<SignValue>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Invalid {
                message: "ragged rows".into(),
            });
        }
        QualMatrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn filled(rows: usize, cols: usize, value: SignValue) -> Result<Self> {
        QualMatrix::new(rows, cols, vec![value; rows * cols])
    }

    /// Identity pattern: positive diagonal, zero elsewhere.
    pub fn identity(n: usize) -> Self {
        let mut m = QualMatrix::filled(n, n, Zero).expect("positive dimension");
        for i in 0..n {
            m.set(i, i, Pos);
        }
        m
    }

    pub fn is_definite(&self) -> bool {
        self.entries.iter().all(|s| s.is_definite())
    }

    /// Position of the first indefinite entry, if any.
    pub fn first_indefinite(&self) -> Option<(usize, usize)> {
        self.entries
            .iter()
            .position(|s| !s.is_definite())
            .map(|k| (k / self.cols, k % self.cols))
    }

    pub fn indefinite_positions(&self) -> Vec<(usize, usize)> {
        (0..self.rows)
            .flat_map(|r| (0..self.cols).map(move |c| (r, c)))
            .filter(|&(r, c)| self.get(r, c) == Indef)
            .collect()
    }

    /// Square with off-diagonal entries in {0, +}.
    pub fn is_metzler(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| r == c || matches!(self.get(r, c), Zero | Pos))
            })
    }

    pub fn is_nonneg(&self) -> bool {
        self.entries.iter().all(|s| matches!(s, Zero | Pos))
    }

    pub fn require_definite(&self) -> Result<()> {
        match self.first_indefinite() {
            Some((row, col)) => Err(Error::IndefiniteEntry { row, col }),
            None => Ok(()),
        }
    }

    pub fn require_metzler(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        for r in 0..self.rows {
            for c in 0..self.cols {
                if r != c && !matches!(self.get(r, c), Zero | Pos) {
                    return Err(Error::NotMetzler { row: r, col: c });
                }
            }
        }
        Ok(())
    }

    pub fn require_nonneg(&self) -> Result<()> {
        for r in 0..self.rows {
            for c in 0..self.cols {
                if !matches!(self.get(r, c), Zero | Pos) {
                    return Err(Error::NegativeEntry { row: r, col: c });
                }
            }
        }
        Ok(())
    }

    /// Entrywise qualitative sum. The result may contain indefinite entries.
    pub fn add(&self, other: &QualMatrix) -> Result<QualMatrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::ShapeMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| a + b)
            .collect();
        Ok(QualMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Qualitative matrix product over (sign sum, sign product).
    pub fn mul(&self, other: &QualMatrix) -> Result<QualMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let mut out = QualMatrix::filled(self.rows, other.cols, Zero)?;
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = Zero;
                for k in 0..self.cols {
                    acc = acc + self.get(r, k) * other.get(k, c);
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    /// The {-1, 0, +1} representative of a definite sign-matrix.
    pub fn unit_sign(&self) -> Result<IntMatrix> {
        let mut entries = Vec::with_capacity(self.entries.len());
        for (k, s) in self.entries.iter().enumerate() {
            match s.unit() {
                Some(v) => entries.push(v),
                None => {
                    return Err(Error::IndefiniteEntry {
                        row: k / self.cols,
                        col: k % self.cols,
                    })
                }
            }
        }
        IntMatrix::new(self.rows, self.cols, entries)
    }

    /// Qualitative-class membership: each entry of `m` must be positive,
    /// negative or exactly zero as this pattern prescribes.
    pub fn contains(&self, m: &RealMatrix) -> Result<bool> {
        if (self.rows, self.cols) != (m.rows, m.cols) {
            return Err(Error::ShapeMismatch {
                left: (self.rows, self.cols),
                right: (m.rows, m.cols),
            });
        }
        self.require_definite()?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                let ok = match self.get(r, c) {
                    Pos => m.get(r, c) > 0.0,
                    Neg => m.get(r, c) < 0.0,
                    Zero => m.get(r, c) == 0.0,
                    Indef => unreachable!(),
                };
                if !ok {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Draw a member of the qualitative class. Deterministic in `seed`;
    /// nonzero magnitudes are log-uniform in [0.1 / scale, 10 * scale].
    ///
    /// The wide magnitude law deliberately exercises the unboundedness of
    /// qualitative classes.
    pub fn sample(&self, seed: u64, scale: f64) -> Result<RealMatrix> {
        self.require_definite()?;
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Invalid {
                message: format!("scale must be positive and finite, got {scale}"),
            });
        }
        let lo = (0.1 / scale).log10();
        let hi = (10.0 * scale).log10();
        let mut rng = Rng::new(seed);
        let mut entries = Vec::with_capacity(self.entries.len());
        for s in &self.entries {
            let v = match s {
                Zero => 0.0,
                Pos | Neg => {
                    let mag = 10f64.powf(lo + rng.next_f64() * (hi - lo));
                    if *s == Pos {
                        mag
                    } else {
                        -mag
                    }
                }
                Indef => unreachable!(),
            };
            entries.push(v);
        }
        RealMatrix::new(self.rows, self.cols, entries)
    }
}

impl fmt::Display for QualMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            if r > 0 {
                writeln!(f)?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    f.write_str(" ")?;
                }
                f.write_str(self.get(r, c).token())?;
            }
        }
        Ok(())
    }
}

impl FromStr for QualMatrix {
    type Err = Error;

    /// Rows separated by ';' or newlines; tokens `-`, `0`, `+`, `?`.
    fn from_str(s: &str) -> Result<QualMatrix> {
        let mut rows = Vec::new();
        for part in s.split([';', '\n']) {
            let row: Vec<SignValue> = part
                .split_whitespace()
                .map(|tok| match parse_entry_token(tok) {
                    Ok(MixedEntry::Sign(v)) => Ok(v),
                    _ => Err(Error::Invalid {
                        message: format!("not a sign token: '{tok}'"),
                    }),
                })
                .collect::<Result<_>>()?;
            if !row.is_empty() {
                rows.push(row);
            }
        }
        QualMatrix::from_rows(rows)
    }
}

/// Dense real matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

grid_common!(RealMatrix, f64);

impl RealMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Invalid {
                message: format!("expected {} entries, got {}", rows * cols, entries.len()),
            });
        }
        if let Some(k) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: k.checked_div(cols).unwrap_or(0),
                col: k.checked_rem(cols).unwrap_or(0),
            });
        }
        Ok(RealMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Invalid {
                message: "ragged rows".into(),
            });
        }
        RealMatrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RealMatrix {
            rows,
            cols,
            entries: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RealMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn is_metzler(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self.get(r, c) >= 0.0))
    }

    pub fn is_nonneg(&self) -> bool {
        self.entries.iter().all(|&v| v >= 0.0)
    }

    pub fn require_metzler(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        for r in 0..self.rows {
            for c in 0..self.cols {
                if r != c && self.get(r, c) < 0.0 {
                    return Err(Error::NotMetzler { row: r, col: c });
                }
            }
        }
        Ok(())
    }

    pub fn require_nonneg(&self) -> Result<()> {
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) < 0.0 {
                    return Err(Error::NegativeEntry { row: r, col: c });
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &RealMatrix) -> Result<RealMatrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::ShapeMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        RealMatrix::new(self.rows, self.cols, entries)
    }

    pub fn sub(&self, other: &RealMatrix) -> Result<RealMatrix> {
        self.add(&other.scaled(-1.0))
    }

    pub fn scaled(&self, factor: f64) -> RealMatrix {
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn matmul(&self, other: &RealMatrix) -> Result<RealMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let mut out = RealMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    out.set(r, c, out.get(r, c) + a * other.get(k, c));
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product A x.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::ShapeMismatch {
                left: (self.rows, self.cols),
                right: (x.len(), 1),
            });
        }
        Ok((0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c) * x[c]).sum())
            .collect())
    }

    /// Row-vector product v^T A.
    pub fn vecmat(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.rows {
            return Err(Error::ShapeMismatch {
                left: (self.rows, self.cols),
                right: (1, v.len()),
            });
        }
        Ok((0..self.cols)
            .map(|c| (0..self.rows).map(|r| v[r] * self.get(r, c)).sum())
            .collect())
    }

    /// Induced infinity norm (max absolute row sum).
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Exact sign pattern of the matrix.
    pub fn sign_pattern(&self) -> QualMatrix {
        self.sign_pattern_with_tol(0.0)
    }

    /// Sign pattern with entries of magnitude <= tol read as zero.
    pub fn sign_pattern_with_tol(&self, tol: f64) -> QualMatrix {
        QualMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|&v| SignValue::of_with_tol(v, tol))
                .collect(),
        }
    }
}

impl fmt::Display for RealMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            if r > 0 {
                writeln!(f)?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        Ok(())
    }
}

impl FromStr for RealMatrix {
    type Err = Error;

    /// Rows separated by ';' or newlines; whitespace-separated real literals.
    fn from_str(s: &str) -> Result<RealMatrix> {
        let mut rows = Vec::new();
        for part in s.split([';', '\n']) {
            let row: Vec<f64> = part
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| Error::Invalid {
                            message: format!("not a real literal: '{tok}'"),
                        })
                })
                .collect::<Result<_>>()?;
            if !row.is_empty() {
                rows.push(row);
            }
        }
        RealMatrix::from_rows(rows)
    }
}

/// Integer matrix; holds unit sign-matrices and stoichiometric data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i64>,
}

grid_common!(IntMatrix, i64);

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<i64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Invalid {
                message: format!("expected {} entries, got {}", rows * cols, entries.len()),
            });
        }
        Ok(IntMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Invalid {
                message: "ragged rows".into(),
            });
        }
        IntMatrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn matmul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    out.set(r, c, out.get(r, c) + a * other.get(k, c));
                }
            }
        }
        Ok(out)
    }

    pub fn to_real(&self) -> RealMatrix {
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&v| v as f64).collect(),
        }
    }

    pub fn sign_pattern(&self) -> QualMatrix {
        QualMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|&v| match v.cmp(&0) {
                    std::cmp::Ordering::Less => Neg,
                    std::cmp::Ordering::Equal => Zero,
                    std::cmp::Ordering::Greater => Pos,
                })
                .collect(),
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            if r > 0 {
                writeln!(f)?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        Ok(())
    }
}

/// A single entry of a mixed matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MixedEntry {
    Sign(SignValue),
    Real(f64),
}

impl MixedEntry {
    pub fn is_nonzero(self) -> bool {
        match self {
            MixedEntry::Sign(s) => s != Zero,
            MixedEntry::Real(v) => v != 0.0,
        }
    }
}

/// Matrix with a mix of sign and real entries, as produced by the text
/// format parser.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<MixedEntry>,
}

grid_common!(MixedMatrix, MixedEntry);

impl MixedMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<MixedEntry>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::Invalid {
                message: format!(
                    "mixed matrix needs positive dimensions and {} entries, got {}",
                    rows * cols,
                    entries.len()
                ),
            });
        }
        for (k, e) in entries.iter().enumerate() {
            if let MixedEntry::Real(v) = e {
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        row: k / cols,
                        col: k % cols,
                    });
                }
            }
        }
        Ok(MixedMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<MixedEntry>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Invalid {
                message: "ragged rows".into(),
            });
        }
        MixedMatrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_qual(q: &QualMatrix) -> Self {
        MixedMatrix {
            rows: q.rows,
            cols: q.cols,
            entries: q.entries.iter().map(|&s| MixedEntry::Sign(s)).collect(),
        }
    }

    pub fn from_real(m: &RealMatrix) -> Self {
        MixedMatrix {
            rows: m.rows,
            cols: m.cols,
            entries: m.entries.iter().map(|&v| MixedEntry::Real(v)).collect(),
        }
    }

    pub fn is_pure_sign(&self) -> bool {
        self.entries.iter().all(|e| matches!(e, MixedEntry::Sign(_)))
    }

    pub fn is_pure_real(&self) -> bool {
        self.entries
            .iter()
            .all(|e| matches!(e, MixedEntry::Real(_) | MixedEntry::Sign(Zero)))
    }

    /// Qualitative view: real entries collapse to their exact sign.
    pub fn to_qual(&self) -> QualMatrix {
        QualMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|e| match e {
                    MixedEntry::Sign(s) => *s,
                    MixedEntry::Real(v) => SignValue::of(*v),
                })
                .collect(),
        }
    }

    /// Real view. Sign zeros are accepted as 0; other sign entries have no
    /// numeric value and are rejected.
    pub fn to_real(&self) -> Result<RealMatrix> {
        let mut entries = Vec::with_capacity(self.entries.len());
        for (k, e) in self.entries.iter().enumerate() {
            match e {
                MixedEntry::Real(v) => entries.push(*v),
                MixedEntry::Sign(Zero) => entries.push(0.0),
                MixedEntry::Sign(_) => {
                    return Err(Error::SignEntry {
                        row: k / self.cols,
                        col: k % self.cols,
                    })
                }
            }
        }
        RealMatrix::new(self.rows, self.cols, entries)
    }

    /// Integer view for stoichiometric inputs; every entry must be a real
    /// with an integral value (or a sign zero).
    pub fn to_int(&self) -> Result<IntMatrix> {
        let real = self.to_real()?;
        let mut entries = Vec::with_capacity(real.entries.len());
        for (k, &v) in real.entries.iter().enumerate() {
            if v.fract() != 0.0 || v.abs() > i64::MAX as f64 {
                return Err(Error::Invalid {
                    message: format!(
                        "entry ({},{}) = {} is not an integer",
                        k / self.cols,
                        k % self.cols,
                        v
                    ),
                });
            }
            entries.push(v as i64);
        }
        IntMatrix::new(self.rows, self.cols, entries)
    }
}

impl FromStr for MixedMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<MixedMatrix> {
        let mut rows = Vec::new();
        for part in s.split([';', '\n']) {
            let row: Vec<MixedEntry> = part
                .split_whitespace()
                .map(parse_entry_token)
                .collect::<Result<_>>()?;
            if !row.is_empty() {
                rows.push(row);
            }
        }
        MixedMatrix::from_rows(rows)
    }
}

/// Token grammar shared by `FromStr` and the matrix file parser:
/// `+` / `-` / `0` / `?` are sign values (with unicode aliases), anything
/// else must parse as a finite real literal. A bare `-` is the negative
/// sign; `-0` is the real zero.
pub(crate) fn parse_entry_token(tok: &str) -> Result<MixedEntry> {
    match tok {
        "+" | "\u{2295}" => return Ok(MixedEntry::Sign(Pos)),
        "-" | "\u{2296}" => return Ok(MixedEntry::Sign(Neg)),
        "0" => return Ok(MixedEntry::Sign(Zero)),
        "?" | "\u{2299}" => return Ok(MixedEntry::Sign(Indef)),
        _ => {}
    }
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(MixedEntry::Real(v)),
        _ => Err(Error::Invalid {
            message: format!("unknown token '{tok}'"),
        }),
    }
}

/// Anything with a zero/nonzero entry pattern; drives graph construction.
pub trait NonzeroPattern {
    fn pattern_rows(&self) -> usize;
    fn pattern_cols(&self) -> usize;
    /// Whether entry (row, col) can be nonzero. Indefinite sign entries
    /// count as nonzero: every realization except zero creates the edge.
    fn entry_nonzero(&self, row: usize, col: usize) -> bool;
}

impl NonzeroPattern for QualMatrix {
    fn pattern_rows(&self) -> usize {
        self.rows
    }
    fn pattern_cols(&self) -> usize {
        self.cols
    }
    fn entry_nonzero(&self, row: usize, col: usize) -> bool {
        self.get(row, col) != Zero
    }
}

impl NonzeroPattern for RealMatrix {
    fn pattern_rows(&self) -> usize {
        self.rows
    }
    fn pattern_cols(&self) -> usize {
        self.cols
    }
    fn entry_nonzero(&self, row: usize, col: usize) -> bool {
        self.get(row, col) != 0.0
    }
}

impl NonzeroPattern for IntMatrix {
    fn pattern_rows(&self) -> usize {
        self.rows
    }
    fn pattern_cols(&self) -> usize {
        self.cols
    }
    fn entry_nonzero(&self, row: usize, col: usize) -> bool {
        self.get(row, col) != 0
    }
}

impl NonzeroPattern for MixedMatrix {
    fn pattern_rows(&self) -> usize {
        self.rows
    }
    fn pattern_cols(&self) -> usize {
        self.cols
    }
    fn entry_nonzero(&self, row: usize, col: usize) -> bool {
        self.get(row, col).is_nonzero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL: [SignValue; 4] = [Neg, Zero, Pos, Indef];

    #[test]
    fn sign_add_table() {
        assert_eq!(Pos + Pos, Pos);
        assert_eq!(Pos + Neg, Indef);
        assert_eq!(Zero + Zero, Zero);
        assert_eq!(Neg + Neg, Neg);
        assert_eq!(Indef + Zero, Indef);
        assert_eq!(Indef + Pos, Indef);
        // commutative, zero identity: all 16 pairs
        for a in ALL {
            for b in ALL {
                assert_eq!(a + b, b + a);
            }
            assert_eq!(a + Zero, a);
        }
    }

    #[test]
    fn sign_mul_table() {
        assert_eq!(Pos * Pos, Pos);
        assert_eq!(Zero * Pos, Zero);
        assert_eq!(Neg * Neg, Pos);
        assert_eq!(Pos * Neg, Neg);
        assert_eq!(Zero * Indef, Zero);
        assert_eq!(Indef * Pos, Indef);
        assert_eq!(Indef * Neg, Indef);
        assert_eq!(Indef * Indef, Indef);
        for a in ALL {
            for b in ALL {
                assert_eq!(a * b, b * a);
            }
            assert_eq!(a * Zero, Zero);
        }
    }

    #[test]
    fn qual_add_basic() {
        let neg: QualMatrix = "-".parse().unwrap();
        assert_eq!(neg.add(&neg).unwrap(), "-".parse().unwrap());
        let pos: QualMatrix = "+".parse().unwrap();
        assert_eq!(pos.add(&neg).unwrap().get(0, 0), Indef);
        let a: QualMatrix = "- + ; 0 -".parse().unwrap();
        let z = QualMatrix::filled(2, 2, Zero).unwrap();
        assert_eq!(z.add(&a).unwrap(), a);
        let bad = QualMatrix::filled(2, 3, Zero).unwrap();
        assert!(matches!(a.add(&bad), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn qual_mul_rank_one() {
        let col: QualMatrix = "+ ; +".parse().unwrap();
        let row_pp: QualMatrix = "+ +".parse().unwrap();
        assert_eq!(col.mul(&row_pp).unwrap(), "+ + ; + +".parse().unwrap());
        let row_p0: QualMatrix = "+ 0".parse().unwrap();
        assert_eq!(col.mul(&row_p0).unwrap(), "+ 0 ; + 0".parse().unwrap());
        let a: QualMatrix = "- + ; + -".parse().unwrap();
        assert_eq!(QualMatrix::identity(2).mul(&a).unwrap(), a);
    }

    #[test]
    fn unit_sign_map() {
        let m1: QualMatrix = "- + ; + -".parse().unwrap();
        assert_eq!(
            m1.unit_sign().unwrap(),
            IntMatrix::from_rows(vec![vec![-1, 1], vec![1, -1]]).unwrap()
        );
        let zero = QualMatrix::filled(2, 2, Zero).unwrap();
        assert_eq!(zero.unit_sign().unwrap(), IntMatrix::zeros(2, 2));
        // non-Metzler 3x3 with a definite pattern still maps entrywise
        let a: QualMatrix = "- + + ; - - - ; 0 + -".parse().unwrap();
        assert_eq!(
            a.unit_sign().unwrap(),
            IntMatrix::from_rows(vec![vec![-1, 1, 1], vec![-1, -1, -1], vec![0, 1, -1]]).unwrap()
        );
        let indef: QualMatrix = "?".parse().unwrap();
        assert!(matches!(
            indef.unit_sign(),
            Err(Error::IndefiniteEntry { row: 0, col: 0 })
        ));
    }

    #[test]
    fn class_membership() {
        let a: QualMatrix = "- + ; 0 -".parse().unwrap();
        let m = RealMatrix::from_rows(vec![vec![-2.0, 0.5], vec![0.0, -1.0]]).unwrap();
        assert!(a.contains(&m).unwrap());
        let m2 = RealMatrix::from_rows(vec![vec![-2.0, 0.0], vec![0.0, -1.0]]).unwrap();
        assert!(!a.contains(&m2).unwrap());
        let z = QualMatrix::filled(2, 2, Zero).unwrap();
        assert!(z.contains(&RealMatrix::zeros(2, 2)).unwrap());
        assert!(!z.contains(&m).unwrap());
    }

    #[test]
    fn sampling_respects_class_and_seed() {
        let a: QualMatrix = "- + 0 ; + - + ; 0 0 -".parse().unwrap();
        for seed in 0..50 {
            let m = a.sample(seed, 1.0).unwrap();
            assert!(a.contains(&m).unwrap(), "seed {seed}");
        }
        assert_eq!(a.sample(42, 10.0).unwrap(), a.sample(42, 10.0).unwrap());
        let neg: QualMatrix = "-".parse().unwrap();
        assert!(neg.sample(1, 1.0).unwrap().get(0, 0) < 0.0);
    }

    #[test]
    fn sampling_scale_bounds() {
        let a: QualMatrix = "+".parse().unwrap();
        for seed in 0..200 {
            let v = a.sample(seed, 1000.0).unwrap().get(0, 0);
            assert!((1e-4 - 1e-12..=1e4 + 1e-8).contains(&v));
        }
    }

    #[test]
    fn unit_sign_is_in_class() {
        let a: QualMatrix = "- + + ; - - - ; 0 + -".parse().unwrap();
        let u = a.unit_sign().unwrap().to_real();
        assert!(a.contains(&u).unwrap());
    }

    #[test]
    fn positive_scaling_closure() {
        let a: QualMatrix = "- + ; 0 -".parse().unwrap();
        let m = a.sample(9, 1.0).unwrap();
        for alpha in [0.25, 1.0, 17.5] {
            assert!(a.contains(&m.scaled(alpha)).unwrap());
        }
    }

    #[test]
    fn metzler_and_nonneg_predicates() {
        let metzler: QualMatrix = "- + ; 0 -".parse().unwrap();
        assert!(metzler.is_metzler());
        let not_metzler: QualMatrix = "- - ; + -".parse().unwrap();
        assert!(!not_metzler.is_metzler());
        assert!(!metzler.is_nonneg());
        let nonneg: QualMatrix = "0 + ; + 0".parse().unwrap();
        assert!(nonneg.is_nonneg() && nonneg.is_metzler());
    }

    #[test]
    fn permute_reverses_triangularity() {
        let lower: QualMatrix = "- 0 ; + -".parse().unwrap();
        let rev = lower.permute(&[1, 0]).unwrap();
        assert_eq!(rev, "- + ; 0 -".parse().unwrap());
        assert!(lower.permute(&[0, 0]).is_err());
    }

    #[test]
    fn mixed_views() {
        let m: MixedMatrix = "- 1.5 ; 0 -2".parse().unwrap();
        assert!(!m.is_pure_sign());
        assert!(!m.is_pure_real());
        let q = m.to_qual();
        assert_eq!(q.get(0, 0), Neg);
        assert_eq!(q.get(0, 1), Pos);
        assert_eq!(q.get(1, 1), Neg);
        assert!(m.to_real().is_err());
        let r: MixedMatrix = "1 0 ; -0 2".parse().unwrap();
        assert!(r.is_pure_real());
        assert_eq!(
            r.to_real().unwrap(),
            RealMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap()
        );
    }

    #[test]
    fn token_grammar() {
        assert_eq!(parse_entry_token("+").unwrap(), MixedEntry::Sign(Pos));
        assert_eq!(parse_entry_token("-").unwrap(), MixedEntry::Sign(Neg));
        assert_eq!(parse_entry_token("0").unwrap(), MixedEntry::Sign(Zero));
        assert_eq!(parse_entry_token("?").unwrap(), MixedEntry::Sign(Indef));
        assert_eq!(parse_entry_token("\u{2295}").unwrap(), MixedEntry::Sign(Pos));
        assert!(matches!(parse_entry_token("-0").unwrap(), MixedEntry::Real(v) if v == 0.0));
        assert!(matches!(parse_entry_token("3e-2").unwrap(), MixedEntry::Real(v) if (v - 0.03).abs() < 1e-15));
        assert!(parse_entry_token("x").is_err());
        assert!(parse_entry_token("nan").is_err());
    }
}
