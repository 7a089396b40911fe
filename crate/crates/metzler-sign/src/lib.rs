//! Qualitative stability analysis for Metzler matrices.
//!
//! The crate decides sign-stability and related structural properties of
//! sign-matrices, block matrices, convex hulls of matrix families, and
//! matrices mixing sign and real entries. Every verdict comes with
//! machine-checkable evidence: Lyapunov vectors, LP multipliers,
//! triangularizing permutations, cycle witnesses, or explicit counterexample
//! matrices.
//!
//! Entry points by topic:
//!
//! - [`signs`]: sign values, sign/real/integer/mixed matrix containers,
//!   qualitative classes and reproducible sampling.
//! - [`graph`]: matrix digraphs, cycle detection, topological relabeling,
//!   reachability, bipartite cycle tests, DOT export.
//! - [`numeric`]: strict-feasibility linear programs, Hurwitz tests, dense
//!   inversion, the spectral-abscissa oracle, the Schur-complement split.
//! - [`stability`]: sign-stability, Schur sign-stability, potential
//!   stability, necessary conditions, instability witnesses.
//! - [`blocks`]: interconnections of Metzler blocks with factored
//!   nonnegative couplings, decided through multiplier linear programs.
//! - [`hull`]: sign-summability, sign-stability of a convex hull of
//!   patterns, common linear and diagonal quadratic Lyapunov functions.
//! - [`kernel`]: sign-matrix inverses, indefinite-pattern expansion, the
//!   L+ decision, and kernel-constrained sign-stability.
//! - [`mixed`]: block-structured matrices with one sign block and real
//!   blocks elsewhere.
//! - [`applications`]: structural stability wrappers for delayed, switched,
//!   impulsive, nonlinear positive, and reaction-network systems.
//! - [`cli`]: matrix file parsing, subcommand dispatch, JSON reports.
//!
//! The `examples/` directory holds one runnable walkthrough per capability;
//! the `metzler-sign` binary exposes the same analyses on matrix files.

pub mod applications;
pub mod blocks;
pub mod cli;
pub mod error;
pub mod graph;
pub mod hull;
pub mod kernel;
pub mod mixed;
pub mod numeric;
mod parallel;
mod rng;
pub mod signs;
pub mod stability;

pub use error::{Error, Result};
pub use signs::{IntMatrix, MixedEntry, MixedMatrix, QualMatrix, RealMatrix, SignValue};

/// Tri-state outcome of a structural decision. `Unknown` marks the verdicts
/// of sufficient-only tests that did not fire; it never refutes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Unknown,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    pub fn holds(self) -> bool {
        self == Verdict::Holds
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Unknown => "unknown",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}
