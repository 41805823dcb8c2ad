//! Arithmetic in a truncated Novikov-style power series ring and homological
//! algebra for finitely generated chain complexes over it.
//!
//! Elements are integer (or mod 2) coefficient lists `c_0..c_N` representing
//! `c_0 + c_1 t + ... + c_N t^N`. All computations are performed modulo
//! `t^{N+1}`, but homology is reported with untruncated semantics: a result is
//! only accepted when it is stable in the truncation order, and degree
//! overflow is reported as an error rather than silently wrapped.

pub mod complex;
pub mod homology;
pub mod kunneth;
pub mod poly;
pub mod ring;
pub mod sample;
pub mod serial;

pub use complex::{Complex, GenLabel};
pub use homology::{homology, ClassSummary, HomologySummary};
pub use kunneth::{kunneth_check, KunnethReport};
pub use ring::{Nov, Truncation};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NovError {
    #[error("d^2 != 0: d^2({from}) has {entry} on {to}")]
    DSquared {
        from: String,
        to: String,
        entry: String,
    },
    #[error("differential does not preserve the class grading: {from} (class {fc}) maps to {to} (class {tc})")]
    ClassGrading {
        from: String,
        fc: usize,
        to: String,
        tc: usize,
    },
    #[error("no parity grading: differential graph contains an odd cycle through {0}")]
    OddCycle(String),
    #[error("inverting t is not defined in the truncated ring")]
    TNotInvertible,
    #[error("element {0} is not a unit")]
    NotAUnit(String),
    #[error("homology ranks not stable under truncation doubling: {0}")]
    Unstable(String),
    #[error("torsion block not classifiable over the integral series ring: leading coefficient {0} at t-order {1}")]
    Unclassifiable(String, usize),
    #[error("truncation orders differ: {0} vs {1}")]
    TruncationMismatch(usize, usize),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Other(String),
}
