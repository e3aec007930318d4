use thiserror::Error;

use crate::codespace::{Certificate, Word};
use crate::components::ComponentCertificate;
use crate::quasigroup::LineViolation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime power of at most 16")]
    NotPrimePower(u32),
    #[error("element index {index} out of range for GF({q})")]
    IndexOutOfRange { index: u32, q: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("alphabet mismatch: expected q={expected}, got q={actual}")]
    AlphabetMismatch { expected: u32, actual: u32 },
    #[error("code has {0} words, at least 2 are required")]
    TooSmall(usize),
    #[error("code is empty")]
    Empty,
    #[error("{what} exceeds the desk-scale limit")]
    TooLarge { what: String },
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("bad shape: {0}")]
    BadShape(String),
    #[error("not a quasigroup: {0}")]
    NotQuasigroup(LineViolation),
    #[error("coefficient {0} is zero")]
    ZeroCoefficient(usize),
    #[error("length {n} is not (q^s-1)/(q-1) for q={q}")]
    BadLength { q: u32, n: usize },
    #[error("{what} is not a perfect code: {certificate}")]
    NotPerfect {
        what: String,
        certificate: Certificate,
    },
    #[error("the (v, h) pair does not give a perfect code of length q+1: {0}")]
    BadVhPair(Certificate),
    #[error("bad perfect partition: {0}")]
    BadPartition(String),
    #[error("quasigroup has order {actual}, expected {expected}")]
    BadOrder { expected: u32, actual: u32 },
    #[error("sigma family is not linear (block {0})")]
    NonlinearSigma(usize),
    #[error("component for mu={mu} violates the parity-check law: {certificate}")]
    ComponentLawViolation {
        mu: Word,
        certificate: ComponentCertificate,
    },
    #[error("outer code is not perfect: {0}")]
    OuterNotPerfect(Certificate),
    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),
    #[error("union is not perfect: {0}")]
    NotPerfectResult(Certificate),
    #[error("r={r} exceeds n - rank = {max}")]
    RankTooHigh { r: u32, max: u32 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("structure violation: {0}")]
    StructureViolation(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn too_large(what: impl Into<String>) -> Self {
        Error::TooLarge { what: what.into() }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
