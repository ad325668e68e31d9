use thiserror::Error;

use crate::model::{Candidate, DistrictId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("an election needs at least one candidate")]
    NoCandidates,
    #[error("an election needs at least one district")]
    NoDistricts,
    #[error("tie order is not a permutation of the candidates: {0}")]
    TieOrder(String),
    #[error("district {district}: row has {found} entries, expected {expected}")]
    RowLength {
        district: DistrictId,
        expected: usize,
        found: usize,
    },
    #[error("profiles disagree on the shape of the election")]
    ShapeMismatch,
    #[error("district {district}: original row has {original} voters but manipulated row has {manipulated}")]
    RowSumMismatch {
        district: DistrictId,
        original: u64,
        manipulated: u64,
    },
    #[error("district {district}: declared size {declared} but the row has {actual} voters")]
    SizeMismatch {
        district: DistrictId,
        declared: u64,
        actual: u64,
    },
    #[error("district {district}: weight must be a positive integer")]
    ZeroWeight { district: DistrictId },
    #[error("district {district}: gamma {gamma} exceeds the district size {size}")]
    GammaTooLarge {
        district: DistrictId,
        gamma: u64,
        size: u64,
    },
    #[error("vote or weight totals overflow 64-bit arithmetic")]
    Overflow,
    #[error("unknown candidate {0}")]
    UnknownCandidate(Candidate),
    #[error("unknown district {0}")]
    UnknownDistrict(DistrictId),
    #[error("a candidate cannot be compared with itself")]
    SameCandidate,
    #[error("recounted district {0} was not manipulated")]
    RecountNotSubset(DistrictId),
    #[error("this problem requires a manipulated profile")]
    MissingManipulated,
    #[error("manipulation problems take the original profile only")]
    UnexpectedManipulated,
    #[error("solver expects the {expected} rule")]
    WrongRule { expected: crate::model::Rule },
    #[error("invalid manipulation: {0}")]
    InvalidStrategy(crate::manipulation::Violation),
    #[error("search space exceeded the node limit of {limit}")]
    SearchSpaceExceeded { limit: u64 },
    #[error("candidate pruning needs at least one voter")]
    EmptyElectorate,
    #[error("invalid graph: {0}")]
    Graph(String),
    #[error("oracle refused: {0}")]
    OracleLimit(String),
    #[error("reduction precondition violated: {0}")]
    Reduction(String),
    #[error("witness does not belong to this layout: {0}")]
    Witness(String),
    #[error("{0}")]
    Format(String),
}
