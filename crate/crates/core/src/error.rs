use thiserror::Error;

use crate::instance::ChoiceSolution;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty point set")]
    EmptyPointSet,

    #[error("bad magic/count")]
    BadHeader,
    #[error("parse error at line {0}")]
    ParseAt(usize),
    #[error("expected {0} segments")]
    CountMismatch(usize),
    #[error("segments {0},{1} not disjoint")]
    NotDisjoint(usize, usize),
    #[error("non-finite coordinate in segment {0}")]
    NonFinite(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("could not place {0} segments")]
    Placement(usize),

    #[error("instance too large for exact solver")]
    TooLarge,
    #[error("budget exceeded")]
    BudgetExceeded { best: Option<Box<ChoiceSolution>> },
    #[error("too many terminals")]
    TooManyTerminals,
    #[error("no Steiner tree")]
    NoSteinerTree,
    #[error("too many variables for exhaustive search")]
    TooManyVariables,

    #[error("repair exceeded 2-factor: repaired cost {repaired} > 2 x {original}")]
    RepairFactorExceeded { repaired: f64, original: f64 },
    #[error("repair broke the tree structure: {0}")]
    RepairStructure(String),

    #[error("clause size must be 2")]
    ClauseSize,
    #[error("cnf parse error at line {0}")]
    CnfParse(usize),
    #[error("epsilon too large")]
    EpsilonTooLarge,
    #[error("undecodable solution")]
    Undecodable,
    #[error("solution does not match instance: {0}")]
    SolutionMismatch(String),
}
