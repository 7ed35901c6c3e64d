use std::io;

use thiserror::Error;

/// Coarse error families, used for process exit codes and the C ABI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Numerical,
    Io,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Config => 1,
            ErrorClass::Numerical => 2,
            ErrorClass::Io => 3,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("chain needs at least 2 sites, got {0}")]
    NonPositiveSize(usize),
    #[error("periodic chain with V != 0 needs L divisible by 3, got L = {0}")]
    PbcPeriodMismatch(usize),
    #[error("parameter `{0}` is not finite")]
    NonFinite(&'static str),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("operator is not of the form internal (x) site-permutation: {0}")]
    MalformedOperator(String),
    #[error("eigensolver did not converge")]
    ConvergenceFailure,
    #[error("eigenvalues {first} and {second} are {gap:e} apart; left/right pairing is ambiguous")]
    DegenerateAmbiguity { first: usize, second: usize, gap: f64 },
    #[error("state vector has zero norm")]
    ZeroVector,
    #[error("edge window {ell} is outside 1..={max}")]
    InvalidWindow { ell: usize, max: usize },
    #[error("threshold `{name}` = {value} is out of range")]
    InvalidThreshold { name: &'static str, value: f64 },
    #[error("no states to analyse")]
    NoStates,
    #[error("operation requires {0} boundary conditions")]
    WrongBoundary(&'static str),
    #[error("reference energy lies on the curve (distance {0:e})")]
    RefOnCurve(f64),
    #[error("beta must be nonzero")]
    ZeroBeta,
    #[error("non-Bloch analysis is only defined for V = 0 (got V = {0})")]
    UnsupportedPotential(f64),
    #[error("leading coefficient delta^2 - t^2 + gamma^2/4 vanishes; use the reduced solver")]
    DegenerateLeadingCoeff,
    #[error("bands touch along the loop (min gap {0:e})")]
    BandTouching(f64),
    #[error("GBZ is not the unit circle (max deviation {0:e})")]
    GbzNotCircle(f64),
    #[error("denominator `{denominator}` vanishes for root {root}")]
    SingularDenominator { root: &'static str, denominator: &'static str },
    #[error("no continuum ordering holds for this energy")]
    WrongCase,
    #[error("selection `{0}` is out of range")]
    SelectionOutOfRange(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::NonPositiveSize(_)
            | Error::PbcPeriodMismatch(_)
            | Error::NonFinite(_)
            | Error::InvalidWindow { .. }
            | Error::InvalidThreshold { .. }
            | Error::WrongBoundary(_)
            | Error::UnsupportedPotential(_)
            | Error::SelectionOutOfRange(_)
            | Error::Config(_)
            | Error::Json(_) => ErrorClass::Config,
            Error::Io(_) | Error::Csv(_) => ErrorClass::Io,
            _ => ErrorClass::Numerical,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
