use thiserror::Error;

use crate::rational::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rational arithmetic overflow")]
    Overflow,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("incomplete labelling: pair ({0},{1}) is unlabelled")]
    IncompleteLabelling(usize, usize),
    #[error("graph is disconnected: no path between {0} and {1}")]
    Disconnected(usize, usize),
    #[error("graph is not metric on its labelled pairs: {0}")]
    NotMetric(String),
    #[error("cap {cap} is smaller than the existing label {label}")]
    CapBelowLabel { cap: Rational, label: Rational },
    #[error("search too large: {what} has size {size}, bound is {bound}")]
    SearchTooLarge { what: &'static str, size: u128, bound: u128 },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("not a Katetov map: pair ({0},{1}) violates |f(x)-f(y)| <= d(x,y) <= f(x)+f(y)")]
    NotKatetov(usize, usize),
    #[error("map is realized by existing point {0}")]
    RealizedByExistingPoint(usize),
    #[error("distance {0} is outside the distance set")]
    DistanceOutsideSet(Rational),
    #[error("distance set fails the 4-values condition, witness {0:?}")]
    FourValuesFailure([Rational; 4]),
    #[error("not an ultrametric space: {0}")]
    NotUltrametric(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}
