use thiserror::Error;

use crate::oracle::FamilyError;
use crate::statevector::StateError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("{what} arity {n} outside supported range {min}..={max}")]
    ArityOutOfRange {
        what: &'static str,
        n: usize,
        min: usize,
        max: usize,
    },
    #[error("trial count must be at least 1")]
    NoTrials,
}
