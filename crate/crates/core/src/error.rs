use thiserror::Error;

use crate::bound::BoundError;
use crate::combinatorics::CombinatoricsError;
use crate::io::ParseError;
use crate::linalg::LinalgError;
use crate::mc::McError;
use crate::qve::QveError;

/// Any error produced by the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Qve(#[from] QveError),
    #[error(transparent)]
    Combinatorics(#[from] CombinatoricsError),
    #[error(transparent)]
    Mc(#[from] McError),
}

impl Error {
    /// True when the failure was caused by bad input rather than by a
    /// numerical routine giving up.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::Parse(_) => true,
            Error::Linalg(e) => !matches!(e, LinalgError::ZeroMatrix),
            Error::Combinatorics(e) => matches!(
                e,
                CombinatoricsError::SizeGuard { .. } | CombinatoricsError::Parse(_)
            ),
            Error::Mc(e) => matches!(e, McError::InvalidConfig(_)),
            Error::Bound(e) => matches!(e, BoundError::InvalidTolerance(_) | BoundError::Domain(_)),
            Error::Qve(e) => matches!(e, QveError::InvalidParameter(_) | QveError::Domain(_)),
        }
    }
}
