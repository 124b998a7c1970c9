//! Numeric oracles for checking closed forms: exact enumeration of the
//! state distribution and seeded Monte Carlo simulation.

mod check;
mod enumerate;
mod eval;
mod simulate;

pub use check::{check, exact_monomial_mismatches, CheckConfig, CheckRow, MCReport, Method};
pub use enumerate::{enumerate_exact, enumerate_exact_capped, StateDist, DEFAULT_STATE_CAP};
pub use simulate::{simulate, Samples};

use crate::algebra::AlgebraError;
use crate::distributions::DistError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ValidationError {
    #[error("program draws from a continuous distribution; exact enumeration needs finite support")]
    InfiniteSupport,
    #[error("state space grew to {0} states, above the cap")]
    StateExplosion(usize),
    #[error("parameter `{0}` has no binding")]
    UnboundParameter(String),
    #[error("invalid support: {0}")]
    InvalidSupport(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl From<DistError> for ValidationError {
    fn from(e: DistError) -> Self {
        match e {
            DistError::InvalidSupport(s) => ValidationError::InvalidSupport(s),
            DistError::Algebra(AlgebraError::UnboundParameter(p)) => {
                ValidationError::UnboundParameter(p)
            }
            DistError::Algebra(a) => ValidationError::Algebra(a),
        }
    }
}
