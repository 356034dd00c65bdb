//! Membership of lasso words and coded words, certificate checking, and
//! brute-force oracles used as ground truth in tests.

mod brute;
mod certificate;
mod coded;
mod graph;
mod lasso;

pub use brute::{brute_force_lasso, brute_force_oracle, validate_run_prefix, BRUTE_FORCE_LIMIT};
pub use certificate::check_certificate;
pub use coded::{
    coded_member, coded_prefix_member, BoundaryNode, CodedOptions, CodedReport, ExtractedCycle,
    RunView,
};
pub use lasso::{check_lasso_witness, lasso_member, LassoBounds, LassoWitness};

use crate::machine::MachineError;
use crate::word::WordError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MembershipError {
    #[error("membership needs a Büchi acceptance condition")]
    NotBuchi,
    #[error("word of length {len} exceeds the limit {limit}")]
    WordTooLong { len: usize, limit: usize },
    #[error("at least one block is needed")]
    NoBlocks,
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    Word(#[from] WordError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnknownReason {
    /// The node budget ran out.
    Budget,
    /// Runs exceeded the counter bound and might still accept.
    CounterBound,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accept(LassoWitness),
    Reject,
    Unknown(UnknownReason),
}

impl Verdict {
    pub fn is_decisive(&self) -> bool {
        !matches!(self, Verdict::Unknown(_))
    }

    /// `Some(true)` for accept, `Some(false)` for reject.
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Verdict::Accept(_) => Some(true),
            Verdict::Reject => Some(false),
            Verdict::Unknown(_) => None,
        }
    }
}
