//! From a one-counter Büchi automaton `A` to a four-blind-counter Büchi
//! automaton for `h(L(A))`, the escape machine for `𝓛`, their union, and the
//! run certificates that tie runs of the two machines together.

mod certificate;
mod escape;
mod simulator;

use alloc::string::String;

pub use certificate::{
    build_canonical_certificate, extract_a_run, parse_certificate, CertBlock, CertificateError,
    ExtractError, RunCertificate,
};
pub use escape::{build_lescape, build_pa, PaMachine};
pub use simulator::{
    build_b, counter_pairs, BMachine, DecPhase, IncPhase, Phase, C1, C2, C3, C4,
};

use crate::coding::CodingError;
use crate::machine::MachineError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstructionError {
    #[error("source machine must have exactly one counter, found {0}")]
    CounterCount(usize),
    #[error("the counter of the source machine must not be blind")]
    BlindCounter,
    #[error("source machine must use Büchi acceptance")]
    NotBuchi,
    #[error("source machine is not well formed: {0}")]
    Invalid(String),
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error(transparent)]
    Machine(#[from] MachineError),
}
