//! Automaton text format, random instance generation and the seeded fuzz
//! driver behind the `blindcount` command.

pub mod format;
pub mod fuzz;
pub mod gen;

pub use format::{parse_automaton, serialize_automaton, FormatError, FormatErrorKind};
