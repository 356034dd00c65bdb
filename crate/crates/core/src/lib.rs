//! Real-time counter Büchi automata with blind counters, the block coding
//! `h(x) = A0x(1)B00x(2)A000x(3)…` of ω-words, and the machinery that turns a
//! one-counter Büchi automaton into a four-blind-counter (Petri net) automaton
//! recognizing `h(L(A)) ∪ 𝓛`.
//!
//! The crate is `no_std` and only needs `alloc`. It is organized as:
//!
//! - [`machine`]: counter machines, their one-step semantics, bounded run
//!   enumeration, union and shape products.
//! - [`shape`]: deterministic Büchi word-pattern automata used as shapes.
//! - [`word`]: lasso words `u·v^ω` and coded ω-words.
//! - [`coding`]: the coding `h`, its decoder, the shape language, the escape
//!   languages and the prefix metric.
//! - [`construction`]: the four-blind-counter simulator, the escape machine,
//!   their union and canonical run certificates.
//! - [`membership`]: lasso membership, block-synchronized coded membership,
//!   certificate checking and brute-force oracles.
//! - [`wadge`]: Wadge games over membership oracles, sum and split oracles and
//!   the two reduction strategies.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod coding;
pub mod construction;
pub mod machine;
pub mod membership;
pub mod shape;
pub mod wadge;
pub mod word;

pub(crate) type FxMap<K, V> = hashbrown::HashMap<K, V, rustc_hash::FxBuildHasher>;
pub(crate) type FxSet<K> = hashbrown::HashSet<K, rustc_hash::FxBuildHasher>;

pub use machine::{
    Acceptance, Alphabet, Configuration, CounterMachine, MachineBuilder, MachineError, StateId,
    Test, Transition,
};
pub use word::{LassoWord, OmegaWord};
