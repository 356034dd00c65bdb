use alloc::collections::VecDeque;
use alloc::vec::Vec;

use super::{Move, Player2};
use crate::coding::{coded_block_start, escape_witnessed, is_code_prefix, Separator, ZERO};
use crate::machine::Alphabet;
use crate::word::{LassoWord, OmegaWord};

/// Copies Player 1 verbatim.
#[derive(Debug, Clone, Default)]
pub struct Identity;

impl Player2 for Identity {
    fn respond(&mut self, history: &[char]) -> Move {
        Move::Letter(history[history.len() - 1])
    }

    fn limit(&self, p1: &OmegaWord) -> Option<OmegaWord> {
        Some(p1.clone())
    }
}

/// Writes `h(x)` while Player 1 writes `x`: each new letter `x(n)` queues
/// the block `S 0^n x(n)` and one queued letter goes out per round.
#[derive(Debug, Clone, Default)]
pub struct CopyH {
    written: Vec<char>,
    queue: VecDeque<char>,
}

impl CopyH {
    pub fn new() -> Self {
        Self::default()
    }

    /// Letters written so far followed by the ones still queued.
    pub fn committed(&self) -> Vec<char> {
        self.written.iter().chain(&self.queue).copied().collect()
    }
}

impl Player2 for CopyH {
    fn respond(&mut self, history: &[char]) -> Move {
        let n = history.len();
        self.queue.push_back(Separator::for_block(n).letter());
        self.queue.extend(core::iter::repeat_n(ZERO, n));
        self.queue.push_back(history[n - 1]);
        match self.queue.pop_front() {
            Some(c) => {
                self.written.push(c);
                Move::Letter(c)
            }
            None => Move::Skip,
        }
    }

    fn limit(&self, p1: &OmegaWord) -> Option<OmegaWord> {
        p1.as_lasso().map(|x| OmegaWord::coded(x.clone()))
    }
}

/// Escape letters of the two nested sums in `∅ + (∅ + L)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SumLetters {
    pub inner_plus: char,
    pub inner_minus: char,
    pub outer_plus: char,
    pub outer_minus: char,
}

impl Default for SumLetters {
    fn default() -> Self {
        SumLetters {
            inner_plus: '+',
            inner_minus: '-',
            outer_plus: '#',
            outer_minus: '~',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Copy,
    LeftCode,
    Escaped,
}

/// Reduces `L(P_A)` to `∅ + (∅ + L(A))`. While Player 1 stays on a prefix
/// of some `h(x)` the decoded payloads are copied. Once the prefix can no
/// longer be extended into `h(Σ^ω)` the inner escape letter is written, and
/// once it lies in `𝓛` the outer complement letter is written. Afterwards
/// only the filler letter is played.
#[derive(Debug, Clone)]
pub struct ThreeCase {
    sigma: Alphabet,
    letters: SumLetters,
    mode: Mode,
}

impl ThreeCase {
    pub fn new(sigma: Alphabet, letters: SumLetters) -> Self {
        ThreeCase {
            sigma,
            letters,
            mode: Mode::Copy,
        }
    }

    fn filler(&self) -> char {
        self.sigma.letters()[0]
    }

    fn fresh(&self) -> Self {
        ThreeCase::new(self.sigma.clone(), self.letters)
    }
}

impl Player2 for ThreeCase {
    fn respond(&mut self, history: &[char]) -> Move {
        if self.mode == Mode::Escaped {
            return Move::Letter(self.filler());
        }
        if escape_witnessed(history) {
            self.mode = Mode::Escaped;
            return Move::Letter(self.letters.outer_minus);
        }
        if self.mode == Mode::LeftCode {
            return Move::Letter(self.filler());
        }
        if !is_code_prefix(history, &self.sigma) {
            self.mode = Mode::LeftCode;
            return Move::Letter(self.letters.inner_plus);
        }
        let a = history[history.len() - 1];
        if self.sigma.contains(a) {
            Move::Letter(a)
        } else {
            Move::Skip
        }
    }

    fn limit(&self, p1: &OmegaWord) -> Option<OmegaWord> {
        let y = match p1 {
            OmegaWord::Coded { x, skip: 0 } => return Some(OmegaWord::Lasso(x.clone())),
            OmegaWord::Coded { .. } => return None,
            OmegaWord::Lasso(y) => y,
        };
        let bound = coded_block_start(y.spoke().len() + y.cycle().len() + 3);
        let w = y.prefix(bound);
        let left = (1..=bound).find(|&t| !is_code_prefix(&w[..t], &self.sigma))?;
        let escaped = crate::coding::escape_witness_length(y);
        let rounds = escaped.map_or(left, |t| t.max(1));
        let mut sim = self.fresh();
        let mut out = Vec::new();
        let all = y.prefix(rounds);
        for t in 1..=rounds {
            if let Move::Letter(c) = sim.respond(&all[..t]) {
                out.push(c);
            }
        }
        let word = LassoWord::new(out, alloc::vec![self.filler()]).ok()?;
        Some(OmegaWord::Lasso(word))
    }
}
