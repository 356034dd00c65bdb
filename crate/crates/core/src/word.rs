//! Finitely presented ω-words.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::machine::Alphabet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordError {
    #[error("the cycle of a lasso word must be nonempty")]
    EmptyCycle,
    #[error("letter {0:?} is not in the alphabet")]
    UnknownLetter(char),
}

/// The ultimately periodic word `spoke · cycle^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LassoWord {
    spoke: Vec<char>,
    cycle: Vec<char>,
}

impl LassoWord {
    pub fn new(spoke: Vec<char>, cycle: Vec<char>) -> Result<Self, WordError> {
        if cycle.is_empty() {
            return Err(WordError::EmptyCycle);
        }
        Ok(LassoWord { spoke, cycle })
    }

    pub fn parse(spoke: &str, cycle: &str) -> Result<Self, WordError> {
        LassoWord::new(spoke.chars().collect(), cycle.chars().collect())
    }

    pub fn spoke(&self) -> &[char] {
        &self.spoke
    }

    pub fn cycle(&self) -> &[char] {
        &self.cycle
    }

    /// Letter at 0-based position `i`.
    pub fn letter_at(&self, i: usize) -> char {
        if i < self.spoke.len() {
            self.spoke[i]
        } else {
            self.cycle[(i - self.spoke.len()) % self.cycle.len()]
        }
    }

    pub fn prefix(&self, n: usize) -> Vec<char> {
        (0..n).map(|i| self.letter_at(i)).collect()
    }

    /// The word with its first `p` letters removed.
    pub fn suffix(&self, p: usize) -> LassoWord {
        if p <= self.spoke.len() {
            return LassoWord {
                spoke: self.spoke[p..].to_vec(),
                cycle: self.cycle.clone(),
            };
        }
        let r = (p - self.spoke.len()) % self.cycle.len();
        let mut cycle = self.cycle[r..].to_vec();
        cycle.extend_from_slice(&self.cycle[..r]);
        LassoWord {
            spoke: Vec::new(),
            cycle,
        }
    }

    /// Distinct letters occurring in the word.
    pub fn letters(&self) -> BTreeSet<char> {
        self.spoke.iter().chain(&self.cycle).copied().collect()
    }

    pub fn check_alphabet(&self, alphabet: &Alphabet) -> Result<(), WordError> {
        match self.letters().into_iter().find(|&a| !alphabet.contains(a)) {
            Some(a) => Err(WordError::UnknownLetter(a)),
            None => Ok(()),
        }
    }

    /// Length of a prefix after which two lassos agree everywhere if they
    /// agree on it.
    pub fn agreement_horizon(&self, other: &LassoWord) -> usize {
        self.spoke.len().max(other.spoke.len()) + lcm(self.cycle.len(), other.cycle.len())
    }

    /// Equality as ω-words, regardless of presentation.
    pub fn same_word(&self, other: &LassoWord) -> bool {
        (0..self.agreement_horizon(other)).all(|i| self.letter_at(i) == other.letter_at(i))
    }
}

impl fmt::Display for LassoWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let u: String = self.spoke.iter().collect();
        let v: String = self.cycle.iter().collect();
        write!(f, "{u}({v})^w")
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// An ω-word that is either ultimately periodic or a suffix of a coded word
/// `h(x)` for a lasso `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OmegaWord {
    Lasso(LassoWord),
    /// `h(x)` with its first `skip` letters removed.
    Coded { x: LassoWord, skip: usize },
}

impl OmegaWord {
    pub fn coded(x: LassoWord) -> Self {
        OmegaWord::Coded { x, skip: 0 }
    }

    pub fn letter_at(&self, i: usize) -> char {
        match self {
            OmegaWord::Lasso(w) => w.letter_at(i),
            OmegaWord::Coded { x, skip } => crate::coding::coded_letter_at(x, skip + i),
        }
    }

    pub fn prefix(&self, n: usize) -> Vec<char> {
        (0..n).map(|i| self.letter_at(i)).collect()
    }

    pub fn suffix(&self, p: usize) -> OmegaWord {
        match self {
            OmegaWord::Lasso(w) => OmegaWord::Lasso(w.suffix(p)),
            OmegaWord::Coded { x, skip } => OmegaWord::Coded {
                x: x.clone(),
                skip: skip + p,
            },
        }
    }

    /// A prefix length that already contains every letter that occurs in the
    /// word, and the first occurrence of each.
    pub fn scan_horizon(&self) -> usize {
        match self {
            OmegaWord::Lasso(w) => w.spoke().len() + w.cycle().len(),
            OmegaWord::Coded { x, skip } => {
                let (block, _) = crate::coding::coded_position(*skip);
                let last = block + x.spoke().len() + x.cycle().len() + 1;
                crate::coding::coded_block_start(last + 1) - skip
            }
        }
    }

    /// First position whose letter satisfies `pred`.
    pub fn find(&self, mut pred: impl FnMut(char) -> bool) -> Option<usize> {
        (0..self.scan_horizon()).find(|&i| pred(self.letter_at(i)))
    }

    pub fn as_lasso(&self) -> Option<&LassoWord> {
        match self {
            OmegaWord::Lasso(w) => Some(w),
            OmegaWord::Coded { .. } => None,
        }
    }
}

impl From<LassoWord> for OmegaWord {
    fn from(w: LassoWord) -> Self {
        OmegaWord::Lasso(w)
    }
}

impl fmt::Display for OmegaWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaWord::Lasso(w) => write!(f, "{w}"),
            OmegaWord::Coded { x, skip: 0 } => write!(f, "h({x})"),
            OmegaWord::Coded { x, skip } => write!(f, "h({x})[{skip}..]"),
        }
    }
}
