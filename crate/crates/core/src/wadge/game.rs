use alloc::vec::Vec;
use core::fmt;

use super::{Oracle, Truth, WadgeError};
use crate::word::OmegaWord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    Letter(char),
    Skip,
}

pub trait Player2 {
    /// Move after Player 1 has written `history` (never empty).
    fn respond(&mut self, history: &[char]) -> Move;

    /// The ω-word this strategy writes in the limit against `p1`, when it
    /// can be given in closed form.
    fn limit(&self, p1: &OmegaWord) -> Option<OmegaWord>;
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    pub rounds: Vec<(char, Move)>,
}

impl Transcript {
    /// Letters Player 2 has written so far.
    pub fn p2_letters(&self) -> Vec<char> {
        self.rounds
            .iter()
            .filter_map(|(_, m)| match m {
                Move::Letter(c) => Some(*c),
                Move::Skip => None,
            })
            .collect()
    }
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, m) in &self.rounds {
            writeln!(f, "P1 {a}")?;
            match m {
                Move::Letter(b) => writeln!(f, "P2 {b}")?,
                Move::Skip => writeln!(f, "P2 SKIP")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Player2Wins,
    Player1Wins,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameResult {
    pub transcript: Transcript,
    pub p1_word: OmegaWord,
    pub p2_word: Option<OmegaWord>,
    pub p1_truth: Truth,
    pub p2_truth: Truth,
    pub outcome: Outcome,
}

/// Plays `horizon` rounds with Player 1 writing `p1` letter by letter, then
/// judges both limit words: Player 2 wins when `p1 ∈ L₁ ⟺ p2 ∈ L₂`.
pub fn play_wadge(
    l1: &dyn Oracle,
    l2: &dyn Oracle,
    p2: &mut dyn Player2,
    p1: &OmegaWord,
    horizon: usize,
) -> Result<GameResult, WadgeError> {
    let mut history = Vec::with_capacity(horizon);
    let mut transcript = Transcript::default();
    for i in 0..horizon {
        let a = p1.letter_at(i);
        if !l1.alphabet().contains(a) {
            return Err(WadgeError::Player1Letter(a));
        }
        history.push(a);
        let m = p2.respond(&history);
        if let Move::Letter(b) = m {
            if !l2.alphabet().contains(b) {
                return Err(WadgeError::Player2Letter(b));
            }
        }
        transcript.rounds.push((a, m));
    }

    let p2_word = p2.limit(p1);
    if let Some(w) = &p2_word {
        let written = transcript.p2_letters();
        if w.prefix(written.len()) != written {
            return Err(WadgeError::InconsistentLimit);
        }
    }
    let p1_truth = l1.query(p1);
    let p2_truth = p2_word.as_ref().map_or(Truth::Unknown, |w| l2.query(w));
    let outcome = match (p1_truth, p2_truth) {
        (Truth::Unknown, _) | (_, Truth::Unknown) => Outcome::Undecided,
        (a, b) if a == b => Outcome::Player2Wins,
        _ => Outcome::Player1Wins,
    };
    Ok(GameResult {
        transcript,
        p1_word: p1.clone(),
        p2_word,
        p1_truth,
        p2_truth,
        outcome,
    })
}
