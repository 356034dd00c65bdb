//! Wadge games over three-valued membership oracles, the sum and split
//! combinators, and the two Player 2 strategies that reduce `L(A)` to
//! `L(P_A)` and `L(P_A)` to `∅ + (∅ + L(A))`.

mod game;
mod strategies;

use alloc::boxed::Box;
use alloc::vec::Vec;

pub use game::{play_wadge, GameResult, Move, Outcome, Player2, Transcript};
pub use strategies::{CopyH, Identity, SumLetters, ThreeCase};

use crate::construction::PaMachine;
use crate::machine::{Alphabet, CounterMachine};
use crate::membership::{coded_member, lasso_member, CodedOptions, LassoBounds, RunView, Verdict};
use crate::word::OmegaWord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Truth {
    In,
    Out,
    Unknown,
}

impl Truth {
    pub fn from_bool(b: bool) -> Truth {
        if b {
            Truth::In
        } else {
            Truth::Out
        }
    }

    pub fn negate(self) -> Truth {
        match self {
            Truth::In => Truth::Out,
            Truth::Out => Truth::In,
            Truth::Unknown => Truth::Unknown,
        }
    }
}

impl From<&Verdict> for Truth {
    fn from(v: &Verdict) -> Truth {
        v.as_bool().map_or(Truth::Unknown, Truth::from_bool)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WadgeError {
    #[error("escape letters must be nonempty on both sides")]
    EmptyEscape,
    #[error("letter {0:?} is used twice across the partition")]
    Overlap(char),
    #[error("the alphabets of the parts do not fit together")]
    AlphabetMismatch,
    #[error("the second part of a split must be nonempty")]
    EmptySplit,
    #[error("Player 1 wrote {0:?}, outside its alphabet")]
    Player1Letter(char),
    #[error("Player 2 wrote {0:?}, outside its alphabet")]
    Player2Letter(char),
    #[error("Player 2's limit word does not extend what it wrote")]
    InconsistentLimit,
}

/// A language over `alphabet`, queried on finitely presented ω-words.
pub trait Oracle: Send + Sync {
    fn alphabet(&self) -> &Alphabet;
    fn query(&self, w: &OmegaWord) -> Truth;
}

fn over(alphabet: &Alphabet, w: &OmegaWord) -> bool {
    w.find(|c| !alphabet.contains(c)).is_none()
}

#[derive(Debug, Clone)]
pub struct EmptyOracle(pub Alphabet);

impl Oracle for EmptyOracle {
    fn alphabet(&self) -> &Alphabet {
        &self.0
    }

    fn query(&self, _: &OmegaWord) -> Truth {
        Truth::Out
    }
}

#[derive(Debug, Clone)]
pub struct FullOracle(pub Alphabet);

impl Oracle for FullOracle {
    fn alphabet(&self) -> &Alphabet {
        &self.0
    }

    fn query(&self, w: &OmegaWord) -> Truth {
        Truth::from_bool(over(&self.0, w))
    }
}

/// `L(m)` on lasso words, by [`lasso_member`]. Coded words are `Unknown`.
#[derive(Debug, Clone)]
pub struct MachineOracle {
    pub machine: CounterMachine,
    pub bounds: LassoBounds,
}

impl Oracle for MachineOracle {
    fn alphabet(&self) -> &Alphabet {
        self.machine.alphabet()
    }

    fn query(&self, w: &OmegaWord) -> Truth {
        match w {
            OmegaWord::Lasso(x) => lasso_member(&self.machine, x, &self.bounds)
                .map_or(Truth::Unknown, |v| Truth::from(&v)),
            OmegaWord::Coded { .. } => Truth::Unknown,
        }
    }
}

/// `L(P_A)`. Lasso words go through [`lasso_member`]; a coded word `h(x)`
/// is run block by block through `P_A`.
///
/// `h(x)` is in the language when a surviving run of `ℬ` reads off an
/// `A`-run with a repeatable accepting segment. It is out when no run of `ℬ`
/// survives, or when every surviving run reads off a valid `A`-run and `x` is
/// rejected by `A`. Words in `h(Σ^ω)` never lie in `𝓛`, so runs of the
/// escape part are not consulted.
#[derive(Debug, Clone)]
pub struct PaOracle {
    pub pa: PaMachine,
    pub bounds: LassoBounds,
    pub blocks: usize,
    pub options: CodedOptions,
}

impl PaOracle {
    pub fn new(pa: PaMachine) -> Self {
        PaOracle {
            pa,
            bounds: LassoBounds::default(),
            blocks: 12,
            options: CodedOptions::default(),
        }
    }
}

const PATH_LIMIT: usize = 10_000;

impl Oracle for PaOracle {
    fn alphabet(&self) -> &Alphabet {
        self.pa.machine.alphabet()
    }

    fn query(&self, w: &OmegaWord) -> Truth {
        let x = match w {
            OmegaWord::Lasso(y) => {
                return lasso_member(&self.pa.machine, y, &self.bounds)
                    .map_or(Truth::Unknown, |v| Truth::from(&v))
            }
            OmegaWord::Coded { x, skip: 0 } => x,
            OmegaWord::Coded { .. } => return Truth::Unknown,
        };
        let Ok(report) = coded_member(&self.pa.machine, x, self.blocks, &self.options) else {
            return Truth::Unknown;
        };
        if report.truncated {
            return Truth::Unknown;
        }
        let view = RunView::new(&self.pa.b, &report, |s| self.pa.b_state(s));
        if view.find_f_cycle(x).is_some() {
            return Truth::In;
        }
        if view.survivors() == 0 {
            return Truth::Out;
        }
        let (paths, complete) = view.survivor_paths(PATH_LIMIT);
        let all_extract = complete
            && paths.iter().all(|p| {
                crate::construction::extract_a_run(&self.pa.b, &report.payloads, p).is_ok()
            });
        let a = self.pa.b.source();
        match lasso_member(a, x, &self.bounds) {
            Ok(Verdict::Reject) if all_extract => Truth::Out,
            _ => Truth::Unknown,
        }
    }
}

/// `L′ + L` over `Y = X ∪ X₊ ∪ X₋`: a word that never leaves `X` is judged
/// by `L`; after the first letter of `X₊` the rest is judged by `L′`, after
/// the first letter of `X₋` by the complement of `L′`.
pub struct SumOracle {
    inner: Box<dyn Oracle>,
    outer: Box<dyn Oracle>,
    plus: Vec<char>,
    minus: Vec<char>,
    alphabet: Alphabet,
}

impl SumOracle {
    pub fn new(
        inner: Box<dyn Oracle>,
        outer: Box<dyn Oracle>,
        plus: &[char],
        minus: &[char],
    ) -> Result<SumOracle, WadgeError> {
        if plus.is_empty() || minus.is_empty() {
            return Err(WadgeError::EmptyEscape);
        }
        let base = outer.alphabet();
        let mut seen: Vec<char> = Vec::new();
        for &c in plus.iter().chain(minus) {
            if base.contains(c) || seen.contains(&c) {
                return Err(WadgeError::Overlap(c));
            }
            seen.push(c);
        }
        let alphabet = base.extended(seen);
        if *inner.alphabet() != alphabet {
            return Err(WadgeError::AlphabetMismatch);
        }
        Ok(SumOracle {
            inner,
            outer,
            plus: plus.to_vec(),
            minus: minus.to_vec(),
            alphabet,
        })
    }
}

impl Oracle for SumOracle {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn query(&self, w: &OmegaWord) -> Truth {
        let base = self.outer.alphabet();
        let Some(p) = w.find(|c| !base.contains(c)) else {
            return self.outer.query(w);
        };
        let c = w.letter_at(p);
        let tail = w.suffix(p + 1);
        if self.plus.contains(&c) {
            self.inner.query(&tail)
        } else if self.minus.contains(&c) {
            self.inner.query(&tail).negate()
        } else {
            Truth::Out
        }
    }
}

/// `∅ + (∅ + L)`, the target of [`ThreeCase`].
pub fn double_empty_sum(l: Box<dyn Oracle>, letters: SumLetters) -> Result<SumOracle, WadgeError> {
    let y1 = l.alphabet().extended([letters.inner_plus, letters.inner_minus]);
    let y2 = y1.extended([letters.outer_plus, letters.outer_minus]);
    let inner = SumOracle::new(
        Box::new(EmptyOracle(y1)),
        l,
        &[letters.inner_plus],
        &[letters.inner_minus],
    )?;
    SumOracle::new(
        Box::new(EmptyOracle(y2)),
        Box::new(inner),
        &[letters.outer_plus],
        &[letters.outer_minus],
    )
}

/// `Σ₁·L₁ ∪ Σ₂·L₂`: the first letter picks the language its tail is tested in.
pub struct SplitOracle {
    sigma1: Alphabet,
    l1: Box<dyn Oracle>,
    l2: Box<dyn Oracle>,
    alphabet: Alphabet,
}

impl SplitOracle {
    pub fn new(
        sigma1: &[char],
        sigma2: &[char],
        l1: Box<dyn Oracle>,
        l2: Box<dyn Oracle>,
    ) -> Result<SplitOracle, WadgeError> {
        if sigma2.is_empty() {
            return Err(WadgeError::EmptySplit);
        }
        if let Some(&c) = sigma1.iter().find(|c| sigma2.contains(c)) {
            return Err(WadgeError::Overlap(c));
        }
        let s1 = Alphabet::new(sigma1.iter().copied()).map_err(|_| WadgeError::EmptySplit)?;
        let alphabet = s1.extended(sigma2.iter().copied());
        if *l1.alphabet() != alphabet || *l2.alphabet() != alphabet {
            return Err(WadgeError::AlphabetMismatch);
        }
        Ok(SplitOracle {
            sigma1: s1,
            l1,
            l2,
            alphabet,
        })
    }
}

impl Oracle for SplitOracle {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn query(&self, w: &OmegaWord) -> Truth {
        let first = w.letter_at(0);
        let tail = w.suffix(1);
        if self.sigma1.contains(first) {
            self.l1.query(&tail)
        } else if self.alphabet.contains(first) {
            self.l2.query(&tail)
        } else {
            Truth::Out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::MachineBuilder;
    use crate::word::LassoWord;

    fn ab() -> Alphabet {
        Alphabet::new(['a', 'b']).unwrap()
    }

    fn lasso(u: &str, v: &str) -> OmegaWord {
        LassoWord::parse(u, v).unwrap().into()
    }

    fn infinitely_many_a() -> MachineOracle {
        let mut b = MachineBuilder::new(ab(), 0);
        let p = b.state("p");
        let q = b.state("q");
        b.t(p, 'a', "", "", q).t(p, 'b', "", "", p).t(q, 'a', "", "", q).t(q, 'b', "", "", p);
        b.accept(q);
        MachineOracle {
            machine: b.build().unwrap(),
            bounds: LassoBounds::default(),
        }
    }

    fn empty_plus_l() -> SumOracle {
        let y = ab().extended(['+', '-']);
        SumOracle::new(
            Box::new(EmptyOracle(y)),
            Box::new(infinitely_many_a()),
            &['+'],
            &['-'],
        )
        .unwrap()
    }

    #[test]
    fn sum_with_empty_inner() {
        let s = empty_plus_l();
        assert_eq!(s.query(&lasso("ab-", "b")), Truth::In);
        assert_eq!(s.query(&lasso("a+", "a")), Truth::Out);
        assert_eq!(s.query(&lasso("b", "ab")), Truth::In);
        assert_eq!(s.query(&lasso("a", "b")), Truth::Out);
    }

    #[test]
    fn sum_rejects_bad_partitions() {
        let y = ab().extended(['+', '-']);
        let mk = |plus: &[char], minus: &[char]| {
            SumOracle::new(
                Box::new(EmptyOracle(y.clone())),
                Box::new(infinitely_many_a()),
                plus,
                minus,
            )
            .err()
        };
        assert_eq!(mk(&['+'], &[]), Some(WadgeError::EmptyEscape));
        assert_eq!(mk(&['a'], &['-']), Some(WadgeError::Overlap('a')));
        assert_eq!(mk(&['+'], &['#']), Some(WadgeError::AlphabetMismatch));
    }

    #[test]
    fn split_selects_by_first_letter() {
        let s = SplitOracle::new(
            &['a'],
            &['b'],
            Box::new(FullOracle(ab())),
            Box::new(EmptyOracle(ab())),
        )
        .unwrap();
        assert_eq!(s.query(&lasso("a", "b")), Truth::In);
        assert_eq!(s.query(&lasso("b", "a")), Truth::Out);
        assert_eq!(
            SplitOracle::new(&['a', 'b'], &[], Box::new(FullOracle(ab())), Box::new(FullOracle(ab()))).err(),
            Some(WadgeError::EmptySplit)
        );
    }
}
