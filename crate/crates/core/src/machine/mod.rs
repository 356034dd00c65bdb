//! Real-time k-counter machines with Büchi or Muller acceptance.
//!
//! A transition reads exactly one letter, tests each counter against a
//! [`Test`] and adds an effect in `{-1, 0, +1}` to each counter. Counters never
//! go negative: a step whose result would be negative is simply not enabled,
//! which is how a decrement of an empty blind counter behaves.

mod ops;
mod runs;

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use ops::{product_with_shape, union_machines, Product, Union};
pub use runs::{
    buchi_accepts_lasso_run, muller_accepts_lasso_run, run_prefixes, LassoRun, RunPrefix,
    RunPrefixes, DEFAULT_NODE_BUDGET,
};

/// Index of a state in [`CounterMachine::states`].
pub type StateId = usize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MachineError {
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("letter {0:?} occurs twice in the alphabet")]
    DuplicateLetter(char),
    #[error("letter {0:?} is not in the alphabet")]
    UnknownLetter(char),
    #[error("alphabets differ")]
    AlphabetMismatch,
    #[error("transition {transition} refers to undeclared state {state}")]
    StateOutOfRange { transition: usize, state: StateId },
    #[error("transition {transition} has {found} counter entries, machine has {expected}")]
    ArityMismatch {
        transition: usize,
        expected: usize,
        found: usize,
    },
    #[error("blindness list has {found} entries, machine has {expected} counters")]
    BlindArity { expected: usize, found: usize },
    #[error("initial state {0} is not declared")]
    InitialOutOfRange(StateId),
    #[error("accepting state {0} is not declared")]
    AcceptingOutOfRange(StateId),
    #[error("configuration has {found} counters, machine has {expected}")]
    ConfigurationArity { expected: usize, found: usize },
    #[error("operation needs a Büchi acceptance condition")]
    NotBuchi,
    #[error("operation needs a Muller acceptance condition")]
    NotMuller,
    #[error("lasso run has an empty cycle")]
    EmptyCycle,
}

/// A finite, ordered, duplicate-free set of letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet(Vec<char>);

impl Alphabet {
    pub fn new<I: IntoIterator<Item = char>>(letters: I) -> Result<Self, MachineError> {
        let mut v: Vec<char> = letters.into_iter().collect();
        if v.is_empty() {
            return Err(MachineError::EmptyAlphabet);
        }
        v.sort_unstable();
        for w in v.windows(2) {
            if w[0] == w[1] {
                return Err(MachineError::DuplicateLetter(w[0]));
            }
        }
        Ok(Alphabet(v))
    }

    pub fn letters(&self) -> &[char] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = char> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, a: char) -> bool {
        self.0.binary_search(&a).is_ok()
    }

    pub fn is_disjoint(&self, other: &Alphabet) -> bool {
        self.iter().all(|a| !other.contains(a))
    }

    /// Union with extra letters; duplicates are merged.
    pub fn extended<I: IntoIterator<Item = char>>(&self, extra: I) -> Alphabet {
        let mut v = self.0.clone();
        v.extend(extra);
        v.sort_unstable();
        v.dedup();
        Alphabet(v)
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// Per-counter test of a transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Test {
    Zero,
    Positive,
    /// Matches any value. The only test allowed on a blind counter.
    Any,
}

impl Test {
    pub fn matches(self, value: u32) -> bool {
        match self {
            Test::Zero => value == 0,
            Test::Positive => value > 0,
            Test::Any => true,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Test::Zero => 'Z',
            Test::Positive => 'P',
            Test::Any => '*',
        }
    }

    pub fn from_symbol(c: char) -> Option<Test> {
        match c {
            'Z' => Some(Test::Zero),
            'P' => Some(Test::Positive),
            '*' => Some(Test::Any),
            _ => None,
        }
    }
}

/// Parses a guard string over `{Z, P, *}`.
pub fn parse_guard(s: &str) -> Option<Vec<Test>> {
    s.chars().map(Test::from_symbol).collect()
}

/// Parses an effect string over `{+, -, 0}`.
pub fn parse_effect(s: &str) -> Option<Vec<i8>> {
    s.chars()
        .map(|c| match c {
            '+' => Some(1),
            '-' => Some(-1),
            '0' => Some(0),
            _ => None,
        })
        .collect()
}

pub fn effect_symbol(delta: i8) -> char {
    match delta {
        1 => '+',
        -1 => '-',
        0 => '0',
        _ => '?',
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transition {
    pub source: StateId,
    pub letter: char,
    pub guard: Vec<Test>,
    pub effect: Vec<i8>,
    pub target: StateId,
}

impl Transition {
    pub fn new(
        source: StateId,
        letter: char,
        guard: impl Into<Vec<Test>>,
        effect: impl Into<Vec<i8>>,
        target: StateId,
    ) -> Self {
        Transition {
            source,
            letter,
            guard: guard.into(),
            effect: effect.into(),
            target,
        }
    }

    /// Counter values after taking this transition from `counters`, or `None`
    /// when a test fails or a counter would become negative.
    pub fn fire(&self, counters: &[u32]) -> Option<Vec<u32>> {
        let mut out = Vec::with_capacity(counters.len());
        for ((&c, &t), &d) in counters.iter().zip(&self.guard).zip(&self.effect) {
            if !t.matches(c) {
                return None;
            }
            let next = i64::from(c) + i64::from(d);
            if next < 0 {
                return None;
            }
            out.push(next as u32);
        }
        Some(out)
    }

    pub fn is_enabled(&self, counters: &[u32]) -> bool {
        counters
            .iter()
            .zip(&self.guard)
            .zip(&self.effect)
            .all(|((&c, &t), &d)| t.matches(c) && i64::from(c) + i64::from(d) >= 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Acceptance {
    /// Accept iff some state of the set recurs infinitely often.
    Buchi(BTreeSet<StateId>),
    /// Accept iff the set of recurring states is one of the listed sets.
    Muller(Vec<BTreeSet<StateId>>),
}

impl Acceptance {
    /// Every state mentioned by the condition.
    pub fn mentioned(&self) -> BTreeSet<StateId> {
        match self {
            Acceptance::Buchi(f) => f.clone(),
            Acceptance::Muller(fs) => fs.iter().flatten().copied().collect(),
        }
    }
}

/// A control state together with its counter values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub state: StateId,
    pub counters: Vec<u32>,
}

impl Configuration {
    pub fn new(state: StateId, counters: Vec<u32>) -> Self {
        Configuration { state, counters }
    }
}

/// Why a machine fails validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    LetterNotInAlphabet(char),
    /// A zero test followed by a decrement on the same counter.
    ZeroTestDecrement { counter: usize },
    /// A zero or positivity test on a blind counter.
    BlindCounterTested { counter: usize },
    EffectOutOfRange { counter: usize, delta: i8 },
    DuplicateStateName(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// Offending transition, if the problem is local to one.
    pub transition: Option<usize>,
    pub rule: Rule,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(t) = self.transition {
            write!(f, "transition {t}: ")?;
        }
        match &self.rule {
            Rule::LetterNotInAlphabet(a) => write!(f, "letter {a:?} is not in the alphabet"),
            Rule::ZeroTestDecrement { counter } => write!(
                f,
                "counter {counter} is tested for zero and decremented (a zero test allows only effect 0 or +1)"
            ),
            Rule::BlindCounterTested { counter } => {
                write!(f, "blind counter {counter} carries a zero/positive test")
            }
            Rule::EffectOutOfRange { counter, delta } => {
                write!(f, "counter {counter} has effect {delta}, outside {{-1, 0, +1}}")
            }
            Rule::DuplicateStateName(n) => write!(f, "state name {n:?} is declared twice"),
        }
    }
}

/// A real-time k-counter machine.
///
/// Structural consistency (state indices, arities) is checked on
/// construction; the semantic rules are reported by [`CounterMachine::validate`].
#[derive(Debug, Clone)]
pub struct CounterMachine {
    states: Vec<String>,
    alphabet: Alphabet,
    blind: Vec<bool>,
    initial: StateId,
    transitions: Vec<Transition>,
    acceptance: Acceptance,
    outgoing: Vec<Vec<usize>>,
}

impl PartialEq for CounterMachine {
    fn eq(&self, other: &Self) -> bool {
        self.states == other.states
            && self.alphabet == other.alphabet
            && self.blind == other.blind
            && self.initial == other.initial
            && self.transitions == other.transitions
            && self.acceptance == other.acceptance
    }
}

impl Eq for CounterMachine {}

impl CounterMachine {
    pub fn new(
        states: Vec<String>,
        alphabet: Alphabet,
        blind: Vec<bool>,
        initial: StateId,
        transitions: Vec<Transition>,
        acceptance: Acceptance,
    ) -> Result<Self, MachineError> {
        let k = blind.len();
        let n = states.len();
        if initial >= n {
            return Err(MachineError::InitialOutOfRange(initial));
        }
        for (i, t) in transitions.iter().enumerate() {
            for s in [t.source, t.target] {
                if s >= n {
                    return Err(MachineError::StateOutOfRange {
                        transition: i,
                        state: s,
                    });
                }
            }
            for found in [t.guard.len(), t.effect.len()] {
                if found != k {
                    return Err(MachineError::ArityMismatch {
                        transition: i,
                        expected: k,
                        found,
                    });
                }
            }
        }
        if let Some(&s) = acceptance.mentioned().iter().find(|&&s| s >= n) {
            return Err(MachineError::AcceptingOutOfRange(s));
        }
        let mut outgoing = alloc::vec![Vec::new(); n];
        for (i, t) in transitions.iter().enumerate() {
            outgoing[t.source].push(i);
        }
        Ok(CounterMachine {
            states,
            alphabet,
            blind,
            initial,
            transitions,
            acceptance,
            outgoing,
        })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|n| n == name)
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn counters(&self) -> usize {
        self.blind.len()
    }

    pub fn blind(&self) -> &[bool] {
        &self.blind
    }

    pub fn is_all_blind(&self) -> bool {
        self.blind.iter().all(|&b| b)
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn acceptance(&self) -> &Acceptance {
        &self.acceptance
    }

    /// Indices of transitions leaving `s`.
    pub fn outgoing(&self, s: StateId) -> &[usize] {
        &self.outgoing[s]
    }

    /// `F` for Büchi machines, the union of the family for Muller machines.
    pub fn accepting_states(&self) -> BTreeSet<StateId> {
        self.acceptance.mentioned()
    }

    pub fn is_accepting(&self, s: StateId) -> bool {
        match &self.acceptance {
            Acceptance::Buchi(f) => f.contains(&s),
            Acceptance::Muller(fs) => fs.iter().any(|f| f.contains(&s)),
        }
    }

    pub fn initial_configuration(&self) -> Configuration {
        Configuration::new(self.initial, alloc::vec![0; self.counters()])
    }

    /// Every violated well-formedness rule. Empty iff the machine is valid.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for name in &self.states {
            if !seen.insert(name.as_str()) {
                out.push(Diagnostic {
                    transition: None,
                    rule: Rule::DuplicateStateName(name.clone()),
                });
            }
        }
        for (i, t) in self.transitions.iter().enumerate() {
            let mut push = |rule| {
                out.push(Diagnostic {
                    transition: Some(i),
                    rule,
                })
            };
            if !self.alphabet.contains(t.letter) {
                push(Rule::LetterNotInAlphabet(t.letter));
            }
            for m in 0..self.counters() {
                let (test, delta) = (t.guard[m], t.effect[m]);
                if !(-1..=1).contains(&delta) {
                    push(Rule::EffectOutOfRange { counter: m, delta });
                }
                if self.blind[m] && test != Test::Any {
                    push(Rule::BlindCounterTested { counter: m });
                }
                if test == Test::Zero && delta == -1 {
                    push(Rule::ZeroTestDecrement { counter: m });
                }
            }
        }
        out
    }

    fn check_configuration(&self, c: &Configuration) -> Result<(), MachineError> {
        if c.counters.len() != self.counters() {
            return Err(MachineError::ConfigurationArity {
                expected: self.counters(),
                found: c.counters.len(),
            });
        }
        if c.state >= self.num_states() {
            return Err(MachineError::StateOutOfRange {
                transition: usize::MAX,
                state: c.state,
            });
        }
        Ok(())
    }

    /// Enabled steps from `c` on `a`, as (transition index, successor).
    /// Does not check the letter against the alphabet.
    pub fn steps<'a>(
        &'a self,
        c: &'a Configuration,
        a: char,
    ) -> impl Iterator<Item = (usize, Configuration)> + 'a {
        self.outgoing[c.state].iter().filter_map(move |&i| {
            let t = &self.transitions[i];
            if t.letter != a {
                return None;
            }
            t.fire(&c.counters)
                .map(|counters| (i, Configuration::new(t.target, counters)))
        })
    }

    /// The set of configurations reachable from `c` by one transition on `a`.
    pub fn successors(
        &self,
        c: &Configuration,
        a: char,
    ) -> Result<BTreeSet<Configuration>, MachineError> {
        if !self.alphabet.contains(a) {
            return Err(MachineError::UnknownLetter(a));
        }
        self.check_configuration(c)?;
        Ok(self.steps(c, a).map(|(_, next)| next).collect())
    }
}

/// Incremental construction of a [`CounterMachine`].
#[derive(Debug, Clone)]
pub struct MachineBuilder {
    states: Vec<String>,
    alphabet: Alphabet,
    blind: Vec<bool>,
    initial: StateId,
    transitions: Vec<Transition>,
    accepting: BTreeSet<StateId>,
    muller: Option<Vec<BTreeSet<StateId>>>,
}

impl MachineBuilder {
    /// A builder for a machine with `counters` non-blind counters.
    pub fn new(alphabet: Alphabet, counters: usize) -> Self {
        MachineBuilder {
            states: Vec::new(),
            alphabet,
            blind: alloc::vec![false; counters],
            initial: 0,
            transitions: Vec::new(),
            accepting: BTreeSet::new(),
            muller: None,
        }
    }

    pub fn all_blind(mut self) -> Self {
        self.blind.iter_mut().for_each(|b| *b = true);
        self
    }

    pub fn blind(mut self, blind: Vec<bool>) -> Self {
        self.blind = blind;
        self
    }

    pub fn state(&mut self, name: impl Into<String>) -> StateId {
        self.states.push(name.into());
        self.states.len() - 1
    }

    pub fn initial(&mut self, s: StateId) -> &mut Self {
        self.initial = s;
        self
    }

    pub fn accept(&mut self, s: StateId) -> &mut Self {
        self.accepting.insert(s);
        self
    }

    pub fn muller_set(&mut self, set: impl IntoIterator<Item = StateId>) -> &mut Self {
        self.muller
            .get_or_insert_with(Vec::new)
            .push(set.into_iter().collect());
        self
    }

    pub fn transition(
        &mut self,
        source: StateId,
        letter: char,
        guard: impl Into<Vec<Test>>,
        effect: impl Into<Vec<i8>>,
        target: StateId,
    ) -> &mut Self {
        self.transitions
            .push(Transition::new(source, letter, guard, effect, target));
        self
    }

    /// Adds a transition written in the `Z/P/*` and `+/-/0` notation.
    ///
    /// # Panics
    /// On symbols outside those sets.
    pub fn t(
        &mut self,
        source: StateId,
        letter: char,
        guard: &str,
        effect: &str,
        target: StateId,
    ) -> &mut Self {
        let g = parse_guard(guard).expect("guard symbols are Z, P or *");
        let e = parse_effect(effect).expect("effect symbols are +, - or 0");
        self.transition(source, letter, g, e, target)
    }

    pub fn build(self) -> Result<CounterMachine, MachineError> {
        let acceptance = match self.muller {
            Some(fs) => Acceptance::Muller(fs),
            None => Acceptance::Buchi(self.accepting),
        };
        CounterMachine::new(
            self.states,
            self.alphabet,
            self.blind,
            self.initial,
            self.transitions,
            acceptance,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ab() -> Alphabet {
        Alphabet::new(['a', 'b']).unwrap()
    }

    fn decrementer(blind: bool) -> CounterMachine {
        let mut b = MachineBuilder::new(ab(), 1);
        if blind {
            b = b.all_blind();
        }
        let q0 = b.state("q0");
        let q1 = b.state("q1");
        b.t(q0, 'a', if blind { "*" } else { "P" }, "-", q1);
        b.accept(q1);
        b.build().unwrap()
    }

    #[test]
    fn alphabet_rejects_duplicates_and_empty() {
        assert_eq!(Alphabet::new(['a', 'a']), Err(MachineError::DuplicateLetter('a')));
        assert_eq!(Alphabet::new([]), Err(MachineError::EmptyAlphabet));
    }

    #[test]
    fn validate_flags_zero_test_decrement() {
        let mut b = MachineBuilder::new(ab(), 1);
        let q = b.state("q");
        b.t(q, 'a', "Z", "+", q).t(q, 'b', "Z", "-", q);
        let d = b.build().unwrap().validate();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].transition, Some(1));
        assert_eq!(d[0].rule, Rule::ZeroTestDecrement { counter: 0 });
    }

    #[test]
    fn validate_flags_tested_blind_counter() {
        let mut b = MachineBuilder::new(ab(), 1).all_blind();
        let q = b.state("q");
        b.t(q, 'a', "P", "-", q);
        let d = b.build().unwrap().validate();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].rule, Rule::BlindCounterTested { counter: 0 });
    }

    #[test]
    fn validate_flags_letters_and_names() {
        let mut b = MachineBuilder::new(ab(), 0);
        let q = b.state("q");
        b.state("q");
        b.t(q, 'c', "", "", q);
        let rules: Vec<_> = b.build().unwrap().validate().into_iter().map(|d| d.rule).collect();
        assert!(rules.contains(&Rule::LetterNotInAlphabet('c')));
        assert!(rules.contains(&Rule::DuplicateStateName("q".into())));
    }

    #[test]
    fn positive_guard_blocks_at_zero() {
        let m = decrementer(false);
        let c0 = Configuration::new(0, vec![0]);
        assert!(m.successors(&c0, 'a').unwrap().is_empty());
        let c1 = Configuration::new(0, vec![1]);
        let s: Vec<_> = m.successors(&c1, 'a').unwrap().into_iter().collect();
        assert_eq!(s, vec![Configuration::new(1, vec![0])]);
    }

    #[test]
    fn blind_decrement_needs_a_token() {
        let m = decrementer(true);
        assert!(m.successors(&Configuration::new(0, vec![0]), 'a').unwrap().is_empty());
        let s: Vec<_> = m
            .successors(&Configuration::new(0, vec![2]), 'a')
            .unwrap()
            .into_iter()
            .collect();
        assert_eq!(s, vec![Configuration::new(1, vec![1])]);
    }

    #[test]
    fn successors_reject_foreign_letters() {
        let m = decrementer(false);
        assert_eq!(
            m.successors(&m.initial_configuration(), 'z'),
            Err(MachineError::UnknownLetter('z'))
        );
    }

    #[test]
    fn construction_checks_structure() {
        let t = Transition::new(0, 'a', vec![], vec![], 3);
        let err = CounterMachine::new(
            vec!["q".into()],
            ab(),
            vec![],
            0,
            vec![t],
            Acceptance::Buchi(BTreeSet::new()),
        );
        assert_eq!(
            err,
            Err(MachineError::StateOutOfRange {
                transition: 0,
                state: 3
            })
        );
    }
}
