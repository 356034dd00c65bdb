//! Deterministic finite-state Büchi automata over letters, used as word shapes
//! in product constructions. Missing transitions reject.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::machine::Alphabet;
use crate::word::LassoWord;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeAutomaton {
    names: Vec<String>,
    alphabet: Alphabet,
    initial: usize,
    delta: BTreeMap<(usize, char), usize>,
    accepting: Vec<bool>,
}

impl ShapeAutomaton {
    /// An automaton with a single, non-accepting initial state and no transitions.
    pub fn new(alphabet: Alphabet, initial_name: impl Into<String>) -> Self {
        ShapeAutomaton {
            names: alloc::vec![initial_name.into()],
            alphabet,
            initial: 0,
            delta: BTreeMap::new(),
            accepting: alloc::vec![false],
        }
    }

    /// Accepts every ω-word over `alphabet`.
    pub fn universal(alphabet: Alphabet) -> Self {
        let mut s = ShapeAutomaton::new(alphabet, "all");
        s.accepting[0] = true;
        for a in s.alphabet.clone().iter() {
            s.set(0, a, 0);
        }
        s
    }

    /// Accepts nothing.
    pub fn empty(alphabet: Alphabet) -> Self {
        ShapeAutomaton::new(alphabet, "none")
    }

    pub fn add_state(&mut self, name: impl Into<String>, accepting: bool) -> usize {
        self.names.push(name.into());
        self.accepting.push(accepting);
        self.names.len() - 1
    }

    pub fn set_accepting(&mut self, s: usize, accepting: bool) {
        self.accepting[s] = accepting;
    }

    /// Sets `δ(s, a) = t`, replacing any previous target.
    pub fn set(&mut self, s: usize, a: char, t: usize) {
        self.delta.insert((s, a), t);
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn is_accepting(&self, s: usize) -> bool {
        self.accepting[s]
    }

    pub fn step(&self, s: usize, a: char) -> Option<usize> {
        self.delta.get(&(s, a)).copied()
    }

    /// Runs over a finite word from the initial state.
    pub fn run(&self, w: &[char]) -> Option<usize> {
        w.iter().try_fold(self.initial, |s, &a| self.step(s, a))
    }

    pub fn accepts_lasso(&self, x: &LassoWord) -> bool {
        let Some(mut s) = self.run(x.spoke()) else {
            return false;
        };
        // The state at each cycle boundary determines the rest of the run.
        let mut boundary: Vec<usize> = Vec::new();
        let mut hits: Vec<bool> = Vec::new();
        loop {
            if let Some(i) = boundary.iter().position(|&b| b == s) {
                return hits[i..].iter().any(|&h| h);
            }
            boundary.push(s);
            let mut hit = false;
            for &a in x.cycle() {
                match self.step(s, a) {
                    Some(t) => s = t,
                    None => return false,
                }
                hit |= self.accepting[s];
            }
            hits.push(hit);
        }
    }
}
