//! Random machines and words, driven by a caller-supplied RNG.

use std::collections::BTreeSet;

use blindcount::coding::{SEP_A, SEP_B, ZERO};
use blindcount::{Acceptance, Alphabet, CounterMachine, LassoWord, Test, Transition};
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MachineParams {
    pub states: usize,
    pub letters: usize,
    pub counters: usize,
    pub all_blind: bool,
    /// Probability of each (source, letter, target) triple carrying a transition.
    pub density: f64,
    /// Probability that the accepting set is nonempty.
    pub accept_prob: f64,
}

impl MachineParams {
    /// A one-counter, non-blind Büchi automaton.
    pub fn one_counter(states: usize, letters: usize) -> Self {
        MachineParams {
            states,
            letters,
            counters: 1,
            all_blind: false,
            density: 0.4,
            accept_prob: 0.8,
        }
    }
}

/// `{a, b, c, …}` with `n` letters.
pub fn sigma(n: usize) -> Alphabet {
    Alphabet::new((0..n as u8).map(|i| (b'a' + i) as char)).expect("at least one letter")
}

fn random_test<R: Rng>(rng: &mut R, blind: bool) -> (Test, i8) {
    let guard = if blind {
        Test::Any
    } else {
        *[Test::Zero, Test::Positive, Test::Any].choose(rng).expect("nonempty")
    };
    let effect = if guard == Test::Zero {
        rng.gen_range(0..=1)
    } else {
        rng.gen_range(-1..=1)
    };
    (guard, effect)
}

pub fn random_machine<R: Rng>(rng: &mut R, p: &MachineParams) -> CounterMachine {
    let alphabet = sigma(p.letters);
    let mut transitions = Vec::new();
    for src in 0..p.states {
        for a in alphabet.iter() {
            for dst in 0..p.states {
                if !rng.gen_bool(p.density) {
                    continue;
                }
                let (guard, effect): (Vec<Test>, Vec<i8>) =
                    (0..p.counters).map(|_| random_test(rng, p.all_blind)).unzip();
                transitions.push(Transition::new(src, a, guard, effect, dst));
            }
        }
    }
    let mut accepting = BTreeSet::new();
    if rng.gen_bool(p.accept_prob) {
        accepting.extend((0..p.states).filter(|_| rng.gen_bool(0.5)));
        if accepting.is_empty() {
            accepting.insert(rng.gen_range(0..p.states));
        }
    }
    CounterMachine::new(
        (0..p.states).map(|i| format!("q{i}")).collect(),
        alphabet,
        vec![p.all_blind; p.counters],
        0,
        transitions,
        Acceptance::Buchi(accepting),
    )
    .expect("generated machines are well formed")
}

pub fn random_word<R: Rng>(rng: &mut R, letters: &[char], len: usize) -> Vec<char> {
    (0..len)
        .map(|_| *letters.choose(rng).expect("nonempty alphabet"))
        .collect()
}

/// A lasso with `|u| + |v| ≤ max_total` and `|v| ≥ 1`.
pub fn random_lasso<R: Rng>(rng: &mut R, letters: &[char], max_total: usize) -> LassoWord {
    let total = rng.gen_range(1..=max_total.max(1));
    let v = rng.gen_range(1..=total);
    LassoWord::new(random_word(rng, letters, total - v), random_word(rng, letters, v))
        .expect("nonempty cycle")
}

/// A lasso over `Σ ∪ {A, B, 0}` that starts like a coded word and is
/// then perturbed, so that the shape and escape conditions are exercised.
pub fn random_gamma_lasso<R: Rng>(rng: &mut R, sigma: &[char], max_total: usize) -> LassoWord {
    let mut gamma: Vec<char> = sigma.to_vec();
    gamma.extend([SEP_A, SEP_B, ZERO]);
    if rng.gen_bool(0.3) {
        return random_lasso(rng, &gamma, max_total);
    }
    let mut blocks = Vec::new();
    let count = rng.gen_range(1..=4);
    for i in 0..count {
        let sep = if i % 2 == 0 { SEP_A } else { SEP_B };
        let zeros = rng.gen_range(1..=4);
        blocks.push(sep);
        blocks.extend(std::iter::repeat_n(ZERO, zeros));
        blocks.push(*sigma.choose(rng).expect("nonempty alphabet"));
    }
    if rng.gen_bool(0.3) {
        let at = rng.gen_range(0..blocks.len());
        blocks[at] = *gamma.choose(rng).expect("nonempty alphabet");
    }
    let split = rng.gen_range(0..blocks.len());
    let (u, v) = blocks.split_at(split);
    LassoWord::new(u.to_vec(), v.to_vec()).expect("nonempty cycle")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_machines_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for k in 0..3 {
            for blind in [false, true] {
                let p = MachineParams {
                    counters: k,
                    all_blind: blind,
                    ..MachineParams::one_counter(3, 2)
                };
                let m = random_machine(&mut rng, &p);
                assert!(m.validate().is_empty());
            }
        }
    }

    #[test]
    fn lassos_respect_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let x = random_lasso(&mut rng, &['a', 'b'], 5);
            assert!(!x.cycle().is_empty() && x.spoke().len() + x.cycle().len() <= 5);
        }
    }
}
