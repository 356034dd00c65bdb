use alloc::vec::Vec;

use super::{build_b, BMachine, ConstructionError};
use crate::coding::{coded_alphabet, Separator, SEP_A, SEP_B, ZERO};
use crate::machine::{union_machines, Alphabet, CounterMachine, MachineBuilder, StateId};

fn escape_l1(gamma: &Alphabet) -> Result<CounterMachine, ConstructionError> {
    let mut b = MachineBuilder::new(gamma.clone(), 0);
    let e0 = b.state("e0");
    let e1 = b.state("e1");
    let e2 = b.state("e2");
    let e3 = b.state("e3");
    let sink = b.state("sink");
    let is_payload = |c: char| !matches!(c, SEP_A | SEP_B | ZERO);
    for c in gamma.iter() {
        b.t(sink, c, "", "", sink);
        b.t(e0, c, "", "", if c == SEP_A { e1 } else { sink });
        b.t(e1, c, "", "", if c == ZERO { e2 } else { sink });
        b.t(e2, c, "", "", if is_payload(c) { e3 } else { sink });
        if c != SEP_B {
            b.t(e3, c, "", "", sink);
        }
    }
    b.accept(sink);
    Ok(b.build()?)
}

fn escape_l2(gamma: &Alphabet) -> Result<CounterMachine, ConstructionError> {
    let mut b = MachineBuilder::new(gamma.clone(), 1).all_blind();
    let wander = b.state("w");
    let second = b.state("s2");
    let down = b.state("z2");
    let sink = b.state("sink");
    let payloads: Vec<char> = gamma.iter().filter(|&c| !matches!(c, SEP_A | SEP_B | ZERO)).collect();
    for c in gamma.iter() {
        b.t(wander, c, "*", "0", wander);
        b.t(sink, c, "*", "0", sink);
    }
    for sep in [Separator::A, Separator::B] {
        let l = sep.letter();
        let first = b.state(alloc::format!("s1{l}"));
        let up = b.state(alloc::format!("z1{l}"));
        let paid = b.state(alloc::format!("p1{l}"));
        b.t(wander, l, "*", "0", first);
        b.t(first, ZERO, "*", "+", up);
        b.t(up, ZERO, "*", "+", up);
        for &a in &payloads {
            b.t(up, a, "*", "0", paid);
        }
        b.t(paid, sep.other().letter(), "*", "0", second);
    }
    b.t(second, ZERO, "*", "-", down);
    b.t(down, ZERO, "*", "-", down);
    for &a in &payloads {
        b.t(down, a, "*", "0", sink);
    }
    b.accept(sink);
    Ok(b.build()?)
}

/// A real-time one-blind-counter Büchi automaton over `Σ ∪ {A, B, 0}` for
/// `𝓛 = 𝓛₁ ∪ 𝓛₂`.
pub fn build_lescape(sigma: &Alphabet) -> Result<CounterMachine, ConstructionError> {
    let gamma = coded_alphabet(sigma)?;
    let l1 = escape_l1(&gamma)?;
    let l2 = escape_l2(&gamma)?;
    Ok(union_machines(&l1, &l2)?.machine)
}

/// `P_A`: the union of `ℬ` and the escape machine, over four blind counters.
#[derive(Debug, Clone)]
pub struct PaMachine {
    pub machine: CounterMachine,
    pub b: BMachine,
    /// Embedding of `ℬ`'s states.
    pub b_states: Vec<StateId>,
    /// Embedding of the escape machine's states.
    pub escape_states: Vec<StateId>,
}

impl PaMachine {
    /// The `ℬ` state a `P_A` state stands for. The shared initial state
    /// stands for `ℬ`'s initial state.
    pub fn b_state(&self, s: StateId) -> Option<StateId> {
        if s == self.machine.initial() {
            return Some(self.b.machine().initial());
        }
        let first = *self.b_states.first()?;
        (s >= first && s < first + self.b_states.len()).then(|| s - first)
    }
}

pub fn build_pa(a: &CounterMachine) -> Result<PaMachine, ConstructionError> {
    let b = build_b(a)?;
    let escape = build_lescape(a.alphabet())?;
    let u = union_machines(b.machine(), &escape)?;
    Ok(PaMachine {
        machine: u.machine,
        b,
        b_states: u.left,
        escape_states: u.right,
    })
}
