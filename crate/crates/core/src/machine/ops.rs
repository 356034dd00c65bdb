use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::vec::Vec;

use super::{Acceptance, CounterMachine, MachineError, StateId, Test, Transition};
use crate::shape::ShapeAutomaton;

/// Result of [`union_machines`], with the embedding of each operand's states.
#[derive(Debug, Clone)]
pub struct Union {
    pub machine: CounterMachine,
    pub left: Vec<StateId>,
    pub right: Vec<StateId>,
}

fn padded(t: &Transition, k: usize, source: StateId, target: StateId) -> Transition {
    let mut guard = t.guard.clone();
    let mut effect = t.effect.clone();
    guard.resize(k, Test::Any);
    effect.resize(k, 0);
    Transition {
        source,
        letter: t.letter,
        guard,
        effect,
        target,
    }
}

/// Büchi machine for `L(m1) ∪ L(m2)`.
///
/// States are a fresh initial state followed by disjoint copies of both
/// operands. The fresh state carries copies of the transitions leaving both
/// initial states. The shorter counter vector is padded with blind counters
/// that never move.
pub fn union_machines(m1: &CounterMachine, m2: &CounterMachine) -> Result<Union, MachineError> {
    if m1.alphabet() != m2.alphabet() {
        return Err(MachineError::AlphabetMismatch);
    }
    let (Acceptance::Buchi(f1), Acceptance::Buchi(f2)) = (m1.acceptance(), m2.acceptance()) else {
        return Err(MachineError::NotBuchi);
    };
    let k = m1.counters().max(m2.counters());
    let blind: Vec<bool> = (0..k)
        .map(|i| {
            let b1 = m1.blind().get(i).copied().unwrap_or(true);
            let b2 = m2.blind().get(i).copied().unwrap_or(true);
            b1 && b2
        })
        .collect();

    let mut states = alloc::vec![alloc::string::String::from("start")];
    let left: Vec<StateId> = (0..m1.num_states()).map(|s| s + 1).collect();
    let right: Vec<StateId> = (0..m2.num_states()).map(|s| s + 1 + m1.num_states()).collect();
    states.extend(m1.states().iter().map(|n| format!("l.{n}")));
    states.extend(m2.states().iter().map(|n| format!("r.{n}")));

    let mut transitions = Vec::new();
    for (m, map) in [(m1, &left), (m2, &right)] {
        for &i in m.outgoing(m.initial()) {
            let t = &m.transitions()[i];
            transitions.push(padded(t, k, 0, map[t.target]));
        }
    }
    for (m, map) in [(m1, &left), (m2, &right)] {
        for t in m.transitions() {
            transitions.push(padded(t, k, map[t.source], map[t.target]));
        }
    }

    let mut accepting: BTreeSet<StateId> = f1.iter().map(|&s| left[s]).collect();
    accepting.extend(f2.iter().map(|&s| right[s]));
    if f1.contains(&m1.initial()) || f2.contains(&m2.initial()) {
        accepting.insert(0);
    }
    let machine = CounterMachine::new(
        states,
        m1.alphabet().clone(),
        blind,
        0,
        transitions,
        Acceptance::Buchi(accepting),
    )?;
    Ok(Union {
        machine,
        left,
        right,
    })
}

/// Result of [`product_with_shape`]: each product state is
/// (machine state, shape state, flag).
#[derive(Debug, Clone)]
pub struct Product {
    pub machine: CounterMachine,
    pub pairs: Vec<(StateId, usize, bool)>,
}

/// Büchi machine for `L(m) ∩ L(shape)`, restricted to reachable states.
///
/// The flag is off while waiting for an accepting state of `m` and on while
/// waiting for an accepting state of the shape; the accepting product states
/// are the flagged ones over accepting shape states.
pub fn product_with_shape(
    m: &CounterMachine,
    shape: &ShapeAutomaton,
) -> Result<Product, MachineError> {
    if m.alphabet() != shape.alphabet() {
        return Err(MachineError::AlphabetMismatch);
    }
    let Acceptance::Buchi(f) = m.acceptance() else {
        return Err(MachineError::NotBuchi);
    };
    let mut index: BTreeMap<(StateId, usize, bool), StateId> = BTreeMap::new();
    let mut pairs = Vec::new();
    let mut queue = VecDeque::new();
    let start = (m.initial(), shape.initial(), false);
    index.insert(start, 0);
    pairs.push(start);
    queue.push_back(start);
    let mut transitions = Vec::new();
    while let Some((q, s, flag)) = queue.pop_front() {
        let src = index[&(q, s, flag)];
        let next_flag = if !flag && f.contains(&q) {
            true
        } else if flag && shape.is_accepting(s) {
            false
        } else {
            flag
        };
        for &i in m.outgoing(q) {
            let t = &m.transitions()[i];
            let Some(s2) = shape.step(s, t.letter) else {
                continue;
            };
            let key = (t.target, s2, next_flag);
            let dst = *index.entry(key).or_insert_with(|| {
                pairs.push(key);
                queue.push_back(key);
                pairs.len() - 1
            });
            transitions.push(Transition {
                source: src,
                letter: t.letter,
                guard: t.guard.clone(),
                effect: t.effect.clone(),
                target: dst,
            });
        }
    }
    let states = pairs
        .iter()
        .map(|&(q, s, flag)| format!("{}|{}|{}", m.state_name(q), shape.name(s), u8::from(flag)))
        .collect();
    let accepting = pairs
        .iter()
        .enumerate()
        .filter(|(_, &(_, s, flag))| flag && shape.is_accepting(s))
        .map(|(i, _)| i)
        .collect();
    let machine = CounterMachine::new(
        states,
        m.alphabet().clone(),
        m.blind().to_vec(),
        0,
        transitions,
        Acceptance::Buchi(accepting),
    )?;
    Ok(Product { machine, pairs })
}
