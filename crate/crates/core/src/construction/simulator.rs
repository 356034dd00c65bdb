use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::ConstructionError;
use crate::coding::{coded_alphabet, shape_automaton, Separator, SEP_A, ZERO};
use crate::machine::{
    product_with_shape, Acceptance, CounterMachine, StateId, Test, Transition,
};

pub const C1: usize = 0;
pub const C2: usize = 1;
pub const C3: usize = 2;
pub const C4: usize = 3;

/// `(decreasing pair, increasing pair)` for a block with the given separator.
pub fn counter_pairs(parity: Separator) -> ((usize, usize), (usize, usize)) {
    match parity {
        Separator::A => ((C3, C4), (C1, C2)),
        Separator::B => ((C1, C2), (C3, C4)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DecPhase {
    First,
    Second,
    /// The single zero that decrements nothing has been read.
    Idle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IncPhase {
    First,
    Second,
}

/// Control state of the block simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    Start,
    /// Inside block 1, which has no decreasing work and forces `|u₁| = 0`.
    FirstBlock { zero_read: bool },
    InBlock {
        parity: Separator,
        dec: DecPhase,
        inc: IncPhase,
        /// First-counter increments minus first-counter decrements so far in
        /// this block. Must equal `n` when the payload is read.
        offset: i8,
        /// `q_{n-1}`.
        a_state: StateId,
        /// `N_{n-1}`.
        n: i8,
        /// No increment of the first increasing counter yet, i.e. `|u_n| = 0`.
        u_zero: bool,
    },
    /// Just read a payload; `(a_state, n)` is `(q_n, N_n)`.
    AfterPayload {
        a_state: StateId,
        n: i8,
        accept_mark: bool,
    },
}

impl Phase {
    fn name(&self, a: &CounterMachine) -> String {
        let sign = |n: i8| match n {
            1 => '+',
            -1 => '-',
            _ => '0',
        };
        match *self {
            Phase::Start => "start".into(),
            Phase::FirstBlock { zero_read } => format!("b1.{}", u8::from(zero_read)),
            Phase::InBlock {
                parity,
                dec,
                inc,
                offset,
                a_state,
                n,
                u_zero,
            } => {
                let d = match dec {
                    DecPhase::First => "d1",
                    DecPhase::Second => "d2",
                    DecPhase::Idle => "di",
                };
                let i = match inc {
                    IncPhase::First => "i1",
                    IncPhase::Second => "i2",
                };
                format!(
                    "{}.{d}.{i}.o{}.{}.n{}.u{}",
                    parity.letter(),
                    sign(offset),
                    a.state_name(a_state),
                    sign(n),
                    u8::from(u_zero)
                )
            }
            Phase::AfterPayload {
                a_state,
                n,
                accept_mark,
            } => format!(
                "pay.{}.n{}.m{}",
                a.state_name(a_state),
                sign(n),
                u8::from(accept_mark)
            ),
        }
    }
}

/// The four-blind-counter simulator of a one-counter automaton `A`, with
/// enough bookkeeping to read `A`-runs back off its runs.
#[derive(Debug, Clone)]
pub struct BMachine {
    machine: CounterMachine,
    phases: Vec<Phase>,
    /// Product state ↦ (phase index, shape state, flag).
    labels: Vec<(usize, usize, bool)>,
    source: CounterMachine,
}

impl BMachine {
    pub fn machine(&self) -> &CounterMachine {
        &self.machine
    }

    /// The automaton `A` this machine simulates.
    pub fn source(&self) -> &CounterMachine {
        &self.source
    }

    pub fn phase(&self, s: StateId) -> Phase {
        self.phases[self.labels[s].0]
    }

    pub fn shape_state(&self, s: StateId) -> usize {
        self.labels[s].1
    }

    pub fn flag(&self, s: StateId) -> bool {
        self.labels[s].2
    }

    /// `(q_n, N_n, accept mark)` if `s` is entered by reading a payload.
    pub fn payload_label(&self, s: StateId) -> Option<(StateId, i8, bool)> {
        match self.phase(s) {
            Phase::AfterPayload {
                a_state,
                n,
                accept_mark,
            } => Some((a_state, n, accept_mark)),
            _ => None,
        }
    }
}

pub(crate) fn check_source(a: &CounterMachine) -> Result<(), ConstructionError> {
    if a.counters() != 1 {
        return Err(ConstructionError::CounterCount(a.counters()));
    }
    if a.blind()[0] {
        return Err(ConstructionError::BlindCounter);
    }
    if !matches!(a.acceptance(), Acceptance::Buchi(_)) {
        return Err(ConstructionError::NotBuchi);
    }
    if let Some(d) = a.validate().first() {
        return Err(ConstructionError::Invalid(format!("{d}")));
    }
    Ok(())
}

struct PhaseMachine<'a> {
    a: &'a CounterMachine,
    index: BTreeMap<Phase, usize>,
    phases: Vec<Phase>,
    queue: VecDeque<Phase>,
    transitions: Vec<Transition>,
}

impl PhaseMachine<'_> {
    fn id(&mut self, p: Phase) -> usize {
        if let Some(&i) = self.index.get(&p) {
            return i;
        }
        self.index.insert(p, self.phases.len());
        self.phases.push(p);
        self.queue.push_back(p);
        self.phases.len() - 1
    }

    fn add(&mut self, src: usize, letter: char, effect: [i8; 4], dst: Phase) {
        let target = self.id(dst);
        self.transitions.push(Transition::new(
            src,
            letter,
            alloc::vec![Test::Any; 4],
            effect.to_vec(),
            target,
        ));
    }

    /// Payload transitions: pick an `A`-transition from `q` whose test agrees
    /// with whether `|u_n| = 0` and cannot take the counter below zero.
    fn payloads(&mut self, src: usize, q: StateId, u_zero: bool) {
        let probe = if u_zero { 0 } else { 1 };
        for &i in self.a.outgoing(q) {
            let t = &self.a.transitions()[i];
            if t.fire(&[probe]).is_none() {
                continue;
            }
            let dst = Phase::AfterPayload {
                a_state: t.target,
                n: t.effect[0],
                accept_mark: self.a.is_accepting(t.target),
            };
            self.add(src, t.letter, [0; 4], dst);
        }
    }

    fn expand(&mut self, p: Phase) {
        let src = self.index[&p];
        match p {
            Phase::Start => self.add(src, SEP_A, [0; 4], Phase::FirstBlock { zero_read: false }),
            Phase::FirstBlock { zero_read: false } => {
                let mut e = [0; 4];
                e[C2] = 1;
                self.add(src, ZERO, e, Phase::FirstBlock { zero_read: true });
            }
            Phase::FirstBlock { zero_read: true } => self.payloads(src, self.a.initial(), true),
            Phase::AfterPayload { a_state, n, .. } => {
                for parity in [Separator::A, Separator::B] {
                    let dst = Phase::InBlock {
                        parity,
                        dec: DecPhase::First,
                        inc: IncPhase::First,
                        offset: 0,
                        a_state,
                        n,
                        u_zero: true,
                    };
                    self.add(src, parity.letter(), [0; 4], dst);
                }
            }
            Phase::InBlock {
                parity,
                dec,
                inc,
                offset,
                a_state,
                n,
                u_zero,
            } => {
                if dec == DecPhase::Idle {
                    if offset == n {
                        self.payloads(src, a_state, u_zero);
                    }
                    return;
                }
                let (dec_pair, inc_pair) = counter_pairs(parity);
                let decs: &[DecPhase] = match dec {
                    DecPhase::First => &[DecPhase::First, DecPhase::Second, DecPhase::Idle],
                    _ => &[DecPhase::Second, DecPhase::Idle],
                };
                let incs: &[IncPhase] = match inc {
                    IncPhase::First => &[IncPhase::First, IncPhase::Second],
                    IncPhase::Second => &[IncPhase::Second],
                };
                for &d in decs {
                    for &i in incs {
                        let offset2 =
                            offset + i8::from(i == IncPhase::First) - i8::from(d == DecPhase::First);
                        // once a side has switched, the offset only moves one way
                        let feasible = offset2.abs() <= 1
                            && match (d, i) {
                                (DecPhase::Idle, _) => offset2 == n,
                                (DecPhase::First, IncPhase::First) => true,
                                (DecPhase::First, IncPhase::Second) => offset2 >= n,
                                (DecPhase::Second, IncPhase::First) => offset2 <= n,
                                (DecPhase::Second, IncPhase::Second) => offset2 == n,
                            };
                        if !feasible {
                            continue;
                        }
                        let mut e = [0i8; 4];
                        match d {
                            DecPhase::First => e[dec_pair.0] = -1,
                            DecPhase::Second => e[dec_pair.1] = -1,
                            DecPhase::Idle => {}
                        }
                        match i {
                            IncPhase::First => e[inc_pair.0] += 1,
                            IncPhase::Second => e[inc_pair.1] += 1,
                        }
                        let dst = Phase::InBlock {
                            parity,
                            dec: d,
                            inc: i,
                            offset: offset2,
                            a_state,
                            n,
                            u_zero: u_zero && i == IncPhase::Second,
                        };
                        self.add(src, ZERO, e, dst);
                    }
                }
            }
        }
    }
}

/// Builds the four-blind-counter Büchi automaton `ℬ` with
/// `h(x) ∈ L(ℬ) ⟺ x ∈ L(A)`.
///
/// In block `n` one counter pair is drained (first counter, then second, then
/// one idle zero) while the other pair is filled (first counter `|u_n|`
/// times, then second). The `A`-transition for `x(n)` is chosen on the
/// payload and its effect shifts the switch point of the next block. The
/// result is intersected with the shape automaton of block-formed words.
pub fn build_b(a: &CounterMachine) -> Result<BMachine, ConstructionError> {
    check_source(a)?;
    let gamma = coded_alphabet(a.alphabet())?;
    let shape = shape_automaton(a.alphabet())?;
    let mut pm = PhaseMachine {
        a,
        index: BTreeMap::new(),
        phases: Vec::new(),
        queue: VecDeque::new(),
        transitions: Vec::new(),
    };
    pm.id(Phase::Start);
    while let Some(p) = pm.queue.pop_front() {
        pm.expand(p);
    }
    let names = pm.phases.iter().map(|p| p.name(a)).collect();
    let accepting = pm
        .phases
        .iter()
        .enumerate()
        .filter(|(_, p)| matches!(p, Phase::AfterPayload { accept_mark: true, .. }))
        .map(|(i, _)| i)
        .collect();
    let phase_machine = CounterMachine::new(
        names,
        gamma,
        alloc::vec![true; 4],
        0,
        pm.transitions,
        Acceptance::Buchi(accepting),
    )?;
    let product = product_with_shape(&phase_machine, &shape)?;
    Ok(BMachine {
        machine: product.machine,
        phases: pm.phases,
        labels: product.pairs,
        source: a.clone(),
    })
}
