use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::MembershipError;
use crate::machine::{Configuration, CounterMachine, MachineError, RunPrefix, Test, Transition};
use crate::word::LassoWord;

/// Longest word [`brute_force_oracle`] accepts.
pub const BRUTE_FORCE_LIMIT: usize = 20;

fn apply(t: &Transition, counters: &[u32]) -> Option<Vec<u32>> {
    let mut out = counters.to_vec();
    for (m, value) in out.iter_mut().enumerate() {
        let ok = match t.guard[m] {
            Test::Zero => *value == 0,
            Test::Positive => *value != 0,
            Test::Any => true,
        };
        if !ok {
            return None;
        }
        match t.effect[m] {
            -1 => *value = value.checked_sub(1)?,
            1 => *value += 1,
            _ => {}
        }
    }
    Some(out)
}

fn enumerate(
    m: &CounterMachine,
    w: &[char],
    conf: Configuration,
    visits: usize,
    out: &mut BTreeSet<(Configuration, usize)>,
) {
    let Some((&a, rest)) = w.split_first() else {
        out.insert((conf, visits));
        return;
    };
    for t in m.transitions() {
        if t.source != conf.state || t.letter != a {
            continue;
        }
        if let Some(counters) = apply(t, &conf.counters) {
            let v = visits + usize::from(m.is_accepting(t.target));
            enumerate(m, rest, Configuration::new(t.target, counters), v, out);
        }
    }
}

/// Final configuration and number of accepting visits of every run of `m`
/// on `w`, by plain recursion over the transition list.
pub fn brute_force_oracle(
    m: &CounterMachine,
    w: &[char],
) -> Result<BTreeSet<(Configuration, usize)>, MembershipError> {
    if w.len() > BRUTE_FORCE_LIMIT {
        return Err(MembershipError::WordTooLong {
            len: w.len(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    if let Some(&a) = w.iter().find(|&&a| !m.alphabet().contains(a)) {
        return Err(MachineError::UnknownLetter(a).into());
    }
    let mut out = BTreeSet::new();
    let init = m.initial_configuration();
    let v = usize::from(m.is_accepting(init.state));
    enumerate(m, w, init, v, &mut out);
    Ok(out)
}

/// Whether `run` starts in the initial configuration and each step is taken
/// by some transition of `m` on the corresponding letter.
pub fn validate_run_prefix(m: &CounterMachine, run: &RunPrefix) -> bool {
    if run.configs.len() != run.word.len() + 1 || run.configs[0] != m.initial_configuration() {
        return false;
    }
    run.configs.windows(2).zip(&run.word).all(|(pair, &a)| {
        m.transitions().iter().any(|t| {
            t.source == pair[0].state
                && t.letter == a
                && t.target == pair[1].state
                && apply(t, &pair[0].counters).as_deref() == Some(&pair[1].counters[..])
        })
    })
}

/// Lasso membership by unrolling `x` for `unwindings` cycle iterations with
/// counters up to `bound`.
///
/// `Some(true)` when an unrolled run contains a repeatable segment through
/// an accepting state between two cycle starts. `Some(false)` when every run
/// dies, or when the unrolled configuration sets become periodic without
/// ever leaving the bound and contain no accepting state. `None` otherwise.
pub fn brute_force_lasso(
    m: &CounterMachine,
    x: &LassoWord,
    bound: u32,
    unwindings: usize,
) -> Option<bool> {
    let (u, v) = (x.spoke().len(), x.cycle().len());
    let len = u + unwindings * v;
    let step = |conf: &Configuration, i: usize| -> Vec<(Configuration, &Transition)> {
        m.transitions()
            .iter()
            .filter(|t| t.source == conf.state && t.letter == x.letter_at(i))
            .filter_map(|t| apply(t, &conf.counters).map(|c| (Configuration::new(t.target, c), t)))
            .collect()
    };
    let mut layers: Vec<BTreeSet<Configuration>> = alloc::vec![[m.initial_configuration()].into_iter().collect()];
    let mut bound_hit = false;
    for i in 0..len {
        let mut next = BTreeSet::new();
        for conf in &layers[i] {
            for (c, _) in step(conf, i) {
                if c.counters.iter().any(|&n| n > bound) {
                    bound_hit = true;
                } else {
                    next.insert(c);
                }
            }
        }
        layers.push(next);
    }

    for t in 0..unwindings {
        let i = u + t * v;
        for origin in &layers[i] {
            let mut cur: BTreeSet<(Configuration, bool, Vec<bool>)> =
                [(origin.clone(), false, alloc::vec![false; m.counters()])].into_iter().collect();
            for pos in i..len {
                let mut next = BTreeSet::new();
                for (conf, marked, zero) in &cur {
                    for (c, tr) in step(conf, pos) {
                        if c.counters.iter().any(|&n| n > bound) {
                            continue;
                        }
                        let z: Vec<bool> = zero
                            .iter()
                            .zip(&tr.guard)
                            .map(|(&z, g)| z || *g == Test::Zero)
                            .collect();
                        let mk = *marked || m.is_accepting(c.state);
                        next.insert((c, mk, z));
                    }
                }
                cur = next;
                let j = pos + 1;
                if (j - i) % v == 0 {
                    let found = cur.iter().any(|(c, mk, z)| {
                        *mk && c.state == origin.state
                            && origin.counters.iter().zip(&c.counters).zip(z).all(
                                |((&a, &b), &zt)| a == b || (b > a && !zt),
                            )
                    });
                    if found {
                        return Some(true);
                    }
                }
            }
        }
    }

    if layers[len].is_empty() {
        return Some(false);
    }
    if bound_hit {
        return None;
    }
    for t in 0..unwindings {
        let i = u + t * v;
        for s in t + 1..=unwindings {
            let j = u + s * v;
            if layers[i] == layers[j] {
                let accepting = layers[i..j]
                    .iter()
                    .flatten()
                    .any(|c| m.is_accepting(c.state));
                return (!accepting).then_some(false);
            }
        }
    }
    None
}
