use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::{Acceptance, Configuration, CounterMachine, MachineError, StateId};

/// Default cap on the number of configurations an exploration may hold.
pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

/// A finite run: `configs[0]` is the initial configuration and `configs[i+1]`
/// follows from `configs[i]` on `word[i]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RunPrefix {
    pub configs: Vec<Configuration>,
    pub word: Vec<char>,
    /// Visits to each accepting state, counting every position of the run.
    pub visits: BTreeMap<StateId, usize>,
}

impl RunPrefix {
    pub fn last(&self) -> &Configuration {
        self.configs.last().expect("a run has an initial configuration")
    }

    pub fn total_visits(&self) -> usize {
        self.visits.values().sum()
    }

    pub(crate) fn from_configs(m: &CounterMachine, configs: Vec<Configuration>, word: &[char]) -> Self {
        let accepting = m.accepting_states();
        let mut visits = BTreeMap::new();
        for c in &configs {
            if accepting.contains(&c.state) {
                *visits.entry(c.state).or_insert(0) += 1;
            }
        }
        RunPrefix {
            configs,
            word: word.to_vec(),
            visits,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunPrefixes {
    /// Sorted and duplicate-free.
    pub runs: Vec<RunPrefix>,
    /// The node budget was exceeded and `runs` is partial.
    pub truncated: bool,
    /// Some run was discarded for exceeding the counter bound.
    pub bound_hit: bool,
}

/// All runs of `m` on the finite word `w` whose counters stay within `bound`.
pub fn run_prefixes(
    m: &CounterMachine,
    w: &[char],
    bound: u32,
    budget: usize,
) -> Result<RunPrefixes, MachineError> {
    if let Some(&a) = w.iter().find(|&&a| !m.alphabet().contains(a)) {
        return Err(MachineError::UnknownLetter(a));
    }
    let mut frontier: Vec<Vec<Configuration>> = alloc::vec![alloc::vec![m.initial_configuration()]];
    let mut truncated = false;
    let mut bound_hit = false;
    for &a in w {
        let mut next = BTreeSet::new();
        'runs: for run in &frontier {
            let last = run.last().expect("runs are nonempty");
            let succ: BTreeSet<Configuration> = m.steps(last, a).map(|(_, c)| c).collect();
            for c in succ {
                debug_assert_eq!(c.counters.len(), m.counters());
                if c.counters.iter().any(|&v| v > bound) {
                    bound_hit = true;
                    continue;
                }
                if next.len() >= budget {
                    truncated = true;
                    break 'runs;
                }
                let mut extended = run.clone();
                extended.push(c);
                next.insert(extended);
            }
        }
        frontier = next.into_iter().collect();
        if frontier.is_empty() {
            break;
        }
    }
    let runs = if frontier.first().is_some_and(|r| r.len() == w.len() + 1) {
        frontier
            .into_iter()
            .map(|configs| RunPrefix::from_configs(m, configs, w))
            .collect()
    } else {
        Vec::new()
    };
    Ok(RunPrefixes {
        runs,
        truncated,
        bound_hit,
    })
}

/// An eventually periodic sequence of control states `stem · cycle^ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LassoRun {
    pub stem: Vec<StateId>,
    pub cycle: Vec<StateId>,
}

impl LassoRun {
    fn recurring(&self) -> Result<BTreeSet<StateId>, MachineError> {
        if self.cycle.is_empty() {
            return Err(MachineError::EmptyCycle);
        }
        Ok(self.cycle.iter().copied().collect())
    }
}

/// Büchi acceptance of a lasso-shaped run: some cycle state is accepting.
pub fn buchi_accepts_lasso_run(m: &CounterMachine, run: &LassoRun) -> Result<bool, MachineError> {
    let Acceptance::Buchi(f) = m.acceptance() else {
        return Err(MachineError::NotBuchi);
    };
    Ok(run.recurring()?.iter().any(|s| f.contains(s)))
}

/// Muller acceptance of a lasso-shaped run: the cycle states form a member of the family.
pub fn muller_accepts_lasso_run(m: &CounterMachine, run: &LassoRun) -> Result<bool, MachineError> {
    let Acceptance::Muller(fs) = m.acceptance() else {
        return Err(MachineError::NotMuller);
    };
    let inf = run.recurring()?;
    Ok(fs.contains(&inf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{Alphabet, MachineBuilder};
    use alloc::vec;

    fn loop_machine() -> CounterMachine {
        let mut b = MachineBuilder::new(Alphabet::new(['a']).unwrap(), 0);
        let q = b.state("q");
        b.t(q, 'a', "", "", q).accept(q);
        b.build().unwrap()
    }

    #[test]
    fn empty_word_gives_initial_run() {
        let m = loop_machine();
        let r = run_prefixes(&m, &[], 4, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(r.runs.len(), 1);
        assert_eq!(r.runs[0].configs, vec![m.initial_configuration()]);
    }

    #[test]
    fn self_loop_gives_one_run() {
        let m = loop_machine();
        let r = run_prefixes(&m, &['a', 'a'], 4, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(r.runs.len(), 1);
        assert_eq!(r.runs[0].configs.len(), 3);
        assert_eq!(r.runs[0].total_visits(), 3);
    }

    #[test]
    fn budget_overflow_is_reported() {
        let mut b = MachineBuilder::new(Alphabet::new(['a']).unwrap(), 1);
        let p = b.state("p");
        let q = b.state("q");
        b.t(p, 'a', "*", "+", p).t(p, 'a', "*", "0", q).t(q, 'a', "*", "0", p);
        let m = b.build().unwrap();
        let r = run_prefixes(&m, &['a'; 8], 20, 5).unwrap();
        assert!(r.truncated);
    }

    fn two_state(acc: Acceptance) -> CounterMachine {
        CounterMachine::new(
            vec!["q0".into(), "q1".into()],
            Alphabet::new(['a']).unwrap(),
            vec![],
            0,
            vec![],
            acc,
        )
        .unwrap()
    }

    #[test]
    fn buchi_looks_only_at_the_cycle() {
        let m = two_state(Acceptance::Buchi([0].into_iter().collect()));
        let hit = LassoRun { stem: vec![1], cycle: vec![0, 1] };
        let miss = LassoRun { stem: vec![0, 0], cycle: vec![1] };
        assert!(buchi_accepts_lasso_run(&m, &hit).unwrap());
        assert!(!buchi_accepts_lasso_run(&m, &miss).unwrap());
        let empty = two_state(Acceptance::Buchi(BTreeSet::new()));
        assert!(!buchi_accepts_lasso_run(&empty, &hit).unwrap());
        assert_eq!(buchi_accepts_lasso_run(&m, &LassoRun { stem: vec![], cycle: vec![] }), Err(MachineError::EmptyCycle));
    }

    #[test]
    fn muller_needs_exact_equality() {
        let m = two_state(Acceptance::Muller(vec![[0, 1].into_iter().collect()]));
        assert!(muller_accepts_lasso_run(&m, &LassoRun { stem: vec![], cycle: vec![0, 1] }).unwrap());
        assert!(!muller_accepts_lasso_run(&m, &LassoRun { stem: vec![], cycle: vec![0] }).unwrap());
        let none = two_state(Acceptance::Muller(vec![]));
        assert!(!muller_accepts_lasso_run(&none, &LassoRun { stem: vec![], cycle: vec![0, 1] }).unwrap());
        assert_eq!(
            buchi_accepts_lasso_run(&m, &LassoRun { stem: vec![], cycle: vec![0] }),
            Err(MachineError::NotBuchi)
        );
    }
}
