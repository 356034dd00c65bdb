use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::graph::{on_cycle, scc};
use super::{MembershipError, UnknownReason, Verdict};
use crate::machine::{
    Acceptance, Configuration, CounterMachine, MachineError, Test, Transition, DEFAULT_NODE_BUDGET,
};
use crate::word::LassoWord;
use crate::FxMap;

/// Bounds for [`lasso_member`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LassoBounds {
    /// Largest counter value kept in the explored graph.
    pub counter_bound: u32,
    /// Longest pumpable segment searched for, in cycle unwindings.
    pub cycle_bound: usize,
    pub budget: usize,
}

impl Default for LassoBounds {
    fn default() -> Self {
        LassoBounds {
            counter_bound: 32,
            cycle_bound: 8,
            budget: DEFAULT_NODE_BUDGET,
        }
    }
}

/// An accepting run on `u·v^ω` as transition indices: `stem` followed by
/// `cycle` repeated forever.
///
/// The stem is at least `|u|` long, the cycle a multiple of `|v|`. Repeating
/// the cycle returns to the same control state with counters that are equal,
/// or larger on counters that the cycle never tests for zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LassoWitness {
    pub stem: Vec<usize>,
    pub cycle: Vec<usize>,
}

impl LassoWitness {
    /// Transition taken at 0-based step `i`.
    pub fn transition_at(&self, i: usize) -> usize {
        if i < self.stem.len() {
            self.stem[i]
        } else {
            self.cycle[(i - self.stem.len()) % self.cycle.len()]
        }
    }
}

/// Counter vectors `y` reached after a segment starting at `x` can be
/// pumped: every counter is unchanged, or grew and was never tested for zero.
pub(crate) fn pumpable(x: &[u32], y: &[u32], zero_tested: &[bool]) -> bool {
    x.iter()
        .zip(y)
        .zip(zero_tested)
        .all(|((&a, &b), &z)| b == a || (b > a && !z))
}

/// Checks a witness by replaying it step by step, including three extra
/// iterations of the cycle.
pub fn check_lasso_witness(m: &CounterMachine, x: &LassoWord, w: &LassoWitness) -> bool {
    let Acceptance::Buchi(f) = m.acceptance() else {
        return false;
    };
    let (u, v) = (x.spoke().len(), x.cycle().len());
    if w.cycle.is_empty() || w.stem.len() < u || !w.cycle.len().is_multiple_of(v) {
        return false;
    }
    let mut state = m.initial();
    let mut counters = vec![0u32; m.counters()];
    let mut start: Option<(usize, Vec<u32>)> = None;
    let mut zero_tested = vec![false; m.counters()];
    let mut visits_f = false;
    let total = w.stem.len() + 4 * w.cycle.len();
    for step in 0..total {
        if step == w.stem.len() {
            start = Some((state, counters.clone()));
        }
        let Some(t) = m.transitions().get(w.transition_at(step)) else {
            return false;
        };
        if t.source != state || t.letter != x.letter_at(step) {
            return false;
        }
        let Some(next) = t.fire(&counters) else {
            return false;
        };
        let in_first_cycle = step >= w.stem.len() && step < w.stem.len() + w.cycle.len();
        if in_first_cycle {
            visits_f |= f.contains(&t.target);
            for (z, g) in zero_tested.iter_mut().zip(&t.guard) {
                *z |= *g == crate::machine::Test::Zero;
            }
        }
        state = t.target;
        counters = next;
        if step + 1 == w.stem.len() + w.cycle.len() {
            let (s0, c0) = start.as_ref().expect("stem precedes cycle");
            if *s0 != state || !pumpable(c0, &counters, &zero_tested) {
                return false;
            }
        }
    }
    visits_f
}

struct Explored {
    /// (position, configuration) per node; node 0 is the initial one.
    nodes: Vec<(usize, Configuration)>,
    /// (target node, transition) per node.
    edges: Vec<Vec<(usize, usize)>>,
    parent: Vec<Option<(usize, usize)>>,
    /// (position, state, stuck counters) entered with a counter above the
    /// bound. A counter is stuck when it is positive and no transition
    /// decrements it.
    overflow: Vec<(usize, usize, u64)>,
    budget_hit: bool,
}

fn explore(m: &CounterMachine, x: &LassoWord, bounds: &LassoBounds) -> Explored {
    let (u, period) = (x.spoke().len(), x.spoke().len() + x.cycle().len());
    let next_pos = |p: usize| if p + 1 < period { p + 1 } else { u };
    let mut index: FxMap<(usize, Configuration), usize> = FxMap::default();
    let root = (0, m.initial_configuration());
    index.insert(root.clone(), 0);
    let mut ex = Explored {
        nodes: vec![root],
        edges: vec![Vec::new()],
        parent: vec![None],
        overflow: Vec::new(),
        budget_hit: false,
    };
    let mut overflow_seen = crate::FxSet::default();
    let never_dec: Vec<bool> = (0..m.counters())
        .map(|c| m.transitions().iter().all(|t| t.effect[c] >= 0))
        .collect();
    let stuck = |counters: &[u32]| -> u64 {
        counters
            .iter()
            .enumerate()
            .filter(|&(c, &v)| c < 64 && v > 0 && never_dec[c])
            .fold(0, |acc, (c, _)| acc | 1 << c)
    };
    let mut head = 0;
    while head < ex.nodes.len() {
        let (p, conf) = ex.nodes[head].clone();
        let q = next_pos(p);
        for (ti, next) in m.steps(&conf, x.letter_at(p)) {
            if next.counters.iter().any(|&c| c > bounds.counter_bound) {
                let key = (q, next.state, stuck(&next.counters));
                if overflow_seen.insert(key) {
                    ex.overflow.push(key);
                }
                continue;
            }
            let key = (q, next);
            let id = match index.get(&key) {
                Some(&id) => id,
                None => {
                    if ex.nodes.len() >= bounds.budget {
                        ex.budget_hit = true;
                        continue;
                    }
                    let id = ex.nodes.len();
                    index.insert(key.clone(), id);
                    ex.nodes.push(key);
                    ex.edges.push(Vec::new());
                    ex.parent.push(Some((head, ti)));
                    id
                }
            };
            ex.edges[head].push((id, ti));
        }
        head += 1;
    }
    ex
}

fn stem_to(ex: &Explored, mut node: usize) -> Vec<usize> {
    let mut stem = Vec::new();
    while let Some((p, t)) = ex.parent[node] {
        stem.push(t);
        node = p;
    }
    stem.reverse();
    stem
}

/// Shortest cycle from `f` back to itself inside its component.
fn cycle_through(ex: &Explored, comp: &[usize], f: usize) -> Option<Vec<usize>> {
    let mut back: FxMap<usize, (usize, usize)> = FxMap::default();
    let mut queue = VecDeque::from([f]);
    while let Some(v) = queue.pop_front() {
        for &(w, t) in &ex.edges[v] {
            if comp[w] != comp[f] {
                continue;
            }
            if w == f {
                let mut cycle = vec![t];
                let mut cur = v;
                while cur != f {
                    let (p, tp) = back[&cur];
                    cycle.push(tp);
                    cur = p;
                }
                cycle.reverse();
                return Some(cycle);
            }
            if let hashbrown::hash_map::Entry::Vacant(e) = back.entry(w) {
                e.insert((v, t));
                queue.push_back(w);
            }
        }
    }
    None
}

const MAX_CYCLE_CANDIDATES: usize = 64;

fn exact_cycle(m: &CounterMachine, ex: &Explored) -> Option<LassoWitness> {
    let adj: Vec<Vec<usize>> = ex.edges.iter().map(|e| e.iter().map(|&(w, _)| w).collect()).collect();
    let comp = scc(&adj);
    let cyclic = on_cycle(&adj, &comp);
    let mut best: Option<LassoWitness> = None;
    let candidates = (0..ex.nodes.len())
        .filter(|&v| cyclic[v] && m.is_accepting(ex.nodes[v].1.state))
        .take(MAX_CYCLE_CANDIDATES);
    for f in candidates {
        let Some(cycle) = cycle_through(ex, &comp, f) else {
            continue;
        };
        let stem = stem_to(ex, f);
        let len = stem.len() + cycle.len();
        if best.as_ref().is_none_or(|b| len < b.stem.len() + b.cycle.len()) {
            best = Some(LassoWitness { stem, cycle });
        }
    }
    best
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct PumpKey {
    pos: usize,
    conf: Configuration,
    marked: bool,
    zero_tested: Vec<bool>,
}

/// Searches for a pumpable accepting segment starting at a node at cycle
/// offset 0. Any such segment can be rotated to start there.
fn pumping_cycle(
    m: &CounterMachine,
    x: &LassoWord,
    ex: &Explored,
    bounds: &LassoBounds,
    work: &mut usize,
) -> Option<LassoWitness> {
    let (u, period) = (x.spoke().len(), x.spoke().len() + x.cycle().len());
    let next_pos = |p: usize| if p + 1 < period { p + 1 } else { u };
    let depth_limit = bounds.cycle_bound * x.cycle().len();
    for (start, (pos, origin)) in ex.nodes.iter().enumerate() {
        if *pos != u {
            continue;
        }
        let first = PumpKey {
            pos: u,
            conf: origin.clone(),
            marked: false,
            zero_tested: vec![false; m.counters()],
        };
        let mut keys = vec![first.clone()];
        let mut back: Vec<Option<(usize, usize)>> = vec![None];
        let mut seen: FxMap<PumpKey, usize> = FxMap::default();
        seen.insert(first, 0);
        let mut layer = vec![0usize];
        for _ in 0..depth_limit {
            let mut next_layer = Vec::new();
            for &k in &layer {
                let key = keys[k].clone();
                for (ti, next) in m.steps(&key.conf, x.letter_at(key.pos)) {
                    let t = &m.transitions()[ti];
                    let mut zero_tested = key.zero_tested.clone();
                    for (z, g) in zero_tested.iter_mut().zip(&t.guard) {
                        *z |= *g == crate::machine::Test::Zero;
                    }
                    let nk = PumpKey {
                        pos: next_pos(key.pos),
                        marked: key.marked || m.is_accepting(next.state),
                        conf: next,
                        zero_tested,
                    };
                    if seen.contains_key(&nk) {
                        continue;
                    }
                    *work += 1;
                    if *work > bounds.budget {
                        return None;
                    }
                    let id = keys.len();
                    seen.insert(nk.clone(), id);
                    back.push(Some((k, ti)));
                    let hit = nk.pos == u
                        && nk.marked
                        && nk.conf.state == origin.state
                        && pumpable(&origin.counters, &nk.conf.counters, &nk.zero_tested);
                    keys.push(nk);
                    if hit {
                        let mut cycle = Vec::new();
                        let mut cur = id;
                        while let Some((p, t)) = back[cur] {
                            cycle.push(t);
                            cur = p;
                        }
                        cycle.reverse();
                        return Some(LassoWitness {
                            stem: stem_to(ex, start),
                            cycle,
                        });
                    }
                    next_layer.push(id);
                }
            }
            layer = next_layer;
            if layer.is_empty() {
                break;
            }
        }
    }
    None
}

/// Whether some (position, state) in `from` can reach an accepting cycle of
/// the control graph that ignores counters, except that zero tests on
/// stuck counters are never taken.
fn skeleton_can_accept(m: &CounterMachine, x: &LassoWord, from: &[(usize, usize, u64)]) -> bool {
    let masks: crate::FxSet<u64> = from.iter().map(|f| f.2).collect();
    masks.into_iter().any(|mask| {
        let starts: Vec<(usize, usize)> =
            from.iter().filter(|f| f.2 == mask).map(|f| (f.0, f.1)).collect();
        skeleton_from(m, x, &starts, mask)
    })
}

fn skeleton_from(m: &CounterMachine, x: &LassoWord, from: &[(usize, usize)], stuck: u64) -> bool {
    let (u, period) = (x.spoke().len(), x.spoke().len() + x.cycle().len());
    let n = m.num_states();
    let id = |p: usize, q: usize| p * n + q;
    let mut adj = vec![Vec::new(); period * n];
    for p in 0..period {
        let np = if p + 1 < period { p + 1 } else { u };
        let a = x.letter_at(p);
        let enabled = |t: &&Transition| {
            t.letter == a
                && !t
                    .guard
                    .iter()
                    .enumerate()
                    .any(|(c, g)| *g == Test::Zero && c < 64 && stuck & 1 << c != 0)
        };
        for t in m.transitions().iter().filter(enabled) {
            adj[id(p, t.source)].push(id(np, t.target));
        }
    }
    let comp = scc(&adj);
    let cyclic = on_cycle(&adj, &comp);
    let good = |v: usize| cyclic[v] && m.is_accepting(v % n);
    let mut seen = vec![false; adj.len()];
    let mut stack: Vec<usize> = from.iter().map(|&(p, q)| id(p, q)).collect();
    while let Some(v) = stack.pop() {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        if good(v) {
            return true;
        }
        stack.extend(adj[v].iter().copied().filter(|&w| !seen[w]));
    }
    false
}

/// Membership of `x` in the Büchi language of `m`.
///
/// Explores the graph of (position in `u·v`, configuration) with counters up
/// to the bound. An accepting cycle there is an accepting run. Otherwise a
/// pumpable accepting segment of at most `cycle_bound` unwindings is
/// searched for. `Reject` is returned only when the bounded graph is
/// complete, or when every run that left it can never again visit an
/// accepting state infinitely often.
pub fn lasso_member(
    m: &CounterMachine,
    x: &LassoWord,
    bounds: &LassoBounds,
) -> Result<Verdict, MembershipError> {
    if !matches!(m.acceptance(), Acceptance::Buchi(_)) {
        return Err(MembershipError::NotBuchi);
    }
    if let Some(a) = x.letters().into_iter().find(|&a| !m.alphabet().contains(a)) {
        return Err(MachineError::UnknownLetter(a).into());
    }
    let ex = explore(m, x, bounds);
    if let Some(w) = exact_cycle(m, &ex) {
        return Ok(Verdict::Accept(w));
    }
    let mut work = ex.nodes.len();
    if !ex.overflow.is_empty() || ex.budget_hit {
        if let Some(w) = pumping_cycle(m, x, &ex, bounds, &mut work) {
            return Ok(Verdict::Accept(w));
        }
    }
    if ex.budget_hit || work > bounds.budget {
        return Ok(Verdict::Unknown(UnknownReason::Budget));
    }
    if skeleton_can_accept(m, x, &ex.overflow) {
        return Ok(Verdict::Unknown(UnknownReason::CounterBound));
    }
    Ok(Verdict::Reject)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{Alphabet, MachineBuilder};

    fn bounds() -> LassoBounds {
        LassoBounds::default()
    }

    fn ab() -> Alphabet {
        Alphabet::new(['a', 'b']).unwrap()
    }

    #[test]
    fn self_loop_accepts() {
        let mut b = MachineBuilder::new(Alphabet::new(['a']).unwrap(), 0);
        let q = b.state("q");
        b.t(q, 'a', "", "", q).accept(q);
        let m = b.build().unwrap();
        let x = LassoWord::parse("", "a").unwrap();
        let Verdict::Accept(w) = lasso_member(&m, &x, &bounds()).unwrap() else {
            panic!("expected accept");
        };
        assert!(check_lasso_witness(&m, &x, &w));
    }

    #[test]
    fn no_accepting_states_rejects() {
        let mut b = MachineBuilder::new(ab(), 1).all_blind();
        let q = b.state("q");
        b.t(q, 'a', "*", "+", q).t(q, 'b', "*", "-", q);
        let m = b.build().unwrap();
        for x in [LassoWord::parse("", "a").unwrap(), LassoWord::parse("ab", "ba").unwrap()] {
            assert_eq!(lasso_member(&m, &x, &bounds()).unwrap(), Verdict::Reject);
        }
    }

    #[test]
    fn growing_blind_counter_is_pumped() {
        let mut b = MachineBuilder::new(ab(), 1).all_blind();
        let q = b.state("q");
        b.t(q, 'a', "*", "+", q).t(q, 'b', "*", "-", q).accept(q);
        let m = b.build().unwrap();
        let x = LassoWord::parse("", "aab").unwrap();
        let Verdict::Accept(w) = lasso_member(&m, &x, &bounds()).unwrap() else {
            panic!("expected accept");
        };
        assert!(check_lasso_witness(&m, &x, &w));
        // more b than a: every run eventually blocks
        let y = LassoWord::parse("", "abb").unwrap();
        assert_eq!(lasso_member(&m, &y, &bounds()).unwrap(), Verdict::Reject);
    }

    #[test]
    fn zero_tested_growth_is_not_pumped() {
        let mut b = MachineBuilder::new(Alphabet::new(['a']).unwrap(), 1);
        let p = b.state("p");
        let q = b.state("q");
        // accepting only while the counter is zero, but it keeps growing
        b.t(p, 'a', "Z", "+", q).t(q, 'a', "P", "+", q).t(q, 'a', "Z", "0", p).accept(p);
        let m = b.build().unwrap();
        let x = LassoWord::parse("", "a").unwrap();
        assert_eq!(lasso_member(&m, &x, &bounds()).unwrap(), Verdict::Reject);
    }

    #[test]
    fn counter_without_decrements_never_returns_to_zero() {
        let mut b = MachineBuilder::new(Alphabet::new(['a']).unwrap(), 1);
        let s = b.state("s");
        let p = b.state("p");
        let q = b.state("q");
        b.t(s, 'a', "*", "+", p).t(p, 'a', "*", "+", p).t(p, 'a', "Z", "0", q);
        b.t(q, 'a', "*", "0", q).accept(q);
        let m = b.build().unwrap();
        let x = LassoWord::parse("", "a").unwrap();
        assert_eq!(lasso_member(&m, &x, &bounds()).unwrap(), Verdict::Reject);
    }

    #[test]
    fn unbounded_zero_test_stays_unknown() {
        let mut b = MachineBuilder::new(ab(), 1);
        let s = b.state("s");
        let p = b.state("p");
        let q = b.state("q");
        // the zero test towards q is never enabled on a^ω, but only counters can tell
        b.t(s, 'a', "*", "+", p).t(p, 'a', "*", "+", p).t(p, 'a', "Z", "0", q);
        b.t(p, 'b', "*", "-", p);
        b.t(q, 'a', "*", "0", q).accept(q);
        let m = b.build().unwrap();
        let x = LassoWord::parse("", "a").unwrap();
        assert_eq!(
            lasso_member(&m, &x, &bounds()).unwrap(),
            Verdict::Unknown(UnknownReason::CounterBound)
        );
    }

    #[test]
    fn tampered_witness_fails() {
        let mut b = MachineBuilder::new(ab(), 1).all_blind();
        let q = b.state("q");
        b.t(q, 'a', "*", "+", q).t(q, 'b', "*", "-", q).accept(q);
        let m = b.build().unwrap();
        let x = LassoWord::parse("", "ab").unwrap();
        let good = LassoWitness { stem: vec![], cycle: vec![0, 1] };
        assert!(check_lasso_witness(&m, &x, &good));
        let bad = LassoWitness { stem: vec![], cycle: vec![1, 0] };
        assert!(!check_lasso_witness(&m, &x, &bad));
        let short = LassoWitness { stem: vec![], cycle: vec![0] };
        assert!(!check_lasso_witness(&m, &x, &short));
    }

    #[test]
    fn muller_is_an_error() {
        let mut b = MachineBuilder::new(ab(), 0);
        let q = b.state("q");
        b.muller_set([q]);
        let m = b.build().unwrap();
        let x = LassoWord::parse("", "a").unwrap();
        assert_eq!(lasso_member(&m, &x, &bounds()), Err(MembershipError::NotBuchi));
    }
}
