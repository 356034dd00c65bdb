use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use super::lasso::pumpable;
use super::MembershipError;
use crate::coding::{encode_lasso, Block, CodedPrefix, Separator, ZERO};
use crate::construction::{counter_pairs, BMachine};
use crate::machine::{Configuration, CounterMachine, MachineError, StateId, Test, DEFAULT_NODE_BUDGET};
use crate::word::LassoWord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodedOptions {
    /// Largest counter value kept; `None` means twice the number of blocks
    /// (or of the longest zero run, if larger).
    pub counter_cap: Option<u32>,
    /// Accepting visits are counted up to this value.
    pub visit_cap: u8,
    /// Largest number of configurations held after any letter.
    pub budget: usize,
}

impl Default for CodedOptions {
    fn default() -> Self {
        CodedOptions {
            counter_cap: None,
            visit_cap: 8,
            budget: DEFAULT_NODE_BUDGET,
        }
    }
}

/// A configuration at a block boundary with its saturated count of accepting
/// visits, and the boundary nodes of the previous block it is reached from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryNode {
    pub config: Configuration,
    pub visits: u8,
    pub parents: Vec<usize>,
}

/// Result of running a machine over the blocks of a coded prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedReport {
    pub payloads: Vec<char>,
    /// `frontiers[0]` holds the initial configuration, `frontiers[n]` the
    /// configurations right after block `n`. Shorter than `payloads.len() + 1`
    /// when the budget ran out.
    pub frontiers: Vec<Vec<BoundaryNode>>,
    pub truncated: bool,
    /// Some run was dropped for exceeding the counter cap.
    pub cap_hit: bool,
    pub counter_cap: u32,
}

impl CodedReport {
    pub fn blocks(&self) -> usize {
        self.payloads.len()
    }

    /// Number of blocks fully processed.
    pub fn completed(&self) -> usize {
        self.frontiers.len() - 1
    }

    /// Survivor count after each completed block `1..`.
    pub fn survivor_counts(&self) -> Vec<usize> {
        self.frontiers[1..].iter().map(Vec::len).collect()
    }

    pub fn max_visits(&self) -> u8 {
        self.frontiers
            .iter()
            .flatten()
            .map(|n| n.visits)
            .max()
            .unwrap_or(0)
    }
}

fn block_letters(b: &Block) -> impl Iterator<Item = char> + '_ {
    core::iter::once(b.separator.letter())
        .chain(core::iter::repeat_n(ZERO, b.zeros))
        .chain(core::iter::once(b.payload))
}

/// Runs `m` over the complete blocks of `p`, merging runs at every block
/// boundary. A trailing partial block is ignored.
pub fn coded_prefix_member(
    m: &CounterMachine,
    p: &CodedPrefix,
    opts: &CodedOptions,
) -> Result<CodedReport, MembershipError> {
    let longest = p.blocks.iter().map(|b| b.zeros).max().unwrap_or(0);
    let cap = opts
        .counter_cap
        .unwrap_or(2 * p.blocks.len().max(longest) as u32);
    for c in p.blocks.iter().flat_map(block_letters) {
        if !m.alphabet().contains(c) {
            return Err(MachineError::UnknownLetter(c).into());
        }
    }
    let init = m.initial_configuration();
    let init_visits = u8::from(m.is_accepting(init.state)).min(opts.visit_cap);
    let mut report = CodedReport {
        payloads: p.payloads(),
        frontiers: vec![vec![BoundaryNode {
            config: init,
            visits: init_visits,
            parents: Vec::new(),
        }]],
        truncated: false,
        cap_hit: false,
        counter_cap: cap,
    };
    'blocks: for b in &p.blocks {
        let last = report.frontiers.last().expect("initial frontier");
        let mut cur: BTreeMap<(Configuration, u8), BTreeSet<usize>> = BTreeMap::new();
        for (i, n) in last.iter().enumerate() {
            cur.entry((n.config.clone(), n.visits)).or_default().insert(i);
        }
        for a in block_letters(b) {
            let mut next: BTreeMap<(Configuration, u8), BTreeSet<usize>> = BTreeMap::new();
            for ((conf, visits), origins) in &cur {
                for (_, c) in m.steps(conf, a) {
                    if c.counters.iter().any(|&v| v > cap) {
                        report.cap_hit = true;
                        continue;
                    }
                    let v = visits
                        .saturating_add(u8::from(m.is_accepting(c.state)))
                        .min(opts.visit_cap);
                    next.entry((c, v)).or_default().extend(origins.iter().copied());
                    if next.len() > opts.budget {
                        report.truncated = true;
                        break 'blocks;
                    }
                }
            }
            cur = next;
        }
        report.frontiers.push(
            cur.into_iter()
                .map(|((config, visits), parents)| BoundaryNode {
                    config,
                    visits,
                    parents: parents.into_iter().collect(),
                })
                .collect(),
        );
    }
    Ok(report)
}

/// [`coded_prefix_member`] on the first `blocks` blocks of `h(x)`.
pub fn coded_member(
    m: &CounterMachine,
    x: &LassoWord,
    blocks: usize,
    opts: &CodedOptions,
) -> Result<CodedReport, MembershipError> {
    if blocks == 0 {
        return Err(MembershipError::NoBlocks);
    }
    coded_prefix_member(m, &encode_lasso(x, blocks), opts)
}

/// An `A`-run read off survivors that contains a repeatable segment through
/// an accepting state: the `A`-configurations after blocks `i` and `j` have
/// the same state, and the segment between them can be pumped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedCycle {
    /// `ℬ`-configurations after blocks `1..=N` of one surviving run.
    pub path: Vec<Configuration>,
    pub i: usize,
    pub j: usize,
}

/// Reads `A`-runs off the boundary nodes of a [`CodedReport`] for a machine
/// that contains `ℬ`. `project` maps states of the explored machine to
/// states of `ℬ` and returns `None` for states outside it.
pub struct RunView<'a, F> {
    bm: &'a BMachine,
    report: &'a CodedReport,
    project: F,
}

#[derive(Clone, Copy)]
struct AStep {
    q: StateId,
    /// Counter of `A` after the step.
    c: u32,
    mark: bool,
}

/// `(block, node, marked, nonzero)` in the cycle search.
type Key = (usize, usize, bool, bool);

impl<'a, F: Fn(StateId) -> Option<StateId>> RunView<'a, F> {
    pub fn new(bm: &'a BMachine, report: &'a CodedReport, project: F) -> Self {
        RunView {
            bm,
            report,
            project,
        }
    }

    fn b_config(&self, c: &Configuration) -> Option<Configuration> {
        (self.project)(c.state).map(|s| Configuration::new(s, c.counters.clone()))
    }

    /// `A`-configuration after block `n`, with the `|u_n|` it was read from.
    fn a_step(&self, block: usize, node: usize) -> Option<(AStep, u32)> {
        if block == 0 {
            let q = self.bm.source().initial();
            return Some((AStep { q, c: 0, mark: false }, 0));
        }
        let conf = &self.report.frontiers[block][node].config;
        let s = (self.project)(conf.state)?;
        let (q, n, mark) = self.bm.payload_label(s)?;
        let (_, inc) = counter_pairs(Separator::for_block(block));
        let u = conf.counters[inc.0];
        let c = u32::try_from(i64::from(u) + i64::from(n)).ok()?;
        Some((AStep { q, c, mark }, u))
    }

    /// Whether the step into `child` (block `n`) continues `parent`'s
    /// `A`-configuration; the flag says whether it can avoid zero tests.
    fn edge(&self, block: usize, parent: usize, child: usize) -> Option<bool> {
        let (p, _) = self.a_step(block - 1, parent)?;
        let (ch, u) = self.a_step(block, child)?;
        if u != p.c {
            return None;
        }
        let (_, n, _) = self
            .bm
            .payload_label((self.project)(self.report.frontiers[block][child].config.state)?)?;
        let a = self.bm.source();
        let letter = self.report.payloads[block - 1];
        let mut found = false;
        let mut nonzero = false;
        for &i in a.outgoing(p.q) {
            let t = &a.transitions()[i];
            if t.letter == letter && t.target == ch.q && t.effect[0] == n && t.guard[0].matches(u) {
                found = true;
                nonzero |= t.guard[0] != Test::Zero;
            }
        }
        found.then_some(nonzero)
    }

    /// Boundary nodes of `ℬ`-states that lie on a run surviving all
    /// completed blocks.
    fn alive(&self) -> Vec<Vec<bool>> {
        let fr = &self.report.frontiers;
        let last = fr.len() - 1;
        let mut alive: Vec<Vec<bool>> = fr.iter().map(|f| vec![false; f.len()]).collect();
        for (i, n) in fr[last].iter().enumerate() {
            alive[last][i] = last == 0 || (self.project)(n.config.state).is_some();
        }
        for block in (1..=last).rev() {
            for (i, n) in fr[block].iter().enumerate() {
                if alive[block][i] {
                    for &p in &n.parents {
                        if block == 1 || (self.project)(fr[block - 1][p].config.state).is_some() {
                            alive[block - 1][p] = true;
                        }
                    }
                }
            }
        }
        alive
    }

    /// Number of `ℬ`-states among the survivors of the last completed block.
    pub fn survivors(&self) -> usize {
        let fr = &self.report.frontiers;
        fr[fr.len() - 1]
            .iter()
            .filter(|n| (self.project)(n.config.state).is_some())
            .count()
    }

    /// Every surviving run of `ℬ` as its configurations after each block,
    /// up to `limit` runs. The flag is false if runs were left out.
    pub fn survivor_paths(&self, limit: usize) -> (Vec<Vec<Configuration>>, bool) {
        let fr = &self.report.frontiers;
        let last = fr.len() - 1;
        let mut out = Vec::new();
        if last == 0 {
            return (out, true);
        }
        let mut stack: Vec<(usize, usize, Vec<Configuration>)> = Vec::new();
        for (i, n) in fr[last].iter().enumerate().rev() {
            if let Some(c) = self.b_config(&n.config) {
                stack.push((last, i, vec![c]));
            }
        }
        while let Some((block, node, path)) = stack.pop() {
            if block == 1 {
                if out.len() == limit {
                    return (out, false);
                }
                let mut p = path;
                p.reverse();
                out.push(p);
                continue;
            }
            for &p in fr[block][node].parents.iter().rev() {
                if let Some(c) = self.b_config(&fr[block - 1][p].config) {
                    let mut ext = path.clone();
                    ext.push(c);
                    stack.push((block - 1, p, ext));
                }
            }
        }
        (out, true)
    }

    /// Looks for a surviving run whose `A`-run contains a pumpable segment
    /// through an accepting state, aligned with the period of `x`.
    pub fn find_f_cycle(&self, x: &LassoWord) -> Option<ExtractedCycle> {
        let fr = &self.report.frontiers;
        let last = fr.len() - 1;
        let alive = self.alive();
        let (u, v) = (x.spoke().len(), x.cycle().len());
        // (block, node, marked, nonzero) ↦ predecessor
        for i in u..last {
            for x_node in 0..fr[i].len() {
                if !alive[i][x_node] {
                    continue;
                }
                let Some((start, _)) = self.a_step(i, x_node) else {
                    continue;
                };
                let mut back: BTreeMap<Key, Option<Key>> = BTreeMap::new();
                let mut layer: Vec<Key> = vec![(i, x_node, false, true)];
                back.insert(layer[0], None);
                for j in i + 1..=last {
                    let mut next: Vec<Key> = Vec::new();
                    for (child, n) in fr[j].iter().enumerate() {
                        if !alive[j][child] {
                            continue;
                        }
                        for &key in &layer {
                            if !n.parents.contains(&key.1) {
                                continue;
                            }
                            let Some(nonzero) = self.edge(j, key.1, child) else {
                                continue;
                            };
                            let (step, _) = self.a_step(j, child).expect("edge checked");
                            let k = (j, child, key.2 || step.mark, key.3 && nonzero);
                            if back.contains_key(&k) {
                                continue;
                            }
                            back.insert(k, Some(key));
                            next.push(k);
                        }
                    }
                    for &k in &next {
                        let (end, _) = self.a_step(j, k.1).expect("edge checked");
                        let zero_tested = [!k.3];
                        if (j - i) % v == 0
                            && k.2
                            && end.q == start.q
                            && pumpable(&[start.c], &[end.c], &zero_tested)
                        {
                            return Some(self.assemble(&back, k, i, x_node, &alive));
                        }
                    }
                    layer = next;
                }
            }
        }
        None
    }

    fn assemble(
        &self,
        back: &BTreeMap<Key, Option<Key>>,
        end: Key,
        i: usize,
        x_node: usize,
        alive: &[Vec<bool>],
    ) -> ExtractedCycle {
        let fr = &self.report.frontiers;
        let mut nodes: Vec<(usize, usize)> = Vec::new();
        let mut cur = Some(end);
        while let Some(k) = cur {
            nodes.push((k.0, k.1));
            cur = back[&k];
        }
        nodes.pop();
        nodes.reverse();
        let mut prefix = Vec::new();
        let mut node = x_node;
        for block in (1..=i).rev() {
            prefix.push((block, node));
            node = fr[block][node]
                .parents
                .iter()
                .copied()
                .find(|&p| alive[block - 1][p])
                .expect("alive nodes have alive parents");
        }
        prefix.reverse();
        prefix.extend(nodes);
        let (mut block, mut node) = (end.0, end.1);
        let last = fr.len() - 1;
        while block < last {
            let child = (0..fr[block + 1].len())
                .find(|&c| alive[block + 1][c] && fr[block + 1][c].parents.contains(&node))
                .expect("alive nodes have alive children");
            block += 1;
            node = child;
            prefix.push((block, node));
        }
        let path = prefix
            .into_iter()
            .map(|(b, n)| self.b_config(&fr[b][n].config).expect("alive nodes are in ℬ"))
            .collect();
        ExtractedCycle { path, i, j: end.0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{build_b, extract_a_run};
    use crate::machine::{Alphabet, MachineBuilder};

    fn all_accepting() -> CounterMachine {
        let mut b = MachineBuilder::new(Alphabet::new(['a', 'b']).unwrap(), 1);
        let q = b.state("q0");
        for a in ['a', 'b'] {
            b.t(q, a, "Z", "0", q).t(q, a, "P", "0", q);
        }
        b.accept(q);
        b.build().unwrap()
    }

    #[test]
    fn trivial_automaton_survives_and_accumulates_visits() {
        let bm = build_b(&all_accepting()).unwrap();
        let x = LassoWord::parse("", "a").unwrap();
        let r = coded_member(bm.machine(), &x, 10, &CodedOptions::default()).unwrap();
        assert_eq!(r.completed(), 10);
        assert!(r.survivor_counts().iter().all(|&s| s >= 1));
        assert!(r.max_visits() >= 3);
        let view = RunView::new(&bm, &r, Some);
        assert!(view.find_f_cycle(&x).is_some());
        let (paths, complete) = view.survivor_paths(100);
        assert!(complete && !paths.is_empty());
        for p in paths {
            let run = extract_a_run(&bm, &r.payloads, &p).unwrap();
            assert!(run.configs.iter().all(|c| c.counters == [0]));
        }
    }

    #[test]
    fn one_block_forces_empty_u() {
        let bm = build_b(&all_accepting()).unwrap();
        let x = LassoWord::parse("b", "a").unwrap();
        let r = coded_member(bm.machine(), &x, 1, &CodedOptions::default()).unwrap();
        assert!(!r.frontiers[1].is_empty());
        for n in &r.frontiers[1] {
            assert_eq!(n.config.counters, [0, 1, 0, 0]);
        }
    }

    #[test]
    fn deviant_third_block_blocks() {
        let bm = build_b(&all_accepting()).unwrap();
        let p = CodedPrefix::from_runs(&[(1, 'a'), (2, 'a'), (4, 'a')]);
        let r = coded_prefix_member(bm.machine(), &p, &CodedOptions::default()).unwrap();
        assert_eq!(r.survivor_counts(), [1, 1, 0]);
    }

    #[test]
    fn zero_blocks_is_an_error() {
        let bm = build_b(&all_accepting()).unwrap();
        let x = LassoWord::parse("", "a").unwrap();
        assert_eq!(
            coded_member(bm.machine(), &x, 0, &CodedOptions::default()),
            Err(MembershipError::NoBlocks)
        );
    }
}
