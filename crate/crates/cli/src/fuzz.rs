//! Seeded cross-check driver. Every trial draws from its own ChaCha stream,
//! so the report does not depend on how trials are scheduled.

use std::fmt::Write as _;

use blindcount::coding::{decode_prefix, encode_lasso, in_l};
use blindcount::construction::{build_b, build_lescape};
use blindcount::machine::{run_prefixes, DEFAULT_NODE_BUDGET};
use blindcount::membership::{
    brute_force_lasso, brute_force_oracle, check_lasso_witness, coded_member, lasso_member,
    CodedOptions, LassoBounds, RunView, UnknownReason, Verdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::gen::{random_gamma_lasso, random_lasso, random_machine, random_word, sigma, MachineParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FuzzConfig {
    pub states: usize,
    pub letters: usize,
    pub seed: u64,
    pub trials: usize,
    pub bounds: LassoBounds,
    pub blocks: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            states: 3,
            letters: 2,
            seed: 0,
            trials: 50,
            bounds: LassoBounds::default(),
            blocks: 12,
        }
    }
}

#[derive(Debug, Default)]
struct Trial {
    line: String,
    disagreements: usize,
    /// Undecided lasso, coded and escape checks.
    unknown: [bool; 3],
    /// Whether the coded check ran.
    coded_ran: bool,
}

const BRUTE_BOUND: u32 = 12;
const BRUTE_UNWINDINGS: usize = 10;

fn unknown_label(reason: UnknownReason, b: &LassoBounds) -> String {
    let r = match reason {
        UnknownReason::Budget => "budget",
        UnknownReason::CounterBound => "counter-bound",
    };
    format!("unknown({r};C={},K={},budget={})", b.counter_bound, b.cycle_bound, b.budget)
}

fn verdict_label(v: &Verdict, b: &LassoBounds) -> String {
    match v {
        Verdict::Accept(_) => "accept".into(),
        Verdict::Reject => "reject".into(),
        Verdict::Unknown(r) => unknown_label(*r, b),
    }
}

fn agree(ok: bool, t: &mut Trial) -> &'static str {
    if ok {
        "agree"
    } else {
        t.disagreements += 1;
        "DISAGREE"
    }
}

fn trial(cfg: &FuzzConfig, index: usize) -> Trial {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let sig = sigma(cfg.letters);
    let letters = sig.letters().to_vec();
    let mut t = Trial::default();
    let mut line = format!("trial {index:>4}");

    let params = MachineParams {
        counters: rng.gen_range(0..=2),
        all_blind: rng.gen_bool(0.5),
        ..MachineParams::one_counter(cfg.states, cfg.letters)
    };
    let m = random_machine(&mut rng, &params);
    let len = rng.gen_range(0..=8);
    let w = random_word(&mut rng, &letters, len);
    let runs = run_prefixes(&m, &w, 64, DEFAULT_NODE_BUDGET).expect("word over the alphabet");
    let fast: std::collections::BTreeSet<_> =
        runs.runs.iter().map(|r| (r.last().clone(), r.total_visits())).collect();
    let brute = brute_force_oracle(&m, &w).expect("short word over the alphabet");
    let ok = !runs.truncated && fast == brute;
    let _ = write!(line, " oracle={}", agree(ok, &mut t));

    let x = random_lasso(&mut rng, &letters, 6);
    let n = rng.gen_range(1..=20);
    let ok = decode_prefix(&encode_lasso(&x, n).flatten(), &sig).is_ok_and(|p| {
        p.payloads() == x.prefix(n) && p.zero_runs() == (1..=n).collect::<Vec<_>>()
    });
    let _ = write!(line, " coding={}", if ok { "ok" } else { "FAIL" });
    t.disagreements += usize::from(!ok);

    let a = random_machine(&mut rng, &MachineParams::one_counter(cfg.states, cfg.letters));
    let x = random_lasso(&mut rng, &letters, 5);
    let v = lasso_member(&a, &x, &cfg.bounds).expect("Büchi machine over the alphabet");
    let _ = write!(line, " lasso={}", verdict_label(&v, &cfg.bounds));
    if let Verdict::Accept(wit) = &v {
        let ok = check_lasso_witness(&a, &x, wit);
        let _ = write!(line, " witness={}", if ok { "ok" } else { "FAIL" });
        t.disagreements += usize::from(!ok);
    }
    t.unknown[0] = !v.is_decisive();
    match (v.as_bool(), brute_force_lasso(&a, &x, BRUTE_BOUND, BRUTE_UNWINDINGS)) {
        (Some(l), Some(b)) => {
            let _ = write!(line, " brute={}", agree(l == b, &mut t));
        }
        _ => line.push_str(" brute=skip"),
    }
    if let Some(expected) = v.as_bool() {
        t.coded_ran = true;
        let bm = build_b(&a).expect("one-counter Büchi automaton");
        let opts = CodedOptions::default();
        let witness_len = match &v {
            Verdict::Accept(w) => w.stem.len() + w.cycle.len(),
            _ => 0,
        };
        let blocks = cfg.blocks.max(witness_len);
        let found = |n: usize| -> Option<bool> {
            let report = coded_member(bm.machine(), &x, n, &opts).ok()?;
            (!report.truncated).then(|| RunView::new(&bm, &report, Some).find_f_cycle(&x).is_some())
        };
        match found(cfg.blocks) {
            Some(f) if f == expected => {
                let _ = write!(line, " coded={}", agree(true, &mut t));
            }
            Some(_) if blocks > cfg.blocks => {
                let ok = found(blocks) == Some(expected);
                let _ = write!(line, " coded@{blocks}={}", agree(ok, &mut t));
            }
            Some(_) => {
                let _ = write!(line, " coded={}", agree(false, &mut t));
            }
            None => {
                t.unknown[1] = true;
                let _ = write!(line, " coded=unknown(budget;N={},budget={})", cfg.blocks, opts.budget);
            }
        }
    }

    let y = random_gamma_lasso(&mut rng, &letters, 8);
    let e = build_lescape(&sig).expect("alphabet avoids A, B and 0");
    match lasso_member(&e, &y, &cfg.bounds).expect("Büchi machine over Γ").as_bool() {
        Some(b) => {
            let _ = write!(line, " escape={}", agree(b == in_l(&y), &mut t));
        }
        None => {
            t.unknown[2] = true;
            line.push_str(" escape=unknown");
        }
    }
    t.line = line;
    t
}

fn rate(k: usize, n: usize) -> String {
    if n == 0 {
        return format!("{k}/0");
    }
    format!("{k}/{n} ({:.1}%)", 100.0 * k as f64 / n as f64)
}

/// Runs the trials on the current rayon pool and renders the report.
pub fn run_fuzz(cfg: &FuzzConfig) -> String {
    let trials: Vec<Trial> = (0..cfg.trials).into_par_iter().map(|i| trial(cfg, i)).collect();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "fuzz seed={} trials={} states={} letters={}",
        cfg.seed, cfg.trials, cfg.states, cfg.letters
    );
    let b = &cfg.bounds;
    let _ = writeln!(
        out,
        "bounds counter-bound={} cycles={} blocks={} budget={} brute-bound={} brute-unwindings={}",
        b.counter_bound, b.cycle_bound, cfg.blocks, b.budget, BRUTE_BOUND, BRUTE_UNWINDINGS
    );
    for t in &trials {
        let _ = writeln!(out, "{}", t.line);
    }
    let count = |i: usize| trials.iter().filter(|t| t.unknown[i]).count();
    let coded = trials.iter().filter(|t| t.coded_ran).count();
    let disagreements: usize = trials.iter().map(|t| t.disagreements).sum();
    let _ = writeln!(out, "summary trials={} disagreements={}", cfg.trials, disagreements);
    let _ = writeln!(
        out,
        "unknown lasso={} coded={} escape={}",
        rate(count(0), cfg.trials),
        rate(count(1), coded),
        rate(count(2), cfg.trials)
    );
    out
}

/// [`run_fuzz`] on a dedicated pool of `threads` workers.
pub fn run_fuzz_with_threads(cfg: &FuzzConfig, threads: usize) -> String {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
        .install(|| run_fuzz(cfg))
}
