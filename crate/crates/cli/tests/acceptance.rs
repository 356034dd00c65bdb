//! End-to-end acceptance suite. Each check prints one line and the binary
//! exits nonzero if any of them fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use blindcount::coding::{
    decode_prefix, encode_lasso, in_l, lasso_distance, prefix_distance, CodedPrefix, Distance,
};
use blindcount::construction::{
    build_b, build_canonical_certificate, build_lescape, build_pa, extract_a_run, BMachine,
    CertBlock, RunCertificate,
};
use blindcount::machine::{run_prefixes, DEFAULT_NODE_BUDGET};
use blindcount::membership::{
    brute_force_oracle, check_certificate, check_lasso_witness, coded_member, coded_prefix_member,
    lasso_member, validate_run_prefix, CodedOptions, LassoBounds, RunView, Verdict,
};
use blindcount::wadge::{
    double_empty_sum, play_wadge, CopyH, MachineOracle, Move, Oracle, Outcome, PaOracle, SumLetters,
    ThreeCase, Truth,
};
use blindcount::{CounterMachine, LassoWord, OmegaWord};
use blindcount_cli::fuzz::{run_fuzz_with_threads, FuzzConfig};
use blindcount_cli::gen::{
    random_gamma_lasso, random_lasso, random_machine, random_word, sigma, MachineParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Suite = fn(Instant) -> Check;

struct Check {
    pass: bool,
    detail: String,
}

fn report(results: &mut Vec<bool>, id: usize, name: &str, start: Instant, o: Check) {
    println!(
        "[{id}] {name}: {} ({}; {:.2}s)",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail,
        start.elapsed().as_secs_f64()
    );
    results.push(o.pass);
}

fn within(start: Instant, limit: Duration) -> bool {
    start.elapsed() < limit
}

fn random_a(rng: &mut ChaCha8Rng) -> CounterMachine {
    let states = rng.gen_range(1..=3);
    random_machine(rng, &MachineParams::one_counter(states, 2))
}

fn naive_code(x: &LassoWord, n: usize) -> String {
    let mut s = String::new();
    for i in 1..=n {
        s.push(if i % 2 == 1 { 'A' } else { 'B' });
        s.extend(std::iter::repeat_n('0', i));
        s.push(x.letter_at(i - 1));
    }
    s
}

fn coding_suite(start: Instant) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let sig = sigma(3);
    let letters = sig.letters().to_vec();
    let mut bad_round_trips = 0;
    for _ in 0..1000 {
        let x = random_lasso(&mut rng, &letters, 8);
        let n = rng.gen_range(1..=50);
        let coded = encode_lasso(&x, n);
        let flat: String = coded.flatten().into_iter().collect();
        let ok = flat == naive_code(&x, n)
            && decode_prefix(&coded.flatten(), &sig).is_ok_and(|p| p == coded)
            && coded.payloads() == x.prefix(n)
            && coded.zero_runs() == (1..=n).collect::<Vec<_>>();
        bad_round_trips += usize::from(!ok);
    }
    let mut bad_continuity = 0;
    let mut distinct = 0;
    for _ in 0..1000 {
        let shared = rng.gen_range(0..=12);
        let stem = random_word(&mut rng, &letters, shared);
        let tail = |rng: &mut ChaCha8Rng| {
            let y = random_lasso(rng, &letters, 6);
            let mut u = stem.clone();
            u.extend(y.spoke());
            LassoWord::new(u, y.cycle().to_vec()).expect("nonempty cycle")
        };
        let (x, y) = (tail(&mut rng), tail(&mut rng));
        let Distance::Dyadic(n) = lasso_distance(&x, &y) else {
            continue;
        };
        distinct += 1;
        let hx = encode_lasso(&x, n + 1).flatten();
        let hy = encode_lasso(&y, n + 1).flatten();
        bad_continuity += usize::from(!prefix_distance(&hx, &hy).less_than_pow2_neg(n));
    }
    let fast = within(start, Duration::from_secs(5));
    Check {
        pass: bad_round_trips == 0 && bad_continuity == 0 && distinct > 900 && fast,
        detail: format!(
            "round-trip failures 0/1000 required, got {bad_round_trips}; continuity failures {bad_continuity}/{distinct} distinct pairs; under 5s: {fast}"
        ),
    }
}

fn invariants_suite(start: Instant) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let letters = ['a', 'b'];
    let (mut violations, mut configs, mut survivors, mut truncated) = (0, 0, 0, 0);
    for _ in 0..100 {
        let a = random_a(&mut rng);
        let x = random_lasso(&mut rng, &letters, 5);
        let bm = build_b(&a).expect("one-counter automaton");
        let report = coded_member(bm.machine(), &x, 10, &CodedOptions::default()).expect("blocks > 0");
        truncated += usize::from(report.truncated);
        for n in 1..=report.completed() {
            for node in &report.frontiers[n] {
                let c = &node.config.counters;
                configs += 1;
                let (fill, empty) = if n % 2 == 1 { ((0, 1), (2, 3)) } else { ((2, 3), (0, 1)) };
                let ok = c[empty.0] == 0 && c[empty.1] == 0 && (c[fill.0] + c[fill.1]) as usize == n;
                violations += usize::from(!ok);
            }
        }
        let (paths, complete) = RunView::new(&bm, &report, Some).survivor_paths(100_000);
        violations += usize::from(!complete);
        for p in paths {
            survivors += 1;
            let ok = extract_a_run(&bm, &report.payloads, &p)
                .is_ok_and(|run| run.word == x.prefix(10) && validate_run_prefix(&a, &run));
            violations += usize::from(!ok);
        }
    }
    let fast = within(start, Duration::from_secs(120));
    Check {
        pass: violations == 0 && truncated == 0 && fast,
        detail: format!(
            "{violations} violations over {configs} boundary configurations and {survivors} surviving runs; truncated {truncated}; under 2min: {fast}"
        ),
    }
}

fn find_transition(a: &CounterMachine, from: &blindcount::Configuration, to: &blindcount::Configuration, letter: char) -> Option<usize> {
    a.transitions().iter().position(|t| {
        t.source == from.state
            && t.target == to.state
            && t.letter == letter
            && t.fire(&from.counters).as_deref() == Some(&to.counters[..])
    })
}

/// Whether some run certificate over `horizon` blocks, built from any run
/// prefix of `A` and any aligned cycle claim, passes the checker.
fn any_certificate_verifies(a: &CounterMachine, bm: &BMachine, x: &LassoWord, horizon: usize) -> bool {
    let runs = run_prefixes(a, &x.prefix(horizon), 2 * horizon as u32 + 2, DEFAULT_NODE_BUDGET)
        .expect("word over the alphabet");
    let (u, v) = (x.spoke().len(), x.cycle().len());
    for run in &runs.runs {
        let mut blocks = Vec::with_capacity(horizon);
        for (s, pair) in run.configs.windows(2).enumerate() {
            let t = find_transition(a, &pair[0], &pair[1], run.word[s]).expect("run steps are transitions");
            let uu = pair[0].counters[0] as usize;
            blocks.push(CertBlock {
                u: uu,
                v: (s + 1).saturating_sub(uu),
                transition: t,
                n: a.transitions()[t].effect[0],
                q: pair[1].state,
                mark: a.is_accepting(pair[1].state),
            });
        }
        let mut cert = RunCertificate { blocks, cycle: None };
        if check_certificate(bm, x, &cert) != Ok(true) {
            continue;
        }
        for i in u..horizon {
            for j in (i + v..=horizon).step_by(v) {
                cert.cycle = Some((i, j));
                if check_certificate(bm, x, &cert) == Ok(true) {
                    return true;
                }
            }
        }
    }
    false
}

fn equivalence_suite(_start: Instant) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let letters = ['a', 'b'];
    let bounds = LassoBounds::default();
    let (mut decisive, mut unknown, mut disagree, mut accepted) = (0, 0, 0, 0);
    let mut first_disagreement = String::new();
    while decisive < 200 {
        let a = random_a(&mut rng);
        let x = random_lasso(&mut rng, &letters, 5);
        let v = lasso_member(&a, &x, &bounds).expect("Büchi automaton");
        let Some(inside) = v.as_bool() else {
            unknown += 1;
            continue;
        };
        if inside && accepted == 100 || !inside && decisive - accepted == 100 {
            continue;
        }
        decisive += 1;
        accepted += usize::from(inside);
        let bm = build_b(&a).expect("one-counter automaton");
        let cert_ok = match &v {
            Verdict::Accept(w) => {
                let horizon = 12.max(w.stem.len() + w.cycle.len());
                check_lasso_witness(&a, &x, w)
                    && build_canonical_certificate(&a, &x, w, horizon).is_ok_and(|c| {
                        c.cycle.is_some() && check_certificate(&bm, &x, &c) == Ok(true)
                    })
            }
            _ => any_certificate_verifies(&a, &bm, &x, 12),
        };
        let report = coded_member(bm.machine(), &x, 12, &CodedOptions::default()).expect("blocks > 0");
        let coded_ok = !report.truncated && RunView::new(&bm, &report, Some).find_f_cycle(&x).is_some();
        if inside != cert_ok || inside != coded_ok {
            disagree += 1;
            if first_disagreement.is_empty() {
                first_disagreement = format!(
                    "; first: x={x} lasso={inside} certificate={cert_ok} coded={coded_ok}"
                );
            }
        }
    }
    let rate = unknown as f64 / (decisive + unknown) as f64;
    Check {
        pass: disagree == 0 && rate < 0.2,
        detail: format!(
            "{disagree} disagreements over {decisive} decisive instances ({accepted} accepted); unknown {unknown} ({:.1}%, target < 20%){first_disagreement}",
            100.0 * rate
        ),
    }
}

fn deviation_suite(start: Instant) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let machines: Vec<BMachine> = (0..5)
        .map(|_| build_b(&random_machine(&mut rng, &MachineParams::one_counter(3, 2))).expect("one-counter automaton"))
        .collect();
    let (mut checked, mut exceptions) = (0, 0);
    let mut runs = [1usize; 5];
    loop {
        let i0 = (1..=5).find(|&i| runs[i - 1] != i);
        if let Some(i0) = i0.filter(|&i| (2..=4).contains(&i) && runs[i - 1] > i) {
            let payload: Vec<(usize, char)> = runs
                .iter()
                .map(|&n| (n, if rng.gen_bool(0.5) { 'a' } else { 'b' }))
                .collect();
            let prefix = CodedPrefix::from_runs(&payload);
            for bm in &machines {
                let report = coded_prefix_member(bm.machine(), &prefix, &CodedOptions::default())
                    .expect("letters in the coded alphabet");
                checked += 1;
                let alive = report.survivor_counts().get(i0 - 1).copied().unwrap_or(0);
                exceptions += usize::from(alive != 0);
            }
        }
        let Some(k) = (0..5).find(|&k| runs[k] < 5) else {
            break;
        };
        runs[k] += 1;
        runs[..k].iter_mut().for_each(|r| *r = 1);
    }
    let fast = within(start, Duration::from_secs(60));
    Check {
        pass: exceptions == 0 && checked > 0 && fast,
        detail: format!("{exceptions} exceptions over {checked} (prefix, machine) pairs; under 1min: {fast}"),
    }
}

fn escape_suite(_start: Instant) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let sig = sigma(2);
    let letters = sig.letters().to_vec();
    let bounds = LassoBounds::default();
    let escape = build_lescape(&sig).expect("alphabet avoids A, B and 0");
    let (mut escape_decisive, mut escape_bad) = (0, 0);
    for _ in 0..300 {
        let y = random_gamma_lasso(&mut rng, &letters, 8);
        if let Some(b) = lasso_member(&escape, &y, &bounds).expect("Büchi").as_bool() {
            escape_decisive += 1;
            escape_bad += usize::from(b != in_l(&y));
        }
    }
    let (mut pa_lasso, mut pa_lasso_bad, mut pa_lasso_unknown, mut in_l_samples) = (0, 0, 0, 0);
    let (mut pa_coded, mut pa_coded_bad, mut pa_coded_unknown) = (0, 0, 0);
    for _ in 0..30 {
        let a = random_a(&mut rng);
        let pa = build_pa(&a).expect("one-counter automaton");
        for _ in 0..10 {
            let y = random_gamma_lasso(&mut rng, &letters, 8);
            pa_lasso += 1;
            in_l_samples += usize::from(in_l(&y));
            match lasso_member(&pa.machine, &y, &bounds).expect("Büchi").as_bool() {
                Some(b) => pa_lasso_bad += usize::from(b != in_l(&y)),
                None => pa_lasso_unknown += 1,
            }
        }
        let oracle = PaOracle::new(pa);
        for _ in 0..5 {
            let x = random_lasso(&mut rng, &letters, 5);
            let Some(expected) = lasso_member(&a, &x, &bounds).expect("Büchi").as_bool() else {
                continue;
            };
            pa_coded += 1;
            match oracle.query(&OmegaWord::coded(x)) {
                Truth::Unknown => pa_coded_unknown += 1,
                t => pa_coded_bad += usize::from((t == Truth::In) != expected),
            }
        }
    }
    Check {
        pass: escape_bad == 0 && escape_decisive > 0 && pa_lasso_bad == 0 && pa_coded_bad == 0,
        detail: format!(
            "escape: {escape_bad} disagreements over {escape_decisive}/300 decisive; P_A on Γ-lassos: {pa_lasso_bad} disagreements over {pa_lasso} ({in_l_samples} in 𝓛, {pa_lasso_unknown} unknown); P_A on coded words: {pa_coded_bad} disagreements over {pa_coded} ({pa_coded_unknown} unknown)"
        ),
    }
}

fn oracle_suite(_start: Instant) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut bad = 0;
    for _ in 0..500 {
        let p = MachineParams {
            counters: rng.gen_range(0..=2),
            all_blind: rng.gen_bool(0.5),
            ..MachineParams::one_counter(rng.gen_range(1..=3), 2)
        };
        let m = random_machine(&mut rng, &p);
        let len = rng.gen_range(0..=12);
        let w = random_word(&mut rng, &['a', 'b'], len);
        let runs = run_prefixes(&m, &w, 64, DEFAULT_NODE_BUDGET).expect("word over the alphabet");
        let fast: BTreeSet<_> = runs.runs.iter().map(|r| (r.last().clone(), r.total_visits())).collect();
        let brute = brute_force_oracle(&m, &w).expect("short word");
        bad += usize::from(runs.truncated || runs.bound_hit || fast != brute);
    }
    Check {
        pass: bad == 0,
        detail: format!("{bad} set mismatches over 500 pairs"),
    }
}

fn wadge_suite(start: Instant) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let letters = ['a', 'b'];
    let bounds = LassoBounds::default();
    let horizon = 40;
    let (mut copy_p1, mut copy_unknown, mut copy_errors, mut copy_skips) = (0, 0, 0, 0);
    for _ in 0..100 {
        let a = random_a(&mut rng);
        let x = random_lasso(&mut rng, &letters, 5);
        let l1 = MachineOracle { machine: a.clone(), bounds };
        let l2 = PaOracle::new(build_pa(&a).expect("one-counter automaton"));
        let mut p2 = CopyH::new();
        match play_wadge(&l1, &l2, &mut p2, &OmegaWord::Lasso(x), horizon) {
            Ok(r) => {
                copy_skips += r.transcript.rounds.iter().filter(|(_, m)| *m == Move::Skip).count();
                match r.outcome {
                    Outcome::Player1Wins => copy_p1 += 1,
                    Outcome::Undecided => copy_unknown += 1,
                    Outcome::Player2Wins => {}
                }
            }
            Err(_) => copy_errors += 1,
        }
    }
    let (mut three_p1, mut three_unknown, mut three_errors, mut coded_commits) = (0, 0, 0, 0);
    let sig = sigma(2);
    for i in 0..100 {
        let a = random_a(&mut rng);
        let p1 = if i % 3 == 0 {
            coded_commits += 1;
            OmegaWord::coded(random_lasso(&mut rng, &letters, 5))
        } else {
            OmegaWord::Lasso(random_gamma_lasso(&mut rng, &letters, 8))
        };
        let l1 = PaOracle::new(build_pa(&a).expect("one-counter automaton"));
        let target = double_empty_sum(
            Box::new(MachineOracle { machine: a.clone(), bounds }),
            SumLetters::default(),
        )
        .expect("fresh escape letters");
        let mut p2 = ThreeCase::new(sig.clone(), SumLetters::default());
        match play_wadge(&l1, &target, &mut p2, &p1, horizon) {
            Ok(r) => match r.outcome {
                Outcome::Player1Wins => three_p1 += 1,
                Outcome::Undecided => three_unknown += 1,
                Outcome::Player2Wins => {}
            },
            Err(_) => three_errors += 1,
        }
    }
    let fast = within(start, Duration::from_secs(120));
    Check {
        pass: copy_p1 == 0 && copy_errors == 0 && copy_skips == 0 && three_p1 == 0 && three_errors == 0 && fast,
        detail: format!(
            "copy-h: {copy_p1} Player 1 wins, {copy_unknown}/100 unknown, {copy_errors} errors, {copy_skips} skips; three-case: {three_p1} Player 1 wins, {three_unknown}/100 unknown ({coded_commits} coded commits), {three_errors} errors; under 2min: {fast}"
        ),
    }
}

fn determinism_suite(_start: Instant) -> Check {
    let cfg = FuzzConfig {
        seed: 7,
        trials: 200,
        ..FuzzConfig::default()
    };
    let one = run_fuzz_with_threads(&cfg, 1);
    let again = run_fuzz_with_threads(&cfg, 1);
    let many = run_fuzz_with_threads(&cfg, 4);
    let other_seed = run_fuzz_with_threads(&FuzzConfig { seed: 8, ..cfg }, 1);
    Check {
        pass: one == again && one == many && one != other_seed,
        detail: format!(
            "{} report bytes; repeat identical: {}; 1 vs 4 threads identical: {}",
            one.len(),
            one == again,
            one == many
        ),
    }
}

fn main() {
    let suites: [(&str, Suite); 8] = [
        ("coding round-trip and continuity", coding_suite),
        ("block counter invariants and run extraction", invariants_suite),
        ("lasso, certificate and coded membership agree", equivalence_suite),
        ("early overlong zero runs kill every run", deviation_suite),
        ("escape machine and P_A membership", escape_suite),
        ("run enumeration matches brute force", oracle_suite),
        ("Wadge strategies never lose", wadge_suite),
        ("fuzz report determinism", determinism_suite),
    ];
    let mut results = Vec::new();
    for (i, (name, suite)) in suites.iter().enumerate() {
        let start = Instant::now();
        let outcome = suite(start);
        report(&mut results, i + 1, name, start, outcome);
    }
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
