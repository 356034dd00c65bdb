use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use blindcount::coding::encode_lasso;
use blindcount::construction::{
    build_b, build_canonical_certificate, build_lescape, build_pa, parse_certificate,
};
use blindcount::membership::{
    check_certificate, coded_member, lasso_member, CodedOptions, LassoBounds, RunView,
    UnknownReason, Verdict,
};
use blindcount::wadge::{
    double_empty_sum, play_wadge, CopyH, MachineOracle, Oracle, Outcome, PaOracle, Player2,
    SumLetters, ThreeCase, Truth,
};
use blindcount::{CounterMachine, LassoWord, OmegaWord};
use blindcount_cli::format::FormatErrorKind;
use blindcount_cli::fuzz::{run_fuzz_with_threads, FuzzConfig};
use blindcount_cli::{parse_automaton, serialize_automaton};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "blindcount", version, about = "Blind counter Büchi automata and the block coding of ω-words")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct Lasso {
    /// Spoke `u` of the lasso `u·v^ω`.
    #[arg(long = "u", default_value = "")]
    u: String,
    /// Cycle `v` of the lasso `u·v^ω`.
    #[arg(long = "v")]
    v: String,
}

#[derive(clap::Args, Clone, Copy)]
struct Bounds {
    /// Largest counter value explored.
    #[arg(long, default_value_t = 32)]
    counter_bound: u32,
    /// Longest pumpable segment searched for, in cycle unwindings.
    #[arg(long, default_value_t = 8)]
    cycles: usize,
    /// Node budget.
    #[arg(long, default_value_t = 1_000_000)]
    budget: usize,
}

impl Bounds {
    fn lasso(self) -> LassoBounds {
        LassoBounds {
            counter_bound: self.counter_bound,
            cycle_bound: self.cycles,
            budget: self.budget,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    B,
    Escape,
    Pa,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Copy,
    Threecase,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an automaton file and check the transition rules.
    Validate { file: PathBuf },
    /// Build the simulator, the escape machine or their union.
    Translate {
        file: PathBuf,
        #[arg(long, value_enum)]
        emit: Emit,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Print the first blocks of h(u·v^ω).
    Encode {
        #[command(flatten)]
        lasso: Lasso,
        #[arg(long, default_value_t = 12)]
        blocks: usize,
    },
    /// Decide u·v^ω ∈ L(FILE), or h(u·v^ω) ∈ L(P_FILE) with --coded.
    Member {
        file: PathBuf,
        #[command(flatten)]
        lasso: Lasso,
        #[arg(long)]
        coded: bool,
        #[arg(long, default_value_t = 12)]
        blocks: usize,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Build and check the canonical run certificate, or check a given one.
    Certify {
        file: PathBuf,
        #[command(flatten)]
        lasso: Lasso,
        #[arg(long, default_value_t = 12)]
        blocks: usize,
        /// Certificate file to check instead of building one.
        #[arg(long)]
        check: Option<PathBuf>,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Play a Wadge game with Player 1 committed to a lasso.
    Play {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[command(flatten)]
        lasso: Lasso,
        /// Player 1 commits to h(u·v^ω) instead of u·v^ω (threecase only).
        #[arg(long)]
        coded: bool,
        #[arg(long, default_value_t = 20)]
        horizon: usize,
        #[arg(long, default_value_t = 12)]
        blocks: usize,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Random machines and lassos through every cross-check.
    Fuzz {
        #[arg(long, default_value_t = 3)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        letters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long, default_value_t = 12)]
        blocks: usize,
        #[command(flatten)]
        bounds: Bounds,
    },
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

const ERROR: u8 = 3;

fn read_machine(path: &Path) -> Result<CounterMachine, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    parse_automaton(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn lasso_word(l: &Lasso) -> Result<LassoWord, Failure> {
    Ok(LassoWord::parse(&l.u, &l.v)?)
}

fn verdict_code(v: &Verdict) -> u8 {
    match v {
        Verdict::Accept(_) => 0,
        Verdict::Reject => 1,
        Verdict::Unknown(_) => 2,
    }
}

fn verdict_name(v: &Verdict) -> &'static str {
    match v {
        Verdict::Accept(_) => "accept",
        Verdict::Reject => "reject",
        Verdict::Unknown(UnknownReason::Budget) => "unknown budget",
        Verdict::Unknown(UnknownReason::CounterBound) => "unknown counter-bound",
    }
}

fn truth_name(t: Truth) -> &'static str {
    match t {
        Truth::In => "in",
        Truth::Out => "out",
        Truth::Unknown => "unknown",
    }
}

fn print_lasso_bounds(b: &LassoBounds) {
    println!(
        "bounds counter-bound={} cycles={} budget={}",
        b.counter_bound, b.cycle_bound, b.budget
    );
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn member(file: &Path, lasso: &Lasso, coded: bool, blocks: usize, bounds: Bounds) -> Result<u8, Failure> {
    let m = read_machine(file)?;
    let x = lasso_word(lasso)?;
    let b = bounds.lasso();
    if !coded {
        let v = lasso_member(&m, &x, &b)?;
        println!("verdict {}", verdict_name(&v));
        print_lasso_bounds(&b);
        if let Verdict::Accept(w) = &v {
            println!("witness stem {} cycle {}", join(&w.stem), join(&w.cycle));
        }
        return Ok(verdict_code(&v));
    }
    let pa = build_pa(&m)?;
    let opts = CodedOptions {
        budget: bounds.budget,
        ..CodedOptions::default()
    };
    let report = coded_member(&pa.machine, &x, blocks, &opts)?;
    let view = RunView::new(&pa.b, &report, |s| pa.b_state(s));
    let oracle = PaOracle {
        pa: pa.clone(),
        bounds: b,
        blocks,
        options: opts,
    };
    let truth = oracle.query(&OmegaWord::coded(x.clone()));
    println!("verdict {}", match truth {
        Truth::In => "accept",
        Truth::Out => "reject",
        Truth::Unknown => "unknown",
    });
    println!(
        "bounds blocks={} counter-cap={} visit-cap={} budget={} counter-bound={} cycles={}",
        blocks, report.counter_cap, opts.visit_cap, opts.budget, b.counter_bound, b.cycle_bound
    );
    println!("survivors {}", join(&report.survivor_counts()));
    println!("b-survivors {}", view.survivors());
    if let Some(c) = view.find_f_cycle(&x) {
        println!("f-cycle {} {}", c.i, c.j);
    }
    Ok(match truth {
        Truth::In => 0,
        Truth::Out => 1,
        Truth::Unknown => 2,
    })
}

fn certify(
    file: &Path,
    lasso: &Lasso,
    blocks: usize,
    check: Option<&Path>,
    bounds: Bounds,
) -> Result<u8, Failure> {
    let a = read_machine(file)?;
    let x = lasso_word(lasso)?;
    let bm = build_b(&a)?;
    let cert = match check {
        Some(path) => parse_certificate(&fs::read_to_string(path)?)?,
        None => {
            let v = lasso_member(&a, &x, &bounds.lasso())?;
            let Verdict::Accept(w) = &v else {
                println!("verdict {}", verdict_name(&v));
                print_lasso_bounds(&bounds.lasso());
                println!("no certificate");
                return Ok(verdict_code(&v));
            };
            let cert = build_canonical_certificate(&a, &x, w, blocks)?;
            print!("{cert}");
            cert
        }
    };
    let ok = check_certificate(&bm, &x, &cert)?;
    let witnessed = ok && cert.cycle.is_some();
    println!("check {}", if ok { "ok" } else { "failed" });
    println!("accepting-cycle {}", if witnessed { "verified" } else { "none" });
    Ok(if ok { 0 } else { 1 })
}

#[allow(clippy::too_many_arguments)]
fn play(
    file: &Path,
    mode: Mode,
    lasso: &Lasso,
    coded: bool,
    horizon: usize,
    blocks: usize,
    bounds: Bounds,
) -> Result<u8, Failure> {
    let a = read_machine(file)?;
    let x = lasso_word(lasso)?;
    let pa = PaOracle {
        blocks,
        bounds: bounds.lasso(),
        ..PaOracle::new(build_pa(&a)?)
    };
    let a_oracle = MachineOracle {
        machine: a.clone(),
        bounds: bounds.lasso(),
    };
    let (l1, l2, mut p2, p1): (Box<dyn Oracle>, Box<dyn Oracle>, Box<dyn Player2>, OmegaWord) = match mode {
        Mode::Copy => (Box::new(a_oracle), Box::new(pa), Box::new(CopyH::new()), x.into()),
        Mode::Threecase => {
            let letters = SumLetters::default();
            let target = double_empty_sum(Box::new(a_oracle), letters)?;
            let p1 = if coded { OmegaWord::coded(x) } else { x.into() };
            let strategy = ThreeCase::new(a.alphabet().clone(), letters);
            (Box::new(pa), Box::new(target), Box::new(strategy), p1)
        }
    };
    let result = play_wadge(l1.as_ref(), l2.as_ref(), p2.as_mut(), &p1, horizon)?;
    print!("{}", result.transcript);
    println!("p1 {}", result.p1_word);
    match &result.p2_word {
        Some(w) => println!("p2 {w}"),
        None => println!("p2 uncommitted"),
    }
    println!("p1-truth {}", truth_name(result.p1_truth));
    println!("p2-truth {}", truth_name(result.p2_truth));
    let (name, code) = match result.outcome {
        Outcome::Player2Wins => ("player2", 0),
        Outcome::Player1Wins => ("player1", 1),
        Outcome::Undecided => ("unknown", 2),
    };
    println!("outcome {name}");
    Ok(code)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Validate { file } => {
            let text = fs::read_to_string(&file).map_err(|e| Failure(format!("{}: {e}", file.display())))?;
            match parse_automaton(&text) {
                Ok(m) => {
                    println!(
                        "ok states={} letters={} counters={} transitions={}",
                        m.num_states(),
                        m.alphabet().len(),
                        m.counters(),
                        m.transitions().len()
                    );
                    Ok(0)
                }
                Err(e) if matches!(e.kind, FormatErrorKind::Rule(_)) => {
                    println!("invalid {}: {e}", file.display());
                    Ok(1)
                }
                Err(e) => Err(Failure(format!("{}: {e}", file.display()))),
            }
        }
        Command::Translate { file, emit, out } => {
            let m = read_machine(&file)?;
            let built = match emit {
                Emit::B => build_b(&m)?.machine().clone(),
                Emit::Escape => build_lescape(m.alphabet())?,
                Emit::Pa => build_pa(&m)?.machine,
            };
            fs::write(&out, serialize_automaton(&built))?;
            println!(
                "wrote {} states={} transitions={}",
                out.display(),
                built.num_states(),
                built.transitions().len()
            );
            Ok(0)
        }
        Command::Encode { lasso, blocks } => {
            let x = lasso_word(&lasso)?;
            println!("{}", encode_lasso(&x, blocks));
            Ok(0)
        }
        Command::Member {
            file,
            lasso,
            coded,
            blocks,
            bounds,
        } => member(&file, &lasso, coded, blocks, bounds),
        Command::Certify {
            file,
            lasso,
            blocks,
            check,
            bounds,
        } => certify(&file, &lasso, blocks, check.as_deref(), bounds),
        Command::Play {
            file,
            mode,
            lasso,
            coded,
            horizon,
            blocks,
            bounds,
        } => play(&file, mode, &lasso, coded, horizon, blocks, bounds),
        Command::Fuzz {
            states,
            letters,
            seed,
            trials,
            threads,
            blocks,
            bounds,
        } => {
            let cfg = FuzzConfig {
                states,
                letters,
                seed,
                trials,
                bounds: bounds.lasso(),
                blocks,
            };
            print!("{}", run_fuzz_with_threads(&cfg, threads.max(1)));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(ERROR);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(ERROR)
        }
    }
}
