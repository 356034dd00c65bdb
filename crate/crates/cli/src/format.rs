//! Line-based automaton text format.
//!
//! ```text
//! # one-counter automaton
//! alphabet a b
//! counters 1
//! blind
//! states q0 q1
//! initial q0
//! accept q1
//! t q0 a Z + q1
//! t q1 b P - q0
//! ```
//!
//! `muller {q0 q1} {q1}` replaces `accept` for Muller conditions. With
//! `counters 0` the guard and effect columns hold `_`.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use blindcount::machine::{effect_symbol, parse_effect, parse_guard};
use blindcount::{Acceptance, Alphabet, CounterMachine, Test, Transition};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {kind}")]
pub struct FormatError {
    pub line: usize,
    pub kind: FormatErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatErrorKind {
    #[error("unknown directive {0:?}")]
    UnknownDirective(String),
    #[error("directive {0:?} given twice")]
    Repeated(&'static str),
    #[error("missing {0:?} line")]
    Missing(&'static str),
    #[error("both accept and muller given")]
    MixedAcceptance,
    #[error("expected {0}")]
    Expected(&'static str),
    #[error("letter {0:?} must be a single character other than _, # and braces")]
    BadLetter(String),
    #[error("state name {0:?} contains a brace")]
    BadStateName(String),
    #[error("state {0:?} declared twice")]
    DuplicateState(String),
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("letter {0:?} is not in the alphabet")]
    UnknownLetter(char),
    #[error("bad guard {0:?}: need {1} symbols over Z, P, *")]
    BadGuard(String, usize),
    #[error("bad effect {0:?}: need {1} symbols over +, -, 0")]
    BadEffect(String, usize),
    #[error("blind index {0} out of range")]
    BlindIndex(usize),
    #[error("{0}")]
    Rule(String),
    #[error("{0}")]
    Machine(String),
}

fn unplaceholder(s: &str, k: usize) -> &str {
    if k == 0 && s == PLACEHOLDER {
        ""
    } else {
        s
    }
}

fn err(line: usize, kind: FormatErrorKind) -> FormatError {
    FormatError { line, kind }
}

const PLACEHOLDER: &str = "_";

fn parse_letter(tok: &str, line: usize) -> Result<char, FormatError> {
    let mut it = tok.chars();
    match (it.next(), it.next()) {
        (Some(c), None) if !matches!(c, '_' | '#' | '{' | '}') => Ok(c),
        _ => Err(err(line, FormatErrorKind::BadLetter(tok.to_string()))),
    }
}

struct Header<'a> {
    alphabet: Option<(usize, Vec<char>)>,
    counters: Option<(usize, usize)>,
    blind: Option<(usize, Vec<usize>)>,
    states: Option<(usize, Vec<&'a str>)>,
    initial: Option<(usize, &'a str)>,
    accept: Option<(usize, Vec<&'a str>)>,
    muller: Option<(usize, Vec<Vec<&'a str>>)>,
    transitions: Vec<(usize, Vec<&'a str>)>,
}

fn set_once<T>(slot: &mut Option<T>, value: T, name: &'static str, line: usize) -> Result<(), FormatError> {
    if slot.is_some() {
        return Err(err(line, FormatErrorKind::Repeated(name)));
    }
    *slot = Some(value);
    Ok(())
}

fn parse_muller(rest: &str, line: usize) -> Result<Vec<Vec<&str>>, FormatError> {
    let mut sets = Vec::new();
    let mut s = rest.trim();
    while !s.is_empty() {
        let body = s
            .strip_prefix('{')
            .ok_or_else(|| err(line, FormatErrorKind::Expected("'{' opening a Muller set")))?;
        let close = body
            .find('}')
            .ok_or_else(|| err(line, FormatErrorKind::Expected("'}' closing a Muller set")))?;
        sets.push(body[..close].split_whitespace().collect());
        s = body[close + 1..].trim_start();
    }
    Ok(sets)
}

fn scan(text: &str) -> Result<Header<'_>, FormatError> {
    let mut h = Header {
        alphabet: None,
        counters: None,
        blind: None,
        states: None,
        initial: None,
        accept: None,
        muller: None,
        transitions: Vec::new(),
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut toks = content.split_whitespace();
        let Some(head) = toks.next() else {
            continue;
        };
        let rest: Vec<&str> = toks.collect();
        match head {
            "alphabet" => {
                let letters = rest
                    .iter()
                    .map(|t| parse_letter(t, line))
                    .collect::<Result<Vec<_>, _>>()?;
                set_once(&mut h.alphabet, (line, letters), "alphabet", line)?;
            }
            "counters" => {
                let [k] = rest[..] else {
                    return Err(err(line, FormatErrorKind::Expected("one counter count")));
                };
                let k = k
                    .parse()
                    .map_err(|_| err(line, FormatErrorKind::Expected("a counter count")))?;
                set_once(&mut h.counters, (line, k), "counters", line)?;
            }
            "blind" => {
                let idx = rest
                    .iter()
                    .map(|t| t.parse())
                    .collect::<Result<Vec<usize>, _>>()
                    .map_err(|_| err(line, FormatErrorKind::Expected("counter indices")))?;
                set_once(&mut h.blind, (line, idx), "blind", line)?;
            }
            "states" => set_once(&mut h.states, (line, rest), "states", line)?,
            "initial" => {
                let [q] = rest[..] else {
                    return Err(err(line, FormatErrorKind::Expected("one initial state")));
                };
                set_once(&mut h.initial, (line, q), "initial", line)?;
            }
            "accept" => set_once(&mut h.accept, (line, rest), "accept", line)?,
            "muller" => {
                let after = content.trim_start().strip_prefix("muller").unwrap_or("");
                let sets = parse_muller(after, line)?;
                set_once(&mut h.muller, (line, sets), "muller", line)?;
            }
            "t" => h.transitions.push((line, rest)),
            other => return Err(err(line, FormatErrorKind::UnknownDirective(other.to_string()))),
        }
    }
    Ok(h)
}

/// Parses a machine and checks the transition rules, reporting the line of
/// the first offending transition.
pub fn parse_automaton(text: &str) -> Result<CounterMachine, FormatError> {
    let h = scan(text)?;
    let last = text.lines().count().max(1);
    let (aline, letters) = h.alphabet.ok_or(err(last, FormatErrorKind::Missing("alphabet")))?;
    let alphabet = Alphabet::new(letters).map_err(|e| err(aline, FormatErrorKind::Machine(e.to_string())))?;
    let (_, k) = h.counters.ok_or(err(last, FormatErrorKind::Missing("counters")))?;
    let (sline, names) = h.states.ok_or(err(last, FormatErrorKind::Missing("states")))?;

    let mut blind = vec![false; k];
    if let Some((bline, idx)) = h.blind {
        for i in idx {
            *blind
                .get_mut(i)
                .ok_or(err(bline, FormatErrorKind::BlindIndex(i)))? = true;
        }
    }

    let mut ids: HashMap<&str, usize> = HashMap::new();
    for (i, &n) in names.iter().enumerate() {
        if n.contains(['{', '}']) {
            return Err(err(sline, FormatErrorKind::BadStateName(n.to_string())));
        }
        if ids.insert(n, i).is_some() {
            return Err(err(sline, FormatErrorKind::DuplicateState(n.to_string())));
        }
    }
    let lookup = |name: &str, line: usize| {
        ids.get(name)
            .copied()
            .ok_or_else(|| err(line, FormatErrorKind::UnknownState(name.to_string())))
    };

    let initial = match h.initial {
        Some((line, q)) => lookup(q, line)?,
        None if names.is_empty() => return Err(err(sline, FormatErrorKind::Expected("at least one state"))),
        None => 0,
    };
    let acceptance = match (h.accept, h.muller) {
        (Some(_), Some((line, _))) => return Err(err(line, FormatErrorKind::MixedAcceptance)),
        (Some((line, qs)), None) => Acceptance::Buchi(
            qs.iter().map(|q| lookup(q, line)).collect::<Result<BTreeSet<_>, _>>()?,
        ),
        (None, Some((line, sets))) => Acceptance::Muller(
            sets.iter()
                .map(|s| s.iter().map(|q| lookup(q, line)).collect::<Result<BTreeSet<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?,
        ),
        (None, None) => Acceptance::Buchi(BTreeSet::new()),
    };

    let mut transitions = Vec::with_capacity(h.transitions.len());
    let mut lines = Vec::with_capacity(h.transitions.len());
    for (line, toks) in &h.transitions {
        let line = *line;
        let [src, letter, guard, effect, dst] = toks[..] else {
            return Err(err(line, FormatErrorKind::Expected("t SRC LETTER GUARDS EFFECTS DST")));
        };
        let a = parse_letter(letter, line)?;
        if !alphabet.contains(a) {
            return Err(err(line, FormatErrorKind::UnknownLetter(a)));
        }
        let g = parse_guard(unplaceholder(guard, k))
            .filter(|g| g.len() == k)
            .ok_or_else(|| err(line, FormatErrorKind::BadGuard(guard.to_string(), k)))?;
        let e = parse_effect(unplaceholder(effect, k))
            .filter(|e| e.len() == k)
            .ok_or_else(|| err(line, FormatErrorKind::BadEffect(effect.to_string(), k)))?;
        transitions.push(Transition::new(lookup(src, line)?, a, g, e, lookup(dst, line)?));
        lines.push(line);
    }

    let m = CounterMachine::new(
        names.iter().map(|s| s.to_string()).collect(),
        alphabet,
        blind,
        initial,
        transitions,
        acceptance,
    )
    .map_err(|e| err(sline, FormatErrorKind::Machine(e.to_string())))?;
    if let Some(d) = m.validate().into_iter().next() {
        let line = d.transition.map_or(sline, |t| lines[t]);
        return Err(err(line, FormatErrorKind::Rule(d.to_string())));
    }
    Ok(m)
}

fn column<T: Copy>(items: &[T], sym: impl Fn(T) -> char) -> String {
    if items.is_empty() {
        PLACEHOLDER.to_string()
    } else {
        items.iter().map(|&x| sym(x)).collect()
    }
}

pub fn serialize_automaton(m: &CounterMachine) -> String {
    let mut out = String::new();
    let join = |it: &mut dyn Iterator<Item = String>| it.collect::<Vec<_>>().join(" ");
    let _ = writeln!(out, "alphabet {}", join(&mut m.alphabet().iter().map(String::from)));
    let _ = writeln!(out, "counters {}", m.counters());
    let blind: Vec<String> = (0..m.counters())
        .filter(|&i| m.blind()[i])
        .map(|i| i.to_string())
        .collect();
    if !blind.is_empty() {
        let _ = writeln!(out, "blind {}", blind.join(" "));
    }
    let _ = writeln!(out, "states {}", m.states().join(" "));
    let _ = writeln!(out, "initial {}", m.state_name(m.initial()));
    let names = |set: &BTreeSet<usize>| join(&mut set.iter().map(|&q| m.state_name(q).to_string()));
    match m.acceptance() {
        Acceptance::Buchi(f) => {
            let _ = writeln!(out, "accept {}", names(f));
        }
        Acceptance::Muller(fs) => {
            let sets: Vec<String> = fs.iter().map(|s| format!("{{{}}}", names(s))).collect();
            let _ = writeln!(out, "muller {}", sets.join(" "));
        }
    }
    for t in m.transitions() {
        let _ = writeln!(
            out,
            "t {} {} {} {} {}",
            m.state_name(t.source),
            t.letter,
            column(&t.guard, Test::symbol),
            column(&t.effect, effect_symbol),
            m.state_name(t.target)
        );
    }
    out.lines().map(|l| l.trim_end().to_string() + "\n").collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE_COUNTER: &str = "\
# counts a's
alphabet a b
counters 1
states q0 q1
initial q0
accept q1
t q0 a * + q0
t q0 b P - q1   # leave
t q1 b Z 0 q1
";

    #[test]
    fn parses_and_round_trips() {
        let m = parse_automaton(ONE_COUNTER).unwrap();
        assert_eq!(m.num_states(), 2);
        assert_eq!(m.transitions().len(), 3);
        let text = serialize_automaton(&m);
        assert_eq!(parse_automaton(&text).unwrap(), m);
    }

    #[test]
    fn zero_test_with_decrement_is_a_line_error() {
        let text = ONE_COUNTER.replace("t q1 b Z 0 q1", "t q1 b Z - q1");
        let e = parse_automaton(&text).unwrap_err();
        assert_eq!(e.line, 9);
        assert!(matches!(e.kind, FormatErrorKind::Rule(_)));
        assert!(e.to_string().contains("tested for zero and decremented"));
    }

    #[test]
    fn finite_automaton_uses_placeholders() {
        let text = "alphabet a\ncounters 0\nstates q\naccept q\nt q a _ _ q\n";
        let m = parse_automaton(text).unwrap();
        assert_eq!(m.counters(), 0);
        assert_eq!(serialize_automaton(&m), "alphabet a\ncounters 0\nstates q\ninitial q\naccept q\nt q a _ _ q\n");
    }

    #[test]
    fn muller_sets() {
        let text = "alphabet a\ncounters 0\nstates p q\nmuller {p q} {q}\nt p a _ _ q\nt q a _ _ p\n";
        let m = parse_automaton(text).unwrap();
        assert_eq!(m.acceptance(), &Acceptance::Muller(vec![[0, 1].into(), [1].into()]));
        assert_eq!(parse_automaton(&serialize_automaton(&m)).unwrap(), m);
    }

    #[test]
    fn diagnostics_carry_lines() {
        let cases = [
            ("alphabet a\ncounters 0\nstates q q\n", 3, "declared twice"),
            ("alphabet a\ncounters 0\nstates q\nt q c _ _ q\n", 4, "not in the alphabet"),
            ("alphabet a\ncounters 1\nstates q\nt q a X + q\n", 4, "bad guard"),
            ("alphabet a\ncounters 1\nblind 0\nstates q\nt q a P + q\n", 5, "blind counter"),
            ("alphabet a\ncounters 0\nstates q\nfoo\n", 4, "unknown directive"),
            ("alphabet a\nstates q\n", 2, "missing \"counters\""),
        ];
        for (text, line, msg) in cases {
            let e = parse_automaton(text).unwrap_err();
            assert_eq!(e.line, line, "{text}");
            assert!(e.to_string().contains(msg), "{e}");
        }
    }
}
