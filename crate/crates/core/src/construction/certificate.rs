use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::{counter_pairs, BMachine};
use crate::coding::Separator;
use crate::machine::{Configuration, CounterMachine, RunPrefix, StateId};
use crate::membership::LassoWitness;
use crate::word::LassoWord;

/// What a certificate claims about block `n` of `h(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CertBlock {
    /// `|u_n|`: zeros of the block that feed the first increasing counter.
    pub u: usize,
    /// `|v_n|`: zeros that feed the second one.
    pub v: usize,
    /// Index of the `A`-transition taken on `x(n)`.
    pub transition: usize,
    /// `N_n`, the counter effect of that transition.
    pub n: i8,
    /// `q_n`.
    pub q: StateId,
    /// `q_n ∈ F`.
    pub mark: bool,
}

/// A block-schema run of `ℬ` on a prefix of `h(x)`.
///
/// `cycle = Some((i, j))` claims that the `A`-run read off blocks `i+1..=j`
/// can be repeated forever and visits `F`, which makes the certificate a
/// witness of `x ∈ L(A)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RunCertificate {
    pub blocks: Vec<CertBlock>,
    pub cycle: Option<(usize, usize)>,
}

impl RunCertificate {
    pub fn horizon(&self) -> usize {
        self.blocks.len()
    }
}

impl fmt::Display for RunCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "horizon {}", self.horizon())?;
        for (i, b) in self.blocks.iter().enumerate() {
            writeln!(
                f,
                "block {} {} {} {} {} {} {}",
                i + 1,
                b.u,
                b.v,
                b.transition,
                b.n,
                b.q,
                u8::from(b.mark)
            )?;
        }
        if let Some((i, j)) = self.cycle {
            writeln!(f, "cycle {i} {j}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertificateError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("the run is not legal at step {0}")]
    InvalidRun(usize),
    #[error("the run's cycle never visits an accepting state")]
    NotAccepting,
    #[error("the run has an empty cycle")]
    EmptyCycle,
    #[error("block {0} names a transition that does not exist")]
    UnknownTransition(usize),
    #[error("cycle claim ({0}, {1}) is outside the horizon")]
    CycleOutOfRange(usize, usize),
}

/// Parses the text produced by the `Display` impl of [`RunCertificate`].
pub fn parse_certificate(text: &str) -> Result<RunCertificate, CertificateError> {
    let mut cert = RunCertificate::default();
    let mut horizon = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let bad = |reason: &str| CertificateError::Malformed {
            line,
            reason: reason.to_string(),
        };
        let fields: Vec<&str> = raw.split('#').next().unwrap_or("").split_whitespace().collect();
        let Some((&head, rest)) = fields.split_first() else {
            continue;
        };
        let nums: Vec<i64> = rest
            .iter()
            .map(|s| s.parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad("expected integers"))?;
        let unsigned = |v: i64| usize::try_from(v).map_err(|_| bad("negative value"));
        match (head, nums.as_slice()) {
            ("horizon", &[h]) => horizon = Some(unsigned(h)?),
            ("block", &[n, u, v, t, eff, q, mark]) => {
                if unsigned(n)? != cert.blocks.len() + 1 {
                    return Err(bad("blocks must be numbered 1, 2, …"));
                }
                if !(-1..=1).contains(&eff) || !(0..=1).contains(&mark) {
                    return Err(bad("effect must be -1, 0 or 1 and mark 0 or 1"));
                }
                cert.blocks.push(CertBlock {
                    u: unsigned(u)?,
                    v: unsigned(v)?,
                    transition: unsigned(t)?,
                    n: eff as i8,
                    q: unsigned(q)?,
                    mark: mark == 1,
                });
            }
            ("cycle", &[a, b]) => cert.cycle = Some((unsigned(a)?, unsigned(b)?)),
            _ => return Err(bad("expected `horizon H`, `block n u v t N q mark` or `cycle i j`")),
        }
    }
    match horizon {
        Some(h) if h == cert.blocks.len() => Ok(cert),
        _ => Err(CertificateError::Malformed {
            line: 0,
            reason: "horizon line missing or not equal to the number of blocks".into(),
        }),
    }
}

/// Transitions of `a` on `letter` from `from` to `to` with effect `n` whose
/// test accepts counter value `u`.
pub(crate) fn matching_transitions(
    a: &CounterMachine,
    from: StateId,
    letter: char,
    u: u32,
    n: i8,
    to: StateId,
) -> impl Iterator<Item = usize> + '_ {
    a.outgoing(from).iter().copied().filter(move |&i| {
        let t = &a.transitions()[i];
        t.letter == letter && t.target == to && t.effect[0] == n && t.guard[0].matches(u)
    })
}

/// The certificate of the run of `ℬ` on `h(x)` that follows the accepting
/// `A`-run `run` for `horizon` blocks.
pub fn build_canonical_certificate(
    a: &CounterMachine,
    x: &LassoWord,
    run: &LassoWitness,
    horizon: usize,
) -> Result<RunCertificate, CertificateError> {
    if run.cycle.is_empty() {
        return Err(CertificateError::EmptyCycle);
    }
    if !run
        .cycle
        .iter()
        .any(|&i| a.transitions().get(i).is_some_and(|t| a.is_accepting(t.target)))
    {
        return Err(CertificateError::NotAccepting);
    }
    let steps = horizon.max(run.stem.len() + run.cycle.len());
    let mut conf = a.initial_configuration();
    let mut blocks = Vec::with_capacity(horizon);
    for step in 0..steps {
        let idx = run.transition_at(step);
        let t = a
            .transitions()
            .get(idx)
            .ok_or(CertificateError::InvalidRun(step))?;
        if t.source != conf.state || t.letter != x.letter_at(step) {
            return Err(CertificateError::InvalidRun(step));
        }
        let counters = t.fire(&conf.counters).ok_or(CertificateError::InvalidRun(step))?;
        if step < horizon {
            let u = conf.counters[0] as usize;
            blocks.push(CertBlock {
                u,
                v: step + 1 - u,
                transition: idx,
                n: t.effect[0],
                q: t.target,
                mark: a.is_accepting(t.target),
            });
        }
        conf = Configuration::new(t.target, counters);
    }
    let (i, j) = (run.stem.len(), run.stem.len() + run.cycle.len());
    Ok(RunCertificate {
        blocks,
        cycle: (j <= horizon).then_some((i, j)),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtractError {
    #[error("{boundaries} block boundaries for {letters} payload letters")]
    LengthMismatch { boundaries: usize, letters: usize },
    #[error("the run is not right after a payload at the end of block {0}")]
    NotAtPayload(usize),
    #[error("block {0}: the first increasing counter does not continue the previous block")]
    CounterMismatch(usize),
    #[error("block {0}: no transition of A matches the recorded step")]
    NoTransition(usize),
}

/// Reads the `A`-run `(q_n, |u_n| + N_n)` off the configurations of a run of
/// `ℬ` at the end of blocks `1..=N` of `h(x)`.
pub fn extract_a_run(
    bm: &BMachine,
    payloads: &[char],
    boundary: &[Configuration],
) -> Result<RunPrefix, ExtractError> {
    if payloads.len() != boundary.len() {
        return Err(ExtractError::LengthMismatch {
            boundaries: boundary.len(),
            letters: payloads.len(),
        });
    }
    let a = bm.source();
    let mut configs = alloc::vec![a.initial_configuration()];
    for (i, (c, &letter)) in boundary.iter().zip(payloads).enumerate() {
        let block = i + 1;
        let (q, n, _) = bm
            .payload_label(c.state)
            .ok_or(ExtractError::NotAtPayload(block))?;
        let (_, inc) = counter_pairs(Separator::for_block(block));
        let u = c.counters[inc.0];
        let prev = configs.last().expect("nonempty");
        if prev.counters[0] != u {
            return Err(ExtractError::CounterMismatch(block));
        }
        if matching_transitions(a, prev.state, letter, u, n, q).next().is_none() {
            return Err(ExtractError::NoTransition(block));
        }
        let next = i64::from(u) + i64::from(n);
        let next = u32::try_from(next).map_err(|_| ExtractError::NoTransition(block))?;
        configs.push(Configuration::new(q, alloc::vec![next]));
    }
    Ok(RunPrefix::from_configs(a, configs, payloads))
}
