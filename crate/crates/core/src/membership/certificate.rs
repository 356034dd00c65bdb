use alloc::collections::BTreeSet;

use super::lasso::pumpable;
use crate::coding::{Separator, ZERO};
use crate::construction::{counter_pairs, BMachine, CertificateError, RunCertificate};
use crate::machine::{Configuration, Test};
use crate::word::LassoWord;

/// Counter effect of the `p`-th zero (1-based) of block `n`, where `k`
/// zeros drain the first decreasing counter and `u` zeros feed the first
/// increasing one.
fn zero_effect(n: usize, p: usize, k: usize, u: usize) -> [i8; 4] {
    let (dec, inc) = counter_pairs(Separator::for_block(n));
    let mut e = [0i8; 4];
    if p <= k {
        e[dec.0] -= 1;
    } else if p < n {
        e[dec.1] -= 1;
    }
    if p <= u {
        e[inc.0] += 1;
    } else {
        e[inc.1] += 1;
    }
    e
}

/// Whether `cert` describes a run of `ℬ` on the first `cert.horizon()`
/// blocks of `h(x)`, and, if it makes a cycle claim, whether the claim holds.
///
/// The schema is expanded letter by letter: every zero must be read by a
/// transition with exactly the effect the schema prescribes, and every
/// payload must land on a state recording the claimed `(q_n, N_n, mark)`.
pub fn check_certificate(
    bm: &BMachine,
    x: &LassoWord,
    cert: &RunCertificate,
) -> Result<bool, CertificateError> {
    let a = bm.source();
    for (i, b) in cert.blocks.iter().enumerate() {
        if b.transition >= a.transitions().len() {
            return Err(CertificateError::UnknownTransition(i + 1));
        }
    }
    if let Some((i, j)) = cert.cycle {
        if i >= j || j > cert.horizon() {
            return Err(CertificateError::CycleOutOfRange(i, j));
        }
    }

    let m = bm.machine();
    let mut q_prev = a.initial();
    let mut u_prev = 0usize;
    let mut confs: BTreeSet<Configuration> = [m.initial_configuration()].into_iter().collect();
    for (idx, b) in cert.blocks.iter().enumerate() {
        let n = idx + 1;
        let letter = x.letter_at(idx);
        let t = &a.transitions()[b.transition];
        let legal_a_step = b.u + b.v == n
            && t.source == q_prev
            && t.letter == letter
            && t.target == b.q
            && t.effect[0] == b.n
            && t.guard[0].matches(b.u as u32)
            && b.mark == a.is_accepting(b.q);
        if !legal_a_step || u_prev >= n {
            return Ok(false);
        }
        let k = if n == 1 { 0 } else { u_prev };
        let sep = Separator::for_block(n).letter();
        let mut letters = alloc::vec![(sep, [0i8; 4])];
        letters.extend((1..=n).map(|p| (ZERO, zero_effect(n, p, k, b.u))));
        for (c, effect) in letters {
            confs = confs
                .iter()
                .flat_map(|conf| m.steps(conf, c))
                .filter(|(ti, _)| m.transitions()[*ti].effect == effect)
                .map(|(_, c)| c)
                .collect();
        }
        confs = confs
            .iter()
            .flat_map(|conf| m.steps(conf, letter))
            .map(|(_, c)| c)
            .filter(|c| bm.payload_label(c.state) == Some((b.q, b.n, b.mark)))
            .collect();
        if confs.is_empty() {
            return Ok(false);
        }
        q_prev = b.q;
        u_prev = b.u;
    }

    let Some((i, j)) = cert.cycle else {
        return Ok(true);
    };
    let after = |blk: usize| -> (usize, i64) {
        if blk == 0 {
            (a.initial(), 0)
        } else {
            let b = &cert.blocks[blk - 1];
            (b.q, b.u as i64 + i64::from(b.n))
        }
    };
    let (qi, ci) = after(i);
    let (qj, cj) = after(j);
    let segment = &cert.blocks[i..j];
    let aligned = i >= x.spoke().len() && (j - i) % x.cycle().len() == 0;
    let zero_tested = segment
        .iter()
        .any(|b| a.transitions()[b.transition].guard[0] == Test::Zero);
    let (Ok(ci), Ok(cj)) = (u32::try_from(ci), u32::try_from(cj)) else {
        return Ok(false);
    };
    Ok(aligned
        && qi == qj
        && segment.iter().any(|b| b.mark)
        && pumpable(&[ci], &[cj], &[zero_tested]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{build_b, build_canonical_certificate};
    use crate::machine::{Alphabet, CounterMachine, MachineBuilder};
    use crate::membership::LassoWitness;

    fn incrementer() -> CounterMachine {
        let mut b = MachineBuilder::new(Alphabet::new(['a']).unwrap(), 1);
        let q = b.state("q0");
        b.t(q, 'a', "Z", "+", q).t(q, 'a', "P", "+", q).accept(q);
        b.build().unwrap()
    }

    #[test]
    fn canonical_certificate_checks_and_tampering_fails() {
        let a = incrementer();
        let bm = build_b(&a).unwrap();
        let x = LassoWord::parse("", "a").unwrap();
        let run = LassoWitness {
            stem: alloc::vec![0],
            cycle: alloc::vec![1],
        };
        let cert = build_canonical_certificate(&a, &x, &run, 6).unwrap();
        assert_eq!(check_certificate(&bm, &x, &cert), Ok(true));
        for n in 0..6 {
            let mut bad = cert.clone();
            bad.blocks[n].u += 1;
            assert_eq!(check_certificate(&bm, &x, &bad), Ok(false), "block {}", n + 1);
        }
        // shifting one zero between the increasing counters breaks the offset
        for n in 1..6 {
            let mut bad = cert.clone();
            bad.blocks[n].u += 1;
            bad.blocks[n].v -= 1;
            assert_eq!(check_certificate(&bm, &x, &bad), Ok(false), "block {}", n + 1);
        }
        let mut bad = cert.clone();
        bad.blocks[2].mark = false;
        assert_eq!(check_certificate(&bm, &x, &bad), Ok(false));
    }

    #[test]
    fn empty_horizon_is_vacuous() {
        let a = incrementer();
        let bm = build_b(&a).unwrap();
        let x = LassoWord::parse("", "a").unwrap();
        assert_eq!(check_certificate(&bm, &x, &RunCertificate::default()), Ok(true));
    }

    #[test]
    fn malformed_claims_are_errors() {
        let a = incrementer();
        let bm = build_b(&a).unwrap();
        let x = LassoWord::parse("", "a").unwrap();
        let cert = RunCertificate {
            blocks: alloc::vec![],
            cycle: Some((0, 1)),
        };
        assert_eq!(check_certificate(&bm, &x, &cert), Err(CertificateError::CycleOutOfRange(0, 1)));
    }
}
