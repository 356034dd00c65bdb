//! The block coding `h(x) = A0x(1)B00x(2)A000x(3)…`, its decoder, the shape
//! language of block-formed words, the escape languages `𝓛₁`, `𝓛₂` and the
//! prefix metric.
//!
//! Coded words use the literal letters `'A'`, `'B'` and `'0'`; every other
//! letter is a payload letter.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::machine::Alphabet;
use crate::shape::ShapeAutomaton;
use crate::word::LassoWord;

pub const SEP_A: char = 'A';
pub const SEP_B: char = 'B';
pub const ZERO: char = '0';

pub fn is_structural(c: char) -> bool {
    matches!(c, SEP_A | SEP_B | ZERO)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodingError {
    #[error("payload alphabet uses reserved letter {0:?}")]
    AlphabetClash(char),
    #[error("cannot encode {blocks} blocks from a word of length {len}")]
    TooShort { blocks: usize, len: usize },
}

/// `Γ = Σ ∪ {A, B, 0}`.
pub fn coded_alphabet(sigma: &Alphabet) -> Result<Alphabet, CodingError> {
    if let Some(c) = sigma.iter().find(|&c| is_structural(c)) {
        return Err(CodingError::AlphabetClash(c));
    }
    Ok(sigma.extended([SEP_A, SEP_B, ZERO]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Separator {
    A,
    B,
}

impl Separator {
    /// `A` for odd block indices, `B` for even ones (blocks count from 1).
    pub fn for_block(i: usize) -> Separator {
        if i % 2 == 1 {
            Separator::A
        } else {
            Separator::B
        }
    }

    pub fn letter(self) -> char {
        match self {
            Separator::A => SEP_A,
            Separator::B => SEP_B,
        }
    }

    pub fn other(self) -> Separator {
        match self {
            Separator::A => Separator::B,
            Separator::B => Separator::A,
        }
    }

    pub fn from_letter(c: char) -> Option<Separator> {
        match c {
            SEP_A => Some(Separator::A),
            SEP_B => Some(Separator::B),
            _ => None,
        }
    }
}

/// One block `S 0^zeros payload`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Block {
    pub separator: Separator,
    pub zeros: usize,
    pub payload: char,
}

/// A block whose payload has not been read yet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PartialBlock {
    pub separator: Separator,
    pub zeros: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct CodedPrefix {
    pub blocks: Vec<Block>,
    pub trailing: Option<PartialBlock>,
}

impl CodedPrefix {
    /// A prefix of complete blocks with the given zero runs and payloads,
    /// separators alternating from `A`.
    pub fn from_runs(runs: &[(usize, char)]) -> Self {
        CodedPrefix {
            blocks: runs
                .iter()
                .enumerate()
                .map(|(i, &(zeros, payload))| Block {
                    separator: Separator::for_block(i + 1),
                    zeros,
                    payload,
                })
                .collect(),
            trailing: None,
        }
    }

    pub fn flatten(&self) -> Vec<char> {
        let mut out = Vec::new();
        for b in &self.blocks {
            out.push(b.separator.letter());
            out.extend(core::iter::repeat_n(ZERO, b.zeros));
            out.push(b.payload);
        }
        if let Some(t) = self.trailing {
            out.push(t.separator.letter());
            out.extend(core::iter::repeat_n(ZERO, t.zeros));
        }
        out
    }

    pub fn payloads(&self) -> Vec<char> {
        self.blocks.iter().map(|b| b.payload).collect()
    }

    pub fn zero_runs(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.zeros).collect()
    }
}

impl fmt::Display for CodedPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.flatten().into_iter().collect();
        f.write_str(&s)
    }
}

/// Blocks `1..=n` of `h(x)`.
pub fn encode_prefix(x: &[char], n: usize) -> Result<CodedPrefix, CodingError> {
    if n > x.len() {
        return Err(CodingError::TooShort {
            blocks: n,
            len: x.len(),
        });
    }
    let runs: Vec<(usize, char)> = x[..n].iter().enumerate().map(|(i, &a)| (i + 1, a)).collect();
    Ok(CodedPrefix::from_runs(&runs))
}

/// Blocks `1..=n` of `h(x)` for an ω-word `x`.
pub fn encode_lasso(x: &LassoWord, n: usize) -> CodedPrefix {
    encode_prefix(&x.prefix(n), n).expect("prefix has exactly n letters")
}

/// 0-based position in `h(x)` where block `n` (1-based) starts.
pub fn coded_block_start(n: usize) -> usize {
    let m = n - 1;
    m * (m + 1) / 2 + 2 * m
}

/// Block index (1-based) and offset within that block of position `pos` of `h(x)`.
pub fn coded_position(pos: usize) -> (usize, usize) {
    let mut n = 1;
    let mut start = 0;
    while pos >= start + n + 2 {
        start += n + 2;
        n += 1;
    }
    (n, pos - start)
}

/// Letter at 0-based position `pos` of `h(x)`.
pub fn coded_letter_at(x: &LassoWord, pos: usize) -> char {
    let (n, off) = coded_position(pos);
    if off == 0 {
        Separator::for_block(n).letter()
    } else if off <= n {
        ZERO
    } else {
        x.letter_at(n - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeErrorKind {
    /// The word does not start with `A`.
    MissingInitialA,
    /// A separator is followed directly by a payload or a separator.
    EmptyZeroRun,
    /// A separator follows a zero run that has no payload.
    MissingPayload,
    /// A separator other than the alternating one.
    WrongSeparator,
    /// A payload or `0` where a separator is expected.
    MisplacedLetter(char),
    /// A letter outside `Σ ∪ {A, B, 0}`.
    ForeignLetter(char),
}

/// A decoding failure at `offset`; `parsed` holds the well-shaped prefix
/// before it.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed coded word at offset {offset}: {kind:?}")]
pub struct DecodeError {
    pub offset: usize,
    pub kind: DecodeErrorKind,
    pub parsed: CodedPrefix,
}

/// Parses a finite word into blocks. A final unfinished block is kept in
/// [`CodedPrefix::trailing`].
pub fn decode_prefix(w: &[char], sigma: &Alphabet) -> Result<CodedPrefix, DecodeError> {
    let mut out = CodedPrefix::default();
    let mut expected = Separator::A;
    for (offset, &c) in w.iter().enumerate() {
        let fail = |kind, parsed: &CodedPrefix| {
            Err(DecodeError {
                offset,
                kind,
                parsed: parsed.clone(),
            })
        };
        let is_payload = sigma.contains(c);
        if !is_payload && !is_structural(c) {
            return fail(DecodeErrorKind::ForeignLetter(c), &out);
        }
        match out.trailing {
            None => match Separator::from_letter(c) {
                Some(s) if s == expected => {
                    out.trailing = Some(PartialBlock { separator: s, zeros: 0 })
                }
                Some(_) if out.blocks.is_empty() => return fail(DecodeErrorKind::MissingInitialA, &out),
                Some(_) => return fail(DecodeErrorKind::WrongSeparator, &out),
                None if out.blocks.is_empty() => return fail(DecodeErrorKind::MissingInitialA, &out),
                None => return fail(DecodeErrorKind::MisplacedLetter(c), &out),
            },
            Some(ref mut t) => {
                if c == ZERO {
                    t.zeros += 1;
                } else if t.zeros == 0 {
                    return fail(DecodeErrorKind::EmptyZeroRun, &out);
                } else if is_payload {
                    out.blocks.push(Block {
                        separator: t.separator,
                        zeros: t.zeros,
                        payload: c,
                    });
                    expected = t.separator.other();
                    out.trailing = None;
                } else {
                    return fail(DecodeErrorKind::MissingPayload, &out);
                }
            }
        }
    }
    Ok(out)
}

/// Least block index `i` (1-based) with a zero run of length other than `i`.
pub fn first_deviant_block(p: &CodedPrefix) -> Option<usize> {
    p.blocks
        .iter()
        .enumerate()
        .find(|(i, b)| b.zeros != i + 1)
        .map(|(i, _)| i + 1)
}

/// Whether `w` is a prefix of `h(x)` for some `x ∈ Σ^ω`.
pub fn is_code_prefix(w: &[char], sigma: &Alphabet) -> bool {
    let Ok(p) = decode_prefix(w, sigma) else {
        return false;
    };
    if first_deviant_block(&p).is_some() {
        return false;
    }
    p.trailing.is_none_or(|t| t.zeros <= p.blocks.len() + 1)
}

/// Deterministic Büchi automaton for the block-formed words
/// `A0^{n₁}x(1)B0^{n₂}x(2)A…` with every `nᵢ ≥ 1`; accepting states are the
/// states right after a payload.
pub fn shape_automaton(sigma: &Alphabet) -> Result<ShapeAutomaton, CodingError> {
    let gamma = coded_alphabet(sigma)?;
    let mut s = ShapeAutomaton::new(gamma, "start");
    let start = s.initial();
    let mut after_payload = [start; 2];
    let mut entry = [start; 2];
    for (i, sep) in [Separator::A, Separator::B].into_iter().enumerate() {
        let name = sep.letter();
        let sep_state = s.add_state(alloc::format!("sep{name}"), false);
        let zeros = s.add_state(alloc::format!("zeros{name}"), false);
        let pay = s.add_state(alloc::format!("pay{name}"), true);
        s.set(sep_state, ZERO, zeros);
        s.set(zeros, ZERO, zeros);
        for a in sigma.iter() {
            s.set(zeros, a, pay);
        }
        entry[i] = sep_state;
        after_payload[i] = pay;
    }
    s.set(start, SEP_A, entry[0]);
    s.set(after_payload[0], SEP_B, entry[1]);
    s.set(after_payload[1], SEP_A, entry[0]);
    Ok(s)
}

/// Prefix distance `2^{-n}` where `n` is the common prefix length, or zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Distance {
    Zero,
    /// `2^{-n}`.
    Dyadic(usize),
}

impl Distance {
    /// Strict comparison with `2^{-n}`.
    pub fn less_than_pow2_neg(self, n: usize) -> bool {
        match self {
            Distance::Zero => true,
            Distance::Dyadic(m) => m > n,
        }
    }
}

fn common_prefix_len(u: &[char], v: &[char]) -> usize {
    u.iter().zip(v).take_while(|(a, b)| a == b).count()
}

/// Distance between two finite words.
pub fn prefix_distance(u: &[char], v: &[char]) -> Distance {
    if u == v {
        Distance::Zero
    } else {
        Distance::Dyadic(common_prefix_len(u, v))
    }
}

/// Distance between two lasso words as ω-words.
pub fn lasso_distance(x: &LassoWord, y: &LassoWord) -> Distance {
    let horizon = x.agreement_horizon(y);
    match (0..horizon).find(|&i| x.letter_at(i) != y.letter_at(i)) {
        None => Distance::Zero,
        Some(n) => Distance::Dyadic(n),
    }
}

/// Whether the prefix already forces membership in `𝓛₁`: it cannot be
/// extended to a word starting with a segment of `A·0·Σ·B`.
pub fn l1_witnessed(prefix: &[char]) -> bool {
    prefix.iter().take(4).enumerate().any(|(i, &c)| match i {
        0 => c != SEP_A,
        1 => c != ZERO,
        2 => is_structural(c),
        _ => c != SEP_B,
    })
}

/// Whether the finite word contains a segment `S 0^n a S' 0^m b` with
/// separators `S ≠ S'`, payloads `a`, `b` and `1 ≤ m ≤ n`.
pub fn l2_witnessed(w: &[char]) -> bool {
    l2_witness_end(w).is_some()
}

/// End position (index of `b`) of the first `𝓛₂` segment in `w`.
pub fn l2_witness_end(w: &[char]) -> Option<usize> {
    (0..w.len()).find(|&e| l2_segment_ending_at(w, e))
}

fn l2_segment_ending_at(w: &[char], e: usize) -> bool {
    if is_structural(w[e]) {
        return false;
    }
    let zero_run_before = |end: usize| -> usize {
        w[..end].iter().rev().take_while(|&&c| c == ZERO).count()
    };
    let m = zero_run_before(e);
    if m == 0 || m >= e {
        return false;
    }
    let sep2_at = e - m - 1;
    let Some(sep2) = Separator::from_letter(w[sep2_at]) else {
        return false;
    };
    if sep2_at == 0 || is_structural(w[sep2_at - 1]) {
        return false;
    }
    let a_at = sep2_at - 1;
    let n = zero_run_before(a_at);
    if n < m || n >= a_at {
        return false;
    }
    Separator::from_letter(w[a_at - n - 1]) == Some(sep2.other())
}

/// Prefix witnessing membership in `𝓛 = 𝓛₁ ∪ 𝓛₂`.
pub fn escape_witnessed(prefix: &[char]) -> bool {
    l1_witnessed(prefix) || l2_witnessed(prefix)
}

fn l2_window(x: &LassoWord) -> usize {
    let (u, v) = (x.spoke().len(), x.cycle().len());
    u + v * ((2 * u + 4).div_ceil(v) + 3)
}

pub fn in_l1(x: &LassoWord) -> bool {
    l1_witnessed(&x.prefix(4))
}

/// A witnessing segment spans at most two adjacent blocks, so it appears
/// within a prefix of length `|u| + j·|v| ≥ 3(|u| + |v|) + 4`.
pub fn in_l2(x: &LassoWord) -> bool {
    l2_witnessed(&x.prefix(l2_window(x)))
}

pub fn in_l(x: &LassoWord) -> bool {
    in_l1(x) || in_l2(x)
}

/// Length of the shortest prefix of `x` that witnesses membership in `𝓛`.
pub fn escape_witness_length(x: &LassoWord) -> Option<usize> {
    let w = x.prefix(l2_window(x).max(4));
    let l1 = (1..=4).find(|&n| l1_witnessed(&w[..n]));
    let l2 = l2_witness_end(&w).map(|e| e + 1);
    match (l1, l2) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn s(w: &str) -> Vec<char> {
        w.chars().collect()
    }

    fn sigma() -> Alphabet {
        Alphabet::new(['a', 'b', 'c']).unwrap()
    }

    #[test]
    fn encode_matches_h() {
        let p = encode_prefix(&s("aba"), 3).unwrap();
        assert_eq!(p.to_string(), "A0aB00bA000a");
        assert_eq!(encode_prefix(&s("aba"), 0).unwrap(), CodedPrefix::default());
        let x = LassoWord::parse("", "a").unwrap();
        assert_eq!(encode_lasso(&x, 2).to_string(), "A0aB00a");
        assert_eq!(
            encode_prefix(&s("ab"), 3),
            Err(CodingError::TooShort { blocks: 3, len: 2 })
        );
    }

    #[test]
    fn decode_examples() {
        let p = decode_prefix(&s("A0aB00b"), &sigma()).unwrap();
        assert_eq!(p, CodedPrefix::from_runs(&[(1, 'a'), (2, 'b')]));
        let e = decode_prefix(&s("B0a"), &sigma()).unwrap_err();
        assert_eq!((e.offset, e.kind), (0, DecodeErrorKind::MissingInitialA));
        let p = decode_prefix(&s("A0aB0000c"), &sigma()).unwrap();
        assert_eq!(p.zero_runs(), vec![1, 4]);
        assert_eq!(p.payloads(), vec!['a', 'c']);
    }

    #[test]
    fn decode_error_offsets() {
        let cases = [
            ("AaB", 1, DecodeErrorKind::EmptyZeroRun),
            ("A0aA0b", 3, DecodeErrorKind::WrongSeparator),
            ("A0ab", 3, DecodeErrorKind::MisplacedLetter('b')),
            ("A00B", 3, DecodeErrorKind::MissingPayload),
            ("A0x", 2, DecodeErrorKind::ForeignLetter('x')),
        ];
        for (w, offset, kind) in cases {
            let e = decode_prefix(&s(w), &sigma()).unwrap_err();
            assert_eq!((e.offset, e.kind), (offset, kind), "{w}");
        }
    }

    #[test]
    fn trailing_partial_block() {
        let p = decode_prefix(&s("A0aB00"), &sigma()).unwrap();
        assert_eq!(p.trailing, Some(PartialBlock { separator: Separator::B, zeros: 2 }));
        assert!(is_code_prefix(&s("A0aB00"), &sigma()));
        assert!(!is_code_prefix(&s("A0aB000"), &sigma()));
        assert!(!is_code_prefix(&s("A0aB0b"), &sigma()));
    }

    #[test]
    fn deviant_blocks() {
        let runs = |ns: &[usize]| CodedPrefix::from_runs(&ns.iter().map(|&n| (n, 'a')).collect::<Vec<_>>());
        assert_eq!(first_deviant_block(&runs(&[1, 2, 4])), Some(3));
        assert_eq!(first_deviant_block(&runs(&[1, 2, 3])), None);
        assert_eq!(first_deviant_block(&runs(&[2, 2])), Some(1));
    }

    #[test]
    fn shape_accepts_block_words_only() {
        let r = shape_automaton(&sigma()).unwrap();
        let x = LassoWord::parse("A0aB00b", "A0aB0b").unwrap();
        assert!(r.accepts_lasso(&x));
        assert!(!r.accepts_lasso(&LassoWord::parse("AA0a", "B0a").unwrap()));
        // a run of A-blocks never alternates
        assert!(!r.accepts_lasso(&LassoWord::parse("A0a", "B00bA000aA0a").unwrap()));
        assert!(!r.accepts_lasso(&LassoWord::parse("0", "A0aB0a").unwrap()));
        assert_eq!(
            shape_automaton(&Alphabet::new(['a', 'A']).unwrap()).err(),
            Some(CodingError::AlphabetClash('A'))
        );
    }

    #[test]
    fn distances() {
        assert_eq!(prefix_distance(&s("abc"), &s("abc")), Distance::Zero);
        assert_eq!(prefix_distance(&s("ab"), &s("ac")), Distance::Dyadic(1));
        assert_eq!(prefix_distance(&s("a"), &s("b")), Distance::Dyadic(0));
        let x = LassoWord::parse("a", "b").unwrap();
        let y = LassoWord::parse("ab", "bb").unwrap();
        assert_eq!(lasso_distance(&x, &y), Distance::Zero);
    }

    #[test]
    fn l1_examples() {
        assert!(in_l1(&LassoWord::parse("B", "a").unwrap()));
        assert!(!in_l1(&LassoWord::parse("A0aB", "0a").unwrap()));
        assert!(in_l1(&LassoWord::parse("A00", "a").unwrap()));
        assert!(l1_witnessed(&s("B")));
        assert!(!l1_witnessed(&s("A0")));
    }

    #[test]
    fn l2_examples() {
        assert!(in_l2(&LassoWord::parse("A0aB00bA0c", "c").unwrap()));
        assert!(!in_l2(&LassoWord::parse("A0aB00bA000aB", "0").unwrap()));
        assert!(!in_l2(&LassoWord::parse("", "A00B0").unwrap()));
        // long spoke, short cycle: the segment ends far into the cycle
        let x = LassoWord::parse("B000000a", "A0b").unwrap();
        assert!(in_l2(&x));
        assert_eq!(escape_witness_length(&LassoWord::parse("A0aB00bA0c", "c").unwrap()), Some(10));
    }

    #[test]
    fn leading_zeros_are_not_a_segment() {
        assert!(!l2_witnessed(&['0', '0', 'a']));
        assert!(!in_l2(&LassoWord::parse("00", "a").unwrap()));
    }
}
