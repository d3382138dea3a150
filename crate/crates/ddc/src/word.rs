//! Exact arithmetic on reduced words of the free group of rank `n`.
//!
//! A generator `x_i` is the letter `i`, its inverse is `-i`, and elements are
//! reduced words (no adjacent `l, -l` pair). Inversion is negation plus
//! reversal, products cancel at the seam, and the word metric has a
//! longest-common-prefix shortcut. Canonical order everywhere is shortlex
//! with letters ordered `-n < ... < -1 < 1 < ... < n`.

use crate::rng::SplitMix64;
use crate::{Error, Result};
use std::fmt;

/// The ambient free group: its rank and derived alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupCtx {
    rank: u16,
}

impl GroupCtx {
    pub fn new(rank: u16) -> Result<Self> {
        if rank < 1 {
            return Err(Error::RankTooSmall {
                rank,
                needed: "free group rank must be at least 1",
            });
        }
        if rank > i16::MAX as u16 {
            return Err(Error::InvalidLetter {
                value: rank as i64,
                rank: i16::MAX as u16,
            });
        }
        Ok(GroupCtx { rank })
    }

    pub fn rank(&self) -> u16 {
        self.rank
    }

    /// Number of letters, `2n`.
    pub fn alphabet_size(&self) -> u32 {
        2 * self.rank as u32
    }

    /// All letters in canonical order `-n, ..., -1, 1, ..., n`.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        let n = self.rank as i16;
        (0..2 * n).map(move |i| Letter(letter_at(n, i as u32)))
    }

    /// The `i`-th letter in canonical order, `i < 2n`.
    pub fn letter_at(&self, i: u32) -> Letter {
        debug_assert!(i < self.alphabet_size());
        Letter(letter_at(self.rank as i16, i))
    }

    pub fn check_letter(&self, value: i64) -> Result<Letter> {
        if value == 0 || value.unsigned_abs() > self.rank as u64 {
            return Err(Error::InvalidLetter {
                value,
                rank: self.rank,
            });
        }
        Ok(Letter(value as i16))
    }
}

fn letter_at(rank: i16, i: u32) -> i16 {
    let i = i as i16;
    if i < rank {
        i - rank // -n .. -1
    } else {
        i - rank + 1 // 1 .. n
    }
}

/// A single generator or inverse generator: nonzero `value` with
/// `|value| <= rank`; positive `i` is `x_i`, negative `-i` is `x_i^{-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(transparent)]
pub struct Letter(i16);

impl Letter {
    pub fn value(self) -> i16 {
        self.0
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    pub fn cancels(self, other: Letter) -> bool {
        self.0 == -other.0
    }

    /// Position in the canonical order `-n..-1, 1..n`.
    pub fn canonical_index(self, ctx: &GroupCtx) -> u32 {
        let n = ctx.rank as i16;
        if self.0 < 0 {
            (self.0 + n) as u32
        } else {
            (self.0 + n - 1) as u32
        }
    }

    pub(crate) fn from_raw(value: i16) -> Letter {
        debug_assert!(value != 0);
        Letter(value)
    }
}

const FP_MULT: u128 = 0x9E37_79B9_7F4A_7C15_F39C_C060_5CED_C835;

fn fp_code(value: i16) -> u128 {
    (value as i32 + 0x1_0000) as u128
}

/// A reduced word; the identity is the empty word. Words are immutable
/// values, every operation returns a fresh normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Word {
        Word { letters: Vec::new() }
    }

    pub fn single(l: Letter) -> Word {
        Word { letters: vec![l] }
    }

    /// Wraps a letter sequence that is already reduced.
    pub(crate) fn from_reduced(letters: Vec<Letter>) -> Word {
        debug_assert!(is_reduced(&letters));
        Word { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Free reduction of a raw letter sequence; idempotent on reduced input.
    pub fn reduce(raw: &[Letter], ctx: &GroupCtx) -> Result<Word> {
        for l in raw {
            ctx.check_letter(l.value() as i64)?;
        }
        let mut stack: Vec<Letter> = Vec::with_capacity(raw.len());
        for &l in raw {
            if stack.last().is_some_and(|&top| top.cancels(l)) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        Ok(Word { letters: stack })
    }

    /// Reduced product `self * rhs`; cancellation happens only at the seam.
    pub fn mul(&self, rhs: &Word) -> Word {
        let a = &self.letters;
        let b = &rhs.letters;
        let mut c = 0usize;
        while c < a.len() && c < b.len() && a[a.len() - 1 - c].cancels(b[c]) {
            c += 1;
        }
        let mut letters = Vec::with_capacity(a.len() + b.len() - 2 * c);
        letters.extend_from_slice(&a[..a.len() - c]);
        letters.extend_from_slice(&b[c..]);
        Word::from_reduced(letters)
    }

    /// Letters reversed and negated; `w.inv().mul(&w)` is the identity.
    pub fn inv(&self) -> Word {
        let letters = self.letters.iter().rev().map(|l| l.inverse()).collect();
        Word::from_reduced(letters)
    }

    /// Letters in the opposite order, signs unchanged; reduced whenever the
    /// input is.
    pub fn rev(&self) -> Word {
        let letters: Vec<Letter> = self.letters.iter().rev().copied().collect();
        Word::from_reduced(letters)
    }

    /// Word metric `dist(g, h) = |g⁻¹h|`, computed as
    /// `|g| + |h| - 2 lcp(g, h)` without forming the product.
    pub fn dist(&self, other: &Word) -> usize {
        self.len() + other.len() - 2 * self.lcp(other)
    }

    /// Longest common prefix length.
    pub fn lcp(&self, other: &Word) -> usize {
        self.letters
            .iter()
            .zip(other.letters.iter())
            .take_while(|(a, b)| a == b)
            .count()
    }

    /// First `k` letters (a prefix of a reduced word is reduced).
    pub fn prefix(&self, k: usize) -> Word {
        Word::from_reduced(self.letters[..k].to_vec())
    }

    /// Letters from position `k` on.
    pub fn suffix(&self, k: usize) -> Word {
        Word::from_reduced(self.letters[k..].to_vec())
    }

    /// Reduced concatenation of two words whose seam does not cancel.
    pub fn concat_reduced(&self, rhs: &Word) -> Word {
        debug_assert!(
            self.letters.is_empty()
                || rhs.letters.is_empty()
                || !self.letters[self.len() - 1].cancels(rhs.letters[0])
        );
        let mut letters = Vec::with_capacity(self.len() + rhs.len());
        letters.extend_from_slice(&self.letters);
        letters.extend_from_slice(&rhs.letters);
        Word::from_reduced(letters)
    }

    /// 128-bit fingerprint of the letter sequence. Equal words have equal
    /// fingerprints; callers confirm letter-by-letter on a match.
    pub fn fingerprint(&self) -> u128 {
        let mut h: u128 = 1;
        for l in &self.letters {
            h = h.wrapping_mul(FP_MULT).wrapping_add(fp_code(l.0));
        }
        h
    }

    /// Fingerprint of the reduced difference `g⁻¹h` without materializing it.
    pub fn difference_fingerprint(g: &Word, h: &Word) -> u128 {
        let c = g.lcp(h);
        let mut acc: u128 = 1;
        for l in g.letters[c..].iter().rev() {
            acc = acc.wrapping_mul(FP_MULT).wrapping_add(fp_code(-l.0));
        }
        for l in &h.letters[c..] {
            acc = acc.wrapping_mul(FP_MULT).wrapping_add(fp_code(l.0));
        }
        acc
    }

    /// The reduced difference `g⁻¹h` itself.
    pub fn difference(g: &Word, h: &Word) -> Word {
        let c = g.lcp(h);
        let mut letters = Vec::with_capacity(g.len() + h.len() - 2 * c);
        letters.extend(g.letters[c..].iter().rev().map(|l| l.inverse()));
        letters.extend_from_slice(&h.letters[c..]);
        Word::from_reduced(letters)
    }

    /// Uniformly random reduced word of the given length.
    pub fn random_reduced(ctx: &GroupCtx, len: usize, rng: &mut SplitMix64) -> Word {
        let n = ctx.alphabet_size() as u64;
        let mut letters: Vec<Letter> = Vec::with_capacity(len);
        for _ in 0..len {
            let l = match letters.last() {
                None => ctx.letter_at(rng.below(n) as u32),
                Some(&prev) => {
                    let forbidden = prev.inverse().canonical_index(ctx);
                    let mut i = rng.below(n - 1) as u32;
                    if i >= forbidden {
                        i += 1;
                    }
                    ctx.letter_at(i)
                }
            };
            letters.push(l);
        }
        Word::from_reduced(letters)
    }
}

pub fn is_reduced(letters: &[Letter]) -> bool {
    letters.windows(2).all(|w| !w[0].cancels(w[1]))
}

// Shortlex: length first, then letter values (-n < ... < -1 < 1 < ... < n).
impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "e");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", l.value())?;
        }
        Ok(())
    }
}

/// Parses the canonical text form (whitespace-separated signed integers, `e`
/// for the identity) or the compact form for rank `<= 26` (`a` = `x_1`, `A` =
/// `x_1^{-1}`, ...). The parsed sequence is freely reduced.
pub fn parse_word(s: &str, ctx: &GroupCtx) -> Result<Word> {
    let raw = parse_raw_letters(s)?;
    let letters: Vec<Letter> = raw
        .iter()
        .map(|&v| ctx.check_letter(v as i64))
        .collect::<Result<_>>()?;
    Word::reduce(&letters, ctx)
}

/// Letter values of a word line, before any rank validation.
pub fn parse_raw_letters(s: &str) -> Result<Vec<i16>> {
    let s = s.trim();
    if s.is_empty() || s == "e" {
        return Ok(Vec::new());
    }
    if s.chars().all(|c| c.is_ascii_alphabetic()) {
        return s
            .chars()
            .map(|c| {
                if c.is_ascii_lowercase() {
                    Ok(c as i16 - 'a' as i16 + 1)
                } else {
                    Ok(-(c as i16 - 'A' as i16 + 1))
                }
            })
            .collect();
    }
    s.split_whitespace()
        .map(|tok| {
            tok.parse::<i16>()
                .map_err(|_| Error::MalformedWord(format!("bad token {tok:?} in {s:?}")))
        })
        .collect()
}

/// Compact form (`aBa` style); `None` when a letter index exceeds 26.
pub fn compact(w: &Word) -> Option<String> {
    let mut out = String::with_capacity(w.len());
    for l in w.letters() {
        let v = l.value();
        if v.abs() > 26 {
            return None;
        }
        let c = if v > 0 {
            (b'a' + (v - 1) as u8) as char
        } else {
            (b'A' + (-v - 1) as u8) as char
        };
        out.push(c);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(n: u16) -> GroupCtx {
        GroupCtx::new(n).unwrap()
    }

    fn w(ctx: &GroupCtx, vals: &[i16]) -> Word {
        let letters: Vec<Letter> = vals
            .iter()
            .map(|&v| ctx.check_letter(v as i64).unwrap())
            .collect();
        Word::reduce(&letters, ctx).unwrap()
    }

    /// Reduction oracle independent of the stack scan: rescan for an adjacent
    /// cancelling pair and splice until none is left.
    fn reduce_rescan(vals: &[i16]) -> Vec<i16> {
        let mut v = vals.to_vec();
        loop {
            let mut cancelled = false;
            for i in 0..v.len().saturating_sub(1) {
                if v[i] == -v[i + 1] {
                    v.drain(i..=i + 1);
                    cancelled = true;
                    break;
                }
            }
            if !cancelled {
                return v;
            }
        }
    }

    #[test]
    fn reduce_examples() {
        let c = ctx(3);
        assert!(w(&c, &[1, -1]).is_identity());
        assert_eq!(w(&c, &[1, 2, -2, 3]), w(&c, &[1, 3]));
    }

    #[test]
    fn reduce_rejects_invalid_letters() {
        let c = ctx(2);
        assert!(matches!(
            Word::reduce(&[Letter(3)], &c),
            Err(Error::InvalidLetter { .. })
        ));
        assert!(c.check_letter(0).is_err());
    }

    #[test]
    fn reduce_matches_rescan_oracle_and_is_idempotent() {
        let c = ctx(3);
        let mut rng = SplitMix64::new(11);
        for _ in 0..1000 {
            let raw: Vec<i16> = (0..20)
                .map(|_| {
                    let v = (rng.below(6) as i16) - 3;
                    if v >= 0 {
                        v + 1
                    } else {
                        v
                    }
                })
                .collect();
            let letters: Vec<Letter> = raw.iter().map(|&v| Letter(v)).collect();
            let reduced = Word::reduce(&letters, &c).unwrap();
            let oracle = reduce_rescan(&raw);
            let got: Vec<i16> = reduced.letters().iter().map(|l| l.value()).collect();
            assert_eq!(got, oracle);
            let again = Word::reduce(reduced.letters(), &c).unwrap();
            assert_eq!(again, reduced);
        }
    }

    #[test]
    fn mul_examples() {
        let c = ctx(2);
        assert!(w(&c, &[1, 2]).mul(&w(&c, &[-2, -1])).is_identity());
        assert_eq!(w(&c, &[1]).mul(&w(&c, &[2])), w(&c, &[1, 2]));
    }

    #[test]
    fn mul_associativity_against_flatten_oracle() {
        let c = ctx(3);
        let mut rng = SplitMix64::new(5);
        for _ in 0..1000 {
            let u = Word::random_reduced(&c, (rng.below(8)) as usize, &mut rng);
            let v = Word::random_reduced(&c, (rng.below(8)) as usize, &mut rng);
            let t = Word::random_reduced(&c, (rng.below(8)) as usize, &mut rng);
            let left = u.mul(&v).mul(&t);
            let right = u.mul(&v.mul(&t));
            assert_eq!(left, right);
            // flatten-then-reduce oracle
            let mut flat: Vec<Letter> = Vec::new();
            flat.extend_from_slice(u.letters());
            flat.extend_from_slice(v.letters());
            flat.extend_from_slice(t.letters());
            assert_eq!(Word::reduce(&flat, &c).unwrap(), left);
        }
    }

    #[test]
    fn mul_length_parity_and_bound() {
        let c = ctx(2);
        let mut rng = SplitMix64::new(9);
        for _ in 0..1000 {
            let u = Word::random_reduced(&c, (rng.below(10)) as usize, &mut rng);
            let v = Word::random_reduced(&c, (rng.below(10)) as usize, &mut rng);
            let p = u.mul(&v);
            assert!(p.len() <= u.len() + v.len());
            assert_eq!(p.len() % 2, (u.len() + v.len()) % 2);
        }
    }

    #[test]
    fn inv_examples_and_law() {
        let c = ctx(2);
        assert!(Word::identity().inv().is_identity());
        assert_eq!(w(&c, &[1, 2]).inv(), w(&c, &[-2, -1]));
        let mut rng = SplitMix64::new(3);
        for _ in 0..1000 {
            let u = Word::random_reduced(&c, (rng.below(12)) as usize, &mut rng);
            assert!(u.inv().mul(&u).is_identity());
            assert_eq!(u.inv().inv(), u);
        }
    }

    #[test]
    fn rev_examples_and_involution() {
        let c = ctx(2);
        assert_eq!(w(&c, &[1, 2]).rev(), w(&c, &[2, 1]));
        assert!(Word::identity().rev().is_identity());
        let mut rng = SplitMix64::new(17);
        for _ in 0..1000 {
            let u = Word::random_reduced(&c, (rng.below(12)) as usize, &mut rng);
            let r = u.rev();
            assert!(is_reduced(r.letters()));
            assert_eq!(r.rev(), u);
        }
    }

    #[test]
    fn dist_examples_and_cross_check() {
        let c = ctx(2);
        let a = w(&c, &[1]);
        assert_eq!(a.dist(&a), 0);
        assert_eq!(w(&c, &[1]).dist(&w(&c, &[2])), 2);
        let mut rng = SplitMix64::new(23);
        for _ in 0..1000 {
            let g = Word::random_reduced(&c, (rng.below(10)) as usize, &mut rng);
            let h = Word::random_reduced(&c, (rng.below(10)) as usize, &mut rng);
            assert_eq!(g.dist(&h), g.inv().mul(&h).len());
        }
    }

    #[test]
    fn triangle_and_translation_isometry() {
        let c = ctx(3);
        let mut rng = SplitMix64::new(31);
        for _ in 0..1000 {
            let a = Word::random_reduced(&c, (rng.below(8)) as usize, &mut rng);
            let b = Word::random_reduced(&c, (rng.below(8)) as usize, &mut rng);
            let d = Word::random_reduced(&c, (rng.below(8)) as usize, &mut rng);
            assert!(a.dist(&d) <= a.dist(&b) + b.dist(&d));
            let g = Word::random_reduced(&c, (rng.below(8)) as usize, &mut rng);
            assert_eq!(g.mul(&a).dist(&g.mul(&b)), a.dist(&b));
        }
    }

    #[test]
    fn no_elements_of_order_two() {
        let c = ctx(2);
        let mut rng = SplitMix64::new(37);
        for _ in 0..1000 {
            let u = Word::random_reduced(&c, 1 + (rng.below(10)) as usize, &mut rng);
            assert!(!u.mul(&u).is_identity());
        }
    }

    #[test]
    fn shortlex_order() {
        let c = ctx(2);
        let e = Word::identity();
        assert!(e < w(&c, &[-2]));
        assert!(w(&c, &[-2]) < w(&c, &[-1]));
        assert!(w(&c, &[-1]) < w(&c, &[1]));
        assert!(w(&c, &[2]) < w(&c, &[-2, -2]));
    }

    #[test]
    fn fingerprint_agreement() {
        let c = ctx(3);
        let mut rng = SplitMix64::new(41);
        for _ in 0..1000 {
            let g = Word::random_reduced(&c, (rng.below(9)) as usize, &mut rng);
            let h = Word::random_reduced(&c, (rng.below(9)) as usize, &mut rng);
            let d = Word::difference(&g, &h);
            assert_eq!(d, g.inv().mul(&h));
            assert_eq!(Word::difference_fingerprint(&g, &h), d.fingerprint());
            if g != h {
                assert_ne!(g.fingerprint(), h.fingerprint());
            }
        }
    }

    #[test]
    fn parse_and_display() {
        let c = ctx(3);
        assert_eq!(parse_word("1 -2 1", &c).unwrap(), w(&c, &[1, -2, 1]));
        assert_eq!(parse_word("e", &c).unwrap(), Word::identity());
        assert_eq!(parse_word("aBa", &c).unwrap(), w(&c, &[1, -2, 1]));
        assert_eq!(w(&c, &[1, -2, 1]).to_string(), "1 -2 1");
        assert_eq!(Word::identity().to_string(), "e");
        assert_eq!(compact(&w(&c, &[1, -2, 1])).unwrap(), "aBa");
        assert!(parse_word("1 x", &c).is_err());
        assert!(parse_word("4", &c).is_err());
    }

    #[test]
    fn parser_reduces() {
        let c = ctx(2);
        assert_eq!(parse_word("1 -1 2", &c).unwrap(), w(&c, &[2]));
    }
}
