//! Sizes and streaming enumeration of balls `B_r(e)` and spheres `S_r(e)`.
//!
//! `|S_r(e)| = 2n(2n-1)^{r-1}` for `r >= 1`: the first letter has `2n`
//! choices and every later letter avoids only the inverse of its
//! predecessor. Enumeration is a successor function in lexicographic order
//! (letters ordered `-n..-1, 1..n`), so memory stays `O(r)` per iterator.

use crate::word::{GroupCtx, Letter, Word};
use crate::{Limits, Result};
use num_bigint::BigUint;
use num_traits::One;

/// `|S_r(e)|`, exact.
pub fn sphere_size(ctx: &GroupCtx, r: u32) -> BigUint {
    if r == 0 {
        return BigUint::one();
    }
    let q = BigUint::from(ctx.alphabet_size() - 1);
    BigUint::from(ctx.alphabet_size()) * q.pow(r - 1)
}

/// `|B_r(e)| = 1 + sum_{i=1..r} |S_i(e)|`, exact.
pub fn ball_size(ctx: &GroupCtx, r: u32) -> BigUint {
    let mut total = BigUint::one();
    for i in 1..=r {
        total += sphere_size(ctx, i);
    }
    total
}

/// Streaming lexicographic enumeration of the sphere `S_r(e)`.
#[derive(Debug, Clone)]
pub struct SphereIter {
    rank: i16,
    state: Vec<i16>,
    /// Leading positions that never advance (used by the split facility).
    frozen: usize,
    /// The current state has not been yielded yet.
    fresh: bool,
}

impl SphereIter {
    fn new(ctx: &GroupCtx, r: u32) -> SphereIter {
        let rank = ctx.rank() as i16;
        let mut state = Vec::with_capacity(r as usize);
        for i in 0..r as usize {
            let prev = if i == 0 { None } else { Some(state[i - 1]) };
            state.push(min_letter(rank, prev));
        }
        SphereIter {
            rank,
            state,
            frozen: 0,
            fresh: true,
        }
    }

    fn with_first(ctx: &GroupCtx, r: u32, first: Letter) -> SphereIter {
        debug_assert!(r >= 1);
        let mut it = SphereIter::new(ctx, r);
        it.state[0] = first.value();
        for i in 1..r as usize {
            it.state[i] = min_letter(it.rank, Some(it.state[i - 1]));
        }
        it.frozen = 1;
        it
    }

    /// Advances to the lexicographic successor; false when exhausted.
    fn advance(&mut self) -> bool {
        let r = self.state.len();
        if r == self.frozen {
            return false; // single word (r == 0, or fully frozen)
        }
        let mut pos = r;
        while pos > self.frozen {
            pos -= 1;
            let prev = if pos == 0 { None } else { Some(self.state[pos - 1]) };
            if let Some(next) = next_letter(self.rank, self.state[pos], prev) {
                self.state[pos] = next;
                for i in pos + 1..r {
                    self.state[i] = min_letter(self.rank, Some(self.state[i - 1]));
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for SphereIter {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.fresh {
            self.fresh = false;
        } else if !self.advance() {
            return None;
        }
        let letters = self.state.iter().map(|&v| Letter::from_raw(v)).collect();
        Some(Word::from_reduced(letters))
    }
}

/// Smallest letter in canonical order that does not cancel `prev`.
fn min_letter(rank: i16, prev: Option<i16>) -> i16 {
    let first = -rank;
    match prev {
        Some(p) if -p == first => next_in_alphabet(rank, first).unwrap(),
        _ => first,
    }
}

/// Canonical successor of `v` in the alphabet, skipping the inverse of `prev`.
fn next_letter(rank: i16, v: i16, prev: Option<i16>) -> Option<i16> {
    let mut cand = next_in_alphabet(rank, v)?;
    if let Some(p) = prev {
        if cand == -p {
            cand = next_in_alphabet(rank, cand)?;
        }
    }
    Some(cand)
}

fn next_in_alphabet(rank: i16, v: i16) -> Option<i16> {
    let next = if v == -1 { 1 } else { v + 1 };
    (next <= rank).then_some(next)
}

/// Streaming iterator over `S_r(e)` in canonical order.
pub fn iter_sphere(ctx: &GroupCtx, r: u32) -> SphereIter {
    SphereIter::new(ctx, r)
}

/// Streaming iterator over `B_r(e)`: spheres of increasing radius, which is
/// exactly shortlex order.
pub fn iter_ball(ctx: &GroupCtx, r: u32) -> BallIter {
    BallIter {
        ctx: *ctx,
        radius: r,
        current_radius: 0,
        inner: SphereIter::new(ctx, 0),
    }
}

#[derive(Debug, Clone)]
pub struct BallIter {
    ctx: GroupCtx,
    radius: u32,
    current_radius: u32,
    inner: SphereIter,
}

impl Iterator for BallIter {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        loop {
            if let Some(w) = self.inner.next() {
                return Some(w);
            }
            if self.current_radius == self.radius {
                return None;
            }
            self.current_radius += 1;
            self.inner = SphereIter::new(&self.ctx, self.current_radius);
        }
    }
}

/// Partitions `S_r(e)` (r >= 1) into one iterator per first letter, in
/// canonical letter order; concatenating them reproduces `iter_sphere`.
pub fn split_sphere_by_first(ctx: &GroupCtx, r: u32) -> Vec<SphereIter> {
    debug_assert!(r >= 1);
    ctx.letters()
        .map(|l| SphereIter::with_first(ctx, r, l))
        .collect()
}

/// Collects `S_r(e)` after checking the element-count guard.
pub fn materialize_sphere(ctx: &GroupCtx, r: u32, limits: &Limits) -> Result<Vec<Word>> {
    let size = sphere_size(ctx, r);
    limits.check_elements(biguint_to_u128_sat(&size))?;
    Ok(iter_sphere(ctx, r).collect())
}

/// Collects `B_r(e)` after checking the element-count guard.
pub fn materialize_ball(ctx: &GroupCtx, r: u32, limits: &Limits) -> Result<Vec<Word>> {
    let size = ball_size(ctx, r);
    limits.check_elements(biguint_to_u128_sat(&size))?;
    Ok(iter_ball(ctx, r).collect())
}

pub(crate) fn biguint_to_u128_sat(v: &BigUint) -> u128 {
    use num_traits::ToPrimitive;
    v.to_u128().unwrap_or(u128::MAX)
}
