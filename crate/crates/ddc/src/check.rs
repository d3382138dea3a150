//! DDC verification: repeated-difference detection, diameters, recentering,
//! and the sphere-local prefix condition.
//!
//! Duplicate detection hashes the 128-bit fingerprint of every ordered
//! difference and confirms candidate collisions letter-by-letter, so a run
//! over ~10⁷ pairs never stores the difference words themselves and never
//! reports a false positive.

use crate::word::{GroupCtx, Word};
use crate::{Error, Limits, Result};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::OnceLock;

/// A finite, deduplicated set of reduced words, kept in canonical (shortlex)
/// order.
#[derive(Debug, Clone)]
pub struct DdcSet {
    ctx: GroupCtx,
    elements: Vec<Word>,
    diameter_cache: OnceLock<usize>,
}

impl PartialEq for DdcSet {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.elements == other.elements
    }
}

impl Eq for DdcSet {}

/// Witness of a repeated difference: every ordered pair `(g, h)` of the set
/// with `g⁻¹h` equal to `difference`. Only reported when at least two pairs
/// share it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollisionClass {
    pub difference: Word,
    pub pairs: Vec<(Word, Word)>,
}

impl DdcSet {
    pub fn new(ctx: GroupCtx, words: Vec<Word>) -> Result<DdcSet> {
        for w in &words {
            for l in w.letters() {
                ctx.check_letter(l.value() as i64)?;
            }
        }
        Ok(Self::from_words_unchecked(ctx, words))
    }

    /// Skips per-letter validation; words must already belong to `ctx`.
    pub(crate) fn from_words_unchecked(ctx: GroupCtx, mut words: Vec<Word>) -> DdcSet {
        words.sort_unstable();
        words.dedup();
        DdcSet {
            ctx,
            elements: words,
            diameter_cache: OnceLock::new(),
        }
    }

    pub fn ctx(&self) -> &GroupCtx {
        &self.ctx
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements in canonical order.
    pub fn elements(&self) -> &[Word] {
        &self.elements
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.elements.binary_search(w).is_ok()
    }

    /// Left translate `g·D`.
    pub fn translate(&self, g: &Word) -> DdcSet {
        let words = self.elements.iter().map(|x| g.mul(x)).collect();
        DdcSet::from_words_unchecked(self.ctx, words)
    }

    /// Elementwise inverse `D⁻¹ = {g⁻¹ : g ∈ D}`.
    pub fn inv_set(&self) -> DdcSet {
        let words = self.elements.iter().map(|x| x.inv()).collect();
        DdcSet::from_words_unchecked(self.ctx, words)
    }

    /// Shell decomposition `D ∩ S_j(e)`, keyed by `j`.
    pub fn shells(&self) -> BTreeMap<usize, Vec<Word>> {
        let mut shells: BTreeMap<usize, Vec<Word>> = BTreeMap::new();
        for w in &self.elements {
            shells.entry(w.len()).or_default().push(w.clone());
        }
        shells
    }

    /// True iff all `m(m-1)` ordered differences are pairwise distinct.
    pub fn is_ddc(&self, limits: &Limits) -> Result<bool> {
        let m = self.elements.len();
        if m < 2 {
            return Ok(true);
        }
        limits.check_pairs(m as u128 * (m as u128 - 1))?;
        let mut fps = collect_difference_fps(&self.elements, limits.threads);
        fps.sort_unstable();
        let mut run_start = 0;
        while run_start < fps.len() {
            let mut run_end = run_start + 1;
            while run_end < fps.len() && fps[run_end].0 == fps[run_start].0 {
                run_end += 1;
            }
            if run_end - run_start > 1 {
                // fingerprint match: confirm letter-by-letter
                let mut diffs: Vec<Word> = fps[run_start..run_end]
                    .iter()
                    .map(|&(_, i, j)| {
                        Word::difference(&self.elements[i as usize], &self.elements[j as usize])
                    })
                    .collect();
                diffs.sort_unstable();
                if diffs.windows(2).any(|p| p[0] == p[1]) {
                    return Ok(false);
                }
            }
            run_start = run_end;
        }
        Ok(true)
    }

    /// All repeated-difference witnesses; empty iff `is_ddc`. Classes are
    /// sorted by difference, pairs within a class canonically.
    pub fn find_repeats(&self, limits: &Limits) -> Result<Vec<CollisionClass>> {
        let m = self.elements.len();
        if m < 2 {
            return Ok(Vec::new());
        }
        limits.check_pairs(m as u128 * (m as u128 - 1))?;
        let mut fps = collect_difference_fps(&self.elements, limits.threads);
        fps.sort_unstable();
        let mut classes: Vec<CollisionClass> = Vec::new();
        let mut run_start = 0;
        while run_start < fps.len() {
            let mut run_end = run_start + 1;
            while run_end < fps.len() && fps[run_end].0 == fps[run_start].0 {
                run_end += 1;
            }
            if run_end - run_start > 1 {
                let mut by_diff: BTreeMap<Word, Vec<(Word, Word)>> = BTreeMap::new();
                for &(_, i, j) in &fps[run_start..run_end] {
                    let g = &self.elements[i as usize];
                    let h = &self.elements[j as usize];
                    by_diff
                        .entry(Word::difference(g, h))
                        .or_default()
                        .push((g.clone(), h.clone()));
                }
                for (difference, mut pairs) in by_diff {
                    if pairs.len() >= 2 {
                        pairs.sort_unstable();
                        classes.push(CollisionClass { difference, pairs });
                    }
                }
            }
            run_start = run_end;
        }
        classes.sort_unstable_by(|a, b| a.difference.cmp(&b.difference));
        Ok(classes)
    }

    /// Max pairwise distance; 0 for singletons, error on the empty set.
    pub fn diameter(&self) -> Result<usize> {
        if self.elements.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(*self.diameter_cache.get_or_init(|| {
            let mut best = 0;
            for i in 0..self.elements.len() {
                for j in i + 1..self.elements.len() {
                    best = best.max(self.elements[i].dist(&self.elements[j]));
                }
            }
            best
        }))
    }

    /// Left-difference variant: distinct `gh⁻¹`, equal to `is_ddc(D⁻¹)`.
    pub fn is_left_ddc(&self, limits: &Limits) -> Result<bool> {
        self.inv_set().is_ddc(limits)
    }

    /// Max pairwise left distance `|gh⁻¹|`, equal to `diameter(D⁻¹)`.
    pub fn left_diameter(&self) -> Result<usize> {
        self.inv_set().diameter()
    }

    /// Translates the set into a ball around the identity: returns `(h, h⁻¹D)`
    /// with every element of `h⁻¹D` of length at most `⌈diameter/2⌉`. The
    /// centre is taken on the geodesic of the canonically smallest
    /// maximal-distance pair; DDC-ness and diameter are preserved.
    pub fn recenter(&self) -> Result<(Word, DdcSet)> {
        if self.elements.is_empty() {
            return Err(Error::EmptySet);
        }
        let diam = self.diameter()?;
        let mut pair = (&self.elements[0], &self.elements[0]);
        'outer: for i in 0..self.elements.len() {
            for j in i + 1..self.elements.len() {
                if self.elements[i].dist(&self.elements[j]) == diam {
                    pair = (&self.elements[i], &self.elements[j]);
                    break 'outer;
                }
            }
        }
        let (g, h) = pair;
        let geodesic = Word::difference(g, h);
        debug_assert_eq!(geodesic.len(), diam);
        let centre = g.mul(&geodesic.prefix(diam / 2));
        let centre_inv = centre.inv();
        let translated = self.translate(&centre_inv);
        debug_assert!(translated
            .elements()
            .iter()
            .all(|w| w.len() <= diam.div_ceil(2)));
        Ok((centre, translated))
    }

    fn common_length(&self) -> Result<usize> {
        let r = match self.elements.first() {
            None => return Ok(0),
            Some(w) => w.len(),
        };
        if self.elements.iter().any(|w| w.len() != r) {
            return Err(Error::NotEquiLength);
        }
        Ok(r)
    }

    /// For a set inside `S_r(e)` and a prefix length `k < r`: maps each
    /// length-`k` prefix `x` to its suffix set `D_x`. The union of `x·D_x`
    /// over the keys is exactly `D` and the parts are disjoint.
    pub fn suffix_sets(&self, k: usize) -> Result<BTreeMap<Word, BTreeSet<Word>>> {
        let r = self.common_length()?;
        if self.elements.is_empty() {
            return Ok(BTreeMap::new());
        }
        assert!(k < r, "prefix length {k} must be below the word length {r}");
        let mut map: BTreeMap<Word, BTreeSet<Word>> = BTreeMap::new();
        for w in &self.elements {
            map.entry(w.prefix(k)).or_default().insert(w.suffix(k));
        }
        Ok(map)
    }

    /// The sphere-local condition: for every level `k` in `1..r` and every
    /// pair of distinct prefixes `x ≠ y` of length `k`, the suffix sets
    /// share at most one element. Necessary for a DDC inside a sphere;
    /// sufficiency is relied on by the fast checker and property-tested
    /// against `is_ddc`. Prefixes of unequal length cannot share suffixes,
    /// so the ball-wide condition reduces to per-level checks.
    pub fn sphere_condition_check(&self) -> Result<bool> {
        let r = self.common_length()?;
        if r < 2 || self.elements.len() < 4 {
            // a failure needs two prefixes with two shared suffixes,
            // hence four distinct elements and an interior split point
            return Ok(true);
        }
        for k in 1..r {
            // a violation at level k is an unordered suffix pair appearing
            // under two distinct prefixes
            let mut seen: HashMap<(Word, Word), Word> = HashMap::new();
            let mut idx = 0;
            while idx < self.elements.len() {
                let prefix = self.elements[idx].prefix(k);
                let mut end = idx;
                while end < self.elements.len() && self.elements[end].prefix(k) == prefix {
                    end += 1;
                }
                for a in idx..end {
                    for b in a + 1..end {
                        let key = (self.elements[a].suffix(k), self.elements[b].suffix(k));
                        if let Some(other) = seen.get(&key) {
                            if *other != prefix {
                                return Ok(false);
                            }
                        } else {
                            seen.insert(key, prefix.clone());
                        }
                    }
                }
                idx = end;
            }
        }
        Ok(true)
    }
}

/// Fingerprints of all ordered differences, optionally partitioned across
/// threads by row. The result is sorted by the caller, so it is independent
/// of the partitioning.
fn collect_difference_fps(elements: &[Word], threads: usize) -> Vec<(u128, u32, u32)> {
    let m = elements.len();
    let fill = |rows: std::ops::Range<usize>, out: &mut Vec<(u128, u32, u32)>| {
        for i in rows {
            for j in 0..m {
                if i != j {
                    out.push((
                        Word::difference_fingerprint(&elements[i], &elements[j]),
                        i as u32,
                        j as u32,
                    ));
                }
            }
        }
    };
    let threads = threads.max(1).min(m);
    if threads <= 1 || m < 64 {
        let mut out = Vec::with_capacity(m * (m - 1));
        fill(0..m, &mut out);
        return out;
    }
    let chunk = m.div_ceil(threads);
    let mut parts: Vec<Vec<(u128, u32, u32)>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let fill = &fill;
                scope.spawn(move || {
                    let lo = t * chunk;
                    let hi = ((t + 1) * chunk).min(m);
                    let mut out = Vec::with_capacity((hi - lo) * (m - 1));
                    fill(lo..hi, &mut out);
                    out
                })
            })
            .collect();
        for h in handles {
            parts.push(h.join().expect("difference scan worker panicked"));
        }
    });
    let mut out = Vec::with_capacity(m * (m - 1));
    for p in parts {
        out.extend(p);
    }
    out
}
