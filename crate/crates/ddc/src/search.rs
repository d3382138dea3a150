//! Exact maximum-DDC search at small scale by depth-first branch and bound.
//!
//! Every DDC of diameter at most `d` can be translated into the ball
//! `B_{⌈d/2⌉}(e)`, so candidates are the ball elements in canonical order.
//! A partial set is extended only by candidates that keep all pairwise
//! distances within `d` and all ordered differences distinct; the difference
//! set is maintained incrementally with an undo log. Pruning uses the
//! remaining-candidate count and the closed-form caps, and optionally fixes
//! the first chosen element to the canonical minimum of its orbit under the
//! `2^n·n!` signed relabelings of the generators, which preserve both the
//! DDC property and all distances.

use crate::bounds::{elementary_bound, max_subset_size, thm_upper_floor};
use crate::check::DdcSet;
use crate::enumerate::materialize_ball;
use crate::word::{GroupCtx, Letter, Word};
use crate::{Limits, Result};
use num_traits::ToPrimitive;
use std::collections::HashSet;
use std::time::{Duration, Instant};

/// Relabelings are enumerated only up to this rank; beyond it the orbit
/// computation (2^n·n! maps) would dominate the search itself.
const SYMMETRY_MAX_RANK: u16 = 6;

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub ctx: GroupCtx,
    pub d: u32,
    pub node_budget: u64,
    pub time_budget: Duration,
    pub symmetry_pruning: bool,
    pub limits: Limits,
}

impl SearchConfig {
    pub fn new(ctx: GroupCtx, d: u32) -> SearchConfig {
        SearchConfig {
            ctx,
            d,
            node_budget: 100_000_000,
            time_budget: Duration::from_secs(300),
            symmetry_pruning: true,
            limits: Limits::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub size: usize,
    pub witness: DdcSet,
    pub proven_optimal: bool,
    pub nodes: u64,
    pub elapsed: Duration,
    /// The a-priori cap min(elementary, subset, ⌊theorem⌋) the search ran under.
    pub cap: u64,
}

/// `is_ddc(witness) && diameter(witness) <= d`, checked by the generic
/// machinery with no reference to search state.
pub fn verify_witness(witness: &DdcSet, d: u32, limits: &Limits) -> Result<bool> {
    if witness.is_empty() {
        return Ok(true);
    }
    Ok(witness.is_ddc(limits)? && witness.diameter()? <= d as usize)
}

pub fn max_ddc_exact(cfg: &SearchConfig) -> Result<SearchOutcome> {
    let started = Instant::now();
    let candidates = materialize_ball(&cfg.ctx, cfg.d.div_ceil(2), &cfg.limits)?;
    let cap = search_cap(&cfg.ctx, cfg.d)?;

    let orbit_minimal = if cfg.symmetry_pruning && cfg.ctx.rank() <= SYMMETRY_MAX_RANK {
        let maps = signed_relabelings(&cfg.ctx);
        Some(
            candidates
                .iter()
                .map(|w| is_orbit_minimal(w, &maps))
                .collect::<Vec<bool>>(),
        )
    } else {
        None
    };

    let mut state = State {
        candidates: &candidates,
        d: cfg.d as usize,
        diffs: HashSet::new(),
        chosen: Vec::new(),
        best: Vec::new(),
        nodes: 0,
        node_budget: cfg.node_budget,
        deadline: started + cfg.time_budget,
        truncated: false,
        cap: cap.to_usize().unwrap_or(usize::MAX),
        orbit_minimal,
    };
    state.dfs(0);

    let witness_words: Vec<Word> = state
        .best
        .iter()
        .map(|&i| candidates[i as usize].clone())
        .collect();
    let witness = DdcSet::from_words_unchecked(cfg.ctx, witness_words);
    debug_assert!(verify_witness(&witness, cfg.d, &cfg.limits)?);
    Ok(SearchOutcome {
        size: state.best.len(),
        witness,
        proven_optimal: !state.truncated,
        nodes: state.nodes,
        elapsed: started.elapsed(),
        cap: cap.to_u64().unwrap_or(u64::MAX),
    })
}

fn search_cap(ctx: &GroupCtx, d: u32) -> Result<num_bigint::BigUint> {
    let mut cap = elementary_bound(ctx, d).min(max_subset_size(ctx, d));
    if ctx.rank() >= 2 && d >= 1 {
        cap = cap.min(thm_upper_floor(ctx, d)?);
    }
    Ok(cap)
}

struct State<'a> {
    candidates: &'a [Word],
    d: usize,
    diffs: HashSet<Word>,
    chosen: Vec<u32>,
    best: Vec<u32>,
    nodes: u64,
    node_budget: u64,
    deadline: Instant,
    truncated: bool,
    cap: usize,
    orbit_minimal: Option<Vec<bool>>,
}

impl State<'_> {
    fn dfs(&mut self, start: usize) {
        if self.truncated || self.best.len() >= self.cap {
            return;
        }
        for i in start..self.candidates.len() {
            if self.chosen.len() + (self.candidates.len() - i) <= self.best.len() {
                break;
            }
            self.nodes += 1;
            if self.nodes >= self.node_budget
                || (self.nodes.is_multiple_of(1024) && Instant::now() >= self.deadline)
            {
                self.truncated = true;
                return;
            }
            if self.chosen.is_empty() {
                if let Some(minimal) = &self.orbit_minimal {
                    if !minimal[i] {
                        continue;
                    }
                }
            }
            if self.try_extend(i) {
                self.chosen.push(i as u32);
                if self.chosen.len() > self.best.len() {
                    self.best = self.chosen.clone();
                }
                self.dfs(i + 1);
                let i = self.chosen.pop().expect("just pushed") as usize;
                self.retract(i);
                if self.truncated || self.best.len() >= self.cap {
                    return;
                }
            }
        }
    }

    /// Adds the candidate's differences against the chosen set if they are
    /// fresh; on any clash the already-inserted ones are rolled back.
    fn try_extend(&mut self, i: usize) -> bool {
        let c = &self.candidates[i];
        for &s in &self.chosen {
            if self.candidates[s as usize].dist(c) > self.d {
                return false;
            }
        }
        let mut added: Vec<Word> = Vec::with_capacity(2 * self.chosen.len());
        for &s in &self.chosen {
            let s = &self.candidates[s as usize];
            for diff in [Word::difference(s, c), Word::difference(c, s)] {
                if self.diffs.contains(&diff) {
                    for w in &added {
                        self.diffs.remove(w);
                    }
                    return false;
                }
                self.diffs.insert(diff.clone());
                added.push(diff);
            }
        }
        true
    }

    fn retract(&mut self, i: usize) {
        let c = &self.candidates[i];
        for &s in &self.chosen {
            let s = &self.candidates[s as usize];
            self.diffs.remove(&Word::difference(s, c));
            self.diffs.remove(&Word::difference(c, s));
        }
    }
}

/// All letterwise maps `x_i -> ±x_{π(i)}`: a permutation of the generators
/// composed with sign flips. `map[canonical_index(l)]` is the image letter
/// value.
fn signed_relabelings(ctx: &GroupCtx) -> Vec<Vec<i16>> {
    let n = ctx.rank() as usize;
    let mut perms: Vec<Vec<usize>> = Vec::new();
    permutations(&mut (0..n).collect::<Vec<_>>(), 0, &mut perms);
    let mut maps = Vec::with_capacity(perms.len() << n);
    for perm in &perms {
        for signs in 0u32..(1 << n) {
            let mut map = vec![0i16; 2 * n];
            for i in 0..n {
                let sign = if signs & (1 << i) != 0 { -1i16 } else { 1 };
                let image = sign * (perm[i] as i16 + 1);
                // letter i+1 at canonical index n+i, letter -(i+1) at n-1-i
                map[n + i] = image;
                map[n - 1 - i] = -image;
            }
            maps.push(map);
        }
    }
    maps
}

fn permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

/// True when no relabeling maps `w` to a lexicographically smaller word.
fn is_orbit_minimal(w: &Word, maps: &[Vec<i16>]) -> bool {
    let n = maps.first().map_or(0, |m| m.len() / 2) as i16;
    let index = |l: Letter| -> usize {
        let v = l.value();
        if v < 0 {
            (v + n) as usize
        } else {
            (v + n - 1) as usize
        }
    };
    'maps: for map in maps {
        for l in w.letters() {
            let image = map[index(*l)];
            match image.cmp(&l.value()) {
                std::cmp::Ordering::Less => return false,
                std::cmp::Ordering::Greater => continue 'maps,
                std::cmp::Ordering::Equal => {}
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::mirror;
    use crate::enumerate::iter_ball;

    fn ctx(n: u16) -> GroupCtx {
        GroupCtx::new(n).unwrap()
    }

    /// Exhaustive oracle: maximum DDC size over all subsets of the ball,
    /// recursing in canonical order with the same feasibility checks applied
    /// one extension at a time.
    fn brute_force_max(ctx: &GroupCtx, d: u32) -> usize {
        let cands: Vec<Word> = iter_ball(ctx, d.div_ceil(2)).collect();
        fn rec(
            cands: &[Word],
            d: usize,
            start: usize,
            chosen: &mut Vec<Word>,
            best: &mut usize,
        ) {
            *best = (*best).max(chosen.len());
            for i in start..cands.len() {
                let c = &cands[i];
                if chosen.iter().any(|s| s.dist(c) > d) {
                    continue;
                }
                chosen.push(c.clone());
                // full re-check of the distinct-difference property
                let mut diffs = Vec::new();
                for g in chosen.iter() {
                    for h in chosen.iter() {
                        if g != h {
                            diffs.push(Word::difference(g, h));
                        }
                    }
                }
                diffs.sort_unstable();
                let ok = diffs.windows(2).all(|p| p[0] != p[1]);
                if ok {
                    rec(cands, d, i + 1, chosen, best);
                }
                chosen.pop();
            }
        }
        let mut best = 0;
        rec(&cands, d as usize, 0, &mut Vec::new(), &mut best);
        best
    }

    #[test]
    fn paper_values_rank_two() {
        let out = max_ddc_exact(&SearchConfig::new(ctx(2), 2)).unwrap();
        assert_eq!(out.size, 4);
        assert!(out.proven_optimal);
        assert!(verify_witness(&out.witness, 2, &Limits::default()).unwrap());

        let out = max_ddc_exact(&SearchConfig::new(ctx(2), 3)).unwrap();
        assert_eq!(out.size, 5);
        assert!(out.proven_optimal);
        assert!(verify_witness(&out.witness, 3, &Limits::default()).unwrap());
    }

    #[test]
    fn matches_brute_force_oracle() {
        assert_eq!(brute_force_max(&ctx(2), 2), 4);
        assert_eq!(brute_force_max(&ctx(2), 3), 5);
        let out = max_ddc_exact(&SearchConfig::new(ctx(2), 2)).unwrap();
        assert_eq!(out.size, 4);
    }

    #[test]
    fn symmetry_setting_does_not_change_the_size() {
        for (n, d) in [(2u16, 2u32), (2, 3), (3, 2)] {
            let mut cfg = SearchConfig::new(ctx(n), d);
            cfg.symmetry_pruning = true;
            let with = max_ddc_exact(&cfg).unwrap();
            cfg.symmetry_pruning = false;
            let without = max_ddc_exact(&cfg).unwrap();
            assert_eq!(with.size, without.size, "n={n} d={d}");
            assert!(with.nodes <= without.nodes);
        }
    }

    #[test]
    fn budget_exhaustion_returns_best_found() {
        let mut cfg = SearchConfig::new(ctx(2), 3);
        cfg.node_budget = 10;
        let out = max_ddc_exact(&cfg).unwrap();
        assert!(!out.proven_optimal);
        assert!(out.size <= 5);
        assert!(verify_witness(&out.witness, 3, &Limits::default()).unwrap());
    }

    #[test]
    fn result_respects_caps_and_mirror_floor() {
        let out = max_ddc_exact(&SearchConfig::new(ctx(2), 4)).unwrap();
        assert!(out.proven_optimal);
        assert!(out.size as u64 <= out.cap);
        let mirror_size = mirror(&ctx(2), 4, &Limits::default()).unwrap().len();
        assert!(out.size >= mirror_size);
    }

    #[test]
    fn witness_checks_fail_on_bad_sets() {
        let c = ctx(2);
        let good: Vec<Word> = iter_ball(&c, 1).filter(|w| !w.is_identity()).collect();
        let bad: Vec<Word> = iter_ball(&c, 1).collect();
        let good = DdcSet::from_words_unchecked(c, good);
        let bad = DdcSet::from_words_unchecked(c, bad);
        assert!(verify_witness(&good, 2, &Limits::default()).unwrap());
        assert!(!verify_witness(&bad, 2, &Limits::default()).unwrap());
        assert!(!verify_witness(&good, 1, &Limits::default()).unwrap());
    }

    #[test]
    fn orbit_minimality_filters_the_alphabet() {
        let c = ctx(2);
        let maps = signed_relabelings(&c);
        assert_eq!(maps.len(), 8);
        // of the four single letters only the canonical smallest survives
        let minimal: Vec<bool> = c
            .letters()
            .map(|l| is_orbit_minimal(&Word::single(l), &maps))
            .collect();
        assert_eq!(minimal, vec![true, false, false, false]);
        assert!(is_orbit_minimal(&Word::identity(), &maps));
    }
}
