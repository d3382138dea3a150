//! DDC constructions: the explicit mirror family and the randomized
//! construct-then-repair pipeline.
//!
//! The mirror construction takes every reduced word `w` of length `d/4` to
//! `w·rev(w)`; the reduced difference of two such elements starts with the
//! reversed mirror of one and ends with the mirror of the other, so both
//! endpoints are recoverable and all differences are distinct.
//!
//! The randomized construction draws, for every prefix `v` in the sphere of
//! radius `d/3 - γ`, a uniform reduced extension `w_v` of length `d/6 + γ`,
//! detects the quadruples `(u, v, x, y)` whose two ordered differences
//! collide, and deletes one element per surviving collision. Sampling is
//! indexed by the position of `v` in canonical enumeration order, so a seed
//! fully determines the output regardless of evaluation order.

use crate::bounds::eta_bound;
use crate::check::DdcSet;
use crate::enumerate::{biguint_to_u128_sat, iter_sphere, sphere_size};
use crate::rng::{SplitMix64, GENERATOR_NAME};
use crate::word::{GroupCtx, Word};
use crate::{Error, Limits, Result};
use num_traits::ToPrimitive;
use serde::Serialize;

/// The mirror DDC `{w·rev(w) : |w| = d/4}`: size `2n(2n-1)^{d/4-1}`, every
/// element of length `d/2`, diameter at most `d`.
pub fn mirror(ctx: &GroupCtx, d: u32, limits: &Limits) -> Result<DdcSet> {
    if ctx.rank() < 2 {
        return Err(Error::RankTooSmall {
            rank: ctx.rank(),
            needed: "the mirror construction needs rank >= 2",
        });
    }
    if d < 4 || !d.is_multiple_of(4) {
        return Err(Error::BadDiameter {
            d: d as u64,
            why: "the mirror construction needs d >= 4 divisible by 4",
        });
    }
    let size = sphere_size(ctx, d / 4);
    limits.check_elements(biguint_to_u128_sat(&size))?;
    let words = iter_sphere(ctx, d / 4)
        .map(|w| {
            // the seam repeats the last letter of w, so no cancellation
            w.concat_reduced(&w.rev())
        })
        .collect();
    Ok(DdcSet::from_words_unchecked(*ctx, words))
}

/// Parameters of one randomized run: target diameter `d` (divisible by 6),
/// the logarithmic trade-off `γ`, and the derived radii `|v| = d/3 - γ`,
/// `|w| = d/6 + γ`.
#[derive(Debug, Clone)]
pub struct RandomPlan {
    ctx: GroupCtx,
    d: u32,
    gamma: u32,
    v_radius: u32,
    w_radius: u32,
    seed: u64,
}

impl RandomPlan {
    pub fn new(ctx: &GroupCtx, d: u32, seed: u64) -> Result<RandomPlan> {
        if ctx.rank() < 2 {
            return Err(Error::RankTooSmall {
                rank: ctx.rank(),
                needed: "the randomized construction needs rank >= 2",
            });
        }
        if d < 6 || !d.is_multiple_of(6) {
            return Err(Error::BadDiameter {
                d: d as u64,
                why: "the randomized plan needs d >= 6 divisible by 6",
            });
        }
        let gamma = choose_gamma(ctx, d)?;
        let v_radius = d / 3 - gamma;
        let w_radius = d / 6 + gamma;
        Ok(RandomPlan {
            ctx: *ctx,
            d,
            gamma,
            v_radius,
            w_radius,
            seed,
        })
    }

    pub fn ctx(&self) -> &GroupCtx {
        &self.ctx
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn gamma(&self) -> u32 {
        self.gamma
    }

    pub fn v_radius(&self) -> u32 {
        self.v_radius
    }

    pub fn w_radius(&self) -> u32 {
        self.w_radius
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Smallest integer γ with `(1/3)·log_{2n-1}(d/3) <= γ`, i.e. the smallest
/// γ with `(2n-1)^{3γ} >= d/3`; the admissible interval has length 1, so
/// this is also its low end. Exact integer arithmetic, no logarithms.
pub fn choose_gamma(ctx: &GroupCtx, d: u32) -> Result<u32> {
    if d < 6 || !d.is_multiple_of(6) {
        return Err(Error::BadDiameter {
            d: d as u64,
            why: "gamma selection needs d >= 6 divisible by 6",
        });
    }
    let q = (ctx.alphabet_size() - 1) as u64;
    let target = (d / 3) as u64;
    let mut gamma = 0u32;
    let mut power = 1u64; // q^{3 gamma}
    while power < target {
        gamma += 1;
        power = power.saturating_mul(q).saturating_mul(q).saturating_mul(q);
    }
    if gamma >= d / 3 {
        return Err(Error::BadDiameter {
            d: d as u64,
            why: "gamma leaves no room for the prefix radius",
        });
    }
    Ok(gamma)
}

/// A random candidate with its prefix decomposition retained: element `i`
/// is `prefix_i · tail_i` where `prefix_i` is the `i`-th word of
/// `S_{d/3-γ}(e)` in canonical order.
#[derive(Debug, Clone)]
pub struct Candidate {
    plan: RandomPlan,
    prefixes: Vec<Word>,
    tails: Vec<Word>,
    words: Vec<Word>,
}

impl Candidate {
    /// Assembles a candidate from explicit `(prefix, tail)` pairs; used by
    /// tests to force collisions.
    pub fn from_parts(plan: RandomPlan, parts: Vec<(Word, Word)>) -> Candidate {
        let mut prefixes = Vec::with_capacity(parts.len());
        let mut tails = Vec::with_capacity(parts.len());
        let mut words = Vec::with_capacity(parts.len());
        for (p, t) in parts {
            words.push(p.mul(&t));
            prefixes.push(p);
            tails.push(t);
        }
        Candidate {
            plan,
            prefixes,
            tails,
            words,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn plan(&self) -> &RandomPlan {
        &self.plan
    }

    pub fn prefixes(&self) -> &[Word] {
        &self.prefixes
    }

    pub fn tails(&self) -> &[Word] {
        &self.tails
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn set(&self) -> DdcSet {
        DdcSet::from_words_unchecked(self.plan.ctx, self.words.clone())
    }
}

/// Draws `w_v` for every `v` in canonical order: the `i`-th element consumes
/// `w_radius` draws from a splitmix64 stream derived from `(seed, i)`, one
/// draw per letter, each uniform over the `2n-1` non-cancelling letters.
pub fn random_candidate(plan: &RandomPlan, limits: &Limits) -> Result<Candidate> {
    let ctx = plan.ctx;
    let v_count = sphere_size(&ctx, plan.v_radius);
    limits.check_elements(biguint_to_u128_sat(&v_count))?;
    let v_count = v_count.to_usize().expect("guarded above");
    let n_letters = ctx.alphabet_size() as u64;

    let mut prefixes = Vec::with_capacity(v_count);
    let mut tails = Vec::with_capacity(v_count);
    let mut words = Vec::with_capacity(v_count);
    for (i, v) in iter_sphere(&ctx, plan.v_radius).enumerate() {
        let mut stream = SplitMix64::for_element(plan.seed, i as u64);
        let mut letters = Vec::with_capacity(plan.w_radius as usize);
        let mut prev = *v.letters().last().expect("v_radius >= 1");
        for _ in 0..plan.w_radius {
            let forbidden = prev.inverse().canonical_index(&ctx);
            let mut pick = stream.below(n_letters - 1) as u32;
            if pick >= forbidden {
                pick += 1;
            }
            let l = ctx.letter_at(pick);
            letters.push(l);
            prev = l;
        }
        let tail = Word::from_reduced(letters);
        words.push(v.concat_reduced(&tail));
        prefixes.push(v);
        tails.push(tail);
    }
    Ok(Candidate {
        plan: plan.clone(),
        prefixes,
        tails,
        words,
    })
}

/// A repeated difference in a candidate: the ordered pairs `(u, v)` and
/// `(x, y)` of distinct prefixes satisfy
/// `(u w_u)⁻¹ (v w_v) = (x w_x)⁻¹ (y w_y)`, with `k` letters cancelling in
/// each product. An event and its mirrored form `{(v,u),(y,x)}` describe
/// the same collision and are reported once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadEvent {
    pub u: Word,
    pub v: Word,
    pub x: Word,
    pub y: Word,
    pub k: usize,
    pub(crate) indices: [usize; 4],
}

/// All repeated-difference events of a candidate, found by fingerprinting
/// every ordered difference and confirming collisions letter-by-letter.
/// Each unordered event is reported once, sorted canonically.
pub fn detect_bad_events(candidate: &Candidate, limits: &Limits) -> Result<Vec<BadEvent>> {
    let m = candidate.words.len();
    if m < 4 {
        return Ok(Vec::new());
    }
    limits.check_pairs(m as u128 * (m as u128 - 1))?;
    let words = &candidate.words;
    let mut fps: Vec<(u128, u32, u32)> = Vec::with_capacity(m * (m - 1));
    for i in 0..m {
        for j in 0..m {
            if i != j {
                fps.push((
                    Word::difference_fingerprint(&words[i], &words[j]),
                    i as u32,
                    j as u32,
                ));
            }
        }
    }
    fps.sort_unstable();

    let mut events: Vec<BadEvent> = Vec::new();
    let mut seen: std::collections::BTreeSet<[usize; 4]> = std::collections::BTreeSet::new();
    let mut run_start = 0;
    while run_start < fps.len() {
        let mut run_end = run_start + 1;
        while run_end < fps.len() && fps[run_end].0 == fps[run_start].0 {
            run_end += 1;
        }
        if run_end - run_start > 1 {
            let run = &fps[run_start..run_end];
            for a in 0..run.len() {
                for b in a + 1..run.len() {
                    let (i, j) = (run[a].1 as usize, run[a].2 as usize);
                    let (s, t) = (run[b].1 as usize, run[b].2 as usize);
                    // fingerprint match: confirm the differences letter-by-letter
                    if Word::difference(&words[i], &words[j])
                        != Word::difference(&words[s], &words[t])
                    {
                        continue;
                    }
                    // canonical form: order the two pairs, then fold the
                    // mirrored event {(j,i),(t,s)} onto the same key
                    let forward = ordered_quad(i, j, s, t);
                    let mirrored = ordered_quad(j, i, t, s);
                    let key = forward.min(mirrored);
                    if seen.insert(key) {
                        let [ku, kv, kx, ky] = key;
                        events.push(BadEvent {
                            u: candidate.prefixes[ku].clone(),
                            v: candidate.prefixes[kv].clone(),
                            x: candidate.prefixes[kx].clone(),
                            y: candidate.prefixes[ky].clone(),
                            k: words[ku].lcp(&words[kv]),
                            indices: key,
                        });
                    }
                }
            }
        }
        run_start = run_end;
    }
    events.sort_unstable_by_key(|a| a.indices);
    Ok(events)
}

fn ordered_quad(i: usize, j: usize, s: usize, t: usize) -> [usize; 4] {
    if (i, j) <= (s, t) {
        [i, j, s, t]
    } else {
        [s, t, i, j]
    }
}

/// Deletes elements until no event survives: repeatedly remove the element
/// participating in the most unresolved events, ties broken by canonical
/// word order (lowest index). Never removes more elements than there are
/// events. Returns the repaired set and the number of removals.
pub fn repair(candidate: &Candidate, events: &[BadEvent]) -> (DdcSet, usize) {
    let m = candidate.words.len();
    let mut removed = vec![false; m];
    let mut resolved = vec![false; events.len()];
    let mut unresolved = events.len();
    let mut removals = 0usize;
    while unresolved > 0 {
        let mut degree = vec![0usize; m];
        for (e, ev) in events.iter().enumerate() {
            if !resolved[e] {
                for &i in &ev.indices {
                    degree[i] += 1;
                }
            }
        }
        let victim = (0..m)
            .filter(|&i| !removed[i] && degree[i] > 0)
            .max_by(|&a, &b| degree[a].cmp(&degree[b]).then(b.cmp(&a)))
            .expect("an unresolved event has a live participant");
        removed[victim] = true;
        removals += 1;
        for (e, ev) in events.iter().enumerate() {
            if !resolved[e] && ev.indices.contains(&victim) {
                resolved[e] = true;
                unresolved -= 1;
            }
        }
    }
    let words = candidate
        .words
        .iter()
        .enumerate()
        .filter(|(i, _)| !removed[*i])
        .map(|(_, w)| w.clone())
        .collect();
    (
        DdcSet::from_words_unchecked(candidate.plan.ctx, words),
        removals,
    )
}

/// Summary of one randomized run, serializable for reports.
#[derive(Debug, Clone, Serialize)]
pub struct RandomReport {
    pub n: u16,
    pub d: u32,
    pub d_effective: u32,
    pub gamma: u32,
    pub v_size: usize,
    pub events_detected: usize,
    pub removed: usize,
    pub final_size: usize,
    pub eta_bound: f64,
    pub verified: bool,
    pub seed: u64,
    pub rng: &'static str,
}

/// Full pipeline: plan at `d' = 6⌊d/6⌋`, draw, detect, repair, verify.
/// A DDC of diameter at most `d'` also has diameter at most `d`.
pub fn construct_lower(
    ctx: &GroupCtx,
    d: u32,
    seed: u64,
    limits: &Limits,
) -> Result<(DdcSet, RandomReport)> {
    if d < 6 {
        return Err(Error::BadDiameter {
            d: d as u64,
            why: "the randomized construction needs d >= 6",
        });
    }
    let d_effective = d - d % 6;
    let plan = RandomPlan::new(ctx, d_effective, seed)?;
    let candidate = random_candidate(&plan, limits)?;
    let events = detect_bad_events(&candidate, limits)?;
    let (mut set, mut removed) = repair(&candidate, &events);
    let mut verified = set.is_ddc(limits)?;
    // detection is exact, so this loop does not run; it keeps the
    // postcondition unconditional if repair input were ever incomplete
    while !verified {
        let classes = set.find_repeats(limits)?;
        let victim = classes[0].pairs[0].0.clone();
        let words = set
            .elements()
            .iter()
            .filter(|w| **w != victim)
            .cloned()
            .collect();
        set = DdcSet::from_words_unchecked(*ctx, words);
        removed += 1;
        verified = set.is_ddc(limits)?;
    }
    let report = RandomReport {
        n: ctx.rank(),
        d,
        d_effective,
        gamma: plan.gamma,
        v_size: candidate.len(),
        events_detected: events.len(),
        removed,
        final_size: set.len(),
        eta_bound: eta_bound(ctx, d_effective, plan.gamma)?
            .to_f64()
            .unwrap_or(f64::NAN),
        verified,
        seed,
        rng: GENERATOR_NAME,
    };
    Ok((set, report))
}
