//! Lifting DDCs from a finitely generated group `G` into the free group on
//! the same number of generators.
//!
//! `G` is presented as a multiplication oracle (an explicit table or modular
//! integers) plus a generator list. Breadth-first search from the identity
//! assigns every element a shortest preimage word; a DDC of diameter `d` in
//! `G` then lifts to a free DDC of the same size and diameter at most `2d`
//! by anchoring at one element and attaching the BFS words of the
//! differences: the homomorphic images of the lifted differences are the
//! original distinct differences, so the lift cannot collide.

use crate::check::DdcSet;
use crate::rng::SplitMix64;
use crate::word::{GroupCtx, Word};
use crate::{Error, Limits, Result};

const ASSOC_SAMPLES: u64 = 100_000;

#[derive(Debug, Clone)]
enum OracleKind {
    /// Flat `order × order` table, `table[a * order + b] = a·b`.
    Table(Vec<u32>),
    /// Additive integers modulo `m`.
    ZMod,
}

/// A finite group given by a total multiplication oracle, an identity, and
/// an ordered generator list. Validation samples associativity, checks the
/// identity laws on every element, and requires every element to be
/// reachable from the identity via generators and inverses.
#[derive(Debug, Clone)]
pub struct GroupOracle {
    kind: OracleKind,
    order: u64,
    identity: u64,
    generators: Vec<u64>,
    inverses: Vec<u64>,
}

impl GroupOracle {
    /// Additive group of integers modulo `m` with the given generators.
    pub fn zmod(m: u64, generators: Vec<u64>, limits: &Limits) -> Result<GroupOracle> {
        if m == 0 {
            return Err(Error::MalformedTable("modulus must be positive".into()));
        }
        limits.check_elements(m as u128)?;
        if generators.is_empty() {
            return Err(Error::MalformedTable("at least one generator required".into()));
        }
        for &g in &generators {
            if g >= m {
                return Err(Error::UnknownElement(g));
            }
        }
        let oracle = GroupOracle {
            kind: OracleKind::ZMod,
            order: m,
            identity: 0,
            generators,
            inverses: Vec::new(),
        };
        oracle.validate()?;
        Ok(oracle)
    }

    /// Parses the table format: `table ORDER n=N`, an identity line, a
    /// generator line, then ORDER rows of ORDER ids.
    pub fn from_table_str(contents: &str) -> Result<GroupOracle> {
        let mut lines = contents
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::MalformedTable("empty table file".into()))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("table") {
            return Err(Error::MalformedTable("header must start with 'table'".into()));
        }
        let order: u64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedTable("bad order in header".into()))?;
        let n: usize = parts
            .next()
            .and_then(|s| s.strip_prefix("n="))
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedTable("header needs n=<rank>".into()))?;
        if order == 0 || order > (u32::MAX as u64) {
            return Err(Error::MalformedTable(format!("unsupported order {order}")));
        }
        let identity: u64 = lines
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedTable("missing identity line".into()))?;
        let generators: Vec<u64> = lines
            .next()
            .ok_or_else(|| Error::MalformedTable("missing generator line".into()))?
            .split([' ', ','])
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse()
                    .map_err(|_| Error::MalformedTable(format!("bad generator id {s:?}")))
            })
            .collect::<Result<_>>()?;
        if generators.len() != n {
            return Err(Error::MalformedTable(format!(
                "header says n={n} but {} generators listed",
                generators.len()
            )));
        }
        let mut table = Vec::with_capacity((order * order) as usize);
        for _ in 0..order {
            let row = lines
                .next()
                .ok_or_else(|| Error::MalformedTable("missing table row".into()))?;
            let ids: Vec<u32> = row
                .split_whitespace()
                .map(|s| {
                    s.parse()
                        .map_err(|_| Error::MalformedTable(format!("bad id {s:?}")))
                })
                .collect::<Result<_>>()?;
            if ids.len() as u64 != order {
                return Err(Error::MalformedTable(format!(
                    "row has {} entries, expected {order}",
                    ids.len()
                )));
            }
            if let Some(&bad) = ids.iter().find(|&&v| v as u64 >= order) {
                return Err(Error::UnknownElement(bad as u64));
            }
            table.extend(ids);
        }
        for &g in generators.iter().chain(std::iter::once(&identity)) {
            if g >= order {
                return Err(Error::UnknownElement(g));
            }
        }
        let mut oracle = GroupOracle {
            kind: OracleKind::Table(table),
            order,
            identity,
            generators,
            inverses: Vec::new(),
        };
        oracle.fill_inverses()?;
        oracle.validate()?;
        Ok(oracle)
    }

    /// Parses a `zmod M gens=a,b,...` descriptor.
    pub fn from_descriptor(spec: &str, limits: &Limits) -> Result<GroupOracle> {
        let mut parts = spec.split_whitespace();
        match parts.next() {
            Some("zmod") => {}
            _ => {
                return Err(Error::MalformedTable(format!(
                    "unrecognized group descriptor {spec:?}"
                )))
            }
        }
        let m: u64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedTable("zmod needs a modulus".into()))?;
        let gens = parts
            .next()
            .and_then(|s| s.strip_prefix("gens="))
            .ok_or_else(|| Error::MalformedTable("zmod needs gens=a,b,...".into()))?
            .split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| Error::MalformedTable(format!("bad generator {s:?}")))
            })
            .collect::<Result<Vec<u64>>>()?;
        GroupOracle::zmod(m, gens, limits)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn identity(&self) -> u64 {
        self.identity
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    /// Rank of the free group the lift targets.
    pub fn rank(&self) -> u16 {
        self.generators.len() as u16
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.order && b < self.order);
        match &self.kind {
            OracleKind::Table(t) => t[(a * self.order + b) as usize] as u64,
            OracleKind::ZMod => (a + b) % self.order,
        }
    }

    pub fn inverse(&self, a: u64) -> u64 {
        match &self.kind {
            OracleKind::Table(_) => self.inverses[a as usize],
            OracleKind::ZMod => (self.order - a) % self.order,
        }
    }

    fn fill_inverses(&mut self) -> Result<()> {
        let mut inverses = vec![u64::MAX; self.order as usize];
        for a in 0..self.order {
            for b in 0..self.order {
                if self.mul(a, b) == self.identity && self.mul(b, a) == self.identity {
                    inverses[a as usize] = b;
                    break;
                }
            }
            if inverses[a as usize] == u64::MAX {
                return Err(Error::MalformedTable(format!("element {a} has no inverse")));
            }
        }
        self.inverses = inverses;
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        // identity laws on every element
        for a in 0..self.order {
            if self.mul(self.identity, a) != a || self.mul(a, self.identity) != a {
                return Err(Error::MalformedTable(format!(
                    "identity {0} does not fix element {a}",
                    self.identity
                )));
            }
        }
        // associativity, exhaustive for tiny orders and sampled otherwise
        if self.order.pow(3) <= ASSOC_SAMPLES {
            for a in 0..self.order {
                for b in 0..self.order {
                    for c in 0..self.order {
                        self.check_assoc(a, b, c)?;
                    }
                }
            }
        } else {
            let mut rng = SplitMix64::new(0x5EED);
            for _ in 0..ASSOC_SAMPLES {
                let a = rng.below(self.order);
                let b = rng.below(self.order);
                let c = rng.below(self.order);
                self.check_assoc(a, b, c)?;
            }
        }
        // reachability from the identity
        let reached = self.bfs().depths.iter().filter(|d| d.is_some()).count() as u64;
        if reached != self.order {
            return Err(Error::UnreachableElements {
                count: self.order - reached,
            });
        }
        Ok(())
    }

    fn check_assoc(&self, a: u64, b: u64, c: u64) -> Result<()> {
        if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
            return Err(Error::NonAssociative { a, b, c });
        }
        Ok(())
    }

    fn check_element(&self, a: u64) -> Result<()> {
        if a >= self.order {
            return Err(Error::UnknownElement(a));
        }
        Ok(())
    }

    fn bfs(&self) -> BfsWords {
        let ctx = GroupCtx::new(self.rank()).expect("at least one generator");
        let mut words: Vec<Option<Word>> = vec![None; self.order as usize];
        let mut depths: Vec<Option<u32>> = vec![None; self.order as usize];
        let mut queue = std::collections::VecDeque::new();
        words[self.identity as usize] = Some(Word::identity());
        depths[self.identity as usize] = Some(0);
        queue.push_back(self.identity);
        while let Some(g) = queue.pop_front() {
            let base = words[g as usize].clone().expect("visited");
            let depth = depths[g as usize].expect("visited");
            // canonical letter order -n..-1, 1..n
            for l in ctx.letters() {
                let image = self.letter_image(l.value());
                let next = self.mul(g, image);
                if words[next as usize].is_none() {
                    // a geodesic extension never cancels, or the target
                    // would have been reached at a smaller depth
                    words[next as usize] = Some(base.mul(&Word::single(l)));
                    depths[next as usize] = Some(depth + 1);
                    queue.push_back(next);
                }
            }
        }
        BfsWords { words, depths }
    }

    fn letter_image(&self, letter: i16) -> u64 {
        let idx = (letter.unsigned_abs() - 1) as usize;
        if letter > 0 {
            self.generators[idx]
        } else {
            self.inverse(self.generators[idx])
        }
    }

    /// Evaluates the homomorphism determined by `x_i -> g_i` on a word.
    pub fn phi(&self, w: &Word) -> u64 {
        let mut acc = self.identity;
        for l in w.letters() {
            acc = self.mul(acc, self.letter_image(l.value()));
        }
        acc
    }
}

/// Shortest preimage words for every element: `words[g]` evaluates to `g`
/// under the generator homomorphism and its length is the Cayley distance
/// from the identity. Exploration order is deterministic.
#[derive(Debug, Clone)]
pub struct BfsWords {
    words: Vec<Option<Word>>,
    depths: Vec<Option<u32>>,
}

impl BfsWords {
    pub fn word_of(&self, g: u64) -> &Word {
        self.words[g as usize].as_ref().expect("validated oracle is reachable")
    }

    pub fn depth_of(&self, g: u64) -> u32 {
        self.depths[g as usize].expect("validated oracle is reachable")
    }
}

pub fn bfs_words(oracle: &GroupOracle) -> BfsWords {
    oracle.bfs()
}

/// True iff all ordered differences `g⁻¹h` are distinct in the group.
pub fn is_ddc_in_group(oracle: &GroupOracle, ids: &[u64]) -> Result<bool> {
    for &g in ids {
        oracle.check_element(g)?;
    }
    let mut diffs = Vec::with_capacity(ids.len() * ids.len());
    for &g in ids {
        for &h in ids {
            if g != h {
                diffs.push(oracle.mul(oracle.inverse(g), h));
            }
        }
    }
    diffs.sort_unstable();
    Ok(diffs.windows(2).all(|p| p[0] != p[1]))
}

/// Max Cayley distance over pairs, via BFS depths and left-invariance.
pub fn group_diameter(oracle: &GroupOracle, ids: &[u64], bfs: &BfsWords) -> Result<u32> {
    if ids.is_empty() {
        return Err(Error::EmptySet);
    }
    for &g in ids {
        oracle.check_element(g)?;
    }
    let mut best = 0;
    for &g in ids {
        for &h in ids {
            if g != h {
                best = best.max(bfs.depth_of(oracle.mul(oracle.inverse(g), h)));
            }
        }
    }
    Ok(best)
}

/// A lifted DDC together with the data needed to audit it.
#[derive(Debug, Clone)]
pub struct Lift {
    pub set: DdcSet,
    /// Free-group words `ĥ_i`, in the order of the input ids.
    pub lifted_words: Vec<Word>,
    pub group_diameter: u32,
    pub achieved_diameter: usize,
    pub target_diameter: u32,
}

/// Lifts a group DDC into the free group of the oracle's rank: the anchor
/// `ĥ_1` is the BFS word of the first id, and `ĥ_i = ĥ_1 · w_i` with `w_i`
/// the BFS word of `h_1⁻¹ h_i`. The output has the same cardinality and
/// diameter at most `2d`.
pub fn lift(oracle: &GroupOracle, ids: &[u64], d: u32, limits: &Limits) -> Result<Lift> {
    if ids.is_empty() {
        return Err(Error::EmptySet);
    }
    if !is_ddc_in_group(oracle, ids)? {
        return Err(Error::NotADdc);
    }
    let bfs = oracle.bfs();
    let gd = group_diameter(oracle, ids, &bfs)?;
    if d < gd {
        return Err(Error::DiameterTooSmall {
            d,
            group_diameter: gd,
        });
    }
    let ctx = GroupCtx::new(oracle.rank())?;
    let h1 = ids[0];
    let anchor = bfs.word_of(h1).clone();
    let mut lifted_words = Vec::with_capacity(ids.len());
    for &h in ids {
        let w = bfs.word_of(oracle.mul(oracle.inverse(h1), h));
        lifted_words.push(anchor.mul(w));
    }
    let set = DdcSet::new(ctx, lifted_words.clone())?;
    debug_assert_eq!(set.len(), ids.len());
    debug_assert!(set.is_ddc(limits)?);
    let achieved_diameter = set.diameter()?;
    Ok(Lift {
        set,
        lifted_words,
        group_diameter: gd,
        achieved_diameter,
        target_diameter: d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn limits() -> Limits {
        Limits::default()
    }

    fn z7() -> GroupOracle {
        GroupOracle::zmod(7, vec![1], &limits()).unwrap()
    }

    /// Symmetric group on three points, elements indexed 0..6:
    /// e, (12), (13), (23), (123), (132); generators (12) and (123).
    fn s3_table() -> String {
        let perms: [[u8; 3]; 6] = [
            [0, 1, 2], // e
            [1, 0, 2], // (12)
            [2, 1, 0], // (13)
            [0, 2, 1], // (23)
            [1, 2, 0], // (123)
            [2, 0, 1], // (132)
        ];
        let compose = |a: &[u8; 3], b: &[u8; 3]| -> [u8; 3] {
            // a then b, acting on points: (a*b)(x) = b(a(x))
            [b[a[0] as usize], b[a[1] as usize], b[a[2] as usize]]
        };
        let index = |p: &[u8; 3]| perms.iter().position(|q| q == p).unwrap();
        let mut out = String::from("table 6 n=2\n0\n1 4\n");
        for a in &perms {
            let row: Vec<String> = perms
                .iter()
                .map(|b| index(&compose(a, b)).to_string())
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    #[test]
    fn zmod_parse_and_shape() {
        let g = GroupOracle::from_descriptor("zmod 7 gens=1", &limits()).unwrap();
        assert_eq!(g.order(), 7);
        assert_eq!(g.rank(), 1);
        assert_eq!(g.mul(5, 4), 2);
        assert_eq!(g.inverse(3), 4);
    }

    #[test]
    fn s3_table_loads() {
        let g = GroupOracle::from_table_str(&s3_table()).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(g.rank(), 2);
        assert_eq!(g.mul(1, 1), 0); // (12)^2 = e
    }

    #[test]
    fn non_associative_table_rejected() {
        // order-2 "table" where 1·1 = 1 breaks inverse/associativity checks
        let text = "table 2 n=1\n0\n1\n0 1\n1 1\n";
        assert!(GroupOracle::from_table_str(text).is_err());
    }

    #[test]
    fn unreachable_elements_rejected() {
        // Z_4 but with generator 2: only {0, 2} reachable
        let err = GroupOracle::zmod(4, vec![2], &limits());
        assert!(matches!(err, Err(Error::UnreachableElements { count: 2 })));
    }

    #[test]
    fn bfs_words_realize_cayley_distances() {
        let g = z7();
        let bfs = bfs_words(&g);
        assert!(bfs.word_of(0).is_identity());
        assert_eq!(bfs.depth_of(2), 2);
        assert_eq!(bfs.depth_of(4), 3); // min(4, 3) = 3, three steps of -1
        assert_eq!(bfs.word_of(4).to_string(), "-1 -1 -1");
        for h in 0..7 {
            assert_eq!(g.phi(bfs.word_of(h)), h);
            assert_eq!(bfs.word_of(h).len() as u32, bfs.depth_of(h));
        }
    }

    #[test]
    fn group_ddc_examples() {
        let g = z7();
        assert!(is_ddc_in_group(&g, &[1, 2, 4]).unwrap());
        assert!(!is_ddc_in_group(&g, &[0, 1, 2]).unwrap());
        let bfs = bfs_words(&g);
        assert_eq!(group_diameter(&g, &[1, 2, 4], &bfs).unwrap(), 3);
    }

    #[test]
    fn lift_z7_example() {
        let g = z7();
        let lifted = lift(&g, &[1, 2, 4], 3, &limits()).unwrap();
        assert_eq!(lifted.set.len(), 3);
        assert!(lifted.set.is_ddc(&limits()).unwrap());
        assert!(lifted.achieved_diameter <= 6);
        // the homomorphism recovers the original set
        let images: Vec<u64> = lifted.lifted_words.iter().map(|w| g.phi(w)).collect();
        assert_eq!(images, vec![1, 2, 4]);
        // every element stays within distance d of the anchor
        let anchor = &lifted.lifted_words[0];
        for w in &lifted.lifted_words {
            assert!(anchor.dist(w) <= 3);
        }
    }

    #[test]
    fn lift_singleton() {
        let g = z7();
        let lifted = lift(&g, &[5], 0, &limits()).unwrap();
        assert_eq!(lifted.set.len(), 1);
        assert_eq!(lifted.achieved_diameter, 0);
    }

    #[test]
    fn lift_two_elements_of_s3() {
        let g = GroupOracle::from_table_str(&s3_table()).unwrap();
        // a 2-element set is a DDC iff its difference is not an involution:
        // {e, (123)} works, while {(12), (123)} has the repeated
        // difference (13)
        assert!(!is_ddc_in_group(&g, &[1, 4]).unwrap());
        assert!(is_ddc_in_group(&g, &[0, 4]).unwrap());
        let bfs = bfs_words(&g);
        let d = group_diameter(&g, &[0, 4], &bfs).unwrap();
        let lifted = lift(&g, &[0, 4], d, &limits()).unwrap();
        assert_eq!(lifted.set.len(), 2);
        assert!(lifted.set.is_ddc(&limits()).unwrap());
        assert!(lifted.achieved_diameter <= 2 * d as usize);
        assert_eq!(g.phi(&lifted.lifted_words[0]), 0);
        assert_eq!(g.phi(&lifted.lifted_words[1]), 4);
    }

    #[test]
    fn lift_preconditions() {
        let g = z7();
        assert!(matches!(
            lift(&g, &[0, 1, 2], 3, &limits()),
            Err(Error::NotADdc)
        ));
        assert!(matches!(
            lift(&g, &[1, 2, 4], 2, &limits()),
            Err(Error::DiameterTooSmall { group_diameter: 3, .. })
        ));
        assert!(matches!(
            is_ddc_in_group(&g, &[9]),
            Err(Error::UnknownElement(9))
        ));
    }
}
