//! Distinct difference configurations (DDCs) in free groups of finite rank.
//!
//! A subset `D` of a group is a DDC when the differences `g⁻¹h` over ordered
//! pairs of distinct elements are pairwise distinct. This crate provides exact
//! reduced-word arithmetic in the free group, streaming enumeration of
//! Cayley-graph balls and spheres, DDC verification with collision witnesses,
//! an explicit mirror construction, a randomized construct-then-repair
//! procedure, closed-form size bounds, exact maximum-DDC search at small
//! scale, and lifting of DDCs from finitely generated quotient groups.
pub mod bounds;
pub mod check;
pub mod construct;
pub mod enumerate;
pub mod io;
pub mod precise;
pub mod quotient;
pub mod rng;
pub mod search;
pub mod word;

pub use check::{CollisionClass, DdcSet};
pub use word::{GroupCtx, Letter, Word};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid letter {value}: must be nonzero with |value| <= rank {rank}")]
    InvalidLetter { value: i64, rank: u16 },
    #[error("rank {rank} too small: {needed}")]
    RankTooSmall { rank: u16, needed: &'static str },
    #[error("resource limit exceeded: {what} needs {needed}, limit is {limit}")]
    ResourceLimit {
        what: &'static str,
        needed: u128,
        limit: u64,
    },
    #[error("empty set")]
    EmptySet,
    #[error("elements do not all have the same length")]
    NotEquiLength,
    #[error("bad diameter {d}: {why}")]
    BadDiameter { d: u64, why: &'static str },
    #[error("malformed word: {0}")]
    MalformedWord(String),
    #[error("malformed group table: {0}")]
    MalformedTable(String),
    #[error("multiplication table not associative: witness triple ({a}, {b}, {c})")]
    NonAssociative { a: u64, b: u64, c: u64 },
    #[error("{count} element(s) unreachable from the identity via the generators")]
    UnreachableElements { count: u64 },
    #[error("unknown element id {0}")]
    UnknownElement(u64),
    #[error("input set is not a DDC in the group")]
    NotADdc,
    #[error("target diameter {d} is smaller than the group diameter {group_diameter}")]
    DiameterTooSmall { d: u32, group_diameter: u32 },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Guards for operations that enumerate elements or compare pairs.
///
/// `max_pairs` caps the number of ordered pairs a duplicate-difference scan
/// may visit; `max_elements` caps full materializations of spheres, balls and
/// construction outputs. `threads` partitions pair scans; results are
/// independent of its value.
#[derive(Debug, Clone)]
pub struct Limits {
    pub max_pairs: u64,
    pub max_elements: u64,
    pub threads: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_pairs: 1 << 31,
            max_elements: 10_000_000,
            threads: 1,
        }
    }
}

impl Limits {
    pub fn check_pairs(&self, needed: u128) -> Result<()> {
        if needed > self.max_pairs as u128 {
            return Err(Error::ResourceLimit {
                what: "ordered pair scan",
                needed,
                limit: self.max_pairs,
            });
        }
        Ok(())
    }

    pub fn check_elements(&self, needed: u128) -> Result<()> {
        if needed > self.max_elements as u128 {
            return Err(Error::ResourceLimit {
                what: "element materialization",
                needed,
                limit: self.max_elements,
            });
        }
        Ok(())
    }
}
