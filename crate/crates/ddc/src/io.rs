//! The DDC file format: an optional `# ddc n=<N>` header, one word per line
//! in canonical text form, `#` lines ignored. When no header names the rank,
//! it is inferred from the largest letter index present.

use crate::check::DdcSet;
use crate::word::{parse_raw_letters, parse_word, GroupCtx, Word};
use crate::{Error, Result};
use std::path::Path;

pub fn read_ddc_str(contents: &str) -> Result<DdcSet> {
    let mut header_rank: Option<u16> = None;
    let mut lines: Vec<&str> = Vec::new();
    for line in contents.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(spec) = rest.strip_prefix("ddc") {
                for field in spec.split_whitespace() {
                    if let Some(v) = field.strip_prefix("n=") {
                        let n: u16 = v.parse().map_err(|_| {
                            Error::MalformedWord(format!("bad header rank {v:?}"))
                        })?;
                        header_rank = Some(n);
                    }
                }
            }
            continue;
        }
        lines.push(trimmed);
    }
    let rank = match header_rank {
        Some(n) => n,
        None => {
            let mut max_abs: u16 = 1;
            for line in &lines {
                for v in parse_raw_letters(line)? {
                    max_abs = max_abs.max(v.unsigned_abs());
                }
            }
            max_abs
        }
    };
    let ctx = GroupCtx::new(rank)?;
    let words: Vec<Word> = lines
        .iter()
        .map(|line| parse_word(line, &ctx))
        .collect::<Result<_>>()?;
    DdcSet::new(ctx, words)
}

pub fn read_ddc_file(path: &Path) -> Result<DdcSet> {
    let contents = std::fs::read_to_string(path)?;
    read_ddc_str(&contents)
}

/// Canonical rendering: header, then elements in canonical order. Identical
/// sets always serialize to identical bytes.
pub fn write_ddc_str(set: &DdcSet) -> String {
    let mut out = format!("# ddc n={}\n", set.ctx().rank());
    for w in set.elements() {
        out.push_str(&w.to_string());
        out.push('\n');
    }
    out
}

pub fn write_ddc_file(path: &Path, set: &DdcSet) -> Result<()> {
    std::fs::write(path, write_ddc_str(set))?;
    Ok(())
}
