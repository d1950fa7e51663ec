//! Digit patterns over {Zero, Free} and unions of them.
//!
//! Patterns are stored run-length encoded as repeated chunks, which is
//! what the block constructions produce and what lets the counting
//! engine work at depths far beyond explicit words.

use crate::error::{Error, Result};
use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Zero,
    Free,
}

impl Symbol {
    pub fn from_char(c: char) -> Result<Symbol> {
        match c {
            '0' => Ok(Symbol::Zero),
            'a' => Ok(Symbol::Free),
            _ => Err(Error::Parse(format!("unexpected pattern symbol {c:?}"))),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Symbol::Zero => '0',
            Symbol::Free => 'a',
        }
    }

    pub fn is_free(self) -> bool {
        self == Symbol::Free
    }
}

fn chunk_string(chunk: &[Symbol]) -> String {
    chunk.iter().map(|s| s.to_char()).collect()
}

fn parse_chunk(s: &str) -> Result<Vec<Symbol>> {
    s.chars().map(Symbol::from_char).collect()
}

/// `chunk` repeated `reps` times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub chunk: Vec<Symbol>,
    pub reps: u64,
}

impl Run {
    pub fn len(&self) -> u64 {
        self.chunk.len() as u64 * self.reps
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Serialize, Deserialize)]
struct RunRepr {
    chunk: String,
    reps: u64,
}

impl Serialize for Run {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RunRepr { chunk: chunk_string(&self.chunk), reps: self.reps }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Run {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = RunRepr::deserialize(d)?;
        let chunk = parse_chunk(&r.chunk).map_err(serde::de::Error::custom)?;
        if chunk.is_empty() {
            return Err(serde::de::Error::custom("empty chunk"));
        }
        Ok(Run { chunk, reps: r.reps })
    }
}

/// A word over {Zero, Free}; position 0 is the digit x_1.
#[derive(Clone, Debug, Default)]
pub struct DigitPattern {
    runs: Vec<Run>,
    len: u64,
}

impl Serialize for DigitPattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.runs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DigitPattern {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let runs = Vec::<Run>::deserialize(d)?;
        let mut p = DigitPattern::empty();
        for r in runs {
            p.push_run(r.chunk, r.reps);
        }
        Ok(p)
    }
}

impl DigitPattern {
    pub fn empty() -> Self {
        DigitPattern { runs: Vec::new(), len: 0 }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let chunk = parse_chunk(s)?;
        Ok(Self::repeat(&chunk, 1))
    }

    pub fn zeros(n: u64) -> Self {
        Self::repeat(&[Symbol::Zero], n)
    }

    pub fn free(n: u64) -> Self {
        Self::repeat(&[Symbol::Free], n)
    }

    pub fn repeat(chunk: &[Symbol], reps: u64) -> Self {
        let mut p = Self::empty();
        p.push_run(chunk.to_vec(), reps);
        p
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn push_run(&mut self, chunk: Vec<Symbol>, reps: u64) {
        if chunk.is_empty() || reps == 0 {
            return;
        }
        // a chunk made of one repeated symbol is stored as that symbol
        let (chunk, reps) = if chunk.iter().all(|&s| s == chunk[0]) {
            (vec![chunk[0]], reps * chunk.len() as u64)
        } else {
            (chunk, reps)
        };
        self.len += chunk.len() as u64 * reps;
        if let Some(last) = self.runs.last_mut() {
            if last.chunk == chunk {
                last.reps += reps;
                return;
            }
        }
        self.runs.push(Run { chunk, reps });
    }

    pub fn append(&mut self, other: &DigitPattern) {
        for r in &other.runs {
            self.push_run(r.chunk.clone(), r.reps);
        }
    }

    pub fn concat(mut self, other: &DigitPattern) -> Self {
        self.append(other);
        self
    }

    pub fn symbol_at(&self, pos: u64) -> Option<Symbol> {
        let mut start = 0u64;
        for r in &self.runs {
            let l = r.len();
            if pos < start + l {
                let off = (pos - start) % r.chunk.len() as u64;
                return Some(r.chunk[off as usize]);
            }
            start += l;
        }
        None
    }

    /// The sub-pattern on positions `[from, to)`.
    pub fn slice(&self, from: u64, to: u64) -> Result<DigitPattern> {
        if from > to || to > self.len {
            return Err(Error::Scale(format!(
                "slice [{from}, {to}) outside a pattern of length {}",
                self.len
            )));
        }
        let mut out = DigitPattern::empty();
        let mut start = 0u64;
        for r in &self.runs {
            let l = r.len();
            let (a, b) = (from.max(start), to.min(start + l));
            if a < b {
                let c = r.chunk.len() as u64;
                let (mut x, y) = (a - start, b - start);
                // leading partial chunk
                while x < y && x % c != 0 {
                    out.push_run(vec![r.chunk[(x % c) as usize]], 1);
                    x += 1;
                }
                let whole = (y - x) / c;
                out.push_run(r.chunk.clone(), whole);
                x += whole * c;
                while x < y {
                    out.push_run(vec![r.chunk[(x % c) as usize]], 1);
                    x += 1;
                }
            }
            start += l;
            if start >= to {
                break;
            }
        }
        Ok(out)
    }

    pub fn prefix(&self, j: u64) -> Result<DigitPattern> {
        self.slice(0, j)
    }

    /// First Free position at or after `from`.
    pub fn next_free(&self, from: u64) -> Option<u64> {
        let mut start = 0u64;
        for r in &self.runs {
            let l = r.len();
            if from < start + l {
                let c = r.chunk.len() as u64;
                let local = from.saturating_sub(start);
                let base = local - local % c;
                let hit = (local % c..c)
                    .find(|&t| r.chunk[t as usize].is_free())
                    .map(|t| base + t)
                    .or_else(|| r.chunk.iter().position(|s| s.is_free()).map(|t| base + c + t as u64));
                if let Some(t) = hit {
                    if t < l {
                        return Some(start + t);
                    }
                }
            }
            start += l;
        }
        None
    }

    /// Number of Free positions among the first `to`.
    pub fn free_count(&self, to: u64) -> u64 {
        let mut start = 0u64;
        let mut total = 0u64;
        for r in &self.runs {
            if start >= to {
                break;
            }
            let c = r.chunk.len() as u64;
            let per = r.chunk.iter().filter(|s| s.is_free()).count() as u64;
            let take = (to - start).min(r.len());
            total += per * (take / c);
            total += r.chunk[..(take % c) as usize].iter().filter(|s| s.is_free()).count() as u64;
            start += r.len();
        }
        total
    }

    /// Explicit symbols; meant for short patterns.
    pub fn to_symbols(&self) -> Vec<Symbol> {
        assert!(self.len <= 1 << 26, "pattern too long to materialize");
        let mut v = Vec::with_capacity(self.len as usize);
        for r in &self.runs {
            for _ in 0..r.reps {
                v.extend_from_slice(&r.chunk);
            }
        }
        v
    }

    /// The symbols as a plain string of '0' and 'a'; meant for short patterns.
    pub fn word(&self) -> String {
        self.to_symbols().into_iter().map(Symbol::to_char).collect()
    }

    /// Word equality, independent of how the runs are grouped.
    pub fn same_word(&self, other: &DigitPattern) -> bool {
        if self.len != other.len {
            return false;
        }
        match align(&[self, other], self.len) {
            Ok(pieces) => pieces.iter().all(|p| p.cols.iter().all(|c| c[0] == c[1])),
            Err(_) => self.to_symbols() == other.to_symbols(),
        }
    }
}

impl fmt::Display for DigitPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.runs.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if r.reps == 1 {
                write!(f, "{}", chunk_string(&r.chunk))?;
            } else {
                write!(f, "({})^{}", chunk_string(&r.chunk), r.reps)?;
            }
        }
        Ok(())
    }
}

/// Positions where every pattern is periodic with a common period:
/// `cols[t][i]` says whether pattern `i` is Free at offset `t`, and the
/// column block repeats `reps` times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub cols: Vec<Vec<bool>>,
    pub reps: u64,
}

impl Piece {
    pub fn len(&self) -> u64 {
        self.cols.len() as u64 * self.reps
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

const MAX_PERIOD: u64 = 1 << 16;

/// Splits positions `[0, len)` of several patterns into common periodic pieces.
pub fn align(patterns: &[&DigitPattern], len: u64) -> Result<Vec<Piece>> {
    for p in patterns {
        if p.len() < len {
            return Err(Error::Scale(format!("pattern of length {} read up to {len}", p.len())));
        }
    }
    let m = patterns.len();
    let mut run_idx = vec![0usize; m];
    let mut offset = vec![0u64; m];
    let mut pieces: Vec<Piece> = Vec::new();
    let mut pos = 0u64;
    while pos < len {
        let mut span = len - pos;
        let mut period = 1u64;
        for i in 0..m {
            let r = &patterns[i].runs[run_idx[i]];
            span = span.min(r.len() - offset[i]);
            period = period.lcm(&(r.chunk.len() as u64));
        }
        if period > MAX_PERIOD {
            return Err(Error::Construction(format!("common period {period} too large")));
        }
        let width = if span >= period { period } else { span };
        let reps = if span >= period { span / period } else { 1 };
        let cols: Vec<Vec<bool>> = (0..width)
            .map(|t| {
                (0..m)
                    .map(|i| {
                        let r = &patterns[i].runs[run_idx[i]];
                        let c = r.chunk.len() as u64;
                        r.chunk[((offset[i] + t) % c) as usize].is_free()
                    })
                    .collect()
            })
            .collect();
        let used = width * reps;
        match pieces.last_mut() {
            Some(last) if last.cols == cols => last.reps += reps,
            _ => pieces.push(Piece { cols, reps }),
        }
        pos += used;
        for i in 0..m {
            offset[i] += used;
            while run_idx[i] < patterns[i].runs.len()
                && offset[i] == patterns[i].runs[run_idx[i]].len()
            {
                run_idx[i] += 1;
                offset[i] = 0;
            }
        }
    }
    Ok(pieces)
}

/// A union of digit-pattern components truncated at `depth`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SetSpec {
    pub name: String,
    #[serde(default)]
    pub params: serde_json::Value,
    /// Block boundaries n_1 < n_2 < ... when built from a schedule.
    #[serde(default)]
    pub scales: Option<Vec<u64>>,
    /// Number of blocks per schedule cycle.
    #[serde(default)]
    pub period: Option<u64>,
    pub depth: u64,
    pub components: Vec<DigitPattern>,
}

impl SetSpec {
    pub fn new(name: &str, depth: u64, components: Vec<DigitPattern>) -> Result<Self> {
        let s = SetSpec {
            name: name.to_string(),
            params: serde_json::Value::Null,
            scales: None,
            period: None,
            depth,
            components,
        };
        s.check()?;
        Ok(s)
    }

    pub fn from_strings(name: &str, words: &[&str]) -> Result<Self> {
        let comps = words.iter().map(|w| DigitPattern::parse(w)).collect::<Result<Vec<_>>>()?;
        let depth = comps.first().map(|c| c.len()).unwrap_or(0);
        Self::new(name, depth, comps)
    }

    pub fn check(&self) -> Result<()> {
        if self.depth == 0 {
            return Err(Error::Construction("depth must be positive".into()));
        }
        if self.components.is_empty() {
            return Err(Error::Construction("a set needs at least one component".into()));
        }
        for (i, c) in self.components.iter().enumerate() {
            if c.len() != self.depth {
                return Err(Error::Construction(format!(
                    "component {i} has length {} but depth is {}",
                    c.len(),
                    self.depth
                )));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: SetSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        s.check()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn check_scale(&self, j: u64) -> Result<()> {
        if j > self.depth {
            return Err(Error::Scale(format!("scale {j} exceeds depth {}", self.depth)));
        }
        Ok(())
    }

    /// Indices of the components whose first `j` digits are pairwise distinct.
    pub fn distinct_components(&self, j: u64) -> Result<Vec<usize>> {
        self.check_scale(j)?;
        let refs: Vec<&DigitPattern> = self.components.iter().collect();
        let pieces = align(&refs, j)?;
        let mut seen: BTreeMap<Vec<(u64, Vec<bool>)>, usize> = BTreeMap::new();
        let mut keep = Vec::new();
        for i in 0..self.components.len() {
            let key: Vec<(u64, Vec<bool>)> =
                pieces.iter().map(|p| (p.reps, p.cols.iter().map(|c| c[i]).collect())).collect();
            if !seen.contains_key(&key) {
                seen.insert(key, i);
                keep.push(i);
            }
        }
        Ok(keep)
    }

    /// Block boundaries at or below the depth, and the depth itself.
    pub fn boundaries(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self
            .scales
            .iter()
            .flatten()
            .copied()
            .filter(|&n| n >= 1 && n <= self.depth)
            .collect();
        v.push(self.depth);
        v.sort_unstable();
        v.dedup();
        v
    }
}
