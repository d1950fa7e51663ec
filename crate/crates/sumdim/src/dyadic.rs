//! Dyadic prefixes and unions of equal-width dyadic intervals.

use crate::bigcount::BigCount;
use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// The first `n` binary digits `x_1 ... x_n` of a point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BinaryWord {
    bits: Vec<bool>,
}

impl BinaryWord {
    pub fn new(bits: Vec<bool>) -> Self {
        BinaryWord { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Index of the dyadic cell of depth `len` the word names.
    pub fn value(&self) -> BigUint {
        let mut v = BigUint::zero();
        for &b in &self.bits {
            v <<= 1u32;
            if b {
                v += 1u32;
            }
        }
        v
    }

    /// The `n`-digit word naming cell `v`. Fails when `v >= 2^n`.
    pub fn from_value(v: &BigUint, n: usize) -> Result<Self> {
        if v.bits() > n as u64 {
            return Err(Error::Scale(format!("{v} does not fit in {n} digits")));
        }
        let bits = (0..n).rev().map(|i| v.bit(i as u64)).collect();
        Ok(BinaryWord { bits })
    }
}

/// A union of the intervals `[s, s + width) * 2^-depth` over `starts`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalCover {
    depth: u64,
    width: u64,
    starts: Vec<BigUint>,
}

/// Certified lower and upper bounds on a unit-cell count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellCountBracket {
    pub lower: BigCount,
    pub upper: BigCount,
}

impl CellCountBracket {
    pub fn exact(v: BigCount) -> Self {
        CellCountBracket { lower: v.clone(), upper: v }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

impl IntervalCover {
    pub fn new(depth: u64, width: u64, starts: impl IntoIterator<Item = BigUint>) -> Result<Self> {
        if width == 0 {
            return Err(Error::Invariant("cover width must be positive".into()));
        }
        let set: BTreeSet<BigUint> = starts.into_iter().collect();
        if set.is_empty() {
            return Err(Error::Invariant("cover needs at least one start".into()));
        }
        Ok(IntervalCover { depth, width, starts: set.into_iter().collect() })
    }

    pub fn from_u64(depth: u64, width: u64, starts: &[u64]) -> Result<Self> {
        Self::new(depth, width, starts.iter().map(|&s| BigUint::from(s)))
    }

    pub fn depth(&self) -> u64 {
        self.depth
    }

    pub fn width(&self) -> u64 {
        self.width
    }

    pub fn starts(&self) -> &[BigUint] {
        &self.starts
    }

    /// Cells of depth `j2` meeting some interval, as a width-1 cover.
    pub fn coarsen(&self, j2: u64) -> Result<IntervalCover> {
        if j2 > self.depth {
            return Err(Error::Scale(format!("cannot coarsen depth {} to {j2}", self.depth)));
        }
        let shift = self.depth - j2;
        let mut cells = BTreeSet::new();
        for s in &self.starts {
            let first = s >> shift;
            let last = (s + (self.width - 1)) >> shift;
            let mut c = first;
            while c <= last {
                cells.insert(c.clone());
                c += 1u32;
            }
        }
        Ok(IntervalCover { depth: j2, width: 1, starts: cells.into_iter().collect() })
    }

    /// Minkowski sum of two covers at the same depth.
    pub fn cover_sum(&self, other: &IntervalCover) -> Result<IntervalCover> {
        if self.depth != other.depth {
            return Err(Error::Scale(format!(
                "depth mismatch {} vs {}",
                self.depth, other.depth
            )));
        }
        let width = self.width + other.width;
        let starts = match (self.small_starts(), other.small_starts()) {
            (Some(a), Some(b)) => small_sumset(&a, &b).into_iter().map(BigUint::from).collect(),
            _ => {
                let mut set = BTreeSet::new();
                for a in &self.starts {
                    for b in &other.starts {
                        set.insert(a + b);
                    }
                }
                set.into_iter().collect()
            }
        };
        Ok(IntervalCover { depth: self.depth, width, starts })
    }

    fn small_starts(&self) -> Option<Vec<u64>> {
        let max = self.starts.last()?;
        if max.bits() > 28 {
            return None;
        }
        Some(self.starts.iter().map(|s| s.to_u64().unwrap()).collect())
    }

    /// `lower` counts starts, `upper` counts the cells of the union.
    pub fn cell_count(&self) -> CellCountBracket {
        let lower = BigCount::from_biguint(BigUint::from(self.starts.len()), crate::bigcount::Round::Down);
        let mut upper = BigUint::zero();
        let mut covered_to: Option<BigUint> = None; // exclusive end of the cells counted so far
        for s in &self.starts {
            let end = s + self.width;
            let from = match &covered_to {
                Some(c) if c > s => c.clone(),
                _ => s.clone(),
            };
            if end > from {
                upper += &end - &from;
                covered_to = Some(end);
            }
        }
        CellCountBracket { lower, upper: BigCount::Exact(upper) }
    }
}

/// Sumset of two sets of small integers through a bitset.
fn small_sumset(a: &[u64], b: &[u64]) -> Vec<u64> {
    let amax = *a.last().unwrap_or(&0) as usize;
    let bmax = *b.last().unwrap_or(&0) as usize;
    let words = (amax + bmax) / 64 + 1;
    let mut base = vec![0u64; amax / 64 + 1];
    for &x in a {
        base[x as usize / 64] |= 1 << (x % 64);
    }
    let mut out = vec![0u64; words];
    for &y in b {
        let (wshift, bshift) = (y as usize / 64, (y % 64) as u32);
        for (i, &w) in base.iter().enumerate() {
            if w == 0 {
                continue;
            }
            out[i + wshift] |= w << bshift;
            if bshift > 0 && i + wshift + 1 < words {
                out[i + wshift + 1] |= w >> (64 - bshift);
            }
        }
    }
    let mut res = Vec::new();
    for (i, &w) in out.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            let t = w.trailing_zeros() as u64;
            res.push(i as u64 * 64 + t);
            w &= w - 1;
        }
    }
    res
}
