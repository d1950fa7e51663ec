//! Brute-force reference for the carry automata: enumerate every point
//! prefix, then form the l-fold sumset of the prefix values directly.

use crate::automaton::cover_width;
use crate::bigcount::BigCount;
use crate::dyadic::{CellCountBracket, IntervalCover};
use crate::error::{Error, Result};
use crate::pattern::SetSpec;
use num_bigint::BigUint;
use num_traits::Zero;
use std::collections::BTreeSet;

pub const DEFAULT_ENUM_BUDGET: u64 = 1 << 24;

/// Distinct values of the first `j` digits over the union of components.
pub fn prefix_values(spec: &SetSpec, j: u64, budget: u64) -> Result<BTreeSet<BigUint>> {
    spec.check_scale(j)?;
    let mut out = BTreeSet::new();
    let mut enumerated = 0u64;
    for comp in &spec.components {
        let free: Vec<u64> = (0..j).filter(|&p| comp.symbol_at(p).is_some_and(|s| s.is_free())).collect();
        if free.len() >= 63 {
            return Err(Error::Budget(format!("{} free digits to enumerate", free.len())));
        }
        let words = 1u64 << free.len();
        enumerated = enumerated.saturating_add(words);
        if enumerated > budget {
            return Err(Error::Budget(format!("more than {budget} prefixes to enumerate")));
        }
        let weights: Vec<BigUint> = free.iter().map(|&p| BigUint::from(1u32) << (j - 1 - p)).collect();
        for mask in 0..words {
            let mut v = BigUint::zero();
            for (b, w) in weights.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    v += w;
                }
            }
            out.insert(v);
        }
    }
    Ok(out)
}

/// The cover of lA at scale j with the starts found by enumeration.
pub fn oracle_cover(spec: &SetSpec, fold: u32, j: u64, budget: u64) -> Result<IntervalCover> {
    if fold == 0 {
        return Err(Error::Config("fold must be at least 1".into()));
    }
    let values = prefix_values(spec, j, budget)?;
    // step i adds every prefix value to at most (i+1)·2^j partial sums
    let v = values.len() as f64;
    let cost: f64 = (1..fold).map(|i| v.powi(i as i32).min((i as f64 + 1.0) * 2f64.powi(j as i32)) * v).sum();
    if cost > budget as f64 {
        return Err(Error::Budget(format!(
            "{} prefixes need about {cost:.3e} additions for fold {fold}, over the budget {budget}",
            values.len()
        )));
    }
    let base = IntervalCover::new(j, 1, values)?;
    let mut acc = base.clone();
    for _ in 1..fold {
        acc = acc.cover_sum(&base)?;
    }
    IntervalCover::new(j, cover_width(fold), acc.starts().iter().cloned())
}

/// Exact number of distinct starts of lA at scale j.
pub fn brute_force_oracle(spec: &SetSpec, fold: u32, j: u64, budget: u64) -> Result<CellCountBracket> {
    let cover = oracle_cover(spec, fold, j, budget)?;
    Ok(CellCountBracket::exact(BigCount::from_u64(cover.starts().len() as u64)))
}
