//! Block parameters and the digit blocks t_*(k) filling [n_k, n_{k+1}).

use super::scales::ScaleSequence;
use super::targets::{DimensionTargets, Q};
use crate::error::{Error, Result};
use crate::pattern::{DigitPattern, Symbol};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Block kinds; indices are 1-based as in the schedules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BlockKind {
    Alpha(u8),
    Beta(u8),
    Gamma(u8),
    /// Zeros from n_k up to the star floor of n_k/α_j, free afterwards.
    IntervalZero(u8),
    Free,
}

impl BlockKind {
    pub fn index(self) -> Option<u8> {
        match self {
            BlockKind::Alpha(i) | BlockKind::Beta(i) | BlockKind::Gamma(i) | BlockKind::IntervalZero(i) => Some(i),
            BlockKind::Free => None,
        }
    }

    /// Swaps indices 1 and 2.
    pub fn specular(self) -> Self {
        let sw = |i: u8| match i {
            1 => 2,
            2 => 1,
            x => x,
        };
        match self {
            BlockKind::Alpha(i) => BlockKind::Alpha(sw(i)),
            BlockKind::Beta(i) => BlockKind::Beta(sw(i)),
            BlockKind::Gamma(i) => BlockKind::Gamma(sw(i)),
            other => other,
        }
    }

    /// Short name such as "a1", "b2", "g3", "z1" or "free".
    pub fn code(self) -> String {
        match self {
            BlockKind::Alpha(i) => format!("a{i}"),
            BlockKind::Beta(i) => format!("b{i}"),
            BlockKind::Gamma(i) => format!("g{i}"),
            BlockKind::IntervalZero(i) => format!("z{i}"),
            BlockKind::Free => "free".into(),
        }
    }

    pub fn from_code(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown block kind {s:?}"));
        if s == "free" {
            return Ok(BlockKind::Free);
        }
        let mut ch = s.chars();
        let tag = ch.next().ok_or_else(bad)?;
        let i: u8 = ch.as_str().parse().map_err(|_| bad())?;
        if !(1..=3).contains(&i) {
            return Err(bad());
        }
        match tag {
            'a' => Ok(BlockKind::Alpha(i)),
            'b' => Ok(BlockKind::Beta(i)),
            'g' => Ok(BlockKind::Gamma(i)),
            'z' => Ok(BlockKind::IntervalZero(i)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code())
    }
}

/// Which ratio sets the length of the zero run in α blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DVariant {
    /// d_i(k) from β_i/α_i.
    LowerBoxOnly,
    /// d_i(k) from γ_i/α_i.
    Full,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockParams {
    pub k: u64,
    pub l: u64,
    pub m: u64,
    pub p: Option<u64>,
    pub q: Option<u64>,
    pub s: Option<u64>,
    pub v: Option<u64>,
    /// `d[i-1]` is d_i(k), a multiple of k.
    pub d: Vec<u64>,
}

fn floor_mul(k: u64, x: &Q) -> u64 {
    // x in [0,1], so the product is small and nonnegative
    let n = (*x.numer() as i128) * k as i128;
    (n / *x.denom() as i128) as u64
}

/// [n/α]_* as defined for the interval examples: min(⌊n/α⌋, gap), or i·n when α = 0.
pub fn star_floor(n: u64, alpha: &Q, gap: u64, i: u64) -> u64 {
    if alpha.is_zero() {
        i.saturating_mul(n)
    } else {
        floor_div(n, alpha).min(gap)
    }
}

/// ⌊n/α⌋ for α > 0.
fn floor_div(n: u64, alpha: &Q) -> u64 {
    let num = n as i128 * *alpha.denom() as i128;
    (num / *alpha.numer() as i128).min(u64::MAX as i128) as u64
}

/// First position after the zero run of an interval-zero block at n_i:
/// min(⌊n_i/α⌋, n_{i+1}), or min(i·n_i, n_{i+1}) when α = 0.
pub fn zero_run_end(n: u64, next: u64, alpha: &Q, i: u64) -> u64 {
    let end = if alpha.is_zero() { i.saturating_mul(n) } else { floor_div(n, alpha) };
    end.clamp(n, next)
}

fn d_value(k: u64, n_k: u64, alpha: &Q, top: &Q) -> u64 {
    if alpha.is_zero() {
        return k.saturating_mul(n_k);
    }
    // k·⌊n_k(top/α − 1)/k⌋ with exact rationals
    let r = (*top / *alpha - Q::from(1)) * Q::from(n_k as i64) / Q::from(k as i64);
    let f = r.floor().to_integer();
    k.saturating_mul(f.max(0) as u64)
}

/// All parameters of block index k, rejecting targets whose floors make a
/// three-fold template ill-defined.
pub fn block_params(k: u64, t: &DimensionTargets, scales: &ScaleSequence, variant: DVariant) -> Result<BlockParams> {
    let bp = raw_params(k, t, scales, variant)?;
    check_params(&bp)?;
    Ok(bp)
}

/// Like `block_params`, but pulls s_k and v_k into [m_k, l_k+m_k] and
/// [q_k, p_k+q_k] where the floors leave them outside by rounding.
/// Returns whether anything moved.
pub fn block_params_clamped(
    k: u64,
    t: &DimensionTargets,
    scales: &ScaleSequence,
    variant: DVariant,
) -> Result<(BlockParams, bool)> {
    let mut bp = raw_params(k, t, scales, variant)?;
    let mut moved = false;
    if let Some(s) = bp.s {
        let c = s.clamp(bp.m, bp.l + bp.m);
        moved |= c != s;
        bp.s = Some(c);
    }
    if let (Some(v), Some(p), Some(q)) = (bp.v, bp.p, bp.q) {
        let c = v.clamp(q, p + q);
        moved |= c != v;
        bp.v = Some(c);
    }
    check_params(&bp)?;
    Ok((bp, moved))
}

fn raw_params(k: u64, t: &DimensionTargets, scales: &ScaleSequence, variant: DVariant) -> Result<BlockParams> {
    if k == 0 {
        return Err(Error::Construction("block indices start at 1".into()));
    }
    let n_k = scales.at(k as usize)?;
    if t.alpha.len() < 2 || t.beta.len() < 2 {
        return Err(Error::Construction("block constructions need α and β of length at least 2".into()));
    }
    let (tops, sym) = match variant {
        DVariant::LowerBoxOnly => (&t.beta, "β"),
        DVariant::Full => (&t.gamma, "γ"),
    };
    let na = t.alpha.len().min(3);
    if tops.len() < na {
        return Err(Error::Construction(format!("zero runs of α blocks need {sym} of length {na}")));
    }
    let g = |i: usize| t.gamma.get(i).map(|x| floor_mul(k, x));
    let three = t.alpha.len() >= 3 && t.beta.len() >= 3;
    let d = (0..na)
        .map(|i| d_value(k, n_k, &t.alpha[i], &tops[i]))
        .collect();
    Ok(BlockParams {
        k,
        l: floor_mul(k, &t.beta[0]),
        m: floor_mul(k, &t.beta[1]),
        p: g(0),
        q: g(1),
        s: if three { Some(floor_mul(k, &t.beta[2])) } else { None },
        v: if three && t.gamma.len() >= 3 { g(2) } else { None },
        d,
    })
}

fn check_params(bp: &BlockParams) -> Result<()> {
    let k = bp.k;
    let fail = |c: &str, detail: String| Err(Error::Admissibility(format!("{c} at k = {k}: {detail}")));
    if !(bp.l <= bp.m && bp.m <= k) {
        return fail("l_k ≤ m_k ≤ k", format!("l = {}, m = {}", bp.l, bp.m));
    }
    if let (Some(p), Some(q)) = (bp.p, bp.q) {
        if !(p <= q && q <= k) {
            return fail("p_k ≤ q_k ≤ k", format!("p = {p}, q = {q}"));
        }
    }
    if let Some(s) = bp.s {
        if s < bp.m {
            return fail("m_k ≤ s_k", format!("m = {}, s = {s}", bp.m));
        }
        if s > bp.l + bp.m {
            return fail("s_k ≤ l_k + m_k", format!("l = {}, m = {}, s = {s}", bp.l, bp.m));
        }
    }
    if let (Some(v), Some(p), Some(q)) = (bp.v, bp.p, bp.q) {
        if v < q {
            return fail("q_k ≤ v_k", format!("q = {q}, v = {v}"));
        }
        if v > p + q {
            return fail("v_k ≤ p_k + q_k", format!("p = {p}, q = {q}, v = {v}"));
        }
    }
    Ok(())
}

fn word(parts: &[(Symbol, u64)]) -> Vec<Symbol> {
    parts.iter().flat_map(|&(s, n)| std::iter::repeat(s).take(n as usize)).collect()
}

/// One period of the repeated part of a block, of length k.
pub fn chunk(kind: BlockKind, bp: &BlockParams) -> Result<Vec<Symbol>> {
    use Symbol::{Free as A, Zero as Z};
    let k = bp.k;
    let need = |x: Option<u64>, name: &str| {
        x.ok_or_else(|| Error::Construction(format!("{kind} blocks need {name}, which the targets do not define")))
    };
    let (l, m) = (bp.l, bp.m);
    let w = match kind {
        BlockKind::Alpha(1) | BlockKind::Beta(1) => word(&[(A, l), (Z, k - l)]),
        BlockKind::Alpha(2) | BlockKind::Beta(2) => word(&[(Z, m - l), (A, l), (Z, k - m)]),
        BlockKind::Alpha(3) | BlockKind::Beta(3) => {
            let s = need(bp.s, "s_k")?;
            word(&[(Z, m - l), (A, l + m - s), (Z, s - m), (A, s - m), (Z, k - s)])
        }
        BlockKind::Gamma(i) => {
            let p = need(bp.p, "p_k")?;
            let q = need(bp.q, "q_k")?;
            match i {
                1 => word(&[(A, p), (Z, k - p)]),
                2 => word(&[(Z, q - p), (A, p), (Z, k - q)]),
                3 => {
                    let v = need(bp.v, "v_k")?;
                    word(&[(Z, q - p), (A, p + q - v), (Z, v - q), (A, v - q), (Z, k - v)])
                }
                _ => return Err(Error::Construction(format!("no block kind {kind}"))),
            }
        }
        _ => return Err(Error::Construction(format!("{kind} blocks have no chunk template"))),
    };
    debug_assert_eq!(w.len() as u64, k);
    Ok(w)
}

/// The digits of block k, of length n_{k+1} − n_k.
pub fn make_block(
    kind: BlockKind,
    k: u64,
    bp: &BlockParams,
    t: &DimensionTargets,
    scales: &ScaleSequence,
) -> Result<DigitPattern> {
    if bp.k != k {
        return Err(Error::Construction(format!("parameters of block {} used for block {k}", bp.k)));
    }
    let n_k = scales.at(k as usize)?;
    let gap = scales.gap(k as usize)?;
    match kind {
        BlockKind::Free => return Ok(DigitPattern::free(gap)),
        BlockKind::IntervalZero(j) => {
            let alpha = t
                .alpha
                .get(j as usize - 1)
                .ok_or_else(|| Error::Construction(format!("{kind} needs α_{j}")))?;
            let end = zero_run_end(n_k, n_k + gap, alpha, k);
            return Ok(DigitPattern::zeros(end - n_k).concat(&DigitPattern::free(n_k + gap - end)));
        }
        _ => {}
    }
    if gap % k != 0 {
        return Err(Error::Construction(format!("{k} does not divide the block length {gap}")));
    }
    let c = chunk(kind, bp)?;
    match kind {
        BlockKind::Alpha(i) => {
            let d = *bp
                .d
                .get(i as usize - 1)
                .ok_or_else(|| Error::Construction(format!("{kind} needs d_{i}(k)")))?;
            if d >= gap {
                return Ok(DigitPattern::zeros(gap));
            }
            if d % k != 0 || (gap - d) % k != 0 {
                return Err(Error::Construction(format!("{k} does not divide d_{i}(k) = {d} and the remainder")));
            }
            Ok(DigitPattern::zeros(d).concat(&DigitPattern::repeat(&c, (gap - d) / k)))
        }
        _ => Ok(DigitPattern::repeat(&c, gap / k)),
    }
}

/// Exact fraction of free symbols in a chunk template.
pub fn chunk_frequency(kind: BlockKind, bp: &BlockParams) -> Result<Q> {
    let c = chunk(kind, bp)?;
    let free = c.iter().filter(|s| s.is_free()).count() as i64;
    Ok(Q::new(free, bp.k as i64))
}

pub fn describe_params(bp: &BlockParams) -> String {
    let o = |x: Option<u64>| x.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
    format!(
        "k={} l={} m={} p={} q={} s={} v={} d={:?}",
        bp.k,
        bp.l,
        bp.m,
        o(bp.p),
        o(bp.q),
        o(bp.s),
        o(bp.v),
        bp.d
    )
}
