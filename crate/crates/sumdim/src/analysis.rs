//! Finite-scale diagnostics: count traces with schedule predictions, sum
//! block frequencies, OFF traces and the interval check.

use crate::automaton::{combinations, min_branching, sum_cover_trace, CountMode, EngineConfig};
use crate::bigcount::BigCount;
use crate::constructions::blocks::{chunk, BlockKind, BlockParams};
use crate::constructions::targets::Q;
use crate::error::{Error, Result};
use crate::pattern::{align, DigitPattern, Piece, SetSpec};
use num_rational::Ratio;
use serde::Serialize;
use std::collections::BTreeSet;

/// Which scales a trace visits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScaleSelection {
    /// Block boundaries and the ends of zero runs inside blocks.
    Boundaries,
    /// Every scale 1..=depth.
    All,
    List(Vec<u64>),
}

impl ScaleSelection {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "boundaries" => Ok(ScaleSelection::Boundaries),
            "all" => Ok(ScaleSelection::All),
            _ => {
                let v = s
                    .split(',')
                    .map(|x| x.trim().parse::<u64>().map_err(|_| Error::Config(format!("bad scale list {s:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                Ok(ScaleSelection::List(v))
            }
        }
    }

    pub fn resolve(&self, spec: &SetSpec) -> Result<Vec<u64>> {
        let v: Vec<u64> = match self {
            ScaleSelection::Boundaries => default_scales(spec),
            ScaleSelection::All => {
                if spec.depth > 1 << 16 {
                    return Err(Error::Config(format!("'all' scales requested at depth {}", spec.depth)));
                }
                (1..=spec.depth).collect()
            }
            ScaleSelection::List(v) => v.clone(),
        };
        let mut v: Vec<u64> = v.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        if v.first() == Some(&0) {
            v.remove(0);
        }
        if let Some(&j) = v.iter().find(|&&j| j > spec.depth) {
            return Err(Error::Scale(format!("scale {j} exceeds depth {}", spec.depth)));
        }
        Ok(v)
    }
}

/// First free position of each component inside each block that starts
/// with zeros.
pub fn zero_run_ends(spec: &SetSpec) -> Vec<u64> {
    let bounds = spec.boundaries();
    let mut out = BTreeSet::new();
    let mut starts = vec![0u64];
    starts.extend(bounds.iter().copied());
    for w in starts.windows(2) {
        let (a, b) = (w[0], w[1]);
        for c in &spec.components {
            if c.symbol_at(a).is_some_and(|s| !s.is_free()) {
                if let Some(p) = c.next_free(a) {
                    if p < b && p > 0 {
                        out.insert(p);
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Block boundaries, zero-run ends and the depth.
pub fn default_scales(spec: &SetSpec) -> Vec<u64> {
    let mut s: BTreeSet<u64> = spec.boundaries().into_iter().collect();
    s.extend(zero_run_ends(spec));
    s.into_iter().filter(|&j| j >= 1).collect()
}

fn scale_points(pieces: &[Piece], scales: &[u64], mut on_col: impl FnMut(&[bool]) -> u64) -> Vec<u64> {
    // counts of columns accepted by `on_col` in [0, j) for each sorted j
    let mut out = Vec::with_capacity(scales.len());
    let mut si = 0;
    let mut pos = 0u64;
    let mut acc = 0u64;
    while si < scales.len() && scales[si] == 0 {
        out.push(0);
        si += 1;
    }
    for piece in pieces {
        if si >= scales.len() {
            break;
        }
        let per: Vec<u64> = piece.cols.iter().map(|c| on_col(c)).collect();
        let p = per.len() as u64;
        let total: u64 = per.iter().sum();
        let end = pos + piece.len();
        while si < scales.len() && scales[si] <= end {
            let off = scales[si] - pos;
            let partial: u64 = per[..(off % p) as usize].iter().sum();
            out.push(acc + total * (off / p) + partial);
            si += 1;
        }
        acc += total * piece.reps;
        pos = end;
    }
    out
}

/// For each scale, the largest number of positions below it where some
/// addend of an l-tuple of components is free, and a tuple attaining it.
pub fn max_or_free(spec: &SetSpec, fold: u32, scales: &[u64]) -> Result<Vec<(u64, Vec<usize>)>> {
    let top = scales.iter().copied().max().unwrap_or(0);
    if top == 0 {
        return Ok(scales.iter().map(|_| (0, vec![0; fold as usize])).collect());
    }
    let keep = spec.distinct_components(top)?;
    let pats: Vec<&DigitPattern> = keep.iter().map(|&i| &spec.components[i]).collect();
    let pieces = align(&pats, top)?;
    let mut best: Vec<(u64, Vec<usize>)> = vec![(0, Vec::new()); scales.len()];
    for combo in combinations(pats.len(), fold) {
        let counts = scale_points(&pieces, scales, |col| combo.iter().any(|&i| col[i]) as u64);
        for (b, c) in best.iter_mut().zip(counts) {
            if c > b.0 || b.1.is_empty() {
                *b = (c, combo.iter().map(|&i| keep[i]).collect());
            }
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, Serialize)]
pub struct CountRecord {
    pub j: u64,
    pub fold: u32,
    pub lower: BigCount,
    pub upper: BigCount,
    pub exp_lower: f64,
    pub exp_upper: f64,
    /// Schedule prediction: free positions of the extremal tuple, over j.
    pub predicted_free: u64,
    pub predicted: f64,
    pub mode: CountMode,
    pub fell_back: bool,
}

impl CountRecord {
    pub fn mode_label(&self) -> &'static str {
        match (self.mode, self.fell_back) {
            (CountMode::Exact, _) => "exact",
            (CountMode::Bracket, true) => "bracket-fallback",
            (CountMode::Bracket, false) => "bracket",
        }
    }

    /// lower ≤ 2^F ≤ upper, compared exactly.
    pub fn contains_prediction(&self) -> bool {
        let p = BigCount::pow2(self.predicted_free);
        self.lower <= p && p <= self.upper
    }

    pub fn predicted_ratio(&self) -> Ratio<u64> {
        Ratio::new(self.predicted_free, self.j.max(1))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CountTrace {
    pub spec: String,
    pub fold: u32,
    pub scales: Vec<u64>,
    pub entries: Vec<CountRecord>,
}

fn exponent(c: &BigCount, j: u64) -> f64 {
    if j == 0 {
        0.0
    } else {
        c.log2() / j as f64
    }
}

/// Certified count brackets of lA per scale with the schedule prediction.
pub fn count_trace(spec: &SetSpec, fold: u32, scales: &[u64], mode: CountMode, cfg: &EngineConfig) -> Result<CountTrace> {
    let scales: Vec<u64> = scales.iter().copied().filter(|&j| j >= 1).collect::<BTreeSet<_>>().into_iter().collect();
    let counts = sum_cover_trace(spec, fold, &scales, mode, cfg)?;
    let pred = max_or_free(spec, fold, &scales)?;
    let entries = counts
        .into_iter()
        .zip(pred)
        .map(|(r, (f, _))| {
            let b = r.box_bracket();
            CountRecord {
                j: r.scale,
                fold,
                exp_lower: exponent(&b.lower, r.scale),
                exp_upper: exponent(&b.upper, r.scale),
                lower: b.lower,
                upper: b.upper,
                predicted_free: f,
                predicted: f as f64 / r.scale as f64,
                mode: r.mode,
                fell_back: r.fell_back,
            }
        })
        .collect();
    Ok(CountTrace { spec: spec.name.clone(), fold, scales, entries })
}

/// Decimal with 12 significant digits.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { format!("{x}") };
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (11 - mag).max(0) as usize;
    format!("{:.*}", decimals, x)
}

pub const TRACE_COLUMNS: &str = "j,fold,lower,upper,exp_lower,exp_upper,predicted,mode";

pub fn trace_csv_rows(trace: &CountTrace) -> String {
    let mut s = String::new();
    for e in &trace.entries {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            e.j,
            e.fold,
            e.lower,
            e.upper,
            sig12(e.exp_lower),
            sig12(e.exp_upper),
            sig12(e.predicted),
            e.mode_label()
        ));
    }
    s
}

// ---------------------------------------------------------------------------
// Sum blocks.

/// Fr_a of the positionwise union of the chunk templates, the carry-free
/// sum-block convention a+a = a+0 = a.
pub fn sum_block_frequency(kinds: &[BlockKind], bp: &BlockParams) -> Result<Q> {
    if kinds.is_empty() {
        return Err(Error::Config("a sum block needs at least one summand".into()));
    }
    let chunks = kinds.iter().map(|&k| chunk(k, bp)).collect::<Result<Vec<_>>>()?;
    let free = (0..bp.k as usize).filter(|&t| chunks.iter().any(|c| c[t].is_free())).count();
    Ok(Q::new(free as i64, bp.k as i64))
}

#[derive(Clone, Debug, Serialize)]
pub struct FrequencyRecord {
    pub k: u64,
    pub kinds: Vec<String>,
    /// (component indices, frequency) per l-tuple.
    pub sums: Vec<(Vec<usize>, String)>,
    pub extremal: Vec<usize>,
    pub max_frequency: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct FrequencyReport {
    pub fold: u32,
    pub records: Vec<FrequencyRecord>,
}

/// Sum-block frequencies of every l-tuple of schedule rows at each block index.
pub fn frequency_report(
    rows: &[Vec<BlockKind>],
    params: &[BlockParams],
    fold: u32,
) -> Result<FrequencyReport> {
    let period = rows.first().map(|r| r.len()).unwrap_or(0);
    if period == 0 {
        return Err(Error::Config("empty schedule".into()));
    }
    let mut records = Vec::with_capacity(params.len());
    for bp in params {
        let phase = (bp.k % period as u64) as usize;
        let kinds: Vec<BlockKind> = rows.iter().map(|r| r[phase]).collect();
        let mut sums = Vec::new();
        let mut best: Option<(Vec<usize>, Q)> = None;
        for combo in combinations(rows.len(), fold) {
            let ks: Vec<BlockKind> = combo.iter().map(|&i| kinds[i]).collect();
            let f = sum_block_frequency(&ks, bp)?;
            if best.as_ref().map_or(true, |b| f > b.1) {
                best = Some((combo.clone(), f));
            }
            sums.push((combo, crate::constructions::targets::format_rational(&f)));
        }
        let (extremal, maxf) = best.expect("at least one tuple");
        records.push(FrequencyRecord {
            k: bp.k,
            kinds: kinds.iter().map(|k| k.code()).collect(),
            sums,
            extremal,
            max_frequency: crate::constructions::targets::format_rational(&maxf),
        });
    }
    Ok(FrequencyReport { fold, records })
}

// ---------------------------------------------------------------------------
// OFF traces.

#[derive(Clone, Debug, Serialize)]
pub struct OffRecord {
    pub n: u64,
    /// Least number of branching nodes along a length-n path.
    pub branching: u64,
    pub off: f64,
    /// Smallest OFF value seen up to this scale.
    pub running_min: f64,
}

/// OFF_n per scale from the mask automaton.
pub fn off_trace(spec: &SetSpec, scales: &[u64], cfg: &EngineConfig) -> Result<Vec<OffRecord>> {
    let scales: Vec<u64> = scales.iter().copied().filter(|&n| n >= 1).collect::<BTreeSet<_>>().into_iter().collect();
    let raw = min_branching(spec, &scales, cfg)?;
    let mut run = f64::INFINITY;
    Ok(raw
        .into_iter()
        .map(|(n, b)| {
            let off = b as f64 / n as f64;
            run = run.min(off);
            OffRecord { n, branching: b, off, running_min: run }
        })
        .collect())
}

/// Branching count of the path that follows one component and takes digit
/// 1 at each of its free positions, minimized over components.
///
/// Along that path a component stays consistent while its free set
/// contains the followed component's free set so far; a position branches
/// when some consistent component is free there.
pub fn greedy_branching(spec: &SetSpec, scales: &[u64]) -> Result<Vec<u64>> {
    let top = scales.iter().copied().max().unwrap_or(0);
    if top == 0 {
        return Ok(vec![0; scales.len()]);
    }
    let keep = spec.distinct_components(top)?;
    let pats: Vec<&DigitPattern> = keep.iter().map(|&i| &spec.components[i]).collect();
    let pieces = align(&pats, top)?;
    let m = pats.len();
    let mut best = vec![u64::MAX; scales.len()];
    for i in 0..m {
        let mut alive = vec![true; m];
        let mut out = Vec::with_capacity(scales.len());
        let mut si = 0;
        let mut pos = 0u64;
        let mut acc = 0u64;
        for piece in &pieces {
            if si >= scales.len() {
                break;
            }
            // the first period can only shrink the consistent set; later
            // periods repeat the same columns with a fixed set
            let p = piece.cols.len() as u64;
            let mut first = Vec::with_capacity(p as usize);
            for col in &piece.cols {
                let cost = (0..m).any(|c| alive[c] && col[c]) as u64;
                first.push(cost);
                if col[i] {
                    for c in 0..m {
                        if !col[c] {
                            alive[c] = false;
                        }
                    }
                }
            }
            let steady: Vec<u64> = piece.cols.iter().map(|col| (0..m).any(|c| alive[c] && col[c]) as u64).collect();
            let first_total: u64 = first.iter().sum();
            let steady_total: u64 = steady.iter().sum();
            let end = pos + piece.len();
            while si < scales.len() && scales[si] <= end {
                let off = scales[si] - pos;
                let v = if off <= p {
                    first[..off as usize].iter().sum()
                } else {
                    let rest = off - p;
                    first_total + steady_total * (rest / p) + steady[..(rest % p) as usize].iter().sum::<u64>()
                };
                out.push(acc + v);
                si += 1;
            }
            acc += first_total + steady_total * (piece.reps - 1);
            pos = end;
        }
        for (b, v) in best.iter_mut().zip(out) {
            *b = (*b).min(v);
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Interval check.

#[derive(Clone, Debug, Serialize)]
pub struct FreedomReport {
    pub holds: bool,
    /// Position from which the best tuple is free everywhere.
    pub j0: u64,
    pub tuple: Vec<usize>,
    /// Largest j0 accepted as eventually free.
    pub threshold: u64,
}

/// Whether some l-tuple of components is jointly free at every position
/// from some j0 on, with j0 before the last schedule cycle (or the middle
/// of the pattern when there is no schedule).
pub fn interval_freedom_check(spec: &SetSpec, fold: u32) -> Result<FreedomReport> {
    let keep = spec.distinct_components(spec.depth)?;
    let pats: Vec<&DigitPattern> = keep.iter().map(|&i| &spec.components[i]).collect();
    let pieces = align(&pats, spec.depth)?;
    let mut best: Option<(u64, Vec<usize>)> = None;
    for combo in combinations(pats.len(), fold) {
        // one past the last position where every addend is zero
        let mut pos = 0u64;
        let mut last_zero: Option<u64> = None;
        for piece in &pieces {
            let p = piece.cols.len() as u64;
            if let Some(t) = piece.cols.iter().rposition(|c| !combo.iter().any(|&i| c[i])) {
                last_zero = Some(pos + (piece.reps - 1) * p + t as u64);
            }
            pos += piece.len();
        }
        let j0 = last_zero.map_or(0, |z| z + 1);
        if best.as_ref().map_or(true, |b| j0 < b.0) {
            best = Some((j0, combo.iter().map(|&i| keep[i]).collect()));
        }
    }
    let (j0, tuple) = best.expect("at least one tuple");
    let threshold = match (&spec.scales, spec.period) {
        (Some(n), Some(period)) => {
            let b: Vec<u64> = n.iter().copied().filter(|&x| x <= spec.depth).collect();
            let blocks = b.len().saturating_sub(1);
            let cycle_start = blocks.saturating_sub(period as usize);
            if blocks >= period as usize {
                b[cycle_start]
            } else {
                0
            }
        }
        _ => spec.depth / 2,
    };
    Ok(FreedomReport { holds: j0 <= threshold && j0 < spec.depth, j0, tuple, threshold })
}
