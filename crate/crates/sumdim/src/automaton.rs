//! Counting distinct prefixes and distinct sum prefixes of a `SetSpec`.
//!
//! The start set at scale j is `S = { sum_i floor(2^j x_i) : x_i in A }`,
//! the left endpoints of the width-(l+1) cover of lA. Two carry automata
//! produce the binary words of S: one reads digits from the least
//! significant end and carries forward, the other reads from the top and
//! guesses the carry arriving from below. The second one yields every
//! scale of a trace in a single pass.

use crate::bigcount::{BigCount, Round, Tally};
use crate::dyadic::CellCountBracket;
use crate::engine::{check_budget, Dist, Interner, MinPlus, Runner, Semiring, Stepper};
use crate::error::{Error, Result};
use crate::pattern::{align, DigitPattern, Piece, SetSpec};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

#[derive(Clone, Debug)]
pub struct EngineConfig {
    /// Maximum number of subset states before exact mode gives up.
    pub state_budget: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { state_budget: 1_000_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMode {
    Exact,
    Bracket,
}

impl CountMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CountMode::Exact => "exact",
            CountMode::Bracket => "bracket",
        }
    }
}

#[derive(Clone, Debug)]
pub struct DistinctCountResult {
    pub scale: u64,
    pub fold: u32,
    /// Width of the cover intervals, in cells.
    pub width: u64,
    /// Mode actually used.
    pub mode: CountMode,
    /// Exact mode ran out of states and the bracket was used instead.
    pub fell_back: bool,
    /// Bounds on the number of distinct starts.
    pub starts: CellCountBracket,
    /// Upper bound on the unit cells covered by the width-`width` cover.
    pub cells_upper: BigCount,
    pub states: usize,
    pub combinations: usize,
}

impl DistinctCountResult {
    /// Certified bracket on the number of scale-j cells meeting lA.
    pub fn box_bracket(&self) -> CellCountBracket {
        CellCountBracket { lower: self.starts.lower.clone(), upper: self.cells_upper.clone() }
    }
}

/// Cover width used for l-fold sums: l cells for the sum of l cells,
/// plus one cell of slack for truncated tails.
pub fn cover_width(fold: u32) -> u64 {
    fold as u64 + 1
}

// ---------------------------------------------------------------------------
// Component-mask automaton (most significant digit first).

struct MaskDfa {
    cols: Vec<Vec<u64>>,
    states: Interner<Vec<u64>>,
    budget: usize,
}

impl Stepper for MaskDfa {
    fn step(&mut self, s: u32, col: u32) -> Result<Vec<(u32, u8)>> {
        let inter: Vec<u64> =
            self.states.get(s).iter().zip(&self.cols[col as usize]).map(|(a, b)| a & b).collect();
        if inter.iter().all(|&w| w == 0) {
            return Ok(vec![(s, 0)]);
        }
        let t = self.states.intern(inter);
        check_budget(self.states.len(), self.budget)?;
        Ok(vec![(s, 1), (t, 1)])
    }

    fn state_count(&self) -> usize {
        self.states.len()
    }
}

fn bitset(flags: &[bool]) -> Vec<u64> {
    let mut v = vec![0u64; flags.len().div_ceil(64).max(1)];
    for (i, &f) in flags.iter().enumerate() {
        if f {
            v[i / 64] |= 1 << (i % 64);
        }
    }
    v
}

/// Pieces of the distinct components, split at each requested scale.
fn segments(patterns: &[&DigitPattern], scales: &[u64]) -> Result<Vec<Vec<Piece>>> {
    let mut out = Vec::with_capacity(scales.len());
    let mut prev = 0u64;
    for &j in scales {
        let sliced: Vec<DigitPattern> =
            patterns.iter().map(|p| p.slice(prev, j)).collect::<Result<Vec<_>>>()?;
        let refs: Vec<&DigitPattern> = sliced.iter().collect();
        out.push(if j > prev { align(&refs, j - prev)? } else { Vec::new() });
        prev = j;
    }
    Ok(out)
}

fn sorted_scales(spec: &SetSpec, scales: &[u64]) -> Result<Vec<u64>> {
    let mut v = scales.to_vec();
    v.sort_unstable();
    v.dedup();
    for &j in &v {
        spec.check_scale(j)?;
    }
    Ok(v)
}

fn mask_pass<S: Semiring>(
    spec: &SetSpec,
    scales: &[u64],
    cfg: &EngineConfig,
    init: S,
) -> Result<(Vec<u64>, Vec<Dist<S>>)> {
    let scales = sorted_scales(spec, scales)?;
    let top = scales.last().copied().unwrap_or(0);
    let keep = spec.distinct_components(top)?;
    let pats: Vec<&DigitPattern> = keep.iter().map(|&i| &spec.components[i]).collect();
    let segs = segments(&pats, &scales)?;
    let mut dfa = MaskDfa { cols: Vec::new(), states: Interner::default(), budget: cfg.state_budget };
    let mut colids: Interner<Vec<u64>> = Interner::default();
    let mut runner: Runner<S> = Runner::default();
    let all = bitset(&vec![true; pats.len()]);
    let mut dist: Dist<S> = BTreeMap::new();
    dist.insert(dfa.states.intern(all), init);
    let mut snaps = Vec::with_capacity(scales.len());
    for seg in segs {
        for piece in seg {
            let ids: Vec<u32> = piece
                .cols
                .iter()
                .map(|c| {
                    let id = colids.intern(bitset(c));
                    if id as usize == dfa.cols.len() {
                        dfa.cols.push(colids.get(id).clone());
                    }
                    id
                })
                .collect();
            let chunk = runner.chunk_id(ids);
            dist = runner.advance(&mut dfa, dist, chunk, piece.reps)?;
        }
        snaps.push(dist.clone());
    }
    Ok((scales, snaps))
}

/// Exact number of distinct length-j prefixes of points of the union.
pub fn prefix_count(spec: &SetSpec, j: u64) -> Result<CellCountBracket> {
    Ok(prefix_counts(spec, &[j], &EngineConfig::default())?.remove(0).1)
}

/// Prefix counts at several scales in one pass, sorted by scale.
pub fn prefix_counts(spec: &SetSpec, scales: &[u64], cfg: &EngineConfig) -> Result<Vec<(u64, CellCountBracket)>> {
    let (scales, snaps) = mask_pass(spec, scales, cfg, Tally::one())?;
    Ok(scales
        .into_iter()
        .zip(snaps)
        .map(|(j, d)| {
            let t = d.values().fold(Tally::zero(), |a, v| a.add(v));
            (j, CellCountBracket { lower: t.lo, upper: t.hi })
        })
        .collect())
}

/// Minimum number of branching nodes along the first `n` digits of a point.
pub fn min_branching(spec: &SetSpec, scales: &[u64], cfg: &EngineConfig) -> Result<Vec<(u64, u64)>> {
    let (scales, snaps) = mask_pass(spec, scales, cfg, MinPlus(0))?;
    Ok(scales
        .into_iter()
        .zip(snaps)
        .map(|(n, d)| (n, d.values().map(|v| v.0).min().unwrap_or(0)))
        .collect())
}

/// OFF_n: the least average number of branching nodes along a path of length n.
pub fn branching_min_average(spec: &SetSpec, n: u64) -> Result<Ratio<u64>> {
    if n == 0 {
        return Err(Error::Scale("OFF_n needs n >= 1".into()));
    }
    let (_, b) = min_branching(spec, &[n], &EngineConfig::default())?[0];
    Ok(Ratio::new(b, n))
}

// ---------------------------------------------------------------------------
// Carry automata.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Order {
    /// Least significant digit first; the state is the outgoing carry.
    Lsb,
    /// Most significant digit first; the state is the carry still owed
    /// by the digits below.
    Msb,
}

struct CarryNfa {
    order: Order,
    carries: u32,
    /// `cols[c][k]`: number of Free addends of combination k in column c.
    cols: Vec<Vec<u8>>,
    states: Interner<Vec<u32>>,
    budget: usize,
}

impl CarryNfa {
    fn new(order: Order, carries: u32, budget: usize) -> Self {
        CarryNfa { order, carries, cols: Vec::new(), states: Interner::default(), budget }
    }

    fn carry_of(&self, x: u32) -> u32 {
        x % self.carries
    }
}

impl Stepper for CarryNfa {
    fn step(&mut self, s: u32, col: u32) -> Result<Vec<(u32, u8)>> {
        let c = self.carries;
        let mut next: [Vec<u32>; 2] = [Vec::new(), Vec::new()];
        {
            let f = &self.cols[col as usize];
            for &x in self.states.get(s) {
                let (k, carry) = (x / c, x % c);
                let free = f[k as usize] as u32;
                for t in 0..=free {
                    match self.order {
                        Order::Lsb => {
                            let total = t + carry;
                            let nc = total >> 1;
                            debug_assert!(nc < c);
                            next[(total & 1) as usize].push(k * c + nc);
                        }
                        Order::Msb => {
                            for bit in 0..2u32 {
                                // t + c_in = bit + 2 * owed
                                let need = bit + 2 * carry;
                                if need >= t && need - t < c {
                                    next[bit as usize].push(k * c + (need - t));
                                }
                            }
                        }
                    }
                }
            }
        }
        let mut out = Vec::with_capacity(2);
        for v in next.iter_mut() {
            if v.is_empty() {
                continue;
            }
            v.sort_unstable();
            v.dedup();
            out.push((self.states.intern(std::mem::take(v)), 0));
        }
        check_budget(self.states.len(), self.budget)?;
        Ok(out)
    }

    fn state_count(&self) -> usize {
        self.states.len()
    }
}

/// Multisets of size `fold` over `0..m`, in lexicographic order.
pub fn combinations(m: usize, fold: u32) -> Vec<Vec<usize>> {
    fn rec(m: usize, left: u32, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in from..m {
            cur.push(i);
            rec(m, left - 1, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, fold, 0, &mut Vec::new(), &mut out);
    out
}

fn free_counts(col: &[bool], combos: &[Vec<usize>]) -> Vec<u8> {
    combos.iter().map(|k| k.iter().filter(|&&i| col[i]).count() as u8).collect()
}

struct Prepared {
    pats: Vec<DigitPattern>,
    combos: Vec<Vec<usize>>,
}

fn prepare(spec: &SetSpec, fold: u32, top: u64) -> Result<Prepared> {
    if fold == 0 {
        return Err(Error::Config("fold must be at least 1".into()));
    }
    let keep = spec.distinct_components(top)?;
    let pats: Vec<DigitPattern> = keep.iter().map(|&i| spec.components[i].clone()).collect();
    let combos = combinations(pats.len(), fold);
    Ok(Prepared { pats, combos })
}

/// Counts of one pass: per scale, (start count, cell count).
type Counts = Vec<(Tally, Tally)>;

fn msb_counts(
    runner: &mut Runner<Tally>,
    nfa: &mut CarryNfa,
    segs: &[Vec<(Vec<u32>, u64)>],
    ncombos: usize,
) -> Result<Counts> {
    let c = nfa.carries;
    let mut dist: Dist<Tally> = BTreeMap::new();
    for c0 in 0..c {
        let init: Vec<u32> = (0..ncombos as u32).map(|k| k * c + c0).collect();
        dist.insert(nfa.states.intern(init), Tally::one());
    }
    let mut out = Vec::with_capacity(segs.len());
    for seg in segs {
        for (cols, reps) in seg {
            let chunk = runner.chunk_id(cols.clone());
            dist = runner.advance(nfa, dist, chunk, *reps)?;
        }
        let mut starts = Tally::zero();
        let mut cells = Tally::zero();
        for (s, v) in &dist {
            let st = nfa.states.get(*s);
            if st.iter().any(|&x| nfa.carry_of(x) == 0) {
                starts = starts.add(v);
            }
            cells = cells.add(v);
        }
        out.push((starts, cells));
    }
    Ok(out)
}

/// Certified start and cell counts of lA at each requested scale.
pub fn sum_cover_trace(
    spec: &SetSpec,
    fold: u32,
    scales: &[u64],
    mode: CountMode,
    cfg: &EngineConfig,
) -> Result<Vec<DistinctCountResult>> {
    let scales = sorted_scales(spec, scales)?;
    let top = scales.last().copied().unwrap_or(0);
    let prep = prepare(spec, fold, top)?;
    let refs: Vec<&DigitPattern> = prep.pats.iter().collect();
    let segs = segments(&refs, &scales)?;
    let width = cover_width(fold);
    let carries = width as u32;
    if mode == CountMode::Exact {
        match msb_exact(&prep, &segs, carries, cfg) {
            Ok((counts, states)) => {
                return Ok(scales
                    .iter()
                    .zip(counts)
                    .map(|(&j, (st, ce))| DistinctCountResult {
                        scale: j,
                        fold,
                        width,
                        mode: CountMode::Exact,
                        fell_back: false,
                        starts: CellCountBracket { lower: st.lo, upper: st.hi },
                        cells_upper: ce.hi,
                        states,
                        combinations: prep.combos.len(),
                    })
                    .collect())
            }
            Err(Error::Budget(_)) => {
                let mut r = msb_bracket(&prep, &segs, &scales, fold, carries, cfg)?;
                for x in r.iter_mut() {
                    x.fell_back = true;
                }
                return Ok(r);
            }
            Err(e) => return Err(e),
        }
    }
    msb_bracket(&prep, &segs, &scales, fold, carries, cfg)
}

fn msb_exact(prep: &Prepared, segs: &[Vec<Piece>], carries: u32, cfg: &EngineConfig) -> Result<(Counts, usize)> {
    let mut nfa = CarryNfa::new(Order::Msb, carries, cfg.state_budget);
    let mut colids: Interner<Vec<bool>> = Interner::default();
    let mut fsegs = Vec::with_capacity(segs.len());
    for seg in segs {
        let mut v = Vec::with_capacity(seg.len());
        for piece in seg {
            let ids = piece
                .cols
                .iter()
                .map(|col| {
                    let id = colids.intern(col.clone());
                    if id as usize == nfa.cols.len() {
                        nfa.cols.push(free_counts(col, &prep.combos));
                    }
                    id
                })
                .collect();
            v.push((ids, piece.reps));
        }
        fsegs.push(v);
    }
    let mut runner = Runner::default();
    let counts = msb_counts(&mut runner, &mut nfa, &fsegs, prep.combos.len())?;
    Ok((counts, nfa.state_count()))
}

fn msb_bracket(
    prep: &Prepared,
    segs: &[Vec<Piece>],
    scales: &[u64],
    fold: u32,
    carries: u32,
    cfg: &EngineConfig,
) -> Result<Vec<DistinctCountResult>> {
    // one automaton over free counts 0..=fold, shared by every combination
    let mut nfa = CarryNfa::new(Order::Msb, carries, cfg.state_budget);
    nfa.cols = (0..=fold as u8).map(|f| vec![f]).collect();
    let mut runner = Runner::default();
    let mut per_combo: Vec<Counts> = Vec::with_capacity(prep.combos.len());
    for combo in &prep.combos {
        let fsegs: Vec<Vec<(Vec<u32>, u64)>> = segs
            .iter()
            .map(|seg| {
                seg.iter()
                    .map(|p| {
                        let ids = p.cols.iter().map(|c| combo.iter().filter(|&&i| c[i]).count() as u32).collect();
                        (ids, p.reps)
                    })
                    .collect()
            })
            .collect();
        per_combo.push(msb_counts(&mut runner, &mut nfa, &fsegs, 1)?);
    }
    let mut out = Vec::with_capacity(scales.len());
    for (si, &j) in scales.iter().enumerate() {
        // combinations whose addends agree up to j have the same start set
        let reps = class_representatives(prep, j)?;
        let mut lower = BigCount::zero();
        let mut up_starts = BigCount::zero();
        let mut up_cells = BigCount::zero();
        for &k in &reps {
            let (st, ce) = &per_combo[k][si];
            if st.lo > lower {
                lower = st.lo.clone();
            }
            up_starts = up_starts.add(&st.hi, Round::Up);
            up_cells = up_cells.add(&ce.hi, Round::Up);
        }
        out.push(DistinctCountResult {
            scale: j,
            fold,
            width: cover_width(fold),
            mode: CountMode::Bracket,
            fell_back: false,
            starts: CellCountBracket { lower, upper: up_starts },
            cells_upper: up_cells,
            states: nfa.state_count(),
            combinations: reps.len(),
        });
    }
    Ok(out)
}

/// One combination index per class of combinations with equal prefixes at scale j.
fn class_representatives(prep: &Prepared, j: u64) -> Result<Vec<usize>> {
    let local = SetSpec {
        name: String::new(),
        params: serde_json::Value::Null,
        scales: None,
        period: None,
        depth: j.max(1),
        components: prep
            .pats
            .iter()
            .map(|p| if j == 0 { Ok(DigitPattern::zeros(1)) } else { p.prefix(j) })
            .collect::<Result<Vec<_>>>()?,
    };
    let kept = local.distinct_components(local.depth)?;
    // map every component to its representative
    let mut rep = vec![0usize; prep.pats.len()];
    let refs: Vec<&DigitPattern> = local.components.iter().collect();
    for i in 0..prep.pats.len() {
        rep[i] = *kept
            .iter()
            .find(|&&r| r == i || refs[r].same_word(refs[i]))
            .expect("every component has a representative");
    }
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut out = Vec::new();
    for (k, combo) in prep.combos.iter().enumerate() {
        let mut key: Vec<usize> = combo.iter().map(|&i| rep[i]).collect();
        key.sort_unstable();
        if !seen.contains_key(&key) {
            seen.insert(key, k);
            out.push(k);
        }
    }
    Ok(out)
}

/// Start and cell counts of lA at one scale, reading digits from the
/// least significant end.
pub fn sum_prefix_cover(
    spec: &SetSpec,
    fold: u32,
    j: u64,
    mode: CountMode,
    cfg: &EngineConfig,
) -> Result<DistinctCountResult> {
    spec.check_scale(j)?;
    let prep = prepare(spec, fold, j)?;
    let width = cover_width(fold);
    let carries = width as u32;
    let refs: Vec<&DigitPattern> = prep.pats.iter().collect();
    let pieces = if j == 0 { Vec::new() } else { align(&refs, j)? };
    let run = |combos: &[Vec<usize>], init_carries: u32, nfa: &mut CarryNfa, runner: &mut Runner<Tally>, colids: &mut Interner<Vec<bool>>| -> Result<Tally> {
        let c = nfa.carries;
        let init: Vec<u32> = (0..combos.len() as u32)
            .flat_map(|k| (0..init_carries).map(move |d| k * c + d))
            .collect();
        let mut dist: Dist<Tally> = BTreeMap::new();
        dist.insert(nfa.states.intern(init), Tally::one());
        for piece in pieces.iter().rev() {
            let ids: Vec<u32> = piece
                .cols
                .iter()
                .rev()
                .map(|col| {
                    let id = colids.intern(col.clone());
                    if id as usize == nfa.cols.len() {
                        nfa.cols.push(free_counts(col, combos));
                    }
                    id
                })
                .collect();
            let chunk = runner.chunk_id(ids);
            dist = runner.advance(nfa, dist, chunk, piece.reps)?;
        }
        let mut total = Tally::zero();
        for (s, v) in &dist {
            let mut cs: Vec<u32> = nfa.states.get(*s).iter().map(|&x| x % c).collect();
            cs.sort_unstable();
            cs.dedup();
            total = total.add(&v.mul_u64(cs.len() as u64));
        }
        Ok(total)
    };
    let exact = || -> Result<(Tally, Tally, usize)> {
        let mut nfa = CarryNfa::new(Order::Lsb, carries, cfg.state_budget);
        let mut runner = Runner::default();
        let mut colids = Interner::default();
        let st = run(&prep.combos, 1, &mut nfa, &mut runner, &mut colids)?;
        let ce = run(&prep.combos, carries, &mut nfa, &mut runner, &mut colids)?;
        Ok((st, ce, nfa.state_count()))
    };
    let mut fell_back = false;
    if mode == CountMode::Exact {
        match exact() {
            Ok((st, ce, states)) => {
                return Ok(DistinctCountResult {
                    scale: j,
                    fold,
                    width,
                    mode: CountMode::Exact,
                    fell_back: false,
                    starts: CellCountBracket { lower: st.lo, upper: st.hi },
                    cells_upper: ce.hi,
                    states,
                    combinations: prep.combos.len(),
                })
            }
            Err(Error::Budget(_)) => fell_back = true,
            Err(e) => return Err(e),
        }
    }
    let reps = class_representatives(&prep, j)?;
    let mut lower = BigCount::zero();
    let mut up_starts = BigCount::zero();
    let mut up_cells = BigCount::zero();
    let mut states = 0;
    for &k in &reps {
        let combo = vec![prep.combos[k].clone()];
        let mut nfa = CarryNfa::new(Order::Lsb, carries, cfg.state_budget);
        let mut runner = Runner::default();
        let mut colids = Interner::default();
        let st = run(&combo, 1, &mut nfa, &mut runner, &mut colids)?;
        let ce = run(&combo, carries, &mut nfa, &mut runner, &mut colids)?;
        states = states.max(nfa.state_count());
        if st.lo > lower {
            lower = st.lo.clone();
        }
        up_starts = up_starts.add(&st.hi, Round::Up);
        up_cells = up_cells.add(&ce.hi, Round::Up);
    }
    Ok(DistinctCountResult {
        scale: j,
        fold,
        width,
        mode: CountMode::Bracket,
        fell_back,
        starts: CellCountBracket { lower, upper: up_starts },
        cells_upper: up_cells,
        states,
        combinations: reps.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(b: &CellCountBracket) -> u64 {
        assert!(b.is_exact());
        b.lower.to_u64().unwrap()
    }

    #[test]
    fn prefix_count_examples() {
        let s = SetSpec::new("free", 5, vec![DigitPattern::free(5)]).unwrap();
        assert_eq!(count(&prefix_count(&s, 5).unwrap()), 32);
        let s = SetSpec::new("zero", 7, vec![DigitPattern::zeros(7)]).unwrap();
        assert_eq!(count(&prefix_count(&s, 7).unwrap()), 1);
        let s = SetSpec::from_strings("pair", &["a0", "0a"]).unwrap();
        assert_eq!(count(&prefix_count(&s, 2).unwrap()), 3);
    }

    #[test]
    fn off_examples() {
        let s = SetSpec::new("free", 6, vec![DigitPattern::free(6)]).unwrap();
        assert_eq!(branching_min_average(&s, 6).unwrap(), Ratio::new(1, 1));
        let s = SetSpec::new("zero", 6, vec![DigitPattern::zeros(6)]).unwrap();
        assert_eq!(branching_min_average(&s, 6).unwrap(), Ratio::new(0, 1));
        let s = SetSpec::from_strings("alt", &["a0a0"]).unwrap();
        assert_eq!(branching_min_average(&s, 4).unwrap(), Ratio::new(1, 2));
    }

    #[test]
    fn all_zero_sums_to_one_start() {
        let s = SetSpec::new("zero", 9, vec![DigitPattern::zeros(9)]).unwrap();
        for j in [1, 5, 9] {
            let r = sum_prefix_cover(&s, 3, j, CountMode::Exact, &EngineConfig::default()).unwrap();
            assert_eq!(count(&r.starts), 1);
        }
    }

    #[test]
    fn all_free_pair_sums() {
        let s = SetSpec::new("free", 8, vec![DigitPattern::free(8)]).unwrap();
        for j in 1..=8u64 {
            let r = sum_prefix_cover(&s, 2, j, CountMode::Exact, &EngineConfig::default()).unwrap();
            assert_eq!(count(&r.starts), (1 << (j + 1)) - 1);
            assert_eq!(r.cells_upper.to_u64().unwrap(), (1 << (j + 1)) + 1);
        }
    }

    #[test]
    fn msb_trace_agrees_with_lsb() {
        let s = SetSpec::from_strings("t", &["a0a0aa0a", "0aa00a0a", "aa000aa0"]).unwrap();
        let cfg = EngineConfig::default();
        for fold in 1..=3 {
            for mode in [CountMode::Exact, CountMode::Bracket] {
                let trace = sum_cover_trace(&s, fold, &[1, 2, 3, 4, 5, 6, 7, 8], mode, &cfg).unwrap();
                for r in trace {
                    let l = sum_prefix_cover(&s, fold, r.scale, mode, &cfg).unwrap();
                    assert_eq!(r.starts, l.starts, "fold {fold} scale {}", r.scale);
                    assert_eq!(r.cells_upper, l.cells_upper);
                }
            }
        }
    }

    #[test]
    fn combinations_are_multisets() {
        assert_eq!(combinations(3, 2).len(), 6);
        assert_eq!(combinations(18, 3).len(), 1140);
        assert_eq!(combinations(2, 1), vec![vec![0], vec![1]]);
    }
}
