//! Finite sumsets, dyadic window counts and instance checks of the
//! Plünnecke–Ruzsa estimates.
//!
//! Cells are half-open, `[i, i+1)·2^-j`, and width-l windows are
//! `[i, i+l)·2^-j` with `i ≥ 0`. Points are nonnegative rationals.

use crate::error::{Error, Result};
use crate::oracle::prefix_values;
use crate::pattern::SetSpec;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::Serialize;
use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FiniteIntSet {
    elems: Vec<BigInt>,
}

impl FiniteIntSet {
    pub fn new(items: impl IntoIterator<Item = BigInt>) -> Self {
        let s: BTreeSet<BigInt> = items.into_iter().collect();
        FiniteIntSet { elems: s.into_iter().collect() }
    }

    pub fn from_i64(items: &[i64]) -> Self {
        Self::new(items.iter().map(|&x| BigInt::from(x)))
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elements(&self) -> &[BigInt] {
        &self.elems
    }

    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.elems.iter().map(|x| x.to_i64()).collect()
    }
}

pub fn sumset(e: &FiniteIntSet, f: &FiniteIntSet) -> FiniteIntSet {
    let mut out = BTreeSet::new();
    for a in &e.elems {
        for b in &f.elems {
            out.insert(a + b);
        }
    }
    FiniteIntSet { elems: out.into_iter().collect() }
}

pub fn iterated_sumset(f: &FiniteIntSet, fold: u32) -> Result<FiniteIntSet> {
    if fold == 0 {
        return Err(Error::Config("fold must be at least 1".into()));
    }
    let mut acc = f.clone();
    for _ in 1..fold {
        acc = sumset(&acc, f);
    }
    Ok(acc)
}

fn ratio_string(n: &BigInt, d: &BigInt) -> String {
    let r = BigRational::new(n.clone(), d.clone());
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RuzsaReport {
    pub fold: u32,
    pub e_size: usize,
    pub sum_size: usize,
    /// |E+F| / |E| in lowest terms.
    pub k: String,
    pub iterated_size: usize,
    /// K^l |E|.
    pub bound: String,
    pub holds: bool,
}

/// |lF| ≤ K^l |E| with K = |E+F|/|E|, compared as |lF|·|E|^(l−1) ≤ |E+F|^l.
pub fn ruzsa_check(e: &FiniteIntSet, f: &FiniteIntSet, fold: u32) -> Result<RuzsaReport> {
    if e.is_empty() || f.is_empty() {
        return Err(Error::Config("ruzsa_check needs nonempty sets".into()));
    }
    let es = BigInt::from(e.len());
    let ss = BigInt::from(sumset(e, f).len());
    let lf = iterated_sumset(f, fold)?.len();
    let lhs = BigInt::from(lf) * num_traits::pow(es.clone(), fold as usize - 1);
    let rhs = num_traits::pow(ss.clone(), fold as usize);
    Ok(RuzsaReport {
        fold,
        e_size: e.len(),
        sum_size: ss.to_usize().unwrap_or(usize::MAX),
        k: ratio_string(&ss, &es),
        iterated_size: lf,
        bound: ratio_string(&rhs, &num_traits::pow(es, fold as usize - 1)),
        holds: lhs <= rhs,
    })
}

// ---------------------------------------------------------------------------
// Point samples.

/// "p/q", an integer, or a decimal such as "0.25".
pub fn parse_big_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::Parse(format!("not a rational: {t:?}"));
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let ip: BigInt = match int.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            s => s.parse().map_err(|_| bad())?,
        };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let f: BigInt = frac.parse().map_err(|_| bad())?;
        let mag = BigRational::new(ip * &scale + f, scale);
        return Ok(if neg { -mag } else { mag });
    }
    Ok(BigRational::from_integer(t.parse().map_err(|_| bad())?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSample {
    pub points: Vec<BigRational>,
    pub bound: BigRational,
}

impl PointSample {
    pub fn new(points: Vec<BigRational>, bound: BigRational) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| p.is_negative() || **p > bound) {
            return Err(Error::Config(format!("point {p} outside [0, {bound}]")));
        }
        Ok(PointSample { points, bound })
    }

    /// One point per line; blank lines and lines starting with '#' are skipped.
    pub fn parse(text: &str, bound: BigRational) -> Result<Self> {
        let pts = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(parse_big_rational)
            .collect::<Result<Vec<_>>>()?;
        Self::new(pts, bound)
    }

    pub fn from_dyadic(numerators: &[u64], bits: u32) -> Self {
        let d = BigInt::one() << bits;
        let pts = numerators.iter().map(|&m| BigRational::new(BigInt::from(m), d.clone())).collect();
        PointSample { points: pts, bound: BigRational::one() }
    }

    /// Floor cell indices at scale j.
    pub fn cells(&self, j: u32) -> FiniteIntSet {
        let scale = BigInt::one() << j;
        FiniteIntSet::new(self.points.iter().map(|p| (p.numer() * &scale).div_floor(p.denom())))
    }

    pub fn sum(&self, other: &PointSample) -> PointSample {
        let mut s = BTreeSet::new();
        for a in &self.points {
            for b in &other.points {
                s.insert(a + b);
            }
        }
        PointSample { points: s.into_iter().collect(), bound: &self.bound + &other.bound }
    }

    pub fn iterated_sum(&self, fold: u32) -> PointSample {
        let mut acc = self.clone();
        for _ in 1..fold.max(1) {
            acc = acc.sum(self);
        }
        acc
    }
}

/// Windows [i, i+l) with i ≥ 0 that meet a set with the given cells.
fn window_count(cells: &FiniteIntSet, width: u32) -> BigUint {
    let w = BigInt::from(width);
    let mut total = BigInt::zero();
    // i ranges over the union of [c−l+1, c] ∩ [0, ∞)
    let mut covered_to: Option<BigInt> = None;
    for c in cells.elements() {
        let lo: BigInt = (c - &w + 1u32).max(BigInt::zero());
        let lo = match &covered_to {
            Some(t) if *t >= lo => t + 1u32,
            _ => lo,
        };
        if *c >= lo {
            total += c - &lo + 1u32;
            covered_to = Some(c.clone());
        }
    }
    total.to_biguint().expect("nonnegative")
}

/// |D_{j,l}(X)| on a finite sample.
pub fn dyadic_count(x: &PointSample, j: u32, width: u32) -> Result<BigUint> {
    if width == 0 {
        return Err(Error::Config("window width must be at least 1".into()));
    }
    Ok(window_count(&x.cells(j), width))
}

#[derive(Clone, Debug, Serialize)]
pub struct SpecWindowCount {
    pub count: String,
    /// True when the value only bounds the count from above.
    pub upper_bound: bool,
}

/// |D_{j,l}| for a digit-pattern set: every prefix value v and its right
/// neighbour v+1 (reached by points with all-ones tails) are taken as
/// cells, so the result is an upper bound.
pub fn dyadic_count_spec(spec: &SetSpec, j: u64, width: u32, budget: u64) -> Result<SpecWindowCount> {
    if width == 0 {
        return Err(Error::Config("window width must be at least 1".into()));
    }
    let v = prefix_values(spec, j, budget)?;
    let cells = FiniteIntSet::new(v.iter().flat_map(|x| {
        let b = BigInt::from(x.clone());
        [b.clone(), b + 1u32]
    }));
    Ok(SpecWindowCount { count: window_count(&cells, width).to_string(), upper_bound: true })
}

fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().unwrap_or(f64::INFINITY).log2()
    } else {
        let shift = bits - 64;
        (x >> shift).to_f64().expect("fits").log2() + shift as f64
    }
}

// ---------------------------------------------------------------------------
// The dyadic sumset bound.

#[derive(Clone, Debug, Serialize)]
pub struct CoverBoundReport {
    pub j: u32,
    pub fold: u32,
    /// |D_{j,l}(A_1+…+A_l)|.
    pub left: String,
    /// |D_{j,1}(A_1)+…+D_{j,1}(A_l)|.
    pub index_sum: String,
    /// left ≤ (l+1)·index_sum.
    pub holds: bool,
    /// left ≤ (2l−1)·index_sum.
    pub holds_2l_minus_1: bool,
    /// Largest left/index_sum seen; only the (l+1)-fold bound is asserted.
    pub ratio: String,
}

pub fn sumset_cover_bound_check(samples: &[PointSample], j: u32) -> Result<CoverBoundReport> {
    if samples.is_empty() || samples.iter().any(|s| s.points.is_empty()) {
        return Err(Error::Config("sumset_cover_bound_check needs nonempty samples".into()));
    }
    let fold = samples.len() as u32;
    let mut total = samples[0].clone();
    let mut index = samples[0].cells(j);
    for s in &samples[1..] {
        total = total.sum(s);
        index = sumset(&index, &s.cells(j));
    }
    let left = BigInt::from(dyadic_count(&total, j, fold)?);
    let n = BigInt::from(index.len());
    Ok(CoverBoundReport {
        j,
        fold,
        holds: left <= BigInt::from(fold + 1) * &n,
        holds_2l_minus_1: left <= BigInt::from(2 * fold - 1) * &n,
        ratio: ratio_string(&left, &n),
        left: left.to_string(),
        index_sum: n.to_string(),
    })
}

// ---------------------------------------------------------------------------
// The lower box estimate for iterated sums.

#[derive(Clone, Debug, Serialize)]
pub struct Prop31Record {
    pub j: u32,
    /// |D_{j,l}(lB)|.
    pub left: String,
    /// |D_{j,2}(A+B)|.
    pub sum_windows: String,
    /// |D_j(A)|.
    pub a_cells: String,
    /// (l+1)(|D_{j,2}(A+B)|/|D_j(A)|)^l |D_j(A)|.
    pub right: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop31Report {
    pub fold: u32,
    pub records: Vec<Prop31Record>,
    /// Scale minimizing log|D_{j,2}(A+B)|/j over j ≥ 1 in range.
    pub argmin_scale: Option<u32>,
    /// l·log|D_{j,2}(A+B)|/j − (l−1)·log|D_j(A)|/j at that scale.
    pub implied_bound: Option<f64>,
    /// log|D_{j,l}(lB)|/j at that scale.
    pub measured: Option<f64>,
    pub holds: bool,
}

pub fn prop31_check(a: &PointSample, b: &PointSample, fold: u32, scales: std::ops::RangeInclusive<u32>) -> Result<Prop31Report> {
    if a.points.is_empty() || b.points.is_empty() {
        return Err(Error::Config("prop31_check needs nonempty samples".into()));
    }
    if fold < 2 {
        return Err(Error::Config("prop31_check needs l ≥ 2".into()));
    }
    let ab = a.sum(b);
    let lb = b.iterated_sum(fold);
    let mut records = Vec::new();
    let mut best: Option<(f64, u32, f64, f64)> = None;
    for j in scales {
        let left = dyadic_count(&lb, j, fold)?;
        let d2 = dyadic_count(&ab, j, 2)?;
        let da = dyadic_count(a, j, 1)?;
        // (l+1)·d2^l·da^(1−l), compared after multiplying by da^(l−1)
        let lhs = &left * num_traits::pow(da.clone(), fold as usize - 1);
        let rhs = BigUint::from(fold + 1) * num_traits::pow(d2.clone(), fold as usize);
        let right = ratio_string(&BigInt::from(rhs.clone()), &BigInt::from(num_traits::pow(da.clone(), fold as usize - 1)));
        if j >= 1 {
            let e = log2_big(&d2) / j as f64;
            if best.map_or(true, |b| e < b.0) {
                let ea = log2_big(&da) / j as f64;
                best = Some((e, j, fold as f64 * e - (fold - 1) as f64 * ea, log2_big(&left) / j as f64));
            }
        }
        records.push(Prop31Record {
            j,
            left: left.to_string(),
            sum_windows: d2.to_string(),
            a_cells: da.to_string(),
            right,
            holds: lhs <= rhs,
        });
    }
    Ok(Prop31Report {
        fold,
        holds: records.iter().all(|r| r.holds),
        records,
        argmin_scale: best.map(|b| b.1),
        implied_bound: best.map(|b| b.2),
        measured: best.map(|b| b.3),
    })
}

// ---------------------------------------------------------------------------
// Seeded generators.

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A set of 1..=max_size integers, drawn either from a short range or
/// from an arithmetic progression with random holes.
pub fn random_int_set(r: &mut impl Rng, max_size: usize) -> FiniteIntSet {
    let size = r.gen_range(1..=max_size);
    if r.gen_bool(0.5) {
        let span = r.gen_range(size as i64..=4 * size as i64 + 8);
        FiniteIntSet::new((0..size).map(|_| BigInt::from(r.gen_range(0..span))))
    } else {
        let step = r.gen_range(1..=7i64);
        let off = r.gen_range(-20..=20i64);
        FiniteIntSet::new((0..size).filter(|_| r.gen_bool(0.8)).map(|i| BigInt::from(off + step * i as i64)).chain([BigInt::from(off)]))
    }
}

/// 1..=max_size points m/2^bits in [0, 1).
pub fn random_sample(r: &mut impl Rng, max_size: usize, bits: u32) -> PointSample {
    let size = r.gen_range(1..=max_size);
    let m: Vec<u64> = (0..size).map(|_| r.gen_range(0..1u64 << bits)).collect();
    PointSample::from_dyadic(&m, bits)
}
