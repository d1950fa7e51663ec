//! Dimension targets and the admissibility conditions on them.

use crate::error::{Error, Result};
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

pub type Q = Ratio<i64>;

/// Parses "p/q", an integer, or a finite decimal such as "0.625".
pub fn parse_rational(text: &str) -> Result<Q> {
    let t = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if let Some((p, q)) = t.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Q::new(p, q));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 15 {
        return Err(bad());
    }
    let den = 10i64.pow(frac.len() as u32);
    let ip: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
    let fp: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let num = ip.checked_mul(den).and_then(|x| x.checked_add(fp)).ok_or_else(bad)?;
    Ok(Q::new(if neg { -num } else { num }, den))
}

pub fn format_rational(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub(crate) mod qvec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Num {
        Text(String),
        Float(f64),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        let raw: Vec<Num> = Vec::deserialize(d)?;
        raw.into_iter()
            .map(|n| match n {
                Num::Text(t) => parse_rational(&t).map_err(serde::de::Error::custom),
                // JSON numbers go through their shortest decimal spelling
                Num::Float(f) => parse_rational(&format!("{f}")).map_err(serde::de::Error::custom),
            })
            .collect()
    }
}

/// Target dimensions, indexed from 1 in names and from 0 in storage.
/// An empty `gamma` means the construction does not control upper box
/// dimension.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionTargets {
    #[serde(with = "qvec", default)]
    pub alpha: Vec<Q>,
    #[serde(with = "qvec", default)]
    pub beta: Vec<Q>,
    #[serde(with = "qvec", default)]
    pub gamma: Vec<Q>,
}

impl DimensionTargets {
    pub fn parse(alpha: &[&str], beta: &[&str], gamma: &[&str]) -> Result<Self> {
        let p = |v: &[&str]| v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>();
        Ok(DimensionTargets { alpha: p(alpha)?, beta: p(beta)?, gamma: p(gamma)? })
    }

    /// Same profile for all three sequences.
    pub fn constant_profile(v: &[Q]) -> Self {
        DimensionTargets { alpha: v.to_vec(), beta: v.to_vec(), gamma: v.to_vec() }
    }
}

/// One failed condition, e.g. `β_2 ≤ 2β_1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub constraint: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.constraint, self.detail)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityReport {
    pub max_fold: usize,
    pub violations: Vec<Violation>,
}

impl AdmissibilityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }

    /// Turns the first violation into an admissibility error.
    pub fn into_result(self) -> Result<()> {
        match self.violations.into_iter().next() {
            None => Ok(()),
            Some(v) => Err(Error::Admissibility(format!("{}: {}", v.constraint, v.detail))),
        }
    }
}

/// Right-hand side of the fold-l condition for a sequence `x` (1-based l).
pub fn fold_bound(x: &[Q], l: usize) -> Q {
    let at = |i: usize| x[i - 1];
    let mut b = at(l - 1) + at(1);
    for k in 2..l {
        b -= Q::from((l - k) as i64) * (at(k - 1) + at(1) - at(k));
    }
    b
}

fn fold_constraint_name(sym: char, l: usize) -> String {
    match l {
        2 => format!("{sym}_2 ≤ 2{sym}_1"),
        3 => format!("{sym}_3 ≤ 2{sym}_2 − {sym}_1"),
        _ => format!(
            "{sym}_{l} ≤ {sym}_{}+{sym}_1 − Σ_{{k=2}}^{{{}}}({l}−k)({sym}_{{k−1}}+{sym}_1−{sym}_k)",
            l - 1,
            l - 1
        ),
    }
}

/// Checks ranges, monotonicity, α ≤ β ≤ γ and the fold conditions for
/// 2 ≤ l ≤ `max_fold` on β and γ.
pub fn validate_targets(t: &DimensionTargets, max_fold: usize) -> AdmissibilityReport {
    let mut violations = Vec::new();
    let seqs = [('α', &t.alpha), ('β', &t.beta), ('γ', &t.gamma)];
    for (sym, xs) in seqs {
        for (i, x) in xs.iter().enumerate() {
            if *x < Q::zero() || *x > Q::one() {
                violations.push(Violation {
                    constraint: format!("0 ≤ {sym}_{} ≤ 1", i + 1),
                    detail: format!("{sym}_{} = {}", i + 1, format_rational(x)),
                });
            }
        }
        for i in 1..xs.len() {
            if xs[i] < xs[i - 1] {
                violations.push(Violation {
                    constraint: format!("{sym}_{} ≤ {sym}_{}", i, i + 1),
                    detail: format!("{} > {}", format_rational(&xs[i - 1]), format_rational(&xs[i])),
                });
            }
        }
    }
    for (lo_sym, lo, hi_sym, hi) in [('α', &t.alpha, 'β', &t.beta), ('β', &t.beta, 'γ', &t.gamma)] {
        for i in 0..lo.len().min(hi.len()) {
            if lo[i] > hi[i] {
                violations.push(Violation {
                    constraint: format!("{lo_sym}_{0} ≤ {hi_sym}_{0}", i + 1),
                    detail: format!("{} > {}", format_rational(&lo[i]), format_rational(&hi[i])),
                });
            }
        }
    }
    for (sym, xs) in [('β', &t.beta), ('γ', &t.gamma)] {
        for l in 2..=max_fold.min(xs.len()) {
            let b = fold_bound(xs, l);
            if xs[l - 1] > b {
                violations.push(Violation {
                    constraint: fold_constraint_name(sym, l),
                    detail: format!("{sym}_{l} = {} but the bound is {}", format_rational(&xs[l - 1]), format_rational(&b)),
                });
            }
        }
    }
    AdmissibilityReport { max_fold, violations }
}
