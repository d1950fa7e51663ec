//! Nonnegative integers that stay exact while small and degrade to
//! certified directed-rounding bounds once they outgrow `EXACT_BITS`.
//!
//! Counts at scale j are about 2^j, and the block constructions are
//! evaluated at depths far beyond what a materialized integer can hold.
//! A `BigCount` is always an integer; in scaled form it is `mant * 2^exp`
//! with a 64-bit mantissa. A `Tally` carries a lower and an upper
//! `BigCount` through additions and products, each rounded outward.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Counts below 2^EXACT_BITS are kept as exact big integers.
pub const EXACT_BITS: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

#[derive(Clone, Debug)]
pub enum BigCount {
    Exact(BigUint),
    /// `mant * 2^exp` with `mant >= 2^63` and `exp > 0`.
    Scaled { mant: u64, exp: u64 },
}

fn norm128(v: u128, exp: u64, dir: Round) -> BigCount {
    if v == 0 {
        return BigCount::zero();
    }
    let bits = 128 - v.leading_zeros() as u64;
    if bits <= 64 {
        if exp == 0 {
            return BigCount::Exact(BigUint::from(v as u64));
        }
        // shift left as far as the exponent allows
        let s = (64 - bits).min(exp);
        let m = (v as u64) << s;
        let e = exp - s;
        if e == 0 {
            return BigCount::Exact(BigUint::from(m));
        }
        return BigCount::Scaled { mant: m, exp: e };
    }
    let shift = bits - 64;
    let mut m = (v >> shift) as u64;
    let mut e = exp + shift;
    let lost = v & ((1u128 << shift) - 1);
    if dir == Round::Up && lost != 0 {
        match m.checked_add(1) {
            Some(x) => m = x,
            None => {
                m = 1u64 << 63;
                e += 1;
            }
        }
    }
    BigCount::Scaled { mant: m, exp: e }
}

impl BigCount {
    pub fn zero() -> Self {
        BigCount::Exact(BigUint::zero())
    }

    pub fn one() -> Self {
        BigCount::Exact(BigUint::one())
    }

    pub fn from_u64(v: u64) -> Self {
        BigCount::Exact(BigUint::from(v))
    }

    pub fn pow2(e: u64) -> Self {
        if e < EXACT_BITS {
            BigCount::Exact(BigUint::one() << e)
        } else {
            BigCount::Scaled { mant: 1u64 << 63, exp: e - 63 }
        }
    }

    pub fn from_biguint(b: BigUint, dir: Round) -> Self {
        if b.bits() <= EXACT_BITS {
            BigCount::Exact(b)
        } else {
            let (m, e) = scaled_parts(&b, dir);
            BigCount::Scaled { mant: m, exp: e }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, BigCount::Exact(b) if b.is_zero())
    }

    pub fn is_exact_repr(&self) -> bool {
        matches!(self, BigCount::Exact(_))
    }

    pub fn as_biguint(&self) -> Option<&BigUint> {
        match self {
            BigCount::Exact(b) => Some(b),
            BigCount::Scaled { .. } => None,
        }
    }

    /// Materializes the value; refuses absurdly large scaled values.
    pub fn to_biguint(&self) -> Option<BigUint> {
        match self {
            BigCount::Exact(b) => Some(b.clone()),
            BigCount::Scaled { mant, exp } if *exp <= 1 << 20 => {
                Some(BigUint::from(*mant) << *exp)
            }
            BigCount::Scaled { .. } => None,
        }
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.as_biguint().and_then(|b| b.to_u64())
    }

    pub fn bit_len(&self) -> u64 {
        match self {
            BigCount::Exact(b) => b.bits(),
            BigCount::Scaled { mant, exp } => 64 - mant.leading_zeros() as u64 + exp,
        }
    }

    fn parts(&self, dir: Round) -> (u64, u64) {
        match self {
            BigCount::Exact(b) => scaled_parts(b, dir),
            BigCount::Scaled { mant, exp } => (*mant, *exp),
        }
    }

    pub fn log2(&self) -> f64 {
        match self {
            BigCount::Exact(b) => {
                if b.is_zero() {
                    return f64::NEG_INFINITY;
                }
                let bits = b.bits();
                if bits <= 64 {
                    (b.to_u64().unwrap() as f64).log2()
                } else {
                    let top = (b >> (bits - 64)).to_u64().unwrap() as f64;
                    top.log2() + (bits - 64) as f64
                }
            }
            BigCount::Scaled { mant, exp } => (*mant as f64).log2() + *exp as f64,
        }
    }

    pub fn add(&self, other: &Self, dir: Round) -> Self {
        if let (BigCount::Exact(a), BigCount::Exact(b)) = (self, other) {
            if a.bits().max(b.bits()) < EXACT_BITS {
                return BigCount::Exact(a + b);
            }
        }
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (ma, ea) = self.parts(dir);
        let (mb, eb) = other.parts(dir);
        let ((ma, ea), (mb, eb)) = if ea >= eb { ((ma, ea), (mb, eb)) } else { ((mb, eb), (ma, ea)) };
        let d = ea - eb;
        if d >= 64 {
            // the smaller term is below one unit of the larger mantissa
            return match dir {
                Round::Down => norm128(ma as u128, ea, dir),
                Round::Up => norm128(ma as u128 + 1, ea, dir),
            };
        }
        let v = ((ma as u128) << d) + mb as u128;
        norm128(v, eb, dir)
    }

    pub fn mul(&self, other: &Self, dir: Round) -> Self {
        if self.is_zero() || other.is_zero() {
            return BigCount::zero();
        }
        if let (BigCount::Exact(a), BigCount::Exact(b)) = (self, other) {
            if a.bits() + b.bits() <= EXACT_BITS {
                return BigCount::Exact(a * b);
            }
        }
        let (ma, ea) = self.parts(dir);
        let (mb, eb) = other.parts(dir);
        norm128(ma as u128 * mb as u128, ea + eb, dir)
    }

    pub fn mul_u64(&self, k: u64, dir: Round) -> Self {
        self.mul(&BigCount::from_u64(k), dir)
    }
}

fn scaled_parts(b: &BigUint, dir: Round) -> (u64, u64) {
    let bits = b.bits();
    if bits <= 64 {
        return (b.to_u64().unwrap_or(0), 0);
    }
    let shift = bits - 64;
    let mut m = (b >> shift).to_u64().unwrap();
    let mut e = shift;
    if dir == Round::Up && b.trailing_zeros().unwrap_or(0) < shift {
        match m.checked_add(1) {
            Some(x) => m = x,
            None => {
                m = 1u64 << 63;
                e += 1;
            }
        }
    }
    (m, e)
}

impl Ord for BigCount {
    fn cmp(&self, other: &Self) -> Ordering {
        let (la, lb) = (self.bit_len(), other.bit_len());
        if la != lb {
            return la.cmp(&lb);
        }
        match (self, other) {
            (BigCount::Exact(a), BigCount::Exact(b)) => a.cmp(b),
            (BigCount::Scaled { mant: ma, exp: ea }, BigCount::Scaled { mant: mb, exp: eb }) => {
                (ea, ma).cmp(&(eb, mb))
            }
            _ => {
                // equal bit length: the scaled side has a bounded exponent
                let a = self.to_biguint().expect("bounded");
                let b = other.to_biguint().expect("bounded");
                a.cmp(&b)
            }
        }
    }
}

impl PartialOrd for BigCount {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for BigCount {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for BigCount {}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BigCount::Exact(b) => write!(f, "{b}"),
            BigCount::Scaled { mant, exp } => write!(f, "{mant}*2^{exp}"),
        }
    }
}

/// An integer known to lie in `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tally {
    pub lo: BigCount,
    pub hi: BigCount,
}

impl Tally {
    pub fn zero() -> Self {
        Tally { lo: BigCount::zero(), hi: BigCount::zero() }
    }

    pub fn one() -> Self {
        Tally { lo: BigCount::one(), hi: BigCount::one() }
    }

    pub fn exact(v: BigCount) -> Self {
        Tally { lo: v.clone(), hi: v }
    }

    pub fn from_u64(v: u64) -> Self {
        Tally::exact(BigCount::from_u64(v))
    }

    pub fn is_zero(&self) -> bool {
        self.hi.is_zero()
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn add(&self, o: &Self) -> Self {
        Tally { lo: self.lo.add(&o.lo, Round::Down), hi: self.hi.add(&o.hi, Round::Up) }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Tally { lo: self.lo.mul(&o.lo, Round::Down), hi: self.hi.mul(&o.hi, Round::Up) }
    }

    pub fn mul_u64(&self, k: u64) -> Self {
        Tally { lo: self.lo.mul_u64(k, Round::Down), hi: self.hi.mul_u64(k, Round::Up) }
    }

    pub fn max(&self, o: &Self) -> Self {
        Tally {
            lo: std::cmp::max(&self.lo, &o.lo).clone(),
            hi: std::cmp::max(&self.hi, &o.hi).clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values_stay_exact() {
        let a = BigCount::from_u64(1 << 40);
        let b = a.mul(&a, Round::Down);
        assert_eq!(b.as_biguint().unwrap(), &(BigUint::one() << 80u32));
        assert_eq!(b.log2(), 80.0);
    }

    #[test]
    fn scaled_bounds_bracket_the_exact_product() {
        let big = BigUint::from(3u32).pow(3000);
        let lo = BigCount::from_biguint(big.clone(), Round::Down);
        let hi = BigCount::from_biguint(big.clone(), Round::Up);
        let exact = &big * &big;
        let plo = lo.mul(&lo, Round::Down).to_biguint().unwrap();
        let phi = hi.mul(&hi, Round::Up).to_biguint().unwrap();
        assert!(plo <= exact && exact <= phi);
        assert!(plo < phi);
    }

    #[test]
    fn adding_a_negligible_term_rounds_outward() {
        let a = BigCount::pow2(10_000);
        let b = BigCount::one();
        assert_eq!(a.add(&b, Round::Down), a);
        assert!(a.add(&b, Round::Up) > a);
    }

    #[test]
    fn ordering_across_representations() {
        let a = BigCount::from_biguint(BigUint::one() << 5000u32, Round::Down);
        let b = BigCount::pow2(5000);
        assert_eq!(a, b);
        assert!(BigCount::pow2(4095) < a);
    }
}

impl serde::Serialize for BigCount {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
