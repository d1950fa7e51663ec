//! Scale sequences n_1 < n_2 < ... with (k−1) | (n_k − n_{k−1}).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "lowercase")]
pub enum ScalePolicy {
    /// n_k is the least admissible n ≥ 2^(2^k).
    Tower,
    /// n_1 = base, then the least admissible n ≥ base·n_{k−1}.
    Scaled { base: u64 },
}

/// Largest horizon the tower policy supports: n_5 = 2^32, n_6 would be 2^64.
pub const TOWER_MAX_HORIZON: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleSequence {
    /// `n[k-1]` is n_k.
    pub n: Vec<u64>,
}

impl ScaleSequence {
    pub fn new(n: Vec<u64>) -> Result<Self> {
        let s = ScaleSequence { n };
        s.check()?;
        Ok(s)
    }

    pub fn horizon(&self) -> usize {
        self.n.len()
    }

    /// n_k for 1 ≤ k ≤ horizon.
    pub fn at(&self, k: usize) -> Result<u64> {
        if k == 0 || k > self.n.len() {
            return Err(Error::Scale(format!("n_{k} is outside the horizon {}", self.n.len())));
        }
        Ok(self.n[k - 1])
    }

    /// Length n_{k+1} − n_k of block k.
    pub fn gap(&self, k: usize) -> Result<u64> {
        Ok(self.at(k + 1)? - self.at(k)?)
    }

    /// Strict growth, and k | n_{k+1} − n_k for every k ≥ 1 in range.
    pub fn check(&self) -> Result<()> {
        if self.n.is_empty() || self.n[0] == 0 {
            return Err(Error::Scale("a scale sequence starts at a positive n_1".into()));
        }
        for k in 1..self.n.len() {
            let (a, b) = (self.n[k - 1], self.n[k]);
            if b <= a {
                return Err(Error::Scale(format!("n_{} = {b} does not exceed n_{k} = {a}", k + 1)));
            }
            if (b - a) % k as u64 != 0 {
                return Err(Error::Scale(format!("{k} does not divide n_{} − n_{k} = {}", k + 1, b - a)));
            }
        }
        Ok(())
    }
}

fn next_admissible(floor: u64, prev: u64, k: u64) -> Option<u64> {
    // k is the index of the new term; k−1 must divide the gap
    if k <= 1 {
        return Some(floor);
    }
    let d = k - 1;
    let r = (floor - prev) % d;
    if r == 0 {
        Some(floor)
    } else {
        floor.checked_add(d - r)
    }
}

/// The first `horizon` terms of the sequence.
pub fn make_scale_sequence(policy: ScalePolicy, horizon: usize) -> Result<ScaleSequence> {
    if horizon < 2 {
        return Err(Error::Config("a scale sequence needs a horizon of at least 2".into()));
    }
    let mut n: Vec<u64> = Vec::with_capacity(horizon);
    match policy {
        ScalePolicy::Tower => {
            if horizon > TOWER_MAX_HORIZON {
                return Err(Error::Config(format!(
                    "the tower sequence overflows after n_{TOWER_MAX_HORIZON} = 2^32; use the scaled policy for horizon {horizon}"
                )));
            }
            for k in 1..=horizon as u64 {
                let floor = 1u64 << (1u64 << k);
                let v = match n.last() {
                    None => floor,
                    Some(&prev) => next_admissible(floor.max(prev + 1), prev, k).expect("fits below 2^33"),
                };
                n.push(v);
            }
        }
        ScalePolicy::Scaled { base } => {
            if base < 2 {
                return Err(Error::Config("the scaled policy needs base ≥ 2".into()));
            }
            n.push(base);
            for k in 2..=horizon as u64 {
                let prev = *n.last().expect("nonempty");
                let v = prev
                    .checked_mul(base)
                    .and_then(|floor| next_admissible(floor, prev, k))
                    .ok_or_else(|| Error::Config(format!("n_{k} overflows 64 bits with base {base}")))?;
                n.push(v);
            }
        }
    }
    ScaleSequence::new(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tower_sequence() {
        let s = make_scale_sequence(ScalePolicy::Tower, 5).unwrap();
        assert_eq!(s.n, vec![4, 16, 256, 65536, 1 << 32]);
        assert!(matches!(make_scale_sequence(ScalePolicy::Tower, 6), Err(Error::Config(_))));
    }

    #[test]
    fn scaled_sequences() {
        let s = make_scale_sequence(ScalePolicy::Scaled { base: 4 }, 4).unwrap();
        assert_eq!(s.n, vec![4, 16, 64, 256]);
        let s = make_scale_sequence(ScalePolicy::Scaled { base: 2 }, 5).unwrap();
        assert_eq!(s.n, vec![2, 4, 8, 17, 37]);
        assert_eq!(s.gap(4).unwrap(), 20);
    }

    #[test]
    fn rejects_bad_sequences() {
        assert!(ScaleSequence::new(vec![4, 4]).is_err());
        assert!(ScaleSequence::new(vec![2, 4, 7]).is_err());
        assert!(ScaleSequence::new(vec![2, 4, 8]).is_ok());
    }
}
