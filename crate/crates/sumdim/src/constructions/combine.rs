//! Pasting specs along consecutive digit segments, and interleaving two
//! specs built on the same scales.

use crate::error::{Error, Result};
use crate::pattern::{DigitPattern, SetSpec};
use serde::{Deserialize, Serialize};
use serde_json::json;

/// Largest number of components a paste may produce.
pub const MAX_PASTE_COMPONENTS: usize = 1 << 16;

/// Segment lengths M_1, M_2, ... and offsets S_1 = 0, S_{i+1} = S_i + M_i.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PastingPlan {
    pub lengths: Vec<u64>,
}

impl PastingPlan {
    pub fn new(lengths: Vec<u64>) -> Result<Self> {
        if lengths.is_empty() || lengths.contains(&0) {
            return Err(Error::Construction("pasting needs positive segment lengths".into()));
        }
        if lengths.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Construction("pasting segment lengths must not decrease".into()));
        }
        Ok(PastingPlan { lengths })
    }

    pub fn offsets(&self) -> Vec<u64> {
        let mut s = vec![0u64];
        for m in &self.lengths {
            s.push(s.last().unwrap() + m);
        }
        s
    }
}

/// Segment i of every result point follows the first M_i digits of some
/// component of `specs[i]`; one result component per choice of source
/// components.
pub fn paste(specs: &[SetSpec], plan: &PastingPlan) -> Result<SetSpec> {
    if specs.len() != plan.lengths.len() {
        return Err(Error::Construction(format!(
            "{} specs but {} segment lengths",
            specs.len(),
            plan.lengths.len()
        )));
    }
    let mut total = 1usize;
    for (s, &m) in specs.iter().zip(&plan.lengths) {
        if m > s.depth {
            return Err(Error::Construction(format!("segment length {m} exceeds the depth {} of {}", s.depth, s.name)));
        }
        if s.scales.is_some() && !s.boundaries().contains(&m) {
            return Err(Error::Construction(format!("segment length {m} is not a block boundary of {}", s.name)));
        }
        total = total.saturating_mul(s.components.len());
    }
    if total > MAX_PASTE_COMPONENTS {
        return Err(Error::Budget(format!("pasting would create {total} components")));
    }
    let mut comps = vec![DigitPattern::empty()];
    for (s, &m) in specs.iter().zip(&plan.lengths) {
        let heads = s.components.iter().map(|c| c.prefix(m)).collect::<Result<Vec<_>>>()?;
        let mut next = Vec::with_capacity(comps.len() * heads.len());
        for c in &comps {
            for h in &heads {
                next.push(c.clone().concat(h));
            }
        }
        comps = next;
    }
    let depth = *plan.offsets().last().expect("nonempty");
    let mut out = SetSpec::new("paste", depth, comps)?;
    out.params = json!({
        "paste": specs.iter().map(|s| s.name.clone()).collect::<Vec<_>>(),
        "lengths": plan.lengths,
    });
    Ok(out)
}

/// Block k comes from `b` for k < M_1, from `a` on [M_{2r−1}, M_{2r}) and
/// from `b` on [M_{2r}, M_{2r+1}). Digits before n_1 count as block 0.
pub fn interleave(a: &SetSpec, b: &SetSpec, m: &[u64]) -> Result<SetSpec> {
    let scales = match (&a.scales, &b.scales) {
        (Some(x), Some(y)) if x == y && a.depth == b.depth => x.clone(),
        _ => return Err(Error::Construction("interleaving needs two specs on the same scale sequence".into())),
    };
    if a.components.len() != b.components.len() {
        return Err(Error::Construction(format!(
            "interleaving pairs components by index, but the specs have {} and {}",
            a.components.len(),
            b.components.len()
        )));
    }
    if m.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Construction("the switching indices M must increase".into()));
    }
    let from_a = |k: u64| m.iter().filter(|&&x| x <= k).count() % 2 == 1;
    // block k spans [n_k, n_{k+1}); block 0 is [0, n_1)
    let mut cuts = vec![0u64];
    cuts.extend(scales.iter().copied().filter(|&n| n < a.depth));
    cuts.push(a.depth);
    let mut comps = Vec::with_capacity(a.components.len());
    for (ca, cb) in a.components.iter().zip(&b.components) {
        let mut p = DigitPattern::empty();
        for (k, w) in cuts.windows(2).enumerate() {
            let src = if from_a(k as u64) { ca } else { cb };
            p.append(&src.slice(w[0], w[1])?);
        }
        comps.push(p);
    }
    let mut out = SetSpec::new("interleave", a.depth, comps)?;
    out.scales = Some(scales);
    out.params = json!({ "a": a.name, "b": b.name, "switches": m, "a_params": a.params, "b_params": b.params });
    Ok(out)
}

/// Block indices k in 0..blocks taken from the first spec of an interleave.
pub fn active_blocks(m: &[u64], blocks: u64) -> Vec<u64> {
    (0..blocks).filter(|&k| m.iter().filter(|&&x| x <= k).count() % 2 == 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paste_examples() {
        let z = SetSpec::from_strings("z", &["0000"]).unwrap();
        let f = SetSpec::from_strings("f", &["aaaa"]).unwrap();
        let p = paste(&[z.clone(), f], &PastingPlan::new(vec![4, 4]).unwrap()).unwrap();
        assert_eq!(p.components[0].word(), "0000aaaa");
        let one = paste(&[z], &PastingPlan::new(vec![2]).unwrap()).unwrap();
        assert_eq!(one.components[0].word(), "00");
        let two = SetSpec::from_strings("t", &["a0", "0a"]).unwrap();
        let p = paste(&[two.clone(), two], &PastingPlan::new(vec![2, 2]).unwrap()).unwrap();
        let words: Vec<String> = p.components.iter().map(|c| c.word()).collect();
        assert_eq!(words, vec!["a0a0", "a00a", "0aa0", "0a0a"]);
        assert_eq!(PastingPlan::new(vec![2, 3, 5]).unwrap().offsets(), vec![0, 2, 5, 10]);
    }

    #[test]
    fn interleave_switches_blocks() {
        let mut a = SetSpec::from_strings("a", &["aaaaaaaa"]).unwrap();
        let mut b = SetSpec::from_strings("b", &["00000000"]).unwrap();
        a.scales = Some(vec![1, 2, 4, 8]);
        b.scales = Some(vec![1, 2, 4, 8]);
        let x = interleave(&a, &b, &[1, 3]).unwrap();
        // blocks: 0 = [0,1) b, 1 = [1,2) a, 2 = [2,4) a, 3 = [4,8) b
        assert_eq!(x.components[0].word(), "0aaa0000");
        let same = interleave(&a, &a, &[2]).unwrap();
        assert!(same.components[0].same_word(&a.components[0]));
        let all_a = interleave(&a, &b, &[0]).unwrap();
        assert!(all_a.components[0].same_word(&a.components[0]));
        assert_eq!(active_blocks(&[1, 3], 4), vec![1, 2]);
    }
}
