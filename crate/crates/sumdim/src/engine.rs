//! Path counting over lazily determinized automata whose input is a
//! sequence of periodic column blocks.
//!
//! A chunk (one period of a piece) is expanded bit by bit once per
//! subset state; long repetitions go through cached matrix powers over
//! the states reachable from the current support.

use crate::bigcount::Tally;
use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::Hash;
use std::rc::Rc;

pub trait Semiring: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn is_zero(&self) -> bool;
    /// Weight of a single edge with the given branching cost.
    fn edge(cost: u8) -> Self;
}

impl Semiring for Tally {
    fn zero() -> Self {
        Tally::zero()
    }
    fn one() -> Self {
        Tally::one()
    }
    fn add(&self, o: &Self) -> Self {
        Tally::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Tally::mul(self, o)
    }
    fn is_zero(&self) -> bool {
        Tally::is_zero(self)
    }
    fn edge(_: u8) -> Self {
        Tally::one()
    }
}

/// Tropical semiring: minimum total cost, `u64::MAX` is unreachable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinPlus(pub u64);

impl Semiring for MinPlus {
    fn zero() -> Self {
        MinPlus(u64::MAX)
    }
    fn one() -> Self {
        MinPlus(0)
    }
    fn add(&self, o: &Self) -> Self {
        MinPlus(self.0.min(o.0))
    }
    fn mul(&self, o: &Self) -> Self {
        if self.0 == u64::MAX || o.0 == u64::MAX {
            MinPlus(u64::MAX)
        } else {
            MinPlus(self.0 + o.0)
        }
    }
    fn is_zero(&self) -> bool {
        self.0 == u64::MAX
    }
    fn edge(cost: u8) -> Self {
        MinPlus(cost as u64)
    }
}

/// A deterministic automaton built on demand: states and columns are ids.
pub trait Stepper {
    /// Outgoing edges `(target, cost)` of state `s` reading column `col`;
    /// at most one edge per output digit.
    fn step(&mut self, s: u32, col: u32) -> Result<Vec<(u32, u8)>>;
    fn state_count(&self) -> usize;
}

/// Hash-consing of keys into dense ids; ids follow insertion order.
#[derive(Debug)]
pub struct Interner<K: Hash + Eq + Clone> {
    map: HashMap<K, u32>,
    items: Vec<K>,
}

impl<K: Hash + Eq + Clone> Default for Interner<K> {
    fn default() -> Self {
        Interner { map: HashMap::new(), items: Vec::new() }
    }
}

impl<K: Hash + Eq + Clone> Interner<K> {
    pub fn intern(&mut self, k: K) -> u32 {
        if let Some(&id) = self.map.get(&k) {
            return id;
        }
        let id = self.items.len() as u32;
        self.items.push(k.clone());
        self.map.insert(k, id);
        id
    }

    pub fn get(&self, id: u32) -> &K {
        &self.items[id as usize]
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

pub type Dist<S> = BTreeMap<u32, S>;

struct Power<S> {
    index: Vec<u32>,
    pos: HashMap<u32, usize>,
    mat: Vec<S>,
}

/// Repetition counts up to this are applied one chunk at a time.
const DIRECT_REPS: u64 = 8;

pub struct Runner<S: Semiring> {
    chunks: Interner<Vec<u32>>,
    transfer: HashMap<(u32, u32), Rc<Vec<(u32, S)>>>,
    powers: HashMap<(u32, u64), Power<S>>,
}

impl<S: Semiring> Default for Runner<S> {
    fn default() -> Self {
        Runner { chunks: Interner::default(), transfer: HashMap::new(), powers: HashMap::new() }
    }
}

impl<S: Semiring> Runner<S> {
    pub fn chunk_id(&mut self, cols: Vec<u32>) -> u32 {
        self.chunks.intern(cols)
    }

    fn chunk_transfer<A: Stepper>(&mut self, aut: &mut A, s: u32, chunk: u32) -> Result<Rc<Vec<(u32, S)>>> {
        if let Some(t) = self.transfer.get(&(s, chunk)) {
            return Ok(t.clone());
        }
        let cols = self.chunks.get(chunk).clone();
        let mut cur: Dist<S> = BTreeMap::new();
        cur.insert(s, S::one());
        for &c in &cols {
            let mut next: Dist<S> = BTreeMap::new();
            for (&t, v) in &cur {
                for (t2, cost) in aut.step(t, c)? {
                    let w = v.mul(&S::edge(cost));
                    accumulate(&mut next, t2, w);
                }
            }
            cur = next;
        }
        let out = Rc::new(cur.into_iter().collect::<Vec<_>>());
        self.transfer.insert((s, chunk), out.clone());
        Ok(out)
    }

    fn apply_once<A: Stepper>(&mut self, aut: &mut A, dist: &Dist<S>, chunk: u32) -> Result<Dist<S>> {
        let mut next: Dist<S> = BTreeMap::new();
        for (&s, v) in dist {
            let tr = self.chunk_transfer(aut, s, chunk)?;
            for (t, w) in tr.iter() {
                accumulate(&mut next, *t, v.mul(w));
            }
        }
        Ok(next)
    }

    /// Advances a distribution through `reps` copies of a chunk.
    pub fn advance<A: Stepper>(&mut self, aut: &mut A, dist: Dist<S>, chunk: u32, reps: u64) -> Result<Dist<S>> {
        if reps <= DIRECT_REPS {
            let mut d = dist;
            for _ in 0..reps {
                d = self.apply_once(aut, &d, chunk)?;
            }
            return Ok(d);
        }
        let key = (chunk, reps);
        let covered = match self.powers.get(&key) {
            Some(p) => dist.keys().all(|s| p.pos.contains_key(s)),
            None => false,
        };
        if !covered {
            let mut roots: BTreeSet<u32> = dist.keys().copied().collect();
            if let Some(p) = self.powers.get(&key) {
                roots.extend(p.index.iter().copied());
            }
            let power = self.build_power(aut, roots, chunk, reps)?;
            self.powers.insert(key, power);
        }
        let p = &self.powers[&key];
        let q = p.index.len();
        let mut out: Dist<S> = BTreeMap::new();
        for (s, v) in &dist {
            let i = p.pos[s];
            for j in 0..q {
                let m = &p.mat[i * q + j];
                if !m.is_zero() {
                    accumulate(&mut out, p.index[j], v.mul(m));
                }
            }
        }
        Ok(out)
    }

    fn build_power<A: Stepper>(&mut self, aut: &mut A, roots: BTreeSet<u32>, chunk: u32, reps: u64) -> Result<Power<S>> {
        let mut index: Vec<u32> = Vec::new();
        let mut pos: HashMap<u32, usize> = HashMap::new();
        let mut stack: Vec<u32> = roots.into_iter().rev().collect();
        while let Some(s) = stack.pop() {
            if pos.contains_key(&s) {
                continue;
            }
            pos.insert(s, index.len());
            index.push(s);
            let tr = self.chunk_transfer(aut, s, chunk)?;
            for (t, _) in tr.iter().rev() {
                if !pos.contains_key(t) {
                    stack.push(*t);
                }
            }
        }
        let q = index.len();
        let mut base = vec![S::zero(); q * q];
        for (i, &s) in index.iter().enumerate() {
            let tr = self.chunk_transfer(aut, s, chunk)?;
            for (t, w) in tr.iter() {
                base[i * q + pos[t]] = w.clone();
            }
        }
        let mut result: Option<Vec<S>> = None;
        let mut r = reps;
        let mut b = base;
        loop {
            if r & 1 == 1 {
                result = Some(match result {
                    None => b.clone(),
                    Some(acc) => mat_mul(&acc, &b, q),
                });
            }
            r >>= 1;
            if r == 0 {
                break;
            }
            b = mat_mul(&b, &b, q);
        }
        Ok(Power { index, pos, mat: result.expect("reps > 0") })
    }
}

fn accumulate<S: Semiring>(d: &mut Dist<S>, k: u32, v: S) {
    if v.is_zero() {
        return;
    }
    match d.get_mut(&k) {
        Some(x) => *x = x.add(&v),
        None => {
            d.insert(k, v);
        }
    }
}

fn mat_mul<S: Semiring>(a: &[S], b: &[S], q: usize) -> Vec<S> {
    let mut c = vec![S::zero(); q * q];
    for i in 0..q {
        for k in 0..q {
            let x = &a[i * q + k];
            if x.is_zero() {
                continue;
            }
            for j in 0..q {
                let y = &b[k * q + j];
                if y.is_zero() {
                    continue;
                }
                let p = x.mul(y);
                let cell = &mut c[i * q + j];
                *cell = if cell.is_zero() { p } else { cell.add(&p) };
            }
        }
    }
    c
}

pub fn check_budget(states: usize, budget: usize) -> Result<()> {
    if states > budget {
        return Err(Error::Budget(format!("more than {budget} subset states")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Single state, two edges per column: counts 2^n words.
    struct Binary;

    impl Stepper for Binary {
        fn step(&mut self, s: u32, _: u32) -> Result<Vec<(u32, u8)>> {
            Ok(vec![(s, 0), (s, 1)])
        }
        fn state_count(&self) -> usize {
            1
        }
    }

    #[test]
    fn matrix_power_matches_direct_iteration() {
        let mut r: Runner<Tally> = Runner::default();
        let c = r.chunk_id(vec![0, 0, 0]);
        let mut d = BTreeMap::new();
        d.insert(0u32, Tally::one());
        let out = r.advance(&mut Binary, d.clone(), c, 100).unwrap();
        assert_eq!(out[&0].lo, crate::bigcount::BigCount::pow2(300));
        let mut m: Runner<MinPlus> = Runner::default();
        let c = m.chunk_id(vec![0, 0]);
        let mut d = BTreeMap::new();
        d.insert(0u32, MinPlus(0));
        assert_eq!(m.advance(&mut Binary, d, c, 1000).unwrap()[&0], MinPlus(0));
    }
}
