use num_bigint::BigUint;
use proptest::prelude::*;
use std::collections::BTreeSet;
use sumdim::automaton::{min_branching, sum_prefix_cover};
use sumdim::bigcount::Round;
use sumdim::constructions::*;
use sumdim::dyadic::IntervalCover;
use sumdim::oracle::{brute_force_oracle, DEFAULT_ENUM_BUDGET};
use sumdim::plunnecke::{
    dyadic_count, iterated_sumset, prop31_check, ruzsa_check, sumset, FiniteIntSet, PointSample,
};
use sumdim::{BigCount, CountMode, DigitPattern, EngineConfig, SetSpec};

fn word(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = String> {
    prop::collection::vec(prop::bool::ANY, len).prop_map(|v| v.into_iter().map(|b| if b { 'a' } else { '0' }).collect())
}

/// 1..=3 components of a common length.
fn small_spec(max_len: usize) -> impl Strategy<Value = SetSpec> {
    (1..=max_len, 1..=3usize).prop_flat_map(|(n, m)| {
        prop::collection::vec(word(n..=n), m).prop_map(|ws| {
            let refs: Vec<&str> = ws.iter().map(|s| s.as_str()).collect();
            SetSpec::from_strings("random", &refs).unwrap()
        })
    })
}

/// All points of the spec as integers with `depth` binary digits.
fn points(spec: &SetSpec) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    for c in &spec.components {
        let syms = c.to_symbols();
        let free: Vec<usize> = (0..syms.len()).filter(|&i| syms[i].is_free()).collect();
        for mask in 0u64..(1 << free.len()) {
            let mut v = 0u64;
            for (b, &i) in free.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    v |= 1 << (syms.len() - 1 - i);
                }
            }
            out.insert(v);
        }
    }
    out
}

/// Least number of two-child nodes on a root-to-depth-n path of the prefix tree.
fn naive_branching(spec: &SetSpec, n: u64) -> u64 {
    let d = spec.depth;
    let prefixes: Vec<BTreeSet<u64>> = (0..=n).map(|j| points(spec).iter().map(|p| p >> (d - j)).collect()).collect();
    let mut best: std::collections::BTreeMap<u64, u64> = prefixes[0].iter().map(|&p| (p, 0)).collect();
    for j in 1..=n as usize {
        let mut next = std::collections::BTreeMap::new();
        for &p in &prefixes[j] {
            let parent = p >> 1;
            let branch = prefixes[j].contains(&(parent << 1)) && prefixes[j].contains(&(parent << 1 | 1));
            let v = best[&parent] + branch as u64;
            next.insert(p, v);
        }
        best = next;
    }
    best.values().copied().min().unwrap_or(0)
}

fn int_set() -> impl Strategy<Value = FiniteIntSet> {
    prop::collection::btree_set(-40i64..40, 1..8).prop_map(|s| FiniteIntSet::from_i64(&s.into_iter().collect::<Vec<_>>()))
}

fn sample(bits: u32) -> impl Strategy<Value = PointSample> {
    prop::collection::vec(0u64..(1 << bits), 1..10).prop_map(move |v| PointSample::from_dyadic(&v, bits))
}

fn big(bits: usize) -> impl Strategy<Value = BigUint> {
    prop::collection::vec(any::<u32>(), 0..=bits / 32).prop_map(BigUint::new)
}

fn exact(b: &BigCount) -> BigUint {
    b.to_biguint().expect("bounded in these tests")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn exact_engine_matches_enumeration(spec in small_spec(9), fold in 1u32..=3) {
        let cfg = EngineConfig::default();
        for j in 1..=spec.depth {
            let o = brute_force_oracle(&spec, fold, j, DEFAULT_ENUM_BUDGET).unwrap();
            let r = sum_prefix_cover(&spec, fold, j, CountMode::Exact, &cfg).unwrap();
            prop_assert!(!r.fell_back);
            prop_assert_eq!(r.starts, o);
        }
    }

    #[test]
    fn bracket_contains_exact(spec in small_spec(10), fold in 1u32..=3) {
        let cfg = EngineConfig::default();
        for j in 1..=spec.depth {
            let e = sum_prefix_cover(&spec, fold, j, CountMode::Exact, &cfg).unwrap();
            let b = sum_prefix_cover(&spec, fold, j, CountMode::Bracket, &cfg).unwrap();
            prop_assert!(b.starts.lower <= e.starts.lower);
            prop_assert!(e.starts.upper <= b.starts.upper);
            prop_assert!(e.box_bracket().lower <= e.box_bracket().upper);
        }
    }

    #[test]
    fn bracket_width_is_bounded(spec in small_spec(14), fold in 2u32..=3) {
        // cells ≤ (l+1)·starts and starts ≤ choices of l components, so the
        // log-width shrinks like 1/j
        let cfg = EngineConfig::default();
        let j = spec.depth;
        let b = sum_prefix_cover(&spec, fold, j, CountMode::Bracket, &cfg).unwrap().box_bracket();
        let m = spec.components.len() as f64;
        let slack = ((fold as f64 + 1.0) * m.powi(fold as i32)).log2();
        prop_assert!(b.upper.log2() - b.lower.log2() <= slack + 1e-9);
    }

    #[test]
    fn next_free_and_free_count_match_scan(w in word(1..=40), from in 0u64..45) {
        let p = DigitPattern::parse(&w).unwrap();
        let syms: Vec<bool> = w.chars().map(|c| c == 'a').collect();
        let naive_next = (from as usize..syms.len()).find(|&i| syms[i]).map(|i| i as u64);
        prop_assert_eq!(p.next_free(from), naive_next);
        let to = from.min(syms.len() as u64);
        prop_assert_eq!(p.free_count(to), syms[..to as usize].iter().filter(|b| **b).count() as u64);
    }

    #[test]
    fn repeated_chunks_expand(chunk in word(1..=5), reps in 0u64..6) {
        let syms: Vec<_> = DigitPattern::parse(&chunk).unwrap().to_symbols();
        let p = DigitPattern::repeat(&syms, reps);
        prop_assert_eq!(p.word(), chunk.repeat(reps as usize));
    }

    #[test]
    fn bigcount_exact_arithmetic(a in big(200), b in big(200), k in any::<u64>()) {
        let (ca, cb) = (BigCount::from_biguint(a.clone(), Round::Down), BigCount::from_biguint(b.clone(), Round::Down));
        prop_assert_eq!(exact(&ca.add(&cb, Round::Down)), &a + &b);
        prop_assert_eq!(exact(&ca.mul(&cb, Round::Up)), &a * &b);
        prop_assert_eq!(exact(&ca.mul_u64(k, Round::Down)), &a * k);
        prop_assert_eq!(ca.cmp(&cb), a.cmp(&b));
    }

    #[test]
    fn bigcount_scaled_rounding_brackets(a in big(5000), b in big(5000), shift in 4090u64..4200) {
        let (a, b) = (a << shift, b + 1u32);
        for (x, y) in [(&a, &b), (&b, &a)] {
            let lo = BigCount::from_biguint(x.clone(), Round::Down).add(&BigCount::from_biguint(y.clone(), Round::Down), Round::Down);
            let hi = BigCount::from_biguint(x.clone(), Round::Up).add(&BigCount::from_biguint(y.clone(), Round::Up), Round::Up);
            let s = x + y;
            prop_assert!(exact(&lo) <= s && s <= exact(&hi));
            let lo = BigCount::from_biguint(x.clone(), Round::Down).mul(&BigCount::from_biguint(y.clone(), Round::Down), Round::Down);
            let hi = BigCount::from_biguint(x.clone(), Round::Up).mul(&BigCount::from_biguint(y.clone(), Round::Up), Round::Up);
            let p = x * y;
            prop_assert!(exact(&lo) <= p && p <= exact(&hi));
        }
    }

    #[test]
    fn cover_sum_commutes_and_adds_widths(
        a in prop::collection::vec(0u64..64, 1..8),
        b in prop::collection::vec(0u64..64, 1..8),
        wa in 1u64..3, wb in 1u64..3,
    ) {
        let ca = IntervalCover::from_u64(8, wa, &a).unwrap();
        let cb = IntervalCover::from_u64(8, wb, &b).unwrap();
        let ab = ca.cover_sum(&cb).unwrap();
        let ba = cb.cover_sum(&ca).unwrap();
        prop_assert_eq!(&ab, &ba);
        prop_assert_eq!(ab.width(), wa + wb);
        let naive: BTreeSet<u64> = a.iter().flat_map(|x| b.iter().map(move |y| x + y)).collect();
        prop_assert_eq!(ab.starts().len(), naive.len());
    }

    #[test]
    fn sumset_is_commutative_and_sized(e in int_set(), f in int_set()) {
        let ef = sumset(&e, &f);
        prop_assert_eq!(&ef, &sumset(&f, &e));
        prop_assert!(ef.len() >= e.len() + f.len() - 1);
        prop_assert!(ef.len() <= e.len() * f.len());
    }

    #[test]
    fn iterated_sumset_matches_repeated_sums(f in int_set(), fold in 1u32..=4) {
        let mut acc = f.clone();
        for _ in 1..fold {
            acc = sumset(&acc, &f);
        }
        prop_assert_eq!(iterated_sumset(&f, fold).unwrap(), acc);
    }

    #[test]
    fn ruzsa_inequality_holds(e in int_set(), f in int_set(), fold in 1u32..=4) {
        prop_assert!(ruzsa_check(&e, &f, fold).unwrap().holds);
    }

    #[test]
    fn window_counts_are_sandwiched(x in sample(10), j in 0u32..9, fold in 1u32..=4) {
        let one = dyadic_count(&x, j, 1).unwrap();
        let w = dyadic_count(&x, j, fold).unwrap();
        let wider = dyadic_count(&x, j, fold + 1).unwrap();
        prop_assert!(one <= w);
        prop_assert!(w <= wider);
        prop_assert!(w <= &one * fold);
        prop_assert_eq!(BigUint::from(x.cells(j).len()), one);
    }

    #[test]
    fn sum_window_bound_holds(a in sample(8), b in sample(8), fold in 2u32..=3) {
        let r = prop31_check(&a, &b, fold, 0..=8).unwrap();
        prop_assert!(r.holds);
    }

    #[test]
    fn min_branching_matches_prefix_tree(spec in small_spec(9)) {
        let cfg = EngineConfig::default();
        let scales: Vec<u64> = (1..=spec.depth).collect();
        for (n, b) in min_branching(&spec, &scales, &cfg).unwrap() {
            prop_assert_eq!(b, naive_branching(&spec, n), "n = {}", n);
        }
    }

    #[test]
    fn set_spec_json_roundtrip(spec in small_spec(20)) {
        let back = SetSpec::from_json(&spec.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), spec.to_json());
        prop_assert_eq!(back.depth, spec.depth);
        for (a, b) in back.components.iter().zip(&spec.components) {
            prop_assert_eq!(a.word(), b.word());
        }
    }

    #[test]
    fn interleaving_with_itself_is_identity(pick in 0usize..5, switches in prop::collection::btree_set(1u64..9, 0..4)) {
        let name = ExampleName::ALL[pick];
        let sc = ScaleSequence::new(vec![1, 2, 4, 7, 11, 16, 22, 29]).unwrap();
        let x = build_example(name, &name.default_targets(), &sc, 29).unwrap();
        let m: Vec<u64> = switches.into_iter().collect();
        let y = interleave(&x, &x, &m).unwrap();
        prop_assert_eq!(y.components.len(), x.components.len());
        for (a, b) in y.components.iter().zip(&x.components) {
            prop_assert!(a.same_word(b));
        }
    }
}
