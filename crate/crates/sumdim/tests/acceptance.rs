//! Acceptance criteria, one pass/fail line each. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.
//!
//! Criteria in `KNOWN_RED` are reported but not asserted; the reason is
//! printed next to the verdict.

use std::time::Instant;
use sumdim::analysis::{count_trace, default_scales, greedy_branching, off_trace};
use sumdim::automaton::{min_branching, prefix_counts, sum_prefix_cover};
use sumdim::constructions::blocks::{chunk, chunk_frequency};
use sumdim::constructions::targets::{fold_bound, format_rational};
use sumdim::constructions::*;
use sumdim::oracle::{brute_force_oracle, DEFAULT_ENUM_BUDGET};
use sumdim::plunnecke::{prop31_check, random_int_set, random_sample, rng, ruzsa_check, sumset_cover_bound_check};
use sumdim::{CountMode, EngineConfig, Error};

/// Criteria that fail for reasons recorded in the project notes.
const KNOWN_RED: &[u32] = &[4];

// Pinned tolerances.
const C3_HALF_WIDTH_NUMERATOR: f64 = 6.0; // half-width ≤ log2(6)/j
const C7_GAP_MIN: f64 = 0.15;
const C7_AGREE_MAX: f64 = 0.05;
const C1_MIN_SPECS: usize = 50;
const C1_MAX_DEPTH: u64 = 20;

struct Outcome {
    pass: bool,
    detail: String,
}

fn q(s: &str) -> Q {
    parse_rational(s).unwrap()
}

fn targets(a: &[&str], b: &[&str], g: &[&str]) -> DimensionTargets {
    DimensionTargets::parse(a, b, g).unwrap()
}

// ---------------------------------------------------------------------------

fn c1_oracle_equivalence() -> Outcome {
    let seqs: Vec<Vec<u64>> = vec![vec![2, 4], vec![2, 4, 8], vec![2, 4, 8, 17], vec![3, 9], vec![4, 16], vec![1, 2, 4, 7], vec![1, 2, 4, 7, 11, 16], vec![2, 3, 5, 8, 12, 17]];
    let grid: Vec<(ExampleName, DimensionTargets)> = vec![
        (ExampleName::PairHausdorff, targets(&["1/2", "1"], &[], &[])),
        (ExampleName::PairHausdorff, targets(&["1/4", "1/2"], &[], &[])),
        (ExampleName::PairHausdorff, targets(&["1/3", "2/3"], &[], &[])),
        (ExampleName::TripleHausdorff, targets(&["1/4", "1/2", "3/4"], &[], &[])),
        (ExampleName::TripleHausdorff, targets(&["1/2", "1/2", "1"], &[], &[])),
        (ExampleName::HausLowbox, targets(&["1/4", "1/2"], &["1/2", "1"], &[])),
        (ExampleName::HausLowbox, targets(&["0", "1/4"], &["1/3", "1/2"], &[])),
        (ExampleName::AllDims2, targets(&["1/4", "1/2"], &["1/2", "3/4"], &["3/4", "1"])),
        (ExampleName::AllDims2, targets(&["1/8", "1/4"], &["1/4", "1/2"], &["1/2", "1"])),
        (ExampleName::AllDims3, targets(&["1/8", "1/4", "3/8"], &["1/4", "1/2", "5/8"], &["1/2", "3/4", "1"])),
        (ExampleName::AllDims3, targets(&["1/4", "1/2", "3/4"], &["1/4", "1/2", "3/4"], &["1/4", "1/2", "3/4"])),
    ];
    let cfg = EngineConfig::default();
    let (mut tested, mut skipped, mut comparisons) = (0usize, 0usize, 0usize);
    let mut names = std::collections::BTreeSet::new();
    let mut mismatch: Option<String> = None;
    for n in &seqs {
        let sc = ScaleSequence::new(n.clone()).unwrap();
        let depth = *n.last().unwrap();
        assert!(depth <= C1_MAX_DEPTH);
        for (name, t) in &grid {
            let spec = match build_example(*name, t, &sc, depth) {
                Ok(s) => s,
                Err(e) => panic!("{name} on {n:?}: {e}"),
            };
            let mut complete = true;
            let mut local = 0;
            'outer: for fold in 1..=3u32 {
                for j in 1..=depth {
                    let o = match brute_force_oracle(&spec, fold, j, DEFAULT_ENUM_BUDGET) {
                        Ok(o) => o,
                        Err(Error::Budget(_)) => {
                            complete = false;
                            break 'outer;
                        }
                        Err(e) => panic!("{e}"),
                    };
                    let r = sum_prefix_cover(&spec, fold, j, CountMode::Exact, &cfg).unwrap();
                    local += 1;
                    if r.fell_back || r.starts != o {
                        mismatch.get_or_insert(format!("{name} {n:?} fold {fold} j {j}: engine {:?} oracle {:?}", r.starts, o));
                    }
                }
            }
            if complete {
                tested += 1;
                comparisons += local;
                names.insert(name.as_str());
            } else {
                skipped += 1;
            }
        }
    }
    let pass = mismatch.is_none() && tested >= C1_MIN_SPECS && names.len() == 5;
    Outcome {
        pass,
        detail: match mismatch {
            Some(m) => m,
            None => format!(
                "{tested} specs ({} constructions) × every scale × folds 1..3 = {comparisons} exact matches; {skipped} specs over the enumeration budget",
                names.len()
            ),
        },
    }
}

// ---------------------------------------------------------------------------

/// Templates written out from the block formulas, independent of the crate.
fn expected_chunk(kind: &str, k: u64, l: u64, m: u64, s: u64, p: u64, q: u64, v: u64) -> String {
    let w = |parts: &[(char, u64)]| parts.iter().map(|&(c, n)| c.to_string().repeat(n as usize)).collect::<String>();
    match kind {
        "a1" | "b1" => w(&[('a', l), ('0', k - l)]),
        "a2" | "b2" => w(&[('0', m - l), ('a', l), ('0', k - m)]),
        "a3" | "b3" => w(&[('0', m - l), ('a', l + m - s), ('0', s - m), ('a', s - m), ('0', k - s)]),
        "g1" => w(&[('a', p), ('0', k - p)]),
        "g2" => w(&[('0', q - p), ('a', p), ('0', k - q)]),
        "g3" => w(&[('0', q - p), ('a', p + q - v), ('0', v - q), ('a', v - q), ('0', k - v)]),
        _ => unreachable!(),
    }
}

fn fl(k: u64, x: &Q) -> u64 {
    (k as i64 * x.numer() / x.denom()) as u64
}

fn c2_block_templates() -> Outcome {
    let grid = ["0", "1/4", "1/2", "3/4", "1"].map(q);
    let n: Vec<u64> = (1..=65u64).map(|k| 1 + k * (k - 1)).collect();
    let sc = ScaleSequence::new(n).unwrap();
    let mut triples = Vec::new();
    for a in 0..5 {
        for b in a..5 {
            for c in b..5 {
                triples.push(vec![grid[a], grid[b], grid[c]]);
            }
        }
    }
    let (mut profiles, mut blocks, mut clamped) = (0usize, 0usize, 0usize);
    let mut bad: Option<String> = None;
    for al in &triples {
        for be in &triples {
            if al.iter().zip(be).any(|(x, y)| x > y) {
                continue;
            }
            for ga in &triples {
                if be.iter().zip(ga).any(|(x, y)| x > y) {
                    continue;
                }
                let t = DimensionTargets { alpha: al.clone(), beta: be.clone(), gamma: ga.clone() };
                if !validate_targets(&t, 3).passed() {
                    continue;
                }
                profiles += 1;
                for k in 1..=64u64 {
                    let (bp, moved) = match block_params_clamped(k, &t, &sc, DVariant::Full) {
                        Ok(x) => x,
                        Err(e) => {
                            bad.get_or_insert(format!("params at k = {k}: {e}"));
                            continue;
                        }
                    };
                    clamped += moved as usize;
                    let (l, m, p, qq) = (fl(k, &be[0]), fl(k, &be[1]), fl(k, &ga[0]), fl(k, &ga[1]));
                    let s = fl(k, &be[2]).clamp(m, l + m);
                    let v = fl(k, &ga[2]).clamp(qq, p + qq);
                    if (bp.l, bp.m, bp.p, bp.q, bp.s, bp.v) != (l, m, Some(p), Some(qq), Some(s), Some(v)) {
                        bad.get_or_insert(format!("k = {k}: parameters differ from the floors"));
                    }
                    let n_k = sc.at(k as usize).unwrap();
                    let gap = sc.gap(k as usize).unwrap();
                    for code in ["a1", "a2", "a3", "b1", "b2", "b3", "g1", "g2", "g3"] {
                        let kind = BlockKind::from_code(code).unwrap();
                        let c = chunk(kind, &bp).unwrap();
                        let cw: String = c.iter().map(|s| s.to_char()).collect();
                        let want = expected_chunk(code, k, l, m, s, p, qq, v);
                        if cw != want {
                            bad.get_or_insert(format!("{code} at k = {k}: {cw} vs {want}"));
                        }
                        // full block: α blocks start with min(d, gap) zeros
                        let blk = make_block(kind, k, &bp, &t, &sc).unwrap().word();
                        let lead = if let BlockKind::Alpha(i) = kind {
                            let (a, top) = (al[i as usize - 1], ga[i as usize - 1]);
                            let d = if a == q("0") {
                                k * n_k
                            } else {
                                let r = (top / a - Q::from(1)) * Q::from(n_k as i64) / Q::from(k as i64);
                                k * r.floor().to_integer() as u64
                            };
                            d.min(gap)
                        } else {
                            0
                        };
                        let want_blk = format!("{}{}", "0".repeat(lead as usize), want.repeat(((gap - lead) / k) as usize));
                        if blk != want_blk {
                            bad.get_or_insert(format!("block {code} at k = {k} differs"));
                        }
                        blocks += 1;
                        // Fr_a of β and γ chunks is l_k/k and p_k/k
                        let fr = chunk_frequency(kind, &bp).unwrap();
                        let want_fr = match code.as_bytes()[0] {
                            b'g' => Q::new(p as i64, k as i64),
                            _ => Q::new(l as i64, k as i64),
                        };
                        if fr != want_fr {
                            bad.get_or_insert(format!("Fr_a of {code} at k = {k}: {fr} vs {want_fr}"));
                        }
                    }
                }
            }
        }
    }
    Outcome {
        pass: bad.is_none() && profiles > 0,
        detail: bad.unwrap_or_else(|| {
            format!("{profiles} admissible grid profiles × k = 1..64 × 9 kinds = {blocks} blocks match; {clamped} (profile, k) pairs needed s_k or v_k pulled into range")
        }),
    }
}

// ---------------------------------------------------------------------------

fn c3_exponent_prediction() -> Outcome {
    let t = targets(&["1/4", "1/2"], &["1/2", "1"], &[]);
    let sc = make_scale_sequence(ScalePolicy::Scaled { base: 8 }, 13).unwrap();
    let depth = sc.at(13).unwrap();
    let spec = build_example(ExampleName::HausLowbox, &t, &sc, depth).unwrap();
    let scales = spec.boundaries();
    let mut bad = None;
    let mut worst = 0f64;
    for fold in [1u32, 2] {
        let tr = count_trace(&spec, fold, &scales, CountMode::Bracket, &EngineConfig::default()).unwrap();
        for e in &tr.entries {
            let half = (e.exp_upper - e.exp_lower) / 2.0;
            let lim = C3_HALF_WIDTH_NUMERATOR.log2() / e.j as f64;
            worst = worst.max(half / lim);
            if !e.contains_prediction() {
                bad.get_or_insert(format!("fold {fold} j {}: 2^{} outside [{}, {}]", e.j, e.predicted_free, e.lower, e.upper));
            } else if half > lim {
                bad.get_or_insert(format!("fold {fold} j {}: half-width {half:.3e} > {lim:.3e}", e.j));
            }
        }
    }
    Outcome {
        pass: bad.is_none(),
        detail: bad.unwrap_or_else(|| {
            format!(
                "{} boundaries up to n_13 = {depth}, folds 1 and 2: 2^F inside every bracket; widest half-width is {:.3} of log2(6)/j",
                scales.len(),
                worst
            )
        }),
    }
}

// ---------------------------------------------------------------------------

fn c4_validator() -> Outcome {
    let mut notes = Vec::new();
    let r = validate_targets(&targets(&[], &["0.2", "0.5"], &[]), 2);
    let reject_ok = r.first().is_some_and(|v| v.constraint == "β_2 ≤ 2β_1");
    notes.push(format!("β=(0.2,0.5) {}", if reject_ok { "rejected citing β_2 ≤ 2β_1" } else { "NOT rejected as required" }));
    let b = ["0.25", "0.5", "0.625"];
    let accept_ok = validate_targets(&targets(&[], &b, &[]), 3).passed()
        && fold_bound(&b.map(q), 3) == q("0.75");
    notes.push(format!("β=(0.25,0.5,0.625) {}", if accept_ok { "accepted, bound 3/4" } else { "NOT accepted" }));
    let mut first_rejected: Option<(usize, String)> = None;
    for len in 1..=8usize {
        for c in ["1/4", "1/2", "3/4", "1"] {
            let v = vec![q(c); len];
            let t = DimensionTargets::constant_profile(&v);
            let r = validate_targets(&t, len);
            if !r.passed() && first_rejected.is_none() {
                let b = fold_bound(&v, 4.min(len));
                first_rejected = Some((len, format!("c = {c}: {} (bound at l = 4 is {})", r.first().unwrap().constraint, format_rational(&b))));
            }
        }
    }
    let constants_ok = first_rejected.is_none();
    notes.push(match &first_rejected {
        None => "constant sequences of length 1..8 accepted".into(),
        Some((len, why)) => format!(
            "constant sequences are accepted up to length 3 but rejected from length {len}, {why}; \
             for β ≡ c the admissibility inequality at l = 4 reads c ≤ 2c − 3c = −c"
        ),
    });
    Outcome { pass: reject_ok && accept_ok && constants_ok, detail: notes.join("; ") }
}

// ---------------------------------------------------------------------------

fn c5_off_consistency() -> Outcome {
    let sc = make_scale_sequence(ScalePolicy::Scaled { base: 8 }, 13).unwrap();
    let depth = sc.at(13).unwrap();
    let cfg = EngineConfig::default();
    let mut bad = None;
    let mut checked = 0;
    for name in ExampleName::ALL {
        let spec = build_example(name, &name.default_targets(), &sc, depth).unwrap();
        let scales = default_scales(&spec);
        let off = off_trace(&spec, &scales, &cfg).unwrap();
        let counts = prefix_counts(&spec, &scales, &cfg).unwrap();
        for (o, (n, b)) in off.iter().zip(&counts) {
            assert_eq!(o.n, *n);
            // 2^branching ≤ number of prefixes, compared exactly
            if sumdim::BigCount::pow2(o.branching) > b.upper {
                bad.get_or_insert(format!("{name} n {n}: OFF {} above log2(upper)/n", o.off));
            }
            checked += 1;
        }
    }
    let t = ExampleName::HausLowbox.default_targets();
    let spec = build_example(ExampleName::HausLowbox, &t, &sc, depth).unwrap();
    let mut pts = Vec::new();
    for k in [3u64, 6, 9, 12] {
        let (bp, _) = block_params_clamped(k, &t, &sc, DVariant::LowerBoxOnly).unwrap();
        pts.push(sc.at(k as usize).unwrap() + bp.d[0].min(sc.gap(k as usize).unwrap()));
    }
    let dp = min_branching(&spec, &pts, &cfg).unwrap();
    let pred = greedy_branching(&spec, &pts).unwrap();
    for ((n, b), g) in dp.iter().zip(&pred) {
        if b != g {
            bad.get_or_insert(format!("haus-lowbox n {n}: OFF numerator {b}, schedule prediction {g}"));
        }
    }
    let offs: Vec<String> = dp.iter().map(|(n, b)| format!("{:.4}", *b as f64 / *n as f64)).collect();
    Outcome {
        pass: bad.is_none(),
        detail: bad.unwrap_or_else(|| {
            format!(
                "leaf bound holds at {checked} scales over the five examples; haus-lowbox OFF at n_3k + d_1(3k), k = 1..4: [{}] equal to the prediction",
                offs.join(", ")
            )
        }),
    }
}

// ---------------------------------------------------------------------------

fn c6_plunnecke_suite() -> Outcome {
    let seed = 20_261_019u64;
    let mut r = rng(seed);
    let mut bad = None;
    for i in 0..1000u32 {
        let l = 2 + i % 2;
        let (e, f) = (random_int_set(&mut r, 64), random_int_set(&mut r, 64));
        if !ruzsa_check(&e, &f, l).unwrap().holds {
            bad.get_or_insert(format!("ruzsa pair {i}"));
        }
    }
    let mut r = rng(seed + 1);
    let mut max_ratio = 0f64;
    for i in 0..500u32 {
        let l = 2 + i % 2;
        let s: Vec<_> = (0..l).map(|_| random_sample(&mut r, 16, 16)).collect();
        for j in 0..=12 {
            let c = sumset_cover_bound_check(&s, j).unwrap();
            let ratio = c.left.parse::<f64>().unwrap() / c.index_sum.parse::<f64>().unwrap();
            max_ratio = max_ratio.max(ratio / (l + 1) as f64);
            if !c.holds {
                bad.get_or_insert(format!("cover bound, sample {i}, j {j}: {} > {}·{}", c.left, l + 1, c.index_sum));
            }
        }
        if !prop31_check(&s[0], &s[1], l, 0..=12).unwrap().holds {
            bad.get_or_insert(format!("sum-window bound, sample {i}"));
        }
    }
    Outcome {
        pass: bad.is_none(),
        detail: bad.unwrap_or_else(|| {
            format!("seed {seed}: 1000 Ruzsa pairs, 500 samples × j = 0..12 for both window checks; largest left/((l+1)·index sum) = {max_ratio:.3}")
        }),
    }
}

// ---------------------------------------------------------------------------

fn c7_interleave_signature() -> Outcome {
    let sc = make_scale_sequence(ScalePolicy::Scaled { base: 2 }, 56).unwrap();
    let depth = *sc.n.last().unwrap();
    let p1 = DimensionTargets::constant_profile(&[q("1/4"), q("1/2"), q("3/4")]);
    let p2 = DimensionTargets::constant_profile(&[q("1/2"), q("1/2"), q("1/2")]);
    let a = build_example(ExampleName::AllDims3, &p1, &sc, depth).unwrap();
    let b = build_example(ExampleName::AllDims3, &p2, &sc, depth).unwrap();
    let m = [1u64, 24, 44];
    let x = interleave(&a, &b, &m).unwrap();
    let scales = x.boundaries();
    let cfg = EngineConfig::default();
    let up: Vec<Vec<f64>> = (1..=3u32)
        .map(|f| count_trace(&x, f, &scales, CountMode::Bracket, &cfg).unwrap().entries.iter().map(|e| e.exp_upper).collect())
        .collect();
    // entry i is the boundary n_{i+1}, which closes block i
    let last = scales.len() - 1;
    let a_active = m.iter().filter(|&&s| s <= last as u64).count() % 2 == 1;
    let gap = up[2][last] - up[1][last];
    // upper box proxies: maxima over boundaries from n_{M_2} on
    let from = m[1] as usize - 1;
    let max_over = |v: &Vec<f64>| v[from..].iter().cloned().fold(f64::MIN, f64::max);
    let (m1, m2) = (max_over(&up[0]), max_over(&up[1]));
    let pass = a_active && gap >= C7_GAP_MIN && (m1 - m2).abs() <= C7_AGREE_MAX;
    Outcome {
        pass,
        detail: format!(
            "A′ = (1/4,1/2,3/4), A″ = (1/2,1/2,1/2), switches at blocks {m:?}, {} blocks: at j = n_{} fold 3 − fold 2 = {:.3} − {:.3} = {gap:.3}; \
             max over j ≥ n_{}: fold 1 {m1:.3}, fold 2 {m2:.3}",
            scales.len(),
            scales.len(),
            up[2][last],
            up[1][last],
            m[1]
        ),
    }
}

// ---------------------------------------------------------------------------

fn c8_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"construction":"all-dims-2","scale_policy":{"policy":"scaled","base":4},"horizon":6,"folds":[1,2,3],"seed":11}"#,
    )
    .unwrap();
    let run = |cmd: &str, out: &str| -> Vec<u8> {
        let p = dir.path().join(out);
        let args = ["sumdim", cmd, "--config", cfg.to_str().unwrap(), "--out", p.to_str().unwrap()];
        assert_eq!(sumdim::cli::run(args), 0, "{cmd} failed");
        std::fs::read(p).unwrap()
    };
    let mut same = true;
    let mut names = Vec::new();
    for cmd in ["construct", "count", "dims", "off", "plunnecke"] {
        let a = run(cmd, &format!("{cmd}-1"));
        let b = run(cmd, &format!("{cmd}-2"));
        same &= a == b && !a.is_empty();
        names.push(format!("{cmd} {} bytes", a.len()));
    }
    Outcome { pass: same, detail: format!("two runs each, byte-identical: {}", names.join(", ")) }
}

#[test]
fn acceptance() {
    let criteria: [(u32, &str, fn() -> Outcome); 8] = [
        (1, "oracle equivalence", c1_oracle_equivalence),
        (2, "block template fidelity", c2_block_templates),
        (3, "finite-scale exponent prediction", c3_exponent_prediction),
        (4, "admissibility validator", c4_validator),
        (5, "OFF consistency", c5_off_consistency),
        (6, "Plünnecke instance suite", c6_plunnecke_suite),
        (7, "interleaved counterexample", c7_interleave_signature),
        (8, "determinism", c8_determinism),
    ];
    let mut unexpected = Vec::new();
    for (id, name, f) in criteria {
        let t = Instant::now();
        let o = f();
        let secs = t.elapsed().as_secs_f64();
        let tag = match (o.pass, KNOWN_RED.contains(&id)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("criterion {id} [{name}]: {tag} in {secs:.1}s: {}", o.detail);
        if !o.pass && !KNOWN_RED.contains(&id) {
            unexpected.push(id);
        }
    }
    assert!(unexpected.is_empty(), "criteria failed: {unexpected:?}");
}
