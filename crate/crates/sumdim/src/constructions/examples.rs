//! Component schedules of the five example constructions and the builder
//! that turns a schedule into a `SetSpec`.

use super::blocks::{block_params_clamped, make_block, BlockKind, BlockParams, DVariant};
use super::scales::ScaleSequence;
use super::targets::{validate_targets, DimensionTargets};
use crate::error::{Error, Result};
use crate::pattern::{DigitPattern, SetSpec};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExampleName {
    PairHausdorff,
    TripleHausdorff,
    HausLowbox,
    #[serde(rename = "all-dims-2")]
    AllDims2,
    #[serde(rename = "all-dims-3")]
    AllDims3,
}

impl ExampleName {
    pub const ALL: [ExampleName; 5] = [
        ExampleName::PairHausdorff,
        ExampleName::TripleHausdorff,
        ExampleName::HausLowbox,
        ExampleName::AllDims2,
        ExampleName::AllDims3,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExampleName::PairHausdorff => "pair-hausdorff",
            ExampleName::TripleHausdorff => "triple-hausdorff",
            ExampleName::HausLowbox => "haus-lowbox",
            ExampleName::AllDims2 => "all-dims-2",
            ExampleName::AllDims3 => "all-dims-3",
        }
    }

    /// Largest fold whose conditions the example relies on.
    pub fn folds(self) -> usize {
        match self {
            ExampleName::PairHausdorff | ExampleName::HausLowbox | ExampleName::AllDims2 => 2,
            ExampleName::TripleHausdorff | ExampleName::AllDims3 => 3,
        }
    }

    /// Digits before n_1: free for the interval examples, whose
    /// components are free outside their zero runs, zero otherwise.
    pub fn leading(self) -> Leading {
        match self {
            ExampleName::PairHausdorff | ExampleName::TripleHausdorff => Leading::Free,
            _ => Leading::Zero,
        }
    }

    /// Targets used when a run config names the example without targets.
    pub fn default_targets(self) -> DimensionTargets {
        let parse = |a: &[&str], b: &[&str], g: &[&str]| DimensionTargets::parse(a, b, g).expect("valid literals");
        match self {
            ExampleName::PairHausdorff => parse(&["1/2", "1"], &[], &[]),
            ExampleName::TripleHausdorff => parse(&["1/4", "1/2", "3/4"], &[], &[]),
            ExampleName::HausLowbox => parse(&["1/4", "1/2"], &["1/2", "1"], &[]),
            ExampleName::AllDims2 => parse(&["1/4", "1/2"], &["1/2", "3/4"], &["3/4", "1"]),
            ExampleName::AllDims3 => parse(&["1/8", "1/4", "3/8"], &["1/4", "1/2", "5/8"], &["1/2", "3/4", "1"]),
        }
    }

    pub fn variant(self) -> Option<DVariant> {
        match self {
            ExampleName::HausLowbox => Some(DVariant::LowerBoxOnly),
            ExampleName::AllDims2 | ExampleName::AllDims3 => Some(DVariant::Full),
            _ => None,
        }
    }
}

impl fmt::Display for ExampleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExampleName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ExampleName::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown construction {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Leading {
    Zero,
    Free,
}

/// Block kinds per component; block k of component c is `rows[c][k % period]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleTable {
    pub period: usize,
    pub rows: Vec<Vec<BlockKind>>,
}

impl ScheduleTable {
    fn parse(rows: &[&str]) -> Self {
        let rows: Vec<Vec<BlockKind>> = rows
            .iter()
            .map(|r| r.split_whitespace().map(|c| BlockKind::from_code(c).expect("table codes are valid")).collect())
            .collect();
        ScheduleTable { period: rows[0].len(), rows }
    }

    /// The rows followed by their specular images.
    fn with_specular(mut self) -> Self {
        let mirrored: Vec<Vec<BlockKind>> =
            self.rows.iter().map(|r| r.iter().map(|b| b.specular()).collect()).collect();
        self.rows.extend(mirrored);
        self
    }

    pub fn kind(&self, component: usize, k: u64) -> BlockKind {
        self.rows[component][(k % self.period as u64) as usize]
    }

    pub fn check(&self) -> Result<()> {
        if self.period == 0 || self.rows.is_empty() || self.rows.iter().any(|r| r.len() != self.period) {
            return Err(Error::Construction("every schedule row needs one kind per phase".into()));
        }
        Ok(())
    }
}

/// Rows A_1..A_18 of the three-fold table, columns 12k+0 .. 12k+11.
pub const ALL_DIMS_3_TABLE: [&str; 18] = [
    "g1 a1 g2 a2 g3 a3 g1 a1 g2 a2 g3 b1",
    "g1 a1 g2 a2 g3 a3 g1 a1 g2 b1 g3 a3",
    "g1 a1 g2 a2 g3 a3 g1 b1 g2 a2 g3 a3",
    "g1 a1 g2 a2 g3 b1 g1 a1 g2 a2 g3 a3",
    "g1 a1 g2 b1 g3 a3 g1 a1 g2 a2 g3 a3",
    "g1 b1 g2 a2 g3 a3 g1 a1 g2 a2 g3 a3",
    "g2 a2 g3 a3 g1 a1 g3 a3 g1 a1 g2 b2",
    "g2 a2 g3 a3 g1 a1 g3 a3 g1 b2 g2 a2",
    "g2 a2 g3 a3 g1 a1 g3 b2 g1 a1 g2 a2",
    "g2 a2 g3 a3 g1 b2 g3 a3 g1 a1 g2 a2",
    "g2 a2 g3 b2 g1 a1 g3 a3 g1 a1 g2 a2",
    "g2 b2 g3 a3 g1 a1 g3 a3 g1 a1 g2 a2",
    "g3 a3 g1 a1 g2 a2 g2 a2 g3 a3 g1 b3",
    "g3 a3 g1 a1 g2 a2 g2 a2 g3 b3 g1 a1",
    "g3 a3 g1 a1 g2 a2 g2 b3 g3 a3 g1 a1",
    "g3 a3 g1 a1 g2 b3 g2 a2 g3 a3 g1 a1",
    "g3 a3 g1 b3 g2 a2 g2 a2 g3 a3 g1 a1",
    "g3 b3 g1 a1 g2 a2 g2 a2 g3 a3 g1 a1",
];

/// The schedule of an example. Pair-Hausdorff drops its second
/// component when α_2 = 0.
pub fn schedule(name: ExampleName, t: &DimensionTargets) -> ScheduleTable {
    match name {
        ExampleName::PairHausdorff => {
            let mut rows = vec!["z1 free z2"];
            if t.alpha.get(1).is_some_and(|a| *a.numer() != 0) {
                rows.push("free z1 z2");
            }
            ScheduleTable::parse(&rows)
        }
        ExampleName::TripleHausdorff => ScheduleTable::parse(&[
            "z1 free z2 free z2 z3",
            "free z1 z2 z2 free z3",
            "z1 free free z2 z2 z3",
        ]),
        ExampleName::HausLowbox => ScheduleTable::parse(&["a1 a2 b1", "b1 a1 a2", "a2 b1 a1"]).with_specular(),
        ExampleName::AllDims2 => ScheduleTable::parse(&[
            "g1 a1 g2 a2 g1 b1",
            "g1 b1 g1 a1 g2 a2",
            "g2 a2 g1 b1 g1 a1",
        ])
        .with_specular(),
        ExampleName::AllDims3 => ScheduleTable::parse(&ALL_DIMS_3_TABLE),
    }
}

fn required_lengths(name: ExampleName, t: &DimensionTargets) -> Result<()> {
    let (na, nb, ng) = match name {
        ExampleName::PairHausdorff => (2, 0, 0),
        ExampleName::TripleHausdorff => (3, 0, 0),
        ExampleName::HausLowbox => (2, 2, 0),
        ExampleName::AllDims2 => (2, 2, 2),
        ExampleName::AllDims3 => (3, 3, 3),
    };
    if t.alpha.len() < na || t.beta.len() < nb || t.gamma.len() < ng {
        return Err(Error::Config(format!(
            "{name} needs at least {na} α, {nb} β and {ng} γ values"
        )));
    }
    Ok(())
}

/// Truncates targets to what the example uses, so extra entries do not
/// change block parameters.
fn used_targets(name: ExampleName, t: &DimensionTargets) -> DimensionTargets {
    let n = name.folds();
    let cut = |v: &Vec<_>, keep: bool| if keep { v.iter().take(n).cloned().collect() } else { Vec::new() };
    let (b, g) = match name {
        ExampleName::PairHausdorff | ExampleName::TripleHausdorff => (false, false),
        ExampleName::HausLowbox => (true, false),
        _ => (true, true),
    };
    DimensionTargets { alpha: cut(&t.alpha, true), beta: cut(&t.beta, b), gamma: cut(&t.gamma, g) }
}

/// Builds the example on blocks 1..K where n_{K+1} = depth.
pub fn build_example(name: ExampleName, targets: &DimensionTargets, scales: &ScaleSequence, depth: u64) -> Result<SetSpec> {
    build_with(name, targets, scales, depth, name.leading())
}

pub fn build_with(
    name: ExampleName,
    targets: &DimensionTargets,
    scales: &ScaleSequence,
    depth: u64,
    leading: Leading,
) -> Result<SetSpec> {
    required_lengths(name, targets)?;
    let t = used_targets(name, targets);
    validate_targets(&t, name.folds()).into_result()?;
    scales.check()?;
    let last = scales
        .n
        .iter()
        .position(|&n| n == depth)
        .ok_or_else(|| Error::Construction(format!("depth {depth} is not one of the scales {:?}", scales.n)))?;
    if last == 0 {
        return Err(Error::Construction("depth must be n_{K+1} for some K ≥ 1".into()));
    }
    let blocks = last as u64; // blocks 1..=K with n_{K+1} = depth
    let table = schedule(name, &t);
    table.check()?;
    let mut params: Vec<Option<BlockParams>> = Vec::new();
    let mut clamped = Vec::new();
    for k in 1..=blocks {
        match name.variant() {
            Some(v) => {
                let (bp, moved) = block_params_clamped(k, &t, scales, v)?;
                if moved {
                    clamped.push(k);
                }
                params.push(Some(bp));
            }
            None => params.push(None),
        }
    }
    let n1 = scales.n[0];
    let mut comps = Vec::with_capacity(table.rows.len());
    for c in 0..table.rows.len() {
        let mut pat = match leading {
            Leading::Zero => DigitPattern::zeros(n1),
            Leading::Free => DigitPattern::free(n1),
        };
        for k in 1..=blocks {
            let kind = table.kind(c, k);
            let bp = params[k as usize - 1].clone().unwrap_or_else(|| placeholder_params(k));
            pat.append(&make_block(kind, k, &bp, &t, scales)?);
        }
        comps.push(pat);
    }
    let mut spec = SetSpec::new(name.as_str(), depth, comps)?;
    spec.scales = Some(scales.n[..=last].to_vec());
    spec.period = Some(table.period as u64);
    spec.params = json!({
        "construction": name.as_str(),
        "targets": t,
        "scale_sequence": scales.n[..=last].to_vec(),
        "leading": leading,
        "schedule": table.rows.iter().map(|r| r.iter().map(|b| b.code()).collect::<Vec<_>>().join(" ")).collect::<Vec<_>>(),
        "clamped_blocks": clamped,
    });
    Ok(spec)
}

/// Interval-zero and free blocks read no chunk parameters.
fn placeholder_params(k: u64) -> BlockParams {
    BlockParams { k, l: 0, m: 0, p: None, q: None, s: None, v: None, d: Vec::new() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::scales::{make_scale_sequence, ScalePolicy};
    use sha2::{Digest, Sha256};

    #[test]
    fn table_checksum() {
        let text = ALL_DIMS_3_TABLE.join("\n");
        let digest = hex::encode(Sha256::digest(text.as_bytes()));
        assert_eq!(&digest[..16], TABLE_DIGEST_PREFIX, "table text changed: {digest}");
    }

    const TABLE_DIGEST_PREFIX: &str = "c0b781b3d3f8a5a3";

    #[test]
    fn specular_rows_pair_up() {
        let t = DimensionTargets::default();
        for name in [ExampleName::HausLowbox, ExampleName::AllDims2] {
            let s = schedule(name, &t);
            let half = s.rows.len() / 2;
            for i in 0..half {
                let back: Vec<BlockKind> = s.rows[i + half].iter().map(|b| b.specular()).collect();
                assert_eq!(back, s.rows[i]);
            }
        }
        let s = schedule(ExampleName::HausLowbox, &t);
        assert_eq!(s.rows[3], vec![BlockKind::Alpha(2), BlockKind::Alpha(1), BlockKind::Beta(2)]);
    }

    #[test]
    fn alpha_blocks_follow_gamma_blocks() {
        let s = schedule(ExampleName::AllDims3, &DimensionTargets::default());
        assert_eq!((s.rows.len(), s.period), (18, 12));
        for row in &s.rows {
            for c in 0..s.period {
                if let BlockKind::Alpha(i) = row[c] {
                    assert_eq!(row[(c + s.period - 1) % s.period], BlockKind::Gamma(i));
                }
            }
        }
    }

    #[test]
    fn pair_hausdorff_shapes() {
        let sc = make_scale_sequence(ScalePolicy::Scaled { base: 2 }, 7).unwrap();
        let t = DimensionTargets::parse(&["1/2", "1"], &[], &[]).unwrap();
        let s = build_example(ExampleName::PairHausdorff, &t, &sc, sc.n[6]).unwrap();
        assert_eq!(s.components.len(), 2);
        // phase-2 blocks have zero-length zero runs when α_2 = 1
        let (a, b) = (sc.at(5).unwrap(), sc.at(6).unwrap());
        assert_eq!(s.components[1].slice(a, b).unwrap().free_count(b - a), b - a);
        let t = DimensionTargets::parse(&["0", "0"], &[], &[]).unwrap();
        let s = build_example(ExampleName::PairHausdorff, &t, &sc, sc.n[6]).unwrap();
        assert_eq!(s.components.len(), 1);
        let t = DimensionTargets::parse(&["1", "1"], &[], &[]).unwrap();
        let s = build_example(ExampleName::PairHausdorff, &t, &sc, sc.n[6]).unwrap();
        assert!(s.components.iter().all(|c| c.free_count(c.len()) == c.len()));
    }

    #[test]
    fn component_counts() {
        let sc = make_scale_sequence(ScalePolicy::Scaled { base: 3 }, 5).unwrap();
        let t = DimensionTargets::parse(&["1/4", "1/2", "5/8"], &["1/4", "1/2", "5/8"], &["1/4", "1/2", "5/8"]).unwrap();
        for (name, n) in [
            (ExampleName::PairHausdorff, 2),
            (ExampleName::TripleHausdorff, 3),
            (ExampleName::HausLowbox, 6),
            (ExampleName::AllDims2, 6),
            (ExampleName::AllDims3, 18),
        ] {
            let s = build_example(name, &t, &sc, sc.n[4]).unwrap();
            assert_eq!(s.components.len(), n, "{name}");
            assert_eq!(s.depth, sc.n[4]);
        }
    }

    #[test]
    fn rejects_inadmissible_targets() {
        let sc = make_scale_sequence(ScalePolicy::Scaled { base: 3 }, 4).unwrap();
        let t = DimensionTargets::parse(&["0.1", "0.2"], &["0.2", "0.5"], &[]).unwrap();
        let e = build_example(ExampleName::HausLowbox, &t, &sc, sc.n[3]).unwrap_err();
        assert!(e.to_string().contains("β_2 ≤ 2β_1"), "{e}");
        assert!(build_example(ExampleName::HausLowbox, &t, &sc, 5).is_err());
    }
}
