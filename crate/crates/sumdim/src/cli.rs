//! Command-line front end: build specs from run configs, run traces and
//! checks, and write CSV or JSON outputs.

use crate::analysis::{
    count_trace, greedy_branching, interval_freedom_check, off_trace, sig12, trace_csv_rows, ScaleSelection, TRACE_COLUMNS,
};
use crate::automaton::{sum_prefix_cover, CountMode, EngineConfig};
use crate::constructions::targets::qvec;
use crate::constructions::{
    build_example, interleave, make_scale_sequence, validate_targets, DimensionTargets, ExampleName, ScalePolicy, ScaleSequence, Q,
};
use crate::error::{Error, Result};
use crate::oracle::{brute_force_oracle, DEFAULT_ENUM_BUDGET};
use crate::pattern::SetSpec;
use crate::plunnecke::{
    parse_big_rational, prop31_check, random_int_set, random_sample, rng, ruzsa_check, sumset_cover_bound_check, PointSample,
};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const VERSION_LINE: &str = concat!("sumdim ", env!("CARGO_PKG_VERSION"));

fn default_policy() -> ScalePolicy {
    ScalePolicy::Scaled { base: 4 }
}
fn default_horizon() -> usize {
    6
}
fn default_budget_enum() -> u64 {
    DEFAULT_ENUM_BUDGET
}
fn default_budget_states() -> usize {
    EngineConfig::default().state_budget
}
fn default_mode() -> CountMode {
    CountMode::Bracket
}

/// A second profile on the same scales, switched in on alternate block
/// ranges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterleaveConfig {
    #[serde(with = "qvec", default)]
    pub alpha: Vec<Q>,
    #[serde(with = "qvec", default)]
    pub beta: Vec<Q>,
    #[serde(with = "qvec", default)]
    pub gamma: Vec<Q>,
    /// Block indices where the source switches; the first one switches to
    /// the main profile.
    pub switches: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub construction: Option<ExampleName>,
    #[serde(with = "qvec", default)]
    pub alpha: Vec<Q>,
    #[serde(with = "qvec", default)]
    pub beta: Vec<Q>,
    #[serde(with = "qvec", default)]
    pub gamma: Vec<Q>,
    #[serde(default = "default_policy")]
    pub scale_policy: ScalePolicy,
    /// Number of terms n_1..n_K of the scale sequence.
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    /// Defaults to n_K.
    #[serde(default)]
    pub depth: Option<u64>,
    #[serde(default)]
    pub folds: Vec<u32>,
    /// "boundaries", "all" or a comma-separated list.
    #[serde(default)]
    pub scales: Option<String>,
    #[serde(default = "default_mode")]
    pub mode: CountMode,
    #[serde(default = "default_budget_enum")]
    pub budget_enum: u64,
    #[serde(default = "default_budget_states")]
    pub budget_states: usize,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub interleave: Option<InterleaveConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// The configured targets, or the example defaults when none are given.
    pub fn targets(&self) -> Result<DimensionTargets> {
        if self.alpha.is_empty() && self.beta.is_empty() && self.gamma.is_empty() {
            let name = self.construction.ok_or_else(|| Error::Config("no construction and no targets given".into()))?;
            return Ok(name.default_targets());
        }
        Ok(DimensionTargets { alpha: self.alpha.clone(), beta: self.beta.clone(), gamma: self.gamma.clone() })
    }

    pub fn scale_sequence(&self) -> Result<ScaleSequence> {
        make_scale_sequence(self.scale_policy, self.horizon)
    }

    pub fn engine(&self) -> EngineConfig {
        EngineConfig { state_budget: self.budget_states }
    }

    /// Builds the configured construction, interleaved if requested.
    pub fn build(&self) -> Result<SetSpec> {
        let name = self.construction.ok_or_else(|| Error::Config("the config names no construction".into()))?;
        let scales = self.scale_sequence()?;
        let depth = match self.depth {
            Some(d) => d,
            None => *scales.n.last().expect("horizon ≥ 2"),
        };
        let spec = build_example(name, &self.targets()?, &scales, depth)?;
        match &self.interleave {
            None => Ok(spec),
            Some(ic) => {
                let other = DimensionTargets { alpha: ic.alpha.clone(), beta: ic.beta.clone(), gamma: ic.gamma.clone() };
                let b = build_example(name, &other, &scales, depth)?;
                interleave(&spec, &b, &ic.switches)
            }
        }
    }

    /// sha256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(serde_json::to_vec(self).expect("config serializes")))
    }
}

#[derive(Parser, Debug)]
#[command(name = "sumdim", version, about = "Dyadic counts of digit-pattern sets and their iterated sums")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a set from a run config and write it as JSON.
    Construct(Opts),
    /// Count traces of lA as CSV.
    Count(Opts),
    /// Exponent summary as JSON.
    Dims(Opts),
    /// OFF_n trace as CSV.
    Off(Opts),
    /// Plünnecke–Ruzsa instance checks.
    Plunnecke(Opts),
    /// Admissibility of the configured targets.
    Validate(Opts),
    /// Engine counts against brute-force enumeration.
    Oracle(Opts),
}

#[derive(Args, Debug, Clone, Default)]
pub struct Opts {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// A set spec JSON file, used instead of building from the config.
    #[arg(long)]
    pub set: Option<PathBuf>,
    #[arg(long)]
    pub fold: Option<u32>,
    #[arg(long)]
    pub depth: Option<u64>,
    /// boundaries, all, or a comma-separated list
    #[arg(long)]
    pub scales: Option<String>,
    /// exact or bracket
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "budget-enum")]
    pub budget_enum: Option<u64>,
    #[arg(long = "budget-states")]
    pub budget_states: Option<usize>,
    /// Point sample file for A, one rational per line.
    #[arg(long = "sample-a")]
    pub sample_a: Option<PathBuf>,
    /// Point sample file for B.
    #[arg(long = "sample-b")]
    pub sample_b: Option<PathBuf>,
}

/// Everything a command needs: the effective config, the digest and the set.
struct Job {
    cfg: RunConfig,
    digest: String,
    set_text: Option<String>,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

impl Job {
    fn load(o: &Opts) -> Result<Job> {
        let mut cfg = match &o.config {
            Some(p) => RunConfig::from_json(&read(p)?)?,
            None => RunConfig::default(),
        };
        if let Some(f) = o.fold {
            cfg.folds = vec![f];
        }
        if o.depth.is_some() {
            cfg.depth = o.depth;
        }
        if o.scales.is_some() {
            cfg.scales = o.scales.clone();
        }
        if let Some(m) = &o.mode {
            cfg.mode = match m.as_str() {
                "exact" => CountMode::Exact,
                "bracket" => CountMode::Bracket,
                _ => return Err(Error::Config(format!("unknown mode {m:?}"))),
            };
        }
        if o.out.is_some() {
            cfg.out = o.out.clone();
        }
        if let Some(s) = o.seed {
            cfg.seed = s;
        }
        if let Some(b) = o.budget_enum {
            cfg.budget_enum = b;
        }
        if let Some(b) = o.budget_states {
            cfg.budget_states = b;
        }
        let set_text = o.set.as_deref().map(read).transpose()?;
        let mut h = Sha256::new();
        // the output path does not change results
        let mut keyed = cfg.clone();
        keyed.out = None;
        h.update(serde_json::to_vec(&keyed).expect("config serializes"));
        for (tag, p) in [("set", &o.set), ("sample-a", &o.sample_a), ("sample-b", &o.sample_b)] {
            if let Some(p) = p {
                h.update(tag.as_bytes());
                h.update(Sha256::digest(read(p)?.as_bytes()));
            }
        }
        Ok(Job { cfg, digest: hex::encode(h.finalize()), set_text })
    }

    fn spec(&self) -> Result<SetSpec> {
        match &self.set_text {
            Some(t) => SetSpec::from_json(t),
            None => self.cfg.build(),
        }
    }

    fn folds(&self, default: &[u32]) -> Vec<u32> {
        if self.cfg.folds.is_empty() {
            default.to_vec()
        } else {
            self.cfg.folds.clone()
        }
    }

    fn scales(&self, spec: &SetSpec, default: &str) -> Result<Vec<u64>> {
        ScaleSelection::parse(self.cfg.scales.as_deref().unwrap_or(default))?.resolve(spec)
    }

    fn csv_header(&self) -> String {
        format!("# {VERSION_LINE}\n# config-sha256 {}\n", self.digest)
    }

    fn stamp(&self, mut v: serde_json::Value) -> serde_json::Value {
        if let Some(m) = v.as_object_mut() {
            m.insert("version".into(), json!(VERSION_LINE));
            m.insert("config_digest".into(), json!(self.digest));
        }
        v
    }

    fn emit(&self, body: &str) -> Result<()> {
        match &self.cfg.out {
            Some(p) => write_atomic(p, body),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(body.as_bytes()).map_err(|e| Error::Config(format!("stdout: {e}")))
            }
        }
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, body: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| Error::Config(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(body.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn cmd_construct(job: &Job) -> Result<()> {
    let mut spec = job.cfg.build()?;
    let extra = json!({ "version": VERSION_LINE, "config_digest": job.digest });
    match spec.params.as_object_mut() {
        Some(m) => {
            m.insert("tool".into(), extra);
        }
        None => spec.params = json!({ "tool": extra }),
    }
    let mut body = spec.to_json();
    body.push('\n');
    if job.cfg.out.is_some() {
        job.emit(&body)?;
        println!("{}: {} components, depth {}", spec.name, spec.components.len(), spec.depth);
        Ok(())
    } else {
        eprintln!("{}: {} components, depth {}", spec.name, spec.components.len(), spec.depth);
        job.emit(&body)
    }
}

fn with_context<T>(r: Result<T>, what: String) -> Result<T> {
    r.map_err(|e| match e {
        Error::Budget(m) => Error::Budget(format!("{what}: {m}")),
        Error::Invariant(m) => Error::Invariant(format!("{what}: {m}")),
        Error::Scale(m) => Error::Scale(format!("{what}: {m}")),
        other => other,
    })
}

fn cmd_count(job: &Job) -> Result<()> {
    let spec = job.spec()?;
    let scales = job.scales(&spec, "boundaries")?;
    let mut body = job.csv_header();
    body.push_str(TRACE_COLUMNS);
    body.push('\n');
    for fold in job.folds(&[1, 2]) {
        let t = with_context(count_trace(&spec, fold, &scales, job.cfg.mode, &job.cfg.engine()), format!("fold {fold}"))?;
        body.push_str(&trace_csv_rows(&t));
    }
    job.emit(&body)
}

fn cmd_dims(job: &Job) -> Result<()> {
    let spec = job.spec()?;
    let scales = job.scales(&spec, "boundaries")?;
    let engine = job.cfg.engine();
    let mut folds = Vec::new();
    for fold in job.folds(&[1, 2, 3]) {
        let t = with_context(count_trace(&spec, fold, &scales, job.cfg.mode, &engine), format!("fold {fold}"))?;
        let col = |f: fn(&crate::analysis::CountRecord) -> f64| -> (f64, f64) {
            t.entries.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)))
        };
        let (lo_min, lo_max) = col(|e| e.exp_lower);
        let (up_min, up_max) = col(|e| e.exp_upper);
        let (pr_min, pr_max) = col(|e| e.predicted);
        let free = interval_freedom_check(&spec, fold)?;
        folds.push(json!({
            "fold": fold,
            "lower_box_proxy": { "exp_lower": sig12(lo_min), "exp_upper": sig12(up_min), "predicted": sig12(pr_min) },
            "upper_box_proxy": { "exp_lower": sig12(lo_max), "exp_upper": sig12(up_max), "predicted": sig12(pr_max) },
            "prediction_contained": t.entries.iter().all(|e| e.contains_prediction()),
            "interval_freedom": free,
        }));
    }
    let off = off_trace(&spec, &scales, &engine)?;
    let v = json!({
        "spec": spec.name,
        "depth": spec.depth,
        "scales": scales,
        "folds": folds,
        "hausdorff_lower_proxy": off.last().map(|r| sig12(r.running_min)),
        "note": "min and max are over the listed scales only; the OFF running minimum bounds dim_H from below",
    });
    job.emit(&pretty(&job.stamp(v)))
}

fn cmd_off(job: &Job) -> Result<()> {
    let spec = job.spec()?;
    let scales = job.scales(&spec, "boundaries")?;
    let off = off_trace(&spec, &scales, &job.cfg.engine())?;
    let greedy = greedy_branching(&spec, &scales)?;
    let mut body = job.csv_header();
    body.push_str("n,branching,off,running_min,predicted\n");
    for (r, g) in off.iter().zip(greedy) {
        body.push_str(&format!(
            "{},{},{},{},{}\n",
            r.n,
            r.branching,
            sig12(r.off),
            sig12(r.running_min),
            sig12(g as f64 / r.n as f64)
        ));
    }
    job.emit(&body)
}

fn cmd_validate(job: &Job) -> Result<()> {
    let t = job.cfg.targets()?;
    let max_fold = match (job.cfg.folds.iter().max(), job.cfg.construction) {
        (Some(&f), _) => f as usize,
        (None, Some(n)) => n.folds(),
        (None, None) => t.alpha.len().max(t.beta.len()).max(t.gamma.len()),
    };
    let report = validate_targets(&t, max_fold);
    let v = json!({ "targets": t, "max_fold": max_fold, "passed": report.passed(), "violations": report.violations });
    let body = pretty(&job.stamp(v));
    if job.cfg.out.is_some() {
        job.emit(&body)?;
    }
    match report.first() {
        None => {
            println!("PASS");
            Ok(())
        }
        Some(v) => {
            println!("FAIL: {} ({})", v.constraint, v.detail);
            Err(Error::Admissibility(v.constraint.clone()))
        }
    }
}

fn cmd_oracle(job: &Job) -> Result<()> {
    let spec = job.spec()?;
    let scales = job.scales(&spec, "all")?;
    let engine = job.cfg.engine();
    let mut body = job.csv_header();
    body.push_str("j,fold,oracle,engine_lower,engine_upper,verdict\n");
    let mut all = true;
    for fold in job.folds(&[1, 2, 3]) {
        for &j in &scales {
            let o = with_context(brute_force_oracle(&spec, fold, j, job.cfg.budget_enum), format!("oracle at j = {j}, fold {fold}"))?;
            let e = with_context(sum_prefix_cover(&spec, fold, j, job.cfg.mode, &engine), format!("engine at j = {j}, fold {fold}"))?;
            let ok = match job.cfg.mode {
                CountMode::Exact if !e.fell_back => e.starts == o,
                _ => e.starts.lower <= o.lower && o.lower <= e.starts.upper,
            };
            all &= ok;
            body.push_str(&format!(
                "{j},{fold},{},{},{},{}\n",
                o.lower,
                e.starts.lower,
                e.starts.upper,
                if ok { "MATCH" } else { "MISMATCH" }
            ));
        }
    }
    job.emit(&body)?;
    if all {
        eprintln!("MATCH");
        Ok(())
    } else {
        eprintln!("MISMATCH");
        Err(Error::Invariant("engine and oracle counts differ".into()))
    }
}

/// Reads a point file; the bound is 1 or the largest point if that is larger.
fn load_sample(path: &Path) -> Result<PointSample> {
    let raw = read(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(parse_big_rational)
        .collect::<Result<Vec<_>>>()?;
    let one = parse_big_rational("1")?;
    let bound = raw.iter().max().filter(|m| **m > one).cloned().unwrap_or(one);
    PointSample::new(raw, bound)
}

fn cmd_plunnecke(job: &Job, o: &Opts) -> Result<()> {
    // fold 1 has no sumset to compare against
    let mut folds: Vec<u32> = job.folds(&[2, 3]).into_iter().filter(|l| *l >= 2).collect();
    if folds.is_empty() {
        folds = vec![2, 3];
    }
    let top = job.cfg.depth.unwrap_or(12).min(64) as u32;
    let v = match (&o.sample_a, &o.sample_b) {
        (Some(pa), Some(pb)) => {
            let a = load_sample(pa)?;
            let b = load_sample(pb)?;
            let mut reports = Vec::new();
            let mut ok = true;
            for &l in &folds {
                let p = prop31_check(&a, &b, l, 0..=top)?;
                let mut addends = vec![a.clone()];
                addends.extend(std::iter::repeat(b.clone()).take(l as usize - 1));
                let cover = (0..=top).map(|j| sumset_cover_bound_check(&addends, j)).collect::<Result<Vec<_>>>()?;
                ok &= p.holds && cover.iter().all(|c| c.holds);
                reports.push(json!({ "fold": l, "sum_window_bound": p, "cover_bound": cover }));
            }
            println!("{} ({} folds, scales 0..={top})", if ok { "PASS" } else { "FAIL" }, folds.len());
            json!({ "passed": ok, "reports": reports })
        }
        (None, None) => {
            let mut r = rng(job.cfg.seed);
            let pairs = 200usize;
            let samples = 50usize;
            let mut ruzsa_fail = Vec::new();
            for i in 0..pairs {
                let l = folds[i % folds.len()];
                let (e, f) = (random_int_set(&mut r, 64), random_int_set(&mut r, 64));
                let rep = ruzsa_check(&e, &f, l)?;
                if !rep.holds {
                    ruzsa_fail.push(json!({ "index": i, "report": rep }));
                }
            }
            let (mut cover_fail, mut prop_fail) = (Vec::new(), Vec::new());
            for i in 0..samples {
                let l = folds[i % folds.len()];
                let s: Vec<PointSample> = (0..l.max(2)).map(|_| random_sample(&mut r, 16, 16)).collect();
                for j in 0..=top {
                    let c = sumset_cover_bound_check(&s[..l as usize], j)?;
                    if !c.holds {
                        cover_fail.push(json!({ "index": i, "report": c }));
                    }
                }
                let p = prop31_check(&s[0], &s[1], l, 0..=top)?;
                if !p.holds {
                    prop_fail.push(json!({ "index": i, "report": p }));
                }
            }
            let ok = ruzsa_fail.is_empty() && cover_fail.is_empty() && prop_fail.is_empty();
            println!(
                "{} seed {}: ruzsa {}/{pairs}, cover bound and sum-window bound {}/{samples} samples",
                if ok { "PASS" } else { "FAIL" },
                job.cfg.seed,
                pairs - ruzsa_fail.len(),
                samples - cover_fail.len().max(prop_fail.len()).min(samples)
            );
            json!({
                "passed": ok,
                "seed": job.cfg.seed,
                "ruzsa": { "instances": pairs, "failures": ruzsa_fail },
                "cover_bound": { "samples": samples, "failures": cover_fail },
                "sum_window_bound": { "samples": samples, "failures": prop_fail },
            })
        }
        _ => return Err(Error::Config("give both --sample-a and --sample-b, or neither".into())),
    };
    let passed = v["passed"].as_bool().unwrap_or(false);
    if job.cfg.out.is_some() {
        job.emit(&pretty(&job.stamp(v)))?;
    }
    if passed {
        Ok(())
    } else {
        Err(Error::Invariant("a Plünnecke instance check failed".into()))
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (opts, f): (&Opts, fn(&Job, &Opts) -> Result<()>) = match &cli.command {
        Command::Construct(o) => (o, |j, _| cmd_construct(j)),
        Command::Count(o) => (o, |j, _| cmd_count(j)),
        Command::Dims(o) => (o, |j, _| cmd_dims(j)),
        Command::Off(o) => (o, |j, _| cmd_off(j)),
        Command::Plunnecke(o) => (o, cmd_plunnecke),
        Command::Validate(o) => (o, |j, _| cmd_validate(j)),
        Command::Oracle(o) => (o, |j, _| cmd_oracle(j)),
    };
    match Job::load(opts).and_then(|job| f(&job, opts)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
