use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use dc1lab::construct::{build_dc1_tuple, tuple_from_stable_targets, BlockSchedule, GrowthRule};
use dc1lab::furstenberg::{
    difference_set, duality_check, family_test, hitting_witnesses, lemma12_inclusion_check, lemma13_inclusion_check,
    recurrence_test, return_times, transitivity_report, Family, IndexSet, TransitivityMode,
};
use dc1lab::orbitstats::{
    dc1_tuple_statistics, default_eps_grid, omega_limit_estimate, CheckpointSchedule, StatsOptions, TupleVerdict,
};
use dc1lab::stable::{stable_cover_report, stable_membership};
use dc1lab::{BigPoint, BigSystem, SymbolicSequence};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::parse::{self, TupleInput};

type Res<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "dc1lab", version, about = "Exact finite-horizon checks for distributional chaos, return-time families and stable sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Serialize)]
pub struct Common {
    /// Seed for randomized sampling; recorded in the report.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report path; stdout when absent.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Density profiles of the separation and proximality sets of a tuple.
    AnalyzeTuple(AnalyzeTuple),
    /// Build an explicit scrambled tuple on a full shift.
    ConstructTuple(ConstructTuple),
    /// Return-time set of a point.
    ReturnTimes(ReturnTimes),
    /// Hitting-time set of two open sets.
    HittingTimes(HittingTimes),
    /// Family membership of an index set, or of return-time sets.
    FamilyTest(FamilyTest),
    /// Return-time inclusion in a minimal equicontinuous system.
    Lemma12(Lemma12),
    /// Difference-set and hitting-time inclusions for a product with a rotation or odometer.
    Lemma13(Lemma13),
    /// First hitting indices over pairs of basis cells.
    Transitivity(Transitivity),
    /// Basis cells reached by stable sets of sample points.
    StableCover(StableCover),
    /// Cells visited by a late orbit segment.
    Omega(Omega),
    /// Run the acceptance suite.
    Accept(Accept),
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::AnalyzeTuple(a) => &a.common,
            Command::ConstructTuple(a) => &a.common,
            Command::ReturnTimes(a) => &a.common,
            Command::HittingTimes(a) => &a.common,
            Command::FamilyTest(a) => &a.common,
            Command::Lemma12(a) => &a.common,
            Command::Lemma13(a) => &a.common,
            Command::Transitivity(a) => &a.common,
            Command::StableCover(a) => &a.common,
            Command::Omega(a) => &a.common,
            Command::Accept(a) => &a.common,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::AnalyzeTuple(_) => "analyze-tuple",
            Command::ConstructTuple(_) => "construct-tuple",
            Command::ReturnTimes(_) => "return-times",
            Command::HittingTimes(_) => "hitting-times",
            Command::FamilyTest(_) => "family-test",
            Command::Lemma12(_) => "lemma12",
            Command::Lemma13(_) => "lemma13",
            Command::Transitivity(_) => "transitivity",
            Command::StableCover(_) => "stable-cover",
            Command::Omega(_) => "omega",
            Command::Accept(_) => "accept",
        }
    }

    /// The command's arguments, minus output paths.
    pub fn config(&self) -> Value {
        let v = match self {
            Command::AnalyzeTuple(a) => serde_json::to_value(a),
            Command::ConstructTuple(a) => serde_json::to_value(a),
            Command::ReturnTimes(a) => serde_json::to_value(a),
            Command::HittingTimes(a) => serde_json::to_value(a),
            Command::FamilyTest(a) => serde_json::to_value(a),
            Command::Lemma12(a) => serde_json::to_value(a),
            Command::Lemma13(a) => serde_json::to_value(a),
            Command::Transitivity(a) => serde_json::to_value(a),
            Command::StableCover(a) => serde_json::to_value(a),
            Command::Omega(a) => serde_json::to_value(a),
            Command::Accept(a) => serde_json::to_value(a),
        };
        v.expect("arguments serialize")
    }

    /// Runs the command.
    pub fn run(&self) -> Res<Outcome> {
        let (notion, result) = match self {
            Command::AnalyzeTuple(a) => a.run(),
            Command::ConstructTuple(a) => a.run(),
            Command::ReturnTimes(a) => a.run(),
            Command::HittingTimes(a) => a.run(),
            Command::FamilyTest(a) => a.run(),
            Command::Lemma12(a) => a.run(),
            Command::Lemma13(a) => a.run(),
            Command::Transitivity(a) => a.run(),
            Command::StableCover(a) => a.run(),
            Command::Omega(a) => a.run(),
            Command::Accept(a) => {
                let (report, timings) = crate::accept::run_suite_timed(a.common.seed)?;
                let seconds: serde_json::Map<String, Value> =
                    timings.into_iter().map(|(id, s)| (format!("criterion_{id}_seconds"), json!(s))).collect();
                return Ok(Outcome { notion: "acceptance suite", result: to_value(&report), metadata: Value::Object(seconds) });
            }
        }?;
        Ok(Outcome { notion, result, metadata: Value::Null })
    }
}

/// A finished command: its result and any wall-clock data for the
/// report's metadata block.
pub struct Outcome {
    pub notion: &'static str,
    pub result: Value,
    pub metadata: Value,
}

fn to_value<S: Serialize>(s: &S) -> Value {
    serde_json::to_value(s).expect("result serializes")
}

#[derive(Args, Debug, Serialize)]
pub struct AnalyzeTuple {
    /// Tuple file from `construct-tuple`, or a JSON list of points.
    #[arg(long)]
    pub tuple: PathBuf,
    /// Defaults to the full shift the constructed tuple lives in.
    #[arg(long)]
    pub system: Option<String>,
    #[arg(long, default_value = "1/2")]
    pub delta: String,
    /// Comma-separated, strictly decreasing; default `2^-3,2^-5,2^-8`.
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long, default_value_t = 1000)]
    pub mmin: u64,
    #[arg(long, default_value_t = 100_000)]
    pub mmax: u64,
    /// Checkpoint growth factor.
    #[arg(long, default_value = "11/10")]
    pub growth: String,
    #[arg(long, default_value = "1/100")]
    pub tol: String,
    /// Pair-step budget.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Also write the density profiles as CSV.
    #[arg(long)]
    #[serde(skip)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

impl AnalyzeTuple {
    pub fn verdict(&self) -> Res<TupleVerdict> {
        let (spec, points): (BigSystem, Vec<BigPoint>) = match parse::load_tuple(&self.tuple)? {
            TupleInput::Constructed(t) => {
                let spec = match &self.system {
                    Some(s) => parse::system(s)?,
                    None => t.system(),
                };
                (spec, t.points()?)
            }
            TupleInput::Points(p) => {
                let s = self.system.as_deref().ok_or_else(|| CliError::Usage("a point list needs --system".into()))?;
                (parse::system(s)?, p)
            }
        };
        let delta = parse::distance(&self.delta)?;
        let eps = match &self.eps {
            Some(e) => parse::distance_list(e)?,
            None => default_eps_grid(),
        };
        let schedule = CheckpointSchedule::geometric(self.mmin, self.mmax, parse::ratio_u64(&self.growth)?)?;
        let mut options = StatsOptions { tol: parse::ratio_u64(&self.tol)?, ..Default::default() };
        if let Some(b) = self.budget {
            options.budget = b;
        }
        Ok(dc1_tuple_statistics(&spec, &points, &delta, &eps, &schedule, &options)?)
    }

    fn run(&self) -> Res<(&'static str, Value)> {
        let v = self.verdict()?;
        if let Some(path) = &self.csv {
            crate::report::write_atomic(path, &profiles_csv(&v))?;
        }
        Ok(("scrambled tuple: upper densities of the separation set A_delta and proximality sets B_eps", to_value(&v)))
    }
}

/// One CSV with a `set` column: `A` for the separation set, `B:eps` for each
/// proximality set.
pub fn profiles_csv(v: &TupleVerdict) -> String {
    let mut out = String::from("set,m,count,d_m\n");
    let mut add = |name: String, csv: String| {
        for line in csv.lines().skip(1) {
            out.push_str(&format!("{name},{line}\n"));
        }
    };
    add("A".into(), v.a_profile.to_csv());
    for b in &v.b_profiles {
        add(format!("B:{}", b.eps), b.profile.to_csv());
    }
    out
}

#[derive(Args, Debug, Serialize)]
pub struct ConstructTuple {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Alphabet size; defaults to `n`.
    #[arg(long)]
    pub alphabet: Option<u32>,
    /// `geometric:B` or `linear`.
    #[arg(long, default_value = "geometric:16")]
    pub schedule: String,
    /// Eventually periodic anchors `A1;A2;...`, replacing the constant ones.
    #[arg(long)]
    pub anchors: Option<String>,
    /// Proximal target used with `--anchors`.
    #[arg(long, default_value = "(0)")]
    pub target: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

impl ConstructTuple {
    fn schedule(&self) -> Res<BlockSchedule> {
        let rule = match self.schedule.trim() {
            "linear" => GrowthRule::Linear,
            s => match s.strip_prefix("geometric:").and_then(|b| b.parse::<u32>().ok()) {
                Some(base) if base >= 1 => GrowthRule::Geometric { base },
                _ => return Err(CliError::Usage(format!("schedule {s:?}: expected linear or geometric:B"))),
            },
        };
        Ok(BlockSchedule::new(rule))
    }

    fn run(&self) -> Res<(&'static str, Value)> {
        let schedule = self.schedule()?;
        let preview = |seqs: Vec<SymbolicSequence>| -> Vec<String> {
            let sep = if seqs.iter().any(|s| s.alphabet() > 10) { "," } else { "" };
            seqs.iter().map(|s| s.word(0, 64).iter().map(|d| d.to_string()).collect::<Vec<_>>().join(sep)).collect()
        };
        let result = match &self.anchors {
            None => {
                let t = build_dc1_tuple(self.n, schedule, Some(self.alphabet.unwrap_or(self.n as u32)))?;
                let system: BigSystem = t.system();
                json!({ "tuple": t, "system": system, "prefix_64": preview(t.sequences()?) })
            }
            Some(list) => {
                let alphabet = self.alphabet.unwrap_or(2);
                let anchors = list.split(';').map(|a| SymbolicSequence::parse(alphabet, a)).collect::<Result<Vec<_>, _>>()?;
                let target = SymbolicSequence::parse(alphabet, &self.target)?;
                let tracked = tuple_from_stable_targets(&anchors, &target, schedule)?;
                let system: BigSystem = tracked.spec.system();
                json!({
                    "tuple": tracked.spec,
                    "system": system,
                    "separation": tracked.separation,
                    "deltas": tracked.deltas,
                    "prefix_64": preview(tracked.spec.sequences()?),
                })
            }
        };
        Ok(("explicit scrambled tuple on a full shift from alternating proximal and distal blocks", result))
    }
}

#[derive(Args, Debug, Serialize)]
pub struct ReturnTimes {
    #[arg(long)]
    pub system: String,
    #[arg(long)]
    pub point: String,
    #[arg(long)]
    pub eps: String,
    #[arg(long, default_value_t = 10_000)]
    pub horizon: u64,
    /// Also test the set against a family.
    #[arg(long)]
    pub family: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

fn set_summary(set: &IndexSet, family: Option<&str>) -> Res<Value> {
    let (gap_start, max_gap) = set.max_gap_at();
    let (run_start, max_run) = set.max_run_at();
    let verdict = match family {
        Some(f) => Some(family_test(set, f.parse::<Family>().map_err(CliError::Usage)?)),
        None => None,
    };
    Ok(json!({
        "size": set.len(),
        "max_gap": { "start": gap_start, "length": max_gap },
        "max_run": { "start": run_start, "length": max_run },
        "set": set,
        "family_verdict": verdict,
    }))
}

impl ReturnTimes {
    fn run(&self) -> Res<(&'static str, Value)> {
        let spec = parse::system(&self.system)?;
        let x = parse::point(&spec, &self.point)?;
        let set = return_times(&spec, &x, &parse::distance(&self.eps)?, self.horizon)?;
        Ok(("return-time set N(x, eps) = {i : d(f^i x, x) < eps}", set_summary(&set, self.family.as_deref())?))
    }
}

#[derive(Args, Debug, Serialize)]
pub struct HittingTimes {
    #[arg(long)]
    pub system: String,
    #[arg(long = "U")]
    pub u: String,
    #[arg(long = "V")]
    pub v: String,
    #[arg(long, default_value_t = 1000)]
    pub horizon: u64,
    /// Witness points kept.
    #[arg(long, default_value_t = 5)]
    pub witnesses: usize,
    #[arg(long)]
    pub family: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

impl HittingTimes {
    fn run(&self) -> Res<(&'static str, Value)> {
        let spec = parse::system(&self.system)?;
        let (u, v) = (parse::open_set(&self.u)?, parse::open_set(&self.v)?);
        let (set, witnesses) = hitting_witnesses(&spec, &u, &v, self.horizon, self.witnesses)?;
        let mut r = set_summary(&set, self.family.as_deref())?;
        r["witnesses"] = to_value(&witnesses);
        Ok(("hitting-time set N(U, V) = {i : f^i(U) meets V}", r))
    }
}

#[derive(Args, Debug, Serialize)]
pub struct FamilyTest {
    /// Index set file: `{"horizon", "members"}` or a member list.
    #[arg(long)]
    pub set: Option<PathBuf>,
    /// `Frr`, `Fs`, `Ft`, optionally with a parameter, e.g. `Fs:5`.
    #[arg(long, default_value = "Fs")]
    pub family: String,
    /// Window for a bare member list, or for return-time sets.
    #[arg(long)]
    pub horizon: Option<u64>,
    /// Test return-time sets of `--point` in this system instead of a file.
    #[arg(long)]
    pub system: Option<String>,
    #[arg(long)]
    pub point: Option<String>,
    /// Comma-separated decreasing radii for return-time sets.
    #[arg(long)]
    pub eps: Option<String>,
    /// Also run the seeded syndetic/thick duality check.
    #[arg(long)]
    pub duality: bool,
    /// Also report the difference set.
    #[arg(long)]
    pub difference: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

impl FamilyTest {
    fn run(&self) -> Res<(&'static str, Value)> {
        let family: Family = self.family.parse().map_err(CliError::Usage)?;
        match (&self.set, &self.system) {
            (Some(path), None) => {
                let set = parse::load_index_set(path, self.horizon)?;
                let verdict = family_test(&set, family);
                let mut r = json!({
                    "horizon": set.horizon(),
                    "size": set.len(),
                    "max_gap": set.max_gap(),
                    "max_run": set.max_run(),
                    "verdict": verdict,
                });
                if self.duality {
                    r["duality"] = to_value(&duality_check(&set, self.common.seed));
                }
                if self.difference {
                    r["difference_set"] = to_value(&difference_set(&set)?);
                }
                Ok(("Furstenberg family membership of an index set on a finite window", r))
            }
            (None, Some(sys)) => {
                let spec = parse::system(sys)?;
                let p = self.point.as_deref().ok_or_else(|| CliError::Usage("--system needs --point".into()))?;
                let x = parse::point(&spec, p)?;
                let eps = parse::distance_list(self.eps.as_deref().unwrap_or("1/10"))?;
                let r = recurrence_test(&spec, &[x], family, &eps, self.horizon.unwrap_or(10_000))?;
                Ok(("Furstenberg family membership of return-time sets N(x, eps)", to_value(&r)))
            }
            _ => Err(CliError::Usage("give exactly one of --set or --system".into())),
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct Lemma12 {
    #[arg(long, default_value = "rotation-golden")]
    pub system: String,
    #[arg(long)]
    pub p: String,
    #[arg(long)]
    pub q: String,
    #[arg(long)]
    pub eps: String,
    #[arg(long, default_value_t = 10_000)]
    pub horizon: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

impl Lemma12 {
    fn run(&self) -> Res<(&'static str, Value)> {
        let spec = parse::system(&self.system)?;
        let (p, q) = (parse::point(&spec, &self.p)?, parse::point(&spec, &self.q)?);
        let r = lemma12_inclusion_check(&spec, &p, &q, &parse::distance(&self.eps)?, self.horizon)?;
        Ok(("minimal equicontinuous systems: N(f^i p, eps/3) inside N(q, eps) once f^i p is delta-close to q", to_value(&r)))
    }
}

#[derive(Args, Debug, Serialize)]
pub struct Lemma13 {
    /// The rotation or odometer `g`.
    #[arg(long)]
    pub g: String,
    #[arg(long)]
    pub y: String,
    #[arg(long)]
    pub delta: String,
    /// The system `f` carrying `U` and `V`.
    #[arg(long)]
    pub f: String,
    #[arg(long = "U")]
    pub u: String,
    #[arg(long = "V")]
    pub v: String,
    #[arg(long)]
    pub j: u64,
    #[arg(long, default_value_t = 10_000)]
    pub horizon: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

impl Lemma13 {
    fn run(&self) -> Res<(&'static str, Value)> {
        let g = parse::system(&self.g)?;
        let y = parse::point(&g, &self.y)?;
        let f = parse::system(&self.f)?;
        let (u, v) = (parse::open_set(&self.u)?, parse::open_set(&self.v)?);
        let r = lemma13_inclusion_check(&g, &y, &parse::distance(&self.delta)?, &f, &u, &v, self.j, self.horizon)?;
        Ok(("difference sets of return times inside ball-hitting sets, and shifted hitting times, for a product with an equicontinuous factor", to_value(&r)))
    }
}

#[derive(Args, Debug, Serialize)]
pub struct Transitivity {
    #[arg(long)]
    pub system: String,
    #[arg(long, default_value_t = 3)]
    pub resolution: u32,
    #[arg(long, default_value_t = 100)]
    pub horizon: u64,
    /// `plain`, `total:K`, `weak-mixing` or `product-with` (needs `--lambda`).
    #[arg(long, default_value = "plain")]
    pub mode: String,
    #[arg(long)]
    pub lambda: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

impl Transitivity {
    fn run(&self) -> Res<(&'static str, Value)> {
        let spec = parse::system(&self.system)?;
        let mode = match self.mode.trim() {
            "plain" => TransitivityMode::Plain,
            "weak-mixing" => TransitivityMode::WeakMixing,
            "product-with" => {
                let l = self.lambda.as_deref().ok_or_else(|| CliError::Usage("product-with needs --lambda".into()))?;
                TransitivityMode::ProductWith { lambda: parse::system(l)? }
            }
            m => match m.strip_prefix("total:").and_then(|k| k.parse::<u64>().ok()) {
                Some(k_max) => TransitivityMode::Total { k_max },
                None => return Err(CliError::Usage(format!("unknown mode {m:?}"))),
            },
        };
        let r = transitivity_report(&spec, self.resolution, self.horizon, mode)?;
        Ok(("topological transitivity: hitting times between basis cells", to_value(&r)))
    }
}

#[derive(Args, Debug, Serialize)]
pub struct StableCover {
    #[arg(long)]
    pub system: String,
    /// Sample points of the set Λ, separated by `;`.
    #[arg(long)]
    pub sample: String,
    #[arg(long)]
    pub eps: String,
    #[arg(long, default_value_t = 4)]
    pub resolution: u32,
    #[arg(long, default_value_t = 10)]
    pub tail_start: u64,
    #[arg(long, default_value_t = 20)]
    pub horizon: u64,
    /// Test a single point against the first sample point instead.
    #[arg(long)]
    pub y: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

impl StableCover {
    fn run(&self) -> Res<(&'static str, Value)> {
        let spec = parse::system(&self.system)?;
        let sample = self.sample.split(';').map(|p| parse::point(&spec, p)).collect::<Res<Vec<_>>>()?;
        let eps = parse::distance(&self.eps)?;
        if let Some(y) = &self.y {
            let y = parse::point(&spec, y)?;
            let r = stable_membership(&spec, &sample[0], &y, &eps, self.tail_start, self.horizon)?;
            return Ok(("eps-stable set: limsup of orbit distances at most eps", to_value(&r)));
        }
        let r = stable_cover_report(&spec, &sample, &eps, self.resolution, self.tail_start, self.horizon)?;
        Ok(("eps-stable sets of points of a set Λ meeting every basis cell", to_value(&r)))
    }
}

#[derive(Args, Debug, Serialize)]
pub struct Omega {
    #[arg(long)]
    pub system: String,
    #[arg(long)]
    pub point: String,
    #[arg(long, default_value_t = 10_000)]
    pub horizon: u64,
    /// Defaults to half the horizon.
    #[arg(long)]
    pub burn_in: Option<u64>,
    #[arg(long, default_value_t = 3)]
    pub resolution: u32,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

impl Omega {
    fn run(&self) -> Res<(&'static str, Value)> {
        let spec = parse::system(&self.system)?;
        let x = parse::point(&spec, &self.point)?;
        let r = omega_limit_estimate(&spec, &x, self.horizon, self.burn_in.unwrap_or(self.horizon / 2), self.resolution)?;
        Ok(("omega-limit set estimated by basis cells visited late in the orbit", to_value(&r)))
    }
}

#[derive(Args, Debug, Serialize)]
pub struct Accept {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}
