//! Batch front-end: a JSON config document selects a command, a model or
//! family and the experiment settings; results go to CSV files plus a
//! `manifest.json` in the output directory.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::canonical::CanonicalForest;
use crate::error::{EnumerationError, ExperimentError, GwError, SboError, SpecError, StatsError};
use crate::experiments::{dichotomy_experiment, fixation_experiment, rank_recovery_by_extinction, Fixation, DEFAULT_ALPHA, DEFAULT_REPS};
use crate::genealogy::GenerationPartition;
use crate::gw::{exact_lookdown_spine_law, exact_spinal_law, sample_spinal, spine_diagnostics, OffspringDistribution};
use crate::model::{BirthRule, FamilySpec, FamilyKind, Horizon, ModelSpec};
use crate::rng::{par_replicates, SeedSpec};
use crate::samplers::{default_budget, exact_unlabelled_distribution, SamplerKind};
use crate::sbo::{exact_algorithm_size_law, exact_sbo_size_law, size_biased_order_discovery, size_biased_order_scramble};
use crate::stats::{coalescent_scale, descendant_table, DEFAULT_Z};
use crate::coupling::lookdown_coupling;
use crate::testing::{exact_equality, Decision, TestReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Sample,
    VerifyNeutrality,
    SboCheck,
    Coalescent,
    IdentifyBase,
    RankRecovery,
    Fixation,
    GwSpine,
}

impl Command {
    const NAMES: [(&'static str, Command); 8] = [
        ("sample", Command::Sample),
        ("verify-neutrality", Command::VerifyNeutrality),
        ("sbo-check", Command::SboCheck),
        ("coalescent", Command::Coalescent),
        ("identify-base", Command::IdentifyBase),
        ("rank-recovery", Command::RankRecovery),
        ("fixation", Command::Fixation),
        ("gw-spine", Command::GwSpine),
    ];

    fn parse(s: &str) -> Option<Self> {
        Self::NAMES.iter().find(|(n, _)| *n == s).map(|(_, c)| *c)
    }
}

/// Births of an asynchronous family as written in the config.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum BirthConfig {
    Constant(usize),
    Sequence(Vec<usize>),
    Rule(String),
}

/// The family block of a config, kept in its serialisable form.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FamilyConfig {
    Moran {
        #[serde(rename = "N")]
        n: usize,
    },
    Asynchronous {
        x0: usize,
        b: BirthConfig,
    },
    Synchronous {
        x0: usize,
        litter: usize,
    },
    Gw {
        pmf: Vec<String>,
    },
    Explicit {
        #[serde(rename = "X")]
        sizes: Vec<usize>,
        litters: Vec<Vec<usize>>,
        horizon: Horizon,
    },
}

/// A validated run configuration with every default filled in.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub family: FamilyConfig,
    pub cap: usize,
    pub seed: u64,
    pub reps: usize,
    /// Horizon `M` of finite-horizon estimates.
    pub horizon: usize,
    /// Source generation of per-generation experiments.
    pub n: usize,
    /// Generations of the identification grid.
    pub grid: Vec<usize>,
    pub alpha: f64,
    pub z: f64,
    pub sampler: SamplerKind,
    pub budget: u64,
    pub out: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid config field `{field}`: {message}")]
    Validation { field: String, message: String },
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Validation {
        field: field.to_string(),
        message: message.into(),
    }
}

fn uint(obj: &Map<String, Value>, field: &str) -> Result<Option<u64>, ConfigError> {
    match obj.get(field) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v.as_u64().map(Some).ok_or_else(|| invalid(field, "expected a non-negative integer")),
    }
}

fn required_usize(obj: &Map<String, Value>, field: &str) -> Result<usize, ConfigError> {
    uint(obj, field)?.map(|v| v as usize).ok_or_else(|| invalid(field, "missing"))
}

fn usize_list(v: &Value, field: &str) -> Result<Vec<usize>, ConfigError> {
    v.as_array()
        .ok_or_else(|| invalid(field, "expected an array of integers"))?
        .iter()
        .map(|x| x.as_u64().map(|x| x as usize).ok_or_else(|| invalid(field, "expected an array of integers")))
        .collect()
}

fn float(obj: &Map<String, Value>, field: &str) -> Result<Option<f64>, ConfigError> {
    match obj.get(field) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v.as_f64().map(Some).ok_or_else(|| invalid(field, "expected a number")),
    }
}

fn parse_family(root: &Map<String, Value>) -> Result<FamilyConfig, ConfigError> {
    // The family is either an object carrying its own parameters or a kind
    // name whose parameters sit at the top level.
    let (kind, params): (String, &Map<String, Value>) = match root.get("family") {
        Some(Value::Object(o)) => (
            o.get("kind")
                .and_then(Value::as_str)
                .ok_or_else(|| invalid("family.kind", "missing"))?
                .to_string(),
            o,
        ),
        Some(Value::String(s)) => (s.clone(), root),
        Some(_) => return Err(invalid("family", "expected a string or an object")),
        None if root.contains_key("X") => ("explicit".to_string(), root),
        None => return Err(invalid("family", "missing")),
    };
    let field = |name: &str| format!("family.{name}");
    let req = |name: &str| required_usize(params, name).map_err(|_| invalid(&field(name), "expected a non-negative integer"));
    match kind.as_str() {
        "moran" => Ok(FamilyConfig::Moran { n: req("N")? }),
        "synchronous" => Ok(FamilyConfig::Synchronous {
            x0: req("x0")?,
            litter: req("litter")?,
        }),
        "asynchronous" => {
            let b = match params.get("b") {
                Some(Value::Number(x)) => BirthConfig::Constant(x.as_u64().ok_or_else(|| invalid(&field("b"), "expected a non-negative integer"))? as usize),
                Some(v @ Value::Array(_)) => BirthConfig::Sequence(usize_list(v, &field("b"))?),
                Some(Value::String(s)) if s == "doubling" => BirthConfig::Rule(s.clone()),
                _ => return Err(invalid(&field("b"), "expected an integer, an array or \"doubling\"")),
            };
            Ok(FamilyConfig::Asynchronous {
                x0: uint(params, "x0").map_err(|_| invalid(&field("x0"), "expected a non-negative integer"))?.unwrap_or(1) as usize,
                b,
            })
        }
        "gw" | "galton-watson" => {
            let pmf = params
                .get("pmf")
                .and_then(Value::as_array)
                .ok_or_else(|| invalid(&field("pmf"), "expected an array"))?
                .iter()
                .map(|p| match p {
                    Value::String(s) => Ok(s.clone()),
                    Value::Number(n) => Ok(n.to_string()),
                    _ => Err(invalid(&field("pmf"), "entries must be numbers or rational strings")),
                })
                .collect::<Result<Vec<_>, _>>()?;
            OffspringDistribution::from_strs(&pmf).map_err(|e| invalid(&field("pmf"), e.to_string()))?;
            Ok(FamilyConfig::Gw { pmf })
        }
        "explicit" => {
            let sizes = usize_list(params.get("X").ok_or_else(|| invalid(&field("X"), "missing"))?, &field("X"))?;
            let litters = params
                .get("litters")
                .and_then(Value::as_array)
                .ok_or_else(|| invalid(&field("litters"), "expected an array of arrays"))?
                .iter()
                .map(|k| usize_list(k, &field("litters")))
                .collect::<Result<Vec<_>, _>>()?;
            let horizon = match params.get("horizon").and_then(Value::as_str) {
                None | Some("finite") => Horizon::Finite,
                Some("capped") => Horizon::Capped,
                Some(_) => return Err(invalid(&field("horizon"), "expected \"finite\" or \"capped\"")),
            };
            Ok(FamilyConfig::Explicit { sizes, litters, horizon })
        }
        other => Err(invalid("family.kind", format!("unknown family `{other}`"))),
    }
}

impl FamilyConfig {
    pub fn to_family(&self, cap: usize) -> Result<FamilySpec, SpecError> {
        Ok(match self {
            FamilyConfig::Moran { n } => FamilySpec::moran(*n, cap),
            FamilyConfig::Synchronous { x0, litter } => FamilySpec::synchronous(*x0, *litter, cap),
            FamilyConfig::Asynchronous { x0, b } => {
                let rule = match b {
                    BirthConfig::Constant(b) => BirthRule::Constant(*b),
                    BirthConfig::Sequence(bs) => BirthRule::Sequence(bs.clone()),
                    BirthConfig::Rule(_) => BirthRule::Doubling,
                };
                FamilySpec::asynchronous(*x0, rule, cap)
            }
            FamilyConfig::Gw { pmf } => FamilySpec::galton_watson(
                OffspringDistribution::from_strs(pmf).map_err(|_| SpecError::InvalidParameter("pmf"))?,
                cap,
            ),
            FamilyConfig::Explicit { sizes, litters, horizon } => FamilySpec {
                kind: FamilyKind::Explicit {
                    horizon: *horizon,
                    sizes: sizes.clone(),
                    litters: litters.clone(),
                },
                cap: sizes.len().max(1),
            },
        })
    }
}

/// Parses and validates a config document, filling defaults.
pub fn parse_config(document: &str) -> Result<RunConfig, ConfigError> {
    let value: Value = serde_json::from_str(document).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let root = value.as_object().ok_or_else(|| invalid("$", "expected a JSON object"))?;
    let command = root
        .get("command")
        .ok_or_else(|| invalid("command", "missing"))?
        .as_str()
        .and_then(Command::parse)
        .ok_or_else(|| invalid("command", "unknown command"))?;
    let family = parse_family(root)?;
    let default_cap = match &family {
        FamilyConfig::Explicit { sizes, .. } => sizes.len(),
        _ => 100,
    };
    let cap = uint(root, "cap")?.map_or(default_cap, |c| c as usize);
    if cap == 0 {
        return Err(invalid("cap", "must be positive"));
    }
    // A string `horizon` at the top level is the explicit family's horizon
    // type; a number is the estimation horizon.
    let horizon = match root.get("horizon") {
        Some(Value::String(_)) => cap.saturating_sub(1),
        _ => uint(root, "horizon")?.map_or(cap.saturating_sub(1), |h| h as usize),
    };
    let grid = match root.get("grid") {
        Some(v) => usize_list(v, "grid")?,
        None => (0..=horizon.min(10)).collect(),
    };
    let alpha = float(root, "alpha")?.unwrap_or(DEFAULT_ALPHA);
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha", "must lie in (0, 1)"));
    }
    let z = float(root, "z")?.unwrap_or(DEFAULT_Z);
    let sampler = match root.get("sampler").and_then(Value::as_str) {
        None => SamplerKind::Lookdown,
        Some(s) => SamplerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| invalid("sampler", "expected forward, lookdown or completely-neutral"))?,
    };
    let out = match root.get("out") {
        None => PathBuf::from("out"),
        Some(Value::String(s)) => PathBuf::from(s),
        Some(_) => return Err(invalid("out", "expected a path string")),
    };
    let config = RunConfig {
        command,
        family,
        cap,
        seed: uint(root, "seed")?.unwrap_or(0),
        reps: uint(root, "reps")?.map_or(DEFAULT_REPS, |r| r as usize),
        horizon,
        n: uint(root, "n")?.unwrap_or(0) as usize,
        grid,
        alpha,
        z,
        sampler,
        budget: uint(root, "budget")?.unwrap_or_else(default_budget),
        out,
    };
    config
        .family
        .to_family(config.cap)
        .and_then(|f| if f.is_random() { Ok(()) } else { f.expand().map(|_| ()) })
        .map_err(|e| invalid("family", e.to_string()))?;
    Ok(config)
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
    #[error(transparent)]
    Sbo(#[from] SboError),
    #[error(transparent)]
    Gw(#[from] GwError),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// Exit status of a completed run: 0 when every test accepted, 1 when some
/// test rejected.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub status: i32,
    pub results: Value,
}

fn spec_for(config: &RunConfig) -> Result<ModelSpec, RunError> {
    let family = config.family.to_family(config.cap)?;
    Ok(family.realize(SeedSpec::new(config.seed))?)
}

fn csv_writer(dir: &Path, name: &str) -> Result<csv::Writer<fs::File>, RunError> {
    Ok(csv::Writer::from_path(dir.join(name))?)
}

fn status_of(reports: &[&TestReport]) -> i32 {
    i32::from(reports.iter().any(|r| r.decision == Decision::Reject))
}

/// Runs a command, writing its CSV outputs and `manifest.json` into
/// `config.out`.
pub fn run(config: &RunConfig) -> Result<RunOutcome, RunError> {
    fs::create_dir_all(&config.out)?;
    let seed = SeedSpec::new(config.seed);
    let dir = config.out.as_path();
    let (status, results) = match config.command {
        Command::Sample => {
            let spec = spec_for(config)?;
            let g = config.sampler.sample(&spec, seed);
            fs::write(dir.join("genealogy.txt"), g.to_text())?;
            let table = descendant_table(&g, config.n.min(g.tau() - 1), g.tau() - 1)?;
            table.write_csv(fs::File::create(dir.join("descendants.csv"))?)?;
            (0, json!({"generations": g.tau(), "sampler": config.sampler.name()}))
        }
        Command::VerifyNeutrality => {
            let spec = spec_for(config)?;
            let laws: Vec<_> = SamplerKind::ALL
                .iter()
                .map(|k| exact_unlabelled_distribution(&spec, *k, config.budget))
                .collect::<Result<_, _>>()?;
            let a = exact_equality("forward-vs-lookdown", &laws[0], &laws[1]);
            let b = exact_equality("lookdown-vs-completely-neutral", &laws[1], &laws[2]);
            let mut w = csv_writer(dir, "neutrality.csv")?;
            w.write_record(["class", "forward", "lookdown", "completely_neutral"])?;
            let keys: std::collections::BTreeSet<&CanonicalForest> = laws.iter().flat_map(|l| l.keys()).collect();
            for k in keys {
                let p = |l: &crate::rng::Law<CanonicalForest>| l.get(k).map_or_else(|| "0".to_string(), ToString::to_string);
                w.write_record([k.to_string(), p(&laws[0]), p(&laws[1]), p(&laws[2])])?;
            }
            w.flush()?;
            (status_of(&[&a, &b]), json!({"exact_equal": a.passed() && b.passed(), "tests": [a, b]}))
        }
        Command::SboCheck => {
            let spec = spec_for(config)?;
            let n = config.n.min(spec.tau().saturating_sub(2));
            if spec.tau() < 2 {
                return Err(RunError::Usage("sbo-check needs at least two generations".into()));
            }
            let sizes: Vec<usize> = spec.litters(n).iter().copied().filter(|&k| k > 0).collect();
            let oracle = exact_sbo_size_law(&sizes)?;
            let p = GenerationPartition::contiguous(&sizes);
            let discovery = exact_algorithm_size_law(&p, config.budget, size_biased_order_discovery)?;
            let scramble = exact_algorithm_size_law(&p, config.budget, size_biased_order_scramble)?;
            let a = exact_equality("discovery-vs-product-formula", &discovery, &oracle);
            let b = exact_equality("scramble-vs-product-formula", &scramble, &oracle);
            let mut w = csv_writer(dir, "sbo.csv")?;
            w.write_record(["order", "exact", "discovery", "scramble"])?;
            for (order, q) in &oracle {
                let key = order.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
                let get = |l: &crate::rng::Law<Vec<usize>>| l.get(order).map_or_else(|| "0".to_string(), ToString::to_string);
                w.write_record([key, q.to_string(), get(&discovery), get(&scramble)])?;
            }
            w.flush()?;
            (status_of(&[&a, &b]), json!({"generation": n, "sizes": sizes, "tests": [a, b]}))
        }
        Command::Coalescent => {
            let spec = spec_for(config)?;
            let scale = coalescent_scale(&spec);
            scale.write_csv(fs::File::create(dir.join("scale.csv"))?)?;
            let last = scale.t.last().unwrap();
            (0, json!({"generations": spec.tau(), "t_last": last.to_string()}))
        }
        Command::IdentifyBase => {
            let family = config.family.to_family(config.cap)?;
            let rows = dichotomy_experiment(&family, &config.grid, config.horizon, config.reps, seed)?;
            let mut w = csv_writer(dir, "identify_base.csv")?;
            w.write_record(["n", "t_n", "rho_hat", "se"])?;
            for r in &rows {
                w.write_record([r.n.to_string(), format!("{:?}", r.t_n), format!("{:?}", r.rho.estimate), format!("{:?}", r.rho.se)])?;
            }
            w.flush()?;
            (0, json!({"rows": rows.len(), "horizon": config.horizon}))
        }
        Command::RankRecovery => {
            let spec = spec_for(config)?;
            let runs = par_replicates(seed, config.reps, |s| rank_recovery_by_extinction(&lookdown_coupling(&spec, s)));
            let mut w = csv_writer(dir, "rank_recovery.csv")?;
            w.write_record(["replicate", "resolvable", "correct", "accuracy", "monotone"])?;
            for (i, r) in runs.iter().enumerate() {
                w.write_record([
                    i.to_string(),
                    r.resolvable().to_string(),
                    r.correct().to_string(),
                    format!("{:?}", r.accuracy()),
                    r.monotone.to_string(),
                ])?;
            }
            w.flush()?;
            let ok = runs.iter().all(|r| r.monotone && r.correct() == r.resolvable());
            let resolvable: usize = runs.iter().map(|r| r.resolvable()).sum();
            let correct: usize = runs.iter().map(|r| r.correct()).sum();
            (i32::from(!ok), json!({"resolvable": resolvable, "correct": correct, "all_monotone": runs.iter().all(|r| r.monotone)}))
        }
        Command::Fixation => {
            let spec = spec_for(config)?;
            if config.n >= spec.tau() {
                return Err(RunError::Usage(format!("generation {} is beyond the cap", config.n)));
            }
            let f = fixation_experiment(&spec, config.n, config.reps, seed);
            let mut w = csv_writer(dir, "fixation.csv")?;
            w.write_record(["replicate", "fixed", "generation", "survivor"])?;
            for (i, r) in f.runs.iter().enumerate() {
                let row = match r {
                    Fixation::At { generation, survivor } => [i.to_string(), "true".into(), generation.to_string(), (survivor + 1).to_string()],
                    Fixation::Trivial | Fixation::NotByCap => [i.to_string(), "false".into(), String::new(), String::new()],
                };
                w.write_record(row)?;
            }
            w.flush()?;
            (
                0,
                json!({"fixation_events": f.fixed, "replicates": f.replicates(), "base_path_fixed": f.base_path_fixed, "dominant_after_fixation": f.dominant_after_fixation}),
            )
        }
        Command::GwSpine => {
            let FamilyConfig::Gw { pmf } = &config.family else {
                return Err(RunError::Usage("gw-spine needs a gw family".into()));
            };
            let d = OffspringDistribution::from_strs(pmf)?;
            let trees = par_replicates(seed, config.reps, |s| sample_spinal(&d, s, config.cap));
            let mut w = csv_writer(dir, "spine.csv")?;
            w.write_record(["replicate", "generation", "size", "spine"])?;
            for (i, t) in trees.into_iter().enumerate() {
                let t = t?;
                for (n, g) in t.spine.iter().enumerate() {
                    w.write_record([i.to_string(), n.to_string(), t.genealogy.spec().size(n).to_string(), (g + 1).to_string()])?;
                }
            }
            w.flush()?;
            let mut results: BTreeMap<&str, Value> = BTreeMap::new();
            results.insert("diagnostics", serde_json::to_value(spine_diagnostics(&d)).unwrap());
            let mut status = 0;
            if config.cap <= 4 {
                let a = exact_spinal_law(&d, config.cap, config.budget)?;
                let b = exact_lookdown_spine_law(&d, config.cap, config.budget)?;
                let report = exact_equality("spinal-vs-lookdown-spine", &a, &b);
                status = status_of(&[&report]);
                results.insert("correspondence", serde_json::to_value(report).unwrap());
            }
            (status, serde_json::to_value(results).unwrap())
        }
    };
    write_manifest(config, &results, status)?;
    Ok(RunOutcome { status, results })
}

fn write_manifest(config: &RunConfig, results: &Value, status: i32) -> Result<(), RunError> {
    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let manifest = json!({
        "software": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "timestamp": timestamp,
        "config": config,
        "replicate_seeds": "replicate i uses SeedSpec::new(seed).replicate(i)",
        "exit_status": status,
        "results": results,
    });
    fs::write(config.out.join("manifest.json"), serde_json::to_string_pretty(&manifest).unwrap())?;
    Ok(())
}

/// Command-line arguments of the `lookdown` binary.
#[derive(Debug, Parser)]
#[command(name = "lookdown", version, about = "Run a neutral-genealogy experiment described by a JSON config")]
pub struct Args {
    /// Path of the JSON config document.
    pub config: PathBuf,
    /// Overrides the config's root seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for replicate parallelism (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Overrides the config's output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses arguments, runs the config and returns the process exit code:
/// 0 on success, 1 when a test rejected, 2 on usage or input errors.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let text = match fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", args.config.display());
            return 2;
        }
    };
    let mut config = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return 2;
        }
    };
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(o) = args.out {
        config.out = o;
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(args.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("cannot start worker pool: {e}");
            return 2;
        }
    };
    match pool.install(|| run(&config)) {
        Ok(outcome) => {
            println!("{}", serde_json::to_string_pretty(&outcome.results).unwrap());
            outcome.status
        }
        Err(e) => {
            eprintln!("{e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_moran_config() {
        let c = parse_config(r#"{"command":"coalescent","family":{"kind":"moran","N":10},"cap":100}"#).unwrap();
        assert_eq!(c.command, Command::Coalescent);
        assert_eq!(c.family, FamilyConfig::Moran { n: 10 });
        assert_eq!(c.cap, 100);
        assert_eq!(c.reps, DEFAULT_REPS);
        assert_eq!(c.alpha, DEFAULT_ALPHA);
    }

    #[test]
    fn missing_command() {
        match parse_config(r#"{"family":"moran","N":4}"#).unwrap_err() {
            ConfigError::Validation { field, .. } => assert_eq!(field, "command"),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn parse_error_has_location() {
        match parse_config("{\n  \"command\": ,\n}").unwrap_err() {
            ConfigError::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn rational_pmf_strings() {
        let c = parse_config(r#"{"command":"gw-spine","family":{"kind":"gw","pmf":["1/2","0","1/2"]},"cap":3}"#).unwrap();
        let FamilyConfig::Gw { pmf } = &c.family else { panic!() };
        let d = OffspringDistribution::from_strs(pmf).unwrap();
        assert_eq!(d.mean(), crate::rng::ratio(1, 1));
        let bad = parse_config(r#"{"command":"gw-spine","family":{"kind":"gw","pmf":["1/2","1/3"]}}"#).unwrap_err();
        assert!(matches!(bad, ConfigError::Validation { field, .. } if field == "family.pmf"));
    }

    #[test]
    fn top_level_family_parameters() {
        let c = parse_config(r#"{"command":"fixation","family":"asynchronous","x0":1,"b":"doubling","cap":12}"#).unwrap();
        assert_eq!(
            c.family,
            FamilyConfig::Asynchronous {
                x0: 1,
                b: BirthConfig::Rule("doubling".into())
            }
        );
        let c = parse_config(r#"{"command":"sample","X":[2,3],"litters":[[2,1]]}"#).unwrap();
        assert_eq!(c.cap, 2);
        let e = parse_config(r#"{"command":"sample","X":[2,3],"litters":[[2,2]]}"#).unwrap_err();
        assert!(matches!(e, ConfigError::Validation { field, .. } if field == "family"));
    }

    #[test]
    fn config_serializes_for_manifest() {
        let c = parse_config(r#"{"command":"identify-base","family":{"kind":"moran","N":10},"cap":50,"grid":[0,1]}"#).unwrap();
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["command"], "identify-base");
        assert_eq!(v["family"]["kind"], "moran");
        assert_eq!(v["family"]["N"], 10);
        assert_eq!(v["grid"], json!([0, 1]));
    }
}
