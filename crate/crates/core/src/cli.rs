//! The `admit` command line: validate, generate, solve, check, compare and
//! enumerate. Reports are JSON documents with a fixed key order.
//!
//! Exit codes: 0 stable or feasible outcome, 1 usage or validation error,
//! 2 proven infeasible (no stable solution), 3 the solver and the stability
//! oracle disagree.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::algorithms::lower_quota_heuristic;
use crate::formulations::{
    build_classical, build_combined, build_common, build_lower, build_paired,
    build_paired_via_common, build_scorelimits, extract_solution, ClassicalObjective,
    ClassicalOptions, Closure, CombinedPolicy, GroupStability, LimitMode, Solution,
};
use crate::instance::{generate, parse_instance, to_json, GenConfig, Instance, Target, Topology};
use crate::matching::{Matching, ScoreLimits};
use crate::model::{LinExpr, LinearModel, Objective, Role, Sense};
use crate::oracle::{self, OracleError, StabilityReport, Variant, Verdict};
use crate::preprocess::{apply_fixings, fix_iterate, CollegeSet, FixingResult};
use crate::solver::{self, Limits, SolveResult, Status};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;

/// Infeasibility is cross-checked by exhaustive search up to this many candidates.
const CONFIRM_LIMIT: u128 = 1 << 16;

#[derive(Debug, Parser)]
#[command(name = "admit", version, about = "Stable college admissions with special features")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse an instance and summarize its features.
    Validate { instance: PathBuf },
    /// Draw a random instance.
    Generate(GenerateArgs),
    /// Build a model, solve it and audit the result with the stability oracle.
    Solve(SolveArgs),
    /// Audit a solution document against a stability definition.
    Check {
        #[arg(long, value_enum)]
        variant: VariantArg,
        instance: PathBuf,
        solution: PathBuf,
    },
    /// Run the college-closing heuristic and the lower-quota model side by side.
    Compare {
        instance: PathBuf,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// List every stable solution by exhaustive search.
    Enumerate {
        #[arg(long, value_enum)]
        variant: VariantArg,
        #[arg(long, default_value_t = 100)]
        cap: usize,
        instance: PathBuf,
    },
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 6)]
    applicants: usize,
    #[arg(long, default_value_t = 3)]
    colleges: usize,
    #[arg(long, default_value_t = 1)]
    list_min: usize,
    #[arg(long, default_value_t = 3)]
    list_max: usize,
    #[arg(long, default_value_t = 10)]
    max_score: i64,
    #[arg(long, default_value_t = 0.0)]
    tie_density: f64,
    #[arg(long, default_value_t = 1)]
    upper_min: u32,
    #[arg(long, default_value_t = 2)]
    upper_max: u32,
    #[arg(long, default_value_t = 0)]
    lower_min: u32,
    #[arg(long, default_value_t = 0)]
    lower_max: u32,
    #[arg(long, value_enum, default_value_t = TopologyArg::None)]
    topology: TopologyArg,
    #[arg(long, default_value_t = 0)]
    quota_sets: usize,
    #[arg(long, default_value_t = 1)]
    set_upper_min: u32,
    #[arg(long, default_value_t = 2)]
    set_upper_max: u32,
    #[arg(long, default_value_t = 0)]
    lower_groups: usize,
    #[arg(long, default_value_t = 1)]
    group_lower_min: u32,
    #[arg(long, default_value_t = 2)]
    group_lower_max: u32,
    #[arg(long, default_value_t = 0.0)]
    paired_prob: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the instance here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LimitArgs {
    /// Stop after this many search nodes.
    #[arg(long)]
    node_cap: Option<u64>,
    /// Stop after this many seconds.
    #[arg(long)]
    time_cap: Option<f64>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = ModelArg::Classical)]
    model: ModelArg,
    /// Score-limit closure; defaults to ties-min when the instance has ties, strict otherwise.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    objective: Option<ObjectiveArg>,
    /// Fix colleges that are open or closed in every stable solution before solving.
    #[arg(long)]
    preprocess: bool,
    #[command(flatten)]
    limits: LimitArgs,
    /// Combined model: allow ties.
    #[arg(long)]
    ties: bool,
    /// Combined model: handle lower quotas.
    #[arg(long)]
    lower: bool,
    /// Combined model: handle common quotas.
    #[arg(long)]
    common: bool,
    /// Combined model: treatment of blocking groups at closed colleges.
    #[arg(long, value_enum, default_value_t = GroupArg::Enforce)]
    group_stability: GroupArg,
    /// Combined model: closure of tied score-limits.
    #[arg(long, value_enum, default_value_t = ClosureArg::MinLimits)]
    closure: ClosureArg,
    /// Paired model: solve through the common-quota reduction.
    #[arg(long)]
    via_common: bool,
    /// Write the model in LP format to this file.
    #[arg(long)]
    dump_lp: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Classical,
    Scorelimits,
    Lower,
    Common,
    Paired,
    Combined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Strict,
    TiesMin,
    TiesFull,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    ApplicantOptimal,
    ApplicantPessimal,
    MinScoreLimits,
    LexMatchedThenLimits,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GroupArg {
    Enforce,
    Drop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClosureArg {
    MinLimits,
    Witness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TopologyArg {
    None,
    Nested,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Classical,
    WeakTies,
    ScorelimitsH,
    Lower,
    Common,
    Paired,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Classical => Variant::Classical,
            VariantArg::WeakTies => Variant::WeakTies,
            VariantArg::ScorelimitsH => Variant::ScorelimitsH,
            VariantArg::Lower => Variant::Lower,
            VariantArg::Common => Variant::Common,
            VariantArg::Paired => Variant::Paired,
        }
    }
}

/// A failed command: the message goes to standard error.
struct Failure {
    code: i32,
    message: String,
    report: Option<Value>,
}

fn usage(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.to_string(),
        report: None,
    }
}

/// Runs the command line `args` (program name first), writing the report to
/// `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Validate { instance } => validate(&instance),
        Command::Generate(args) => generate_cmd(&args, out),
        Command::Solve(args) => solve_cmd(&args),
        Command::Check {
            variant,
            instance,
            solution,
        } => check_cmd(variant.into(), &instance, &solution),
        Command::Compare { instance, limits } => compare_cmd(&instance, &limits),
        Command::Enumerate {
            variant,
            cap,
            instance,
        } => enumerate_cmd(variant.into(), cap, &instance),
    };
    match outcome {
        Ok((code, report)) => {
            if let Some(report) = report {
                print_report(out, &report);
            }
            code
        }
        Err(f) => {
            if let Some(report) = &f.report {
                print_report(out, report);
            }
            let _ = writeln!(err, "admit: {}", f.message);
            f.code
        }
    }
}

fn print_report(out: &mut dyn Write, report: &Value) {
    let text = serde_json::to_string_pretty(report).expect("reports always serialize");
    let _ = writeln!(out, "{text}");
}

type Outcome = Result<(i32, Option<Value>), Failure>;

fn load(path: &Path) -> Result<Instance, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// SHA-256 of the canonical serialization, in hex.
pub fn instance_digest(inst: &Instance) -> String {
    let hash = Sha256::digest(to_json(inst).as_bytes());
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

fn instance_json(path: &Path, inst: &Instance) -> Value {
    json!({"file": path.display().to_string(), "digest": instance_digest(inst)})
}

fn validate(path: &Path) -> Outcome {
    let inst = load(path)?;
    let report = json!({
        "command": "validate",
        "instance": instance_json(path, &inst),
        "applicants": inst.num_applicants(),
        "colleges": inst.num_colleges(),
        "applications": inst.applications().len(),
        "features": {
            "ties": inst.tied_college().is_some(),
            "lower_quotas": inst.has_lower_quotas(),
            "lower_groups": inst.lower_groups().len(),
            "common_quotas": inst.quota_sets().len(),
            "nested": inst.is_nested(),
            "paired": inst.has_paired(),
        },
    });
    Ok((EXIT_OK, Some(report)))
}

fn generate_cmd(a: &GenerateArgs, out: &mut dyn Write) -> Outcome {
    let cfg = GenConfig {
        applicants: a.applicants,
        colleges: a.colleges,
        list_len: (a.list_min, a.list_max),
        max_score: a.max_score,
        tie_density: a.tie_density,
        upper: (a.upper_min, a.upper_max),
        lower: (a.lower_min, a.lower_max),
        topology: match a.topology {
            TopologyArg::None => Topology::None,
            TopologyArg::Nested => Topology::Nested,
            TopologyArg::Random => Topology::Random,
        },
        quota_sets: a.quota_sets,
        set_upper: (a.set_upper_min, a.set_upper_max),
        lower_groups: a.lower_groups,
        group_lower: (a.group_lower_min, a.group_lower_max),
        paired_prob: a.paired_prob,
        seed: a.seed,
    };
    let inst = generate(&cfg).map_err(usage)?;
    let text = to_json(&inst);
    match &a.output {
        Some(path) => fs::write(path, text + "\n").map_err(|e| usage(format!("{}: {e}", path.display())))?,
        None => {
            let _ = writeln!(out, "{text}");
        }
    }
    Ok((EXIT_OK, None))
}

fn limits(a: &LimitArgs) -> Result<Limits, Failure> {
    let time_cap = match a.time_cap {
        Some(s) if !(s.is_finite() && s >= 0.0) => {
            return Err(usage("--time-cap must be a non-negative number of seconds"))
        }
        Some(s) => Some(Duration::from_secs_f64(s)),
        None => None,
    };
    Ok(Limits {
        node_cap: a.node_cap,
        time_cap,
    })
}

/// How a solved model is audited.
#[derive(Debug, Clone, Copy)]
enum Audit {
    Stability(Variant),
    /// Try the variant; fall back to feasibility when its definition does not apply.
    StabilityOrFeasibility(Variant),
    Feasibility,
}

fn audit(inst: &Instance, sol: &Solution, how: Audit) -> Result<(String, StabilityReport), Failure> {
    let feasibility = || {
        oracle::audit_feasibility(inst, sol)
            .map(|r| ("feasibility".to_string(), r))
            .map_err(usage)
    };
    match how {
        Audit::Stability(v) => oracle::check(inst, sol, v)
            .map(|r| (v.label().to_string(), r))
            .map_err(usage),
        Audit::StabilityOrFeasibility(v) => match oracle::check(inst, sol, v) {
            Ok(r) => Ok((v.label().to_string(), r)),
            Err(OracleError::Precondition(_)) => feasibility(),
            Err(e) => Err(usage(e)),
        },
        Audit::Feasibility => feasibility(),
    }
}

fn rank_sum(model: &LinearModel, inst: &Instance) -> LinExpr {
    let mut expr = LinExpr::constant(0);
    for (k, v) in model.variables().iter().enumerate() {
        if let Role::Assign(e) = v.role {
            expr.add_term(crate::model::VarId(k), inst.application(e).rank as i64);
        }
    }
    expr
}

fn requested_objectives(
    model: &LinearModel,
    inst: &Instance,
    objective: ObjectiveArg,
) -> Result<Vec<Objective>, Failure> {
    let x = model.vars_where(|r| matches!(r, Role::Assign(_)));
    let t = model.vars_where(|r| matches!(r, Role::Limit(_) | Role::SetLimit(_)));
    let needs_limits = || {
        if t.is_empty() {
            Err(usage(format!("model {} has no score-limits to minimize", model.name)))
        } else {
            Ok(())
        }
    };
    Ok(match objective {
        ObjectiveArg::ApplicantOptimal => {
            vec![Objective::new("rank_sum", Sense::Minimize, rank_sum(model, inst))]
        }
        ObjectiveArg::ApplicantPessimal => {
            vec![Objective::new("rank_sum", Sense::Maximize, rank_sum(model, inst))]
        }
        ObjectiveArg::MinScoreLimits => {
            needs_limits()?;
            vec![Objective::new("limit_sum", Sense::Minimize, LinExpr::sum(t))]
        }
        ObjectiveArg::LexMatchedThenLimits => {
            needs_limits()?;
            vec![
                Objective::new("matched", Sense::Maximize, LinExpr::sum(x)),
                Objective::new("limit_sum", Sense::Minimize, LinExpr::sum(t)),
            ]
        }
    })
}

fn build(inst: &Instance, a: &SolveArgs) -> Result<(LinearModel, Audit), Failure> {
    let ties = inst.tied_college().is_some();
    let (model, how) = match a.model {
        ModelArg::Classical => {
            let objective = match a.objective {
                Some(ObjectiveArg::ApplicantOptimal) => ClassicalObjective::ApplicantOptimal,
                Some(ObjectiveArg::ApplicantPessimal) => ClassicalObjective::ApplicantPessimal,
                Some(_) => return Err(usage("the classical model has no score-limits")),
                None => ClassicalObjective::None,
            };
            let m = build_classical(inst, ClassicalOptions { ties, objective }).map_err(usage)?;
            let v = if ties { Variant::WeakTies } else { Variant::Classical };
            return Ok((m, Audit::Stability(v)));
        }
        ModelArg::Scorelimits => {
            let mode = match a.mode.unwrap_or(if ties { ModeArg::TiesMin } else { ModeArg::Strict }) {
                ModeArg::Strict => LimitMode::Strict,
                ModeArg::TiesMin => LimitMode::TiesMin,
                ModeArg::TiesFull => LimitMode::TiesFull,
            };
            let v = if mode == LimitMode::Strict {
                Variant::Classical
            } else {
                Variant::ScorelimitsH
            };
            (build_scorelimits(inst, mode).map_err(usage)?, Audit::Stability(v))
        }
        ModelArg::Lower => (
            build_lower(inst, !inst.lower_groups().is_empty()).map_err(usage)?,
            Audit::Stability(Variant::Lower),
        ),
        ModelArg::Common => (build_common(inst).map_err(usage)?, Audit::Stability(Variant::Common)),
        ModelArg::Paired => {
            let m = if a.via_common {
                build_paired_via_common(inst)
            } else {
                build_paired(inst)
            };
            (m.map_err(usage)?, Audit::Stability(Variant::Paired))
        }
        ModelArg::Combined => {
            let policy = CombinedPolicy {
                ties: a.ties,
                lower: a.lower,
                common: a.common,
                group_stability: match a.group_stability {
                    GroupArg::Enforce => GroupStability::Enforce,
                    GroupArg::Drop => GroupStability::DropWithLexObjective,
                },
                closure: match a.closure {
                    ClosureArg::MinLimits => Closure::MinLimitsObjective,
                    ClosureArg::Witness => Closure::WitnessSystem,
                },
            };
            let drop = a.lower && a.group_stability == GroupArg::Drop;
            let how = match (a.ties, a.lower, a.common) {
                _ if drop => Audit::Feasibility,
                (false, false, false) => Audit::Stability(Variant::Classical),
                (true, false, false) => Audit::Stability(Variant::ScorelimitsH),
                (false, false, true) => Audit::Stability(Variant::Common),
                (_, true, false) => Audit::StabilityOrFeasibility(Variant::Lower),
                _ => Audit::Feasibility,
            };
            (build_combined(inst, policy).map_err(usage)?, how)
        }
    };
    let mut model = model;
    if let Some(obj) = a.objective {
        let wanted = requested_objectives(&model, inst, obj)?;
        if model.objectives().is_empty() {
            model.set_objectives(wanted);
        } else if model.objectives() != wanted.as_slice() {
            return Err(usage(format!(
                "model {} fixes its own objective; --objective does not apply",
                model.name
            )));
        }
    }
    Ok((model, how))
}

fn ids(inst: &Instance, set: &CollegeSet) -> Vec<String> {
    set.iter().map(|&j| inst.college(j).id.clone()).collect()
}

fn fixing_json(inst: &Instance, r: &FixingResult, fixed: usize) -> Value {
    json!({
        "must_open": ids(inst, &r.must_open),
        "must_close": ids(inst, &r.must_close),
        "iterations": r.iterations,
        "trace": r.trace.iter().map(|round| json!({
            "open": ids(inst, &round.open),
            "closed": ids(inst, &round.closed),
        })).collect::<Vec<_>>(),
        "fixed_variables": fixed,
    })
}

fn stats_json(r: &SolveResult) -> Value {
    json!({
        "nodes": r.stats.nodes,
        "elapsed_ms": (r.stats.elapsed.as_secs_f64() * 1e6).round() / 1e3,
    })
}

fn violations_json(report: &StabilityReport) -> Value {
    report
        .violations
        .iter()
        .map(|v| {
            json!({
                "kind": v.kind.label(),
                "involved": v.involved,
                "explanation": v.explanation,
            })
        })
        .collect()
}

/// Solution document: `matching` maps applicant ids to a college id, a pair
/// of ids or null; the optional maps carry limits and open flags.
pub fn solution_json(inst: &Instance, sol: &Solution) -> Value {
    let mut matching = Map::new();
    for (i, a) in inst.applicants().iter().enumerate() {
        let v = match sol.matching.get(i).map(|e| &inst.application(e).target) {
            None => Value::Null,
            Some(Target::Single { college, .. }) => json!(inst.college(*college).id),
            Some(Target::Pair { colleges, .. }) => {
                json!([inst.college(colleges[0]).id, inst.college(colleges[1]).id])
            }
        };
        matching.insert(a.id.clone(), v);
    }
    let mut doc = Map::new();
    doc.insert("matching".into(), Value::Object(matching));
    let per_college = |values: &mut dyn Iterator<Item = Value>| -> Value {
        Value::Object(inst.colleges().iter().map(|c| c.id.clone()).zip(values).collect())
    };
    if let Some(t) = &sol.score_limits {
        doc.insert("score_limits".into(), per_college(&mut t.0.iter().map(|v| json!(v))));
    }
    if let Some(t) = &sol.set_limits {
        let sets = inst.quota_sets().iter().map(|q| q.id.clone());
        doc.insert(
            "set_limits".into(),
            Value::Object(sets.zip(t.iter().map(|v| json!(v))).collect()),
        );
    }
    if let Some(o) = &sol.open {
        doc.insert("open".into(), per_college(&mut o.iter().map(|v| json!(v))));
    }
    if let Some(o) = &sol.group_open {
        let groups = inst.lower_groups().iter().map(|g| g.id.clone());
        doc.insert(
            "group_open".into(),
            Value::Object(groups.zip(o.iter().map(|v| json!(v))).collect()),
        );
    }
    Value::Object(doc)
}

/// Reads a solution document written by [`solution_json`] (or by hand).
pub fn parse_solution(inst: &Instance, text: &str) -> Result<Solution, String> {
    let doc: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let obj = doc.as_object().ok_or("solution must be a JSON object")?;
    for key in obj.keys() {
        if !["matching", "score_limits", "set_limits", "open", "group_open"].contains(&key.as_str()) {
            return Err(format!("unknown field `{key}`"));
        }
    }
    let matching = obj
        .get("matching")
        .and_then(Value::as_object)
        .ok_or("`matching` must be an object")?;
    let mut m = Matching::unmatched(inst.num_applicants());
    for (aid, v) in matching {
        let i = inst
            .applicant_index(aid)
            .ok_or_else(|| format!("matching: unknown applicant `{aid}`"))?;
        let college = |v: &Value| -> Result<usize, String> {
            let id = v.as_str().ok_or_else(|| format!("matching.{aid}: expected a college id"))?;
            inst.college_index(id)
                .ok_or_else(|| format!("matching.{aid}: unknown college `{id}`"))
        };
        let wanted: Option<Vec<usize>> = match v {
            Value::Null => None,
            Value::String(_) => Some(vec![college(v)?]),
            Value::Array(items) if items.len() == 2 => {
                Some(vec![college(&items[0])?, college(&items[1])?])
            }
            _ => return Err(format!("matching.{aid}: expected null, a college id or a pair")),
        };
        if let Some(wanted) = wanted {
            let e = inst
                .list(i)
                .iter()
                .copied()
                .find(|&e| inst.application(e).colleges().map(|(j, _)| j).eq(wanted.iter().copied()))
                .ok_or_else(|| format!("matching.{aid}: no such entry in the applicant's list"))?;
            m.set(i, Some(e));
        }
    }
    let map = |key: &str, ids: Vec<String>| -> Result<Option<Vec<Value>>, String> {
        let Some(v) = obj.get(key) else { return Ok(None) };
        let o = v.as_object().ok_or_else(|| format!("`{key}` must be an object"))?;
        if let Some(k) = o.keys().find(|k| !ids.contains(k)) {
            return Err(format!("{key}: unknown id `{k}`"));
        }
        ids.iter()
            .map(|id| o.get(id).cloned().ok_or_else(|| format!("{key}: missing `{id}`")))
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    };
    let ints = |key: &str, vals: Option<Vec<Value>>| -> Result<Option<Vec<i64>>, String> {
        vals.map(|vs| {
            vs.iter()
                .map(|v| v.as_i64().ok_or_else(|| format!("{key}: expected integers")))
                .collect()
        })
        .transpose()
    };
    let bools = |key: &str, vals: Option<Vec<Value>>| -> Result<Option<Vec<bool>>, String> {
        vals.map(|vs| {
            vs.iter()
                .map(|v| v.as_bool().ok_or_else(|| format!("{key}: expected booleans")))
                .collect()
        })
        .transpose()
    };
    let college_ids: Vec<String> = inst.colleges().iter().map(|c| c.id.clone()).collect();
    let set_ids: Vec<String> = inst.quota_sets().iter().map(|q| q.id.clone()).collect();
    let group_ids: Vec<String> = inst.lower_groups().iter().map(|g| g.id.clone()).collect();
    Ok(Solution {
        score_limits: ints("score_limits", map("score_limits", college_ids.clone())?)?.map(ScoreLimits),
        set_limits: ints("set_limits", map("set_limits", set_ids)?)?,
        open: bools("open", map("open", college_ids)?)?,
        group_open: bools("group_open", map("group_open", group_ids)?)?,
        ..Solution::from_matching(m)
    })
}

/// Looks for a stable solution by exhaustive search when the instance is
/// small enough. `Some(true)` means one exists.
fn oracle_has_stable(inst: &Instance, how: Audit) -> Option<bool> {
    let v = match how {
        Audit::Stability(v) | Audit::StabilityOrFeasibility(v) => v,
        Audit::Feasibility => return None,
    };
    if oracle::search_space(inst, v) > CONFIRM_LIMIT {
        return None;
    }
    oracle::enumerate_stable(inst, v, 1).ok().map(|s| !s.solutions.is_empty())
}

fn solve_cmd(a: &SolveArgs) -> Outcome {
    let inst = load(&a.instance)?;
    let limits = limits(&a.limits)?;
    let (mut model, how) = build(&inst, a)?;
    let mut report = Map::new();
    report.insert("command".into(), json!("solve"));
    report.insert("instance".into(), instance_json(&a.instance, &inst));
    report.insert("model".into(), json!(model.name));
    if a.preprocess {
        if !model.variables().iter().any(|v| matches!(v.role, Role::Open(_))) {
            return Err(usage(format!("--preprocess needs a model with lower quotas, not {}", model.name)));
        }
        let fixing = fix_iterate(&inst).map_err(usage)?;
        let fixed = apply_fixings(&mut model, &fixing);
        report.insert("preprocessing".into(), fixing_json(&inst, &fixing, fixed));
    }
    if let Some(path) = &a.dump_lp {
        fs::write(path, model.to_lp()).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    }
    let result = solver::solve(&model, &limits).map_err(usage)?;
    report.insert("status".into(), json!(result.status.label()));
    let objectives: Vec<Value> = model
        .objectives()
        .iter()
        .zip(&result.objective_values)
        .map(|(o, v)| json!({"label": o.label, "value": v}))
        .collect();
    report.insert("objective_values".into(), json!(objectives));

    let Some(values) = &result.assignment else {
        report.insert("solution".into(), Value::Null);
        report.insert("stats".into(), stats_json(&result));
        if result.status == Status::LimitReached {
            return Err(Failure {
                code: EXIT_USAGE,
                message: "search limit reached before any solution was found".into(),
                report: Some(Value::Object(report)),
            });
        }
        let confirmed = oracle_has_stable(&inst, how);
        report.insert("oracle_confirms_infeasible".into(), json!(confirmed.map(|found| !found)));
        if confirmed == Some(true) {
            return Err(Failure {
                code: EXIT_INCONSISTENT,
                message: "the model is infeasible but the oracle found a stable solution".into(),
                report: Some(Value::Object(report)),
            });
        }
        return Ok((EXIT_INFEASIBLE, Some(Value::Object(report))));
    };
    let sol = extract_solution(&inst, &model, values).map_err(|e| Failure {
        code: EXIT_INCONSISTENT,
        message: format!("solver returned an assignment the model rejects: {e}"),
        report: None,
    })?;
    let (variant, verdict) = audit(&inst, &sol, how)?;
    report.insert("variant".into(), json!(variant));
    report.insert("solution".into(), solution_json(&inst, &sol));
    report.insert("verdict".into(), json!(verdict.verdict.label()));
    report.insert("violations".into(), violations_json(&verdict));
    report.insert("stats".into(), stats_json(&result));
    let report = Value::Object(report);
    if !matches!(verdict.verdict, Verdict::Stable | Verdict::Feasible) {
        return Err(Failure {
            code: EXIT_INCONSISTENT,
            message: format!("the oracle rejects the solver's solution as {}", verdict.verdict.label()),
            report: Some(report),
        });
    }
    Ok((EXIT_OK, Some(report)))
}

fn check_cmd(variant: Variant, instance: &Path, solution: &Path) -> Outcome {
    let inst = load(instance)?;
    let text = fs::read_to_string(solution).map_err(|e| usage(format!("{}: {e}", solution.display())))?;
    let sol = parse_solution(&inst, &text).map_err(|e| usage(format!("{}: {e}", solution.display())))?;
    let report = oracle::check(&inst, &sol, variant).map_err(usage)?;
    Ok((
        EXIT_OK,
        Some(json!({
            "command": "check",
            "instance": instance_json(instance, &inst),
            "variant": variant.label(),
            "verdict": report.verdict.label(),
            "violations": violations_json(&report),
        })),
    ))
}

fn compare_cmd(instance: &Path, limit_args: &LimitArgs) -> Outcome {
    let inst = load(instance)?;
    let limits = limits(limit_args)?;
    let h = lower_quota_heuristic(&inst).map_err(usage)?;
    let mut hsol = Solution::from_matching(h.matching.clone());
    hsol.open = Some(h.closed.iter().map(|c| !c).collect());
    let hreport = oracle::check(&inst, &hsol, Variant::Lower).map_err(usage)?;
    let closed: Vec<String> = (0..inst.num_colleges())
        .filter(|&j| h.closed[j])
        .map(|j| inst.college(j).id.clone())
        .collect();
    let heuristic = json!({
        "solution": solution_json(&inst, &hsol),
        "closed": closed,
        "trace": h.trace.iter().map(|s| json!({
            "college": inst.college(s.college).id,
            "admitted": s.admitted,
            "lower": s.lower,
        })).collect::<Vec<_>>(),
        "verdict": hreport.verdict.label(),
        "violations": violations_json(&hreport),
    });

    let model = build_lower(&inst, !inst.lower_groups().is_empty()).map_err(usage)?;
    let result = solver::solve(&model, &limits).map_err(usage)?;
    let mut ip = Map::new();
    ip.insert("status".into(), json!(result.status.label()));
    let mut code = EXIT_OK;
    let mut message = None;
    match &result.assignment {
        Some(values) => {
            let sol = extract_solution(&inst, &model, values).map_err(usage)?;
            let r = oracle::check(&inst, &sol, Variant::Lower).map_err(usage)?;
            ip.insert("solution".into(), solution_json(&inst, &sol));
            ip.insert("verdict".into(), json!(r.verdict.label()));
            ip.insert("violations".into(), violations_json(&r));
            if !r.is_stable() {
                code = EXIT_INCONSISTENT;
                message = Some("the oracle rejects the model's solution");
            }
        }
        None => {
            ip.insert("solution".into(), Value::Null);
            ip.insert("verdict".into(), Value::Null);
            if result.status == Status::Infeasible {
                code = EXIT_INFEASIBLE;
                if oracle_has_stable(&inst, Audit::Stability(Variant::Lower)) == Some(true) {
                    code = EXIT_INCONSISTENT;
                    message = Some("the model is infeasible but the oracle found a stable solution");
                }
            } else {
                code = EXIT_USAGE;
                message = Some("search limit reached before any solution was found");
            }
        }
    }
    ip.insert("stats".into(), stats_json(&result));
    let report = json!({
        "command": "compare",
        "instance": instance_json(instance, &inst),
        "heuristic": heuristic,
        "ip": Value::Object(ip),
    });
    match message {
        Some(m) => Err(Failure {
            code,
            message: m.into(),
            report: Some(report),
        }),
        None => Ok((code, Some(report))),
    }
}

fn enumerate_cmd(variant: Variant, cap: usize, instance: &Path) -> Outcome {
    let inst = load(instance)?;
    let set = oracle::enumerate_stable(&inst, variant, cap).map_err(usage)?;
    let report = json!({
        "command": "enumerate",
        "instance": instance_json(instance, &inst),
        "variant": variant.label(),
        "count": set.solutions.len(),
        "truncated": set.truncated,
        "solutions": set.solutions.iter().map(|s| solution_json(&inst, s)).collect::<Vec<_>>(),
    });
    let code = if set.solutions.is_empty() {
        EXIT_INFEASIBLE
    } else {
        EXIT_OK
    };
    Ok((code, Some(report)))
}
