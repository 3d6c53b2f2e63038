//! The `mprs` command line: `generate | run | evaluate | verify | report`.
//!
//! Exit codes: 0 ok, 1 internal failure, 2 budget exceeded, 3 verification
//! failed, 4 bad input.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mprs_milp::{to_mps_string, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::engine::{
    build_q, pick_best, run_aq_traced, AqOptions, Budget, Epsilon, MprsResult, QFormulation, Scenario, StopReason,
};
use crate::error::{Error, Result};
use crate::generators::{
    apply_partition, build_omega, gen_plm, gen_sp, OmegaParams, PartitionScheme, PlmParams, SchemeKind, SpParams,
};
use crate::instance::{Instance, InstanceKind};
use crate::io::{read_json, to_canonical_line, write_instance, write_json};
use crate::oracle::{toy_instance, BruteForce};
use crate::robust::{build_robust_milp, build_robust_tu_relaxed, build_robust_variant_milp, solve_robust, RobustMode};
use crate::solver::SolverContext;
use crate::uncertainty::{robustness_value, robustness_value_variant, GammaVector, OmegaSpec, SampleMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;
pub const EXIT_BAD_INPUT: i32 = 4;

/// Point budget of the `verify` grid.
pub const MAX_GRID_POINTS: usize = 625;
/// `verify` adds all vertices of Ω up to this dimension.
pub const MAX_VERIFY_VERTEX_DIM: usize = 10;
/// Absolute slack on the verified guarantee.
pub const VERIFY_TOL: f64 = 1e-6;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::DimensionMismatch { .. }
        | Error::InvalidInstance(_)
        | Error::InvalidOmega(_)
        | Error::InvalidArgument(_)
        | Error::Unsupported(_)
        | Error::TooLarge { .. }
        | Error::Json(_)
        | Error::Io(_)
        | Error::Model(_) => EXIT_BAD_INPUT,
        _ => EXIT_FAILURE,
    }
}

// ---------------------------------------------------------------- generate

/// What `generate` builds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GenerateSpec {
    Sp(SpParams),
    Plm(PlmParams),
    Toy { n: usize },
}

/// Builds an instance, applies `partition` if given and writes it to `out`.
pub fn cmd_generate(spec: GenerateSpec, partition: Option<PartitionScheme>, out: &Path) -> Result<Instance> {
    let inst = match spec {
        GenerateSpec::Sp(p) => gen_sp(p)?,
        GenerateSpec::Plm(p) => gen_plm(p)?,
        GenerateSpec::Toy { n } => toy_instance(n)?.0,
    };
    let inst = match partition {
        Some(scheme) => apply_partition(&inst, scheme)?,
        None => inst,
    };
    write_instance(out, &inst)?;
    Ok(inst)
}

// --------------------------------------------------------------------- run

/// Ω either derived from the instance's groups or given in full.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaChoice {
    Generated(OmegaParams),
    Explicit(OmegaSpec),
    /// Interval bounds; a single value is repeated for every group.
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
}

impl OmegaChoice {
    pub fn resolve(&self, inst: &Instance) -> Result<OmegaSpec> {
        match self {
            OmegaChoice::Generated(p) => build_omega(inst, *p),
            OmegaChoice::Explicit(o) => Ok(o.clone()),
            OmegaChoice::Box { lower, upper } => {
                let widen = |v: &[f64]| if v.len() == 1 { vec![v[0]; inst.num_groups()] } else { v.to_vec() };
                OmegaSpec::interval(widen(lower), widen(upper))
            }
        }
    }

    /// Short description used to group report rows.
    pub fn label(&self) -> String {
        match self {
            OmegaChoice::Generated(OmegaParams::Interval { delta }) => format!("interval delta={delta}"),
            OmegaChoice::Generated(OmegaParams::Segment { alpha_min, alpha_max, .. }) => {
                format!("segment alpha=[{alpha_min},{alpha_max}]")
            }
            OmegaChoice::Generated(OmegaParams::Budgeted { beta1, beta2, delta }) => {
                format!("budgeted beta1={beta1} beta2={beta2} delta={delta}")
            }
            OmegaChoice::Explicit(o) => format!("{} (explicit)", o.kind_name()),
            OmegaChoice::Box { .. } => "interval (explicit)".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub instance: PathBuf,
    /// Regroups the instance before the run.
    pub partition: Option<PartitionScheme>,
    pub omega: OmegaChoice,
    pub epsilon: Epsilon,
    pub mode: RobustMode,
    pub formulation: QFormulation,
    pub max_iterations: usize,
    pub time_limit_seconds: Option<f64>,
    /// Directory receiving `instance.json`, `result.json` and `trace.jsonl`.
    pub output: PathBuf,
    /// Also write the initial robust model and the last master as MPS.
    pub export_mps: bool,
}

impl RunConfig {
    pub fn new(instance: impl Into<PathBuf>, omega: OmegaChoice, output: impl Into<PathBuf>) -> Self {
        let budget = Budget::default();
        Self {
            instance: instance.into(),
            partition: None,
            omega,
            epsilon: Epsilon::RelativePercent(1.0),
            mode: RobustMode::Standard,
            formulation: QFormulation::Specialized,
            max_iterations: budget.max_iterations,
            time_limit_seconds: budget.time_limit.map(|d| d.as_secs_f64()),
            output: output.into(),
            export_mps: false,
        }
    }

    pub fn budget(&self) -> Result<Budget> {
        let time_limit = match self.time_limit_seconds {
            Some(s) if !(s.is_finite() && s >= 0.0) => {
                return Err(Error::InvalidArgument(format!("time limit must be finite and >= 0, got {s}")))
            }
            Some(s) => Some(Duration::from_secs_f64(s)),
            None => None,
        };
        Ok(Budget { max_iterations: self.max_iterations, time_limit })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub iterations: usize,
    /// Distinct paths, or distinct median sets for medians instances.
    pub distinct_solutions: usize,
    /// `100 · v(Q¹) / v(R(Γ_init))`.
    pub first_bound_percent: Option<f64>,
    pub stop_reason: StopReason,
}

/// Contents of `result.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: RunConfig,
    pub instance_label: String,
    /// Partition scheme of the instance as run, when known.
    pub scheme: Option<String>,
    pub groups: usize,
    pub summary: RunSummary,
    pub result: MprsResult,
}

impl RunRecord {
    /// The regrouped instance written next to the result.
    pub fn instance_path(&self) -> PathBuf {
        self.config.output.join(INSTANCE_FILE)
    }
}

pub const INSTANCE_FILE: &str = "instance.json";
pub const RESULT_FILE: &str = "result.json";
pub const TRACE_FILE: &str = "trace.jsonl";

/// Size description such as `SP |V|=15` or `PLM (l,p)=(8,2)`.
pub fn instance_label(inst: &Instance) -> String {
    let meta = inst.metadata();
    match (inst.kind(), &meta.graph, &meta.medians, meta.toy_n) {
        (InstanceKind::ShortestPath, Some(g), _, _) => format!("SP |V|={}", g.points.len()),
        (InstanceKind::Medians, _, Some(m), _) => format!("PLM (l,p)=({},{})", m.l, m.p),
        (InstanceKind::Toy, _, _, Some(n)) => format!("TOY n={n}"),
        (kind, ..) => format!("{kind} n={}", inst.n()),
    }
}

/// Runs A-Q as configured, writing the regrouped instance, the iteration
/// trace and the result into `config.output`.
pub fn cmd_run(config: &RunConfig, solver: &SolverContext) -> Result<RunRecord> {
    let inst: Instance = read_json(&config.instance)?;
    let inst = match config.partition {
        Some(scheme) => apply_partition(&inst, scheme)?,
        None => inst,
    };
    let omega = config.omega.resolve(&inst)?;
    let options = AqOptions {
        epsilon: config.epsilon,
        mode: config.mode,
        formulation: config.formulation,
        budget: config.budget()?,
    };
    fs::create_dir_all(&config.output)?;
    write_instance(&config.output.join(INSTANCE_FILE), &inst)?;

    let mut trace = BufWriter::new(File::create(config.output.join(TRACE_FILE))?);
    let mut trace_error: Option<Error> = None;
    let result = run_aq_traced(&inst, &omega, &options, solver, |record| {
        if trace_error.is_some() {
            return;
        }
        let line = to_canonical_line(record).and_then(|l| {
            writeln!(trace, "{l}")?;
            trace.flush()?;
            Ok(())
        });
        trace_error = line.err();
    })?;
    if let Some(e) = trace_error {
        return Err(e);
    }

    if config.export_mps {
        export_mps(config, &inst, &omega, &result)?;
    }
    let record = RunRecord {
        config: config.clone(),
        instance_label: instance_label(&inst),
        scheme: inst.metadata().partition_scheme.clone(),
        groups: inst.num_groups(),
        summary: RunSummary {
            iterations: result.iterations(),
            distinct_solutions: result.distinct_solutions.len(),
            first_bound_percent: result.first_bound_percent(),
            stop_reason: result.stop_reason,
        },
        result,
    };
    write_json(&config.output.join(RESULT_FILE), &record)?;
    Ok(record)
}

fn export_mps(config: &RunConfig, inst: &Instance, omega: &OmegaSpec, result: &MprsResult) -> Result<()> {
    let dir = config.output.join("mps");
    fs::create_dir_all(&dir)?;
    let gamma = omega.initial_gamma();
    let initial = match config.mode {
        RobustMode::Standard => build_robust_milp(inst, &gamma)?,
        RobustMode::TuRelaxed => build_robust_tu_relaxed(inst, &gamma)?,
        RobustMode::Variant => build_robust_variant_milp(inst, &gamma)?,
    };
    fs::write(dir.join("r_initial.mps"), to_mps_string(&initial.model, "R_INITIAL"))?;
    let history: Vec<_> = result.history.iter().map(|h| h.solution.clone()).collect();
    let q = build_q(inst, omega, &history, config.mode, config.formulation)?;
    fs::write(dir.join("q_final.mps"), to_mps_string(&q.model, "Q_FINAL"))?;
    Ok(())
}

/// Runs every config on up to `jobs` threads; results come back in input order.
pub fn run_many(configs: &[RunConfig], jobs: usize, solver: &SolverContext) -> Vec<Result<RunRecord>> {
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<RunRecord>>>> = configs.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, configs.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(config) = configs.get(i) else { break };
                let out = cmd_run(config, solver);
                *slots[i].lock().expect("no panics while holding the slot") = Some(out);
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().expect("slot lock").expect("every slot filled")).collect()
}

// ---------------------------------------------------------------- evaluate

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub index: usize,
    pub value: f64,
    pub x: Vec<u8>,
}

/// Best stored solution for `scenario`.
pub fn cmd_evaluate(record: &RunRecord, inst: &Instance, scenario: &Scenario) -> Result<Evaluation> {
    if let Scenario::Gamma(g) = scenario {
        GammaVector::new(g.clone())?;
    }
    let (index, value) = pick_best(&record.result, inst, scenario)?;
    Ok(Evaluation { index, value, x: record.result.history[index].solution.x.clone() })
}

// ------------------------------------------------------------------ verify

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Grid points per Ω dimension.
    pub grid: usize,
    /// Additional uniform samples.
    pub uniform: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { grid: 5, uniform: 0, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    BruteForce,
    Solver,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub epsilon: f64,
    pub points: usize,
    pub reference: Reference,
    /// Largest `min_i W(x^i, Γ) − v(R(Γ))` seen.
    pub max_gap: f64,
    /// Largest gap relative to `v(R(Γ))` (zero where `v(R(Γ)) = 0` and the gap is zero).
    pub max_relative_gap: f64,
    /// Γ attaining `max_gap`.
    pub witness: Option<Vec<f64>>,
    /// Stored solutions outside X.
    pub infeasible: Vec<usize>,
}

/// Points of Ω checked by `verify`: a grid of `options.grid` points per
/// dimension, coarsened until it fits [`MAX_GRID_POINTS`] and then topped up
/// with uniform samples; the vertices for small dimensions; and
/// `options.uniform` extra samples.
pub fn verification_points(omega: &OmegaSpec, options: &VerifyOptions) -> Result<Vec<GammaVector>> {
    let k = omega.dim();
    let mut m = options.grid.max(2);
    while m > 2 && m.checked_pow(k as u32).is_none_or(|t| t > MAX_GRID_POINTS) {
        m -= 1;
    }
    let mut points = omega.sample(SampleMode::Grid(m))?;
    if m < options.grid.max(2) && points.len() < MAX_GRID_POINTS {
        let count = MAX_GRID_POINTS - points.len();
        points.extend(omega.sample(SampleMode::Uniform { seed: options.seed, count })?);
    }
    if k <= MAX_VERIFY_VERTEX_DIM && !matches!(omega, OmegaSpec::Segment { .. }) {
        points.extend(omega.sample(SampleMode::Vertices)?);
    }
    if options.uniform > 0 {
        points.extend(omega.sample(SampleMode::Uniform { seed: options.seed, count: options.uniform })?);
    }
    Ok(points)
}

/// Checks `min_i W(x^i, Γ) − v(R(Γ)) ≤ ε` on `points` with `v(R(Γ))` from
/// enumeration when X is small enough and from the solver otherwise.
pub fn verify_solutions(
    inst: &Instance,
    solutions: &[Vec<u8>],
    points: &[GammaVector],
    epsilon: f64,
    variant: bool,
    solver: &SolverContext,
) -> Result<VerifyReport> {
    let infeasible: Vec<usize> = (0..solutions.len()).filter(|&i| !inst.is_feasible(&solutions[i])).collect();
    let brute = match BruteForce::new(inst) {
        Ok(b) => Some(b),
        Err(Error::TooLarge { .. }) => None,
        Err(e) => return Err(e),
    };
    let w =
        |x: &[u8], g: &[f64]| if variant { robustness_value_variant(inst, x, g) } else { robustness_value(inst, x, g) };
    let mut report = VerifyReport {
        passed: infeasible.is_empty() && !solutions.is_empty(),
        epsilon,
        points: points.len(),
        reference: if brute.is_some() { Reference::BruteForce } else { Reference::Solver },
        max_gap: f64::NEG_INFINITY,
        max_relative_gap: 0.0,
        witness: None,
        infeasible,
    };
    for g in points {
        let reference = match &brute {
            Some(b) => b.robust(g, variant)?.0,
            None => {
                let mode = if variant { RobustMode::Variant } else { RobustMode::Standard };
                solve_robust(inst, g, mode, solver)?.value
            }
        };
        let mut best = f64::INFINITY;
        for x in solutions.iter().filter(|x| inst.is_feasible(x)) {
            best = best.min(w(x, g)?);
        }
        let gap = best - reference;
        if gap > report.max_gap {
            report.max_gap = gap;
            report.witness = Some(g.to_vec());
        }
        let relative = if reference > 0.0 {
            gap / reference
        } else if gap > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        report.max_relative_gap = report.max_relative_gap.max(relative);
    }
    if report.max_gap > epsilon + VERIFY_TOL {
        report.passed = false;
    }
    Ok(report)
}

/// Independent check of a stored run: reads only the `x` vectors, ε and Ω.
pub fn cmd_verify(
    record: &RunRecord,
    inst: &Instance,
    options: &VerifyOptions,
    solver: &SolverContext,
) -> Result<VerifyReport> {
    let result = &record.result;
    let points = verification_points(&result.omega, options)?;
    let solutions: Vec<Vec<u8>> = result.solutions().map(<[u8]>::to_vec).collect();
    verify_solutions(inst, &solutions, &points, result.epsilon, result.mode == RobustMode::Variant, solver)
}

// ------------------------------------------------------------------ report

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub instance: String,
    pub groups: usize,
    pub omega: String,
    pub scheme: String,
    pub runs: usize,
    pub t_bar: f64,
    pub t_hat: f64,
    pub s_min: usize,
    pub s_bar: f64,
    pub s_hat: usize,
    pub eps_bar: f64,
}

pub const REPORT_HEADER: &str = "instance,K,omega,scheme,runs,t_bar,t_hat,s_min,s_bar,s_hat,eps_bar";

impl ReportRow {
    /// One-decimal CSV line matching [`REPORT_HEADER`].
    pub fn to_csv(&self) -> String {
        let quote =
            |s: &str| if s.contains([',', '"']) { format!("\"{}\"", s.replace('"', "\"\"")) } else { s.to_string() };
        format!(
            "{},{},{},{},{},{:.1},{:.1},{},{:.1},{},{:.1}",
            quote(&self.instance),
            self.groups,
            quote(&self.omega),
            quote(&self.scheme),
            self.runs,
            self.t_bar,
            self.t_hat,
            self.s_min,
            self.s_bar,
            self.s_hat,
            self.eps_bar
        )
    }
}

fn collect_results(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)?.map(|e| e.map(|e| e.path())).collect::<std::io::Result<_>>()?;
    entries.sort();
    for path in entries {
        if path.is_dir() {
            collect_results(&path, out)?;
        } else if path.file_name().is_some_and(|n| n == RESULT_FILE) {
            out.push(path);
        }
    }
    Ok(())
}

/// Aggregates every `result.json` below `dir`, one row per (instance size,
/// K, Ω, scheme).
pub fn report_rows(records: &[RunRecord]) -> Vec<ReportRow> {
    let mut groups: BTreeMap<(String, usize, String, String), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        let parsed = r.scheme.as_deref().and_then(|s| s.parse::<PartitionScheme>().ok());
        let scheme = parsed.map_or_else(|| "-".to_string(), |p| p.kind.to_string());
        let k = parsed.map_or(r.groups, |p| p.k);
        groups.entry((r.instance_label.clone(), k, r.config.omega.label(), scheme)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((instance, groups, omega, scheme), runs)| {
            let count = runs.len();
            let mean = |f: &dyn Fn(&RunRecord) -> f64| runs.iter().map(|r| f(r)).sum::<f64>() / count as f64;
            let s = |r: &RunRecord| r.summary.distinct_solutions;
            ReportRow {
                instance,
                groups,
                omega,
                scheme,
                runs: count,
                t_bar: mean(&|r| r.result.timing.total_seconds),
                t_hat: runs.iter().map(|r| r.result.timing.total_seconds).fold(0.0, f64::max),
                s_min: runs.iter().map(|r| s(r)).min().unwrap_or(0),
                s_bar: mean(&|r| s(r) as f64),
                s_hat: runs.iter().map(|r| s(r)).max().unwrap_or(0),
                eps_bar: mean(&|r| r.summary.first_bound_percent.unwrap_or(0.0)),
            }
        })
        .collect()
}

/// CSV report over the results found below `dir`.
pub fn cmd_report(dir: &Path) -> Result<String> {
    let mut paths = Vec::new();
    collect_results(dir, &mut paths)?;
    if paths.is_empty() {
        return Err(Error::InvalidArgument(format!("no {RESULT_FILE} below {}", dir.display())));
    }
    let records = paths.iter().map(|p| read_json::<RunRecord>(p)).collect::<Result<Vec<_>>>()?;
    let mut csv = String::from(REPORT_HEADER);
    csv.push('\n');
    for row in report_rows(&records) {
        csv.push_str(&row.to_csv());
        csv.push('\n');
    }
    Ok(csv)
}

/// `value` with every `timing` and `elapsed_seconds` field removed.
pub fn strip_timing(mut value: serde_json::Value) -> serde_json::Value {
    fn walk(v: &mut serde_json::Value) {
        match v {
            serde_json::Value::Object(map) => {
                map.remove("timing");
                map.remove("elapsed_seconds");
                map.values_mut().for_each(walk);
            }
            serde_json::Value::Array(items) => items.iter_mut().for_each(walk),
            _ => {}
        }
    }
    walk(&mut value);
    value
}

// ------------------------------------------------------------- arguments

#[derive(Debug, Parser)]
#[command(name = "mprs", version, about = "Multiparametric robust solution sets for 0-1 problems")]
pub struct Cli {
    /// Solver backend.
    #[arg(long, global = true, env = "MPRS_SOLVER", default_value = "bundled")]
    pub solver: String,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a random or toy instance.
    Generate(GenerateArgs),
    /// Run A-Q on one or more instances.
    Run(RunArgs),
    /// Pick the best stored solution for a scenario.
    Evaluate(EvaluateArgs),
    /// Check a stored solution set against independently computed optima.
    Verify(VerifyArgs),
    /// Aggregate the results below a directory into CSV.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(subcommand)]
    pub family: Family,
}

#[derive(Debug, Subcommand)]
pub enum Family {
    /// Euclidean shortest path.
    Sp {
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        partition: PartitionArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// (l,p)-medians.
    Plm {
        #[arg(long)]
        l: usize,
        /// Defaults to max(1, l / 10).
        #[arg(long)]
        p: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        partition: PartitionArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// The one-hot toy family.
    Toy {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Args)]
pub struct PartitionArgs {
    /// Partition scheme: r, p, d (shortest path) or lo, g (medians).
    #[arg(long)]
    pub scheme: Option<String>,
    /// Number of groups.
    #[arg(short = 'K', long = "groups", default_value_t = 1)]
    pub groups: usize,
    /// Seed of the random schemes.
    #[arg(long, default_value_t = 0)]
    pub scheme_seed: u64,
}

impl PartitionArgs {
    fn scheme(&self) -> Result<Option<PartitionScheme>> {
        self.scheme
            .as_deref()
            .map(|s| Ok(PartitionScheme { kind: s.parse::<SchemeKind>()?, k: self.groups, seed: self.scheme_seed }))
            .transpose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OmegaKind {
    Interval,
    Segment,
    Budgeted,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Instance files.
    #[arg(required = true)]
    pub instances: Vec<PathBuf>,
    #[command(flatten)]
    pub partition: PartitionArgs,
    #[arg(long, value_enum, default_value = "interval")]
    pub omega: OmegaKind,
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub alpha_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha_max: f64,
    /// Segment direction multiplier (1 for shortest path, l² for medians by default).
    #[arg(long)]
    pub segment_scale: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub beta1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta2: f64,
    /// Explicit interval lower bounds (one value is broadcast); requires --upper.
    #[arg(long, value_delimiter = ',', requires = "upper")]
    pub lower: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', requires = "lower")]
    pub upper: Option<Vec<f64>>,
    /// Ω from a JSON file, overriding the other Ω flags.
    #[arg(long)]
    pub omega_file: Option<PathBuf>,
    /// Absolute ε.
    #[arg(long, conflicts_with = "relative")]
    pub epsilon: Option<f64>,
    /// ε as a percentage of v(R(Γ_init)).
    #[arg(long, default_value_t = 1.0)]
    pub relative: f64,
    #[arg(long, default_value = "standard")]
    pub mode: RobustMode,
    #[arg(long, value_enum, default_value = "specialized")]
    pub formulation: FormulationArg,
    #[arg(long, default_value_t = 500)]
    pub max_iterations: usize,
    /// Seconds; 0 disables the limit.
    #[arg(long, default_value_t = 3600.0)]
    pub time_limit: f64,
    /// Output directory; one subdirectory per instance when several are given.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub export_mps: bool,
    /// Parallel runs.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormulationArg {
    Specialized,
    General,
}

impl From<FormulationArg> for QFormulation {
    fn from(f: FormulationArg) -> Self {
        match f {
            FormulationArg::Specialized => QFormulation::Specialized,
            FormulationArg::General => QFormulation::General,
        }
    }
}

impl RunArgs {
    fn omega_choice(&self) -> Result<OmegaChoice> {
        if let Some(path) = &self.omega_file {
            return Ok(OmegaChoice::Explicit(read_json(path)?));
        }
        if let (Some(lower), Some(upper)) = (&self.lower, &self.upper) {
            return Ok(OmegaChoice::Box { lower: lower.clone(), upper: upper.clone() });
        }
        Ok(OmegaChoice::Generated(match self.omega {
            OmegaKind::Interval => OmegaParams::Interval { delta: self.delta },
            OmegaKind::Segment => {
                OmegaParams::Segment { alpha_min: self.alpha_min, alpha_max: self.alpha_max, scale: self.segment_scale }
            }
            OmegaKind::Budgeted => OmegaParams::Budgeted { beta1: self.beta1, beta2: self.beta2, delta: self.delta },
        }))
    }

    pub fn configs(&self) -> Result<Vec<RunConfig>> {
        let omega = self.omega_choice()?;
        let partition = self.partition.scheme()?;
        let many = self.instances.len() > 1;
        self.instances
            .iter()
            .map(|path| {
                let output = if many {
                    let stem = path
                        .file_stem()
                        .ok_or_else(|| Error::InvalidArgument(format!("bad path {}", path.display())))?;
                    self.out.join(stem)
                } else {
                    self.out.clone()
                };
                Ok(RunConfig {
                    instance: path.clone(),
                    partition,
                    omega: omega.clone(),
                    epsilon: match self.epsilon {
                        Some(e) => Epsilon::Absolute(e),
                        None => Epsilon::RelativePercent(self.relative),
                    },
                    mode: self.mode,
                    formulation: self.formulation.into(),
                    max_iterations: self.max_iterations,
                    time_limit_seconds: (self.time_limit > 0.0).then_some(self.time_limit),
                    output,
                    export_mps: self.export_mps,
                })
            })
            .collect()
    }
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    pub result: PathBuf,
    /// Instance file; defaults to the one stored next to the result.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Realized budget vector (one value is broadcast).
    #[arg(long, value_delimiter = ',', conflicts_with = "cost", required_unless_present = "cost")]
    pub gamma: Option<Vec<f64>>,
    /// Realized cost vector.
    #[arg(long, value_delimiter = ',')]
    pub cost: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub result: PathBuf,
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Grid points per Ω dimension.
    #[arg(long, default_value_t = 5)]
    pub grid: usize,
    /// Extra uniform samples.
    #[arg(long, default_value_t = 0)]
    pub uniform: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    pub dir: PathBuf,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn load_record(path: &Path, instance: Option<&Path>) -> Result<(RunRecord, Instance)> {
    let record: RunRecord = read_json(path)?;
    let inst_path = match instance {
        Some(p) => p.to_path_buf(),
        None => path.parent().unwrap_or(Path::new(".")).join(INSTANCE_FILE),
    };
    let inst = read_json(&inst_path)?;
    Ok((record, inst))
}

fn execute(cli: Cli) -> Result<i32> {
    let solver = SolverContext::new(SolverConfig { backend: cli.solver.clone(), ..SolverConfig::default() })?;
    match cli.command {
        Command::Generate(args) => {
            let (spec, partition, out) = match args.family {
                Family::Sp { nodes, seed, partition, out } => {
                    (GenerateSpec::Sp(SpParams { nodes, seed }), partition.scheme()?, out)
                }
                Family::Plm { l, p, seed, partition, out } => {
                    let params = match p {
                        Some(p) => PlmParams { l, p, seed },
                        None => PlmParams::with_default_p(l, seed),
                    };
                    (GenerateSpec::Plm(params), partition.scheme()?, out)
                }
                Family::Toy { n, out } => (GenerateSpec::Toy { n }, None, out),
            };
            let inst = cmd_generate(spec, partition, &out)?;
            println!("{}: n={} K={} -> {}", instance_label(&inst), inst.n(), inst.num_groups(), out.display());
            Ok(EXIT_OK)
        }
        Command::Run(args) => {
            let configs = args.configs()?;
            let mut code = EXIT_OK;
            for (config, outcome) in configs.iter().zip(run_many(&configs, args.jobs, &solver)) {
                match outcome {
                    Ok(rec) => {
                        println!(
                            "{}: r={} s={} first_bound={:.1}% t={:.2}s {:?} -> {}",
                            config.instance.display(),
                            rec.summary.iterations,
                            rec.summary.distinct_solutions,
                            rec.summary.first_bound_percent.unwrap_or(0.0),
                            rec.result.timing.total_seconds,
                            rec.summary.stop_reason,
                            config.output.display()
                        );
                        if rec.summary.stop_reason == StopReason::BudgetExceeded {
                            code = code.max(EXIT_BUDGET);
                        }
                    }
                    Err(e) => {
                        eprintln!("{}: {e}", config.instance.display());
                        code = code.max(exit_code(&e));
                    }
                }
            }
            Ok(code)
        }
        Command::Evaluate(args) => {
            let (record, inst) = load_record(&args.result, args.instance.as_deref())?;
            let scenario = match (args.gamma, args.cost) {
                (Some(g), _) if g.len() == 1 => Scenario::Gamma(vec![g[0]; inst.num_groups()]),
                (Some(g), _) => Scenario::Gamma(g),
                (None, Some(c)) => Scenario::Cost(c),
                (None, None) => return Err(Error::InvalidArgument("give --gamma or --cost".into())),
            };
            println!("{}", to_canonical_line(&cmd_evaluate(&record, &inst, &scenario)?)?);
            Ok(EXIT_OK)
        }
        Command::Verify(args) => {
            let (record, inst) = load_record(&args.result, args.instance.as_deref())?;
            let options = VerifyOptions { grid: args.grid, uniform: args.uniform, seed: args.seed };
            let report = cmd_verify(&record, &inst, &options, &solver)?;
            println!("{}", to_canonical_line(&report)?);
            Ok(if report.passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
        Command::Report(args) => {
            let csv = cmd_report(&args.dir)?;
            match args.out {
                Some(path) => fs::write(path, csv)?,
                None => print!("{csv}"),
            }
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_BAD_INPUT } else { EXIT_OK };
        }
    };
    execute(cli).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        exit_code(&e)
    })
}
