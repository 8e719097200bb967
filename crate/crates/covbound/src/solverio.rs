//! Driving an SDPA-compatible solver and turning its optimum into a bound.

use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use covbound_core::{BigInt, BigRational, ObjectiveKind, SdpProblem};
use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::sdpa::{self, parse_decimal, render_decimal};

/// Version of the JSON and CSV result layouts.
pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable naming the default solver command.
pub const SOLVER_ENV: &str = "COVBOUND_SOLVER";

/// Name of the bundled solver binary.
pub const BUNDLED_SOLVER: &str = "covbound-sdpa";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverStatus {
    Optimal,
    NearOptimal,
    Infeasible,
    Unbounded,
    SolverError,
}

impl SolverStatus {
    pub fn name(&self) -> &'static str {
        match self {
            SolverStatus::Optimal => "optimal",
            SolverStatus::NearOptimal => "nearOptimal",
            SolverStatus::Infeasible => "infeasible",
            SolverStatus::Unbounded => "unbounded",
            SolverStatus::SolverError => "solverError",
        }
    }

    /// Maps an SDPA `phase.value`.
    pub fn from_phase(phase: &str) -> Self {
        match phase {
            "pdOPT" => SolverStatus::Optimal,
            "pdFEAS" => SolverStatus::NearOptimal,
            "pINF_dFEAS" | "pdINF" | "dUNBD" => SolverStatus::Infeasible,
            "pFEAS_dINF" | "pUNBD" => SolverStatus::Unbounded,
            _ => SolverStatus::SolverError,
        }
    }

    pub fn is_usable(&self) -> bool {
        matches!(self, SolverStatus::Optimal | SolverStatus::NearOptimal)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverReport {
    pub primal_objective: Option<BigRational>,
    pub dual_objective: Option<BigRational>,
    pub status: SolverStatus,
    pub raw_log_path: Option<PathBuf>,
    pub wall_time: f64,
    pub diagnostic: Option<String>,
}

impl SolverReport {
    pub fn error(diagnostic: impl Into<String>) -> Self {
        SolverReport {
            primal_objective: None,
            dual_objective: None,
            status: SolverStatus::SolverError,
            raw_log_path: None,
            wall_time: 0.0,
            diagnostic: Some(diagnostic.into()),
        }
    }

    /// `|primal - dual| / max(1, |primal|)`.
    pub fn relative_gap(&self) -> Option<BigRational> {
        let (p, d) = (self.primal_objective.as_ref()?, self.dual_objective.as_ref()?);
        let scale = p.abs().max(BigRational::one());
        Some((p - d).abs() / scale)
    }
}

#[derive(Debug, Error)]
pub enum SolverIoError {
    #[error("solver status {} cannot be turned into a bound", .0.name())]
    NotOptimal(SolverStatus),
    #[error("solver report carries no objective value")]
    MissingObjective,
    #[error("assignment has {found} values, problem has {expected} variables")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Extracts `phase.value`, `objValPrimal` and `objValDual` from solver output.
pub fn parse_solver_output(log: &str) -> SolverReport {
    let mut phase = None;
    let mut primal = None;
    let mut dual = None;
    for line in log.lines() {
        let Some((key, value)) = line.split_once('=') else { continue };
        let key = key.trim();
        let value = value.split_whitespace().next().unwrap_or("");
        match key {
            "phase.value" => phase = Some(value.to_string()),
            "objValPrimal" | "objValDual" => match parse_decimal(value) {
                Some(v) if key == "objValPrimal" => primal = Some(v),
                Some(v) => dual = Some(v),
                None => return SolverReport::error(format!("unparseable objective line: {:?}", line.trim())),
            },
            _ => {}
        }
    }
    let last = log.lines().rev().find(|l| !l.trim().is_empty()).unwrap_or("").trim();
    let Some(phase) = phase else {
        return SolverReport::error(format!("no phase.value in solver output; last line: {last:?}"));
    };
    let status = SolverStatus::from_phase(&phase);
    if status.is_usable() && (primal.is_none() || dual.is_none()) {
        return SolverReport::error(format!("solver output lacks objective values; last line: {last:?}"));
    }
    SolverReport {
        primal_objective: primal,
        dual_objective: dual,
        status,
        raw_log_path: None,
        wall_time: 0.0,
        diagnostic: (status == SolverStatus::SolverError).then(|| format!("solver phase {phase}")),
    }
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Program followed by fixed leading arguments.
    pub command: Vec<String>,
    pub param_file: Option<PathBuf>,
    pub timeout: Duration,
    /// An `optimal` report with a larger relative gap is downgraded to `nearOptimal`.
    pub gap_tolerance: f64,
}

impl SolverConfig {
    pub fn new(command: Vec<String>) -> Self {
        SolverConfig { command, param_file: None, timeout: Duration::from_secs(7200), gap_tolerance: 1e-6 }
    }
}

/// Solver command from an explicit flag, then the environment, then the
/// bundled binary next to the running executable, then `PATH`.
pub fn resolve_solver(explicit: Option<&str>) -> Vec<String> {
    let split = |s: &str| s.split_whitespace().map(str::to_string).collect::<Vec<_>>();
    if let Some(cmd) = explicit.filter(|s| !s.trim().is_empty()) {
        return split(cmd);
    }
    if let Ok(cmd) = std::env::var(SOLVER_ENV) {
        if !cmd.trim().is_empty() {
            return split(&cmd);
        }
    }
    if let Ok(exe) = std::env::current_exe() {
        let name = format!("{BUNDLED_SOLVER}{}", std::env::consts::EXE_SUFFIX);
        let mut dir = exe.parent();
        for _ in 0..2 {
            let Some(d) = dir else { break };
            let candidate = d.join(&name);
            if candidate.is_file() {
                return vec![candidate.to_string_lossy().into_owned()];
            }
            dir = d.parent();
        }
    }
    vec![BUNDLED_SOLVER.to_string()]
}

/// Runs the solver on an SDPA file. Output goes to `<problem>.out`, the
/// captured console log to `<problem>.log`.
pub fn invoke_solver(problem_path: &Path, config: &SolverConfig) -> SolverReport {
    let start = Instant::now();
    let out_path = problem_path.with_extension("out");
    let log_path = problem_path.with_extension("log");
    let finish = |mut report: SolverReport| {
        report.raw_log_path = Some(log_path.clone());
        report.wall_time = start.elapsed().as_secs_f64();
        report
    };
    let Some((program, args)) = config.command.split_first() else {
        return finish(SolverReport::error("empty solver command"));
    };
    let log = match File::create(&log_path).and_then(|f| Ok((f.try_clone()?, f))) {
        Ok(pair) => pair,
        Err(e) => return finish(SolverReport::error(format!("cannot create log {}: {e}", log_path.display()))),
    };
    let _ = std::fs::remove_file(&out_path);
    let mut cmd = Command::new(program);
    cmd.args(args).arg("-ds").arg(problem_path).arg("-o").arg(&out_path);
    if let Some(p) = &config.param_file {
        cmd.arg("-p").arg(p);
    }
    cmd.stdin(Stdio::null()).stdout(Stdio::from(log.0)).stderr(Stdio::from(log.1));
    let mut child = match cmd.spawn() {
        Ok(c) => c,
        Err(e) => return finish(SolverReport::error(format!("cannot start solver {program:?}: {e}"))),
    };
    let mut pause = Duration::from_millis(2);
    let status = loop {
        if start.elapsed() >= config.timeout {
            let _ = child.kill();
            let _ = child.wait();
            return finish(SolverReport::error(format!("timeout after {:.3} s", config.timeout.as_secs_f64())));
        }
        match child.try_wait() {
            Ok(Some(status)) => break status,
            Ok(None) => {
                std::thread::sleep(pause.min(config.timeout.saturating_sub(start.elapsed())));
                pause = (pause * 2).min(Duration::from_millis(100));
            }
            Err(e) => return finish(SolverReport::error(format!("waiting for solver failed: {e}"))),
        }
    };
    if !status.success() {
        return finish(SolverReport::error(format!("solver exited with {status}")));
    }
    let text = std::fs::read_to_string(&out_path).or_else(|_| std::fs::read_to_string(&log_path)).unwrap_or_default();
    let mut report = parse_solver_output(&text);
    if report.status == SolverStatus::Optimal {
        let gap = report.relative_gap().and_then(|g| g.to_f64()).unwrap_or(f64::INFINITY);
        if gap > config.gap_tolerance {
            report.status = SolverStatus::NearOptimal;
        }
    }
    finish(report)
}

/// Writes `problem` next to `path` and solves it.
pub fn solve_problem(problem: &SdpProblem, path: &Path, digits: usize, config: &SolverConfig) -> Result<SolverReport, SolverIoError> {
    sdpa::write_sdpa_sparse(problem, path, digits)?;
    Ok(invoke_solver(path, config))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundResult {
    pub q: usize,
    pub n: usize,
    pub r: usize,
    pub objective_kind: ObjectiveKind,
    pub inequalities: Vec<String>,
    pub raw_value: BigRational,
    pub root_value: f64,
    pub integer_bound: BigInt,
    pub safety_margin: BigRational,
    pub status: SolverStatus,
    pub wall_time: f64,
}

impl BoundResult {
    pub fn to_json(&self) -> Value {
        json!({
            "schemaVersion": SCHEMA_VERSION,
            "q": self.q,
            "n": self.n,
            "r": self.r,
            "inequalities": self.inequalities,
            "objectiveKind": self.objective_kind.name(),
            "rawValue": render_decimal(&self.raw_value, 30),
            "rootValue": self.root_value,
            "integerBound": self.integer_bound.to_u64().map(Value::from).unwrap_or_else(|| Value::from(self.integer_bound.to_string())),
            "safetyMargin": render_decimal(&self.safety_margin, 30),
            "status": self.status.name(),
            "wallTime": self.wall_time,
        })
    }
}

/// The default safety margin, `10^-4`.
pub fn default_margin() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(10_000))
}

/// `q^scale_power · max(value, 0)`, its `e`-th root, and `⌈root - margin⌉`.
pub fn finalize_bound(report: &SolverReport, problem: &SdpProblem, margin: &BigRational) -> Result<BoundResult, SolverIoError> {
    if !report.status.is_usable() {
        return Err(SolverIoError::NotOptimal(report.status));
    }
    let mut value = match (&report.dual_objective, &report.primal_objective) {
        (Some(d), _) => d.clone(),
        (None, Some(p)) => p.clone(),
        (None, None) => return Err(SolverIoError::MissingObjective),
    };
    if report.status == SolverStatus::NearOptimal {
        if let (Some(p), Some(d)) = (&report.primal_objective, &report.dual_objective) {
            value -= (p - d).abs();
        }
    }
    if value.is_negative() {
        value = BigRational::zero();
    }
    let scale = BigInt::from(problem.q).pow(problem.scale_power as u32);
    let raw = value * BigRational::from_integer(scale);
    let e = problem.exponent();
    Ok(BoundResult {
        q: problem.q,
        n: problem.n,
        r: problem.r,
        objective_kind: problem.kind,
        inequalities: Vec::new(),
        root_value: real_root(&raw, e),
        integer_bound: ceil_root_minus(&raw, e, margin),
        raw_value: raw,
        safety_margin: margin.clone(),
        status: report.status,
        wall_time: report.wall_time,
    })
}

/// `raw^(1/e)` in floating point.
pub fn real_root(raw: &BigRational, e: u32) -> f64 {
    let v = raw.to_f64().unwrap_or(f64::INFINITY);
    match e {
        1 => v,
        2 => v.sqrt(),
        3 => v.cbrt(),
        _ => v.powf(1.0 / e as f64),
    }
}

/// Smallest integer `m ≥ 0` with `(m + margin)^e ≥ raw`, i.e.
/// `max(0, ⌈raw^(1/e) - margin⌉)`, computed exactly.
pub fn ceil_root_minus(raw: &BigRational, e: u32, margin: &BigRational) -> BigInt {
    let holds = |m: &BigInt| {
        let base = BigRational::from_integer(m.clone()) + margin;
        !base.is_negative() && num_traits::pow(base, e as usize) >= *raw
    };
    let guess = (real_root(raw, e) - margin.to_f64().unwrap_or(0.0)).floor() - 1.0;
    let mut m = if guess.is_finite() && guess > 0.0 { BigInt::from(guess as u128) } else { BigInt::zero() };
    while m.is_positive() && holds(&m) {
        m -= 1;
    }
    while !holds(&m) {
        m += 1;
    }
    m
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityReport {
    /// Smallest linear slack and its constraint index.
    pub worst_slack: Option<(BigRational, usize)>,
    /// Smallest block eigenvalue and the block label.
    pub min_eigenvalue: Option<(f64, String)>,
    /// Every block passes the exact semidefiniteness test.
    pub exact_psd: bool,
    pub eigen_tolerance: f64,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        let linear_ok = self.worst_slack.as_ref().is_none_or(|(s, _)| !s.is_negative());
        let psd_ok = self.min_eigenvalue.as_ref().is_none_or(|(v, _)| *v >= -self.eigen_tolerance);
        linear_ok && psd_ok
    }
}

/// Evaluates every constraint of `problem` at `assignment`: linear ones
/// exactly, blocks by a symmetric eigenvalue computation.
pub fn certify_feasibility(problem: &SdpProblem, assignment: &[BigRational], eigen_tolerance: f64) -> Result<FeasibilityReport, SolverIoError> {
    if assignment.len() != problem.num_vars() {
        return Err(SolverIoError::DimensionMismatch { expected: problem.num_vars(), found: assignment.len() });
    }
    let mut worst_slack: Option<(BigRational, usize)> = None;
    for (k, form) in problem.linear.iter().enumerate() {
        let s = form.evaluate(assignment);
        if worst_slack.as_ref().is_none_or(|(w, _)| s < *w) {
            worst_slack = Some((s, k));
        }
    }
    let mut min_eigenvalue: Option<(f64, String)> = None;
    let mut exact_psd = true;
    for block in &problem.blocks {
        let m = block.evaluate(assignment);
        exact_psd &= covbound_core::sdpmodel::is_psd_exact(&m);
        let lo = min_eigenvalue_f64(&m);
        if min_eigenvalue.as_ref().is_none_or(|(w, _)| lo < *w) {
            min_eigenvalue = Some((lo, block.label.clone()));
        }
    }
    Ok(FeasibilityReport { worst_slack, min_eigenvalue, exact_psd, eigen_tolerance })
}

/// Smallest eigenvalue of a symmetric rational matrix.
pub fn min_eigenvalue_f64(m: &[Vec<BigRational>]) -> f64 {
    let d = m.len();
    if d == 0 {
        return f64::INFINITY;
    }
    let dense = DMatrix::from_fn(d, d, |r, c| m[r][c].to_f64().unwrap_or(f64::NAN));
    SymmetricEigen::new(dense).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}
