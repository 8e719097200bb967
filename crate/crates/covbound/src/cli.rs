//! The `covbound` command line.
//!
//! Exit codes: 0 success, 1 verification failure or unsound batch row,
//! 2 invalid arguments, 3 solver failure.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use covbound_core::inequalities::{sphere_covering, van_wee};
use covbound_core::lpbound::{build_lp, ceil_bound, solve_lp_exact};
use covbound_core::sdpmodel::build_sdp;
use covbound_core::{BigInt, BigRational, InequalitySet, ObjectiveKind, SdpProblem};
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde_json::json;

use crate::fixtures::{classify, Flag, KnownBoundsTable, SHIPPED_CODES};
use crate::formats::{dump_coefficients, load_inequality, render_inequality};
use crate::oracle::{check_coefficients, check_witness, space_size, verify_block_map, CodeWitness, COUNT_CAP};
use crate::sdpa::{parse_decimal, render_decimal, write_sdpa_sparse, DEFAULT_DIGITS};
use crate::solverio::{finalize_bound, invoke_solver, resolve_solver, SolverConfig, SolverReport, SCHEMA_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "covbound", version, about = "Semidefinite and linear programming lower bounds on covering codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build, solve and round the bound for one instance.
    Bound(BoundArgs),
    /// Run a grid of instances and compare with known bounds (CSV output).
    Table(TableArgs),
    /// Run the brute-force verification suites.
    Verify(VerifyArgs),
    /// Print every coefficient used on [q]^n.
    DumpCoefficients {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        n: usize,
    },
    /// Print the linear program or the inequality file for an instance.
    LpDump(LpDumpArgs),
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// Solver command; defaults to $COVBOUND_SOLVER, then the bundled covbound-sdpa.
    #[arg(long)]
    pub solver: Option<String>,
    /// Parameter file handed to the solver with -p.
    #[arg(long)]
    pub param: Option<PathBuf>,
    /// Seconds before the solver is killed.
    #[arg(long, default_value_t = 7200.0)]
    pub timeout: f64,
    /// Significant digits written for each coefficient.
    #[arg(long, default_value_t = DEFAULT_DIGITS)]
    pub digits: usize,
    /// Subtracted from the root before rounding up.
    #[arg(long, default_value = "0.0001")]
    pub margin: String,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[arg(long)]
    pub q: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub r: usize,
    /// Comma list of sphere, vanwee, file:PATH.
    #[arg(long)]
    pub ineq: Option<String>,
    #[arg(long, value_enum, default_value_t = Objective::Triple)]
    pub objective: Objective,
    /// Problem file; defaults to covbound-q<q>-n<n>-r<r>-<objective>.dat-s.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the problem file without solving.
    #[arg(long)]
    pub no_solve: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    /// Alphabet sizes: `3`, `2..4` or `2,3`.
    #[arg(long, default_value = "2")]
    pub q: String,
    #[arg(long)]
    pub n: String,
    #[arg(long, default_value = "1")]
    pub r: String,
    #[arg(long, value_enum, default_value_t = Method::Sdp)]
    pub method: Method,
    #[arg(long, value_enum, default_value_t = Objective::Triple)]
    pub objective: Objective,
    #[arg(long)]
    pub ineq: Option<String>,
    /// Known-bounds CSV; the shipped table when omitted.
    #[arg(long)]
    pub fixtures: Option<PathBuf>,
    /// Concurrent instances.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Directory for problem files; a fresh temporary directory when omitted.
    #[arg(long)]
    pub workdir: Option<PathBuf>,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    #[arg(long, default_value_t = 4)]
    pub qmax: usize,
    #[arg(long, default_value_t = 5)]
    pub nmax: usize,
    /// Length cap for q = 2, which enumerates quickly enough to go further.
    #[arg(long, default_value_t = 6)]
    pub nmax_binary: usize,
    /// Restrict the coefficient and block-map suites to one alphabet size.
    #[arg(long)]
    pub q: Option<usize>,
    /// Restrict the coefficient and block-map suites to one length.
    #[arg(long)]
    pub n: Option<usize>,
    /// Code witness files; the shipped codes when omitted.
    #[arg(long)]
    pub code: Vec<PathBuf>,
    /// Radius for the witness model; the code's covering radius when omitted.
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct LpDumpArgs {
    #[arg(long)]
    pub q: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub ineq: Option<String>,
    #[arg(long, value_enum, default_value_t = DumpFormat::Lp)]
    pub format: DumpFormat,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    Triple,
    Pair,
    Single,
}

impl Objective {
    pub fn kind(self) -> ObjectiveKind {
        match self {
            Objective::Triple => ObjectiveKind::Triple,
            Objective::Pair => ObjectiveKind::Pair,
            Objective::Single => ObjectiveKind::Single,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Sdp,
    Lp,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Coefficients,
    Blockmap,
    Witness,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DumpFormat {
    Lp,
    Ineq,
}

/// Inequality families named by `spec`, or the defaults: sphere covering and
/// van Wee for `q = 2`, sphere covering alone otherwise.
pub fn select_inequalities(q: usize, n: usize, r: usize, spec: Option<&str>) -> Result<(Vec<InequalitySet>, Vec<String>), String> {
    let default = if q == 2 && r < n { "sphere,vanwee" } else { "sphere" };
    let mut sets = Vec::new();
    let mut names = Vec::new();
    for item in spec.unwrap_or(default).split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let set = if item == "sphere" {
            sphere_covering(q, n, r).map_err(|e| e.to_string())?
        } else if item == "vanwee" {
            if q != 2 {
                return Err("the van Wee family is binary only".to_string());
            }
            van_wee(n, r).map_err(|e| e.to_string())?
        } else if let Some(path) = item.strip_prefix("file:") {
            load_inequality(Path::new(path), q, n).map_err(|e| e.to_string())?
        } else {
            return Err(format!("unknown inequality {item:?} (expected sphere, vanwee or file:PATH)"));
        };
        sets.push(set);
        names.push(item.to_string());
    }
    if sets.is_empty() {
        return Err("no inequalities selected".to_string());
    }
    Ok((sets, names))
}

/// Parses `3`, `2..5` (inclusive) or `2,3,7`.
pub fn parse_range(text: &str) -> Result<Vec<usize>, String> {
    let bad = || format!("invalid range {text:?}");
    if let Some((a, b)) = text.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    let mut values: Vec<usize> = text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
    values.sort_unstable();
    values.dedup();
    Ok(values)
}

fn parse_margin(text: &str) -> Result<BigRational, String> {
    let m = parse_decimal(text).ok_or_else(|| format!("invalid margin {text:?}"))?;
    if m.is_negative() {
        return Err("margin must be nonnegative".to_string());
    }
    Ok(m)
}

fn solver_config(args: &SolverArgs) -> Result<SolverConfig, String> {
    if !args.timeout.is_finite() || args.timeout < 0.0 {
        return Err(format!("invalid timeout {}", args.timeout));
    }
    if args.digits == 0 {
        return Err("digits must be positive".to_string());
    }
    let mut config = SolverConfig::new(resolve_solver(args.solver.as_deref()));
    config.param_file = args.param.clone();
    config.timeout = Duration::from_secs_f64(args.timeout);
    Ok(config)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let target: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(target, "{}", e.render());
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    match cli.command {
        Command::Bound(a) => cmd_bound(&a, out, err),
        Command::Table(a) => cmd_table(&a, out, err),
        Command::Verify(a) => cmd_verify(&a, out, err),
        Command::DumpCoefficients { q, n } => {
            if q < 2 || n == 0 {
                let _ = writeln!(err, "need q ≥ 2 and n ≥ 1");
                return EXIT_USAGE;
            }
            let _ = out.write_all(dump_coefficients(q, n).as_bytes());
            EXIT_OK
        }
        Command::LpDump(a) => cmd_lp_dump(&a, out, err),
    }
}

fn usage(err: &mut dyn Write, message: impl std::fmt::Display) -> i32 {
    let _ = writeln!(err, "error: {message}");
    EXIT_USAGE
}

fn check_instance(q: usize, n: usize, r: usize) -> Result<(), String> {
    if q < 2 {
        return Err(format!("q must be at least 2, got {q}"));
    }
    if n == 0 {
        return Err("n must be positive".to_string());
    }
    if r >= n {
        return Err(format!("need r < n, got r={r} n={n}"));
    }
    Ok(())
}

pub fn cmd_bound(args: &BoundArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if let Err(e) = check_instance(args.q, args.n, args.r) {
        return usage(err, e);
    }
    let (ineqs, names) = match select_inequalities(args.q, args.n, args.r, args.ineq.as_deref()) {
        Ok(v) => v,
        Err(e) => return usage(err, e),
    };
    let margin = match parse_margin(&args.solver.margin) {
        Ok(m) => m,
        Err(e) => return usage(err, e),
    };
    let config = match solver_config(&args.solver) {
        Ok(c) => c,
        Err(e) => return usage(err, e),
    };
    let kind = args.objective.kind();
    let problem = match build_sdp(args.q, args.n, args.r, &ineqs, kind) {
        Ok(p) => p,
        Err(e) => return usage(err, e),
    };
    let path = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("covbound-q{}-n{}-r{}-{}.dat-s", args.q, args.n, args.r, kind.name())));
    if let Err(e) = write_sdpa_sparse(&problem, &path, args.solver.digits) {
        let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
        return EXIT_FAILURE;
    }
    if args.no_solve {
        let doc = json!({
            "schemaVersion": SCHEMA_VERSION,
            "q": args.q,
            "n": args.n,
            "r": args.r,
            "inequalities": names,
            "objectiveKind": kind.name(),
            "problemFile": path.display().to_string(),
            "variables": problem.num_vars(),
            "blocks": problem.blocks.len(),
            "linearConstraints": problem.linear.len(),
            "status": "notSolved",
        });
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap_or_default());
        return EXIT_OK;
    }
    let report = invoke_solver(&path, &config);
    match finalize_bound(&report, &problem, &margin) {
        Ok(mut result) => {
            result.inequalities = names;
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&result.to_json()).unwrap_or_default());
            EXIT_OK
        }
        Err(e) => {
            let doc = failure_json(args.q, args.n, args.r, kind, &names, &report, &e.to_string());
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap_or_default());
            let _ = writeln!(err, "error: {e}");
            EXIT_SOLVER
        }
    }
}

fn failure_json(q: usize, n: usize, r: usize, kind: ObjectiveKind, names: &[String], report: &SolverReport, message: &str) -> serde_json::Value {
    json!({
        "schemaVersion": SCHEMA_VERSION,
        "q": q,
        "n": n,
        "r": r,
        "inequalities": names,
        "objectiveKind": kind.name(),
        "status": report.status.name(),
        "diagnostic": report.diagnostic.clone().unwrap_or_else(|| message.to_string()),
        "rawLogPath": report.raw_log_path.as_ref().map(|p| p.display().to_string()),
        "wallTime": report.wall_time,
    })
}

/// One line of `table` output.
#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub q: usize,
    pub n: usize,
    pub r: usize,
    pub method: Method,
    pub objective: String,
    pub raw_value: Option<BigRational>,
    pub root_value: Option<f64>,
    pub bound: Option<BigInt>,
    pub known_lower: Option<u64>,
    pub known_upper: Option<u64>,
    pub flag: Option<Flag>,
    pub wall_time: f64,
    pub error: Option<String>,
}

pub const TABLE_HEADER: [&str; 12] = ["q", "n", "r", "method", "objective", "rawValue", "rootValue", "bound", "knownLower", "knownUpper", "flag", "wallTime"];

impl TableRow {
    fn record(&self) -> Vec<String> {
        let opt = |v: Option<String>| v.unwrap_or_default();
        let flag = match (&self.error, self.flag) {
            (Some(_), _) => "failed".to_string(),
            (None, Some(f)) => f.name().to_string(),
            (None, None) => String::new(),
        };
        vec![
            self.q.to_string(),
            self.n.to_string(),
            self.r.to_string(),
            match self.method {
                Method::Sdp => "sdp".to_string(),
                Method::Lp => "lp".to_string(),
            },
            self.objective.clone(),
            opt(self.raw_value.as_ref().map(|v| render_decimal(v, 20))),
            opt(self.root_value.map(|v| format!("{v:.6}"))),
            opt(self.bound.as_ref().map(|b| b.to_string())),
            opt(self.known_lower.map(|v| v.to_string())),
            opt(self.known_upper.map(|v| v.to_string())),
            flag,
            format!("{:.3}", self.wall_time),
        ]
    }
}

/// Exact LP bound: the best optimum over the selected families.
pub fn lp_bound(q: usize, n: usize, ineqs: &[InequalitySet]) -> Result<BigRational, String> {
    let mut best: Option<BigRational> = None;
    for ineq in ineqs {
        let lp = build_lp(q, n, ineq).map_err(|e| e.to_string())?;
        let sol = solve_lp_exact(&lp).map_err(|e| e.to_string())?;
        if best.as_ref().is_none_or(|b| sol.optimum > *b) {
            best = Some(sol.optimum);
        }
    }
    best.ok_or_else(|| "no inequalities".to_string())
}

/// Settings shared by every instance of a batch.
pub struct BatchSettings<'a> {
    pub method: Method,
    pub kind: ObjectiveKind,
    pub ineq: Option<&'a str>,
    pub digits: usize,
    pub margin: BigRational,
    pub config: SolverConfig,
    pub workdir: PathBuf,
}

pub fn run_instance(q: usize, n: usize, r: usize, settings: &BatchSettings, fixtures: &KnownBoundsTable) -> TableRow {
    let start = Instant::now();
    let fixture = fixtures.get(q, n, r);
    let mut row = TableRow {
        q,
        n,
        r,
        method: settings.method,
        objective: match settings.method {
            Method::Sdp => settings.kind.name().to_string(),
            Method::Lp => String::new(),
        },
        raw_value: None,
        root_value: None,
        bound: None,
        known_lower: fixture.and_then(|f| f.reference_lower()),
        known_upper: fixture.map(|f| f.known_upper),
        flag: None,
        wall_time: 0.0,
        error: None,
    };
    let outcome = (|| -> Result<(), String> {
        let (ineqs, _) = select_inequalities(q, n, r, settings.ineq)?;
        match settings.method {
            Method::Lp => {
                let v = lp_bound(q, n, &ineqs)?;
                row.root_value = v.to_f64();
                row.bound = Some(ceil_bound(&v));
                row.raw_value = Some(v);
            }
            Method::Sdp => {
                let problem: SdpProblem = build_sdp(q, n, r, &ineqs, settings.kind).map_err(|e| e.to_string())?;
                let path = settings.workdir.join(format!("q{q}-n{n}-r{r}-{}.dat-s", settings.kind.name()));
                write_sdpa_sparse(&problem, &path, settings.digits).map_err(|e| format!("{}: {e}", path.display()))?;
                let report = invoke_solver(&path, &settings.config);
                let result = finalize_bound(&report, &problem, &settings.margin)
                    .map_err(|e| format!("{e}{}", report.diagnostic.as_ref().map(|d| format!(": {d}")).unwrap_or_default()))?;
                row.root_value = Some(result.root_value);
                row.bound = Some(result.integer_bound);
                row.raw_value = Some(result.raw_value);
            }
        }
        Ok(())
    })();
    if let Err(e) = outcome {
        row.error = Some(e);
    }
    if let (Some(b), Some(f)) = (&row.bound, fixture) {
        row.flag = classify(b, f);
    }
    row.wall_time = start.elapsed().as_secs_f64();
    row
}

pub fn cmd_table(args: &TableArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let ranges = (parse_range(&args.q), parse_range(&args.n), parse_range(&args.r));
    let (qs, ns, rs) = match ranges {
        (Ok(q), Ok(n), Ok(r)) => (q, n, r),
        (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => return usage(err, e),
    };
    let mut instances = Vec::new();
    for &q in &qs {
        for &n in &ns {
            for &r in &rs {
                if check_instance(q, n, r).is_ok() && r > 0 {
                    instances.push((q, n, r));
                }
            }
        }
    }
    if instances.is_empty() {
        return usage(err, "no valid instances in the requested ranges");
    }
    if args.jobs == 0 {
        return usage(err, "--jobs must be positive");
    }
    let fixtures = match &args.fixtures {
        Some(p) => match KnownBoundsTable::load(p) {
            Ok(t) => t,
            Err(e) => return usage(err, format!("{}: {e}", p.display())),
        },
        None => KnownBoundsTable::shipped(),
    };
    let margin = match parse_margin(&args.solver.margin) {
        Ok(m) => m,
        Err(e) => return usage(err, e),
    };
    let config = match solver_config(&args.solver) {
        Ok(c) => c,
        Err(e) => return usage(err, e),
    };
    let workdir = args.workdir.clone().unwrap_or_else(|| std::env::temp_dir().join(format!("covbound-table-{}", std::process::id())));
    if args.method == Method::Sdp {
        if let Err(e) = std::fs::create_dir_all(&workdir) {
            let _ = writeln!(err, "error: cannot create {}: {e}", workdir.display());
            return EXIT_FAILURE;
        }
    }
    let settings = BatchSettings {
        method: args.method,
        kind: args.objective.kind(),
        ineq: args.ineq.as_deref(),
        digits: args.solver.digits,
        margin,
        config,
        workdir,
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(args.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_FAILURE;
        }
    };
    let rows: Vec<TableRow> = pool.install(|| instances.par_iter().map(|&(q, n, r)| run_instance(q, n, r, &settings, &fixtures)).collect());

    let mut text = format!("# schemaVersion={SCHEMA_VERSION}\n").into_bytes();
    {
        let mut writer = csv::Writer::from_writer(&mut text);
        let _ = writer.write_record(TABLE_HEADER);
        for row in &rows {
            let _ = writer.write_record(row.record());
        }
        let _ = writer.flush();
    }
    let written = match &args.out {
        Some(p) => std::fs::write(p, &text).map_err(|e| format!("{}: {e}", p.display())),
        None => out.write_all(&text).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: {e}");
        return EXIT_FAILURE;
    }
    for row in &rows {
        if let Some(e) = &row.error {
            let _ = writeln!(err, "q={} n={} r={}: {e}", row.q, row.n, row.r);
        }
    }
    if rows.iter().any(|r| r.flag == Some(Flag::Unsound)) {
        EXIT_FAILURE
    } else if rows.iter().any(|r| r.error.is_some()) {
        EXIT_SOLVER
    } else {
        EXIT_OK
    }
}

/// Grid used by the block-map suite when no instance is given.
pub const BLOCKMAP_GRID: [(usize, usize); 5] = [(2, 4), (2, 6), (3, 3), (3, 4), (4, 3)];

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let all = args.suite == Suite::All;
    if all || args.suite == Suite::Coefficients {
        let qs: Vec<usize> = args.q.map(|q| vec![q]).unwrap_or_else(|| (2..=args.qmax).collect());
        for &q in &qs {
            let nmax = if q == 2 { args.nmax_binary.max(args.nmax) } else { args.nmax };
            let ns: Vec<usize> = args.n.map(|n| vec![n]).unwrap_or_else(|| (1..=nmax).collect());
            for &n in &ns {
                if q < 2 || n == 0 {
                    return usage(err, format!("invalid instance q={q} n={n}"));
                }
                if space_size(q, n, COUNT_CAP).is_err() {
                    let _ = writeln!(out, "skip coefficients q={q} n={n}: beyond {COUNT_CAP} words");
                    continue;
                }
                match check_coefficients(q, n, true) {
                    Ok(count) => {
                        let _ = writeln!(out, "pass coefficients q={q} n={n} ({count} values)");
                    }
                    Err(m) => {
                        let _ = writeln!(out, "FAIL coefficients q={q} n={n}: {m}");
                        return EXIT_FAILURE;
                    }
                }
            }
        }
    }
    if all || args.suite == Suite::Blockmap {
        let grid: Vec<(usize, usize)> = match (args.q, args.n) {
            (Some(q), Some(n)) => vec![(q, n)],
            (None, None) => BLOCKMAP_GRID.to_vec(),
            _ => return usage(err, "the block-map suite needs both --q and --n, or neither"),
        };
        for (q, n) in grid {
            match verify_block_map(q, n, args.trials, args.tol, args.seed) {
                Ok(report) if report.passed() => {
                    let worst = report.homomorphism_error.max(report.spectrum_error).max(report.border_error).max(report.identity_error);
                    let _ = writeln!(out, "pass blockmap q={q} n={n} ({} trials, worst error {worst:.2e})", report.trials);
                }
                Ok(report) => {
                    let _ = writeln!(out, "FAIL blockmap q={q} n={n}: {report:?}");
                    return EXIT_FAILURE;
                }
                Err(e) => {
                    let _ = writeln!(out, "FAIL blockmap q={q} n={n}: {e}");
                    return EXIT_FAILURE;
                }
            }
        }
    }
    if all || args.suite == Suite::Witness {
        let mut codes: Vec<(String, String)> = Vec::new();
        if args.code.is_empty() {
            codes.extend(SHIPPED_CODES.iter().map(|(name, text)| (name.to_string(), text.to_string())));
        }
        for path in &args.code {
            match std::fs::read_to_string(path) {
                Ok(text) => codes.push((path.display().to_string(), text)),
                Err(e) => return usage(err, format!("{}: {e}", path.display())),
            }
        }
        for (name, text) in codes {
            let code = match CodeWitness::parse(&text) {
                Ok(c) => c,
                Err(e) => return usage(err, format!("{name}: {e}")),
            };
            let r = args.r;
            let outcome = crate::oracle::covering_radius(&code)
                .map_err(|e| e.to_string())
                .and_then(|radius| select_inequalities(code.q, code.n, r.unwrap_or(radius), None))
                .and_then(|(ineqs, _)| check_witness(&code, r, &ineqs, ObjectiveKind::Triple, 1e-9));
            match outcome {
                Ok(report) if report.passed() => {
                    let eig = report.feasibility.min_eigenvalue.as_ref().map(|(v, _)| *v).unwrap_or(f64::INFINITY);
                    let _ = writeln!(
                        out,
                        "pass witness {name}: {} words, radius {}, feasible (min eigenvalue {eig:.2e}), objective {}",
                        code.len(),
                        report.radius,
                        report.scaled_objective
                    );
                }
                Ok(report) => {
                    let _ = writeln!(
                        out,
                        "FAIL witness {name}: slack {:?}, eigenvalue {:?}, objective {} (expected {})",
                        report.feasibility.worst_slack.as_ref().map(|(s, k)| (s.to_string(), *k)),
                        report.feasibility.min_eigenvalue,
                        report.scaled_objective,
                        report.expected_objective
                    );
                    return EXIT_FAILURE;
                }
                Err(e) => {
                    let _ = writeln!(out, "FAIL witness {name}: {e}");
                    return EXIT_FAILURE;
                }
            }
        }
    }
    EXIT_OK
}

pub fn cmd_lp_dump(args: &LpDumpArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if let Err(e) = check_instance(args.q, args.n, args.r) {
        return usage(err, e);
    }
    let (ineqs, names) = match select_inequalities(args.q, args.n, args.r, args.ineq.as_deref()) {
        Ok(v) => v,
        Err(e) => return usage(err, e),
    };
    for (ineq, name) in ineqs.iter().zip(&names) {
        let text = match args.format {
            DumpFormat::Ineq => render_inequality(args.q, ineq),
            DumpFormat::Lp => match build_lp(args.q, args.n, ineq) {
                Ok(lp) => format!("# {name}\n{}", lp.dump()),
                Err(e) => return usage(err, e),
            },
        };
        let _ = out.write_all(text.as_bytes());
    }
    EXIT_OK
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solverio::default_margin;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("4..7").unwrap(), vec![4, 5, 6, 7]);
        assert_eq!(parse_range("4..=5").unwrap(), vec![4, 5]);
        assert_eq!(parse_range("9,3,3").unwrap(), vec![3, 9]);
        assert!(parse_range("5..4").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn default_families() {
        let (_, names) = select_inequalities(2, 6, 1, None).unwrap();
        assert_eq!(names, ["sphere", "vanwee"]);
        let (_, names) = select_inequalities(3, 6, 1, None).unwrap();
        assert_eq!(names, ["sphere"]);
        assert!(select_inequalities(3, 6, 1, Some("vanwee")).is_err());
        assert!(select_inequalities(2, 6, 1, Some("bogus")).is_err());
    }

    #[test]
    fn lp_rows_need_no_solver() {
        let settings = BatchSettings {
            method: Method::Lp,
            kind: ObjectiveKind::Triple,
            ineq: None,
            digits: DEFAULT_DIGITS,
            margin: default_margin(),
            config: SolverConfig::new(vec!["/nonexistent".into()]),
            workdir: std::env::temp_dir(),
        };
        let row = run_instance(2, 5, 1, &settings, &KnownBoundsTable::shipped());
        assert_eq!(row.error, None);
        // K_2(5,1) = 7, which the linear program does not reach.
        assert_eq!(row.bound, Some(BigInt::from(6)));
        assert_eq!(row.flag, Some(Flag::Below));
    }
}
