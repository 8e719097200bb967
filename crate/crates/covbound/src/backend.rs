//! SDPA-compatible front end for the Clarabel interior-point solver.
//!
//! Used by the bundled `covbound-sdpa` binary so that the tool works without a
//! separately installed SDPA. Arithmetic is double precision.

use std::fmt::Write as _;

use clarabel::algebra::CscMatrix;
use clarabel::solver::{DefaultSettings, DefaultSolver, IPSolver, NonnegativeConeT, PSDTriangleConeT, SolverStatus as ClarabelStatus, SupportedConeT};

use crate::sdpa::SdpaData;

#[derive(Clone, Debug, PartialEq)]
pub struct SolveParams {
    pub max_iteration: u32,
    /// Relative duality-gap and feasibility tolerance.
    pub epsilon_star: f64,
    pub time_limit: f64,
    /// Static regularization of the KKT system. The solver's usual `1e-8`
    /// visibly lowers the optimum on the larger covering instances.
    pub regularization: f64,
    pub verbose: bool,
}

impl Default for SolveParams {
    fn default() -> Self {
        SolveParams { max_iteration: 500, epsilon_star: 1e-9, time_limit: f64::INFINITY, regularization: 1e-12, verbose: false }
    }
}

impl SolveParams {
    /// Reads `maxIteration`, `epsilonStar`, `timeLimit` and `regularization` from either
    /// `key value` lines or SDPA-style `value  type key;` lines. Other knobs
    /// are accepted and ignored.
    pub fn parse(text: &str) -> Self {
        let mut params = SolveParams::default();
        for line in text.lines() {
            let cleaned = line.replace([';', '='], " ");
            let toks: Vec<&str> = cleaned.split_whitespace().collect();
            let value_of = |key: &str| -> Option<f64> {
                let pos = toks.iter().position(|t| *t == key)?;
                let before = toks.first().and_then(|t| t.parse::<f64>().ok()).filter(|_| pos > 0);
                let after = toks.get(pos + 1).and_then(|t| t.parse::<f64>().ok());
                after.or(before)
            };
            if let Some(v) = value_of("maxIteration") {
                params.max_iteration = v as u32;
            }
            if let Some(v) = value_of("epsilonStar") {
                params.epsilon_star = v;
            }
            if let Some(v) = value_of("timeLimit") {
                params.time_limit = v;
            }
            if let Some(v) = value_of("regularization") {
                params.regularization = v;
            }
        }
        params
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOutcome {
    /// SDPA phase name.
    pub phase: &'static str,
    pub primal: f64,
    pub dual: f64,
    pub iterations: u32,
    pub seconds: f64,
}

impl SolveOutcome {
    /// Result text in the layout SDPA writes to its output file.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "\"{} (clarabel backend)", crate::solverio::BUNDLED_SOLVER);
        let _ = writeln!(out, "phase.value  = {}", self.phase);
        let _ = writeln!(out, "   Iteration = {}", self.iterations);
        let _ = writeln!(out, "objValPrimal = {:+.16e}", self.primal);
        let _ = writeln!(out, "objValDual   = {:+.16e}", self.dual);
        let _ = writeln!(out, "total time   = {:.3}", self.seconds);
        out
    }
}

fn phase_of(status: ClarabelStatus) -> &'static str {
    match status {
        ClarabelStatus::Solved => "pdOPT",
        ClarabelStatus::AlmostSolved => "pdFEAS",
        ClarabelStatus::PrimalInfeasible | ClarabelStatus::AlmostPrimalInfeasible => "pINF_dFEAS",
        ClarabelStatus::DualInfeasible | ClarabelStatus::AlmostDualInfeasible => "pFEAS_dINF",
        _ => "noINFO",
    }
}

/// Position of `(row, col)`, `row ≤ col`, in the scaled upper-triangle vector of a block.
fn svec_index(row: usize, col: usize) -> usize {
    col * (col + 1) / 2 + row
}

/// Minimizes `c·x` subject to `Σ F_i x_i - F_0 ⪰ 0` blockwise.
pub fn solve_sdpa(data: &SdpaData<f64>, params: &SolveParams) -> SolveOutcome {
    let mut offsets = Vec::with_capacity(data.block_sizes.len());
    let mut cones: Vec<SupportedConeT<f64>> = Vec::new();
    let mut rows = 0;
    for &size in &data.block_sizes {
        offsets.push(rows);
        let d = size.unsigned_abs() as usize;
        if size > 0 {
            cones.push(PSDTriangleConeT(d));
            rows += d * (d + 1) / 2;
        } else {
            cones.push(NonnegativeConeT(d));
            rows += d;
        }
    }
    // s = b - A x lies in the cone, with s = svec(Σ F_i x_i - F_0).
    let mut b = vec![0.0; rows];
    let (mut ai, mut aj, mut av) = (Vec::new(), Vec::new(), Vec::new());
    for &(var, block, row, col, value) in &data.entries {
        let dense = data.block_sizes[block - 1] > 0;
        let (r, c) = (row - 1, col - 1);
        let (pos, scale) = if dense {
            (offsets[block - 1] + svec_index(r, c), if r == c { 1.0 } else { std::f64::consts::SQRT_2 })
        } else {
            (offsets[block - 1] + r, 1.0)
        };
        if var == 0 {
            b[pos] -= scale * value;
        } else {
            ai.push(pos);
            aj.push(var - 1);
            av.push(-scale * value);
        }
    }
    let n = data.num_vars;
    let a = CscMatrix::new_from_triplets(rows, n, ai, aj, av);
    let p = CscMatrix::<f64>::zeros((n, n));
    let settings = DefaultSettings::<f64> {
        max_iter: params.max_iteration,
        time_limit: params.time_limit,
        verbose: params.verbose,
        tol_gap_abs: params.epsilon_star,
        tol_gap_rel: params.epsilon_star,
        tol_feas: params.epsilon_star,
        static_regularization_constant: params.regularization,
        ..DefaultSettings::default()
    };
    let mut solver = match DefaultSolver::new(&p, &data.objective, &a, &b, &cones, settings) {
        Ok(s) => s,
        Err(_) => return SolveOutcome { phase: "noINFO", primal: f64::NAN, dual: f64::NAN, iterations: 0, seconds: 0.0 },
    };
    solver.solve();
    let sol = &solver.solution;
    SolveOutcome {
        phase: phase_of(sol.status),
        primal: sol.obj_val,
        dual: sol.obj_val_dual,
        iterations: sol.iterations,
        seconds: sol.solve_time,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdpa::parse_sdpa;

    fn parse(text: &str) -> SdpaData<f64> {
        parse_sdpa(text, |s| s.parse::<f64>().ok()).unwrap()
    }

    #[test]
    fn scalar_block() {
        // minimize x subject to [[x]] ⪰ [[1]]
        let out = solve_sdpa(&parse("1\n1\n1\n1\n0 1 1 1 1\n1 1 1 1 1\n"), &SolveParams::default());
        assert_eq!(out.phase, "pdOPT");
        assert!((out.primal - 1.0).abs() < 1e-7);
        assert!((out.dual - 1.0).abs() < 1e-7);
    }

    #[test]
    fn off_diagonal_coupling() {
        // minimize x subject to [[x, 1], [1, x]] ⪰ 0 and x ≥ 0: optimum 1
        let text = "1\n2\n2 -1\n1\n0 1 1 2 -1\n1 1 1 1 1\n1 1 2 2 1\n1 2 1 1 1\n";
        let out = solve_sdpa(&parse(text), &SolveParams::default());
        assert_eq!(out.phase, "pdOPT");
        assert!((out.primal - 1.0).abs() < 1e-6, "{out:?}");
    }

    #[test]
    fn infeasible_and_unbounded() {
        // x ≥ 1 and -x ≥ 0
        let out = solve_sdpa(&parse("1\n1\n-2\n1\n0 1 1 1 1\n1 1 1 1 1\n1 1 2 2 -1\n"), &SolveParams::default());
        assert_eq!(out.phase, "pINF_dFEAS");
        // minimize x with only x ≤ 0
        let out = solve_sdpa(&parse("1\n1\n-1\n1\n1 1 1 1 -1\n"), &SolveParams::default());
        assert_eq!(out.phase, "pFEAS_dINF");
    }

    #[test]
    fn parameter_files() {
        let p = SolveParams::parse("maxIteration 40\nepsilonStar = 1e-6\n");
        assert_eq!(p.max_iteration, 40);
        assert_eq!(p.epsilon_star, 1e-6);
        let p = SolveParams::parse("300    unsigned int maxIteration;\n1.0E-7 double      epsilonStar;\n1.0E4  double lambdaStar;\n");
        assert_eq!(p.max_iteration, 300);
        assert_eq!(p.epsilon_star, 1e-7);
    }
}
