//! The linear programming bound over distance distributions, solved exactly.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::combinatorics::{intersection_number, krawtchouk, upow};
use crate::inequalities::{InequalityError, InequalitySet};
use crate::linear::{int_rat, LinearForm};

/// `form ≥ rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpConstraint {
    pub form: LinearForm,
    pub rhs: BigRational,
}

/// Minimize `objective` subject to every constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpProblem {
    pub num_vars: usize,
    pub constraints: Vec<LpConstraint>,
    pub objective: LinearForm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub optimum: BigRational,
    pub solution: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpError {
    Infeasible,
    Unbounded,
    VariableOutOfRange { id: usize, num_vars: usize },
    Inequality(InequalityError),
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpError::Infeasible => write!(f, "linear program is infeasible"),
            LpError::Unbounded => write!(f, "linear program is unbounded"),
            LpError::VariableOutOfRange { id, num_vars } => write!(f, "variable {id} out of range ({num_vars} variables)"),
            LpError::Inequality(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for LpError {}

impl From<InequalityError> for LpError {
    fn from(e: InequalityError) -> Self {
        LpError::Inequality(e)
    }
}

/// Builds the LP in `x_0..x_n` (normalized distance distribution): objective
/// `q^n x_0`, nonnegativity, then for each `k` the Krawtchouk row, the
/// inequality row and its complement row.
pub fn build_lp(q: usize, n: usize, ineq: &InequalitySet) -> Result<LpProblem, LpError> {
    ineq.check_length(n)?;
    let lambdas = ineq.lambdas();
    let beta = ineq.beta();
    let mut constraints = Vec::new();
    for i in 0..=n {
        constraints.push(LpConstraint { form: LinearForm::var(i), rhs: BigRational::zero() });
    }
    for k in 0..=n {
        // weight[i] = Σ_j λ_j α_{i,j}^k
        let weight: Vec<BigRational> = (0..=n)
            .map(|i| {
                let mut acc = BigRational::zero();
                for (j, l) in lambdas.iter().enumerate() {
                    if !l.is_zero() {
                        acc += l * int_rat(intersection_number(q as u64, n as u64, k as u64, i as u64, j as u64));
                    }
                }
                acc
            })
            .collect();

        let mut delsarte = LinearForm::zero();
        for i in 0..=n {
            delsarte.add_term(i, int_rat(krawtchouk(q as u64, n as u64, k as u64, i as u64)));
        }
        constraints.push(LpConstraint { form: delsarte, rhs: BigRational::zero() });

        let mut covering = LinearForm::zero();
        for (i, w) in weight.iter().enumerate() {
            covering.add_term(i, w.clone());
        }
        covering.add_term(0, -beta.clone());
        constraints.push(LpConstraint { form: covering, rhs: BigRational::zero() });

        // Σ_i (x_0 - x_i) w_i ≥ β (1 - x_0)
        let mut complement = LinearForm::zero();
        let total: BigRational = weight.iter().cloned().sum();
        complement.add_term(0, total + beta);
        for (i, w) in weight.iter().enumerate() {
            complement.add_term(i, -w.clone());
        }
        constraints.push(LpConstraint { form: complement, rhs: beta.clone() });
    }
    let objective = LinearForm::term(0, int_rat(upow(q as u64, n as u64)));
    Ok(LpProblem { num_vars: n + 1, constraints, objective })
}

impl LpProblem {
    fn check_vars(&self) -> Result<(), LpError> {
        let forms = self.constraints.iter().map(|c| &c.form).chain(core::iter::once(&self.objective));
        for f in forms {
            if let Some(id) = f.max_var() {
                if id >= self.num_vars {
                    return Err(LpError::VariableOutOfRange { id, num_vars: self.num_vars });
                }
            }
        }
        Ok(())
    }

    /// Plain-text dump: `min c_0 … c_{m-1}`, then one `a_0 … a_{m-1} >= b` line per constraint.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let row = |out: &mut String, f: &LinearForm| {
            for id in 0..self.num_vars {
                if id > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{}", f.coeff(id));
            }
        };
        out.push_str("min ");
        row(&mut out, &self.objective);
        out.push('\n');
        for c in &self.constraints {
            row(&mut out, &c.form);
            let _ = writeln!(out, " >= {}", &c.rhs - c.form.constant());
        }
        out
    }
}

/// Exact two-phase simplex with Bland's rule.
///
/// Variables pinned by a constraint `x_k ≥ 0` are treated as sign
/// constrained; every other variable is split into a difference of two
/// nonnegative parts.
pub fn solve_lp_exact(lp: &LpProblem) -> Result<LpSolution, LpError> {
    lp.check_vars()?;
    let m = lp.num_vars;
    let mut nonneg = vec![false; m];
    let mut rows: Vec<&LpConstraint> = Vec::new();
    for c in &lp.constraints {
        let single = c.form.num_terms() == 1 && c.form.constant().is_zero() && c.rhs.is_zero();
        if single {
            let (id, coef) = c.form.terms().next().expect("one term");
            if coef.is_positive() {
                nonneg[id] = true;
                continue;
            }
        }
        rows.push(c);
    }

    // Column layout: structural parts, then one surplus per row, then one artificial per row.
    let mut col_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(m);
    let mut ncols = 0;
    for &nn in &nonneg {
        if nn {
            col_of.push((ncols, None));
            ncols += 1;
        } else {
            col_of.push((ncols, Some(ncols + 1)));
            ncols += 2;
        }
    }
    let nstruct = ncols;
    let nrows = rows.len();
    let surplus0 = nstruct;
    let art0 = nstruct + nrows;
    let width = art0 + nrows;

    let mut tab: Vec<Vec<BigRational>> = Vec::with_capacity(nrows);
    let mut rhs: Vec<BigRational> = Vec::with_capacity(nrows);
    for (r, c) in rows.iter().enumerate() {
        let mut row = vec![BigRational::zero(); width];
        for (id, coef) in c.form.terms() {
            let (pos, neg) = col_of[id];
            row[pos] = coef.clone();
            if let Some(neg) = neg {
                row[neg] = -coef.clone();
            }
        }
        row[surplus0 + r] = -BigRational::one();
        let mut b = &c.rhs - c.form.constant();
        if b.is_negative() {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
            b = -b;
        }
        row[art0 + r] = BigRational::one();
        tab.push(row);
        rhs.push(b);
    }
    let mut basis: Vec<usize> = (0..nrows).map(|r| art0 + r).collect();

    let mut phase1 = vec![BigRational::zero(); width];
    for v in phase1.iter_mut().skip(art0) {
        *v = BigRational::one();
    }
    run_simplex(&mut tab, &mut rhs, &mut basis, &phase1, width)?;
    let infeasibility: BigRational = basis
        .iter()
        .zip(&rhs)
        .filter(|(&b, _)| b >= art0)
        .map(|(_, v)| v.clone())
        .sum();
    if !infeasibility.is_zero() {
        return Err(LpError::Infeasible);
    }
    // Drive zero-level artificials out of the basis where possible.
    for r in 0..nrows {
        if basis[r] < art0 {
            continue;
        }
        if let Some(col) = (0..art0).find(|&c| !tab[r][c].is_zero()) {
            pivot(&mut tab, &mut rhs, &mut basis, r, col);
        }
    }

    let mut cost = vec![BigRational::zero(); width];
    for (id, coef) in lp.objective.terms() {
        let (pos, neg) = col_of[id];
        cost[pos] = coef.clone();
        if let Some(neg) = neg {
            cost[neg] = -coef.clone();
        }
    }
    // Artificials may not re-enter.
    run_simplex(&mut tab, &mut rhs, &mut basis, &cost, art0)?;

    let mut values = vec![BigRational::zero(); width];
    for (r, &b) in basis.iter().enumerate() {
        values[b] = rhs[r].clone();
    }
    let solution: Vec<BigRational> = col_of
        .iter()
        .map(|&(pos, neg)| match neg {
            Some(neg) => &values[pos] - &values[neg],
            None => values[pos].clone(),
        })
        .collect();
    let optimum = lp.objective.evaluate(&solution);
    Ok(LpSolution { optimum, solution })
}

fn pivot(tab: &mut [Vec<BigRational>], rhs: &mut [BigRational], basis: &mut [usize], r: usize, col: usize) {
    let p = tab[r][col].clone();
    for v in tab[r].iter_mut() {
        if !v.is_zero() {
            *v /= &p;
        }
    }
    rhs[r] /= &p;
    let pivot_row = tab[r].clone();
    let pivot_rhs = rhs[r].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i == r || row[col].is_zero() {
            continue;
        }
        let f = row[col].clone();
        for (v, pv) in row.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
        rhs[i] -= &f * &pivot_rhs;
    }
    basis[r] = col;
}

/// Minimizes `cost · z`, letting only columns `< enter_limit` enter the basis.
fn run_simplex(
    tab: &mut [Vec<BigRational>],
    rhs: &mut [BigRational],
    basis: &mut [usize],
    cost: &[BigRational],
    enter_limit: usize,
) -> Result<(), LpError> {
    loop {
        // reduced cost c_j - c_B B^{-1} A_j
        let entering = (0..enter_limit).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let mut red = cost[j].clone();
            for (r, &b) in basis.iter().enumerate() {
                if !cost[b].is_zero() && !tab[r][j].is_zero() {
                    red -= &cost[b] * &tab[r][j];
                }
            }
            red.is_negative()
        });
        let Some(col) = entering else {
            return Ok(());
        };
        let mut best: Option<(BigRational, usize, usize)> = None;
        for (r, row) in tab.iter().enumerate() {
            if !row[col].is_positive() {
                continue;
            }
            let ratio = &rhs[r] / &row[col];
            let better = match &best {
                None => true,
                Some((br, bb, _)) => ratio < *br || (ratio == *br && basis[r] < *bb),
            };
            if better {
                best = Some((ratio, basis[r], r));
            }
        }
        let Some((_, _, r)) = best else {
            return Err(LpError::Unbounded);
        };
        pivot(tab, rhs, basis, r, col);
    }
}

/// Integer bound implied by an exact LP optimum.
pub fn ceil_bound(value: &BigRational) -> BigInt {
    value.ceil().to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequalities::{plain_lower_bound, sphere_covering};
    use crate::linear::rat;

    #[test]
    fn one_variable() {
        let lp = LpProblem {
            num_vars: 1,
            constraints: vec![LpConstraint { form: LinearForm::var(0), rhs: BigRational::new(3.into(), 2.into()) }],
            objective: LinearForm::var(0),
        };
        let sol = solve_lp_exact(&lp).unwrap();
        assert_eq!(sol.optimum, BigRational::new(3.into(), 2.into()));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let infeasible = LpProblem {
            num_vars: 1,
            constraints: vec![
                LpConstraint { form: LinearForm::var(0), rhs: rat(0) },
                LpConstraint { form: LinearForm::term(0, rat(-1)), rhs: rat(1) },
            ],
            objective: LinearForm::var(0),
        };
        assert_eq!(solve_lp_exact(&infeasible), Err(LpError::Infeasible));
        let unbounded = LpProblem {
            num_vars: 1,
            constraints: vec![LpConstraint { form: LinearForm::term(0, rat(-1)), rhs: rat(-5) }],
            objective: LinearForm::var(0),
        };
        assert_eq!(solve_lp_exact(&unbounded), Err(LpError::Unbounded));
    }

    #[test]
    fn free_variable() {
        // minimize x subject to x ≥ -2 (x is free)
        let lp = LpProblem {
            num_vars: 1,
            constraints: vec![LpConstraint { form: LinearForm::var(0), rhs: rat(-2) }],
            objective: LinearForm::var(0),
        };
        assert_eq!(solve_lp_exact(&lp).unwrap().optimum, rat(-2));
    }

    #[test]
    fn constraint_count() {
        let lp = build_lp(2, 3, &sphere_covering(2, 3, 1).unwrap()).unwrap();
        assert_eq!(lp.num_vars, 4);
        assert_eq!(lp.constraints.len(), 16);
    }

    #[test]
    fn whole_space_is_feasible() {
        let (q, n) = (3, 3);
        let lp = build_lp(q, n, &sphere_covering(q, n, 1).unwrap()).unwrap();
        let ones = vec![rat(1); n + 1];
        for c in &lp.constraints {
            assert!(c.form.evaluate(&ones) >= c.rhs);
        }
        assert_eq!(lp.objective.evaluate(&ones), rat(27));
    }

    #[test]
    fn small_optimum() {
        let ineq = sphere_covering(2, 3, 1).unwrap();
        let sol = solve_lp_exact(&build_lp(2, 3, &ineq).unwrap()).unwrap();
        assert!(sol.optimum >= rat(2));
        assert!(sol.optimum >= plain_lower_bound(2, 3, &ineq).unwrap());
        assert_eq!(ceil_bound(&sol.optimum), BigInt::from(2));
    }

    #[test]
    fn dump_layout() {
        let lp = build_lp(2, 1, &sphere_covering(2, 1, 1).unwrap()).unwrap();
        let text = lp.dump();
        assert!(text.starts_with("min 2 0\n"));
        assert_eq!(text.lines().count(), 1 + lp.constraints.len());
    }
}
