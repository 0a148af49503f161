//! Floating-point LPs behind the prover. Their output is only ever a hint:
//! a claim is accepted once an exact certificate checks.

use microlp::{ComparisonOp, OptimizationDirection, Problem, Variable};
use mldr_core::prover::ConeProgram;
use mldr_core::Rational;
use num_traits::ToPrimitive;

use crate::error::{HarnessError, Result};

pub const TOLERANCE: f64 = 1e-7;

/// Approximate multipliers: one per row, one per column.
#[derive(Clone, Debug)]
pub struct DualPoint {
    pub rows: Vec<f64>,
    pub columns: Vec<f64>,
}

/// Minimizer of the claim over the normalized cone.
#[derive(Clone, Debug)]
pub struct PrimalPoint {
    pub value: f64,
    pub x: Vec<f64>,
}

fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Searches for multipliers writing `target` as a cone combination of the
/// program's rows and column bounds. `None` when no such combination exists.
pub fn dual_point(program: &ConeProgram, target: &[Rational]) -> Result<Option<DualPoint>> {
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let cols = program.columns().len();
    let mut by_column: Vec<Vec<(Variable, f64)>> = vec![Vec::new(); cols];
    let mut row_vars = Vec::with_capacity(program.rows().len());
    for row in program.rows() {
        let var = if row.equality {
            problem.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))
        } else {
            problem.add_var(1.0, (0.0, f64::INFINITY))
        };
        for &(c, a) in &row.coeffs {
            by_column[c as usize].push((var, a as f64));
        }
        row_vars.push(var);
    }
    let col_vars: Vec<Variable> = (0..cols).map(|_| problem.add_var(1.0, (0.0, f64::INFINITY))).collect();
    for (c, mut terms) in by_column.into_iter().enumerate() {
        terms.push((col_vars[c], 1.0));
        problem.add_constraint(terms, ComparisonOp::Eq, to_f64(&target[c]));
    }
    match problem.solve() {
        Ok(solution) => Ok(Some(DualPoint {
            rows: row_vars.iter().map(|v| *solution.var_value(*v)).collect(),
            columns: col_vars.iter().map(|v| *solution.var_value(*v)).collect(),
        })),
        Err(microlp::Error::Infeasible) => Ok(None),
        Err(e) => Err(HarnessError::Solver(e.to_string())),
    }
}

/// Minimizes `target · x` over the program's cone cut by `Σ x <= 1`.
pub fn primal_minimum(program: &ConeProgram, target: &[Rational]) -> Result<PrimalPoint> {
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<Variable> = target.iter().map(|t| problem.add_var(to_f64(t), (0.0, f64::INFINITY))).collect();
    for row in program.rows() {
        let terms: Vec<(Variable, f64)> = row.coeffs.iter().map(|&(c, a)| (vars[c as usize], a as f64)).collect();
        let op = if row.equality { ComparisonOp::Eq } else { ComparisonOp::Ge };
        problem.add_constraint(terms, op, 0.0);
    }
    let all: Vec<(Variable, f64)> = vars.iter().map(|&v| (v, 1.0)).collect();
    problem.add_constraint(all, ComparisonOp::Le, 1.0);
    let solution = problem.solve().map_err(|e| HarnessError::Solver(e.to_string()))?;
    Ok(PrimalPoint { value: solution.objective(), x: vars.iter().map(|v| *solution.var_value(*v)).collect() })
}
