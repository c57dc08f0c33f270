//! Self-contained numerical solvers: a dense two-phase primal simplex for
//! linear programs and a log-barrier Newton method for the quadratically
//! constrained portfolio problem.
//!
//! Solvers are pure functions of their inputs and deterministic: identical
//! inputs give bit-identical outputs.

mod barrier;
mod lp_format;
mod simplex;

pub use barrier::{barrier_solve, barrier_solve_detailed, BarrierSolution};
pub use lp_format::{parse_lp, write_lp};
pub use simplex::simplex_solve;

use crate::error::{Result, SpoError};

/// Pivot threshold: entries at or below this magnitude are treated as zero.
pub const PIVOT_TOL: f64 = 1e-9;
/// Feasibility tolerance for accepting solutions.
pub const FEAS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpConstraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A linear program in minimization form.
///
/// Variables default to the bound `0 <= x`; use [`LpModel::set_bounds`] or
/// [`LpModel::free_all_vars`] to change that.
#[derive(Debug, Clone, PartialEq)]
pub struct LpModel {
    pub objective: Vec<f64>,
    pub constraints: Vec<LpConstraint>,
    /// Per-variable `(lower, upper)`; `None` means unbounded on that side.
    pub bounds: Vec<(Option<f64>, Option<f64>)>,
    pub names: Vec<String>,
}

impl LpModel {
    pub fn new(num_vars: usize) -> LpModel {
        LpModel {
            objective: vec![0.0; num_vars],
            constraints: Vec::new(),
            bounds: vec![(Some(0.0), None); num_vars],
            names: (0..num_vars).map(|j| format!("x{j}")).collect(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(LpConstraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn set_bounds(&mut self, var: usize, lower: Option<f64>, upper: Option<f64>) {
        self.bounds[var] = (lower, upper);
    }

    pub fn set_name(&mut self, var: usize, name: impl Into<String>) {
        self.names[var] = name.into();
    }

    pub fn free_all_vars(&mut self) {
        for b in &mut self.bounds {
            *b = (None, None);
        }
    }

    /// Count of structural nonzeros in the constraint matrix.
    pub fn nonzeros(&self) -> usize {
        self.constraints
            .iter()
            .map(|c| c.coeffs.iter().filter(|&&v| v != 0.0).count())
            .sum()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n || self.names.len() != n {
            return Err(SpoError::InvalidInput(
                "bounds/names length differs from variable count".into(),
            ));
        }
        if !self.objective.iter().all(|v| v.is_finite()) {
            return Err(SpoError::NonFinite("lp objective"));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(SpoError::DimensionMismatch {
                    context: "lp constraint row",
                    expected: n,
                    actual: c.coeffs.len(),
                });
            }
            if !c.rhs.is_finite() || !c.coeffs.iter().all(|v| v.is_finite()) {
                return Err(SpoError::InvalidInput(format!(
                    "constraint {i} has a non-finite entry"
                )));
            }
        }
        for (lo, up) in &self.bounds {
            if lo.map_or(false, |v| !v.is_finite()) || up.map_or(false, |v| !v.is_finite()) {
                return Err(SpoError::InvalidInput(
                    "bounds must be finite or absent".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal values in the original variable space; empty unless optimal.
    pub primal: Vec<f64>,
    /// `objective . primal`; NaN unless optimal.
    pub objective_value: f64,
}
