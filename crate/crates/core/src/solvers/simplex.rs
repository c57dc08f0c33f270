//! Dense two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Bounded variables are shifted to start at zero (finite upper bounds become
//! extra rows) and free variables are split into positive and negative parts,
//! so the tableau only ever sees nonnegative variables. Pivot tie-breaking is
//! lowest column index entering, lowest basis variable index leaving, which
//! makes the returned vertex deterministic.

use super::{LpModel, LpSolution, LpStatus, Relation, FEAS_TOL, PIVOT_TOL};
use crate::error::{Result, SpoError};
use crate::linalg::dot;

const MAX_PIVOTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = offset + x'`
    Shift { col: usize, offset: f64 },
    /// `x = offset - x'`
    Mirror { col: usize, offset: f64 },
    /// `x = x⁺ - x⁻`
    Split { pos: usize, neg: usize },
}

struct StdForm {
    ncols: usize,
    objective: Vec<f64>,
    rows: Vec<(Vec<f64>, Relation, f64)>,
    map: Vec<VarMap>,
}

fn standardize(model: &LpModel) -> StdForm {
    let n = model.num_vars();
    let mut map = Vec::with_capacity(n);
    let mut ncols = 0usize;
    let mut upper_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        match model.bounds[j] {
            (Some(lo), up) => {
                map.push(VarMap::Shift {
                    col: ncols,
                    offset: lo,
                });
                if let Some(u) = up {
                    upper_rows.push((ncols, u - lo));
                }
                ncols += 1;
            }
            (None, Some(u)) => {
                map.push(VarMap::Mirror {
                    col: ncols,
                    offset: u,
                });
                ncols += 1;
            }
            (None, None) => {
                map.push(VarMap::Split {
                    pos: ncols,
                    neg: ncols + 1,
                });
                ncols += 2;
            }
        }
    }

    let expand = |coeffs: &[f64]| -> (Vec<f64>, f64) {
        // Returns the standardized coefficient row and the constant shift
        // that must be subtracted from the right-hand side.
        let mut row = vec![0.0; ncols];
        let mut shift = 0.0;
        for (j, &a) in coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match map[j] {
                VarMap::Shift { col, offset } => {
                    row[col] += a;
                    shift += a * offset;
                }
                VarMap::Mirror { col, offset } => {
                    row[col] -= a;
                    shift += a * offset;
                }
                VarMap::Split { pos, neg } => {
                    row[pos] += a;
                    row[neg] -= a;
                }
            }
        }
        (row, shift)
    };

    let mut rows = Vec::with_capacity(model.constraints.len() + upper_rows.len());
    for c in &model.constraints {
        let (row, shift) = expand(&c.coeffs);
        rows.push((row, c.relation, c.rhs - shift));
    }
    for (col, ub) in upper_rows {
        let mut row = vec![0.0; ncols];
        row[col] = 1.0;
        rows.push((row, Relation::Le, ub));
    }

    let (objective, _) = expand(&model.objective);
    StdForm {
        ncols,
        objective,
        rows,
        map,
    }
}

struct Tableau {
    /// Rows of length `ncols + 1`; the last entry is the right-hand side.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
    nstd: usize,
    art_start: usize,
    pivots: usize,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn assemble(std: &StdForm) -> Tableau {
        let m = std.rows.len();
        // Orient every row to a nonnegative right-hand side first.
        let mut oriented: Vec<(Vec<f64>, Relation, f64)> = std
            .rows
            .iter()
            .map(|(row, rel, rhs)| {
                if *rhs < 0.0 {
                    let flipped = match rel {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (row.iter().map(|v| -v).collect(), flipped, -rhs)
                } else {
                    (row.clone(), *rel, *rhs)
                }
            })
            .collect();

        let n_slack = oriented
            .iter()
            .filter(|(_, rel, _)| *rel != Relation::Eq)
            .count();
        let n_art = oriented
            .iter()
            .filter(|(_, rel, _)| *rel != Relation::Le)
            .count();
        let ncols = std.ncols + n_slack + n_art;
        let art_start = std.ncols + n_slack;

        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut slack_at = std.ncols;
        let mut art_at = art_start;
        for (row, rel, rhs) in oriented.drain(..) {
            let mut full = vec![0.0; ncols + 1];
            full[..std.ncols].copy_from_slice(&row);
            full[ncols] = rhs;
            match rel {
                Relation::Le => {
                    full[slack_at] = 1.0;
                    basis.push(slack_at);
                    slack_at += 1;
                }
                Relation::Ge => {
                    full[slack_at] = -1.0;
                    slack_at += 1;
                    full[art_at] = 1.0;
                    basis.push(art_at);
                    art_at += 1;
                }
                Relation::Eq => {
                    full[art_at] = 1.0;
                    basis.push(art_at);
                    art_at += 1;
                }
            }
            rows.push(full);
        }

        Tableau {
            rows,
            basis,
            ncols,
            nstd: std.ncols,
            art_start,
            pivots: 0,
        }
    }

    fn pivot(&mut self, r: usize, j: usize, cost: &mut [f64]) {
        let piv = self.rows[r][j];
        for v in self.rows[r].iter_mut() {
            *v /= piv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r && row[j] != 0.0 {
                let f = row[j];
                for (a, b) in row.iter_mut().zip(&pivot_row) {
                    *a -= f * b;
                }
                row[j] = 0.0;
            }
        }
        if cost[j] != 0.0 {
            let f = cost[j];
            for (a, b) in cost.iter_mut().zip(&pivot_row) {
                *a -= f * b;
            }
            cost[j] = 0.0;
        }
        self.basis[r] = j;
    }

    /// Bland iteration: lowest eligible entering column, then among the
    /// minimum-ratio rows the one whose basic variable has the lowest index.
    fn run_phase(&mut self, cost: &mut Vec<f64>, allow_artificial: bool) -> Result<PhaseEnd> {
        loop {
            let limit = if allow_artificial {
                self.ncols
            } else {
                self.art_start
            };
            let entering = (0..limit).find(|&j| cost[j] < -PIVOT_TOL);
            let j = match entering {
                Some(j) => j,
                None => return Ok(PhaseEnd::Optimal),
            };
            let mut best: Option<(f64, usize, usize)> = None; // (ratio, basis var, row)
            for (r, row) in self.rows.iter().enumerate() {
                let a = row[j];
                if a > PIVOT_TOL {
                    let ratio = row[self.ncols] / a;
                    let candidate = (ratio, self.basis[r], r);
                    best = match best {
                        None => Some(candidate),
                        Some(cur) => {
                            let tol = 1e-12 * (1.0 + cur.0.abs());
                            if ratio < cur.0 - tol || (ratio <= cur.0 + tol && candidate.1 < cur.1)
                            {
                                Some(candidate)
                            } else {
                                Some(cur)
                            }
                        }
                    };
                }
            }
            let (_, _, r) = match best {
                Some(b) => b,
                None => return Ok(PhaseEnd::Unbounded),
            };
            self.pivot(r, j, cost);
            self.pivots += 1;
            if self.pivots > MAX_PIVOTS {
                return Err(SpoError::IterationLimit(MAX_PIVOTS));
            }
        }
    }

    /// Reduced-cost row for `objective`, with the running objective value in
    /// the right-hand-side slot (negated).
    fn reduced_cost_row(&self, objective: &[f64]) -> Vec<f64> {
        let mut cost = vec![0.0; self.ncols + 1];
        cost[..objective.len()].copy_from_slice(objective);
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                let row = self.rows[r].clone();
                for (a, v) in cost.iter_mut().zip(&row) {
                    *a -= cb * v;
                }
                cost[b] = 0.0;
            }
        }
        cost
    }

    fn phase1(&mut self) -> Result<bool> {
        let mut art_cost = vec![0.0; self.ncols + 1];
        for j in self.art_start..self.ncols {
            art_cost[j] = 1.0;
        }
        let mut cost = art_cost;
        for (r, &b) in self.basis.iter().enumerate() {
            if b >= self.art_start {
                let row = self.rows[r].clone();
                for (a, v) in cost.iter_mut().zip(&row) {
                    *a -= v;
                }
            }
        }
        match self.run_phase(&mut cost, true)? {
            PhaseEnd::Optimal => {}
            PhaseEnd::Unbounded => {
                return Err(SpoError::InternalConsistency(
                    "phase-1 objective is bounded below but reported unbounded".into(),
                ))
            }
        }
        let objective = -cost[self.ncols];
        if objective > FEAS_TOL {
            return Ok(false);
        }
        self.evict_artificials(&mut cost);
        Ok(true)
    }

    /// Pivots basic artificials out on any usable column; rows that offer no
    /// pivot are redundant and get dropped.
    fn evict_artificials(&mut self, cost: &mut Vec<f64>) {
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= self.art_start {
                let col = (0..self.art_start).find(|&j| self.rows[r][j].abs() > PIVOT_TOL);
                match col {
                    Some(j) => {
                        self.pivot(r, j, cost);
                        r += 1;
                    }
                    None => {
                        self.rows.remove(r);
                        self.basis.remove(r);
                    }
                }
            } else {
                r += 1;
            }
        }
    }

    fn primal_std(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.nstd];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.nstd {
                x[b] = self.rows[r][self.ncols];
            }
        }
        x
    }
}

/// Solves `model` to an optimal basic feasible solution, or reports that the
/// program is infeasible or unbounded. Exceeding the pivot budget is an error.
pub fn simplex_solve(model: &LpModel) -> Result<LpSolution> {
    model.validate()?;
    // Contradictory fixed bounds make the program trivially infeasible.
    for (lo, up) in &model.bounds {
        if let (Some(l), Some(u)) = (lo, up) {
            if l > u {
                return Ok(LpSolution {
                    status: LpStatus::Infeasible,
                    primal: Vec::new(),
                    objective_value: f64::NAN,
                });
            }
        }
    }
    let std = standardize(model);
    let mut tab = Tableau::assemble(&std);
    if !tab.phase1()? {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            primal: Vec::new(),
            objective_value: f64::NAN,
        });
    }
    let mut cost = tab.reduced_cost_row(&std.objective);
    match tab.run_phase(&mut cost, false)? {
        PhaseEnd::Unbounded => Ok(LpSolution {
            status: LpStatus::Unbounded,
            primal: Vec::new(),
            objective_value: f64::NAN,
        }),
        PhaseEnd::Optimal => {
            let x_std = tab.primal_std();
            let mut x = vec![0.0; model.num_vars()];
            for (j, vm) in std.map.iter().enumerate() {
                x[j] = match *vm {
                    VarMap::Shift { col, offset } => offset + x_std[col],
                    VarMap::Mirror { col, offset } => offset - x_std[col],
                    VarMap::Split { pos, neg } => x_std[pos] - x_std[neg],
                };
            }
            let objective_value = dot(&model.objective, &x);
            Ok(LpSolution {
                status: LpStatus::Optimal,
                primal: x,
                objective_value,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    fn feasibility_violation(model: &LpModel, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for c in &model.constraints {
            let lhs = dot(&c.coeffs, x);
            let v = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (j, (lo, up)) in model.bounds.iter().enumerate() {
            if let Some(l) = lo {
                worst = worst.max(l - x[j]);
            }
            if let Some(u) = up {
                worst = worst.max(x[j] - u);
            }
        }
        worst
    }

    #[test]
    fn unit_simplex_prefers_lowest_index() {
        let mut lp = LpModel::new(2);
        lp.objective = vec![-1.0, -1.0];
        lp.add_constraint(vec![1.0, 1.0], Relation::Le, 1.0);
        let sol = simplex_solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value + 1.0).abs() < 1e-9);
        assert!((sol.primal[0] - 1.0).abs() < 1e-9);
        assert!(sol.primal[1].abs() < 1e-9);
    }

    #[test]
    fn empty_region_reports_infeasible() {
        let mut lp = LpModel::new(1);
        lp.objective = vec![1.0];
        lp.add_constraint(vec![1.0], Relation::Ge, 3.0);
        lp.add_constraint(vec![1.0], Relation::Le, 2.0);
        let sol = simplex_solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_is_detected() {
        let mut lp = LpModel::new(1);
        lp.objective = vec![-1.0];
        let sol = simplex_solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_and_free_variables() {
        // min x + y  s.t.  x + y = 2, x - y = 0, both free
        let mut lp = LpModel::new(2);
        lp.objective = vec![1.0, 1.0];
        lp.free_all_vars();
        lp.add_constraint(vec![1.0, 1.0], Relation::Eq, 2.0);
        lp.add_constraint(vec![1.0, -1.0], Relation::Eq, 0.0);
        let sol = simplex_solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.primal[0] - 1.0).abs() < 1e-9);
        assert!((sol.primal[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn negative_bounds_are_honored() {
        // min x over -3 <= x <= -1
        let mut lp = LpModel::new(1);
        lp.objective = vec![1.0];
        lp.set_bounds(0, Some(-3.0), Some(-1.0));
        let sol = simplex_solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.primal[0] + 3.0).abs() < 1e-9);
        // max x over the same interval
        let mut lp2 = LpModel::new(1);
        lp2.objective = vec![-1.0];
        lp2.set_bounds(0, Some(-3.0), Some(-1.0));
        let sol2 = simplex_solve(&lp2).unwrap();
        assert!((sol2.primal[0] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn upper_bounded_only_variable() {
        // min -x over x <= 4 with no lower bound: optimum at 4.
        let mut lp = LpModel::new(1);
        lp.objective = vec![-1.0];
        lp.set_bounds(0, None, Some(4.0));
        let sol = simplex_solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.primal[0] - 4.0).abs() < 1e-9);
    }

    #[test]
    fn crossed_fixed_bounds_are_infeasible() {
        let mut lp = LpModel::new(1);
        lp.set_bounds(0, Some(2.0), Some(1.0));
        assert_eq!(simplex_solve(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn solutions_are_feasible_and_consistent() {
        let mut rng = Stream::new(3, "simplex/random");
        for trial in 0..100 {
            let n = 2 + rng.below(4);
            let m = 1 + rng.below(5);
            let mut lp = LpModel::new(n);
            // Keep things bounded with a box.
            for j in 0..n {
                lp.objective[j] = rng.uniform(-2.0, 2.0);
                lp.set_bounds(j, Some(0.0), Some(10.0));
            }
            // Build rows through a known interior point so the program is feasible.
            let x0: Vec<f64> = (0..n).map(|_| rng.uniform(0.0, 5.0)).collect();
            for _ in 0..m {
                let coeffs: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
                let lhs = dot(&coeffs, &x0);
                lp.add_constraint(coeffs, Relation::Le, lhs + rng.uniform(0.0, 2.0));
            }
            let sol = simplex_solve(&lp).unwrap();
            assert_eq!(sol.status, LpStatus::Optimal, "trial {trial}");
            assert!(
                feasibility_violation(&lp, &sol.primal) <= FEAS_TOL,
                "trial {trial}: violation {}",
                feasibility_violation(&lp, &sol.primal)
            );
            let recomputed = dot(&lp.objective, &sol.primal);
            assert!((recomputed - sol.objective_value).abs() <= 1e-9);
            // Weak-duality spot check: the optimum is no worse than random
            // feasible points.
            for _ in 0..100 {
                let cand: Vec<f64> = (0..n).map(|_| rng.uniform(0.0, 10.0)).collect();
                if feasibility_violation(&lp, &cand) <= 0.0 {
                    assert!(sol.objective_value <= dot(&lp.objective, &cand) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn repeated_solves_are_bit_identical() {
        let mut lp = LpModel::new(3);
        lp.objective = vec![1.0, -2.0, 0.5];
        lp.free_all_vars();
        lp.add_constraint(vec![1.0, 1.0, 1.0], Relation::Le, 5.0);
        lp.add_constraint(vec![1.0, -1.0, 0.0], Relation::Ge, -3.0);
        lp.add_constraint(vec![0.0, 1.0, 2.0], Relation::Le, 4.0);
        lp.add_constraint(vec![1.0, 0.0, 0.0], Relation::Ge, -10.0);
        lp.add_constraint(vec![0.0, 0.0, 1.0], Relation::Ge, -10.0);
        let a = simplex_solve(&lp).unwrap();
        let b = simplex_solve(&lp).unwrap();
        assert_eq!(a.status, b.status);
        assert_eq!(
            a.primal.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.primal.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
        assert_eq!(a.objective_value.to_bits(), b.objective_value.to_bits());
    }
}
