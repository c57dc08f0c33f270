//! Log-barrier path-following Newton method for the portfolio problem
//! `min { c . w : w' Sigma w <= gamma, e' w <= 1, w >= 0 }`.
//!
//! Parameters: initial barrier weight 1, multiplied by 10 per outer
//! iteration, backtracking line search with Armijo constant 0.25 and step
//! halving, duality-gap surrogate `m / t <= 1e-9` at termination.
//!
//! The cost vector is normalized by a power of two before the solve, which
//! leaves every floating-point operation bit-identical under cost scalings
//! that are themselves powers of two.

use crate::error::{Result, SpoError};
use crate::linalg::{self, cholesky, cholesky_solve, norm_inf, Mat};
use crate::types::PortfolioRegion;

const GAP_TOL: f64 = 1e-9;
const KKT_TOL: f64 = 1e-8;
const ARMIJO: f64 = 0.25;
const BACKTRACK: f64 = 0.5;
const MAX_LINE_SEARCH: usize = 50;
const MAX_NEWTON: usize = 200;

#[derive(Debug, Clone)]
pub struct BarrierSolution {
    pub w: Vec<f64>,
    /// `c . w` in the original cost scale.
    pub value: f64,
    /// Stationarity residual at termination, measured relative to the
    /// magnitude of the terms entering the stationarity equation, the same
    /// scaling production interior-point codes report. Near degenerate
    /// corners the raw residual is dominated by slack cancellation noise and
    /// would be unattainable in doubles.
    pub kkt_residual: f64,
    /// `m / t` at the final barrier weight.
    pub duality_gap_bound: f64,
    /// `c . w` after each outer centering, in order.
    pub outer_values: Vec<f64>,
    /// Every accepted Newton iterate, when recording was requested.
    pub iterates: Vec<Vec<f64>>,
}

struct Workspace<'a> {
    sigma: &'a Mat,
    gamma: f64,
    c: Vec<f64>,
    d: usize,
}

/// Neumaier-compensated accumulator.
struct Accum {
    sum: f64,
    comp: f64,
}

impl Accum {
    fn new() -> Accum {
        Accum { sum: 0.0, comp: 0.0 }
    }

    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }
}

impl Workspace<'_> {
    /// Constraint slacks, computed with compensated products and sums. At
    /// termination the activity levels sit near `1/t` (about 1e-10), where a
    /// plain `gamma - w'Sw` has lost every significant digit.
    fn slacks(&self, w: &[f64]) -> (f64, f64) {
        let mut quad = Accum::new();
        for i in 0..self.d {
            for j in 0..self.d {
                let a = self.sigma.get(i, j) * w[j];
                let ea = self.sigma.get(i, j).mul_add(w[j], -a);
                let b = a * w[i];
                let eb = a.mul_add(w[i], -b);
                quad.add(b);
                quad.add(eb);
                quad.add(ea * w[i]);
            }
        }
        let s_quad = (self.gamma - quad.sum) - quad.comp;
        let mut sum = Accum::new();
        for &v in w {
            sum.add(v);
        }
        let s_sum = (1.0 - sum.sum) - sum.comp;
        (s_quad, s_sum)
    }

    fn strictly_feasible(&self, w: &[f64]) -> bool {
        if w.iter().any(|&v| v <= 0.0) {
            return false;
        }
        let (s_quad, s_sum) = self.slacks(w);
        s_quad > 0.0 && s_sum > 0.0
    }

    fn objective(&self, t: f64, w: &[f64]) -> f64 {
        let (s_quad, s_sum) = self.slacks(w);
        t * linalg::dot(&self.c, w)
            - s_quad.ln()
            - s_sum.ln()
            - w.iter().map(|v| v.ln()).sum::<f64>()
    }

    fn gradient(&self, t: f64, w: &[f64]) -> Vec<f64> {
        let sv = self.sigma.matvec(w);
        let (s_quad, s_sum) = self.slacks(w);
        (0..self.d)
            .map(|j| t * self.c[j] + 2.0 * sv[j] / s_quad + 1.0 / s_sum - 1.0 / w[j])
            .collect()
    }

    /// Scale for the stationarity residual: the largest term magnitude in
    /// the stationarity equation, floored at `t`.
    fn residual_scale(&self, t: f64, w: &[f64]) -> f64 {
        let sv = self.sigma.matvec(w);
        let (s_quad, s_sum) = self.slacks(w);
        let mut scale = t * norm_inf(&self.c);
        scale += 2.0 * norm_inf(&sv) / s_quad;
        scale += 1.0 / s_sum;
        scale += w.iter().fold(0.0f64, |m, &v| m.max(1.0 / v));
        scale.max(t)
    }

    fn hessian(&self, w: &[f64]) -> Mat {
        let sv = self.sigma.matvec(w);
        let (s_quad, s_sum) = self.slacks(w);
        let mut h = Mat::zeros(self.d, self.d);
        let inv_quad = 1.0 / s_quad;
        let inv_quad2 = inv_quad * inv_quad;
        let inv_sum2 = 1.0 / (s_sum * s_sum);
        for i in 0..self.d {
            for j in 0..self.d {
                let mut v = 2.0 * self.sigma.get(i, j) * inv_quad
                    + 4.0 * sv[i] * sv[j] * inv_quad2
                    + inv_sum2;
                if i == j {
                    v += 1.0 / (w[i] * w[i]);
                }
                h.set(i, j, v);
            }
        }
        h
    }
}

fn starting_point(region: &PortfolioRegion) -> Vec<f64> {
    let d = region.dim();
    let e_sigma_e: f64 = region.sigma().data().iter().sum();
    // rho solves (rho/d)^2 e'Se = gamma/4, capped so e'w stays below one.
    let rho = if e_sigma_e > 0.0 {
        (0.5 * d as f64 * (region.gamma() / e_sigma_e).sqrt()).min(0.5)
    } else {
        0.5
    };
    vec![rho / d as f64; d]
}

/// Normalization factor: the power of two nearest `|c|_inf`, or 1 for zero.
fn pow2_scale(c: &[f64]) -> f64 {
    let m = norm_inf(c);
    if m == 0.0 {
        1.0
    } else {
        f64::exp2(m.log2().round())
    }
}

fn newton_center(
    ws: &Workspace,
    t: f64,
    w: &mut Vec<f64>,
    iterates: &mut Option<&mut Vec<Vec<f64>>>,
) -> Result<f64> {
    let mut last_residual = f64::INFINITY;
    for _ in 0..MAX_NEWTON {
        let g = ws.gradient(t, w);
        last_residual = norm_inf(&g) / ws.residual_scale(t, w);
        // Solve the Newton system in coordinates scaled by w. The scaled
        // Hessian has unit-plus diagonal, so it stays well conditioned even
        // when components of w approach their bounds.
        let scaled_g: Vec<f64> = g.iter().zip(w.iter()).map(|(gi, wi)| gi * wi).collect();
        let h = ws.hessian(w);
        let mut hs = Mat::zeros(ws.d, ws.d);
        for i in 0..ws.d {
            for j in 0..ws.d {
                hs.set(i, j, w[i] * h.get(i, j) * w[j]);
            }
        }
        let l = match cholesky(&hs, 0.0) {
            Some(l) => l,
            None => {
                for i in 0..ws.d {
                    hs.set(i, i, hs.get(i, i) * (1.0 + 1e-12) + 1e-300);
                }
                cholesky(&hs, 0.0).ok_or_else(|| {
                    SpoError::InternalConsistency("barrier Hessian lost definiteness".into())
                })?
            }
        };
        let neg_gs: Vec<f64> = scaled_g.iter().map(|v| -v).collect();
        let y = cholesky_solve(&l, &neg_gs);
        let dw: Vec<f64> = y.iter().zip(w.iter()).map(|(yi, wi)| yi * wi).collect();
        let decrement = (-linalg::dot(&g, &dw)).max(0.0);
        if decrement * 0.5 <= 1e-11 && last_residual <= 0.5 * KKT_TOL {
            return Ok(last_residual);
        }
        // Damped phase: Armijo backtracking. Quadratic phase (small Newton
        // decrement): take the full step, shrinking only to preserve strict
        // feasibility; at large barrier weights the Armijo decrease is below
        // floating-point resolution of the objective.
        let quadratic_zone = decrement.sqrt() <= 0.25;
        let phi0 = ws.objective(t, w);
        let slope = linalg::dot(&g, &dw);
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_LINE_SEARCH {
            let cand: Vec<f64> = w.iter().zip(&dw).map(|(a, b)| a + step * b).collect();
            if ws.strictly_feasible(&cand)
                && (quadratic_zone || ws.objective(t, &cand) <= phi0 + ARMIJO * step * slope)
            {
                *w = cand;
                accepted = true;
                break;
            }
            step *= BACKTRACK;
        }
        if !accepted {
            return Err(SpoError::BarrierDivergence {
                attempts: MAX_LINE_SEARCH,
                last_iterate: w.clone(),
            });
        }
        if let Some(trace) = iterates.as_deref_mut() {
            trace.push(w.clone());
        }
    }
    if last_residual <= KKT_TOL {
        Ok(last_residual)
    } else {
        Err(SpoError::InternalConsistency(format!(
            "barrier centering stalled at residual {last_residual}"
        )))
    }
}

pub fn barrier_solve_detailed(
    region: &PortfolioRegion,
    c: &[f64],
    record_iterates: bool,
) -> Result<BarrierSolution> {
    let d = region.dim();
    if c.len() != d {
        return Err(SpoError::DimensionMismatch {
            context: "barrier cost vector",
            expected: d,
            actual: c.len(),
        });
    }
    if !c.iter().all(|v| v.is_finite()) {
        return Err(SpoError::NonFinite("barrier cost vector"));
    }
    let scale = pow2_scale(c);
    let ws = Workspace {
        sigma: region.sigma(),
        gamma: region.gamma(),
        c: c.iter().map(|v| v / scale).collect(),
        d,
    };
    let m = (d + 2) as f64;
    let mut w = starting_point(region);
    debug_assert!(ws.strictly_feasible(&w));
    let mut iterates = Vec::new();
    let mut outer_values = Vec::new();
    let mut t = 1.0;
    let mut residual;
    loop {
        let mut trace = record_iterates.then_some(&mut iterates);
        residual = newton_center(&ws, t, &mut w, &mut trace)?;
        outer_values.push(linalg::dot(&ws.c, &w) * scale);
        if m / t <= GAP_TOL {
            break;
        }
        t *= 10.0;
    }
    Ok(BarrierSolution {
        value: linalg::dot(c, &w),
        kkt_residual: residual,
        duality_gap_bound: m / t,
        outer_values,
        iterates,
        w,
    })
}

/// Minimizes `c . w` over the region; returns the decision and its value.
pub fn barrier_solve(region: &PortfolioRegion, c: &[f64]) -> Result<(Vec<f64>, f64)> {
    let sol = barrier_solve_detailed(region, c, false)?;
    Ok((sol.w, sol.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    fn random_region(rng: &mut Stream, d: usize) -> PortfolioRegion {
        // Factor model covariance: L L' + diag, scaled to order one.
        let factors = 2;
        let mut l = Mat::zeros(d, factors);
        for i in 0..d {
            for j in 0..factors {
                l.set(i, j, rng.uniform(-0.5, 0.5));
            }
        }
        let mut sigma = Mat::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let mut v = 0.0;
                for k in 0..factors {
                    v += l.get(i, k) * l.get(j, k);
                }
                if i == j {
                    v += 0.05;
                }
                sigma.set(i, j, v);
            }
        }
        // Exact symmetry is required at construction.
        for i in 0..d {
            for j in 0..i {
                let v = sigma.get(i, j);
                sigma.set(j, i, v);
            }
        }
        PortfolioRegion::new(sigma, rng.uniform(0.05, 0.5)).unwrap()
    }

    #[test]
    fn nonnegative_costs_stay_out_of_the_market() {
        let region = PortfolioRegion::new(Mat::identity(3), 1.0).unwrap();
        let (w, value) = barrier_solve(&region, &[1.0, 2.0, 0.5]).unwrap();
        assert!(value.abs() < 1e-6, "value {value}");
        assert!(w.iter().all(|&v| v.abs() < 1e-5), "w {w:?}");
    }

    #[test]
    fn single_profitable_asset_takes_the_whole_budget() {
        let region = PortfolioRegion::new(Mat::identity(2), 1.0).unwrap();
        let (w, value) = barrier_solve(&region, &[-1.0, 0.0]).unwrap();
        assert!((value + 1.0).abs() < 1e-6, "value {value}");
        assert!((w[0] - 1.0).abs() < 1e-4, "w {w:?}");
        assert!(w[1].abs() < 1e-4);
    }

    #[test]
    fn iterates_stay_strictly_feasible_and_outer_values_decrease() {
        let mut rng = Stream::new(5, "barrier/feas");
        for _ in 0..5 {
            let region = random_region(&mut rng, 4);
            let c: Vec<f64> = (0..4).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let sol = barrier_solve_detailed(&region, &c, true).unwrap();
            for w in &sol.iterates {
                assert!(w.iter().all(|&v| v > 0.0));
                assert!(region.violation(w) == 0.0, "violation {}", region.violation(w));
            }
            for pair in sol.outer_values.windows(2) {
                assert!(pair[1] <= pair[0] + 1e-12, "outer values rose: {pair:?}");
            }
            assert!(sol.kkt_residual <= 1e-8);
            assert!(sol.duality_gap_bound <= 1e-9);
        }
    }

    #[test]
    fn repeated_solves_are_bit_identical() {
        let mut rng = Stream::new(9, "barrier/det");
        let region = random_region(&mut rng, 5);
        let c: Vec<f64> = (0..5).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let (w1, v1) = barrier_solve(&region, &c).unwrap();
        let (w2, v2) = barrier_solve(&region, &c).unwrap();
        assert_eq!(v1.to_bits(), v2.to_bits());
        assert_eq!(
            w1.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            w2.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn power_of_two_scalings_return_the_same_decision() {
        let mut rng = Stream::new(10, "barrier/scale");
        let region = random_region(&mut rng, 4);
        let c: Vec<f64> = (0..4).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let (w, _) = barrier_solve(&region, &c).unwrap();
        for alpha in [0.5, 2.0] {
            let scaled: Vec<f64> = c.iter().map(|v| alpha * v).collect();
            let (w_s, _) = barrier_solve(&region, &scaled).unwrap();
            assert_eq!(
                w.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                w_s.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
            );
        }
    }
}
