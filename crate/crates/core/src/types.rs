//! Domain types shared by every other module: cost and feature vectors,
//! datasets, linear prediction models, and feasible-region descriptors.
//!
//! All types are immutable after construction. Oracle caches are filled by
//! a construct-then-freeze step (see `dataset_cache_oracle`), so values can
//! be shared freely across parallel trial workers.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpoError};
use crate::linalg::{self, Mat};
use crate::solvers::{simplex_solve, LpModel, LpStatus, Relation};

fn ensure_finite(values: &[f64], context: &'static str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(SpoError::NonFinite(context))
    }
}

/// Objective coefficients of the nominal problem, one entry per decision
/// coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct CostVector(Vec<f64>);

impl CostVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        ensure_finite(&entries, "cost vector")?;
        Ok(CostVector(entries))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for CostVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Contextual covariates observed before the cost vector is known.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        ensure_finite(&entries, "feature vector")?;
        Ok(FeatureVector(entries))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl std::ops::Index<usize> for FeatureVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// One training pair, optionally carrying the oracle solution for its true
/// cost vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub features: FeatureVector,
    pub cost: CostVector,
    cached_w_star: Option<Vec<f64>>,
    cached_z_star: Option<f64>,
}

impl Sample {
    pub fn new(features: FeatureVector, cost: CostVector) -> Sample {
        Sample {
            features,
            cost,
            cached_w_star: None,
            cached_z_star: None,
        }
    }

    pub fn is_cached(&self) -> bool {
        self.cached_w_star.is_some()
    }

    pub fn cached_w_star(&self) -> Option<&[f64]> {
        self.cached_w_star.as_deref()
    }

    pub fn cached_z_star(&self) -> Option<f64> {
        self.cached_z_star
    }

    pub(crate) fn fill_cache(&mut self, w_star: Vec<f64>, z_star: f64) {
        self.cached_w_star = Some(w_star);
        self.cached_z_star = Some(z_star);
    }
}

/// Paired samples sharing the decision dimension `d` and feature dimension `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<Sample>,
    d: usize,
    p: usize,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>) -> Result<Dataset> {
        let first = samples
            .first()
            .ok_or_else(|| SpoError::InvalidInput("dataset needs at least one sample".into()))?;
        let d = first.cost.dim();
        let p = first.features.dim();
        for (i, s) in samples.iter().enumerate() {
            if s.cost.dim() != d {
                return Err(SpoError::DimensionMismatch {
                    context: "dataset cost entry",
                    expected: d,
                    actual: s.cost.dim(),
                });
            }
            if s.features.dim() != p {
                return Err(SpoError::DimensionMismatch {
                    context: "dataset feature entry",
                    expected: p,
                    actual: s.features.dim(),
                });
            }
            if let (Some(w), Some(z)) = (s.cached_w_star(), s.cached_z_star()) {
                let err = (linalg::dot(s.cost.as_slice(), w) - z).abs();
                if err > 1e-6 {
                    return Err(SpoError::InternalConsistency(format!(
                        "sample {i} cache disagrees with its cost vector by {err}"
                    )));
                }
            }
        }
        Ok(Dataset { samples, d, p })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn sample(&self, i: usize) -> &Sample {
        &self.samples[i]
    }

    pub fn is_cached(&self) -> bool {
        self.samples.iter().all(Sample::is_cached)
    }

    pub(crate) fn samples_mut(&mut self) -> &mut [Sample] {
        &mut self.samples
    }

    /// Splits off the last `n_tail` samples into a second dataset.
    pub fn split_tail(&self, n_tail: usize) -> Result<(Dataset, Dataset)> {
        if n_tail == 0 || n_tail >= self.len() {
            return Err(SpoError::InvalidInput(format!(
                "cannot split {} samples into head plus tail of {n_tail}",
                self.len()
            )));
        }
        let head = self.samples[..self.len() - n_tail].to_vec();
        let tail = self.samples[self.len() - n_tail..].to_vec();
        Ok((Dataset::new(head)?, Dataset::new(tail)?))
    }

    /// Serializes to CSV with header `x_1,...,x_p,c_1,...,c_d`. Cache fields
    /// are runtime state and never written.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        let mut header: Vec<String> = (1..=self.p).map(|j| format!("x_{j}")).collect();
        header.extend((1..=self.d).map(|j| format!("c_{j}")));
        out.push_str(&header.join(","));
        out.push('\n');
        for s in &self.samples {
            let mut fields: Vec<String> =
                s.features.as_slice().iter().map(|v| format!("{v:?}")).collect();
            fields.extend(s.cost.as_slice().iter().map(|v| format!("{v:?}")));
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv_str(text: &str) -> Result<Dataset> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| SpoError::Parse("empty dataset file".into()))?;
        let mut p = 0usize;
        let mut d = 0usize;
        for col in header.split(',') {
            let col = col.trim();
            if let Some(rest) = col.strip_prefix("x_") {
                let idx: usize = rest
                    .parse()
                    .map_err(|_| SpoError::Parse(format!("bad header column {col}")))?;
                p = p.max(idx);
            } else if let Some(rest) = col.strip_prefix("c_") {
                let idx: usize = rest
                    .parse()
                    .map_err(|_| SpoError::Parse(format!("bad header column {col}")))?;
                d = d.max(idx);
            } else {
                return Err(SpoError::Parse(format!("unexpected header column {col}")));
            }
        }
        if d == 0 {
            return Err(SpoError::Parse("header has no cost columns".into()));
        }
        let mut samples = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != p + d {
                return Err(SpoError::Parse(format!(
                    "row {} has {} fields, expected {}",
                    lineno + 2,
                    fields.len(),
                    p + d
                )));
            }
            let parse = |s: &str| -> Result<f64> {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| SpoError::Parse(format!("bad number {s:?} on row {}", lineno + 2)))
            };
            let xs: Vec<f64> = fields[..p].iter().map(|s| parse(s)).collect::<Result<_>>()?;
            let cs: Vec<f64> = fields[p..].iter().map(|s| parse(s)).collect::<Result<_>>()?;
            samples.push(Sample::new(FeatureVector::new(xs)?, CostVector::new(cs)?));
        }
        Dataset::new(samples)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Dataset> {
        Dataset::from_csv_str(&fs::read_to_string(path)?)
    }
}

/// Linear cost predictor: `predict(x) = coeffs * x + intercept`.
///
/// The intercept is stored apart from the coefficient matrix so that
/// regularizers can skip it.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    coeffs: Mat,
    intercept: Vec<f64>,
}

impl LinearModel {
    pub fn new(coeffs: Mat, intercept: Vec<f64>) -> Result<LinearModel> {
        if coeffs.rows() != intercept.len() {
            return Err(SpoError::DimensionMismatch {
                context: "linear model intercept",
                expected: coeffs.rows(),
                actual: intercept.len(),
            });
        }
        if !coeffs.is_finite() {
            return Err(SpoError::NonFinite("linear model coefficients"));
        }
        ensure_finite(&intercept, "linear model intercept")?;
        Ok(LinearModel { coeffs, intercept })
    }

    pub fn zeros(d: usize, p: usize) -> LinearModel {
        LinearModel {
            coeffs: Mat::zeros(d, p),
            intercept: vec![0.0; d],
        }
    }

    pub fn d(&self) -> usize {
        self.coeffs.rows()
    }

    pub fn p(&self) -> usize {
        self.coeffs.cols()
    }

    pub fn coeffs(&self) -> &Mat {
        &self.coeffs
    }

    pub fn intercept(&self) -> &[f64] {
        &self.intercept
    }

    /// Predicted cost vector for features `x`.
    pub fn predict(&self, x: &FeatureVector) -> Result<CostVector> {
        if x.dim() != self.p() {
            return Err(SpoError::DimensionMismatch {
                context: "predict features",
                expected: self.p(),
                actual: x.dim(),
            });
        }
        let mut out = self.coeffs.matvec(x.as_slice());
        for (o, b) in out.iter_mut().zip(&self.intercept) {
            *o += b;
        }
        CostVector::new(out)
    }
}

/// On-disk model document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub d: usize,
    pub p: usize,
    /// Row-major `d x p` coefficient matrix.
    pub coeffs: Vec<f64>,
    pub intercept: Vec<f64>,
    pub method: String,
    pub lambda: Option<f64>,
    pub seed: u64,
}

impl ModelFile {
    pub fn from_model(model: &LinearModel, method: &str, lambda: Option<f64>, seed: u64) -> Self {
        ModelFile {
            d: model.d(),
            p: model.p(),
            coeffs: model.coeffs().data().to_vec(),
            intercept: model.intercept().to_vec(),
            method: method.to_string(),
            lambda,
            seed,
        }
    }

    pub fn into_model(self) -> Result<LinearModel> {
        if self.coeffs.len() != self.d * self.p {
            return Err(SpoError::Parse(format!(
                "model file: coeffs has {} entries, expected {}",
                self.coeffs.len(),
                self.d * self.p
            )));
        }
        if self.intercept.len() != self.d {
            return Err(SpoError::Parse(format!(
                "model file: intercept has {} entries, expected {}",
                self.intercept.len(),
                self.d
            )));
        }
        LinearModel::new(Mat::from_vec(self.d, self.p, self.coeffs), self.intercept)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<ModelFile> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

/// Bounded nonempty feasible set `{w : A w >= b}`.
///
/// Boundedness and nonemptiness are validated eagerly at construction by
/// minimizing and maximizing each coordinate with the LP solver.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    a: Mat,
    b: Vec<f64>,
}

impl Polytope {
    pub fn new(a: Mat, b: Vec<f64>) -> Result<Polytope> {
        if a.rows() != b.len() {
            return Err(SpoError::DimensionMismatch {
                context: "polytope right-hand side",
                expected: a.rows(),
                actual: b.len(),
            });
        }
        if a.cols() == 0 || a.rows() == 0 {
            return Err(SpoError::InvalidInput("polytope needs rows and columns".into()));
        }
        if !a.is_finite() {
            return Err(SpoError::NonFinite("polytope matrix"));
        }
        ensure_finite(&b, "polytope right-hand side")?;
        let poly = Polytope { a, b };
        for j in 0..poly.dim() {
            for sign in [1.0, -1.0] {
                let mut objective = vec![0.0; poly.dim()];
                objective[j] = sign;
                let sol = simplex_solve(&poly.bound_probe(objective))?;
                match sol.status {
                    LpStatus::Optimal => {}
                    LpStatus::Infeasible => {
                        return Err(SpoError::InvalidInput("polytope is empty".into()))
                    }
                    LpStatus::Unbounded => {
                        return Err(SpoError::InvalidInput(format!(
                            "polytope is unbounded in coordinate {j}"
                        )))
                    }
                }
            }
        }
        Ok(poly)
    }

    fn bound_probe(&self, objective: Vec<f64>) -> LpModel {
        let mut lp = LpModel::new(self.dim());
        lp.objective = objective;
        for r in 0..self.a.rows() {
            lp.add_constraint(self.a.row(r).to_vec(), Relation::Ge, self.b[r]);
        }
        lp.free_all_vars();
        lp
    }

    pub fn dim(&self) -> usize {
        self.a.cols()
    }

    pub fn num_rows(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &Mat {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Largest constraint violation of `w`; zero when feasible.
    pub fn violation(&self, w: &[f64]) -> f64 {
        let aw = self.a.matvec(w);
        aw.iter()
            .zip(&self.b)
            .fold(0.0f64, |m, (lhs, rhs)| m.max(rhs - lhs))
            .max(0.0)
    }

    /// Loads a polytope from an A-matrix CSV and a b-vector CSV.
    pub fn from_csv_files(a_path: &Path, b_path: &Path) -> Result<Polytope> {
        let parse_rows = |text: &str| -> Result<Vec<Vec<f64>>> {
            text.lines()
                .filter(|l| !l.trim().is_empty())
                .map(|l| {
                    l.split(',')
                        .map(|f| {
                            f.trim()
                                .parse::<f64>()
                                .map_err(|_| SpoError::Parse(format!("bad number {f:?}")))
                        })
                        .collect()
                })
                .collect()
        };
        let a_rows = parse_rows(&fs::read_to_string(a_path)?)?;
        let b_rows = parse_rows(&fs::read_to_string(b_path)?)?;
        let b: Vec<f64> = b_rows.into_iter().flatten().collect();
        if a_rows.is_empty() {
            return Err(SpoError::Parse("empty polytope matrix".into()));
        }
        let cols = a_rows[0].len();
        if a_rows.iter().any(|r| r.len() != cols) {
            return Err(SpoError::Parse("ragged polytope matrix".into()));
        }
        Polytope::new(Mat::from_rows(&a_rows), b)
    }
}

/// `k x k` grid with east and south arcs, origin at the northwest corner and
/// destination at the southeast corner.
///
/// Nodes are numbered row-major from the origin. Edges are listed per node in
/// row-major order, east arc before south arc, giving `d = 2k(k-1)` edges.
#[derive(Debug, Clone, PartialEq)]
pub struct GridGraph {
    k: usize,
    edges: Vec<(usize, usize)>,
}

impl GridGraph {
    pub fn new(k: usize) -> Result<GridGraph> {
        if k < 2 {
            return Err(SpoError::InvalidInput(format!(
                "grid size must be at least 2, got {k}"
            )));
        }
        let mut edges = Vec::with_capacity(2 * k * (k - 1));
        for row in 0..k {
            for col in 0..k {
                let node = row * k + col;
                if col + 1 < k {
                    edges.push((node, node + 1));
                }
                if row + 1 < k {
                    edges.push((node, node + k));
                }
            }
        }
        Ok(GridGraph { k, edges })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn node_count(&self) -> usize {
        self.k * self.k
    }

    /// Number of edges, i.e. the decision dimension.
    pub fn dim(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn origin(&self) -> usize {
        0
    }

    pub fn destination(&self) -> usize {
        self.node_count() - 1
    }

    /// Unit-flow formulation as `{w : A w >= b}`: conservation equalities
    /// expressed as paired inequalities, then nonnegativity rows.
    pub fn flow_polytope(&self) -> Result<Polytope> {
        let n = self.node_count();
        let d = self.dim();
        let mut rows = Vec::with_capacity(2 * n + d);
        let mut b = Vec::with_capacity(2 * n + d);
        for node in 0..n {
            let mut row = vec![0.0; d];
            for (e, &(tail, head)) in self.edges.iter().enumerate() {
                if tail == node {
                    row[e] = 1.0;
                }
                if head == node {
                    row[e] = -1.0;
                }
            }
            let supply = if node == self.origin() {
                1.0
            } else if node == self.destination() {
                -1.0
            } else {
                0.0
            };
            rows.push(row.clone());
            b.push(supply);
            rows.push(row.into_iter().map(|v| -v).collect());
            b.push(-supply);
        }
        for e in 0..d {
            let mut row = vec![0.0; d];
            row[e] = 1.0;
            rows.push(row);
            b.push(0.0);
        }
        Polytope::new(Mat::from_rows(&rows), b)
    }
}

/// Portfolio feasible set `{w : w' Sigma w <= gamma, e' w <= 1, w >= 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioRegion {
    sigma: Mat,
    gamma: f64,
}

impl PortfolioRegion {
    pub fn new(sigma: Mat, gamma: f64) -> Result<PortfolioRegion> {
        if sigma.rows() != sigma.cols() || sigma.rows() == 0 {
            return Err(SpoError::InvalidInput(format!(
                "covariance must be square and nonempty, got {}x{}",
                sigma.rows(),
                sigma.cols()
            )));
        }
        if !sigma.is_finite() || !gamma.is_finite() {
            return Err(SpoError::NonFinite("portfolio region"));
        }
        if !sigma.is_symmetric_exact() {
            return Err(SpoError::InvalidInput("covariance is not symmetric".into()));
        }
        if !linalg::is_psd(&sigma, 1e-10) {
            return Err(SpoError::InvalidInput(
                "covariance is not positive semidefinite".into(),
            ));
        }
        if gamma <= 0.0 {
            return Err(SpoError::InvalidInput(format!(
                "risk bound must be positive, got {gamma}"
            )));
        }
        Ok(PortfolioRegion { sigma, gamma })
    }

    pub fn dim(&self) -> usize {
        self.sigma.rows()
    }

    pub fn sigma(&self) -> &Mat {
        &self.sigma
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn quad_form(&self, w: &[f64]) -> f64 {
        linalg::dot(w, &self.sigma.matvec(w))
    }

    /// Largest constraint violation of `w`; zero when feasible.
    pub fn violation(&self, w: &[f64]) -> f64 {
        let quad = self.quad_form(w) - self.gamma;
        let sum = w.iter().sum::<f64>() - 1.0;
        let neg = w.iter().fold(0.0f64, |m, &v| m.max(-v));
        quad.max(sum).max(neg).max(0.0)
    }

    pub fn to_json_string(&self) -> Result<String> {
        let file = RegionFile {
            d: self.dim(),
            gamma: self.gamma,
            sigma: self.sigma.data().to_vec(),
        };
        let mut text = serde_json::to_string_pretty(&file)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json_str(text: &str) -> Result<PortfolioRegion> {
        let file: RegionFile = serde_json::from_str(text)?;
        if file.sigma.len() != file.d * file.d {
            return Err(SpoError::Parse(format!(
                "region file: sigma has {} entries, expected {}",
                file.sigma.len(),
                file.d * file.d
            )));
        }
        PortfolioRegion::new(Mat::from_vec(file.d, file.d, file.sigma), file.gamma)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json_string()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<PortfolioRegion> {
        PortfolioRegion::from_json_str(&fs::read_to_string(path)?)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RegionFile {
    d: usize,
    gamma: f64,
    /// Row-major `d x d` covariance.
    sigma: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predict_zero_coeffs_returns_intercept() {
        let m = LinearModel::new(Mat::zeros(2, 3), vec![3.0, 4.0]).unwrap();
        let x = FeatureVector::new(vec![9.0, -1.0, 2.5]).unwrap();
        assert_eq!(m.predict(&x).unwrap().as_slice(), &[3.0, 4.0]);
    }

    #[test]
    fn predict_identity_passes_through() {
        let m = LinearModel::new(Mat::identity(2), vec![0.0, 0.0]).unwrap();
        let x = FeatureVector::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(m.predict(&x).unwrap().as_slice(), &[1.0, 2.0]);
    }

    #[test]
    fn predict_hand_example() {
        let m = LinearModel::new(
            Mat::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]),
            vec![1.0, 0.0],
        )
        .unwrap();
        let x = FeatureVector::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(m.predict(&x).unwrap().as_slice(), &[4.0, 1.0]);
    }

    #[test]
    fn predict_rejects_dimension_mismatch() {
        let m = LinearModel::zeros(2, 3);
        let x = FeatureVector::new(vec![1.0]).unwrap();
        assert!(matches!(
            m.predict(&x),
            Err(SpoError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn predict_is_affine_linear() {
        let mut rng = crate::rng::Stream::new(11, "affine");
        let d = 3;
        let p = 4;
        let coeffs = Mat::from_vec(d, p, (0..d * p).map(|_| rng.uniform(-1.0, 1.0)).collect());
        let intercept: Vec<f64> = (0..d).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let m = LinearModel::new(coeffs, intercept.clone()).unwrap();
        for _ in 0..50 {
            let x: Vec<f64> = (0..p).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let y: Vec<f64> = (0..p).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let alpha = rng.uniform(-2.0, 2.0);
            let beta = rng.uniform(-2.0, 2.0);
            let combo: Vec<f64> = x
                .iter()
                .zip(&y)
                .map(|(a, b)| alpha * a + beta * b)
                .collect();
            let lhs = m
                .predict(&FeatureVector::new(combo).unwrap())
                .unwrap()
                .into_vec();
            let px = m.predict(&FeatureVector::new(x.clone()).unwrap()).unwrap();
            let py = m.predict(&FeatureVector::new(y.clone()).unwrap()).unwrap();
            for j in 0..d {
                let rhs = alpha * px[j] + beta * py[j] - (alpha + beta - 1.0) * intercept[j];
                assert!((lhs[j] - rhs).abs() < 1e-12, "affinity broke: {lhs:?}");
            }
        }
    }

    #[test]
    fn dataset_requires_consistent_dims() {
        let s1 = Sample::new(
            FeatureVector::new(vec![1.0]).unwrap(),
            CostVector::new(vec![1.0, 2.0]).unwrap(),
        );
        let s2 = Sample::new(
            FeatureVector::new(vec![1.0, 2.0]).unwrap(),
            CostVector::new(vec![1.0, 2.0]).unwrap(),
        );
        assert!(Dataset::new(vec![s1, s2]).is_err());
        assert!(Dataset::new(vec![]).is_err());
    }

    #[test]
    fn dataset_csv_round_trips_exactly() {
        let samples = vec![
            Sample::new(
                FeatureVector::new(vec![0.1, -2.0]).unwrap(),
                CostVector::new(vec![1.0 / 3.0]).unwrap(),
            ),
            Sample::new(
                FeatureVector::new(vec![1e-7, 17.25]).unwrap(),
                CostVector::new(vec![-0.9999999999999999]).unwrap(),
            ),
        ];
        let ds = Dataset::new(samples).unwrap();
        let text = ds.to_csv_string();
        assert!(text.starts_with("x_1,x_2,c_1\n"));
        let back = Dataset::from_csv_str(&text).unwrap();
        assert_eq!(ds, back);
    }

    #[test]
    fn model_file_round_trips() {
        let m = LinearModel::new(
            Mat::from_rows(&[vec![1.5, 0.0], vec![-2.0, 3.25]]),
            vec![0.5, -0.5],
        )
        .unwrap();
        let file = ModelFile::from_model(&m, "spo_plus_sgd", Some(0.01), 7);
        let text = serde_json::to_string(&file).unwrap();
        let parsed: ModelFile = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed.into_model().unwrap(), m);
    }

    #[test]
    fn grid_graph_edge_count_matches_formula() {
        for k in 2..=5 {
            let g = GridGraph::new(k).unwrap();
            assert_eq!(g.dim(), 2 * k * (k - 1));
            assert_eq!(g.node_count(), k * k);
        }
        assert!(GridGraph::new(1).is_err());
    }

    #[test]
    fn grid_graph_two_by_two_layout() {
        let g = GridGraph::new(2).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn portfolio_region_validation() {
        let sigma = Mat::identity(2);
        assert!(PortfolioRegion::new(sigma.clone(), 1.0).is_ok());
        assert!(PortfolioRegion::new(sigma.clone(), 0.0).is_err());
        let asym = Mat::from_rows(&[vec![1.0, 0.1], vec![0.2, 1.0]]);
        assert!(PortfolioRegion::new(asym, 1.0).is_err());
        let indef = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(PortfolioRegion::new(indef, 1.0).is_err());
    }

    #[test]
    fn region_json_round_trips() {
        let sigma = Mat::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]);
        let r = PortfolioRegion::new(sigma, 0.25).unwrap();
        let text = r.to_json_string().unwrap();
        let back = PortfolioRegion::from_json_str(&text).unwrap();
        assert_eq!(r, back);
    }
}
