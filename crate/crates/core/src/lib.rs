//! Decision-focused learning for linear-objective optimization.
//!
//! This crate trains cost-vector prediction models against the decisions they
//! induce rather than against raw prediction error. The SPO loss measures the
//! excess true cost of acting on a prediction; the SPO+ loss is its convex
//! surrogate, computable from any optimization oracle for the nominal problem
//! `min { c . w : w in S }`.
//!
//! The pieces:
//!
//! - [`types`]: cost/feature vectors, datasets, linear models, feasible
//!   regions (interval, grid graphs, polytopes, portfolio sets).
//! - [`solvers`]: a dense two-phase simplex, a log-barrier method for the
//!   quadratically constrained portfolio problem, and a CPLEX-LP writer.
//! - [`oracles`]: the solver contract `w*(c)` and four implementations.
//! - [`losses`]: SPO, SPO+, their subgradients, and the regression baselines.
//! - [`training`]: mini-batch stochastic subgradient descent, closed-form
//!   ridge least squares, and lambda-grid validation.
//! - [`reformulation`]: the dual LP that minimizes empirical SPO+ risk over a
//!   polytope exactly.
//! - [`experiments`]: synthetic data generators, evaluation metrics, and the
//!   seeded trial-grid harness.
//!
//! Everything is deterministic given its seeds: random streams are derived
//! per purpose from a master seed (see [`rng`]), and solvers break ties by
//! fixed rules.

pub mod error;
pub mod experiments;
pub mod linalg;
pub mod losses;
pub mod oracles;
pub mod reformulation;
pub mod rng;
pub mod solvers;
pub mod training;
pub mod types;

pub use error::{Result, SpoError};
pub use types::{
    CostVector, Dataset, FeatureVector, GridGraph, LinearModel, ModelFile, Polytope,
    PortfolioRegion, Sample,
};
