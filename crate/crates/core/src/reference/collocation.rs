//! Stochastic collocation over the deterministic finite-difference solver.

use rayon::prelude::*;

use crate::basis::{gauss_rule, QuadratureRule};
use crate::error::{Error, Result};
use crate::problems::ProblemSetup;

use super::fd_weno::{fd_solve, FdRun};
use super::norms::weighted_mean_std;

/// Nodes in `ξ` used in every collocation reference unless stated.
pub const DEFAULT_COLLOCATION_NODES: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct CollocationPlan {
    /// Gauss rule on `[-1, 1]` with weights summing to one.
    pub rule: QuadratureRule,
}

impl CollocationPlan {
    pub fn gauss(n: usize) -> Result<Self> {
        Ok(Self { rule: gauss_rule(n)? })
    }
}

impl Default for CollocationPlan {
    fn default() -> Self {
        Self::gauss(DEFAULT_COLLOCATION_NODES).expect("nonempty rule")
    }
}

/// Per-node runs and their statistics, interleaved `[cell][variable]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationResult {
    pub nx: usize,
    pub ny: usize,
    pub n_vars: usize,
    pub runs: Vec<FdRun>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// Runs the deterministic solver at every node of `plan` and reduces.
pub fn collocation_solve(
    problem: &ProblemSetup,
    plan: &CollocationPlan,
    cells: (usize, usize),
    cfl: f64,
) -> Result<CollocationResult> {
    let runs: Vec<FdRun> = plan
        .rule
        .nodes
        .par_iter()
        .enumerate()
        .map(|(node, &xi)| {
            fd_solve(problem, xi, cells, cfl).map_err(|e| Error::CollocationNode {
                node,
                xi,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    let samples: Vec<Vec<f64>> = runs.iter().map(|r| r.values.clone()).collect();
    let (mean, std) = weighted_mean_std(&samples, &plan.rule.weights);
    Ok(CollocationResult {
        nx: cells.0,
        ny: cells.1,
        n_vars: problem.n_vars(),
        runs,
        mean,
        std,
    })
}
