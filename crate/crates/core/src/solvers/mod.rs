//! Embedded QUBO solvers and the solver selection used by the pipeline.

mod exact;
mod tabu;

use std::fmt;
use std::net::SocketAddr;
use std::time::Duration;

pub use exact::{solve_exact, EXACT_CAP};
pub use tabu::{solve_tabu, TabuParams};

use crate::error::Result;
use crate::graph::CutAssignment;
use crate::qubo::QuboInstance;

/// A solved assignment with its objective recomputed on the solved instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub assignment: CutAssignment,
    pub objective: f64,
    pub solver_name: String,
    pub elapsed: Duration,
    pub exact: bool,
}

/// Which solver produces cuts.
#[derive(Debug, Clone, PartialEq)]
pub enum SolverChoice {
    Exact,
    Tabu(TabuParams),
    /// Submit to a mock solver service; the service picks its own algorithm.
    Remote {
        addr: SocketAddr,
        budget_iters: u64,
        timeout: Duration,
    },
}

impl SolverChoice {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Tabu(_) => "tabu",
            Self::Remote { .. } => "remote",
        }
    }

    /// Solves `q`; `seed` is ignored by solvers that do not randomize.
    pub fn solve(&self, q: &QuboInstance, seed: u64) -> Result<SolveResult> {
        match self {
            Self::Exact => solve_exact(q),
            Self::Tabu(params) => solve_tabu(q, params, seed),
            Self::Remote {
                addr,
                budget_iters,
                timeout,
            } => {
                let started = std::time::Instant::now();
                let report = crate::remote::submit(*addr, q, *budget_iters, *timeout)?;
                Ok(SolveResult {
                    objective: report.server_objective,
                    assignment: report.assignment,
                    solver_name: "remote".into(),
                    elapsed: started.elapsed(),
                    exact: false,
                })
            }
        }
    }
}

impl fmt::Display for SolverChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Field `h_i = Q_ii + Σ_j 2 Q_ij x_j`; flipping `i` changes the objective
/// by `h_i` when `x_i = 0` and by `−h_i` otherwise.
pub(crate) fn local_fields(adj: &crate::qubo::Adjacency, x: &[bool]) -> Vec<f64> {
    let mut h = adj.linear.clone();
    for (i, nbrs) in adj.neighbors.iter().enumerate() {
        for &(j, c) in nbrs {
            if x[j] {
                h[i] += c;
            }
        }
    }
    h
}

/// Flips `k` and updates the neighbours' fields in `O(deg k)`.
pub(crate) fn apply_flip(adj: &crate::qubo::Adjacency, x: &mut [bool], h: &mut [f64], k: usize) {
    x[k] = !x[k];
    let sign = if x[k] { 1.0 } else { -1.0 };
    for &(j, c) in &adj.neighbors[k] {
        h[j] += sign * c;
    }
}

#[inline]
pub(crate) fn flip_gain(x: &[bool], h: &[f64], i: usize) -> f64 {
    if x[i] {
        -h[i]
    } else {
        h[i]
    }
}
