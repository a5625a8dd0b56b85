//! Effective-resistance sparsification of weighted max cut instances, QUBO
//! compilation, embedded solvers, and a mock remote solver service for
//! measuring transmitted bytes.

pub mod error;
pub mod experiment;
pub mod graph;
pub mod par;
pub mod qubo;
pub mod remote;
pub mod resistance;
pub mod solvers;
pub mod sparsify;

pub use error::{Error, Result};
pub use experiment::{run_pipeline, sweep_q, ExperimentConfig, ExperimentReport};
pub use graph::{cut_weight, generate_instance, CutAssignment, GeneratorKind, WeightedGraph};
pub use par::Execution;
pub use qubo::{communication_cost, compile_qubo, qubo_objective, QuboInstance, Triplet};
pub use resistance::{effective_resistances, ProbabilityRule, ResistanceProfile};
pub use solvers::{solve_exact, solve_tabu, SolveResult, SolverChoice, TabuParams};
pub use sparsify::{resolve_q, sparsify, QRule, SparsifyConfig};
