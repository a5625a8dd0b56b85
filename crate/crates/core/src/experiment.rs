//! The sparsify → compile → solve → evaluate pipeline, repeated over seeded
//! trials and swept over draw counts.
//!
//! Every solution found on a sparsified graph is scored with [`cut_weight`]
//! on the original graph and compared against a reference value: the exact
//! optimum when the instance is small enough to enumerate, otherwise the best
//! heuristic value found on the original graph under the same solver budget.

use std::io::Write;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::graph::{cut_weight, WeightedGraph};
use crate::par::{map_indexed, Execution};
use crate::qubo::{communication_cost, compile_qubo};
use crate::resistance::{effective_resistances_with, ProbabilityRule, ResistanceProfile};
use crate::solvers::{solve_exact, SolverChoice, EXACT_CAP};
use crate::sparsify::{resolve_q, sparsify, QRule, SparsifyConfig};

pub const DEFAULT_TRIALS: usize = 10;

pub const CSV_HEADER: &str = "dataset,n,m,q,mean_sparse_edges,reduction,reference,mean_objective,ratio,trials,seed,resistance_secs,sample_secs,solve_secs";

/// Number of trailing CSV columns holding wall-clock timings.
pub const CSV_TIMING_COLUMNS: usize = 3;

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub dataset: String,
    pub sparsify: SparsifyConfig,
    pub probability_rule: ProbabilityRule,
    pub solver: SolverChoice,
    pub trials: usize,
    pub execution: Execution,
}

impl ExperimentConfig {
    pub fn new(dataset: impl Into<String>, sparsify: SparsifyConfig, solver: SolverChoice) -> Self {
        Self {
            dataset: dataset.into(),
            sparsify,
            probability_rule: ProbabilityRule::default(),
            solver,
            trials: DEFAULT_TRIALS,
            execution: Execution::default(),
        }
    }
}

/// One seeded pass through the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub seed: u64,
    pub sparse_edges: usize,
    /// Triplets sent for the sparsified instance.
    pub triplets: usize,
    pub off_diagonal_triplets: usize,
    /// Cut weight of the returned assignment on the original graph.
    pub objective: f64,
    /// Objective the solver reported on the sparsified instance.
    pub sparse_objective: f64,
    pub ratio: f64,
    pub sample_time: Duration,
    pub solve_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub dataset: String,
    pub n: usize,
    pub m: usize,
    pub q: usize,
    pub seed: u64,
    pub trials: usize,
    pub mean_sparse_edges: f64,
    pub reduction: f64,
    pub reference: f64,
    /// True when `reference` is a proven optimum.
    pub reference_exact: bool,
    pub mean_objective: f64,
    /// Mean of the per-trial ratios.
    pub ratio: f64,
    /// `mean_objective / reference`.
    pub ratio_of_means: f64,
    pub resistance_time: Duration,
    pub sample_time: Duration,
    pub solve_time: Duration,
    pub records: Vec<TrialRecord>,
}

impl ExperimentReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{:.6},{:.6},{:.6}",
            self.dataset,
            self.n,
            self.m,
            self.q,
            self.mean_sparse_edges,
            self.reduction,
            self.reference,
            self.mean_objective,
            self.ratio,
            self.trials,
            self.seed,
            self.resistance_time.as_secs_f64(),
            self.sample_time.as_secs_f64(),
            self.solve_time.as_secs_f64(),
        )
    }
}

pub fn write_csv<W: Write>(mut out: W, reports: &[ExperimentReport]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in reports {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}

/// Work shared by every draw count of a sweep.
struct Prepared {
    profile: ResistanceProfile,
    resistance_time: Duration,
    reference: f64,
    reference_exact: bool,
}

fn prepare(g: &WeightedGraph, cfg: &ExperimentConfig) -> Result<Prepared> {
    if cfg.trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let started = Instant::now();
    let profile = effective_resistances_with(g, cfg.probability_rule)?;
    let resistance_time = started.elapsed();

    let original = compile_qubo(g);
    let (reference, reference_exact) = if g.node_count() <= EXACT_CAP {
        (solve_exact(&original)?.objective, true)
    } else {
        let runs = map_indexed(cfg.trials, cfg.execution, |i| {
            let seed = trial_seed(cfg.sparsify.seed, i);
            cfg.solver
                .solve(&original, seed)
                .and_then(|r| cut_weight(g, &r.assignment))
                .map_err(|e| trial_error(i, e))
        });
        let mut best = f64::NEG_INFINITY;
        for r in runs {
            best = best.max(r?);
        }
        (best, false)
    };
    Ok(Prepared {
        profile,
        resistance_time,
        reference,
        reference_exact,
    })
}

/// Seed of trial `i` under base seed `base`.
pub fn trial_seed(base: u64, i: usize) -> u64 {
    base.wrapping_add(i as u64)
}

fn trial_error(trial: usize, source: Error) -> Error {
    Error::Trial {
        trial,
        source: Box::new(source),
    }
}

fn run_prepared(
    g: &WeightedGraph,
    cfg: &ExperimentConfig,
    prep: &Prepared,
    q: usize,
) -> Result<ExperimentReport> {
    let records = map_indexed(cfg.trials, cfg.execution, |i| {
        run_trial(g, cfg, prep, q, trial_seed(cfg.sparsify.seed, i)).map_err(|e| trial_error(i, e))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let t = records.len() as f64;
    let m = g.edge_count();
    let mean = |f: &dyn Fn(&TrialRecord) -> f64| records.iter().map(f).sum::<f64>() / t;
    let mean_time = |f: &dyn Fn(&TrialRecord) -> Duration| {
        records.iter().map(f).sum::<Duration>() / records.len() as u32
    };
    let mean_objective = mean(&|r| r.objective);
    Ok(ExperimentReport {
        dataset: cfg.dataset.clone(),
        n: g.node_count(),
        m,
        q,
        seed: cfg.sparsify.seed,
        trials: cfg.trials,
        mean_sparse_edges: mean(&|r| r.sparse_edges as f64),
        reduction: mean(&|r| 1.0 - r.sparse_edges as f64 / m as f64),
        reference: prep.reference,
        reference_exact: prep.reference_exact,
        mean_objective,
        ratio: mean(&|r| r.ratio),
        ratio_of_means: ratio(mean_objective, prep.reference),
        resistance_time: prep.resistance_time,
        sample_time: mean_time(&|r| r.sample_time),
        solve_time: mean_time(&|r| r.solve_time),
        records,
    })
}

fn ratio(objective: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        1.0
    } else {
        objective / reference
    }
}

fn run_trial(
    g: &WeightedGraph,
    cfg: &ExperimentConfig,
    prep: &Prepared,
    q: usize,
    seed: u64,
) -> Result<TrialRecord> {
    let started = Instant::now();
    let sparse = sparsify(g, &prep.profile, &SparsifyConfig::explicit(q, seed))?;
    let sample_time = started.elapsed();

    let instance = compile_qubo(&sparse);
    let started = Instant::now();
    let solved = cfg.solver.solve(&instance, seed)?;
    let solve_time = started.elapsed();

    let objective = cut_weight(g, &solved.assignment)?;
    Ok(TrialRecord {
        seed,
        sparse_edges: sparse.edge_count(),
        triplets: communication_cost(&instance),
        off_diagonal_triplets: instance.off_diagonal_count(),
        objective,
        sparse_objective: solved.objective,
        ratio: ratio(objective, prep.reference),
        sample_time,
        solve_time,
    })
}

/// Runs `cfg.trials` seeded trials at the draw count given by `cfg.sparsify`.
pub fn run_pipeline(g: &WeightedGraph, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let q = cfg.sparsify.resolve_q(g)?;
    let prep = prepare(g, cfg)?;
    run_prepared(g, cfg, &prep, q)
}

/// One report per draw count. Resistances and the reference are computed once.
pub fn sweep_q(
    g: &WeightedGraph,
    q_values: &[usize],
    cfg: &ExperimentConfig,
) -> Result<Vec<ExperimentReport>> {
    if q_values.is_empty() {
        return Err(Error::Config("q sweep needs at least one value".into()));
    }
    if q_values.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Config("q sweep values must be ascending".into()));
    }
    for &q in q_values {
        resolve_q(QRule::Explicit(q), g.node_count(), cfg.sparsify.epsilon)?;
    }
    let prep = prepare(g, cfg)?;
    q_values
        .iter()
        .map(|&q| run_prepared(g, cfg, &prep, q))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_instance, GeneratorKind};

    fn exact_cfg(q: usize, trials: usize) -> ExperimentConfig {
        ExperimentConfig {
            trials,
            ..ExperimentConfig::new("t", SparsifyConfig::explicit(q, 1), SolverChoice::Exact)
        }
    }

    #[test]
    fn saturated_triangle() {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let r = run_pipeline(&g, &exact_cfg(30, 10)).unwrap();
        assert_eq!(r.reference, 2.0);
        assert!(r.reference_exact);
        assert_eq!(r.ratio, 1.0);
        assert_eq!(r.records.len(), 10);
    }

    #[test]
    fn reduction_matches_off_diagonal_triplets() {
        let g = generate_instance(GeneratorKind::G05, 18, 0.6, 1, 4).unwrap();
        let r = run_pipeline(&g, &exact_cfg(40, 5)).unwrap();
        let from_triplets = r
            .records
            .iter()
            .map(|t| 1.0 - t.off_diagonal_triplets as f64 / g.edge_count() as f64)
            .sum::<f64>()
            / 5.0;
        assert_eq!(r.reduction, from_triplets);
        for t in &r.records {
            assert_eq!(t.off_diagonal_triplets, t.sparse_edges);
            assert!(t.triplets - t.off_diagonal_triplets <= g.node_count());
            assert!(t.objective <= r.reference + 1e-9);
        }
    }

    #[test]
    fn single_entry_sweep_equals_pipeline() {
        let g = generate_instance(GeneratorKind::Weighted, 14, 0.5, 9, 2).unwrap();
        let cfg = exact_cfg(30, 4);
        let one = run_pipeline(&g, &cfg).unwrap();
        let swept = sweep_q(&g, &[30], &cfg).unwrap();
        assert_eq!(swept.len(), 1);
        assert_eq!(swept[0].records.len(), one.records.len());
        for (a, b) in swept[0].records.iter().zip(&one.records) {
            assert_eq!((a.seed, a.sparse_edges, a.objective), (b.seed, b.sparse_edges, b.objective));
        }
        assert_eq!(swept[0].ratio, one.ratio);
    }

    #[test]
    fn sweep_validation() {
        let g = generate_instance(GeneratorKind::G05, 8, 0.5, 1, 2).unwrap();
        let cfg = exact_cfg(10, 1);
        assert!(sweep_q(&g, &[], &cfg).is_err());
        assert!(sweep_q(&g, &[20, 10], &cfg).is_err());
        assert!(run_pipeline(&g, &ExperimentConfig { trials: 0, ..cfg }).is_err());
    }

    #[test]
    fn trial_errors_carry_index() {
        let g = generate_instance(GeneratorKind::G05, 30, 0.2, 1, 2).unwrap();
        // Exact solver cannot handle 30 variables.
        let err = run_pipeline(&g, &exact_cfg(10, 2)).unwrap_err();
        assert!(matches!(err, Error::Trial { trial: 0, .. }), "{err}");
    }

    #[test]
    fn csv_row_shape() {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let r = run_pipeline(&g, &exact_cfg(30, 2)).unwrap();
        let row = r.csv_row();
        assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count());
        assert!(row.starts_with("t,3,3,30,"));
    }
}
