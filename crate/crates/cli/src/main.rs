use std::fs;
use std::io::{self, BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cutsparse::experiment::{run_pipeline, sweep_q, write_csv, ExperimentConfig};
use cutsparse::remote::{serve, ServerConfig, ServerSolver};
use cutsparse::resistance::effective_resistances_with;
use cutsparse::sparsify::parse_q_rule;
use cutsparse::{
    compile_qubo, generate_instance, sparsify, Execution, GeneratorKind,
    ProbabilityRule, QuboInstance, SolverChoice, SparsifyConfig, TabuParams, WeightedGraph,
};

#[derive(Parser)]
#[command(name = "cutsparse", version, about = "Sparsify max cut instances before QUBO solving")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic instance file.
    Generate(GenerateArgs),
    /// Dump per-edge effective resistances and sampling probabilities as CSV.
    Resistances(ResistanceArgs),
    /// Sparsify an instance and report the edge reduction.
    Sparsify(SparsifyArgs),
    /// Solve the max cut QUBO of an instance or a raw triplet file.
    Solve(SolveArgs),
    /// Run the mock QUBO solver service.
    Serve(ServeArgs),
    /// Run the sparsify-and-solve pipeline over seeded trials.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverKind {
    Exact,
    Tabu,
    Remote,
}

#[derive(Clone, Copy, ValueEnum)]
enum ServerSolverKind {
    Exact,
    Tabu,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExecutionKind {
    Parallel,
    Sequential,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleKind {
    Resistance,
    WeightedResistance,
}

impl From<RuleKind> for ProbabilityRule {
    fn from(r: RuleKind) -> Self {
        match r {
            RuleKind::Resistance => ProbabilityRule::Resistance,
            RuleKind::WeightedResistance => ProbabilityRule::WeightedResistance,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value = "g05")]
    kind: GeneratorKind,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    #[arg(long, default_value_t = 100)]
    weight_range: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ResistanceArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "resistance")]
    rule: RuleKind,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct QArgs {
    #[arg(long, default_value = "five_n")]
    q_rule: String,
    /// Draw count for `--q-rule explicit`.
    #[arg(long)]
    q: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, value_enum, default_value = "resistance")]
    rule: RuleKind,
}

#[derive(Args)]
struct SparsifyArgs {
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    q: QArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the sparsified instance.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value = "tabu")]
    solver: SolverKind,
    #[arg(long, default_value_t = 20_000)]
    budget_iters: u64,
    /// Wall-clock budget for tabu search; makes runs non-reproducible.
    #[arg(long)]
    budget_secs: Option<f64>,
    #[arg(long)]
    tenure: Option<usize>,
    #[arg(long)]
    restart_after: Option<u64>,
    #[arg(long)]
    server: Option<SocketAddr>,
    #[arg(long, default_value_t = 60.0)]
    timeout_secs: f64,
}

impl SolverArgs {
    fn choice(&self) -> Result<SolverChoice> {
        Ok(match self.solver {
            SolverKind::Exact => SolverChoice::Exact,
            SolverKind::Tabu => SolverChoice::Tabu(TabuParams {
                max_iters: if self.budget_secs.is_some() {
                    None
                } else {
                    Some(self.budget_iters)
                },
                max_time: self.budget_secs.map(Duration::from_secs_f64),
                tenure: self.tenure,
                restart_after: self.restart_after,
            }),
            SolverKind::Remote => SolverChoice::Remote {
                addr: self.server.context("--solver remote needs --server ADDR")?,
                budget_iters: self.budget_iters,
                timeout: Duration::from_secs_f64(self.timeout_secs),
            },
        })
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, conflicts_with = "qubo", required_unless_present = "qubo")]
    instance: Option<PathBuf>,
    /// Raw `u v value` triplet file.
    #[arg(long)]
    qubo: Option<PathBuf>,
    /// Dimension for a triplet file; defaults to the largest index plus one.
    #[arg(long, requires = "qubo")]
    dimension: Option<usize>,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:7878")]
    listen: String,
    #[arg(long, value_enum, default_value = "tabu")]
    solver: ServerSolverKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    instance: Option<PathBuf>,
    /// Synthetic instance `KIND,N,DENSITY[,WEIGHT_RANGE]`, generated with `--seed`.
    #[arg(long)]
    gen: Option<String>,
    #[command(flatten)]
    q: QArgs,
    /// Comma-separated ascending draw counts; overrides the q rule.
    #[arg(long, value_delimiter = ',')]
    sweep: Option<Vec<usize>>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, value_enum, default_value = "parallel")]
    execution: ExecutionKind,
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load(path: &Path) -> Result<WeightedGraph> {
    WeightedGraph::load(path).with_context(|| format!("loading {}", path.display()))
}

fn sparsify_config(args: &QArgs, seed: u64) -> Result<SparsifyConfig> {
    Ok(SparsifyConfig {
        rule: parse_q_rule(&args.q_rule, args.q)?,
        epsilon: args.epsilon,
        seed,
    })
}

fn parse_gen(spec: &str, seed: u64) -> Result<(String, WeightedGraph)> {
    let parts: Vec<&str> = spec.split(',').collect();
    let (kind, n, density, range) = match parts.as_slice() {
        [k, n, d] => (*k, *n, *d, "100"),
        [k, n, d, r] => (*k, *n, *d, *r),
        _ => bail!("--gen expects KIND,N,DENSITY[,WEIGHT_RANGE], got `{spec}`"),
    };
    let kind: GeneratorKind = kind.parse()?;
    let n: usize = n.parse().context("node count")?;
    let density: f64 = density.parse().context("density")?;
    let range: u32 = range.parse().context("weight range")?;
    let g = generate_instance(kind, n, density, range, seed)?;
    Ok((format!("{kind}_n{n}_d{density}"), g))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(a) => {
            let g = generate_instance(a.kind, a.n, a.density, a.weight_range, a.seed)?;
            let mut out = output(a.out.as_deref())?;
            g.write(&mut out)?;
            out.flush()?;
        }
        Command::Resistances(a) => {
            let g = load(&a.instance)?;
            let p = effective_resistances_with(&g, a.rule.into())?;
            let mut out = output(a.csv.as_deref())?;
            writeln!(out, "u,v,w,R_e,p_e")?;
            for ((e, r), pe) in g.edges().iter().zip(p.resistances()).zip(p.probabilities()) {
                writeln!(out, "{},{},{},{},{}", e.u + 1, e.v + 1, e.w, r, pe)?;
            }
            out.flush()?;
        }
        Command::Sparsify(a) => {
            let g = load(&a.instance)?;
            let profile =
                effective_resistances_with(&g, a.q.rule.into())?;
            let h = sparsify(&g, &profile, &sparsify_config(&a.q, a.seed)?)?;
            if let Some(path) = &a.out {
                h.save(path)?;
            }
            let m = g.edge_count();
            let reduction = if m == 0 { 0.0 } else { 1.0 - h.edge_count() as f64 / m as f64 };
            println!("edges,sparse_edges,reduction");
            println!("{},{},{}", m, h.edge_count(), reduction);
        }
        Command::Solve(a) => {
            let q = match (&a.instance, &a.qubo) {
                (Some(path), _) => compile_qubo(&load(path)?),
                (None, Some(path)) => {
                    let file = fs::File::open(path)
                        .with_context(|| format!("opening {}", path.display()))?;
                    QuboInstance::read_triplets(io::BufReader::new(file), a.dimension)?
                }
                (None, None) => unreachable!("clap enforces one input"),
            };
            let r = a.solver.choice()?.solve(&q, a.seed)?;
            println!("solver: {}", r.solver_name);
            println!("objective: {}", r.objective);
            println!("elapsed: {:.6}", r.elapsed.as_secs_f64());
            println!("assignment: {}", r.assignment);
        }
        Command::Serve(a) => {
            let solver = match a.solver {
                ServerSolverKind::Exact => ServerSolver::Exact,
                ServerSolverKind::Tabu => ServerSolver::Tabu { seed: a.seed },
            };
            serve(
                a.listen.as_str(),
                ServerConfig {
                    solver,
                    ..ServerConfig::default()
                },
            )?;
        }
        Command::Experiment(a) => {
            let (dataset, g) = match (&a.instance, &a.gen) {
                (Some(path), _) => {
                    let label = path
                        .file_name()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_else(|| path.display().to_string());
                    (label, load(path)?)
                }
                (None, Some(spec)) => parse_gen(spec, a.seed)?,
                (None, None) => unreachable!("clap enforces one input"),
            };
            let cfg = ExperimentConfig {
                dataset,
                sparsify: sparsify_config(&a.q, a.seed)?,
                probability_rule: a.q.rule.into(),
                solver: a.solver.choice()?,
                trials: a.trials,
                execution: match a.execution {
                    ExecutionKind::Parallel => Execution::Parallel,
                    ExecutionKind::Sequential => Execution::Sequential,
                },
            };
            let reports = match &a.sweep {
                Some(qs) => sweep_q(&g, qs, &cfg)?,
                None => vec![run_pipeline(&g, &cfg)?],
            };
            for r in &reports {
                log::info!(
                    "q={} reduction={:.5} ratio={:.5} reference={}{}",
                    r.q,
                    r.reduction,
                    r.ratio,
                    r.reference,
                    if r.reference_exact { " (exact)" } else { " (best heuristic)" }
                );
            }
            let mut out = output(a.csv.as_deref())?;
            write_csv(&mut out, &reports)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
