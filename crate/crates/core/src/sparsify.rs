//! Importance sampling of edges by effective resistance.
//!
//! `q` edges are drawn i.i.d. from the profile's distribution. A drawn edge
//! contributes `w_e / (q · p_e)` each time it is drawn, so every cut weight of
//! the output is an unbiased estimate of the same cut in the input.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{contract, Error, Result};
use crate::graph::WeightedGraph;
use crate::resistance::ResistanceProfile;

/// How the number of draws is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QRule {
    /// A fixed draw count.
    Explicit(usize),
    /// `⌈9 |V| ln|V| / ε²⌉`, the count that carries the (1+ε) guarantee.
    Theorem1,
    /// `5 |V|`, the empirical rule of thumb.
    FiveN,
}

impl fmt::Display for QRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Explicit(q) => write!(f, "explicit({q})"),
            Self::Theorem1 => f.write_str("theorem1"),
            Self::FiveN => f.write_str("five_n"),
        }
    }
}

/// Parses the rule name; `explicit` needs the count supplied separately.
pub fn parse_q_rule(name: &str, q: Option<usize>) -> Result<QRule> {
    match name {
        "explicit" => q
            .map(QRule::Explicit)
            .ok_or_else(|| Error::Config("rule `explicit` requires a draw count".into())),
        "theorem1" => Ok(QRule::Theorem1),
        "five_n" => Ok(QRule::FiveN),
        other => Err(Error::Config(format!("unknown q rule `{other}`"))),
    }
}

impl FromStr for QRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.parse::<usize>() {
            Ok(q) => Ok(Self::Explicit(q)),
            Err(_) => parse_q_rule(s, None),
        }
    }
}

/// Everything controlling one sampling run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparsifyConfig {
    pub rule: QRule,
    /// Only consulted by [`QRule::Theorem1`].
    pub epsilon: f64,
    pub seed: u64,
}

impl SparsifyConfig {
    pub fn explicit(q: usize, seed: u64) -> Self {
        Self {
            rule: QRule::Explicit(q),
            epsilon: 0.1,
            seed,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn resolve_q(&self, g: &WeightedGraph) -> Result<usize> {
        resolve_q(self.rule, g.node_count(), self.epsilon)
    }
}

/// Turns a rule into a concrete draw count for a graph with `node_count` nodes.
pub fn resolve_q(rule: QRule, node_count: usize, epsilon: f64) -> Result<usize> {
    if node_count == 0 {
        return Err(contract("graph must be nonempty"));
    }
    match rule {
        QRule::Explicit(0) => Err(Error::Config("q must be at least 1".into())),
        QRule::Explicit(q) => Ok(q),
        QRule::FiveN => Ok(5 * node_count),
        QRule::Theorem1 => {
            if !(epsilon > 0.0 && epsilon.is_finite()) {
                return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
            }
            let n = node_count as f64;
            let q = (9.0 * n * n.ln() / (epsilon * epsilon)).ceil();
            Ok((q as usize).max(1))
        }
    }
}

/// Draws `q` edges and accumulates rescaled weights into a new graph.
///
/// Edges that are never drawn are absent from the result, which keeps the
/// node count and the relative order of the surviving edges.
pub fn sparsify(
    g: &WeightedGraph,
    profile: &ResistanceProfile,
    cfg: &SparsifyConfig,
) -> Result<WeightedGraph> {
    if profile.len() != g.edge_count() {
        return Err(contract(format!(
            "profile has {} entries but graph has {} edges",
            profile.len(),
            g.edge_count()
        )));
    }
    let q = cfg.resolve_q(g)?;
    if g.edge_count() == 0 {
        return Ok(g.clone());
    }
    let counts = draw_counts(profile.probabilities(), q, cfg.seed);
    let qf = q as f64;
    let edges = g
        .edges()
        .iter()
        .zip(profile.probabilities())
        .zip(&counts)
        .filter(|(_, &c)| c > 0)
        .map(|((e, &p), &c)| (e.u, e.v, c as f64 * (e.w / (qf * p))));
    WeightedGraph::new(g.node_count(), edges)
}

/// Number of times each category is drawn in `q` i.i.d. draws.
pub fn draw_counts(probabilities: &[f64], q: usize, seed: u64) -> Vec<u64> {
    let mut cumulative = Vec::with_capacity(probabilities.len());
    let mut acc = 0.0;
    for &p in probabilities {
        acc += p;
        cumulative.push(acc);
    }
    let total = acc;
    let last = probabilities.len() - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; probabilities.len()];
    for _ in 0..q {
        let r = rng.gen::<f64>() * total;
        let idx = cumulative.partition_point(|&c| c <= r).min(last);
        counts[idx] += 1;
    }
    counts
}
