//! Effective resistances of a weighted graph viewed as a resistor network.
//!
//! Each edge is a conductor with conductance `w_e`. The effective resistance
//! between the endpoints of `e = {u, v}` is `(χ_u − χ_v)ᵀ L⁺ (χ_u − χ_v)`,
//! read off a single dense pseudoinverse of the Laplacian.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{contract, Error, Result};
use crate::graph::WeightedGraph;

/// Eigenvalues below this fraction of the largest are treated as zero.
pub const PINV_CUTOFF: f64 = 1e-10;

const EIGEN_MAX_ITER: usize = 100_000;

/// How sampling probabilities are derived from resistances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProbabilityRule {
    /// `p_e ∝ R_e`.
    #[default]
    Resistance,
    /// `p_e ∝ w_e · R_e`, the leverage-score form.
    WeightedResistance,
}

impl FromStr for ProbabilityRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "resistance" => Ok(Self::Resistance),
            "weighted-resistance" | "leverage" => Ok(Self::WeightedResistance),
            other => Err(Error::Config(format!("unknown probability rule `{other}`"))),
        }
    }
}

impl fmt::Display for ProbabilityRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Resistance => "resistance",
            Self::WeightedResistance => "weighted-resistance",
        })
    }
}

/// Per-edge resistances and the sampling distribution, aligned with the
/// graph's edge list.
#[derive(Debug, Clone, PartialEq)]
pub struct ResistanceProfile {
    resistances: Vec<f64>,
    probabilities: Vec<f64>,
    rule: ProbabilityRule,
}

impl ResistanceProfile {
    pub fn resistances(&self) -> &[f64] {
        &self.resistances
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn rule(&self) -> ProbabilityRule {
        self.rule
    }

    pub fn len(&self) -> usize {
        self.resistances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.resistances.is_empty()
    }

    /// Rebuilds the distribution from the same resistances under another rule.
    pub fn with_rule(&self, g: &WeightedGraph, rule: ProbabilityRule) -> Result<Self> {
        if g.edge_count() != self.resistances.len() {
            return Err(contract("profile does not match graph edge list"));
        }
        Ok(Self {
            probabilities: probabilities(g, &self.resistances, rule),
            resistances: self.resistances.clone(),
            rule,
        })
    }
}

fn probabilities(g: &WeightedGraph, resistances: &[f64], rule: ProbabilityRule) -> Vec<f64> {
    let scores: Vec<f64> = match rule {
        ProbabilityRule::Resistance => resistances.to_vec(),
        ProbabilityRule::WeightedResistance => g
            .edges()
            .iter()
            .zip(resistances)
            .map(|(e, r)| e.w * r)
            .collect(),
    };
    let total: f64 = scores.iter().sum();
    scores.into_iter().map(|s| s / total).collect()
}

/// Dense weighted Laplacian `D − A`.
pub fn laplacian(g: &WeightedGraph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for e in g.edges() {
        l[(e.u, e.u)] += e.w;
        l[(e.v, e.v)] += e.w;
        l[(e.u, e.v)] -= e.w;
        l[(e.v, e.u)] -= e.w;
    }
    l
}

/// Moore–Penrose pseudoinverse of a symmetric positive semidefinite matrix.
pub fn pseudoinverse(l: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = l.nrows();
    let eig = SymmetricEigen::try_new(l, f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::Numeric("symmetric eigendecomposition did not converge".into()))?;
    let sigma_max = eig.eigenvalues.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let cutoff = PINV_CUTOFF * sigma_max;
    let mut scaled = eig.eigenvectors.clone();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if !lambda.is_finite() {
            return Err(Error::Numeric(format!("non-finite eigenvalue {lambda}")));
        }
        let inv = if lambda.abs() <= cutoff { 0.0 } else { 1.0 / lambda };
        scaled.column_mut(k).scale_mut(inv);
    }
    let pinv = &scaled * eig.eigenvectors.transpose();
    debug_assert_eq!(pinv.nrows(), n);
    Ok(pinv)
}

/// Computes `R_e` for every edge and the default sampling distribution.
pub fn effective_resistances(g: &WeightedGraph) -> Result<ResistanceProfile> {
    effective_resistances_with(g, ProbabilityRule::default())
}

pub fn effective_resistances_with(
    g: &WeightedGraph,
    rule: ProbabilityRule,
) -> Result<ResistanceProfile> {
    if g.edge_count() == 0 {
        return Err(contract("effective resistances need at least one edge"));
    }
    let pinv = pseudoinverse(laplacian(g))?;
    let resistances: Vec<f64> = g
        .edges()
        .iter()
        .map(|e| {
            let r = pinv[(e.u, e.u)] + pinv[(e.v, e.v)] - 2.0 * pinv[(e.u, e.v)];
            // A parallel path can only lower resistance below the edge's own 1/w.
            r.min(1.0 / e.w)
        })
        .collect();
    if let Some((i, r)) = resistances.iter().enumerate().find(|(_, r)| !(**r > 0.0)) {
        return Err(Error::Numeric(format!("edge {i} has non-positive resistance {r}")));
    }
    Ok(ResistanceProfile {
        probabilities: probabilities(g, &resistances, rule),
        resistances,
        rule,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9
    }

    #[test]
    fn lone_resistor() {
        let g = WeightedGraph::new(2, [(0, 1, 4.0)]).unwrap();
        let p = effective_resistances(&g).unwrap();
        assert!(close(p.resistances()[0], 0.25));
        assert_eq!(p.probabilities(), &[1.0]);
    }

    #[test]
    fn unit_triangle() {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let p = effective_resistances(&g).unwrap();
        for (r, q) in p.resistances().iter().zip(p.probabilities()) {
            assert!(close(*r, 2.0 / 3.0));
            assert!(close(*q, 1.0 / 3.0));
        }
    }

    #[test]
    fn bridge_between_triangles() {
        // Two triangles joined by the bridge (2, 3) of weight 2.5.
        let g = WeightedGraph::new(
            6,
            [
                (0, 1, 1.0),
                (1, 2, 2.0),
                (0, 2, 3.0),
                (2, 3, 2.5),
                (3, 4, 1.0),
                (4, 5, 1.0),
                (3, 5, 1.0),
            ],
        )
        .unwrap();
        let p = effective_resistances(&g).unwrap();
        assert!(close(p.resistances()[3], 0.4));
    }

    #[test]
    fn disconnected_graph() {
        let g = WeightedGraph::new(5, [(0, 1, 2.0), (2, 3, 1.0), (3, 4, 1.0), (2, 4, 1.0)]).unwrap();
        let p = effective_resistances(&g).unwrap();
        assert!(close(p.resistances()[0], 0.5));
        for r in &p.resistances()[1..] {
            assert!(close(*r, 2.0 / 3.0));
        }
        let sum: f64 = p.probabilities().iter().sum();
        assert!((sum - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn empty_edge_set_is_rejected() {
        let g = WeightedGraph::new(3, std::iter::empty()).unwrap();
        assert!(matches!(effective_resistances(&g), Err(Error::Contract(_))));
    }

    #[test]
    fn weighted_rule_uses_leverage() {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 3.0)]).unwrap();
        let p = effective_resistances_with(&g, ProbabilityRule::WeightedResistance).unwrap();
        // Path graph: w_e R_e = 1 for both edges.
        assert!(close(p.probabilities()[0], 0.5));
        let d = p.with_rule(&g, ProbabilityRule::Resistance).unwrap();
        assert!(close(d.probabilities()[0], 0.75));
    }
}
