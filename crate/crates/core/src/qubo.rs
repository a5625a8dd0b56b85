//! Max cut as a QUBO in sparse triplet form.
//!
//! For a graph with weights `w`, the diagonal is `Q_uu = Σ_v w(u,v)` and each
//! edge contributes `Q_uv = −w(u,v)`. Triplets are stored once per unordered
//! pair (`u < v`), and the objective treats `Q` as the symmetric matrix they
//! describe, so an off-diagonal triplet enters `xᵀQx` twice:
//!
//! `f(x) = Σ_u Q_uu x_u + 2 Σ_{u<v} Q_uv x_u x_v`,
//!
//! which equals the weight of the cut selected by `x`.

use std::io::{BufRead, Write};

use crate::error::{contract, Error, Result};
use crate::graph::{CutAssignment, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triplet {
    pub u: usize,
    pub v: usize,
    pub value: f64,
}

impl Triplet {
    pub fn is_diagonal(&self) -> bool {
        self.u == self.v
    }
}

/// Upper-triangular sparse QUBO, triplets sorted by `(u, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboInstance {
    dimension: usize,
    triplets: Vec<Triplet>,
}

impl QuboInstance {
    /// Builds an instance from arbitrary triplets. Lower-triangle entries are
    /// mirrored to `u ≤ v`; duplicate positions and zero values are rejected.
    pub fn from_triplets(dimension: usize, triplets: Vec<Triplet>) -> Result<Self> {
        let mut triplets: Vec<Triplet> = triplets
            .into_iter()
            .map(|t| Triplet {
                u: t.u.min(t.v),
                v: t.u.max(t.v),
                value: t.value,
            })
            .collect();
        for t in &triplets {
            if t.v >= dimension {
                return Err(contract(format!(
                    "triplet ({}, {}) out of range for dimension {dimension}",
                    t.u, t.v
                )));
            }
            if t.value == 0.0 || !t.value.is_finite() {
                return Err(contract(format!(
                    "triplet ({}, {}) has invalid value {}",
                    t.u, t.v, t.value
                )));
            }
        }
        triplets.sort_by_key(|t| (t.u, t.v));
        if let Some(w) = triplets.windows(2).find(|w| (w[0].u, w[0].v) == (w[1].u, w[1].v)) {
            return Err(contract(format!("duplicate triplet at ({}, {})", w[0].u, w[0].v)));
        }
        Ok(Self {
            dimension,
            triplets,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn triplets(&self) -> &[Triplet] {
        &self.triplets
    }

    pub fn off_diagonal_count(&self) -> usize {
        self.triplets.iter().filter(|t| !t.is_diagonal()).count()
    }

    /// Diagonal terms and symmetric neighbour lists with the factor 2 folded in.
    pub fn adjacency(&self) -> Adjacency {
        let mut linear = vec![0.0; self.dimension];
        let mut neighbors: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.dimension];
        for t in &self.triplets {
            if t.is_diagonal() {
                linear[t.u] += t.value;
            } else {
                neighbors[t.u].push((t.v, 2.0 * t.value));
                neighbors[t.v].push((t.u, 2.0 * t.value));
            }
        }
        Adjacency { linear, neighbors }
    }

    /// Writes one `u v value` line per triplet.
    pub fn write_triplets<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for t in &self.triplets {
            writeln!(out, "{}", format_triplet(t))?;
        }
        Ok(())
    }

    /// Reads `u v value` lines. Without an explicit dimension the largest
    /// index plus one is used.
    pub fn read_triplets<R: BufRead>(reader: R, dimension: Option<usize>) -> Result<Self> {
        let mut triplets = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let t = parse_triplet(trimmed).map_err(|message| Error::Parse {
                path: "<triplets>".into(),
                line: idx + 1,
                message,
            })?;
            triplets.push(t);
        }
        let dim = dimension.unwrap_or_else(|| {
            triplets
                .iter()
                .map(|t: &Triplet| t.u.max(t.v) + 1)
                .max()
                .unwrap_or(0)
        });
        Self::from_triplets(dim, triplets)
    }
}

/// Evaluation-ready form of a [`QuboInstance`].
#[derive(Debug, Clone)]
pub struct Adjacency {
    pub linear: Vec<f64>,
    pub neighbors: Vec<Vec<(usize, f64)>>,
}

pub(crate) fn format_triplet(t: &Triplet) -> String {
    format!("{} {} {}", t.u, t.v, t.value)
}

pub(crate) fn parse_triplet(line: &str) -> std::result::Result<Triplet, String> {
    let mut fields = line.split(' ');
    let (Some(u), Some(v), Some(value), None) =
        (fields.next(), fields.next(), fields.next(), fields.next())
    else {
        return Err(format!("expected `u v value`, got `{line}`"));
    };
    Ok(Triplet {
        u: u.parse().map_err(|e| format!("bad index `{u}`: {e}"))?,
        v: v.parse().map_err(|e| format!("bad index `{v}`: {e}"))?,
        value: value.parse().map_err(|e| format!("bad value `{value}`: {e}"))?,
    })
}

/// Compiles the max cut objective of `g` into triplets.
pub fn compile_qubo(g: &WeightedGraph) -> QuboInstance {
    let n = g.node_count();
    let mut diag = vec![0.0; n];
    let mut triplets = Vec::with_capacity(g.edge_count() + n);
    for e in g.edges() {
        diag[e.u] += e.w;
        diag[e.v] += e.w;
        triplets.push(Triplet {
            u: e.u,
            v: e.v,
            value: -e.w,
        });
    }
    triplets.extend(
        diag.into_iter()
            .enumerate()
            .filter(|(_, d)| *d != 0.0)
            .map(|(u, value)| Triplet { u, v: u, value }),
    );
    triplets.sort_by_key(|t| (t.u, t.v));
    QuboInstance {
        dimension: n,
        triplets,
    }
}

/// `xᵀQx` with each stored off-diagonal triplet counted for both orientations.
pub fn qubo_objective(q: &QuboInstance, x: &CutAssignment) -> Result<f64> {
    if x.len() != q.dimension() {
        return Err(contract(format!(
            "assignment has length {} but instance dimension is {}",
            x.len(),
            q.dimension()
        )));
    }
    let mut total = 0.0;
    for t in q.triplets() {
        if x.get(t.u) && x.get(t.v) {
            total += if t.is_diagonal() { t.value } else { 2.0 * t.value };
        }
    }
    Ok(total)
}

/// Number of `(u, v, Q_uv)` records needed to transmit the instance.
pub fn communication_cost(q: &QuboInstance) -> usize {
    q.triplets().len()
}
