//! Weighted undirected graphs, cuts, and the instance file format.
//!
//! Instance files follow the layout of the public max cut corpora: optional
//! `#` comments, a header `n m`, then `m` lines `u v w` with 1-indexed
//! endpoints. In memory every index is 0-based.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{contract, Error, Result};

/// An undirected edge with `u < v` and a strictly positive weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// A weighted undirected simple graph.
///
/// Construction normalizes the input: weights are replaced by their absolute
/// value, zero-weight edges and self-loops are dropped, and repeated pairs are
/// merged by summing weights. Edges keep the order of first appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    node_count: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    pub fn new<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if node_count == 0 {
            return Err(contract("graph must have at least one node"));
        }
        let mut slot: HashMap<(usize, usize), usize> = HashMap::new();
        let mut out: Vec<Edge> = Vec::new();
        for (u, v, w) in edges {
            if u >= node_count || v >= node_count {
                return Err(contract(format!(
                    "edge ({u}, {v}) out of range for {node_count} nodes"
                )));
            }
            if !w.is_finite() {
                return Err(contract(format!("edge ({u}, {v}) has non-finite weight {w}")));
            }
            if u == v {
                log::warn!("dropping self-loop on node {u}");
                continue;
            }
            let w = w.abs();
            if w == 0.0 {
                continue;
            }
            let key = (u.min(v), u.max(v));
            match slot.get(&key) {
                Some(&i) => out[i].w += w,
                None => {
                    slot.insert(key, out.len());
                    out.push(Edge {
                        u: key.0,
                        v: key.1,
                        w,
                    });
                }
            }
        }
        Ok(Self {
            node_count,
            edges: out,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    /// Returns a copy with every weight multiplied by `factor` (> 0).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(contract(format!("scale factor must be positive, got {factor}")));
        }
        Ok(Self {
            node_count: self.node_count,
            edges: self
                .edges
                .iter()
                .map(|e| Edge { w: e.w * factor, ..*e })
                .collect(),
        })
    }

    /// Component label for every node, labels dense in `0..count`.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut parent: Vec<usize> = (0..self.node_count).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
            if a != b {
                parent[a] = b;
            }
        }
        let mut label = vec![usize::MAX; self.node_count];
        let mut roots: HashMap<usize, usize> = HashMap::new();
        for x in 0..self.node_count {
            let r = find(&mut parent, x);
            let next = roots.len();
            label[x] = *roots.entry(r).or_insert(next);
        }
        let count = roots.len();
        (label, count)
    }

    pub fn component_count(&self) -> usize {
        self.components().1
    }

    /// Reads an instance file. Parse errors carry the 1-based line number.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = fs::File::open(path)?;
        Self::read(BufReader::new(file), path)
    }

    /// Parses instance text from any reader; `origin` is used in error messages.
    pub fn read<R: BufRead>(reader: R, origin: &Path) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            path: origin.to_path_buf(),
            line,
            message,
        };

        let mut header: Option<(usize, usize)> = None;
        let mut raw: Vec<(usize, usize, f64)> = Vec::new();
        let mut last_line = 0;
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            last_line = lineno;
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            match header {
                None => {
                    if fields.len() != 2 {
                        return Err(err(lineno, format!("expected header `n m`, got `{trimmed}`")));
                    }
                    let n = fields[0]
                        .parse::<usize>()
                        .map_err(|e| err(lineno, format!("bad node count: {e}")))?;
                    let m = fields[1]
                        .parse::<usize>()
                        .map_err(|e| err(lineno, format!("bad edge count: {e}")))?;
                    if n == 0 {
                        return Err(err(lineno, "node count must be positive".into()));
                    }
                    header = Some((n, m));
                }
                Some((n, m)) => {
                    if raw.len() == m {
                        return Err(err(
                            lineno,
                            format!("more edge lines than the {m} declared in the header"),
                        ));
                    }
                    if fields.len() != 3 {
                        return Err(err(lineno, format!("expected `u v w`, got `{trimmed}`")));
                    }
                    let endpoint = |s: &str| -> Result<usize> {
                        let x = s
                            .parse::<usize>()
                            .map_err(|e| err(lineno, format!("bad endpoint `{s}`: {e}")))?;
                        if x == 0 || x > n {
                            return Err(err(lineno, format!("endpoint {x} outside [1, {n}]")));
                        }
                        Ok(x - 1)
                    };
                    let u = endpoint(fields[0])?;
                    let v = endpoint(fields[1])?;
                    let w = fields[2]
                        .parse::<f64>()
                        .map_err(|e| err(lineno, format!("bad weight `{}`: {e}", fields[2])))?;
                    if !w.is_finite() {
                        return Err(err(lineno, format!("non-finite weight `{}`", fields[2])));
                    }
                    raw.push((u, v, w));
                }
            }
        }
        let (n, m) = header.ok_or_else(|| err(last_line.max(1), "missing header".into()))?;
        if raw.len() != m {
            return Err(err(
                last_line + 1,
                format!("header declares {m} edges but found {}", raw.len()),
            ));
        }
        Self::new(n, raw)
    }

    /// Writes the graph in instance format (1-indexed, round-trip-exact weights).
    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.node_count, self.edges.len())?;
        for e in &self.edges {
            writeln!(out, "{} {} {}", e.u + 1, e.v + 1, e.w)?;
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut file = std::io::BufWriter::new(fs::File::create(path)?);
        self.write(&mut file)?;
        file.flush()?;
        Ok(())
    }
}

/// Which side of the cut each node falls on. Bit `u` set means `u ∈ S`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CutAssignment {
    bits: Vec<bool>,
}

impl CutAssignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            bits: vec![false; len],
        }
    }

    /// Assignment whose bit `u` is bit `u` of `mask`.
    pub fn from_mask(len: usize, mask: u64) -> Self {
        Self {
            bits: (0..len).map(|u| (mask >> u) & 1 == 1).collect(),
        }
    }

    pub fn from_members(len: usize, members: &[usize]) -> Self {
        let mut bits = vec![false; len];
        for &u in members {
            bits[u] = true;
        }
        Self { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, u: usize) -> bool {
        self.bits[u]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn complement(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }
}

impl fmt::Display for CutAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for CutAssignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(contract(format!("invalid assignment character `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }
}

/// Total weight of edges whose endpoints lie on opposite sides of `s`.
pub fn cut_weight(g: &WeightedGraph, s: &CutAssignment) -> Result<f64> {
    if s.len() != g.node_count() {
        return Err(contract(format!(
            "assignment has length {} but graph has {} nodes",
            s.len(),
            g.node_count()
        )));
    }
    Ok(g.edges()
        .iter()
        .filter(|e| s.get(e.u) != s.get(e.v))
        .map(|e| e.w)
        .sum())
}

/// Synthetic instance families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    /// Erdős–Rényi with unit weights, like the g05 corpus.
    G05,
    /// Erdős–Rényi with integer weights drawn uniformly from `[1, weight_range]`.
    Weighted,
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g05" | "g05-style" => Ok(Self::G05),
            "weighted" | "weighted-style" => Ok(Self::Weighted),
            other => Err(Error::Config(format!("unknown generator kind `{other}`"))),
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::G05 => "g05",
            Self::Weighted => "weighted",
        })
    }
}

/// Generates a random instance; each pair appears independently with
/// probability `density`. Deterministic in `seed`.
pub fn generate_instance(
    kind: GeneratorKind,
    n: usize,
    density: f64,
    weight_range: u32,
    seed: u64,
) -> Result<WeightedGraph> {
    if n < 2 {
        return Err(Error::Config(format!("need at least 2 nodes, got {n}")));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::Config(format!("density must lie in (0, 1], got {density}")));
    }
    if kind == GeneratorKind::Weighted && weight_range == 0 {
        return Err(Error::Config("weight range must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen_bool(density) {
                let w = match kind {
                    GeneratorKind::G05 => 1.0,
                    GeneratorKind::Weighted => f64::from(rng.gen_range(1..=weight_range)),
                };
                edges.push((u, v, w));
            }
        }
    }
    WeightedGraph::new(n, edges)
}
