use std::time::Instant;

use super::{apply_flip, flip_gain, local_fields, SolveResult};
use crate::error::{Error, Result};
use crate::graph::CutAssignment;
use crate::qubo::{qubo_objective, QuboInstance};

/// Largest dimension the enumerator accepts.
pub const EXACT_CAP: usize = 26;

/// Exhaustive maximization in Gray-code order.
///
/// When every row of the symmetric matrix sums to zero (all max cut
/// instances), `f(x) = f(1 − x)` and variable 0 is pinned to 0. Among tied
/// optima the one with the smallest binary value (bit `u` = `x_u`) wins.
pub fn solve_exact(q: &QuboInstance) -> Result<SolveResult> {
    let n = q.dimension();
    if n > EXACT_CAP {
        return Err(Error::TooLarge {
            dimension: n,
            cap: EXACT_CAP,
        });
    }
    let started = Instant::now();
    let adj = q.adjacency();
    let first_free = usize::from(n > 0 && is_cut_symmetric(&adj));
    let free = n - first_free;

    let mut x = vec![false; n];
    let mut h = local_fields(&adj, &x);
    let mut value = 0.0;
    let mut mask: u64 = 0;
    let mut best = (0.0, 0u64);
    for step in 1u64..(1u64 << free) {
        let k = first_free + step.trailing_zeros() as usize;
        value += flip_gain(&x, &h, k);
        apply_flip(&adj, &mut x, &mut h, k);
        mask ^= 1 << k;
        if value > best.0 || (value == best.0 && mask < best.1) {
            best = (value, mask);
        }
    }

    let assignment = CutAssignment::from_mask(n, best.1);
    let objective = qubo_objective(q, &assignment)?;
    Ok(SolveResult {
        assignment,
        objective,
        solver_name: "exact".into(),
        elapsed: started.elapsed(),
        exact: true,
    })
}

fn is_cut_symmetric(adj: &crate::qubo::Adjacency) -> bool {
    adj.linear.iter().zip(&adj.neighbors).all(|(&d, nbrs)| {
        let off: f64 = nbrs.iter().map(|&(_, c)| c / 2.0).sum();
        let scale = d.abs() + nbrs.iter().map(|&(_, c)| c.abs() / 2.0).sum::<f64>();
        (d + off).abs() <= 1e-12 * scale.max(1.0)
    })
}
