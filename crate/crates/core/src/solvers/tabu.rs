use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{apply_flip, flip_gain, local_fields, SolveResult};
use crate::error::{Error, Result};
use crate::graph::CutAssignment;
use crate::qubo::{qubo_objective, QuboInstance};

/// Budget and knobs for [`solve_tabu`]. `None` fields use the defaults
/// derived from the instance dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TabuParams {
    pub max_iters: Option<u64>,
    pub max_time: Option<Duration>,
    /// Moves a flipped variable stays tabu. Default `10 + ⌈n/10⌉`.
    pub tenure: Option<usize>,
    /// Non-improving moves before a random restart. Default `50 n`.
    pub restart_after: Option<u64>,
}

impl TabuParams {
    pub fn iterations(iters: u64) -> Self {
        Self {
            max_iters: Some(iters),
            max_time: None,
            tenure: None,
            restart_after: None,
        }
    }

    pub fn seconds(secs: f64) -> Self {
        Self {
            max_iters: None,
            max_time: Some(Duration::from_secs_f64(secs)),
            tenure: None,
            restart_after: None,
        }
    }

    fn validate(&self) -> Result<()> {
        let iters_ok = self.max_iters.is_none_or(|i| i > 0);
        let time_ok = self.max_time.is_none_or(|t| !t.is_zero());
        if (self.max_iters.is_none() && self.max_time.is_none()) || !iters_ok || !time_ok {
            return Err(Error::Config(
                "tabu search needs a positive iteration or time budget".into(),
            ));
        }
        Ok(())
    }
}

const TIME_CHECK_EVERY: u64 = 256;

/// Single-flip tabu search maximizing `xᵀQx`.
///
/// Each move takes the best admissible flip; a tabu flip is admissible only
/// when it would beat the incumbent. Ties among equal gains are broken at
/// random. After `restart_after` moves without a new incumbent the walk
/// restarts from a fresh random point. With an iteration-only budget the run
/// is fully determined by `seed`.
pub fn solve_tabu(q: &QuboInstance, params: &TabuParams, seed: u64) -> Result<SolveResult> {
    params.validate()?;
    let started = Instant::now();
    let n = q.dimension();
    if n == 0 {
        return finish(q, Vec::new(), started);
    }
    let adj = q.adjacency();
    let tenure = params.tenure.unwrap_or(10 + n.div_ceil(10)) as u64;
    let restart_after = params.restart_after.unwrap_or(50 * n as u64).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut x: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let mut h = local_fields(&adj, &x);
    let mut value = objective_of(&adj, &x);
    let mut best_x = x.clone();
    let mut best = value;
    let mut tabu_until = vec![0u64; n];
    let mut stale = 0u64;

    let mut iter = 0u64;
    loop {
        if params.max_iters.is_some_and(|m| iter >= m) {
            break;
        }
        if let Some(limit) = params.max_time {
            if iter.is_multiple_of(TIME_CHECK_EVERY) && started.elapsed() >= limit {
                break;
            }
        }
        iter += 1;

        let mut chosen: Option<(usize, f64)> = None;
        let mut fallback: Option<(usize, f64)> = None;
        let mut ties = 0u32;
        for i in 0..n {
            let gain = flip_gain(&x, &h, i);
            if fallback.is_none_or(|(_, g)| gain > g) {
                fallback = Some((i, gain));
            }
            let admissible = tabu_until[i] < iter || value + gain > best;
            if !admissible {
                continue;
            }
            match chosen {
                Some((_, g)) if gain < g => {}
                Some((_, g)) if gain == g => {
                    ties += 1;
                    if rng.gen_range(0..=ties) == 0 {
                        chosen = Some((i, gain));
                    }
                }
                _ => {
                    ties = 0;
                    chosen = Some((i, gain));
                }
            }
        }
        let (k, gain) = chosen.or(fallback).expect("dimension is positive");
        apply_flip(&adj, &mut x, &mut h, k);
        value += gain;
        tabu_until[k] = iter + tenure;

        if value > best {
            best = value;
            best_x.copy_from_slice(&x);
            stale = 0;
        } else {
            stale += 1;
            if stale >= restart_after {
                x.iter_mut().for_each(|b| *b = rng.gen());
                h = local_fields(&adj, &x);
                value = objective_of(&adj, &x);
                tabu_until.iter_mut().for_each(|t| *t = 0);
                stale = 0;
                if value > best {
                    best = value;
                    best_x.copy_from_slice(&x);
                }
            }
        }
    }
    finish(q, best_x, started)
}

fn objective_of(adj: &crate::qubo::Adjacency, x: &[bool]) -> f64 {
    let mut total = 0.0;
    for (i, nbrs) in adj.neighbors.iter().enumerate() {
        if !x[i] {
            continue;
        }
        total += adj.linear[i];
        for &(j, c) in nbrs {
            if j > i && x[j] {
                total += c;
            }
        }
    }
    total
}

fn finish(q: &QuboInstance, bits: Vec<bool>, started: Instant) -> Result<SolveResult> {
    let assignment = CutAssignment::new(bits);
    let objective = qubo_objective(q, &assignment)?;
    Ok(SolveResult {
        assignment,
        objective,
        solver_name: "tabu".into(),
        elapsed: started.elapsed(),
        exact: false,
    })
}
