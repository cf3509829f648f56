use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{check_domain, check_target, PotentialError};
use crate::map::Truncation;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WalkEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Transition tables for the conductance-weighted walk.
struct Chain {
    start: Vec<usize>,
    cumulative: Vec<f64>,
    head: Vec<usize>,
}

impl Chain {
    fn new(trunc: &Truncation) -> Self {
        let map = trunc.map();
        let mut start = vec![0];
        let (mut cumulative, mut head) = (Vec::new(), Vec::new());
        for v in 0..map.vertex_count() {
            let mut acc = 0.0;
            for e in map.darts_from(v) {
                acc += map.conductance(e);
                cumulative.push(acc);
                head.push(map.head(e));
            }
            start.push(cumulative.len());
        }
        Self { start, cumulative, head }
    }

    fn step(&self, v: usize, rng: &mut ChaCha8Rng) -> usize {
        let (a, b) = (self.start[v], self.start[v + 1]);
        let row = &self.cumulative[a..b];
        let x = rng.gen::<f64>() * row[row.len() - 1];
        let k = row.partition_point(|&c| c <= x).min(row.len() - 1);
        self.head[a + k]
    }
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn summarize(outcomes: &[f64]) -> WalkEstimate {
    let n = outcomes.len() as f64;
    let mean = outcomes.iter().sum::<f64>() / n;
    let var = if outcomes.len() > 1 {
        outcomes.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    WalkEstimate { mean, stderr: (var / n).sqrt(), samples: outcomes.len() }
}

/// Monte Carlo estimate of `E_v[φ(X_τ)]`, where `τ` is the hitting time of
/// the boundary. Sample `i` draws from stream `i` of a generator seeded
/// with `seed`, so results are reproducible regardless of thread count.
pub fn walk_limit_estimate(
    trunc: &Truncation,
    phi: &[f64],
    v: usize,
    samples: usize,
    seed: u64,
) -> Result<WalkEstimate, PotentialError> {
    check_domain(trunc.map(), phi)?;
    if v >= trunc.vertex_count() {
        return Err(PotentialError::UnknownVertex(v));
    }
    if samples == 0 {
        return Err(PotentialError::InvalidArgument("at least one sample is required".into()));
    }
    let chain = Chain::new(trunc);
    let outcomes: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i);
            let mut x = v;
            while !trunc.is_boundary(x) {
                x = chain.step(x, &mut rng);
            }
            phi[x]
        })
        .collect();
    Ok(summarize(&outcomes))
}

/// Monte Carlo estimate of `Σ_{v∈A} c(v)·P_v(reach the boundary before
/// returning to A)`, with `samples` walks per vertex of `set`.
pub fn walk_escape_capacity(
    trunc: &Truncation,
    set: &[usize],
    samples: usize,
    seed: u64,
) -> Result<WalkEstimate, PotentialError> {
    let in_set = check_target(trunc, set)?;
    if samples == 0 {
        return Err(PotentialError::InvalidArgument("at least one sample is required".into()));
    }
    let map = trunc.map();
    let chain = Chain::new(trunc);
    let mut members: Vec<usize> = set.to_vec();
    members.sort_unstable();
    members.dedup();
    let (mut mean, mut var) = (0.0, 0.0);
    for (k, &v) in members.iter().enumerate() {
        let outcomes: Vec<f64> = (0..samples as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream(seed, (k * samples) as u64 + i);
                let mut x = chain.step(v, &mut rng);
                loop {
                    if trunc.is_boundary(x) {
                        return 1.0;
                    }
                    if in_set[x] {
                        return 0.0;
                    }
                    x = chain.step(x, &mut rng);
                }
            })
            .collect();
        let est = summarize(&outcomes);
        let c: f64 = map.darts_from(v).map(|e| map.conductance(e)).sum();
        mean += c * est.mean;
        var += (c * est.stderr).powi(2);
    }
    Ok(WalkEstimate { mean, stderr: var.sqrt(), samples: samples * members.len() })
}
