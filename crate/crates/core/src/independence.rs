//! The independence functional: the probability that `s` uniform vertices,
//! drawn with replacement, span an independent set.
//!
//! A tuple with repeats is independent iff its set of distinct vertices is.
//! Grouping the `M^s` ordered tuples by their support gives
//!
//! ```text
//! q = M^{-s} · Σ_k surj(s, k) · i_k
//! ```
//!
//! where `i_k` counts independent `k`-sets and `surj(s, k) = k! S(s, k)`
//! counts ordered `s`-tuples onto a fixed `k`-set.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::graph::{count_independent_sets_by_size, Graph};
use crate::sphere::stream_rng;

/// Trials per RNG stream in every Monte Carlo routine.
pub const MC_BATCH: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMode {
    Exact,
    MonteCarlo,
}

/// An exact or sampled probability with its uncertainty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndependenceEstimate {
    pub value: f64,
    pub mode: EstimateMode,
    /// Zero in exact mode.
    pub trials: u64,
    /// Zero in exact mode; `sqrt(v(1-v)/trials)` otherwise.
    pub std_error: f64,
    /// Tuple length.
    pub s: u64,
    /// `(count, M^s)` when both fit in 128 bits.
    pub exact_ratio: Option<(u128, u128)>,
}

impl IndependenceEstimate {
    pub fn monte_carlo(hits: u64, trials: u64, s: u64) -> Self {
        let v = hits as f64 / trials as f64;
        IndependenceEstimate {
            value: v,
            mode: EstimateMode::MonteCarlo,
            trials,
            std_error: (v * (1.0 - v) / trials as f64).sqrt(),
            s,
            exact_ratio: None,
        }
    }
}

/// How [`independence_probability`] evaluates `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QMode {
    Exact,
    MonteCarlo { trials: u64, seed: u64 },
}

/// `surj(s, k)` for `k = 0..=s`, or `None` if some entry overflows `u128`.
pub fn surjection_counts(s: u64) -> Option<Vec<u128>> {
    let s = s as usize;
    let mut row = vec![1u128];
    for n in 1..=s {
        let mut next = vec![0u128; n + 1];
        for k in 1..=n {
            let a = row.get(k).copied().unwrap_or(0);
            let b = row[k - 1];
            next[k] = (k as u128).checked_mul(a.checked_add(b)?)?;
        }
        row = next;
    }
    Some(row)
}

/// `ln surj(s, k)` for `k = 0..=s`, via the same recurrence in log space.
pub fn ln_surjection_counts(s: u64) -> Vec<f64> {
    let s = s as usize;
    let mut row = vec![0.0f64];
    for n in 1..=s {
        let mut next = vec![f64::NEG_INFINITY; n + 1];
        for k in 1..=n {
            let a = row.get(k).copied().unwrap_or(f64::NEG_INFINITY);
            let b = row[k - 1];
            next[k] = (k as f64).ln() + log_add(a, b);
        }
        row = next;
    }
    row
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Probability that `s` uniform vertices (with replacement) are independent.
pub fn independence_probability(graph: &Graph, s: u64, mode: QMode) -> Result<IndependenceEstimate> {
    if s < 1 {
        return domain("tuple length s must be at least 1");
    }
    let m = graph.n_vertices();
    if m == 0 {
        return domain("graph has no vertices");
    }
    match mode {
        QMode::Exact => exact_q(graph, s),
        QMode::MonteCarlo { trials, seed } => {
            if trials == 0 {
                return domain("trials must be at least 1");
            }
            Ok(mc_q(graph, s, trials, seed))
        }
    }
}

fn exact_q(graph: &Graph, s: u64) -> Result<IndependenceEstimate> {
    let m = graph.n_vertices();
    let counts = count_independent_sets_by_size(graph)?;
    let top = (s as usize).min(m);
    let exact = surjection_counts(s).and_then(|surj| {
        let mut num = 0u128;
        for k in 1..=top {
            num = num.checked_add(surj[k].checked_mul(counts[k])?)?;
        }
        let den = (m as u128).checked_pow(s as u32)?;
        Some((num, den))
    });
    let value = match exact {
        Some((num, den)) => ratio_to_f64(num, den),
        None => {
            let ln_surj = ln_surjection_counts(s);
            let ln_m = (m as f64).ln();
            let mut acc = f64::NEG_INFINITY;
            for k in 1..=top {
                if counts[k] > 0 {
                    acc = log_add(acc, ln_surj[k] + (counts[k] as f64).ln() - s as f64 * ln_m);
                }
            }
            acc.exp()
        }
    };
    Ok(IndependenceEstimate {
        value,
        mode: EstimateMode::Exact,
        trials: 0,
        std_error: 0.0,
        s,
        exact_ratio: exact,
    })
}

fn ratio_to_f64(num: u128, den: u128) -> f64 {
    // reduce first so both sides convert with minimal rounding
    let g = gcd(num, den);
    let (n, d) = (num / g.max(1), den / g.max(1));
    n as f64 / d as f64
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn mc_q(graph: &Graph, s: u64, trials: u64, seed: u64) -> IndependenceEstimate {
    let m = graph.n_vertices();
    let batches = trials.div_ceil(MC_BATCH);
    let hits: u64 = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(seed, b);
            let n = MC_BATCH.min(trials - b * MC_BATCH);
            let mut tuple = vec![0usize; s as usize];
            let mut hits = 0;
            for _ in 0..n {
                tuple.iter_mut().for_each(|v| *v = rng.random_range(0..m));
                if graph.is_independent(&tuple) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    IndependenceEstimate::monte_carlo(hits, trials, s)
}
