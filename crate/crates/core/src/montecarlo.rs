//! Monte Carlo estimates of clique and independent-set probabilities for `r`
//! fresh uniform points on `S^{d-1}`, compared against the closed-form bounds.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::exponent::{tuple_log_bound, DimScale, TupleKind};
use crate::independence::{IndependenceEstimate, MC_BATCH};
use crate::numerics::solve_tau;
use crate::sphere::{dot, sample_unit_vector, stream_rng};

/// How the `r` points of a trial are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TupleSampler {
    /// Sample and normalise `r` Gaussian vectors in `R^d`.
    #[default]
    Direct,
    /// Sample their Gram matrix directly (Bartlett decomposition of the
    /// Wishart law). Same distribution of inner products, `O(r²)` per trial.
    Gram,
}

/// Raw hit counts for both kinds from one pass over the trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TupleCounts {
    pub clique: u64,
    pub independent: u64,
    pub trials: u64,
}

/// Counts trials whose `r` points form a clique (all inner products below
/// `tau`) and an independent set (none below).
pub fn mc_tuple_counts(
    r: usize,
    d: usize,
    p: f64,
    trials: u64,
    seed: u64,
    sampler: TupleSampler,
) -> Result<TupleCounts> {
    if r < 1 {
        return domain("tuple size r must be at least 1");
    }
    if trials < 1 {
        return domain("trials must be at least 1");
    }
    if sampler == TupleSampler::Gram && d < r {
        return domain(format!("Gram sampling needs d >= r, got d = {d}, r = {r}"));
    }
    let tau = solve_tau(d as u64, p)?;
    let batches = trials.div_ceil(MC_BATCH);
    let (clique, independent) = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(seed, b);
            let n = MC_BATCH.min(trials - b * MC_BATCH);
            let mut gram = GramScratch::new(r, d);
            let (mut c, mut i) = (0u64, 0u64);
            for _ in 0..n {
                let (is_clique, is_indep) = match sampler {
                    TupleSampler::Direct => gram.direct(&mut rng, tau),
                    TupleSampler::Gram => gram.bartlett(&mut rng, tau),
                };
                c += is_clique as u64;
                i += is_indep as u64;
            }
            (c, i)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(TupleCounts {
        clique,
        independent,
        trials,
    })
}

struct GramScratch {
    r: usize,
    d: usize,
    points: Vec<f64>,
    lower: Vec<f64>,
    chi: Vec<ChiSquared<f64>>,
}

impl GramScratch {
    fn new(r: usize, d: usize) -> Self {
        let chi = (0..r.min(d))
            .map(|i| ChiSquared::new((d - i) as f64).expect("positive degrees of freedom"))
            .collect();
        GramScratch {
            r,
            d,
            points: vec![0.0; r * d],
            lower: vec![0.0; r * r],
            chi,
        }
    }

    /// Returns (all pairs below tau, no pair below tau).
    fn classify(&self, ip: impl Fn(usize, usize) -> f64, tau: f64) -> (bool, bool) {
        let (mut all, mut none) = (true, true);
        for i in 0..self.r {
            for j in 0..i {
                if ip(i, j) < tau {
                    none = false;
                } else {
                    all = false;
                }
                if !all && !none {
                    return (false, false);
                }
            }
        }
        (all, none)
    }

    fn direct<R: Rng>(&mut self, rng: &mut R, tau: f64) -> (bool, bool) {
        let d = self.d;
        for row in self.points.chunks_mut(d) {
            sample_unit_vector(rng, row);
        }
        let pts = &self.points;
        self.classify(|i, j| dot(&pts[i * d..(i + 1) * d], &pts[j * d..(j + 1) * d]), tau)
    }

    fn bartlett<R: Rng>(&mut self, rng: &mut R, tau: f64) -> (bool, bool) {
        let r = self.r;
        for i in 0..r {
            self.lower[i * r + i] = self.chi[i].sample(rng).sqrt();
            for j in 0..i {
                self.lower[i * r + j] = StandardNormal.sample(rng);
            }
        }
        let l = &self.lower;
        let row = |i: usize| &l[i * r..i * r + i + 1];
        let norms: Vec<f64> = (0..r).map(|i| dot(row(i), row(i)).sqrt()).collect();
        self.classify(
            |i, j| {
                // rows are lower-triangular, so only the first min(i, j)+1 entries overlap
                let k = i.min(j) + 1;
                dot(&row(i)[..k], &row(j)[..k]) / (norms[i] * norms[j])
            },
            tau,
        )
    }
}

/// Frequency with which `r` uniform points form a clique or independent set.
pub fn mc_tuple_prob(
    r: usize,
    d: usize,
    p: f64,
    kind: TupleKind,
    trials: u64,
    seed: u64,
) -> Result<IndependenceEstimate> {
    let counts = mc_tuple_counts(r, d, p, trials, seed, TupleSampler::Direct)?;
    let hits = match kind {
        TupleKind::Clique => counts.clique,
        TupleKind::Independent => counts.independent,
    };
    Ok(IndependenceEstimate::monte_carlo(hits, trials, r as u64))
}

/// One kind's row in a [`BoundComparison`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub kind: TupleKind,
    pub estimate: f64,
    pub std_error: f64,
    /// Log of the closed-form upper bound (unclamped).
    pub log_bound: f64,
    pub bound: f64,
    /// `p^{C(r,2)}` for cliques, `(1-p)^{C(r,2)}` for independent sets.
    pub baseline: f64,
    /// `(estimate - baseline) / std_error`; zero when the error is zero.
    pub z_vs_baseline: f64,
    /// `(estimate - bound) / std_error`.
    pub z_vs_bound: f64,
    /// Estimate exceeds the bound by more than [`VIOLATION_SIGMAS`] standard errors.
    pub violation: bool,
}

/// Threshold in standard errors for flagging a bound violation.
pub const VIOLATION_SIGMAS: f64 = 4.0;

impl ComparisonRow {
    pub fn new(kind: TupleKind, est: &IndependenceEstimate, log_bound: f64, baseline: f64) -> Self {
        let bound = log_bound.exp();
        let z = |target: f64| {
            if est.std_error > 0.0 {
                (est.value - target) / est.std_error
            } else {
                0.0
            }
        };
        let excess = est.value - bound;
        ComparisonRow {
            kind,
            estimate: est.value,
            std_error: est.std_error,
            log_bound,
            bound,
            baseline,
            z_vs_baseline: z(baseline),
            z_vs_bound: z(bound),
            violation: excess > 0.0 && excess > VIOLATION_SIGMAS * est.std_error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundComparison {
    pub r: usize,
    pub d: usize,
    #[serde(rename = "D")]
    pub scale: DimScale,
    pub p: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub tau: f64,
    pub trials: u64,
    pub seed: u64,
    pub rows: Vec<ComparisonRow>,
}

impl BoundComparison {
    pub fn any_violation(&self) -> bool {
        self.rows.iter().any(|r| r.violation)
    }

    pub fn row(&self, kind: TupleKind) -> &ComparisonRow {
        self.rows.iter().find(|r| r.kind == kind).expect("both kinds present")
    }
}

/// Sampled clique/independent frequencies next to their bounds and the
/// Erdős–Rényi baselines.
#[allow(clippy::too_many_arguments)]
pub fn mc_bound_comparison(
    r: usize,
    d: usize,
    scale: DimScale,
    p: f64,
    k: f64,
    trials: u64,
    seed: u64,
    sampler: TupleSampler,
) -> Result<BoundComparison> {
    let counts = mc_tuple_counts(r, d, p, trials, seed, sampler)?;
    let pairs = (r * (r.saturating_sub(1)) / 2) as i32;
    let mut rows = Vec::with_capacity(2);
    for (kind, hits, base) in [
        (TupleKind::Clique, counts.clique, p.powi(pairs)),
        (TupleKind::Independent, counts.independent, (1.0 - p).powi(pairs)),
    ] {
        let est = IndependenceEstimate::monte_carlo(hits, trials, r as u64);
        let log_bound = tuple_log_bound(r as u64, Some(d as u64), scale, p, k, kind)?;
        rows.push(ComparisonRow::new(kind, &est, log_bound.raw(), base));
    }
    Ok(BoundComparison {
        r,
        d,
        scale,
        p,
        k,
        tau: solve_tau(d as u64, p)?,
        trials,
        seed,
        rows,
    })
}
