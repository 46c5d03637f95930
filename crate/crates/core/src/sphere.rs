//! Uniform points on `S^{d-1}` and the spherical threshold graph built on them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::graph::Graph;
use crate::numerics::solve_tau;

/// RNG for stream `stream` of master seed `seed`.
///
/// Every randomised routine in this crate draws from streams indexed by a
/// counter (a point, a batch of trials, an attempt), so results do not depend
/// on how work is scheduled across threads.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Fills `out` with a uniform point on the unit sphere.
pub fn sample_unit_vector<R: rand::Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    loop {
        let mut norm2 = 0.0;
        for x in out.iter_mut() {
            let z: f64 = StandardNormal.sample(rng);
            *x = z;
            norm2 += z * z;
        }
        if norm2 > 0.0 {
            let inv = 1.0 / norm2.sqrt();
            out.iter_mut().for_each(|x| *x *= inv);
            return;
        }
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `M` unit vectors in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePointCloud {
    points: Vec<f64>,
    m: usize,
    d: usize,
    seed: u64,
}

impl SpherePointCloud {
    /// Samples `m` i.i.d. uniform points; point `i` uses stream `i` of `seed`.
    pub fn sample(m: usize, d: usize, seed: u64) -> Result<Self> {
        if d < 2 {
            return domain(format!("sphere dimension d = {d} must be at least 2"));
        }
        if m < 1 {
            return domain("point count M must be at least 1");
        }
        let mut points = vec![0.0; m * d];
        points.par_chunks_mut(d).enumerate().for_each(|(i, row)| {
            let mut rng = stream_rng(seed, i as u64);
            sample_unit_vector(&mut rng, row);
        });
        Ok(SpherePointCloud { points, m, d, seed })
    }

    /// Wraps existing rows, which must already have unit norm.
    pub fn from_rows(points: Vec<f64>, m: usize, d: usize, seed: u64) -> Result<Self> {
        if d < 2 {
            return domain(format!("sphere dimension d = {d} must be at least 2"));
        }
        if points.len() != m * d {
            return domain(format!("expected {} coordinates, got {}", m * d, points.len()));
        }
        for (i, row) in points.chunks(d).enumerate() {
            let norm = dot(row, row).sqrt();
            if (norm - 1.0).abs() > 1e-9 {
                return domain(format!("row {i} has norm {norm}, expected 1"));
            }
        }
        Ok(SpherePointCloud { points, m, d, seed })
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.d..(i + 1) * self.d]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.points
    }

    pub fn inner(&self, i: usize, j: usize) -> f64 {
        dot(self.point(i), self.point(j))
    }
}

/// The spherical threshold graph: `ij` is an edge iff `<u_i, u_j> < tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricGraph {
    pub graph: Graph,
    pub tau: f64,
    pub p: f64,
    pub d: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphProvenance {
    pub n: usize,
    pub d: usize,
    pub p: f64,
    pub tau: f64,
    pub seed: u64,
}

impl GeometricGraph {
    /// Builds the graph at the threshold `tau(d, p)`.
    pub fn build(cloud: &SpherePointCloud, p: f64) -> Result<Self> {
        let tau = solve_tau(cloud.dim() as u64, p)?;
        Ok(Self::with_tau(cloud, p, tau))
    }

    /// Builds the graph at an explicit threshold.
    pub fn with_tau(cloud: &SpherePointCloud, p: f64, tau: f64) -> Self {
        let m = cloud.len();
        let rows: Vec<Vec<usize>> = (0..m)
            .into_par_iter()
            .map(|i| (0..i).filter(|&j| cloud.inner(i, j) < tau).collect())
            .collect();
        let mut graph = Graph::empty(m);
        for (i, row) in rows.into_iter().enumerate() {
            for j in row {
                graph.add_edge(i, j);
            }
        }
        GeometricGraph {
            graph,
            tau,
            p,
            d: cloud.dim(),
            seed: cloud.seed(),
        }
    }

    /// Samples `m` points and builds the graph in one step.
    pub fn sample(m: usize, d: usize, p: f64, seed: u64) -> Result<Self> {
        let cloud = SpherePointCloud::sample(m, d, seed)?;
        Self::build(&cloud, p)
    }

    pub fn provenance(&self) -> GraphProvenance {
        GraphProvenance {
            n: self.graph.n_vertices(),
            d: self.d,
            p: self.p,
            tau: self.tau,
            seed: self.seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn norms_are_one() {
        let cloud = SpherePointCloud::sample(200, 17, 1).unwrap();
        for i in 0..cloud.len() {
            let p = cloud.point(i);
            assert!((dot(p, p) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let a = SpherePointCloud::sample(50, 8, 42).unwrap();
        let b = SpherePointCloud::sample(50, 8, 42).unwrap();
        let c = SpherePointCloud::sample(50, 8, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.as_slice(), c.as_slice());
    }

    #[test]
    fn independent_of_thread_count() {
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| GeometricGraph::sample(300, 20, 0.4, 9).unwrap());
        let b = four.install(|| GeometricGraph::sample(300, 20, 0.4, 9).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn pairwise_inner_products_centered() {
        let cloud = SpherePointCloud::sample(10_000, 50, 3).unwrap();
        let mut rng = stream_rng(77, 0);
        let pairs = 200_000;
        let mut sum = 0.0;
        for _ in 0..pairs {
            let i = rng.random_range(0..cloud.len());
            let mut j = rng.random_range(0..cloud.len());
            while j == i {
                j = rng.random_range(0..cloud.len());
            }
            sum += cloud.inner(i, j);
        }
        // each inner product has standard deviation 1/sqrt(d)
        let mean = sum / pairs as f64;
        assert!(mean.abs() < 4.0 / (pairs as f64).sqrt(), "{mean}");
    }

    #[test]
    fn hand_geometry() {
        let pts = vec![1.0, 0.0, 0.0, 1.0, -1.0, 0.0];
        let cloud = SpherePointCloud::from_rows(pts, 3, 2, 0).unwrap();
        let g = GeometricGraph::with_tau(&cloud, 0.5, -0.5);
        assert_eq!(g.graph.edge_count(), 1);
        assert!(g.graph.has_edge(0, 2));
        assert!(SpherePointCloud::from_rows(vec![1.0, 1.0], 1, 2, 0).is_err());
    }

    #[test]
    fn strict_threshold() {
        let pts = vec![1.0, 0.0, 0.0, 1.0];
        let cloud = SpherePointCloud::from_rows(pts, 2, 2, 0).unwrap();
        assert_eq!(GeometricGraph::with_tau(&cloud, 0.5, 0.0).graph.edge_count(), 0);
        assert_eq!(GeometricGraph::with_tau(&cloud, 0.5, 1e-300).graph.edge_count(), 1);
    }

    #[test]
    fn near_complete_at_high_p() {
        let g = GeometricGraph::sample(400, 3, 0.999, 5).unwrap();
        let pairs: f64 = 400.0 * 399.0 / 2.0;
        let sd = (0.999 * 0.001 / pairs).sqrt();
        assert!((g.graph.density() - 0.999).abs() < 3.0 * 3.0 * sd.max(1e-4), "{}", g.graph.density());
    }

    #[test]
    fn edge_density_matches_p() {
        let g = GeometricGraph::sample(2000, 100, 0.455, 21).unwrap();
        let pairs: f64 = 2000.0 * 1999.0 / 2.0;
        let tol = 3.0 * 3.0 * (0.455 * 0.545 / pairs).sqrt();
        assert!((g.graph.density() - 0.455).abs() < tol, "{}", g.graph.density());
    }

    #[test]
    fn rebuild_from_cloud_and_tau_is_bit_identical() {
        let cloud = SpherePointCloud::sample(150, 12, 8).unwrap();
        let g = GeometricGraph::build(&cloud, 0.3).unwrap();
        let again = GeometricGraph::with_tau(&cloud, 0.3, g.tau);
        assert_eq!(g.graph, again.graph);
    }

    #[test]
    fn rejects_bad_dimension() {
        assert!(SpherePointCloud::sample(3, 1, 0).is_err());
        assert!(SpherePointCloud::sample(0, 3, 0).is_err());
    }
}
