//! Spherical random geometric graphs and the multicolor Ramsey lower bounds
//! they feed.
//!
//! The model `H(M, d, p)` puts `M` i.i.d. uniform points on `S^{d-1}` and
//! joins `i` and `j` when `<u_i, u_j> < tau(d, p)`, the threshold that makes
//! each edge present with probability `p`. Small `r`-sets in this graph are
//! less likely to be cliques, and more likely to be independent, than in
//! `G(M, p)`. Using such a graph as the base of a homomorphism coloring
//! improves the exponent of the resulting `r(t; ℓ)` lower bound.
//!
//! Modules:
//!
//! * [`numerics`]: normal quantile, incomplete beta, the sphere inner-product
//!   law and the threshold `tau(d, p)`.
//! * [`exponent`]: closed-form exponents (`κ`, `λ`, `f(θ)`, `α_formal`, the
//!   large-`D` expansion, the `h(p)` curve, Ramsey coefficients).
//! * [`sphere`], [`graph`], [`independence`], [`montecarlo`]: sampling,
//!   clique search, the independence functional and Monte Carlo checks.
//! * [`coloring`]: the randomized ℓ-coloring, its verifier and certificates.
//! * [`io`], [`cli`]: file formats and the command-line front end.
//!
//! Label convention: "clique" is the suppressed event (`p`-terms, factor
//! `a³/p³`), "independent" the enhanced one (`(1-p)`-terms, `a³/(1-p)³`).
//!
//! All randomness comes from ChaCha8 streams indexed by a counter under one
//! master seed, so results do not depend on the rayon thread count.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coloring;
pub mod error;
pub mod exponent;
pub mod graph;
pub mod independence;
pub mod io;
pub mod montecarlo;
pub mod numerics;
pub mod sphere;

pub use coloring::{build_coloring, certify_ramsey_lower, verify_coloring, ColoringCertificate, EdgeColoring};
pub use error::{Error, Result};
pub use exponent::{alpha_formal, optimize_sawin_p, DimScale, ExponentReport, ModelParams, TupleKind};
pub use graph::{contains_clique, Graph};
pub use independence::{independence_probability, IndependenceEstimate, QMode};
pub use montecarlo::{mc_bound_comparison, TupleSampler};
pub use numerics::{solve_tau, sphere_ip_cdf, std_normal_quantile};
pub use sphere::{GeometricGraph, SpherePointCloud};
