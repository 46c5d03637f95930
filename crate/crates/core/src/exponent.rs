//! Closed-form exponents of the geometric construction.
//!
//! All logarithms are natural. The functional being minimised is
//!
//! ```text
//! f(θ) = (1-θ)(-½ ln p + κ/D) - ½θ² ln(1-p) - (λ/D) θ³ - (2-θ) K/D²
//! ```
//!
//! on `θ ∈ [0, 1]`, with `κ = a³/(6p³)` and `λ = a³/(6(1-p)³)`, where `a` is
//! the standard normal density at `c_p = -Φ⁻¹(p)`. Its minimum (less `δ`) is
//! the exponent `α` in `c_{t,t} <= exp(-α t²)`. At `D = ∞` every `1/D` term is
//! dropped and the minimum over the interior reproduces the Erdős–Rényi
//! exponent `-g(p)`.
//!
//! Clique probabilities carry the `p`-powers and a suppression factor;
//! independent-set probabilities carry the `(1-p)`-powers and an enhancement
//! factor. Edges are pairs whose inner product is *below* the threshold, so a
//! clique needs every pair of vectors to be spread apart, which geometry makes
//! rarer than independent edges would.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::numerics::{c_p_of, ln_binomial};

/// The scale `D` in `d = D² t²`; `Infinite` selects the limiting closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DimScale {
    Finite(f64),
    Infinite,
}

impl DimScale {
    pub fn finite(d: f64) -> Result<Self> {
        if d > 0.0 && d.is_finite() {
            Ok(DimScale::Finite(d))
        } else {
            domain(format!("scale D = {d} must be positive and finite"))
        }
    }

    /// `1/D`, zero at infinity.
    pub fn inv(self) -> f64 {
        match self {
            DimScale::Finite(d) => 1.0 / d,
            DimScale::Infinite => 0.0,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, DimScale::Infinite)
    }
}

impl fmt::Display for DimScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DimScale::Finite(d) => write!(f, "{d}"),
            DimScale::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for DimScale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
            return Ok(DimScale::Infinite);
        }
        let d: f64 = s
            .parse()
            .map_err(|_| Error::Domain(format!("cannot parse D from {s:?}")))?;
        if d == f64::INFINITY {
            Ok(DimScale::Infinite)
        } else {
            DimScale::finite(d)
        }
    }
}

impl Serialize for DimScale {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DimScale::Finite(d) => s.serialize_f64(*d),
            DimScale::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Which monochromatic structure a tuple of vertices is tested for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TupleKind {
    Clique,
    Independent,
}

impl fmt::Display for TupleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TupleKind::Clique => "clique",
            TupleKind::Independent => "independent",
        })
    }
}

/// A natural-log probability, or a log upper bound that may exceed zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogProb {
    raw: f64,
}

impl LogProb {
    pub fn new(raw: f64) -> Self {
        LogProb { raw }
    }

    /// The unclamped value.
    pub fn raw(self) -> f64 {
        self.raw
    }

    /// The value clamped to `<= 0`.
    pub fn value(self) -> f64 {
        self.raw.min(0.0)
    }

    /// True when the bound exceeded 1 and [`LogProb::value`] was clamped.
    pub fn clamped(self) -> bool {
        self.raw > 0.0
    }

    pub fn prob(self) -> f64 {
        self.value().exp()
    }
}

/// Parameters of the construction for one clique size `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub p: f64,
    pub scale: DimScale,
    /// Constant of the error term in the tuple-probability bounds.
    pub k: f64,
    /// Floor for `D`; only checked, never used in formulas.
    pub d0: f64,
    pub delta: f64,
    pub t: u64,
}

impl ModelParams {
    /// Formal-mode parameters: `K = 0`, `D0 = 0`, `δ = 0`.
    pub fn new(p: f64, scale: DimScale, t: u64) -> Result<Self> {
        let params = ModelParams {
            p,
            scale,
            k: 0.0,
            d0: 0.0,
            delta: 0.0,
            t,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_k(mut self, k: f64) -> Result<Self> {
        self.k = k;
        self.validate()?;
        Ok(self)
    }

    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        self.delta = delta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_d0(mut self, d0: f64) -> Result<Self> {
        self.d0 = d0;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p <= 0.5) {
            return domain(format!("p = {} outside (0, 1/2]", self.p));
        }
        if !(self.k >= 0.0 && self.k.is_finite()) {
            return domain(format!("K = {} must be finite and nonnegative", self.k));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return domain(format!("delta = {} must be finite and nonnegative", self.delta));
        }
        if !(self.d0 >= 0.0 && self.d0.is_finite()) {
            return domain(format!("D0 = {} must be finite and nonnegative", self.d0));
        }
        if let DimScale::Finite(d) = self.scale {
            if !(d > 0.0 && d.is_finite()) {
                return domain(format!("D = {d} must be positive"));
            }
            if d < self.d0 {
                return domain(format!("D = {d} below the floor D0 = {}", self.d0));
            }
        }
        if self.t < 1 {
            return domain("t must be at least 1");
        }
        if self.vertex_count() < 1.0 {
            return domain(format!(
                "exp(m t) = {} < 1: delta too large for this p, D",
                (self.m() * self.t as f64).exp()
            ));
        }
        Ok(())
    }

    /// Ambient dimension `ceil(D² t²)`, `None` when `D = ∞`.
    pub fn dimension(&self) -> Option<u64> {
        match self.scale {
            DimScale::Finite(d) => {
                let t = self.t as f64;
                Some((d * d * t * t).ceil() as u64)
            }
            DimScale::Infinite => None,
        }
    }

    /// The vertex-count exponent `m`; see [`m_choice`].
    pub fn m(&self) -> f64 {
        m_choice(self)
    }

    /// `M = floor(exp(m t))`, as a float since it overflows integers quickly.
    pub fn vertex_count(&self) -> f64 {
        (self.m() * self.t as f64).exp().floor()
    }
}

fn check_open_unit(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        domain(format!("p = {p} outside (0, 1)"))
    }
}

/// `(κ, λ) = (a³/(6p³), a³/(6(1-p)³))`.
pub fn kappa_lambda(p: f64) -> Result<(f64, f64)> {
    check_open_unit(p)?;
    let a = c_p_of(p)?.a;
    let a3 = a * a * a;
    Ok((a3 / (6.0 * p.powi(3)), a3 / (6.0 * (1.0 - p).powi(3))))
}

/// The Erdős–Rényi exponent `g(p) = (4 ln(1-p) - ln p) ln p / (8 ln(1-p))`.
pub fn sawin_exponent(p: f64) -> Result<f64> {
    check_open_unit(p)?;
    let lp = p.ln();
    let lq = (-p).ln_1p();
    Ok((4.0 * lq - lp) * lp / (8.0 * lq))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SawinOptimum {
    pub p_star: f64,
    pub g: f64,
    /// `-g(p*)/ln 2`, the per-color coefficient of `(ℓ-2) t` in the base-2 bound.
    pub base2_coeff: f64,
}

/// Golden-section minimisation of `g` on `(0.3, 0.5)`.
pub fn optimize_sawin_p() -> SawinOptimum {
    let g = |p: f64| sawin_exponent(p).expect("p in (0.3, 0.5)");
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.3_f64, 0.5_f64);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (g(x1), g(x2));
    while hi - lo > 1e-9 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = g(x2);
        }
    }
    let p_star = 0.5 * (lo + hi);
    let gs = g(p_star);
    SawinOptimum {
        p_star,
        g: gs,
        base2_coeff: -gs / LN_2,
    }
}

fn choose2(r: u64) -> f64 {
    let r = r as f64;
    r * (r - 1.0) / 2.0
}

fn choose3(r: u64) -> f64 {
    let r = r as f64;
    r * (r - 1.0) * (r - 2.0) / 6.0
}

/// Log of the upper bound on the probability that `r` random sphere points
/// form a clique (`kind = Clique`) or an independent set.
///
/// `d = None` means infinite ambient dimension, where both `1/√d` terms vanish.
pub fn tuple_log_bound(
    r: u64,
    d: Option<u64>,
    scale: DimScale,
    p: f64,
    k: f64,
    kind: TupleKind,
) -> Result<LogProb> {
    check_open_unit(p)?;
    if r < 1 {
        return domain("tuple size r must be at least 1");
    }
    if let Some(d) = d {
        if d < 2 {
            return domain(format!("dimension d = {d} must be at least 2"));
        }
    }
    if !(k >= 0.0 && k.is_finite()) {
        return domain(format!("K = {k} must be finite and nonnegative"));
    }
    let inv_sqrt_d = d.map_or(0.0, |d| 1.0 / (d as f64).sqrt());
    let a = c_p_of(p)?.a;
    let a3 = a * a * a;
    let err = k * (r as f64).powi(3) * scale.inv() * inv_sqrt_d;
    let c3 = choose3(r) * inv_sqrt_d;
    let raw = match kind {
        TupleKind::Clique => choose2(r) * p.ln() - a3 / p.powi(3) * c3 + err,
        TupleKind::Independent => {
            choose2(r) * (-p).ln_1p() + a3 / (1.0 - p).powi(3) * c3 + err
        }
    };
    Ok(LogProb::new(raw))
}

/// `m = -½ ln p + κ/D - K/D² - δ`.
pub fn m_choice(params: &ModelParams) -> f64 {
    let inv = params.scale.inv();
    let kappa = if inv == 0.0 {
        0.0
    } else {
        kappa_lambda(params.p).map(|(k, _)| k).unwrap_or(0.0)
    };
    -0.5 * params.p.ln() + kappa * inv - params.k * inv * inv - params.delta
}

/// Log of the first-moment count `C(M, t) · P(t sphere points form a clique)`.
///
/// A negative value certifies, at these finite parameters, that the expected
/// number of `K_t` is below one.
pub fn expected_kt_count_log(params: &ModelParams) -> Result<f64> {
    let m_count = params.vertex_count();
    if (params.t as f64) > m_count {
        return domain(format!("t = {} exceeds M = {m_count}", params.t));
    }
    let bound = tuple_log_bound(
        params.t,
        params.dimension(),
        params.scale,
        params.p,
        params.k,
        TupleKind::Clique,
    )?;
    Ok(ln_binomial(m_count, params.t) + bound.raw())
}

/// The `k`-indexed terms of the independence bound, maximised over `k`.
///
/// Returns `(max_k term, argmax)`; the smallest `k` wins ties.
pub fn ctt_log_bound_max_k(params: &ModelParams) -> (f64, u64) {
    let t = params.t;
    let tf = t as f64;
    let inv = params.scale.inv();
    let lambda = if inv == 0.0 {
        0.0
    } else {
        kappa_lambda(params.p).map(|(_, l)| l).unwrap_or(0.0)
    };
    let ln_m = params.vertex_count().ln();
    let lq = (-params.p).ln_1p();
    let tail = params.k * tf * tf * inv * inv;
    let mut best = (f64::NEG_INFINITY, 1);
    for k in 1..=t {
        let v = -((t - k) as f64) * ln_m
            + choose2(k) * lq
            + 6.0 * lambda * inv * choose3(k) / tf
            + tail;
        if v > best.0 {
            best = (v, k);
        }
    }
    best
}

struct Coefficients {
    lp: f64,
    lq: f64,
    kappa: f64,
    lambda: f64,
    inv: f64,
    k: f64,
}

impl Coefficients {
    fn of(p: f64, scale: DimScale, k: f64) -> Result<Self> {
        let (kappa, lambda) = kappa_lambda(p)?;
        Ok(Coefficients {
            lp: p.ln(),
            lq: (-p).ln_1p(),
            kappa,
            lambda,
            inv: scale.inv(),
            k,
        })
    }

    fn f(&self, theta: f64) -> f64 {
        let Coefficients {
            lp,
            lq,
            kappa,
            lambda,
            inv,
            k,
        } = *self;
        (1.0 - theta) * (-0.5 * lp + kappa * inv) - 0.5 * theta * theta * lq
            - lambda * inv * theta.powi(3)
            - (2.0 - theta) * k * inv * inv
    }

    /// `A θ² + B θ + C = 0`, the stationarity condition `-f'(θ) = 0`.
    fn quadratic(&self) -> (f64, f64, f64) {
        (
            3.0 * self.lambda * self.inv,
            self.lq,
            -0.5 * self.lp + self.kappa * self.inv - self.k * self.inv * self.inv,
        )
    }
}

/// Evaluate `f(θ)` on `[0, 1]`.
pub fn f_theta(theta: f64, params: &ModelParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&theta) {
        return domain(format!("theta = {theta} outside [0, 1]"));
    }
    Ok(Coefficients::of(params.p, params.scale, params.k)?.f(theta))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaFormal {
    /// `min f - δ`.
    pub alpha: f64,
    /// The minimising `θ`.
    pub theta_star: f64,
}

/// `α = min_{θ∈[0,1]} f(θ) - δ`.
///
/// Candidates are the endpoints and the real roots of `f'` inside `[0, 1]`;
/// no iteration is involved. Ties go to the smallest `θ`.
pub fn alpha_formal(params: &ModelParams) -> Result<AlphaFormal> {
    let c = Coefficients::of(params.p, params.scale, params.k)?;
    let mut candidates = vec![0.0, 1.0];
    candidates.extend(
        stationary_points(&c)
            .into_iter()
            .filter(|th| (0.0..=1.0).contains(th)),
    );
    candidates.sort_by(f64::total_cmp);
    let mut best = (f64::INFINITY, 0.0);
    for th in candidates {
        let v = c.f(th);
        if v < best.0 {
            best = (v, th);
        }
    }
    Ok(AlphaFormal {
        alpha: best.0 - params.delta,
        theta_star: best.1,
    })
}

fn stationary_points(c: &Coefficients) -> Vec<f64> {
    let (qa, qb, qc) = c.quadratic();
    if qa == 0.0 {
        return vec![-qc / qb];
    }
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Vec::new();
    }
    // qb < 0, so q > 0 and both forms below are cancellation-free.
    let q = 0.5 * (disc.sqrt() - qb);
    vec![qc / q, q / qa]
}

/// The smaller stationary point of `f`, clamped to `[0, 1]`.
///
/// At `D = ∞` this is `θ₀ = ln p / (2 ln(1-p))`.
pub fn theta_star(params: &ModelParams) -> Result<f64> {
    let c = Coefficients::of(params.p, params.scale, params.k)?;
    let (qa, qb, qc) = c.quadratic();
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Err(Error::NoStationaryPoint { discriminant: disc });
    }
    let root = 2.0 * qc / (disc.sqrt() - qb);
    Ok(root.clamp(0.0, 1.0))
}

/// `(θ₀, θ₁)` with `θ* = θ₀ + θ₁/D + O(1/D²)`.
pub fn theta_expansion(p: f64) -> Result<(f64, f64)> {
    let (kappa, lambda) = kappa_lambda(p)?;
    let lq = (-p).ln_1p();
    let theta0 = p.ln() / (2.0 * lq);
    let theta1 = (-kappa - 3.0 * lambda * theta0 * theta0) / lq;
    Ok((theta0, theta1))
}

/// The bracket `h(p) = (1-θ₀)/p³ - θ₀³/(1-p)³`, with `θ₀ = ln p/(2 ln(1-p))`.
///
/// Positive exactly where the geometric model improves on Erdős–Rényi at
/// first order in `1/D`.
pub fn gamma_bracket(p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 0.5) {
        return domain(format!("p = {p} outside (0, 1/2]"));
    }
    let lp = p.ln();
    let lq = (-p).ln_1p();
    let ratio = lp / lq;
    Ok((1.0 - 0.5 * ratio) / p.powi(3) - ratio.powi(3) / (8.0 * (1.0 - p).powi(3)))
}

/// `a³ h(p) / 6`: the coefficient of `1/D` in `α(p, D) - α(p, ∞)`.
///
/// Equals `(1-θ₀)κ - θ₀³λ`, the derivative of `f(θ₀)` in `1/D`.
pub fn first_order_gain(p: f64) -> Result<f64> {
    let a = c_p_of(p)?.a;
    Ok(a.powi(3) * gamma_bracket(p)? / 6.0)
}

/// Bisection root of [`gamma_bracket`] on `[lo, hi]`.
pub fn find_gamma_root(lo: f64, hi: f64) -> Result<f64> {
    if !(lo < hi) {
        return domain(format!("empty bracket [{lo}, {hi}]"));
    }
    let (mut lo, mut hi) = (lo, hi);
    let (mut f_lo, f_hi) = (gamma_bracket(lo)?, gamma_bracket(hi)?);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        let f_mid = gamma_bracket(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `β(ℓ) = (ℓ-2) α / ln 2 + 1/2`, so that `r(t; ℓ) >= 2^{β t + o(t)}`.
pub fn ramsey_base2_coeff(ell: u32, alpha: f64) -> Result<f64> {
    if ell < 2 {
        return domain(format!("color count {ell} must be at least 2"));
    }
    if !(alpha >= 0.0) {
        return domain(format!("alpha = {alpha} must be nonnegative"));
    }
    Ok((ell - 2) as f64 * alpha / LN_2 + 0.5)
}

/// Whether `C(N,t) c^{ℓ-2} 2^{1-C(t,2)} < 1`, evaluated in log space.
pub fn union_bound_feasible(n: u64, t: u64, ell: u32, log_c: f64) -> Result<bool> {
    if t < 2 || t > n {
        return domain(format!("need 2 <= t <= N, got t = {t}, N = {n}"));
    }
    if ell < 2 {
        return domain(format!("color count {ell} must be at least 2"));
    }
    if !(log_c <= 0.0) {
        return domain(format!("log c = {log_c} must be <= 0"));
    }
    let lhs = ln_binomial(n as f64, t) + (ell - 2) as f64 * log_c + (1.0 - choose2(t)) * LN_2;
    Ok(lhs < 0.0)
}

/// Every closed-form quantity for one `(p, D, K, δ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentReport {
    pub p: f64,
    #[serde(rename = "D")]
    pub scale: DimScale,
    #[serde(rename = "K")]
    pub k: f64,
    pub delta: f64,
    pub kappa: f64,
    pub lambda: f64,
    pub c_p: f64,
    pub a: f64,
    pub sawin_g: f64,
    pub alpha_formal: f64,
    pub theta_star: f64,
    pub theta0: f64,
    pub theta1: f64,
    pub gamma_bracket: f64,
    pub first_order_gain: f64,
    /// `first_order_gain / D`, zero at `D = ∞`.
    pub gamma: f64,
    /// `(ℓ, β(ℓ))` pairs.
    pub ramsey_base2_coeff: Vec<(u32, f64)>,
}

impl ExponentReport {
    pub fn compute(p: f64, scale: DimScale, k: f64, delta: f64, ells: &[u32]) -> Result<Self> {
        // α and θ* do not depend on t.
        let params = ModelParams::new(p, scale, 2)?.with_k(k)?.with_delta(delta)?;
        let nc = c_p_of(p)?;
        let (kappa, lambda) = kappa_lambda(p)?;
        let af = alpha_formal(&params)?;
        let (theta0, theta1) = theta_expansion(p)?;
        let h = gamma_bracket(p)?;
        let gain = nc.a.powi(3) * h / 6.0;
        let ramsey = ells
            .iter()
            .map(|&ell| Ok((ell, ramsey_base2_coeff(ell, af.alpha.max(0.0))?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ExponentReport {
            p,
            scale,
            k,
            delta,
            kappa,
            lambda,
            c_p: nc.c_p,
            a: nc.a,
            sawin_g: sawin_exponent(p)?,
            alpha_formal: af.alpha,
            theta_star: af.theta_star,
            theta0,
            theta1,
            gamma_bracket: h,
            first_order_gain: gain,
            gamma: gain * scale.inv(),
            ramsey_base2_coeff: ramsey,
        })
    }
}
