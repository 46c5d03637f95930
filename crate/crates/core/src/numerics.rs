//! Special functions for the spherical model.
//!
//! Everything here works in linear probability space. The normal quantile is
//! polished with safeguarded Halley steps on an `erfc`-based CDF, and the
//! regularized incomplete beta function uses a modified-Lentz continued
//! fraction with a Stirling-form prefactor so that the shape parameters
//! reached by `d` up to 10^6 (about 5e5) stay accurate.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// 1/sqrt(2*pi)
pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// A real number in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            domain(format!("probability {value} outside [0, 1]"))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

/// `c_p` with `P(Z <= -c_p) = p`, and the normal density `a` at `c_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalConstants {
    pub c_p: f64,
    pub a: f64,
}

pub fn normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF, accurate to a few ulps relative in both tails.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Inverse of [`normal_cdf`].
pub fn std_normal_quantile(u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return domain(format!("quantile argument {u} outside (0, 1)"));
    }
    if u == 0.5 {
        return Ok(0.0);
    }
    // Work in the lower tail, where erfc keeps full relative precision.
    if u > 0.5 {
        return Ok(-lower_quantile(1.0 - u));
    }
    Ok(lower_quantile(u))
}

fn lower_quantile(u: f64) -> f64 {
    // Abramowitz-Stegun 26.2.23 as the starting point.
    let t = (-2.0 * u.ln()).sqrt();
    let mut x = -(t
        - (2.515_517 + 0.802_853 * t + 0.010_328 * t * t)
            / (1.0 + 1.432_788 * t + 0.189_269 * t * t + 0.001_308 * t * t * t));
    let (mut lo, mut hi) = (-40.0_f64, 0.0_f64);
    for _ in 0..100 {
        let r = normal_cdf(x) - u;
        if r > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let pdf = normal_pdf(x);
        let step = r / pdf;
        let mut next = x - step / (1.0 + 0.5 * x * step);
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        let moved = (next - x).abs();
        x = next;
        if moved <= 1e-16 * x.abs().max(1.0) {
            break;
        }
    }
    x
}

/// `c_p = -quantile(p)`, `a = phi(c_p)`.
pub fn c_p_of(p: f64) -> Result<NormalConstants> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("p = {p} outside (0, 1)"));
    }
    let c_p = -std_normal_quantile(p)?;
    Ok(NormalConstants {
        c_p,
        a: normal_pdf(c_p),
    })
}

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `ln C(n, k)` for real `n >= k`.
///
/// Uses log-gamma, switching to the falling-product form when `n` is so large
/// relative to `k` that the log-gamma difference would cancel.
pub fn ln_binomial(n: f64, k: u64) -> f64 {
    let kf = k as f64;
    if kf > n {
        return f64::NEG_INFINITY;
    }
    if k == 0 || kf == n {
        return 0.0;
    }
    if n > 1e6 && k < 100_000 {
        let mut s = kf * n.ln();
        for i in 1..k {
            s += (-(i as f64) / n).ln_1p();
        }
        return s - ln_gamma(kf + 1.0);
    }
    ln_gamma(n + 1.0) - ln_gamma(kf + 1.0) - ln_gamma(n - kf + 1.0)
}

/// Regularized incomplete beta function `I_x(s1, s2)`.
pub fn reg_inc_beta(x: f64, s1: f64, s2: f64) -> Result<Probability> {
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("incomplete beta argument {x} outside [0, 1]"));
    }
    if !(s1 > 0.0 && s1.is_finite() && s2 > 0.0 && s2.is_finite()) {
        return domain(format!("incomplete beta shapes ({s1}, {s2}) must be positive"));
    }
    Probability::new(inc_beta_xy(x, 1.0 - x, s1, s2))
}

/// `I_x(a, b)` with the complement `y = 1 - x` supplied separately so callers
/// can pass it without rounding loss.
fn inc_beta_xy(x: f64, y: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    if x > (a + 1.0) / (a + b + 2.0) {
        return 1.0 - inc_beta_xy(y, x, b, a);
    }
    let front = ln_beta_prefactor(x, y, a, b).exp();
    (front * beta_continued_fraction(x, a, b) / a).clamp(0.0, 1.0)
}

/// `ln(x^a y^b / B(a, b))`.
fn ln_beta_prefactor(x: f64, y: f64, a: f64, b: f64) -> f64 {
    if a.min(b) >= 10.0 {
        // Stirling form centred on the mean a/(a+b): the large logarithms of
        // x^a y^b and B(a, b) cancel analytically instead of numerically.
        let s = a + b;
        let lx = ((x * s - a) / a).ln_1p();
        let ly = ((y * s - b) / b).ln_1p();
        let corr = stirling_tail(a) + stirling_tail(b) - stirling_tail(s);
        a * lx + b * ly + 0.5 * (a * b / s).ln() - 0.5 * (2.0 * PI).ln() - corr
    } else {
        a * x.ln() + b * y.ln() - (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b))
    }
}

/// `ln Gamma(z) - [(z - 1/2) ln z - z + ln(2 pi)/2]` for `z >= 10`.
fn stirling_tail(z: f64) -> f64 {
    let r = 1.0 / z;
    let r2 = r * r;
    r * (1.0 / 12.0
        - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 * (1.0 / 1680.0 - r2 / 1188.0))))
}

fn beta_continued_fraction(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 5e-16;
    let max_iter = 200 + 20 * (a.max(b).sqrt() as usize);
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=max_iter {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// CDF of `<u, u'>` for independent uniform points on `S^{d-1}`.
pub fn sphere_ip_cdf(t: f64, d: u64) -> Result<Probability> {
    if d < 2 {
        return domain(format!("sphere dimension d = {d} must be at least 2"));
    }
    if !(-1.0..=1.0).contains(&t) {
        return domain(format!("inner product {t} outside [-1, 1]"));
    }
    Probability::new(sphere_cdf_unchecked(t, d))
}

fn sphere_cdf_unchecked(t: f64, d: u64) -> f64 {
    if t == 0.0 {
        return 0.5;
    }
    if t > 0.0 {
        return 1.0 - sphere_cdf_unchecked(-t, d);
    }
    let shape = (d as f64 - 1.0) / 2.0;
    inc_beta_xy(0.5 * (1.0 + t), 0.5 * (1.0 - t), shape, shape)
}

/// The threshold `tau` with `P(<u, u'> < tau) = p` on `S^{d-1}`.
pub fn solve_tau(d: u64, p: f64) -> Result<f64> {
    if d < 2 {
        return domain(format!("sphere dimension d = {d} must be at least 2"));
    }
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("p = {p} outside (0, 1)"));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    // Bisection to adjacent floats; the CDF is strictly increasing on (-1, 1).
    let (mut lo, mut hi) = if p < 0.5 { (-1.0, 0.0) } else { (0.0, 1.0) };
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sphere_cdf_unchecked(mid, d) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (flo, fhi) = (sphere_cdf_unchecked(lo, d), sphere_cdf_unchecked(hi, d));
    Ok(if (p - flo).abs() <= (fhi - p).abs() {
        lo
    } else {
        hi
    })
}

/// `Phi^{-1}(p) / sqrt(d)`, the large-`d` approximation of `tau(d, p)`.
pub fn tau_normal_approx(d: u64, p: f64) -> Result<f64> {
    Ok(std_normal_quantile(p)? / (d as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn erf_cdf_bisect(u: f64) -> f64 {
        // independent oracle: bisection on the erf-based CDF
        let (mut lo, mut hi) = (-40.0_f64, 40.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if 0.5 * (1.0 + libm::erf(mid / SQRT_2)) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(std_normal_quantile(0.5).unwrap(), 0.0);
        let x = std_normal_quantile(0.841_344_746).unwrap();
        assert!((x - 1.0).abs() < 1e-6, "{x}");
        assert!((x - erf_cdf_bisect(0.841_344_746)).abs() < 1e-9);
        let x = std_normal_quantile(0.975).unwrap();
        assert!((x - 1.959_964).abs() < 1e-5, "{x}");
    }

    #[test]
    fn quantile_domain() {
        for u in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(std_normal_quantile(u).is_err());
        }
    }

    #[test]
    fn quantile_round_trip_grid() {
        for i in 1..=999 {
            let u = i as f64 / 1000.0;
            let x = std_normal_quantile(u).unwrap();
            assert!((normal_cdf(x) - u).abs() < 1e-10, "u={u}");
        }
        for u in [1e-300, 1e-100, 1e-20, 1e-8, 1.0 - 1e-12] {
            let x = std_normal_quantile(u).unwrap();
            assert!((normal_cdf(x) - u).abs() <= 1e-12 * u.clamp(1e-12, 1.0), "u={u}");
        }
    }

    #[test]
    fn c_p_examples() {
        let nc = c_p_of(0.5).unwrap();
        assert_eq!(nc.c_p, 0.0);
        assert!((nc.a - 0.398_942_3).abs() < 1e-7);
        assert!((c_p_of(0.158_655).unwrap().c_p - 1.0).abs() < 1e-5);
        let nc = c_p_of(0.454_997).unwrap();
        assert!((nc.c_p - 0.1131).abs() < 1e-4);
        assert!((nc.a - 0.396_40).abs() < 1e-5);
        assert!(c_p_of(0.0).is_err());
        assert!(c_p_of(1.0).is_err());
    }

    #[test]
    fn inc_beta_examples() {
        for x in [0.0, 0.3, 1.0] {
            assert!((reg_inc_beta(x, 1.0, 1.0).unwrap().get() - x).abs() < 1e-15);
        }
        for s in [0.3, 1.0, 2.5, 40.0, 5e5] {
            assert!((reg_inc_beta(0.5, s, s).unwrap().get() - 0.5).abs() < 1e-12, "s={s}");
        }
        assert!((reg_inc_beta(0.25, 2.0, 2.0).unwrap().get() - 0.15625).abs() < 1e-14);
        assert!(reg_inc_beta(1.2, 1.0, 1.0).is_err());
        assert!(reg_inc_beta(0.2, 0.0, 1.0).is_err());
        assert!(reg_inc_beta(0.2, 1.0, -3.0).is_err());
    }

    #[test]
    fn sphere_cdf_examples() {
        for d in [2, 3, 7, 1000] {
            assert_eq!(sphere_ip_cdf(0.0, d).unwrap().get(), 0.5);
            assert_eq!(sphere_ip_cdf(-1.0, d).unwrap().get(), 0.0);
            assert_eq!(sphere_ip_cdf(1.0, d).unwrap().get(), 1.0);
        }
        for t in [-0.9, -0.3, 0.1, 0.77] {
            assert!((sphere_ip_cdf(t, 3).unwrap().get() - (1.0 + t) / 2.0).abs() < 1e-14);
        }
        assert!((sphere_ip_cdf(0.5, 2).unwrap().get() - 2.0 / 3.0).abs() < 1e-14);
        assert!(sphere_ip_cdf(0.1, 1).is_err());
    }

    #[test]
    fn tau_examples() {
        for d in [2, 3, 50, 1_000_000] {
            assert_eq!(solve_tau(d, 0.5).unwrap(), 0.0);
        }
        for p in [0.01, 0.2, 0.455, 0.8] {
            assert!((solve_tau(3, p).unwrap() - (2.0 * p - 1.0)).abs() < 1e-12);
        }
        let d = 1_000_000u64;
        let scaled = (d as f64).sqrt() * solve_tau(d, 0.3).unwrap();
        assert!((scaled - std_normal_quantile(0.3).unwrap()).abs() < 1e-3);
    }

    #[test]
    fn tau_round_trip_and_monotone() {
        for d in [2u64, 3, 10, 100, 10_000] {
            let mut prev = -1.0;
            for i in 1..100 {
                let p = i as f64 / 100.0;
                let tau = solve_tau(d, p).unwrap();
                assert!(tau > prev);
                prev = tau;
                let back = sphere_ip_cdf(tau, d).unwrap().get();
                assert!((back - p).abs() < 1e-10, "d={d} p={p}");
            }
        }
    }

    #[test]
    fn ln_binomial_small_and_large() {
        assert!((ln_binomial(5.0, 2) - 10f64.ln()).abs() < 1e-13);
        assert_eq!(ln_binomial(7.0, 0), 0.0);
        assert_eq!(ln_binomial(7.0, 7), 0.0);
        assert_eq!(ln_binomial(3.0, 4), f64::NEG_INFINITY);
        // C(1e12, 3) = 1e12 (1e12 - 1)(1e12 - 2) / 6
        let n: f64 = 1e12;
        let exact = n.ln() + (n - 1.0).ln() + (n - 2.0).ln() - 6f64.ln();
        assert!((ln_binomial(n, 3) - exact).abs() < 1e-12);
    }
}
