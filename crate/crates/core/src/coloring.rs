//! Random ℓ-colorings of `K_N` built from homomorphisms into a base graph.
//!
//! For `i = 1..=ℓ-2` a uniform vertex map `f_i: V(K_N) -> V(G)` is drawn. A
//! pair `xy` gets the first color `i` for which `f_i(x) f_i(y)` is an edge of
//! `G` (`f_i(x) = f_i(y)` is a non-edge). Pairs that survive every stage get
//! color `ℓ-1` or `ℓ` by a fair coin.
//!
//! Randomness: stream 0 of the seed supplies the maps (stage by stage,
//! vertex by vertex), stream 1 supplies one coin per pair in lexicographic
//! order whether or not the pair reaches the residual stage.
//!
//! Certificate text format:
//!
//! ```text
//! N t ell seed verified
//! # base <description>            (optional comment)
//! f_1(0) f_1(1) ... f_1(N-1)      (ℓ-2 lines)
//! c(0,1) c(0,2) ... c(0,N-1)      (row x lists c(x,y) for y > x)
//! c(1,2) ... c(1,N-1)
//! ...
//! ```

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::graph::{contains_clique, Graph};
use crate::sphere::stream_rng;

const HOM_STREAM: u64 = 0;
const COIN_STREAM: u64 = 1;

/// Attempts evaluated per parallel batch in [`certify_ramsey_lower`].
const ATTEMPT_CHUNK: u64 = 64;

/// Index of pair `x < y` in lexicographic order.
#[inline]
pub fn pair_index(n: usize, x: usize, y: usize) -> usize {
    debug_assert!(x < y && y < n);
    x * (2 * n - x - 1) / 2 + (y - x - 1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeColoring {
    pub n: usize,
    pub ell: u8,
    /// Colors in `1..=ell`, indexed by [`pair_index`].
    pub colors: Vec<u8>,
    pub homomorphisms: Vec<Vec<u32>>,
    pub base: String,
    pub seed: u64,
}

impl EdgeColoring {
    pub fn color(&self, x: usize, y: usize) -> u8 {
        let (x, y) = if x < y { (x, y) } else { (y, x) };
        self.colors[pair_index(self.n, x, y)]
    }

    /// The graph on `0..n` whose edges carry color `c`.
    pub fn class(&self, c: u8) -> Graph {
        let mut g = Graph::empty(self.n);
        let mut idx = 0;
        for x in 0..self.n {
            for y in x + 1..self.n {
                if self.colors[idx] == c {
                    g.add_edge(x, y);
                }
                idx += 1;
            }
        }
        g
    }

    /// Recomputes every color from the stored maps, the base graph and the
    /// coin stream of `self.seed`.
    pub fn replay(&self, base: &Graph) -> Result<Vec<u8>> {
        assign_colors(self.n, self.ell, &self.homomorphisms, base, self.seed)
    }
}

fn assign_colors(n: usize, ell: u8, homs: &[Vec<u32>], base: &Graph, seed: u64) -> Result<Vec<u8>> {
    if homs.len() != ell as usize - 2 {
        return domain(format!("expected {} homomorphisms, got {}", ell - 2, homs.len()));
    }
    let bn = base.n_vertices();
    if homs.iter().flatten().any(|&v| v as usize >= bn) {
        return domain(format!("homomorphism image outside base graph on {bn} vertices"));
    }
    let mut coins = stream_rng(seed, COIN_STREAM);
    let mut colors = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for x in 0..n {
        for y in x + 1..n {
            let coin: bool = coins.random();
            let stage = homs
                .iter()
                .position(|f| base.has_edge(f[x] as usize, f[y] as usize));
            colors.push(match stage {
                Some(i) => i as u8 + 1,
                None if coin => ell,
                None => ell - 1,
            });
        }
    }
    Ok(colors)
}

/// Draws the maps and the residual coins for one coloring of `K_n`.
pub fn build_coloring(n: usize, ell: u8, base: &Graph, base_desc: &str, seed: u64) -> Result<EdgeColoring> {
    if ell < 2 {
        return domain(format!("ell = {ell} must be at least 2"));
    }
    let bn = base.n_vertices();
    if ell > 2 && bn == 0 {
        return domain("base graph has no vertices");
    }
    let mut rng = stream_rng(seed, HOM_STREAM);
    let homs: Vec<Vec<u32>> = (0..ell - 2)
        .map(|_| (0..n).map(|_| rng.random_range(0..bn) as u32).collect())
        .collect();
    let colors = assign_colors(n, ell, &homs, base, seed)?;
    Ok(EdgeColoring {
        n,
        ell,
        colors,
        homomorphisms: homs,
        base: base_desc.to_string(),
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColoringCertificate {
    pub coloring: EdgeColoring,
    pub t: usize,
    pub verified: bool,
    /// `(color, witness)` for each color class holding a `K_t`.
    pub violations: Vec<(u8, Vec<usize>)>,
}

/// Searches every color class for a `K_t` and re-checks each witness.
pub fn verify_coloring(coloring: &EdgeColoring, t: usize) -> Result<ColoringCertificate> {
    if t < 2 {
        return domain(format!("t = {t} must be at least 2"));
    }
    let mut violations = Vec::new();
    for c in 1..=coloring.ell {
        if let Some(w) = contains_clique(&coloring.class(c), t) {
            let mono = w
                .iter()
                .enumerate()
                .all(|(i, &x)| w[i + 1..].iter().all(|&y| coloring.color(x, y) == c));
            if !mono {
                return Err(Error::Precondition(format!(
                    "clique search returned a non-monochromatic witness {w:?} for color {c}"
                )));
            }
            violations.push((c, w));
        }
    }
    Ok(ColoringCertificate {
        coloring: coloring.clone(),
        t,
        verified: violations.is_empty(),
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttemptStats {
    pub attempts: u64,
    pub failed: u64,
    pub total_violations: u64,
    pub mean_violations: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CertifyOutcome {
    /// `attempt` is the lowest successful index; `stats` covers attempts up to it.
    Certified {
        certificate: ColoringCertificate,
        attempt: u64,
        stats: AttemptStats,
    },
    /// No attempt succeeded; `best` is the attempt with the fewest violations.
    Exhausted {
        best: ColoringCertificate,
        best_attempt: u64,
        stats: AttemptStats,
    },
}

impl CertifyOutcome {
    pub fn certificate(&self) -> &ColoringCertificate {
        match self {
            CertifyOutcome::Certified { certificate, .. } => certificate,
            CertifyOutcome::Exhausted { best, .. } => best,
        }
    }

    pub fn stats(&self) -> &AttemptStats {
        match self {
            CertifyOutcome::Certified { stats, .. } | CertifyOutcome::Exhausted { stats, .. } => stats,
        }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, CertifyOutcome::Certified { .. })
    }
}

/// Repeats build and verify with seeds `seed + k` for `k < attempts`.
pub fn certify_ramsey_lower(
    n: usize,
    t: usize,
    ell: u8,
    base: &Graph,
    base_desc: &str,
    attempts: u64,
    seed: u64,
) -> Result<CertifyOutcome> {
    if attempts == 0 {
        return domain("attempts must be at least 1");
    }
    if t < 2 {
        return domain(format!("t = {t} must be at least 2"));
    }
    if ell > 2 {
        if let Some(w) = contains_clique(base, t) {
            return Err(Error::Precondition(format!(
                "base graph {base_desc} contains K_{t} on {w:?}"
            )));
        }
    }
    let mut failed = 0u64;
    let mut total = 0u64;
    let mut best: Option<(u64, ColoringCertificate)> = None;
    let mut start = 0u64;
    while start < attempts {
        let end = (start + ATTEMPT_CHUNK).min(attempts);
        let batch: Vec<Result<ColoringCertificate>> = (start..end)
            .into_par_iter()
            .map(|k| verify_coloring(&build_coloring(n, ell, base, base_desc, seed.wrapping_add(k))?, t))
            .collect();
        for (k, cert) in (start..end).zip(batch) {
            let cert = cert?;
            if cert.verified {
                return Ok(CertifyOutcome::Certified {
                    certificate: cert,
                    attempt: k,
                    stats: stats(k + 1, failed, total),
                });
            }
            failed += 1;
            total += cert.violations.len() as u64;
            if best.as_ref().is_none_or(|(_, b)| cert.violations.len() < b.violations.len()) {
                best = Some((k, cert));
            }
        }
        start = end;
    }
    let (best_attempt, best) = best.expect("at least one attempt ran");
    Ok(CertifyOutcome::Exhausted {
        best,
        best_attempt,
        stats: stats(attempts, failed, total),
    })
}

fn stats(attempts: u64, failed: u64, total: u64) -> AttemptStats {
    AttemptStats {
        attempts,
        failed,
        total_violations: total,
        mean_violations: total as f64 / attempts as f64,
    }
}

/// Serialises a certificate in the text format described in the module docs.
pub fn write_certificate(cert: &ColoringCertificate) -> String {
    let c = &cert.coloring;
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {} {} {}", c.n, cert.t, c.ell, c.seed, cert.verified);
    if !c.base.is_empty() {
        let _ = writeln!(out, "# base {}", c.base);
    }
    for f in &c.homomorphisms {
        out.push_str(&join(f));
        out.push('\n');
    }
    let mut idx = 0;
    for x in 0..c.n.saturating_sub(1) {
        let len = c.n - x - 1;
        out.push_str(&join(&c.colors[idx..idx + len]));
        out.push('\n');
        idx += len;
    }
    out
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

/// A certificate read back from text, before re-verification.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedCertificate {
    pub coloring: EdgeColoring,
    pub t: usize,
    pub claimed_verified: bool,
}

pub fn parse_certificate(text: &str) -> Result<ParsedCertificate> {
    let mut base = String::new();
    let mut lines = text.lines().filter(|l| {
        if let Some(rest) = l.strip_prefix("# base ") {
            base = rest.to_string();
        }
        !l.trim().is_empty() && !l.starts_with('#')
    });
    let header = lines.next().ok_or_else(|| Error::Parse("empty certificate".into()))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 5 {
        return Err(Error::Parse(format!("certificate header needs `N t ell seed verified`, got {header:?}")));
    }
    let n: usize = field(h[0], "N")?;
    let t: usize = field(h[1], "t")?;
    let ell: u8 = field(h[2], "ell")?;
    let seed: u64 = field(h[3], "seed")?;
    let claimed_verified: bool = field(h[4], "verified")?;
    if ell < 2 {
        return Err(Error::Parse(format!("ell = {ell} must be at least 2")));
    }
    let mut homomorphisms = Vec::with_capacity(ell as usize - 2);
    for i in 0..ell as usize - 2 {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("missing homomorphism {}", i + 1)))?;
        let f: Vec<u32> = numbers(line, "homomorphism entry")?;
        if f.len() != n {
            return Err(Error::Parse(format!("homomorphism {} has {} entries, expected {n}", i + 1, f.len())));
        }
        homomorphisms.push(f);
    }
    let mut colors = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for x in 0..n.saturating_sub(1) {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("missing color row {x}")))?;
        let row: Vec<u8> = numbers(line, "color")?;
        if row.len() != n - x - 1 {
            return Err(Error::Parse(format!("color row {x} has {} entries, expected {}", row.len(), n - x - 1)));
        }
        if let Some(&c) = row.iter().find(|&&c| c == 0 || c > ell) {
            return Err(Error::Parse(format!("color {c} in row {x} outside 1..={ell}")));
        }
        colors.extend(row);
    }
    if let Some(extra) = lines.next() {
        return Err(Error::Parse(format!("trailing content {extra:?}")));
    }
    Ok(ParsedCertificate {
        coloring: EdgeColoring {
            n,
            ell,
            colors,
            homomorphisms,
            base,
            seed,
        },
        t,
        claimed_verified,
    })
}

fn field<T: std::str::FromStr>(s: &str, name: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Parse(format!("cannot parse {name} from {s:?}")))
}

fn numbers<T: std::str::FromStr>(line: &str, name: &str) -> Result<Vec<T>> {
    line.split_whitespace().map(|s| field(s, name)).collect()
}

/// The result of checking a certificate file without regenerating it.
#[derive(Debug, Clone, PartialEq)]
pub struct Reverification {
    pub parsed: ParsedCertificate,
    pub certificate: ColoringCertificate,
    /// Pairs with color `i ≤ ℓ-2` whose ends `f_i` maps to one vertex;
    /// such a pair cannot land on an edge of the base graph.
    pub collapsed_pairs: Vec<(usize, usize)>,
}

impl Reverification {
    /// No monochromatic `K_t`, no collapsed pairs, and the header agrees.
    pub fn accepted(&self) -> bool {
        self.certificate.verified && self.collapsed_pairs.is_empty() && self.parsed.claimed_verified
    }
}

/// Parses a certificate and re-verifies its coloring from scratch.
pub fn reverify_certificate(text: &str) -> Result<Reverification> {
    let parsed = parse_certificate(text)?;
    let c = &parsed.coloring;
    let mut collapsed_pairs = Vec::new();
    for x in 0..c.n {
        for y in x + 1..c.n {
            let col = c.color(x, y) as usize;
            if col <= c.homomorphisms.len() && c.homomorphisms[col - 1][x] == c.homomorphisms[col - 1][y] {
                collapsed_pairs.push((x, y));
            }
        }
    }
    let certificate = verify_coloring(c, parsed.t)?;
    Ok(Reverification {
        parsed,
        certificate,
        collapsed_pairs,
    })
}
