//! Command-line interface. [`run`] is the whole program; `main` only wires it
//! to the process streams.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 verification
//! violation, 3 attempts exhausted, 4 precondition failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::coloring::{certify_ramsey_lower, reverify_certificate, write_certificate, CertifyOutcome};
use crate::error::{Error, Result};
use crate::exponent::{find_gamma_root, gamma_bracket, theta_expansion, DimScale, ExponentReport};
use crate::graph::Graph;
use crate::independence::{independence_probability, EstimateMode, QMode};
use crate::io::{read_graph, write_cloud, write_graph, GraphFile};
use crate::montecarlo::{mc_bound_comparison, TupleSampler};
use crate::numerics::c_p_of;
use crate::sphere::{GeometricGraph, SpherePointCloud};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_EXHAUSTED: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "ramsey-geo", version, about = "Geometric-graph exponents, Monte Carlo checks and Ramsey colorings")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form exponents, one row per (p, D, ell).
    Exponents(ExponentsArgs),
    /// The first-order bracket h(p) over a grid of p.
    GammaCurve(GammaCurveArgs),
    /// Monte Carlo clique/independent frequencies against their bounds.
    McVerify(McVerifyArgs),
    /// Search for an ell-coloring of K_N with no monochromatic K_t.
    Certify(CertifyArgs),
    /// Re-verify a certificate file.
    Verify(VerifyArgs),
    /// Sample a spherical threshold graph and write it in the graph format.
    SampleGraph(SampleGraphArgs),
    /// Probability that s uniform vertices of a graph are independent.
    Independence(IndependenceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExponentsArgs {
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["pmin", "pmax", "step"])]
    pub p: Vec<f64>,
    #[arg(long, requires_all = ["pmax", "step"])]
    pub pmin: Option<f64>,
    #[arg(long)]
    pub pmax: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Dimension scale; `inf` selects the limiting forms.
    #[arg(long = "D", value_delimiter = ',', default_value = "inf")]
    pub scale: Vec<DimScale>,
    #[arg(long = "K", default_value_t = 0.0)]
    pub k: f64,
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    #[arg(long, value_delimiter = ',', default_value = "3")]
    pub ell: Vec<u32>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GammaCurveArgs {
    #[arg(long, default_value_t = 0.30)]
    pub pmin: f64,
    #[arg(long, default_value_t = 0.499)]
    pub pmax: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplerArg {
    Direct,
    Gram,
}

#[derive(Debug, Args)]
pub struct McVerifyArgs {
    #[arg(long, default_value_t = 3)]
    pub r: usize,
    #[arg(long, default_value_t = 400)]
    pub d: usize,
    #[arg(long = "D", default_value = "inf")]
    pub scale: DimScale,
    #[arg(long, default_value_t = 0.455)]
    pub p: f64,
    #[arg(long = "K", default_value_t = 0.0)]
    pub k: f64,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "direct")]
    pub sampler: SamplerArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub t: usize,
    #[arg(long, default_value_t = 2)]
    pub ell: u8,
    #[arg(long, default_value_t = 1000)]
    pub attempts: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `cycleN`, `completeN`, `petersen`, `empty`, `geometric`, or a graph file.
    #[arg(long, default_value = "cycle5")]
    pub base: String,
    #[command(flatten)]
    pub geometric: GeometricBaseArgs,
    /// Certificate destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GeometricBaseArgs {
    /// Vertex count of a sampled geometric base graph.
    #[arg(long = "M", default_value_t = 64)]
    pub m: usize,
    #[arg(long, default_value_t = 16)]
    pub d: usize,
    #[arg(long, default_value_t = 0.3)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub base_seed: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub file: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SampleGraphArgs {
    #[arg(long = "M")]
    pub m: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the point cloud in binary form.
    #[arg(long)]
    pub cloud: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IndependenceArgs {
    /// `cycleN`, `completeN`, `petersen`, `empty`, or a graph file.
    #[arg(long, default_value = "cycle5")]
    pub graph: String,
    #[arg(long)]
    pub s: u64,
    /// Zero selects exact evaluation.
    #[arg(long, default_value_t = 0)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    EXIT_CONFIG
                }
            };
        }
    };
    match dispatch(config, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                Error::Precondition(_) => EXIT_PRECONDITION,
                _ => EXIT_CONFIG,
            }
        }
    }
}

fn dispatch(config: RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match config.command {
        Command::Exponents(a) => cmd_exponents(&a, stdout),
        Command::GammaCurve(a) => cmd_gamma_curve(&a, stdout),
        Command::McVerify(a) => cmd_mc_verify(&a, stdout, stderr),
        Command::Certify(a) => cmd_certify(&a, stdout, stderr),
        Command::Verify(a) => cmd_verify(&a, stdout, stderr),
        Command::SampleGraph(a) => cmd_sample_graph(&a, stdout),
        Command::Independence(a) => cmd_independence(&a, stdout),
    }
}

/// A cell of an output table.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    U(u64),
    S(String),
    B(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::F(x) if x.is_nan() => "nan".into(),
            Cell::F(x) if x.is_infinite() => if *x > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::F(x) => format!("{x:.16e}"),
            Cell::U(x) => x.to_string(),
            Cell::S(s) => s.clone(),
            Cell::B(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(x) => serde_json::Number::from_f64(*x)
                .map(Value::Number)
                .unwrap_or_else(|| Value::String(self.csv())),
            Cell::U(x) => json!(x),
            Cell::S(s) => json!(s),
            Cell::B(b) => json!(b),
        }
    }
}

impl From<DimScale> for Cell {
    fn from(d: DimScale) -> Self {
        match d {
            DimScale::Finite(x) => Cell::F(x),
            DimScale::Infinite => Cell::F(f64::INFINITY),
        }
    }
}

/// Rows plus trailing `# key,value` notes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub notes: Vec<(&'static str, Cell)>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            ..Default::default()
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = self.columns.join(",");
                out.push('\n');
                for row in &self.rows {
                    out.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
                    out.push('\n');
                }
                for (key, value) in &self.notes {
                    out.push_str(&format!("# {key},{}\n", value.csv()));
                }
                out
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let m: Map<String, Value> = self
                            .columns
                            .iter()
                            .zip(row)
                            .map(|(c, v)| (c.to_string(), v.json()))
                            .collect();
                        Value::Object(m)
                    })
                    .collect();
                let mut notes = Map::new();
                for (key, value) in &self.notes {
                    let entry = notes.entry(key.to_string()).or_insert_with(|| json!([]));
                    entry.as_array_mut().expect("notes are arrays").push(value.json());
                }
                let doc = json!({ "columns": self.columns, "rows": rows, "notes": notes });
                let mut s = serde_json::to_string_pretty(&doc).expect("table serialises");
                s.push('\n');
                s
            }
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &[u8], stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text)?,
    }
    Ok(())
}

fn emit_table(table: &Table, output: &OutputArgs, stdout: &mut dyn Write) -> Result<()> {
    emit(&output.out, table.render(output.format).as_bytes(), stdout)
}

/// `pmin, pmin + step, ...` up to `pmax`; empty when `pmax < pmin`.
pub fn grid(pmin: f64, pmax: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !pmin.is_finite() || !pmax.is_finite() {
        return Err(Error::Domain(format!("invalid grid pmin={pmin} pmax={pmax} step={step}")));
    }
    if pmax < pmin {
        return Ok(Vec::new());
    }
    let n = ((pmax - pmin) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| pmin + i as f64 * step).collect())
}

pub const EXPONENT_COLUMNS: [&str; 18] = [
    "p", "D", "K", "delta", "ell", "kappa", "lambda", "c_p", "a", "sawin_g", "alpha_formal", "theta_star",
    "theta0", "theta1", "h", "a3h", "gamma", "beta",
];

pub fn exponents_table(args: &ExponentsArgs) -> Result<Table> {
    let ps = match (args.pmin, args.pmax, args.step) {
        (Some(lo), Some(hi), Some(step)) => grid(lo, hi, step)?,
        _ => args.p.clone(),
    };
    let mut table = Table::new(&EXPONENT_COLUMNS);
    for &p in &ps {
        for &scale in &args.scale {
            let rep = ExponentReport::compute(p, scale, args.k, args.delta, &args.ell)?;
            for &(ell, beta) in &rep.ramsey_base2_coeff {
                table.rows.push(vec![
                    Cell::F(p),
                    scale.into(),
                    Cell::F(args.k),
                    Cell::F(args.delta),
                    Cell::U(ell as u64),
                    Cell::F(rep.kappa),
                    Cell::F(rep.lambda),
                    Cell::F(rep.c_p),
                    Cell::F(rep.a),
                    Cell::F(rep.sawin_g),
                    Cell::F(rep.alpha_formal),
                    Cell::F(rep.theta_star),
                    Cell::F(rep.theta0),
                    Cell::F(rep.theta1),
                    Cell::F(rep.gamma_bracket),
                    Cell::F(rep.a.powi(3) * rep.gamma_bracket),
                    Cell::F(rep.gamma),
                    Cell::F(beta),
                ]);
            }
        }
    }
    Ok(table)
}

fn cmd_exponents(args: &ExponentsArgs, stdout: &mut dyn Write) -> Result<i32> {
    emit_table(&exponents_table(args)?, &args.output, stdout)?;
    Ok(EXIT_OK)
}

pub fn gamma_curve_table(pmin: f64, pmax: f64, step: f64) -> Result<Table> {
    if !(0.0 < pmin && pmin < pmax && pmax < 0.5) {
        return Err(Error::Domain(format!("need 0 < pmin < pmax < 0.5, got [{pmin}, {pmax}]")));
    }
    let mut table = Table::new(&["p", "h", "theta0", "a3h"]);
    let mut prev: Option<(f64, f64)> = None;
    let mut roots = Vec::new();
    for p in grid(pmin, pmax, step)? {
        let h = gamma_bracket(p)?;
        let (theta0, _) = theta_expansion(p)?;
        let a = c_p_of(p)?.a;
        table
            .rows
            .push(vec![Cell::F(p), Cell::F(h), Cell::F(theta0), Cell::F(a.powi(3) * h)]);
        if let Some((q, hq)) = prev {
            if h == 0.0 {
                roots.push(p);
            } else if hq != 0.0 && hq.signum() != h.signum() {
                roots.push(find_gamma_root(q, p)?);
            }
        }
        prev = Some((p, h));
    }
    if roots.is_empty() {
        table.notes.push(("sign_change", Cell::S("none".into())));
    }
    for r in roots {
        table.notes.push(("sign_change", Cell::F(r)));
    }
    Ok(table)
}

fn cmd_gamma_curve(args: &GammaCurveArgs, stdout: &mut dyn Write) -> Result<i32> {
    emit_table(&gamma_curve_table(args.pmin, args.pmax, args.step)?, &args.output, stdout)?;
    Ok(EXIT_OK)
}

pub const MC_COLUMNS: [&str; 17] = [
    "r", "d", "D", "p", "K", "tau", "trials", "seed", "kind", "estimate", "std_error", "log_bound", "bound",
    "baseline", "z_vs_baseline", "z_vs_bound", "violation",
];

fn cmd_mc_verify(args: &McVerifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let sampler = match args.sampler {
        SamplerArg::Direct => TupleSampler::Direct,
        SamplerArg::Gram => TupleSampler::Gram,
    };
    let cmp = mc_bound_comparison(args.r, args.d, args.scale, args.p, args.k, args.trials, args.seed, sampler)?;
    let mut table = Table::new(&MC_COLUMNS);
    for row in &cmp.rows {
        table.rows.push(vec![
            Cell::U(cmp.r as u64),
            Cell::U(cmp.d as u64),
            cmp.scale.into(),
            Cell::F(cmp.p),
            Cell::F(cmp.k),
            Cell::F(cmp.tau),
            Cell::U(cmp.trials),
            Cell::U(cmp.seed),
            Cell::S(row.kind.to_string()),
            Cell::F(row.estimate),
            Cell::F(row.std_error),
            Cell::F(row.log_bound),
            Cell::F(row.bound),
            Cell::F(row.baseline),
            Cell::F(row.z_vs_baseline),
            Cell::F(row.z_vs_bound),
            Cell::B(row.violation),
        ]);
    }
    emit_table(&table, &args.output, stdout)?;
    if cmp.any_violation() {
        for row in cmp.rows.iter().filter(|r| r.violation) {
            writeln!(
                stderr,
                "violation: kind={} estimate={:.16e} bound={:.16e} std_error={:.16e} z={:.3}",
                row.kind, row.estimate, row.bound, row.std_error, row.z_vs_bound
            )?;
        }
        return Ok(EXIT_VIOLATION);
    }
    Ok(EXIT_OK)
}

/// Resolves a named graph or reads a graph file.
pub fn resolve_graph(name: &str) -> Result<(Graph, String)> {
    let named = |prefix: &str| name.strip_prefix(prefix).and_then(|n| n.parse::<usize>().ok());
    if name == "petersen" {
        return Ok((Graph::petersen(), name.into()));
    }
    if name == "empty" {
        return Ok((Graph::empty(1), name.into()));
    }
    if let Some(n) = named("cycle") {
        return Ok((Graph::cycle(n), name.into()));
    }
    if let Some(n) = named("complete") {
        return Ok((Graph::complete(n), name.into()));
    }
    let path = Path::new(name);
    let file = File::open(path).map_err(|e| Error::Io(format!("{name}: {e}")))?;
    let g = read_graph(BufReader::new(file))?;
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok((g.graph, format!("file {name}")))
}

fn cmd_certify(args: &CertifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let (base, desc) = if args.base == "geometric" {
        let g = &args.geometric;
        let gg = GeometricGraph::sample(g.m, g.d, g.p, g.base_seed)?;
        let desc = format!("geometric M={} d={} p={} seed={}", g.m, g.d, g.p, g.base_seed);
        (gg.graph, desc)
    } else {
        resolve_graph(&args.base)?
    };
    let desc = if args.ell > 2 { desc } else { String::new() };
    let outcome = certify_ramsey_lower(args.n, args.t, args.ell, &base, &desc, args.attempts, args.seed)?;
    let s = outcome.stats();
    emit(&args.out, write_certificate(outcome.certificate()).as_bytes(), stdout)?;
    match &outcome {
        CertifyOutcome::Certified { attempt, .. } => {
            writeln!(stderr, "certified N={} t={} ell={} attempt={attempt} attempts_used={}", args.n, args.t, args.ell, s.attempts)?;
            Ok(EXIT_OK)
        }
        CertifyOutcome::Exhausted { best_attempt, best, .. } => {
            writeln!(
                stderr,
                "exhausted N={} t={} ell={} attempts={} failed={} mean_violations={:.6} best_attempt={best_attempt} best_violations={}",
                args.n,
                args.t,
                args.ell,
                s.attempts,
                s.failed,
                s.mean_violations,
                best.violations.len()
            )?;
            Ok(EXIT_EXHAUSTED)
        }
    }
}

fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let text = std::fs::read_to_string(&args.file).map_err(|e| Error::Io(format!("{}: {e}", args.file.display())))?;
    let re = reverify_certificate(&text)?;
    let c = &re.parsed.coloring;
    let mut table = Table::new(&["check", "color", "vertices"]);
    for (color, w) in &re.certificate.violations {
        table.rows.push(vec![
            Cell::S("monochromatic_clique".into()),
            Cell::U(*color as u64),
            Cell::S(join(w)),
        ]);
    }
    for &(x, y) in &re.collapsed_pairs {
        table.rows.push(vec![
            Cell::S("collapsed_pair".into()),
            Cell::U(c.color(x, y) as u64),
            Cell::S(join(&[x, y])),
        ]);
    }
    table.notes = vec![
        ("N", Cell::U(c.n as u64)),
        ("t", Cell::U(re.parsed.t as u64)),
        ("ell", Cell::U(c.ell as u64)),
        ("seed", Cell::U(c.seed)),
        ("claimed_verified", Cell::B(re.parsed.claimed_verified)),
        ("accepted", Cell::B(re.accepted())),
    ];
    emit_table(&table, &args.output, stdout)?;
    if re.accepted() {
        Ok(EXIT_OK)
    } else {
        writeln!(
            stderr,
            "rejected: {} monochromatic K_{} witness(es), {} collapsed pair(s), header verified={}",
            re.certificate.violations.len(),
            re.parsed.t,
            re.collapsed_pairs.len(),
            re.parsed.claimed_verified
        )?;
        Ok(EXIT_VIOLATION)
    }
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn cmd_sample_graph(args: &SampleGraphArgs, stdout: &mut dyn Write) -> Result<i32> {
    let cloud = SpherePointCloud::sample(args.m, args.d, args.seed)?;
    let g = GeometricGraph::build(&cloud, args.p)?;
    if let Some(path) = &args.cloud {
        let mut buf = Vec::new();
        write_cloud(&mut buf, &cloud)?;
        std::fs::write(path, buf)?;
    }
    let mut buf = Vec::new();
    write_graph(&mut buf, &GraphFile::from(g))?;
    emit(&args.out, &buf, stdout)?;
    Ok(EXIT_OK)
}

fn cmd_independence(args: &IndependenceArgs, stdout: &mut dyn Write) -> Result<i32> {
    let (g, _) = resolve_graph(&args.graph)?;
    let mode = if args.trials == 0 {
        QMode::Exact
    } else {
        QMode::MonteCarlo {
            trials: args.trials,
            seed: args.seed,
        }
    };
    let est = independence_probability(&g, args.s, mode)?;
    let mut table = Table::new(&["s", "mode", "value", "std_error", "trials", "numerator", "denominator"]);
    let (num, den) = match est.exact_ratio {
        Some((a, b)) => (Cell::S(a.to_string()), Cell::S(b.to_string())),
        None => (Cell::S(String::new()), Cell::S(String::new())),
    };
    let mode = match est.mode {
        EstimateMode::Exact => "exact",
        EstimateMode::MonteCarlo => "monte_carlo",
    };
    table.rows.push(vec![
        Cell::U(est.s),
        Cell::S(mode.into()),
        Cell::F(est.value),
        Cell::F(est.std_error),
        Cell::U(est.trials),
        num,
        den,
    ]);
    emit_table(&table, &args.output, stdout)?;
    Ok(EXIT_OK)
}
