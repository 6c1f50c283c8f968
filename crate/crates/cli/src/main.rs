//! `fracsob`: constant tables, semi-norm evaluations, limit studies,
//! spectral cross-checks and the acceptance suite, reported as JSON or CSV.

mod report;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{ArgGroup, Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use fracsob::funcspace::{closed_form_dini, closed_form_seminorm, TestFunction};
use fracsob::limits::{default_sigmas, limit_study, Extrapolation};
use fracsob::seminorms::{dini_seminorm, dini_via_modulus, gagliardo_seminorm, integer_seminorm, FracOrder};
use fracsob::specfun::{constant_g, constant_k, constant_m, Direction, KMethod, MMethod};
use fracsob::spectral::{
    default_quadrature, gagliardo_via_spectral, membership_beppo_levi, membership_htilde, spectral_energy_with,
    SpectralMethod,
};
use fracsob::suite::{run_criterion, SuiteConfig, Tolerances, CRITERIA};
use fracsob::{Domain, Error, QuadMethod, QuadSpec};

use report::{num, rel_err, Report};

#[derive(Parser, Debug)]
#[command(name = "fracsob", version, about = "Fractional Sobolev semi-norms, constants and limit studies")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Serialize)]
struct Global {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Seed for Monte Carlo quadrature.
    #[arg(long, env = "FRACSOB_SEED", default_value_t = 42, global = true)]
    seed: u64,
    /// Leave the wall-clock timestamp out of the report.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Override a tolerance, e.g. `--tol split=1e-10`. Repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE", value_parser = parse_tol, global = true)]
    tol: Vec<(String, f64)>,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate K, M and G against their quadrature oracles.
    Constants(ConstantsArgs),
    /// Evaluate one semi-norm.
    Seminorm(SeminormArgs),
    /// Sweep σ toward an endpoint and extrapolate.
    Limit(LimitArgs),
    /// Dini semi-norm, directly and through the averaged modulus.
    Dini(DiniArgs),
    /// Fourier-side energies and membership checks.
    Spectral(SpectralArgs),
    /// Run the acceptance suite.
    Suite(SuiteArgs),
}

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("which").required(true).multiple(true).args(["k", "m", "g"])))]
struct ConstantsArgs {
    #[arg(long = "K")]
    k: bool,
    #[arg(long = "M")]
    m: bool,
    #[arg(long = "G")]
    g: bool,
    /// Exponents for K (comma separated).
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    /// Dimensions for K and G (comma separated).
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Values of σ for M and G (comma separated).
    #[arg(long, value_delimiter = ',')]
    sigma: Vec<f64>,
}

#[derive(Args, Debug, Serialize)]
struct FunctionArgs {
    /// Test function, e.g. `gauss`, `affine:0,1`, `d[1](gauss)`.
    #[arg(long = "fn")]
    function: String,
    /// Dimension for descriptors that do not fix one.
    #[arg(long, default_value_t = 1)]
    n: usize,
}

#[derive(Args, Debug, Serialize)]
struct QuadArgs {
    /// gauss_tensor, adaptive, monte_carlo or polar_singular.
    #[arg(long, value_parser = parse_method)]
    method: Option<QuadMethod>,
    /// Gauss points per panel, or Monte Carlo samples.
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    rel_tol: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
struct SeminormArgs {
    #[command(flatten)]
    function: FunctionArgs,
    /// Domain, e.g. `box:0,1`, `ball:0,0;1`, `rn:8`.
    #[arg(long)]
    domain: String,
    #[arg(long)]
    r: f64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Args, Debug, Serialize)]
struct LimitArgs {
    #[command(flatten)]
    function: FunctionArgs,
    #[arg(long)]
    domain: String,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// to_zero or to_one.
    #[arg(long, value_parser = parse_direction)]
    dir: Direction,
    /// Exponent of the (1-σ) prefactor; defaults to the admissible one.
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, default_value_t = 0)]
    l: u32,
    /// none, linear or richardson.
    #[arg(long, value_parser = parse_extrapolation)]
    extrapolation: Option<Extrapolation>,
    /// σ values (comma separated); defaults to a dyadic approach.
    #[arg(long, value_delimiter = ',')]
    sigmas: Vec<f64>,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Args, Debug, Serialize)]
struct DiniArgs {
    #[command(flatten)]
    function: FunctionArgs,
    #[arg(long)]
    domain: String,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    l: u32,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Args, Debug, Serialize)]
struct SpectralArgs {
    #[command(flatten)]
    function: FunctionArgs,
    /// Order of the weight |ξ|^{2r}.
    #[arg(long)]
    r: f64,
    /// Also split r = m + s and check every order-m derivative.
    #[arg(long)]
    m: Option<u32>,
    /// Relative growth below which a truncated energy counts as converged.
    #[arg(long, default_value_t = 1e-8)]
    threshold: f64,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Args, Debug, Serialize)]
struct SuiteArgs {
    /// Only these criteria (comma separated).
    #[arg(long, value_delimiter = ',')]
    criteria: Vec<u32>,
    /// Samples for the two-dimensional Monte Carlo check.
    #[arg(long)]
    mc_samples: Option<usize>,
}

/// Suite tolerances plus the ones used by single evaluations.
#[derive(Debug, Clone, Serialize)]
struct Tols {
    #[serde(flatten)]
    suite: Tolerances,
    /// Single evaluations against a closed form.
    reference: f64,
    /// Extrapolated limit against its prediction.
    limit: f64,
    /// Closed-form against quadrature spectral energy.
    spectral: f64,
}

impl Tols {
    fn new(overrides: &[(String, f64)]) -> Result<Self, Error> {
        let mut t = Tols {
            suite: Tolerances::default(),
            reference: 1e-3,
            limit: 1e-2,
            spectral: 1e-6,
        };
        for (name, value) in overrides {
            match name.as_str() {
                "reference" => t.reference = *value,
                "limit" => t.limit = *value,
                "spectral" => t.spectral = *value,
                other => t.suite.set(other, *value)?,
            }
        }
        Ok(t)
    }
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let value: f64 = value.trim().parse().map_err(|_| format!("bad number `{value}`"))?;
    if !(value > 0.0 && value.is_finite()) {
        return Err(format!("tolerance must be positive, got {value}"));
    }
    Ok((name.trim().to_string(), value))
}

fn parse_method(s: &str) -> Result<QuadMethod, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_direction(s: &str) -> Result<Direction, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_extrapolation(s: &str) -> Result<Extrapolation, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure after argument parsing: bad input maps to exit 2, numerical
/// failure to exit 1.
enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonFinite { .. } | Error::StudyFailed { .. } => Failure::Numerical(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Numerical(format!("cannot write report: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            let mut cmd = Cli::command();
            cmd.error(ErrorKind::ValueValidation, msg).exit()
        }
    }
}

/// Runs the command and writes its report; `Ok(false)` when a row fails its
/// tolerance.
fn run(cli: &Cli) -> Result<bool, Failure> {
    let g = &cli.global;
    let tols = Tols::new(&g.tol)?;
    let (name, args, rows) = match &cli.command {
        Command::Constants(a) => ("constants", json!(a), constants(a, &tols)?),
        Command::Seminorm(a) => ("seminorm", json!(a), seminorm(a, g.seed, &tols)?),
        Command::Limit(a) => ("limit", json!(a), limit(a, g.seed, &tols)?),
        Command::Dini(a) => ("dini", json!(a), dini(a, g.seed, &tols)?),
        Command::Spectral(a) => ("spectral", json!(a), spectral(a, g.seed, &tols)?),
        Command::Suite(a) => ("suite", json!(a), suite(a, g.seed, &tols)?),
    };
    let config = json!({
        "args": args,
        "format": g.format,
        "seed": g.seed,
        "tolerances": tols,
    });
    let report = Report::new(name, config, rows, !g.no_timestamp);
    let mut out: Box<dyn Write> = match &g.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match g.format {
        Format::Json => report.write_json(&mut out)?,
        Format::Csv => report.write_csv(&mut out)?,
    }
    out.flush()?;
    Ok(report.all_passed())
}

fn function(a: &FunctionArgs) -> Result<TestFunction, Failure> {
    Ok(TestFunction::parse(&a.function, a.n)?)
}

/// Parses the domain in the dimension of `v` unless the literal fixes one.
fn domain(s: &str, v: &TestFunction) -> Result<Domain, Failure> {
    let d = Domain::parse(s, v.dim())?;
    if d.dim() != v.dim() {
        return Err(Failure::Usage(format!(
            "domain `{s}` has dimension {} but the function has dimension {}",
            d.dim(),
            v.dim()
        )));
    }
    Ok(d)
}

fn quad_spec(q: &QuadArgs, seed: u64, default: QuadSpec) -> Result<QuadSpec, Failure> {
    let method = q.method.unwrap_or(default.method);
    let order = q.order.unwrap_or(if method == default.method {
        default.order_or_samples
    } else if method == QuadMethod::MonteCarlo {
        1 << 20
    } else {
        12
    });
    Ok(QuadSpec::new(method, order, seed, q.rel_tol.unwrap_or(default.rel_tol))?)
}

fn checked(mut row: Value, value: f64, reference: Option<f64>, tol: f64) -> Value {
    if let Some(reference) = reference {
        let err = rel_err(value, reference);
        row["reference"] = num(reference);
        row["rel_err"] = num(err);
        row["tol"] = num(tol);
        row["passed"] = json!(err <= tol);
    }
    row
}

fn constants(a: &ConstantsArgs, tols: &Tols) -> Result<Vec<Value>, Failure> {
    let mut rows = Vec::new();
    let need = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(Failure::Usage(what.to_string()))
        }
    };
    if a.k {
        need(!a.p.is_empty() && !a.n.is_empty(), "--K needs --p and --n")?;
        for &p in &a.p {
            for &n in &a.n {
                let r = constant_k(p, n, KMethod::SphereQuadrature)?;
                rows.push(constant_row(json!({"name": "K", "p": p, "n": n}), &r, tols.suite.k_quadrature));
            }
        }
    }
    if a.m {
        need(!a.sigma.is_empty(), "--M needs --sigma")?;
        for &s in &a.sigma {
            let r = constant_m(s, MMethod::LineQuadrature)?;
            rows.push(constant_row(json!({"name": "M", "sigma": s}), &r, tols.suite.m_quadrature));
        }
    }
    if a.g {
        need(!a.sigma.is_empty() && !a.n.is_empty(), "--G needs --sigma and --n")?;
        for &s in &a.sigma {
            for &n in &a.n {
                let r = constant_g(s, n)?;
                rows.push(constant_row(json!({"name": "G", "sigma": s, "n": n}), &r, tols.suite.g_factorisation));
            }
        }
    }
    Ok(rows)
}

fn constant_row(mut row: Value, r: &fracsob::specfun::ConstantReport, tol: f64) -> Value {
    row["value"] = num(r.closed_form);
    if let (Some(oracle), Some(err)) = (r.oracle, r.rel_err) {
        row["oracle"] = num(oracle);
        row["oracle_rel_err"] = num(err);
        row["tol"] = num(tol);
        row["passed"] = json!(err <= tol);
    }
    row
}

fn seminorm(a: &SeminormArgs, seed: u64, tols: &Tols) -> Result<Vec<Value>, Failure> {
    let v = function(&a.function)?;
    let dom = domain(&a.domain, &v)?;
    let spec = quad_spec(&a.quad, seed, QuadSpec::polar(1e-8))?;
    let order = FracOrder::from_r(a.r, a.p)?;
    let res = if order.sigma == 0.0 {
        integer_seminorm(&v, order.l, a.p, &dom, &spec)?
    } else {
        gagliardo_seminorm(&v, order, &dom, &spec)?
    };
    let row = json!({
        "function": v.to_string(),
        "domain": dom.to_string(),
        "r": a.r,
        "p": a.p,
        "method": spec.method.to_string(),
        "value": num(res.value),
        "value_p": num(res.value_p),
        "err_abs": num(res.estimate.err_abs),
    });
    let reference = closed_form_seminorm(&v, a.r, a.p, &dom);
    Ok(vec![checked(row, res.value_p, reference, tols.reference)])
}

fn limit(a: &LimitArgs, seed: u64, tols: &Tols) -> Result<Vec<Value>, Failure> {
    let v = function(&a.function)?;
    let dom = domain(&a.domain, &v)?;
    let spec = quad_spec(&a.quad, seed, QuadSpec::polar(1e-8))?;
    let k = a.k.unwrap_or(match (dom.is_bounded(), a.dir) {
        (false, Direction::ToZero) => 0,
        _ => 1,
    });
    let sigmas = if a.sigmas.is_empty() {
        default_sigmas(a.dir)
    } else {
        a.sigmas.clone()
    };
    let extrapolation = a.extrapolation.unwrap_or(Extrapolation::default_for(a.dir));
    let study = limit_study(&v, a.l, a.p, &dom, a.dir, k, &sigmas, &spec, extrapolation)?;
    let mut rows: Vec<Value> = study
        .points
        .iter()
        .map(|pt| {
            json!({
                "row": "point",
                "sigma": pt.sigma,
                "dist": pt.dist,
                "value": num(pt.value),
                "err_abs": num(pt.err_abs),
                "error": pt.error,
            })
        })
        .collect();
    let summary = json!({
        "row": "limit",
        "function": study.function,
        "domain": dom.to_string(),
        "direction": a.dir.to_string(),
        "k": k,
        "l": a.l,
        "p": a.p,
        "extrapolation": extrapolation.to_string(),
        "value": num(study.extrapolated),
        "extrapolated": num(study.extrapolated),
    });
    rows.push(checked(summary, study.extrapolated, Some(study.reference), tols.limit));
    Ok(rows)
}

fn dini(a: &DiniArgs, seed: u64, tols: &Tols) -> Result<Vec<Value>, Failure> {
    let v = function(&a.function)?;
    let dom = domain(&a.domain, &v)?;
    let spec = quad_spec(&a.quad, seed, QuadSpec::polar(1e-7))?;
    let direct = dini_seminorm(&v, a.l, a.p, &dom, &spec)?;
    let via = dini_via_modulus(&v, a.l, a.p, &dom, &spec)?;
    let exact = closed_form_dini(&v, a.l, a.p, &dom);
    let base = |method: &str, value: f64, err_abs: f64| {
        json!({
            "function": v.to_string(),
            "domain": dom.to_string(),
            "l": a.l,
            "p": a.p,
            "method": method,
            "value": num(value),
            "err_abs": num(err_abs),
        })
    };
    Ok(vec![
        checked(
            base("direct", direct.value_p, direct.estimate.err_abs),
            direct.value_p,
            exact,
            tols.reference,
        ),
        checked(
            base("modulus", via.value, via.err_abs),
            via.value,
            Some(exact.unwrap_or(direct.value_p)),
            tols.suite.modulus,
        ),
    ])
}

fn spectral(a: &SpectralArgs, seed: u64, tols: &Tols) -> Result<Vec<Value>, Failure> {
    let v = function(&a.function)?;
    let spec = quad_spec(&a.quad, seed, default_quadrature())?;
    let base = |method: &str| json!({"function": v.to_string(), "r": a.r, "method": method});
    let mut rows = Vec::new();
    let closed = match spectral_energy_with(&v, a.r, SpectralMethod::ClosedForm, &spec) {
        Ok(e) => {
            let mut row = base("closed_form");
            row["value"] = num(e.value);
            rows.push(row);
            Some(e.value)
        }
        Err(Error::Unsupported { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let quad = spectral_energy_with(&v, a.r, SpectralMethod::Quadrature, &spec)?;
    let mut row = base("quadrature");
    row["value"] = num(quad.value);
    row["err_abs"] = num(quad.estimate.err_abs);
    rows.push(checked(row, quad.value, closed, tols.spectral));

    let m = membership_htilde(&v, a.r, a.threshold)?;
    let mut row = base("membership");
    row["value"] = num(m.value);
    row["finite"] = json!(m.finite);
    row["radius"] = num(m.radius);
    rows.push(row);

    if a.r > 0.0 && a.r < 1.0 {
        let mut row = base("gagliardo_via_spectral");
        row["value"] = num(gagliardo_via_spectral(&v, a.r, &spec)?);
        rows.push(row);
    }
    if let Some(m) = a.m {
        let s = a.r - m as f64;
        if !(0.0..1.0).contains(&s) {
            return Err(Failure::Usage(format!("--m {m} leaves s = {s} outside [0, 1)")));
        }
        let bl = membership_beppo_levi(&v, m, s, a.threshold)?;
        for e in &bl.entries {
            let mut row = base("beppo_levi");
            row["alpha"] = json!(e.alpha.to_string());
            row["multinomial"] = json!(e.multinomial as f64);
            row["value"] = num(e.energy);
            row["finite"] = json!(e.finite);
            rows.push(row);
        }
        let mut row = base("beppo_levi_sum");
        row["value"] = num(bl.weighted_sum);
        row["finite"] = json!(bl.finite);
        rows.push(checked(row, bl.weighted_sum, closed, tols.spectral));
    }
    Ok(rows)
}

fn suite(a: &SuiteArgs, seed: u64, tols: &Tols) -> Result<Vec<Value>, Failure> {
    let mut cfg = SuiteConfig {
        seed,
        tolerances: tols.suite.clone(),
        ..SuiteConfig::default()
    };
    if let Some(samples) = a.mc_samples {
        cfg.mc_samples = samples;
    }
    let ids: Vec<u32> = if a.criteria.is_empty() {
        CRITERIA.iter().map(|(id, _)| *id).collect()
    } else {
        a.criteria.clone()
    };
    let mut rows = Vec::new();
    for id in ids {
        let out = run_criterion(id, &cfg)?;
        eprintln!("{} criterion {}: {}", if out.passed { "PASS" } else { "FAIL" }, out.id, out.title);
        for r in &out.rows {
            rows.push(json!({
                "criterion": out.id,
                "title": out.title,
                "check": r.check,
                "value": num(r.value),
                "reference": num(r.reference),
                "err": num(r.err),
                "tol": num(r.tol),
                "relative": r.relative,
                "passed": r.passed,
            }));
        }
    }
    Ok(rows)
}
