//! `dunkl`: command-line front end for the Dunkl numerics library.
//!
//! Exit codes: 0 on success, 1 when a verification check fails or a
//! computation errors, 2 on usage errors.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context as _};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dunkl::config::{RootSystemSource, SuiteConfig, TimeGrid};
use dunkl::constants::ConstantsReport;
use dunkl::fields::FieldCatalog;
use dunkl::kernels::{besov_norm, heat_apply, dunkl_transform};
use dunkl::quadrature::{integrate_with_cells, lp_norm, Domain, QuadConfig, Support};
use dunkl::rearrange::{decreasing_rearrangement, RearrangeConfig};
use dunkl::verify::{run_suite_with, Registry, Status};
use dunkl::{Error, RootSystem};
use serde_json::json;

#[derive(Parser)]
#[command(name = "dunkl", version, about = "Rational Dunkl operators, weighted quadrature and inequality checks")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RsArg {
    /// Root system: shorthand (`a1:k=1`, `a1x2:k=1,0.5`, `a2:k=1`, `b2:k=1,0.5`,
    /// `i2m:m=5,k=1`) or a JSON file.
    #[arg(long)]
    rs: String,
}

impl RsArg {
    fn resolve(&self) -> dunkl::Result<RootSystem> {
        RootSystemSource::Text(self.rs.clone()).resolve()
    }
}

#[derive(Args)]
struct FieldArg {
    /// Test field, e.g. `gaussian`, `talenti:1,1,2,3`, `bump:1.5,0.4`, `random-mixture:7,3`.
    #[arg(long, default_value = "gaussian")]
    field: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form constants for a root system.
    Constants {
        #[command(flatten)]
        rs: RsArg,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// `∫_Ω f dμ_k`, or `‖f‖_{L^p(Ω)}` with `--p`.
    Quad {
        #[command(flatten)]
        rs: RsArg,
        #[command(flatten)]
        field: FieldArg,
        /// `full`, `ball:R`, `box:a1,b1[,a2,b2,...]`, `chamber:I` or `chamber-ball:I,R`.
        #[arg(long, default_value = "full")]
        domain: String,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Write per-cell contributions as CSV.
        #[arg(long)]
        dump_cells: Option<PathBuf>,
    },
    /// `P_t f(x)` for a product root system.
    Heat {
        #[command(flatten)]
        rs: RsArg,
        #[command(flatten)]
        field: FieldArg,
        #[arg(long)]
        t: f64,
        /// Point, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Dunkl transform `D_k f(ξ)` for a product root system.
    Transform {
        #[command(flatten)]
        rs: RsArg,
        #[command(flatten)]
        field: FieldArg,
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
    },
    /// Besov norm `sup_t t^{−s/2}‖P_t f‖_∞` over a log time grid.
    Besov {
        #[command(flatten)]
        rs: RsArg,
        #[command(flatten)]
        field: FieldArg,
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
        #[arg(long, default_value_t = 1e-2)]
        t_min: f64,
        #[arg(long, default_value_t = 1e2)]
        t_max: f64,
        #[arg(long, default_value_t = 9)]
        t_points: usize,
    },
    /// Symmetric decreasing rearrangement on a chamber.
    Rearrange {
        #[command(flatten)]
        rs: RsArg,
        #[command(flatten)]
        field: FieldArg,
        #[arg(long, default_value_t = 200)]
        levels: usize,
        #[arg(long, default_value_t = 0)]
        chamber: usize,
        /// CSV of `(r, f*(r))` samples.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the inequality checks and write a report.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Root system; overrides the config file.
    #[arg(long)]
    rs: Option<String>,
    /// JSON suite configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `all` or a comma-separated list of check names.
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Report path; the report goes to standard output otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for one CSV table per check.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Worker threads; the report does not depend on this.
    #[arg(long)]
    threads: Option<usize>,
    /// Multiplies every tolerance.
    #[arg(long)]
    tol_scale: Option<f64>,
    /// Record wall time in the report.
    #[arg(long)]
    timing: bool,
    /// List the registered checks and exit.
    #[arg(long)]
    list: bool,
}

/// Errors that mean the request itself was malformed.
fn is_usage(e: &anyhow::Error) -> bool {
    matches!(
        e.downcast_ref::<Error>(),
        Some(
            Error::Validation(_)
                | Error::UnknownCheck(_)
                | Error::UnknownField(_)
                | Error::ParameterRange(_)
                | Error::NegativeMultiplicity(_)
                | Error::Json(_)
        )
    )
}

fn parse_point(s: &str) -> anyhow::Result<Vec<f64>> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| anyhow!(Error::Validation(format!("bad coordinate `{v}`")))))
        .collect()
}

fn parse_domain(s: &str) -> anyhow::Result<Domain> {
    let (kind, args) = s.split_once(':').unwrap_or((s, ""));
    let nums = if args.is_empty() { Vec::new() } else { parse_point(args)? };
    let bad = || anyhow!(Error::Validation(format!("bad domain `{s}`")));
    Ok(match (kind, nums.as_slice()) {
        ("full", []) => Domain::FullSpace,
        ("ball", [r]) => Domain::Ball { radius: *r },
        ("chamber", [c]) if c.fract() == 0.0 && *c >= 0.0 => Domain::Chamber { chamber: *c as usize },
        ("chamber-ball", [c, r]) if c.fract() == 0.0 && *c >= 0.0 => Domain::ChamberBall { chamber: *c as usize, radius: *r },
        ("box", v) if !v.is_empty() && v.len() % 2 == 0 => Domain::Box {
            lo: v.chunks(2).map(|c| c[0]).collect(),
            hi: v.chunks(2).map(|c| c[1]).collect(),
        },
        _ => return Err(bad()),
    })
}

fn check_dimension(rs: &RootSystem, x: &[f64]) -> anyhow::Result<()> {
    if x.len() != rs.dimension() {
        bail!(Error::Validation(format!("expected {} coordinates, got {}", rs.dimension(), x.len())));
    }
    Ok(())
}

fn print_json(v: &serde_json::Value) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let catalog = FieldCatalog::default();
    match cli.command {
        Command::Constants { rs, p, format } => {
            let rs = rs.resolve()?;
            let report = ConstantsReport::new(&rs, p);
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
                Format::Csv => {
                    println!("name,value");
                    if let serde_json::Value::Object(map) = serde_json::to_value(&report)? {
                        for (k, v) in map {
                            println!("{k},{}", if v.is_null() { String::new() } else { v.to_string() });
                        }
                    }
                }
            }
        }
        Command::Quad { rs, field, domain, p, tol, dump_cells } => {
            let rs = rs.resolve()?;
            let f = catalog.parse(&field.field, &rs)?;
            let domain = parse_domain(&domain)?;
            let cfg = QuadConfig::with_rel_tol(tol);
            let (value, error, cells) = match p {
                Some(p) => {
                    let e = lp_norm(&rs, f.as_ref(), p, &domain, &cfg)?;
                    (e.value, e.err, None)
                }
                None => {
                    let (r, cells) = integrate_with_cells(&rs, &|x| f.value(x), &Support::of(f.as_ref()), &domain, &cfg)?;
                    (r.value, r.error_estimate, Some((r.cells_used, cells)))
                }
            };
            if let Some(path) = dump_cells {
                let (_, cells) = match &cells {
                    Some(c) => c.clone(),
                    None => {
                        let g = |x: &[f64]| f.value(x).abs().powf(p.unwrap_or(1.0));
                        let support = Support::of(f.as_ref()).power(p.unwrap_or(1.0));
                        let (r, c) = integrate_with_cells(&rs, &g, &support, &domain, &cfg)?;
                        (r.cells_used, c)
                    }
                };
                let mut out = String::from("chart,lo,hi,value,error\n");
                for c in cells {
                    let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";");
                    out.push_str(&format!("{},{},{},{:?},{:?}\n", c.chart, join(&c.lo), join(&c.hi), c.value, c.error));
                }
                std::fs::write(&path, out).with_context(|| format!("writing {}", path.display()))?;
            }
            print_json(&json!({ "value": value, "error_estimate": error, "cells_used": cells.map(|c| c.0) }))?;
        }
        Command::Heat { rs, field, t, at } => {
            let rs = rs.resolve()?;
            let f = catalog.parse(&field.field, &rs)?;
            let x = parse_point(&at)?;
            check_dimension(&rs, &x)?;
            let e = heat_apply(&rs, f.as_ref(), t, &x, &QuadConfig::with_rel_tol(1e-10))?;
            print_json(&json!({ "t": t, "x": x, "value": e.value, "error_estimate": e.err }))?;
        }
        Command::Transform { rs, field, xi } => {
            let rs = rs.resolve()?;
            let f = catalog.parse(&field.field, &rs)?;
            let xi = parse_point(&xi)?;
            check_dimension(&rs, &xi)?;
            let z = dunkl_transform(&rs, f.as_ref(), &xi, &QuadConfig::with_rel_tol(1e-10))?;
            print_json(&json!({ "xi": xi, "re": z.re, "im": z.im }))?;
        }
        Command::Besov { rs, field, s, t_min, t_max, t_points } => {
            let rs = rs.resolve()?;
            let f = catalog.parse(&field.field, &rs)?;
            let grid = TimeGrid { min: t_min, max: t_max, points: t_points };
            if !(t_min > 0.0 && t_max > t_min && t_points >= 1) {
                bail!(Error::Validation("time grid needs 0 < t-min < t-max".into()));
            }
            let v = besov_norm(&rs, f.as_ref(), s, &grid.values(), &QuadConfig::with_rel_tol(1e-8))?;
            print_json(&json!({ "s": s, "besov_norm": v, "t_grid": grid }))?;
        }
        Command::Rearrange { rs, field, levels, chamber, out } => {
            let rs = rs.resolve()?;
            let f = catalog.parse(&field.field, &rs)?;
            let cfg = RearrangeConfig { levels, ..RearrangeConfig::default() };
            let star = decreasing_rearrangement(&rs, f.as_ref(), chamber, &cfg)?;
            let quad = QuadConfig::with_rel_tol(1e-8);
            let support = star.support_radius();
            if let Some(path) = out {
                let mut csv = String::from("r,value\n");
                let top = if support.is_finite() { support } else { star.level_radius(star.sup * 1e-6) };
                for i in 0..=levels {
                    let r = top * i as f64 / levels as f64;
                    csv.push_str(&format!("{r:?},{:?}\n", star.value(r)));
                }
                std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
            }
            print_json(&json!({
                "field": f.name(),
                "chamber": chamber,
                "sup": star.sup,
                "support_radius": support,
                "l1": star.lp_norm(1.0, &quad)?.value,
                "l2": star.lp_norm(2.0, &quad)?.value,
            }))?;
        }
        Command::Verify(args) => return verify(args),
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    let registry = Registry::default();
    if args.list {
        for name in registry.names() {
            println!("{name}");
        }
        return Ok(ExitCode::SUCCESS);
    }
    let mut cfg = match &args.config {
        Some(path) => SuiteConfig::from_file(path)?,
        None => SuiteConfig::default(),
    };
    if let Some(rs) = args.rs {
        cfg.root_system = RootSystemSource::Text(rs);
    }
    if let Some(suite) = args.suite {
        cfg.checks = suite.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(s) = args.tol_scale {
        cfg.tol_scale = s;
    }
    if args.out.is_some() {
        cfg.out = args.out;
    }
    if args.csv.is_some() {
        cfg.csv = args.csv;
    }
    cfg.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        if n == 0 {
            bail!(Error::Validation("--threads must be positive".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build()?;
    let report = pool.install(|| run_suite_with(&cfg, &registry, args.timing))?;
    for c in &report.checks {
        let status = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::SkippedUnsupported => "SKIPPED",
        };
        let note = c.diagnostic.as_deref().unwrap_or("");
        eprintln!("{status:<8} {:<20} lhs={:<12.6e} rhs={:<12.6e} {note}", c.check_name, c.lhs, c.rhs);
    }
    let text = report.to_json()?;
    match &cfg.out {
        Some(path) => std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?,
        None => println!("{text}"),
    }
    if let Some(dir) = &cfg.csv {
        report.write_csv(dir)?;
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_usage(&e) { 2 } else { 1 })
        }
    }
}
