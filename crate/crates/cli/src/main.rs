//! `singforms`: command-line front end for the form classification engine.

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use singforms::beta::{check_functoriality, check_pullback_levels, classify, Engine};
use singforms::closure::load_certificate_str;
use singforms::numeric::{self, cases, cases::NumericJob, QuadOptions};
use singforms::variety::{load_variety, save_variety, Registry};
use singforms::{suite, Error};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "singforms", version, about = "Differential forms on singular hypersurfaces")]
struct Cli {
    /// Emit JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,
    /// Write the output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Place a form on the ladder omega, alpha, alpha[p], beta, L.
    Classify {
        #[arg(long)]
        variety: String,
        #[arg(long)]
        form: String,
        /// Dependence certificate (TOML) for the alpha rung.
        #[arg(long)]
        cert: Option<PathBuf>,
        #[arg(long)]
        level_cap: Option<usize>,
    },
    /// Stabilized beta module in one degree.
    Beta {
        #[arg(long)]
        variety: String,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        level_cap: Option<usize>,
    },
    /// Generator counts of the level tower alpha[p] in every degree.
    Levels {
        #[arg(long)]
        variety: String,
        #[arg(long)]
        level_cap: Option<usize>,
    },
    /// Check that a map preserves levels and commutes with wedge and d.
    PullbackCheck {
        #[arg(long)]
        map: String,
        /// Also check (map ∘ inner)* = inner* map*.
        #[arg(long)]
        inner: Option<String>,
        /// Highest level checked.
        #[arg(long, default_value_t = 2)]
        level_cap: usize,
    },
    /// Regularized integral of rho u ∧ conj(v) over a cycle.
    Integrate {
        #[command(flatten)]
        job: JobArgs,
    },
    /// Residual of the Stokes identity for a C1 cutoff.
    Stokes {
        #[command(flatten)]
        job: JobArgs,
    },
    /// Integrals along a one-parameter family of cycles.
    Family {
        #[command(flatten)]
        job: JobArgs,
    },
    /// Run the shipped expected-value suite (scope: all, curve35, Sk, Mk, Fermat, maps, numeric).
    Verify {
        #[arg(default_value = "all")]
        scope: String,
    },
    /// Write a variety file, a schema-versioned JSON report or a family CSV.
    Export {
        #[arg(value_enum)]
        what: ExportKind,
        #[arg(long)]
        variety: Option<String>,
        #[arg(long)]
        form: Option<String>,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long)]
        level_cap: Option<usize>,
        #[command(flatten)]
        job: JobArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportKind {
    Variety,
    Classify,
    Beta,
    Family,
}

#[derive(clap::Args, Clone)]
struct JobArgs {
    /// Built-in numeric case (smooth-disc, curve35, S2-diagonal, S4-family).
    #[arg(long = "case")]
    case: Option<String>,
    /// Numeric job file (cycle, cutoff, u, v).
    #[arg(long)]
    cycle: Option<PathBuf>,
    /// Smallest epsilon of the geometric sequence starting at 1e-1.
    #[arg(long, default_value_t = 1e-6)]
    eps_min: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

/// Failure kinds mapped to exit codes 1 and 2.
enum Fail {
    Verify(String),
    Input(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::UnknownVariety(_)
            | Error::UnknownMap(_)
            | Error::InvalidParameter(_)
            | Error::Schema { .. }
            | Error::InconsistentParametrization(_)
            | Error::InvalidMap(_)
            | Error::Io { .. }
            | Error::CoordMismatch(_)
            | Error::DegreeTooLarge { .. }
            | Error::Unresolved(_)
            | Error::DegreeMismatch(_)
            | Error::NonMonomial(_) => Fail::Input(e.to_string()),
            other => Fail::Verify(other.to_string()),
        }
    }
}

struct Output {
    text: String,
    json: Value,
    ok: bool,
}

impl Output {
    /// Exports carry their own file format and ignore --json.
    fn raw(text: String) -> Output {
        Output { text, json: Value::Null, ok: true }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let body = if cli.json && !out.json.is_null() { format!("{}\n", serde_json::to_string_pretty(&out.json).unwrap()) } else { out.text };
            if let Err(e) = emit(cli.out.as_deref(), &body) {
                eprintln!("error: {}", e);
                return ExitCode::from(2);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Fail::Verify(m)) => {
            eprintln!("error: {}", m);
            ExitCode::from(1)
        }
        Err(Fail::Input(m)) => {
            eprintln!("error: {}", m);
            ExitCode::from(2)
        }
    }
}

fn emit(path: Option<&Path>, body: &str) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, body).map_err(|e| format!("{}: {}", p.display(), e)),
        None => {
            print!("{}", body);
            Ok(())
        }
    }
}

fn envelope(kind: &str, body: Value) -> Value {
    json!({"schema": format!("singforms/{}", kind), "schema_version": SCHEMA_VERSION, "report": body})
}

/// Accept a built-in id or a path to a `.variety` file; returns the engine and the id.
fn engine_for(variety: Option<&str>) -> Result<(Engine, Option<String>), Fail> {
    let mut reg = Registry::new();
    let id = match variety {
        None => None,
        Some(v) => {
            let p = Path::new(v);
            if v.ends_with(".variety") || p.is_file() {
                let spec = load_variety(p)?;
                let id = spec.id.clone();
                reg.register(spec)?;
                Some(id)
            } else {
                Some(reg.variety(v)?.id)
            }
        }
    };
    Ok((Engine::new(reg), id))
}

fn read(path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| Fail::Input(format!("{}: {}", path.display(), e)))
}

fn load_job(args: &JobArgs, family: bool) -> Result<NumericJob, Fail> {
    match (&args.case, &args.cycle) {
        (Some(name), None) => {
            let list = if family {
                vec![cases::s4_family()]
            } else {
cases::integrate_cases()
            };
            let c = cases::find(&list, name).ok_or_else(|| Fail::Input(format!("unknown numeric case '{}'", name)))?;
            Ok(NumericJob::from_case(&c))
        }
        (None, Some(path)) => Ok(NumericJob::from_toml(&read(path)?, &path.display().to_string())?),
        _ => Err(Fail::Input("give exactly one of --case or --cycle".into())),
    }
}

fn eps_and_opts(args: &JobArgs) -> Result<(Vec<f64>, QuadOptions), Fail> {
    if !(args.eps_min > 0.0 && args.eps_min < 1e-1) {
        return Err(Fail::Input(format!("--eps-min must lie in (0, 0.1), got {}", args.eps_min)));
    }
    let eps = if args.eps_min == 1e-6 { numeric::default_eps() } else { numeric::eps_sequence(1e-1, args.eps_min, 10) };
    Ok((eps, QuadOptions { tol: args.tol, ..QuadOptions::default() }))
}

fn parse_job_forms(engine: &Engine, job: &NumericJob) -> Result<(singforms::forms::DiffForm, singforms::forms::DiffForm), Fail> {
    let spec = engine.reg.variety(&job.cycle.variety)?;
    Ok((spec.parse(&job.u)?, spec.parse(&job.v)?))
}

fn report_table(r: &numeric::IntegralReport) -> String {
    let mut s = format!("{:>12}  {:>22}  {:>22}\n", "eps", "re", "im");
    for (e, v) in r.eps.iter().zip(&r.values) {
        s.push_str(&format!("{:>12.3e}  {:>22.15}  {:>22.15}\n", e, v.re, v.im));
    }
    s.push_str(&format!(
        "limit {:.15} {:+.3e}i  converged {}  quadrature error {:.2e}  extrapolation error {:.2e}  mass {:.6}\n",
        r.limit.re, r.limit.im, r.converged, r.quad_error, r.extrapolation_error, r.mass
    ));
    s
}

fn run(cli: &Cli) -> Result<Output, Fail> {
    match &cli.cmd {
        Cmd::Classify { variety, form, cert, level_cap } => {
            let (engine, id) = engine_for(Some(variety))?;
            let id = id.unwrap();
            let u = engine.reg.variety(&id)?.parse(form)?;
            let cert = match cert {
                Some(p) => Some(load_certificate_str(&read(p)?, &p.display().to_string())?),
                None => None,
            };
            let r = classify(&engine, &id, &u, cert.as_ref(), *level_cap)?;
            Ok(Output { text: r.table(), json: envelope("classify", r.to_json()), ok: true })
        }
        Cmd::Beta { variety, degree, level_cap } => {
            let (engine, id) = engine_for(Some(variety))?;
            let id = id.unwrap();
            let b = engine.beta(&id, *degree, *level_cap)?;
            let model = engine.model(&id)?;
            let mut text = format!("beta^{} on {}: p* = {} (level sizes {:?})\n", degree, id, b.p_star, b.sizes);
            for g in &b.beta.gens {
                text.push_str(&format!("  {}\n", model.print(g)));
            }
            Ok(Output { text, json: envelope("beta", b.to_json(&model)), ok: true })
        }
        Cmd::Levels { variety, level_cap } => {
            let (engine, id) = engine_for(Some(variety))?;
            let id = id.unwrap();
            let t = engine.tower(&id, *level_cap)?;
            let dim = engine.model(&id)?.dim();
            let mut text = format!("level tower of {} (cap {})\n{:>5}", id, t.cap, "p");
            for q in 0..=dim {
                text.push_str(&format!("  {:>6}", format!("q={}", q)));
            }
            text.push('\n');
            let mut rows = Vec::new();
            for (p, lv) in t.levels.iter().enumerate() {
                text.push_str(&format!("{:>5}", p));
                for g in lv {
                    text.push_str(&format!("  {:>6}", g.gens.len()));
                }
                text.push('\n');
                rows.push(json!({"level": p, "sizes": lv.iter().map(|g| g.gens.len()).collect::<Vec<_>>(), "changed": t.changed[p]}));
            }
            let p_star: Vec<Option<usize>> = (0..=dim).map(|q| t.p_star(q)).collect();
            text.push_str(&format!("p* by degree: {:?}\n", p_star));
            Ok(Output { text, json: envelope("levels", json!({"variety": id, "cap": t.cap, "levels": rows, "p_star": p_star})), ok: true })
        }
        Cmd::PullbackCheck { map, inner, level_cap } => {
            let (engine, _) = engine_for(None)?;
            let r = check_pullback_levels(&engine, map, 0..=*level_cap)?;
            let mut ok = r.ok();
            let mut text = format!(
                "{}: {} -> {}\n  level checks {} ({} generators), wedge {}, d {}\n",
                r.map,
                r.source,
                r.target,
                if r.levels.iter().all(|c| c.ok) { "pass" } else { "FAIL" },
                r.levels.len(),
                if r.wedge_ok { "pass" } else { "FAIL" },
                if r.d_ok { "pass" } else { "FAIL" }
            );
            if let Some(o) = r.offending() {
                text.push_str(&format!("  offending generator (q = {}, p = {}): {}\n", o.q, o.p, o.generator));
            }
            let mut body = json!({"levels": r.to_json()});
            if let Some(inner) = inner {
                let f = check_functoriality(&engine, map, inner)?;
                ok &= f.ok;
                text.push_str(&format!("  functoriality with {}: {} ({} forms)\n", inner, if f.ok { "pass" } else { "FAIL" }, f.checked));
                body["functoriality"] = f.to_json();
            }
            Ok(Output { text, json: envelope("pullback-check", body), ok })
        }
        Cmd::Integrate { job } => {
            let nj = load_job(job, false)?;
            let (engine, _) = engine_for(None)?;
            let (u, v) = parse_job_forms(&engine, &nj)?;
            let (eps, opts) = eps_and_opts(job)?;
            let r = numeric::integrate(&engine.reg, &nj.cycle, &nj.cutoff, &u, &v, &eps, opts, None)?;
            Ok(Output { text: report_table(&r), json: envelope("integral", r.to_json()), ok: r.converged })
        }
        Cmd::Stokes { job } => {
            let nj = match (&job.case, &job.cycle) {
                (Some(name), None) => NumericJob::from_case(
                    &cases::find(&cases::stokes_cases(), name).ok_or_else(|| Fail::Input(format!("unknown Stokes case '{}'", name)))?,
                ),
                _ => load_job(job, false)?,
            };
            let (engine, _) = engine_for(None)?;
            let (u, v) = parse_job_forms(&engine, &nj)?;
            let (eps, opts) = eps_and_opts(job)?;
            let (res, r) = numeric::stokes_residual(&engine.reg, &nj.cycle, &nj.cutoff, &u, &v, &eps, opts)?;
            let ok = res < job.tol;
            let mut text = report_table(&r);
            text.push_str(&format!("stokes residual {:.3e} ({} tolerance {:.1e})\n", res, if ok { "within" } else { "EXCEEDS" }, job.tol));
            Ok(Output { text, json: envelope("stokes", json!({"residual": res, "tolerance": job.tol, "report": r.to_json()})), ok })
        }
        Cmd::Family { job } => {
            let nj = load_job(job, true)?;
            let (engine, _) = engine_for(None)?;
            let (u, v) = parse_job_forms(&engine, &nj)?;
            let (eps, opts) = eps_and_opts(job)?;
            let s = numeric::family_scan(&engine.reg, &nj.cycle, &nj.cutoff, &u, &v, None, &eps, opts)?;
            let mut text = format!("{:>10}  {:>20}  {:>12}  {:>12}  {}\n", "t", "re", "im", "mass", "converged");
            for (t, r) in s.t.iter().zip(&s.reports) {
                text.push_str(&format!("{:>10.5}  {:>20.12}  {:>12.3e}  {:>12.6}  {}\n", t, r.limit.re, r.limit.im, r.mass, r.converged));
            }
            text.push_str(&format!("sup |phi| = {:.6}, C = {:.6}, bounded {}\n", s.sup, s.constant, s.bounded()));
            let ok = s.bounded() && s.failures.is_empty();
            Ok(Output { text, json: envelope("family", s.to_json()), ok })
        }
        Cmd::Verify { scope } => {
            let (engine, _) = engine_for(None)?;
            let rows = suite::run(&engine, &suite::fixture_dir(), scope)?;
            let failed = rows.iter().filter(|r| !r.pass).count();
            let mut text = suite::table(&rows);
            text.push_str(&format!("{} cases, {} failed\n", rows.len(), failed));
            let json = envelope(
                "verify",
                json!({"scope": scope, "cases": rows.iter().map(|r| r.to_json()).collect::<Vec<_>>(), "failed": failed}),
            );
            Ok(Output { text, json, ok: failed == 0 })
        }
        Cmd::Export { what, variety, form, degree, level_cap, job } => {
            let need = |v: &Option<String>, flag: &str| v.clone().ok_or_else(|| Fail::Input(format!("export needs --{}", flag)));
            let text = match what {
                ExportKind::Variety => {
                    let (engine, id) = engine_for(Some(&need(variety, "variety")?))?;
                    save_variety(&engine.reg.variety(&id.unwrap())?)
                }
                ExportKind::Classify => {
                    let (engine, id) = engine_for(Some(&need(variety, "variety")?))?;
                    let id = id.unwrap();
                    let u = engine.reg.variety(&id)?.parse(&need(form, "form")?)?;
                    let r = classify(&engine, &id, &u, None, *level_cap)?;
                    format!("{}\n", serde_json::to_string_pretty(&envelope("classify", r.to_json())).unwrap())
                }
                ExportKind::Beta => {
                    let (engine, id) = engine_for(Some(&need(variety, "variety")?))?;
                    let id = id.unwrap();
                    let q = degree.ok_or_else(|| Fail::Input("export beta needs --degree".into()))?;
                    let b = engine.beta(&id, q, *level_cap)?;
                    format!("{}\n", serde_json::to_string_pretty(&envelope("beta", b.to_json(engine.model(&id)?.as_ref()))).unwrap())
                }
                ExportKind::Family => {
                    let nj = load_job(job, true)?;
                    let (engine, _) = engine_for(None)?;
                    let (u, v) = parse_job_forms(&engine, &nj)?;
                    let (eps, opts) = eps_and_opts(job)?;
                    numeric::family_scan(&engine.reg, &nj.cycle, &nj.cutoff, &u, &v, None, &eps, opts)?.to_csv()?
                }
            };
            Ok(Output::raw(text))
        }
    }
}
