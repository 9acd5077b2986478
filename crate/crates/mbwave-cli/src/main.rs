//! Command-line front end for the moving-boundary wave toolkit.
//!
//! Subcommands construct certified conjugations (`solve-abel`), sample wave
//! fields (`simulate`), run sensor certifications (`observe`), aggregate
//! report files (`report`), and run the named invariant suite (`verify`).
//! Grids and traces land in CSV, certificates and reports in JSON with a
//! `schema_version` field; the matching schemas live in `schemas/` at the
//! repository root.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration or
//! parameter error, 3 numerical failure.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use mbwave::abel::{self, AbelSolution};
use mbwave::boundary::{BoundaryCurve, CharMaps, Family};
use mbwave::config::{self, Settings};
use mbwave::observability::{self, GramAnalysis, ObservationReport};
use mbwave::suite::{self, Depth};
use mbwave::wave::{InitialData, WaveField};
use mbwave::Error;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "mbwave", version, about = "Wave fields on moving domains: certified solvers and sensor estimates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the boundary conjugation equation and emit a certified table.
    SolveAbel {
        /// Curve family: linear, parabolic, hyperbolic, or shrinking.
        #[arg(long)]
        family: String,
        /// Family parameter.
        #[arg(long)]
        epsilon: f64,
        /// closed, product, levy, or auto.
        #[arg(long, default_value = "auto")]
        method: String,
        /// Certification tolerance for the shift defect.
        #[arg(long, default_value_t = abel::CONSTRUCTIVE_TOL)]
        tol: f64,
        /// Rows in the emitted table.
        #[arg(long, default_value_t = 512)]
        points: usize,
        #[arg(long, env = "MBWAVE_OUT_DIR", default_value = ".")]
        out_dir: PathBuf,
    },
    /// Sample a wave field on a space-time grid.
    Simulate {
        /// Curve config file (key = value; see README).
        #[arg(long)]
        curve_config: PathBuf,
        /// Initial data: preset:<name> or csv:<path> (columns x, g, f).
        #[arg(long, default_value = "preset:mixed")]
        data: String,
        /// Series truncation.
        #[arg(long, default_value_t = 32)]
        modes: usize,
        /// Grid as nx,nt.
        #[arg(long, default_value = "64,64")]
        grid: String,
        /// End of the time range (default: one full return of the fixed end).
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long, env = "MBWAVE_OUT_DIR", default_value = ".")]
        out_dir: PathBuf,
    },
    /// Run one sensor certification and write its JSON report.
    Observe {
        #[arg(long)]
        curve_config: PathBuf,
        /// left, right, interior, moving, simultaneous, or gram.
        #[arg(long)]
        kind: String,
        #[arg(long, default_value = "preset:mixed")]
        data: String,
        #[arg(long, default_value_t = 32)]
        modes: usize,
        /// Sensor anchor for interior and moving kinds.
        #[arg(long, default_value_t = 0.5)]
        a: f64,
        /// Observation window: opt or a number (left, right, simultaneous, gram).
        #[arg(long, default_value = "opt")]
        tau: String,
        /// Number of randomized-data trials; 1 uses --data as given.
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Companion fixed-string data for the simultaneous kind.
        #[arg(long, default_value = "preset:sine")]
        fixed_data: String,
        /// Matrix dimension for the gram kind.
        #[arg(long, default_value_t = 32)]
        dim: usize,
        /// Conditioning threshold for the gram kind.
        #[arg(long, default_value_t = 0.9)]
        threshold: f64,
        #[arg(long, env = "MBWAVE_OUT_DIR", default_value = ".")]
        out_dir: PathBuf,
    },
    /// Aggregate a directory of JSON reports into a CSV summary.
    Report {
        /// Directory holding observation report files.
        dir: PathBuf,
        #[arg(long, env = "MBWAVE_OUT_DIR", default_value = ".")]
        out_dir: PathBuf,
    },
    /// Run the named invariant suite and exit nonzero on any failure.
    Verify {
        /// Straight-line family only, smaller trial counts.
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, env = "MBWAVE_OUT_DIR", default_value = ".")]
        out_dir: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            exit_code(&err)
        }
    };
    std::process::exit(code);
}

/// Configuration and parameter problems exit 2, numerical failures 3.
fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<Error>() {
        Some(Error::Config { .. })
        | Some(Error::InvalidParameter { .. })
        | Some(Error::InadmissibleCurve { .. }) => 2,
        _ => 3,
    }
}

fn run(command: Command) -> anyhow::Result<i32> {
    match command {
        Command::SolveAbel {
            family,
            epsilon,
            method,
            tol,
            points,
            out_dir,
        } => solve_abel(&family, epsilon, &method, tol, points, &out_dir),
        Command::Simulate {
            curve_config,
            data,
            modes,
            grid,
            t_max,
            out_dir,
        } => simulate(&curve_config, &data, modes, &grid, t_max, &out_dir),
        Command::Observe {
            curve_config,
            kind,
            data,
            modes,
            a,
            tau,
            trials,
            seed,
            fixed_data,
            dim,
            threshold,
            out_dir,
        } => observe(ObserveArgs {
            curve_config,
            kind,
            data,
            modes,
            a,
            tau,
            trials,
            seed,
            fixed_data,
            dim,
            threshold,
            out_dir,
        }),
        Command::Report { dir, out_dir } => aggregate(&dir, &out_dir),
        Command::Verify {
            quick,
            seed,
            out_dir,
        } => verify(quick, seed, &out_dir),
    }
}

fn bad_arg(what: &'static str, msg: impl Into<String>) -> anyhow::Error {
    Error::InvalidParameter {
        what,
        msg: msg.into(),
    }
    .into()
}

fn family_curve(family: &str, epsilon: f64) -> Result<BoundaryCurve, Error> {
    let family: Family = family.parse()?;
    match family {
        Family::Linear => BoundaryCurve::linear(epsilon),
        Family::Parabolic => BoundaryCurve::parabolic(epsilon),
        Family::Hyperbolic => BoundaryCurve::hyperbolic(epsilon),
        Family::Shrinking => BoundaryCurve::shrinking(epsilon),
        Family::Custom => Err(Error::InvalidParameter {
            what: "family",
            msg: "sampled curves are configured per run; use --curve-config with \
                  simulate or observe"
                .into(),
        }),
    }
}

fn parse_data(spec: &str) -> anyhow::Result<InitialData> {
    match spec.split_once(':') {
        Some(("preset", name)) => Ok(InitialData::preset(name)?),
        Some(("csv", path)) => {
            let cols = config::read_csv_columns(Path::new(path), 3)?;
            let mut it = cols.into_iter();
            Ok(InitialData::from_samples(
                it.next().unwrap(),
                it.next().unwrap(),
                it.next().unwrap(),
            )?)
        }
        _ => Err(bad_arg(
            "data",
            format!("expected preset:<name> or csv:<path>, got {spec:?}"),
        )),
    }
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn write_text(dir: &Path, name: &str, text: &str) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

#[derive(Serialize)]
struct AbelCertificate {
    schema_version: u32,
    kind: &'static str,
    family: String,
    epsilon: Option<f64>,
    method: String,
    tol: f64,
    residual_sup: f64,
    normalization: &'static str,
    domain: (f64, f64),
    grid_points: usize,
}

fn solve_abel(
    family: &str,
    epsilon: f64,
    method: &str,
    tol: f64,
    points: usize,
    out_dir: &Path,
) -> anyhow::Result<i32> {
    if points < 2 {
        return Err(bad_arg("points", "need at least 2 rows"));
    }
    let curve = family_curve(family, epsilon)?;
    let maps = CharMaps::new(curve.clone())?;
    let sol: AbelSolution = match method {
        "closed" => abel::closed_form(&curve)?,
        "product" => abel::product_expansive(&maps, tol)
            .or_else(|_| abel::product_parabolic(&maps, None, tol))?,
        "levy" => abel::levy(&maps, -1.0, 1 << 13, tol)?,
        "auto" => abel::solve_auto(&curve, tol)?,
        other => {
            return Err(bad_arg(
                "method",
                format!("expected closed, product, levy, or auto, got {other:?}"),
            ))
        }
    };

    let t_hi = maps.t_max();
    let mut csv = String::from("t,phi,phi_prime,residual\n");
    for i in 0..points {
        let t = t_hi * i as f64 / (points - 1) as f64;
        let residual = (sol.phi(t + curve.s(t)) - sol.phi(t - curve.s(t)) - 1.0).abs();
        writeln!(
            csv,
            "{t},{},{},{residual}",
            sol.phi(t),
            sol.phi_prime(t)
        )?;
    }

    let certificate = AbelCertificate {
        schema_version: SCHEMA_VERSION,
        kind: "abel_certificate",
        family: curve.family().to_string(),
        epsilon: curve.epsilon(),
        method: sol.method().to_string(),
        tol,
        residual_sup: sol.residual_sup(),
        normalization: "phi(-1) = 0",
        domain: sol.domain(),
        grid_points: points,
    };
    let stem = format!("abel-{}", curve.family());
    let csv_path = write_text(out_dir, &format!("{stem}.csv"), &csv)?;
    let json_path = write_json(out_dir, &format!("{stem}.json"), &certificate)?;
    println!(
        "wrote {} and {} (method {}, residual_sup {:.3e})",
        csv_path.display(),
        json_path.display(),
        certificate.method,
        certificate.residual_sup,
    );
    Ok(0)
}

#[derive(Serialize)]
struct EnergyTrace {
    schema_version: u32,
    kind: &'static str,
    family: String,
    modes: usize,
    norm_squared: f64,
    times: Vec<f64>,
    energy: Vec<f64>,
}

fn simulate(
    curve_config: &Path,
    data: &str,
    modes: usize,
    grid: &str,
    t_max: Option<f64>,
    out_dir: &Path,
) -> anyhow::Result<i32> {
    let settings = Settings::load(curve_config)?;
    let curve = config::curve_from_settings(&settings)?;
    let (nx, nt) = grid
        .split_once(',')
        .and_then(|(a, b)| Some((a.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?)))
        .ok_or_else(|| bad_arg("grid", format!("expected nx,nt, got {grid:?}")))?;
    if nx < 2 || nt < 2 {
        return Err(bad_arg("grid", "need at least 2 points per axis"));
    }

    let sol = abel::solve_auto(&curve, abel::CONSTRUCTIVE_TOL)?;
    let field = WaveField::from_data(curve.clone(), sol, parse_data(data)?, modes)?;
    let maps = CharMaps::new(curve.clone())?;
    let t_hi = match t_max {
        Some(t) if t > 0.0 => t,
        Some(t) => return Err(bad_arg("t_max", format!("must be positive, got {t}"))),
        None => maps.gamma(0.0)?,
    };

    // The field is real for real data; the dump keeps the real parts.
    let mut csv = String::from("x,t,u,u_x,u_t\n");
    let mut times = Vec::with_capacity(nt);
    let mut energy = Vec::with_capacity(nt);
    for j in 0..nt {
        let t = t_hi * j as f64 / (nt - 1) as f64;
        for i in 0..nx {
            let x = curve.s(t) * i as f64 / (nx - 1) as f64;
            let sample = field.eval(x, t);
            writeln!(
                csv,
                "{x},{t},{},{},{}",
                sample.u.re, sample.u_x.re, sample.u_t.re
            )?;
        }
        times.push(t);
        energy.push(field.energy(t)?);
    }

    let trace = EnergyTrace {
        schema_version: SCHEMA_VERSION,
        kind: "energy_trace",
        family: curve.family().to_string(),
        modes,
        norm_squared: 2.0 * field.energy(0.0)?,
        times,
        energy,
    };
    let csv_path = write_text(out_dir, "field.csv", &csv)?;
    let json_path = write_json(out_dir, "energy.json", &trace)?;
    println!(
        "wrote {} ({nx}x{nt} samples) and {}",
        csv_path.display(),
        json_path.display()
    );
    Ok(0)
}

struct ObserveArgs {
    curve_config: PathBuf,
    kind: String,
    data: String,
    modes: usize,
    a: f64,
    tau: String,
    trials: usize,
    seed: u64,
    fixed_data: String,
    dim: usize,
    threshold: f64,
    out_dir: PathBuf,
}

#[derive(Serialize)]
struct ObserveArtifact {
    schema_version: u32,
    kind: &'static str,
    family: String,
    modes: usize,
    trial: usize,
    seed: u64,
    report: ObservationReport,
}

#[derive(Serialize)]
struct GramArtifact {
    schema_version: u32,
    kind: &'static str,
    family: String,
    report: GramAnalysis,
}

enum Window {
    Optimal,
    At(f64),
}

fn observe(args: ObserveArgs) -> anyhow::Result<i32> {
    let settings = Settings::load(&args.curve_config)?;
    let curve = config::curve_from_settings(&settings)?;
    let sol = abel::solve_auto(&curve, abel::CONSTRUCTIVE_TOL)?;
    let window = match args.tau.as_str() {
        "opt" => Window::Optimal,
        text => Window::At(text.parse::<f64>().map_err(|_| {
            bad_arg("tau", format!("expected opt or a number, got {text:?}"))
        })?),
    };

    if args.kind == "gram" {
        let tau = match window {
            Window::Optimal => CharMaps::new(curve.clone())?.gamma(0.0)?,
            Window::At(t) => t,
        };
        let report = observability::gram_analysis(&sol, tau, args.dim, args.threshold)?;
        let artifact = GramArtifact {
            schema_version: SCHEMA_VERSION,
            kind: "gram_report",
            family: curve.family().to_string(),
            report,
        };
        let path = write_json(&args.out_dir, "observe-gram.json", &artifact)?;
        println!(
            "wrote {} (sigma_min {:.6}, observable {})",
            path.display(),
            artifact.report.sigma_min,
            artifact.report.observable
        );
        return Ok(0);
    }

    if args.trials == 0 {
        return Err(bad_arg("trials", "need at least one trial"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut all_pass = true;
    for trial in 0..args.trials {
        let data = if args.trials == 1 {
            parse_data(&args.data)?
        } else {
            InitialData::random(&mut rng)
        };
        let field = WaveField::from_data(curve.clone(), sol.clone(), data, args.modes)?;
        let report = run_sensor(&args, &window, &field)?;
        all_pass &= report.pass;
        let artifact = ObserveArtifact {
            schema_version: SCHEMA_VERSION,
            kind: "observation_report",
            family: curve.family().to_string(),
            modes: args.modes,
            trial,
            seed: args.seed,
            report,
        };
        let name = format!("observe-{}-{trial}.json", args.kind);
        let path = write_json(&args.out_dir, &name, &artifact)?;
        println!(
            "wrote {} (pass {}, integral {:.6e})",
            path.display(),
            artifact.report.pass,
            artifact.report.integral
        );
    }
    Ok(if all_pass { 0 } else { 1 })
}

fn run_sensor(
    args: &ObserveArgs,
    window: &Window,
    field: &WaveField,
) -> anyhow::Result<ObservationReport> {
    let explicit = match window {
        Window::Optimal => None,
        Window::At(t) => Some(*t),
    };
    let report = match args.kind.as_str() {
        "left" => observability::observe_left(field, explicit)?,
        "right" => observability::observe_right(field, explicit)?,
        "interior" => {
            reject_window(explicit, "interior")?;
            observability::observe_interior(field, args.a)?
        }
        "moving" => {
            reject_window(explicit, "moving")?;
            observability::observe_moving(field, args.a)?
        }
        "simultaneous" => {
            let fixed = parse_data(&args.fixed_data)?;
            let tau = match explicit {
                Some(tau) => tau,
                // The searched window is the first whose captured energy
                // reaches the full data norm.
                None => observability::time_for_gain(field, &fixed, 1.0, 64.0)?
                    .ok_or_else(|| anyhow::anyhow!("no window below 64 reaches unit gain"))?,
            };
            observability::observe_simultaneous(field, &fixed, tau)?
        }
        other => {
            return Err(bad_arg(
                "kind",
                format!(
                    "expected left, right, interior, moving, simultaneous, or gram, \
                     got {other:?}"
                ),
            ))
        }
    };
    Ok(report)
}

fn reject_window(explicit: Option<f64>, kind: &str) -> anyhow::Result<()> {
    match explicit {
        Some(_) => Err(bad_arg(
            "tau",
            format!("the {kind} sensor's window is fixed by its anchor; use --tau opt"),
        )),
        None => Ok(()),
    }
}

fn aggregate(dir: &Path, out_dir: &Path) -> anyhow::Result<i32> {
    let mut names: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    names.sort();

    let mut csv = String::from(
        "file,sensor,family,position,window_start,window_end,integral,norm_squared,\
         lower_bound,upper_bound,weighted_rel_err,pass\n",
    );
    let mut rows = 0usize;
    for path in &names {
        let text = fs::read_to_string(path)?;
        let value: serde_json::Value = match serde_json::from_str(&text) {
            Ok(v) => v,
            Err(err) => {
                eprintln!("skipping {}: {err}", path.display());
                continue;
            }
        };
        if value["kind"] != "observation_report" {
            continue;
        }
        let report = &value["report"];
        let num = |v: &serde_json::Value| v.as_f64().map_or(String::new(), |x| x.to_string());
        let window = &report["window"];
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            path.file_name().unwrap().to_string_lossy(),
            report["sensor"].as_str().unwrap_or(""),
            value["family"].as_str().unwrap_or(""),
            num(&report["position"]),
            num(&window[0]),
            num(&window[1]),
            num(&report["integral"]),
            num(&report["norm_squared"]),
            num(&report["lower_bound"]),
            num(&report["upper_bound"]),
            num(&report["weighted"]["rel_err"]),
            report["pass"].as_bool().unwrap_or(false),
        )?;
        rows += 1;
    }
    let path = write_text(out_dir, "summary.csv", &csv)?;
    println!("wrote {} ({rows} reports)", path.display());
    Ok(0)
}

#[derive(Serialize)]
struct VerifyArtifact {
    schema_version: u32,
    kind: &'static str,
    depth: Depth,
    seed: u64,
    passed: bool,
    checks: Vec<suite::CheckResult>,
}

fn verify(quick: bool, seed: u64, out_dir: &Path) -> anyhow::Result<i32> {
    let depth = if quick { Depth::Quick } else { Depth::Full };
    let checks = suite::run(depth, seed);
    for check in &checks {
        let status = if check.passed { "ok  " } else { "FAIL" };
        let measure = if check.measured.is_finite() {
            format!("{:.3e} <= {:.3e}", check.measured, check.bound)
        } else {
            "--".into()
        };
        println!(
            "{status}  {name:<32} {family:<10} {measure}",
            name = check.name,
            family = check.family,
        );
        if !check.passed {
            println!("      {}", check.note);
        }
    }
    let passed = suite::all_passed(&checks);
    let total = checks.len();
    let ok = checks.iter().filter(|c| c.passed).count();
    println!("{ok}/{total} checks passed");

    let artifact = VerifyArtifact {
        schema_version: SCHEMA_VERSION,
        kind: "verify_report",
        depth,
        seed,
        passed,
        checks,
    };
    write_json(out_dir, "verify.json", &artifact)?;
    Ok(if passed { 0 } else { 1 })
}
