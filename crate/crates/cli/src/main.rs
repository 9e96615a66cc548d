mod plot;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use alphastep::harness::{sweep_average_cost, Sampling, SweepOptions};
use alphastep::verify::{check_ids, run_checks, Context, VerifyOptions};
use alphastep::{
    alpha_gamma, certify, choose_start, critical_profile, run, verify_quadratic_contraction,
    Complex64, Error, Mode, Outcome, Polynomial, RunConfig, ALPHA_THRESHOLD,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

const EXIT_INTERNAL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_CUTOFF: u8 = 3;
const EXIT_SINGULAR: u8 = 4;
const EXIT_BOUND: u8 = 5;
const EXIT_VERIFY: u8 = 6;

#[derive(Parser)]
#[command(name = "alphastep", version, about = "Certified polynomial root finding by alpha-step path lifting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the solver from one starting angle.
    Solve(SolveArgs),
    /// Evaluate alpha and gamma at a point and check Newton contraction.
    Certify(CertifyArgs),
    /// Critical points, rho per root, K_f and Lambda_f.
    Profile(ProfileArgs),
    /// Average cost over M starting angles against the theoretical bound.
    Sweep(SweepArgs),
    /// Run the property suite on the built-in polynomials.
    Verify(VerifyArgs),
    /// Render a trace or the critical-value shading as SVG.
    Plot(PlotArgs),
}

#[derive(Args)]
struct PolyArg {
    /// Polynomial JSON, as a file path or inline text.
    #[arg(long)]
    poly: String,
}

#[derive(Args)]
struct RunArgs {
    /// Starting angle as a fraction of a turn, in [0, 1).
    #[arg(long, default_value_t = 0.0)]
    t: f64,
    /// Starting circle offset: |z0| = 1 + C/d.
    #[arg(long = "C", default_value_t = 1.0)]
    c: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Classic)]
    mode: ModeArg,
    #[arg(long, default_value_t = ALPHA_THRESHOLD)]
    threshold: f64,
    #[arg(long = "max-steps")]
    max_steps: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Classic,
    Adaptive,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Jsonl,
    Csv,
    Svg,
    Text,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    poly: PolyArg,
    #[command(flatten)]
    run: RunArgs,
    /// Write the trace as JSONL here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `json` prints a summary, `jsonl` prints the trace.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    poly: PolyArg,
    /// Point to test as `re,im`; defaults to the starting point for --t and --C.
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    t: f64,
    #[arg(long = "C", default_value_t = 1.0)]
    c: f64,
}

#[derive(Args)]
struct ProfileArgs {
    #[command(flatten)]
    poly: PolyArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    poly: PolyArg,
    #[command(flatten)]
    run: RunArgs,
    #[arg(long = "M", default_value_t = 64)]
    m: usize,
    /// Sample angles from a seeded stream instead of midpoints.
    #[arg(long)]
    seed: Option<u64>,
    /// Where to write the per-start table (`csv`) or the full report (`json`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run only these checks (comma separated or repeated).
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    /// Restrict the suite to degrees up to this value.
    #[arg(long = "d-max")]
    d_max: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlotKind {
    Trace,
    Voronoi,
}

#[derive(Args)]
struct PlotArgs {
    #[command(flatten)]
    poly: PolyArg,
    #[arg(long, value_enum, default_value_t = PlotKind::Trace)]
    kind: PlotKind,
    #[command(flatten)]
    run: RunArgs,
    /// Cells per side of the shading grid.
    #[arg(long, default_value_t = 200)]
    grid: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Svg)]
    format: Format,
}

/// A failure carrying its exit code.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SingularStart { .. } | Error::CriticalPointInput(_) => EXIT_SINGULAR,
            Error::EmptyInput
            | Error::DuplicateRoots { .. }
            | Error::NonFinite(_)
            | Error::NotMonic(_)
            | Error::DegreeMismatch { .. }
            | Error::OrderTooHigh { .. }
            | Error::InvalidArgument(_)
            | Error::Parse(_) => EXIT_INPUT,
            _ => EXIT_INTERNAL,
        };
        Fail(code, e.to_string())
    }
}

fn input_error(msg: impl Into<String>) -> Fail {
    Fail(EXIT_INPUT, msg.into())
}

type CmdResult = Result<u8, Fail>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Profile(a) => cmd_profile(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Plot(a) => cmd_plot(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn load_poly(arg: &PolyArg) -> Result<(String, Polynomial), Fail> {
    let text = arg.poly.trim();
    let (id, body) = if text.starts_with('{') {
        ("inline".to_string(), text.to_string())
    } else {
        let path = Path::new(text);
        let body = fs::read_to_string(path)
            .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
        let id = path
            .file_stem()
            .map_or_else(|| "poly".to_string(), |s| s.to_string_lossy().into_owned());
        (id, body)
    };
    Ok((id, Polynomial::from_json_str(&body)?))
}

fn run_config(args: &RunArgs, default_max: usize) -> Result<RunConfig, Fail> {
    if !(0.0..1.0).contains(&args.t) {
        return Err(input_error("--t must lie in [0, 1)"));
    }
    let cfg = RunConfig {
        circle_offset: args.c,
        threshold: args.threshold,
        max_steps: args.max_steps.unwrap_or(default_max),
        mode: match args.mode {
            ModeArg::Classic => Mode::Classic,
            ModeArg::Adaptive => Mode::Adaptive,
        },
        ..RunConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn parse_point(s: &str) -> Result<Complex64, Fail> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| {
        p.parse::<f64>()
            .map_err(|_| input_error(format!("bad number {p:?} in --z")))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(input_error("--z expects re,im")),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Fail> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| input_error(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Fail(EXIT_INTERNAL, e.to_string()))
        }
    }
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("JSON values serialize"));
}

fn cmd_solve(a: SolveArgs) -> CmdResult {
    let (_, p) = load_poly(&a.poly)?;
    let cfg = run_config(&a.run, alphastep::pathlift::DEFAULT_MAX_STEPS)?;
    let z0 = choose_start(p.degree(), a.run.t, cfg.circle_offset);
    let trace = run(&p, z0, &cfg)?;
    if let Some(path) = &a.out {
        emit(Some(path), &trace.to_jsonl())?;
    }
    if a.format == Format::Jsonl {
        emit(None, &trace.to_jsonl())?;
    } else {
        print_json(&json!({
            "outcome": trace.outcome.as_str(),
            "N": trace.step_count(),
            "z0": pair(z0),
            "certified_point": trace.certificate.as_ref().map(|c| pair(c.point)),
            "alpha": trace.certificate.as_ref().map(|c| c.alpha_value),
            "trace": a.out.as_ref().map(|p| p.display().to_string()),
        }));
    }
    Ok(match trace.outcome {
        Outcome::Certified => 0,
        Outcome::MaxStepsExceeded | Outcome::HalvingUnderflow => EXIT_CUTOFF,
        Outcome::CriticalPointEncountered => EXIT_SINGULAR,
    })
}

fn cmd_certify(a: CertifyArgs) -> CmdResult {
    let (_, p) = load_poly(&a.poly)?;
    let z = match &a.z {
        Some(s) => parse_point(s)?,
        None => choose_start(p.degree(), a.t, a.c),
    };
    let ag = alpha_gamma(&p, z)?;
    let certificate = certify(&p, z)?;
    let contraction = match certificate {
        Some(_) => Some(verify_quadratic_contraction(&p, z, 6)?),
        None => None,
    };
    let verified = contraction.as_ref().is_some_and(|c| c.holds);
    print_json(&json!({
        "z": pair(z),
        "alpha": ag.alpha,
        "gamma": ag.gamma,
        "beta": ag.beta_newton,
        "threshold": ALPHA_THRESHOLD,
        "certified": certificate.is_some(),
        "contraction": contraction,
    }));
    Ok(if verified { 0 } else { EXIT_VERIFY })
}

fn cmd_profile(a: ProfileArgs) -> CmdResult {
    let (_, p) = load_poly(&a.poly)?;
    let profile = critical_profile(&p)?;
    let text = serde_json::to_string_pretty(&profile.to_json_value()).expect("profile serializes");
    emit(a.out.as_deref(), &(text + "\n"))?;
    Ok(0)
}

fn cmd_sweep(a: SweepArgs) -> CmdResult {
    let (id, p) = load_poly(&a.poly)?;
    let profile = critical_profile(&p)?;
    let cfg = run_config(&a.run, RunConfig::max_steps_for(profile.lambda_f))?;
    let options = SweepOptions {
        sampling: a.seed.map(|seed| Sampling::Random { seed }),
        with_probes: false,
    };
    let report = sweep_average_cost(&id, &p, &profile, a.m, &cfg, options)?;
    if let Some(path) = &a.out {
        let body = match a.format {
            Format::Csv => report.to_csv(),
            Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
            _ => return Err(input_error("sweep output format must be csv or json")),
        };
        emit(Some(path), &body)?;
    }
    print_json(&json!({
        "poly_id": report.poly_id,
        "d": report.d,
        "M": report.m,
        "mean_cost": report.mean_cost,
        "bound": report.bound,
        "within_bound": report.within_bound(),
        "failures": report.failures.len(),
    }));
    Ok(if report.within_bound() { 0 } else { EXIT_BOUND })
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let known = check_ids();
    if let Some(bad) = a.only.iter().find(|o| !known.contains(&o.as_str())) {
        return Err(input_error(format!("unknown check {bad:?}; known: {}", known.join(", "))));
    }
    let mut options = VerifyOptions {
        d_max: a.d_max,
        ..VerifyOptions::default()
    };
    if let Some(seed) = a.seed {
        options.seed = seed;
    }
    let report = run_checks(&Context::new(options), &a.only);
    match a.format {
        Format::Json => print_json(&serde_json::to_value(&report).expect("report serializes")),
        _ => print!("{}", report.table()),
    }
    Ok(if report.all_passed() { 0 } else { EXIT_VERIFY })
}

fn cmd_plot(a: PlotArgs) -> CmdResult {
    if a.format != Format::Svg {
        return Err(input_error("plot only writes svg"));
    }
    let (_, p) = load_poly(&a.poly)?;
    let profile = critical_profile(&p)?;
    let svg = match a.kind {
        PlotKind::Trace => {
            let cfg = run_config(&a.run, RunConfig::max_steps_for(profile.lambda_f))?;
            let z0 = choose_start(p.degree(), a.run.t, cfg.circle_offset);
            let trace = run(&p, z0, &cfg)?;
            plot::trace_svg(&profile, &trace)
        }
        PlotKind::Voronoi => {
            if !(2..=2000).contains(&a.grid) {
                return Err(input_error("--grid must lie in 2..=2000"));
            }
            plot::voronoi_svg(&p, &profile, a.grid)?
        }
    };
    emit(a.out.as_deref(), &svg)?;
    Ok(0)
}
