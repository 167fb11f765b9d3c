//! Command-line front end: subcommand parsing, dispatch and output.
//!
//! Exit codes: 0 on success, 1 when a checked property fails, 2 on usage
//! errors (bad flags, malformed generators, arguments outside a domain).

pub mod render;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use resolvent_lab::boundary::{bfid_region_check, classify_brfp};
use resolvent_lab::expr::GeneratorExpr;
use resolvent_lab::figures::{self, assess_figure1, assess_figure2, FigureCheck, FIGURE1_MARGIN};
use resolvent_lab::generators::{make_generator, Builtin, GeneratorSpec};
use resolvent_lab::geometry::{self, PropertyReport, Region};
use resolvent_lab::loewner::{self, DivergenceIntegral};
use resolvent_lab::resolvent::{self, Certificate, SolveOptions};
use resolvent_lab::semigroup;
use resolvent_lab::{Cx, DiskGrid, Error};

use render::{csv, parse_csv, svg, SvgCurve};

pub const THREADS_ENV: &str = "RESOLVENT_LAB_THREADS";

const PALETTE: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

#[derive(Parser, Debug)]
#[command(name = "resolvent-lab", version, about = "Nonlinear resolvents of semigroup generators on the unit disk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve z + r f(z) = w and certify the root.
    Resolve(ResolveArgs),
    /// Integrate du/dt = -f(u).
    Flow(FlowArgs),
    /// Compare n-fold resolvent iterates J_{t/n}^n with the flow.
    Expformula(ExpArgs),
    /// Trace the boundary of J_r(D).
    Region(RegionArgs),
    /// Run the geometric checks on a grid.
    Verify(VerifyArgs),
    /// Herglotz field, divergence integral, PDE residual and sector bounds.
    Loewner(LoewnerArgs),
    /// Boundary fixed points, or the negative-r extension with --bfid.
    Boundary(BoundaryArgs),
    /// Regenerate the two reference figures as SVG and CSV.
    Figures(FiguresArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long, default_value_t = DiskGrid::STANDARD_RINGS)]
    rings: usize,
    #[arg(long, default_value_t = DiskGrid::STANDARD_ANGLES)]
    angles: usize,
    /// Distance of the outermost ring from the unit circle, in (0, 0.1].
    #[arg(long, default_value_t = DiskGrid::STANDARD_MARGIN)]
    margin: f64,
}

impl GridArgs {
    fn grid(&self) -> Result<DiskGrid, Failure> {
        if !(self.margin > 0.0 && self.margin <= 0.1) {
            return Err(Failure::Usage(format!("--margin must lie in (0, 0.1], got {}", self.margin)));
        }
        if self.rings == 0 || self.angles == 0 {
            return Err(Failure::Usage("--rings and --angles must be positive".into()));
        }
        Ok(DiskGrid::boundary_graded(self.rings, self.angles, self.margin))
    }
}

#[derive(Args, Debug)]
struct ResolveArgs {
    /// Built-in name (identity, ex1, ex2, half) or an expression in z.
    #[arg(long)]
    gen: String,
    #[arg(long, allow_hyphen_values = true)]
    r: f64,
    /// `a+bi` or `re,im`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    w: Cx,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Skip the winding-number certificate.
    #[arg(long)]
    no_certify: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct FlowArgs {
    #[arg(long)]
    gen: String,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    z: Cx,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Number of equal time steps reported between 0 and t.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ExpArgs {
    #[arg(long)]
    gen: String,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    z: Cx,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [8usize, 16, 32, 64, 128, 256, 512, 1024])]
    n: Vec<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct RegionArgs {
    #[arg(long)]
    gen: String,
    #[arg(long)]
    r: f64,
    #[arg(long, default_value_t = 512)]
    points: usize,
    /// The curve is the preimage of |w| = 1 - margin.
    #[arg(long, default_value_t = 1e-3)]
    margin: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Suite {
    Nw,
    Starlike,
    MarxStrohhacker,
    Inclusion,
    Convexity,
    All,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    gen: String,
    #[arg(long)]
    r: f64,
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
    /// Smaller parameter for the inclusion check (default r/2).
    #[arg(long)]
    s: Option<f64>,
    /// Random point pairs for the convexity check.
    #[arg(long, default_value_t = 10_000)]
    pairs: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct LoewnerArgs {
    #[arg(long)]
    gen: String,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.6, 1.0, 2.0, 10.0])]
    r_list: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 10.0, 100.0])]
    t_list: Vec<f64>,
    /// Central-difference step of the PDE residual.
    #[arg(long, default_value_t = 1e-4)]
    h: f64,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct BoundaryArgs {
    #[arg(long, default_value = "ex2")]
    gen: String,
    #[arg(long, allow_hyphen_values = true)]
    r: f64,
    /// Angle of the boundary point, in radians.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    zeta: f64,
    /// Map the invariant domain through J_r for r in [-1, 0).
    #[arg(long)]
    bfid: bool,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct FiguresArgs {
    #[arg(long, default_value = "figures")]
    out: PathBuf,
    /// Do not print the JSON summary.
    #[arg(long)]
    quiet: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { .. } | Error::Contract(_) => Failure::Usage(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

/// Parses `a+bi`, `a`, `bi` or `re,im`.
pub fn parse_complex(s: &str) -> Result<Cx, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot read {s:?} as a complex number (use a+bi or re,im)");
    if let Some((a, b)) = t.split_once(',') {
        return Ok(Cx::new(a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?));
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse().map(|x| Cx::new(x, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |x: &str| -> Result<f64, String> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => Ok(Cx::new(body[..k].parse().map_err(|_| bad())?, imag(&body[k..])?)),
        None => Ok(Cx::new(0.0, imag(body)?)),
    }
}

/// A built-in name or an expression in `z`.
pub fn resolve_generator(text: &str) -> Result<GeneratorSpec, String> {
    if let Some(b) = Builtin::from_name(text.trim()) {
        return Ok(b.spec());
    }
    let e = GeneratorExpr::parse(text).map_err(|e| format!("generator {text:?}: {e}"))?;
    make_generator(e.to_holo_map()).map_err(|e| format!("generator {text:?}: {e}"))
}

fn generator(text: &str) -> Result<GeneratorSpec, Failure> {
    resolve_generator(text).map_err(Failure::Usage)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable output");
    s.push('\n');
    s
}

fn reject_format(f: Option<Format>, allowed: &[Format], default: Format) -> Result<Format, Failure> {
    let f = f.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(Failure::Usage(format!("format {f:?} is not available for this subcommand")))
    }
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    configure_threads();
    let outcome = match cli.command {
        Command::Resolve(a) => run_resolve(a),
        Command::Flow(a) => run_flow(a),
        Command::Expformula(a) => run_expformula(a),
        Command::Region(a) => run_region(a),
        Command::Verify(a) => run_verify(a),
        Command::Loewner(a) => run_loewner(a),
        Command::Boundary(a) => run_boundary(a),
        Command::Figures(a) => run_figures(a),
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            2
        }
        Err(Failure::Compute(m)) => {
            eprintln!("error: {m}");
            1
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            // fails only if the pool was already configured in this process
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

#[derive(Serialize)]
struct ResolveOut {
    generator: String,
    r: f64,
    w: Cx,
    z: Cx,
    residual: f64,
    derivative: Cx,
    iterations: usize,
    continuation_steps: usize,
    winding: Option<i64>,
}

fn run_resolve(a: ResolveArgs) -> Result<bool, Failure> {
    reject_format(a.output.format, &[Format::Json], Format::Json)?;
    if !(a.tol > 0.0) {
        return Err(Failure::Usage("--tol must be positive".into()));
    }
    let g = generator(&a.gen)?;
    let opts = SolveOptions {
        tol: a.tol,
        certify: !a.no_certify,
        ..SolveOptions::default()
    };
    let s = resolvent::solve_with(&g, a.r, a.w, &opts)?;
    let out = ResolveOut {
        generator: g.label().to_string(),
        r: a.r,
        w: a.w,
        z: s.z,
        residual: s.residual,
        derivative: resolvent::derivative_at(&g.map, a.r, s.z)?,
        iterations: s.iterations,
        continuation_steps: s.continuation_steps,
        winding: match s.certificate {
            Certificate::Winding(n) => Some(n),
            Certificate::Skipped => None,
        },
    };
    emit(&a.output.out, &json(&out))?;
    Ok(out.winding.is_none_or(|n| n == 1))
}

fn run_flow(a: FlowArgs) -> Result<bool, Failure> {
    let fmt = reject_format(a.output.format, &[Format::Csv, Format::Json], Format::Csv)?;
    if a.samples == 0 || !(a.t >= 0.0) {
        return Err(Failure::Usage("need --samples > 0 and --t >= 0".into()));
    }
    let g = generator(&a.gen)?;
    let times: Vec<f64> = (0..=a.samples).map(|k| a.t * k as f64 / a.samples as f64).collect();
    let tr = semigroup::trajectory(&g, a.z, &times)?;
    let text = match fmt {
        Format::Csv => csv(
            &["t", "re", "im", "abs"],
            tr.times.iter().zip(&tr.values).map(|(t, v)| vec![*t, v.re, v.im, v.norm()]),
        ),
        _ => json(&tr),
    };
    emit(&a.output.out, &text)?;
    Ok(true)
}

#[derive(Serialize)]
struct ExpRow {
    n: usize,
    approx: Cx,
    flow: Cx,
    error: f64,
}

fn run_expformula(a: ExpArgs) -> Result<bool, Failure> {
    let fmt = reject_format(a.output.format, &[Format::Csv, Format::Json], Format::Csv)?;
    let g = generator(&a.gen)?;
    let rows = a
        .n
        .iter()
        .map(|&n| {
            semigroup::exponential_formula(&g, a.z, a.t, n).map(|e| ExpRow {
                n,
                approx: e.approx,
                flow: e.flow,
                error: e.error,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let text = match fmt {
        Format::Csv => csv(
            &["n", "re", "im", "abs", "error"],
            rows.iter()
                .map(|r| vec![r.n as f64, r.approx.re, r.approx.im, r.approx.norm(), r.error]),
        ),
        _ => json(&rows),
    };
    emit(&a.output.out, &text)?;
    Ok(true)
}

fn curve_csv(angles: &[f64], points: &[Cx]) -> String {
    csv(
        &["theta", "re", "im"],
        angles.iter().zip(points).map(|(t, z)| vec![*t, z.re, z.im]),
    )
}

fn run_region(a: RegionArgs) -> Result<bool, Failure> {
    let fmt = reject_format(a.output.format, &[Format::Csv, Format::Svg, Format::Json], Format::Csv)?;
    let g = generator(&a.gen)?;
    let b = geometry::region_boundary(&g, a.r, a.points, a.margin)?;
    let text = match fmt {
        Format::Csv => curve_csv(&b.angles, &b.points),
        Format::Svg => svg(
            &format!("J_{}(D) for f = {}", a.r, g.label()),
            &[SvgCurve {
                points: &b.points,
                stroke: PALETTE[0],
                fill: Some(PALETTE[0]),
            }],
        ),
        Format::Json => json(&b),
    };
    emit(&a.output.out, &text)?;
    Ok(true)
}

#[derive(Serialize)]
struct VerifyOut {
    generator: String,
    r: f64,
    reports: Vec<PropertyReport>,
    pass: bool,
}

fn run_verify(a: VerifyArgs) -> Result<bool, Failure> {
    reject_format(a.output.format, &[Format::Json], Format::Json)?;
    let g = generator(&a.gen)?;
    let grid = a.grid.grid()?;
    let all = a.suite == Suite::All;
    let mut reports = Vec::new();
    if all || a.suite == Suite::Nw {
        reports.push(geometry::check_nw_on(&g, a.r, &grid)?);
    }
    if a.suite == Suite::Starlike || (all && a.r > 0.0) {
        reports.push(geometry::check_starlike_half_on(&g, a.r, &grid)?);
    }
    let beta = g.f0deriv;
    if a.suite == Suite::MarxStrohhacker || (all && beta.im.abs() <= 1e-12 && beta.re > 0.0) {
        reports.push(geometry::check_marx_strohhacker_on(&g, a.r, &grid)?);
    }
    if all || a.suite == Suite::Inclusion {
        let s = a.s.unwrap_or(a.r / 2.0);
        reports.push(geometry::check_inclusion_chain_on(&g, s, a.r, &grid)?);
    }
    if all || a.suite == Suite::Convexity {
        let region = Region::resolvent_image(&g, a.r, 0.0);
        reports.push(geometry::check_hyperbolic_convexity(&region, a.pairs, a.seed)?);
    }
    let out = VerifyOut {
        generator: g.label().to_string(),
        r: a.r,
        pass: reports.iter().all(|r| r.pass),
        reports,
    };
    emit(&a.output.out, &json(&out))?;
    Ok(out.pass)
}

#[derive(Serialize)]
struct LoewnerOut {
    generator: String,
    alpha_hat: f64,
    k: Option<f64>,
    sup_arg_p: f64,
    p_sector_ok: bool,
    min_re_p: f64,
    max_definition_defect: f64,
    divergence: Vec<DivergenceIntegral>,
    divergence_defect: f64,
    max_pde_residual: f64,
    chain_defect: f64,
    pass: bool,
}

const PDE_POINTS: [Cx; 3] = [Cx::new(0.3, 0.0), Cx::new(-0.4, 0.5), Cx::new(0.1, -0.8)];

fn run_loewner(a: LoewnerArgs) -> Result<bool, Failure> {
    reject_format(a.output.format, &[Format::Json], Format::Json)?;
    let g = generator(&a.gen)?;
    let grid = a.grid.grid()?;
    let sector = loewner::sector_report_on(&g, &a.r_list, &grid)?;
    let positive = loewner::check_herglotz_positive(&g, &a.r_list, &grid)?;
    let divergence = a
        .t_list
        .iter()
        .map(|&t| loewner::divergence_integral(&g, t))
        .collect::<Result<Vec<_>, _>>()?;
    let divergence_defect = divergence.iter().map(|d| d.defect).fold(0.0, f64::max);
    let mut max_pde_residual: f64 = 0.0;
    for &r in a.r_list.iter().filter(|&&r| r > a.h) {
        for w in PDE_POINTS {
            max_pde_residual = max_pde_residual.max(loewner::pde_residual(&g, r, w, a.h)?);
        }
    }
    let chain_defect = a
        .t_list
        .iter()
        .map(|&t| loewner::chain_derivative_identity(&g, t).map(|c| c.defect))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let max_definition_defect = positive.detail("max_definition_defect").unwrap_or(f64::NAN);
    let pass = positive.pass
        && max_definition_defect < 1e-10
        && divergence_defect < 1e-8
        && max_pde_residual < 1e-6
        && chain_defect < 1e-8
        && (sector.k.is_none() || sector.p_sector_ok);
    let out = LoewnerOut {
        generator: g.label().to_string(),
        alpha_hat: sector.alpha_hat,
        k: sector.k,
        sup_arg_p: sector.sup_arg_p,
        p_sector_ok: sector.p_sector_ok,
        min_re_p: positive.worst_value,
        max_definition_defect,
        divergence,
        divergence_defect,
        max_pde_residual,
        chain_defect,
        pass,
    };
    emit(&a.output.out, &json(&out))?;
    Ok(pass)
}

fn run_boundary(a: BoundaryArgs) -> Result<bool, Failure> {
    let g = generator(&a.gen)?;
    if !a.bfid {
        reject_format(a.output.format, &[Format::Json], Format::Json)?;
        let c = classify_brfp(&g, a.r, Cx::from_polar(1.0, a.zeta))?;
        emit(&a.output.out, &json(&c))?;
        return Ok(c.agree);
    }
    let fmt = reject_format(a.output.format, &[Format::Svg, Format::Csv, Format::Json], Format::Svg)?;
    let c = bfid_region_check(&g, a.r, a.samples)?;
    let text = match fmt {
        Format::Svg => figure2_svg(a.r, &c.omega_boundary, &c.image_boundary),
        Format::Csv => figure2_csv(&c.omega_boundary, &c.image_boundary),
        Format::Json => json(&c),
    };
    emit(&a.output.out, &text)?;
    Ok(c.report.pass)
}

fn figure2_svg(r: f64, omega: &[Cx], image: &[Cx]) -> String {
    svg(
        &format!("invariant domain and its image under J_{r}"),
        &[
            SvgCurve {
                points: omega,
                stroke: PALETTE[0],
                fill: None,
            },
            SvgCurve {
                points: image,
                stroke: PALETTE[1],
                fill: Some(PALETTE[1]),
            },
        ],
    )
}

fn figure2_csv(omega: &[Cx], image: &[Cx]) -> String {
    let n = omega.len() as f64;
    csv(
        &["theta", "omega_re", "omega_im", "image_re", "image_im"],
        omega.iter().zip(image).enumerate().map(|(k, (o, i))| {
            vec![std::f64::consts::TAU * k as f64 / n, o.re, o.im, i.re, i.im]
        }),
    )
}

/// File stem of the first-figure curve for parameter `r`.
pub fn figure1_stem(r: f64) -> String {
    format!("figure1_r{r}")
}

pub const FIGURE2_STEM: &str = "figure2";

#[derive(Serialize)]
struct FiguresOut {
    directory: String,
    files: Vec<String>,
    figure1: FigureCheck,
    figure2: FigureCheck,
    pass: bool,
}

/// Reads the emitted figure CSVs from `dir` and runs the geometric checks.
pub fn assess_emitted_figures(dir: &Path) -> Result<(FigureCheck, FigureCheck), String> {
    let read = |name: String| -> Result<Vec<Vec<f64>>, String> {
        let text = fs::read_to_string(dir.join(&name)).map_err(|e| format!("{name}: {e}"))?;
        Ok(parse_csv(&text).map_err(|e| format!("{name}: {e}"))?.1)
    };
    let mut curves = Vec::new();
    for r in figures::FIGURE1_RADII {
        let rows = read(format!("{}.csv", figure1_stem(r)))?;
        curves.push((r, rows.iter().map(|row| Cx::new(row[1], row[2])).collect::<Vec<_>>()));
    }
    let rows = read(format!("{FIGURE2_STEM}.csv"))?;
    let omega: Vec<Cx> = rows.iter().map(|row| Cx::new(row[1], row[2])).collect();
    let image: Vec<Cx> = rows.iter().map(|row| Cx::new(row[3], row[4])).collect();
    Ok((assess_figure1(&curves, FIGURE1_MARGIN), assess_figure2(&omega, &image)))
}

fn run_figures(a: FiguresArgs) -> Result<bool, Failure> {
    fs::create_dir_all(&a.out)?;
    let mut files = Vec::new();
    let mut write = |name: String, text: String| -> Result<(), Failure> {
        fs::write(a.out.join(&name), text)?;
        files.push(name);
        Ok(())
    };
    for (i, b) in figures::figure1()?.iter().enumerate() {
        let stem = figure1_stem(b.r);
        write(format!("{stem}.csv"), curve_csv(&b.angles, &b.points))?;
        let colour = PALETTE[i % PALETTE.len()];
        write(
            format!("{stem}.svg"),
            svg(
                &format!("J_{}(D) for f(z) = z(1-z)", b.r),
                &[SvgCurve {
                    points: &b.points,
                    stroke: colour,
                    fill: Some(colour),
                }],
            ),
        )?;
    }
    let (omega, image) = figures::figure2()?;
    write(format!("{FIGURE2_STEM}.csv"), figure2_csv(&omega.points, &image.points))?;
    write(
        format!("{FIGURE2_STEM}.svg"),
        figure2_svg(figures::FIGURE2_R, &omega.points, &image.points),
    )?;
    let (figure1, figure2) = assess_emitted_figures(&a.out).map_err(Failure::Compute)?;
    let out = FiguresOut {
        directory: a.out.display().to_string(),
        files,
        pass: figure1.pass && figure2.pass,
        figure1,
        figure2,
    };
    if !a.quiet {
        emit(&None, &json(&out))?;
    }
    Ok(out.pass)
}
