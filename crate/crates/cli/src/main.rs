use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use holoquant::fock::{CMatrix, HermiteBasisSpec};
use holoquant::holospace::{kernel, kernel_from_basis, SpaceSpec};
use holoquant::io;
use holoquant::quadrature::{complex_gaussian, ComplexWeight};
use holoquant::quantize::{quantize, scheme_differences, toeplitz, toeplitz_by_quadrature, OrderingScheme, SBSymbol};
use holoquant::selftest;
use holoquant::su2::{heat_kernel, transform_group, GroupElement, PeterWeylCoeffs, Spin};
use holoquant::symbol::parse_symbol;
use holoquant::transform::{husimi, transform_a, transform_b, transform_c, PhaseGrid, WaveFunction};
use holoquant::{Error, PlanckScale};

const EXIT_SELFTEST: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

/// Points per parallel work item when filling grids.
const GRID_CHUNK: usize = 256;

#[derive(Parser)]
#[command(name = "holoquant", version, about = "Holomorphic spaces, Segal-Bargmann transforms and quantization at finite truncation")]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reproducing kernel K(z, w) of a holomorphic space.
    Kernel(KernelArgs),
    /// Segal-Bargmann transform of a Hermite expansion at a point.
    Transform(TransformArgs),
    /// Husimi density of a Hermite expansion on a phase-space grid (CSV).
    Husimi(HusimiArgs),
    /// Matrix of a quantized polynomial symbol.
    Quantize(QuantizeArgs),
    /// Toeplitz matrix on the Segal-Bargmann space.
    Toeplitz(ToeplitzArgs),
    /// SU(2) heat kernel at an SL(2,C) point.
    Su2Heat(Su2HeatArgs),
    /// Heat-kernel transform of Peter-Weyl coefficients at an SL(2,C) point.
    Su2Transform(Su2TransformArgs),
    /// Run every registered invariant check.
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceArg {
    SegalBargmann,
    Bergman,
    WeightedBergman,
    Hardy,
    Nu,
}

#[derive(Clone, Copy, ValueEnum)]
enum Form {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
    #[value(name = "C", alias = "c")]
    C,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
}

fn complex_arg(s: &str) -> Result<Complex64, String> {
    io::parse_complex(s).map_err(|e| e.to_string())
}

fn scale_arg(s: &str) -> Result<PlanckScale, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    PlanckScale::new(v).map_err(|e| e.to_string())
}

fn group_arg(s: &str) -> Result<GroupElement, String> {
    io::parse_group_element(s).map_err(|e| e.to_string())
}

fn spin_arg(s: &str) -> Result<Spin, String> {
    s.parse::<Spin>().map_err(|e| e.to_string())
}

fn truncation_arg(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|_| format!("not a count: {s:?}"))?;
    if n < 2 {
        return Err("truncation must be at least 2".into());
    }
    Ok(n)
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long, value_enum)]
    space: SpaceArg,
    /// Gaussian parameter of the Segal-Bargmann and nu spaces.
    #[arg(long, default_value = "1", value_parser = scale_arg)]
    t: PlanckScale,
    /// Weight exponent of the weighted Bergman space.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    z: Complex64,
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    w: Complex64,
    /// Also sum the orthonormal-basis series up to this degree.
    #[arg(long)]
    basis_truncation: Option<usize>,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long, value_enum)]
    form: Form,
    /// JSON array of [re, im] Hermite coefficients in L2(R, dx).
    #[arg(long)]
    hermite_coeffs: PathBuf,
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    z: Complex64,
    #[arg(long, default_value = "1", value_parser = scale_arg)]
    hbar: PlanckScale,
    /// Report the coefficient and quadrature norms of the A-image.
    #[arg(long)]
    check_unitarity: bool,
}

#[derive(Args)]
struct HusimiArgs {
    /// JSON array of [re, im] Hermite coefficients; must have norm 1.
    #[arg(long)]
    hermite_coeffs: PathBuf,
    #[arg(long, default_value = "1", value_parser = scale_arg)]
    hbar: PlanckScale,
    /// Grid half-width in units of sqrt(hbar).
    #[arg(long, default_value_t = 6.0)]
    half_width: f64,
    /// Points per axis; 0 gives an empty grid.
    #[arg(long, default_value_t = 61)]
    points: usize,
}

#[derive(Args)]
struct QuantizeArgs {
    /// pdo-standard, pdo-reverse, weyl, wick or anti-wick.
    #[arg(long)]
    scheme: OrderingScheme,
    /// Sum of monomials in x, p (or z, zb), e.g. "x^2*p + 3*p".
    #[arg(long, allow_hyphen_values = true)]
    symbol: String,
    /// Number of Hermite basis vectors, at least 2.
    #[arg(long, value_parser = truncation_arg)]
    truncation: usize,
    #[arg(long, default_value = "1", value_parser = scale_arg)]
    hbar: PlanckScale,
    /// Add the table of pairwise scheme differences.
    #[arg(long)]
    compare: bool,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args)]
struct ToeplitzArgs {
    /// Symbol in x, p or z, zb with z = x + ip.
    #[arg(long, allow_hyphen_values = true)]
    symbol: String,
    /// Number of Hermite basis vectors, at least 2.
    #[arg(long, value_parser = truncation_arg)]
    truncation: usize,
    #[arg(long, default_value = "1", value_parser = scale_arg)]
    t: PlanckScale,
    /// Build the matrix by mu_t quadrature with this many nodes per axis.
    #[arg(long)]
    quadrature: Option<usize>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args)]
struct Su2HeatArgs {
    /// Heat-kernel time.
    #[arg(long, value_parser = scale_arg)]
    t: PlanckScale,
    /// Matrix entries "a,b,c,d" row-major, each re or re:im.
    #[arg(long, value_parser = group_arg, allow_hyphen_values = true)]
    g: GroupElement,
    /// Highest spin L summed, e.g. 3/2; chosen from the tail bound if absent.
    #[arg(long, value_parser = spin_arg)]
    cutoff: Option<Spin>,
}

#[derive(Args)]
struct Su2TransformArgs {
    /// PeterWeylCoeffs JSON file.
    #[arg(long)]
    coeffs: PathBuf,
    /// Matrix entries "a,b,c,d" row-major, each re or re:im.
    #[arg(long, value_parser = group_arg, allow_hyphen_values = true)]
    g: GroupElement,
    #[arg(long, value_parser = scale_arg)]
    hbar: PlanckScale,
}

enum Failure {
    Usage(String),
    Io(String),
    Selftest(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(e) => Failure::Io(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn pair(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn render_matrix(m: &CMatrix, format: Format) -> Result<String, Failure> {
    Ok(match format {
        Format::Json => io::matrix_to_json(m)? + "\n",
        Format::Csv => io::matrix_csv_string(m)?,
    })
}

fn run_kernel(args: KernelArgs) -> Result<String, Failure> {
    let space = match args.space {
        SpaceArg::SegalBargmann => SpaceSpec::segal_bargmann(args.t, 1)?,
        SpaceArg::Bergman => SpaceSpec::bergman(),
        SpaceArg::WeightedBergman => {
            let a = args.a.ok_or_else(|| Failure::Usage("--a is required for weighted-bergman".into()))?;
            SpaceSpec::weighted_bergman(a)?
        }
        SpaceArg::Hardy => SpaceSpec::hardy(),
        SpaceArg::Nu => SpaceSpec::nu(args.t, 1)?,
    };
    let k = kernel(space, &[args.z], &[args.w])?;
    let mut out = io::format_complex(k) + "\n";
    if let Some(m) = args.basis_truncation {
        let partial = kernel_from_basis(space, &[args.z], &[args.w], m)?;
        out += &format!("basis({m}) {}\ndifference {:e}\n", io::format_complex(partial), (partial - k).norm());
    }
    Ok(out)
}

fn run_transform(args: TransformArgs) -> Result<String, Failure> {
    let coeffs = io::parse_hermite_coeffs(&read_input(&args.hermite_coeffs)?)?;
    let psi = WaveFunction::lebesgue(coeffs, args.hbar)?;
    let (name, value) = match args.form {
        Form::A => ("A", transform_a(&psi)?.eval(&[args.z])?),
        Form::B => ("B", transform_b(&psi.ground_state_transform()?, args.z)?),
        Form::C => ("C", transform_c(&psi, args.z)?),
    };
    let mut out = json!({
        "form": name,
        "hbar": args.hbar.value(),
        "z": pair(args.z),
        "value": pair(value),
    });
    if args.check_unitarity {
        let image = transform_a(&psi)?;
        // μ_ℏ rule exact for |F|² with deg F = n
        let rule = complex_gaussian(psi.degree() + 1, args.hbar, ComplexWeight::Mu)?;
        out["unitarity"] = json!({
            "input_norm_sq": psi.norm_sq(),
            "image_norm_sq": image.norm_sq()?,
            "image_norm_sq_by_quadrature": image.norm_sq_by_quadrature(&rule)?,
        });
    }
    Ok(serde_json::to_string_pretty(&out).map_err(Error::from)? + "\n")
}

fn run_husimi(args: HusimiArgs) -> Result<String, Failure> {
    let coeffs = io::parse_hermite_coeffs(&read_input(&args.hermite_coeffs)?)?;
    let psi = WaveFunction::lebesgue(coeffs, args.hbar)?;
    if !(args.half_width.is_finite() && args.half_width > 0.0) {
        return Err(Failure::Usage("--half-width must be positive".into()));
    }
    let points = PhaseGrid::centered(args.hbar, args.half_width, args.points).points();
    let values: Vec<Vec<f64>> = points
        .par_chunks(GRID_CHUNK)
        .map(|chunk| husimi(&psi, chunk))
        .collect::<holoquant::Result<_>>()?;
    let rows: Vec<(f64, f64, f64)> = points
        .iter()
        .zip(values.into_iter().flatten())
        .map(|(&(x, p), v)| (x, p, v))
        .collect();
    Ok(io::grid_csv_string(&rows)?)
}

fn run_quantize(args: QuantizeArgs) -> Result<String, Failure> {
    let f = parse_symbol(&args.symbol)?;
    let spec = HermiteBasisSpec::new(args.truncation, args.hbar)?;
    let q = quantize(args.scheme, &f, spec)?;
    if !args.compare {
        return render_matrix(q.entries(), args.format);
    }
    let table = scheme_differences(&f, spec)?;
    match args.format {
        Format::Json => {
            let diffs: Vec<Value> = table
                .iter()
                .map(|(a, b, d)| json!({"a": a.name(), "b": b.name(), "max_abs": d}))
                .collect();
            let matrix = io::MatrixJson::from_matrix(q.entries())?;
            let out = json!({"matrix": matrix, "differences": diffs});
            Ok(serde_json::to_string(&out).map_err(Error::from)? + "\n")
        }
        Format::Csv => {
            let mut out = render_matrix(q.entries(), Format::Csv)?;
            out += "\na,b,max_abs\n";
            for (a, b, d) in table {
                out += &format!("{},{},{d:?}\n", a.name(), b.name());
            }
            Ok(out)
        }
    }
}

fn run_toeplitz(args: ToeplitzArgs) -> Result<String, Failure> {
    let phi = SBSymbol::from_phase(&parse_symbol(&args.symbol)?)?;
    let op = match args.quadrature {
        None => toeplitz(&phi, args.truncation, args.t)?,
        Some(n) => {
            let rule = complex_gaussian(n, args.t, ComplexWeight::Mu)?;
            toeplitz_by_quadrature(&phi, args.truncation, args.t, &rule)?
        }
    };
    render_matrix(op.entries(), args.format)
}

fn run_su2_heat(args: Su2HeatArgs) -> Result<String, Failure> {
    let v = heat_kernel(args.t, &args.g, args.cutoff.map(Spin::twice))?;
    let out = json!({
        "value": pair(v.value),
        "cutoff": Spin(v.cutoff_twice).to_string(),
        "cutoff_twice": v.cutoff_twice,
        "tail_bound": v.tail_bound,
    });
    Ok(serde_json::to_string_pretty(&out).map_err(Error::from)? + "\n")
}

fn run_su2_transform(args: Su2TransformArgs) -> Result<String, Failure> {
    let coeffs: PeterWeylCoeffs = serde_json::from_str(&read_input(&args.coeffs)?).map_err(Error::from)?;
    let value = transform_group(&coeffs, &args.g, args.hbar)?;
    let out = json!({
        "value": pair(value),
        "cutoff": Spin(coeffs.cutoff_twice()).to_string(),
        "cutoff_twice": coeffs.cutoff_twice(),
        // band-limited input: the series is finite
        "tail_bound": 0.0,
    });
    Ok(serde_json::to_string_pretty(&out).map_err(Error::from)? + "\n")
}

/// The pass/fail table and the names of failing checks.
fn run_selftest() -> (String, Vec<&'static str>) {
    let outcomes: Vec<selftest::Outcome> = selftest::REGISTRY.par_iter().map(|c| c.run()).collect();
    let mut out = format!("{:<8}{:<12}{:<28}{:>12}{:>10}\n", "status", "module", "check", "residual", "tol");
    let mut failed = Vec::new();
    for o in &outcomes {
        let status = if o.passed() { "PASS" } else { "FAIL" };
        out += &format!("{status:<8}{:<12}{:<28}{:>12.3e}{:>10.0e}\n", o.module, o.name, o.residual, o.tol);
        if let Some(e) = &o.error {
            out += &format!("      error: {e}\n");
        }
        if !o.passed() {
            failed.push(o.name);
        }
    }
    out += &format!("{}/{} checks passed\n", outcomes.len() - failed.len(), outcomes.len());
    (out, failed)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("HOLOQUANT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| Failure::Usage(format!("HOLOQUANT_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn emit(text: &str, path: Option<&Path>) -> Result<(), Failure> {
    let result = match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(|e| e.to_string())
        }
    };
    result.map_err(Failure::Io)
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    let text = match cli.command {
        Command::Kernel(a) => run_kernel(a)?,
        Command::Transform(a) => run_transform(a)?,
        Command::Husimi(a) => run_husimi(a)?,
        Command::Quantize(a) => run_quantize(a)?,
        Command::Toeplitz(a) => run_toeplitz(a)?,
        Command::Su2Heat(a) => run_su2_heat(a)?,
        Command::Su2Transform(a) => run_su2_transform(a)?,
        Command::Selftest => {
            let (table, failed) = run_selftest();
            emit(&table, cli.output.as_deref())?;
            if failed.is_empty() {
                return Ok(());
            }
            return Err(Failure::Selftest(format!("failing invariants: {}", failed.join(", "))));
        }
    };
    emit(&text, cli.output.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("I/O error: {msg}");
            ExitCode::from(EXIT_IO)
        }
        Err(Failure::Selftest(msg)) => {
            eprintln!("selftest failed: {msg}");
            ExitCode::from(EXIT_SELFTEST)
        }
    }
}
