use super::document::{HypermatrixDocument, Value};
use super::report::VerificationReport;
use crate::block_ops::{
    block_orthogonality_residual, block_unitary_check, BlockHypermatrix, BlockMatrix,
};
use crate::bm_algebra::{is_orthogonal, is_scaling, is_uncorrelated, prod2, prod2_bg, prod3, prod3_bg};
use crate::error::BmxError;
use crate::hypermatrix_core::{block_diag, kron, rotate_hyper, rotate_matrix, Hypermatrix3, Matrix, RotationAngle, C64};
use crate::maps_actions::{apply_map2, apply_map3, power_sum, MapSpec2, MapSpec3, SelectorConvention};
use crate::orbits::{enumerate_orbit, orbit_cardinality, FiniteFieldSpec};
use crate::orthogonal_gen::{gen_ortho_hyper, gen_ortho_matrix, ortho_constraints, OrthoParamHyper, OrthoParamMatrix};
use crate::symmetrization_svd::{
    fixed_point_refine, matrix_svd_sym, spectral_residual, svd3, Svd3Options,
};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Default tolerance when neither `--tol` nor `BMX_TOL` is given.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(name = "bmx", version, about = "Hypermatrix algebra toolkit")]
struct Cli {
    /// Verification tolerance (overrides BMX_TOL; default 1e-9).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Gauge t = s01⁶ for svd, as `re` or `re,im`.
    #[arg(long, global = true)]
    gauge: Option<String>,
    /// Seed for random generation.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write a verification report to this path.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Write the primary output here instead of stdout.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// BM product of two matrices or three hypermatrices.
    Product { inputs: Vec<PathBuf> },
    /// BM product with background: `a b m` for matrices, `a b c m` for hypermatrices.
    ProductBg { inputs: Vec<PathBuf> },
    /// Cyclic transpose (hypermatrix) or ordinary transpose (matrix).
    Transpose {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        power: usize,
    },
    /// Quarter-turn index rotation: `--theta q` for matrices, `--theta qx,qy,qz` for hypermatrices.
    Rotate {
        input: PathBuf,
        #[arg(long)]
        theta: String,
    },
    /// Symmetrization SVD (side-2 hypermatrix or real square matrix).
    Svd {
        input: PathBuf,
        /// Relaxed fixed-point iterations applied after the decomposition.
        #[arg(long, default_value_t = 0)]
        refine: usize,
    },
    /// Verify a property and emit a report.
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
    /// Generate an orthogonal matrix or hypermatrix.
    GenOrthogonal {
        #[arg(long, conflicts_with = "random")]
        params: Option<PathBuf>,
        #[arg(long)]
        random: bool,
        #[arg(long, value_enum, default_value_t = OrthoKind::Hyper)]
        kind: OrthoKind,
    },
    /// Kronecker product of two matrices or hypermatrices.
    Kron { a: PathBuf, b: PathBuf },
    /// Direct sum of two matrices or hypermatrices.
    Dirsum { a: PathBuf, b: PathBuf },
    /// Apply a matrix-pair or hypermatrix-triple map to a vector.
    Map {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        input: PathBuf,
    },
    /// Enumerate the tensorial orbit of a matrix over a prime field.
    Orbit {
        #[arg(long)]
        field: u64,
        input: PathBuf,
    },
    /// Block transposes and block checks on a block container.
    Block {
        #[arg(long, value_enum)]
        op: BlockOp,
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        power: usize,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    Orthogonal { input: PathBuf },
    Uncorrelated { a: PathBuf, b: PathBuf, c: PathBuf },
    Scaling { input: PathBuf },
    Block { input: PathBuf },
    /// Spectral residual of a decomposition written by `bmx svd`.
    FixedPoint { input: PathBuf, decomposition: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OrthoKind {
    Matrix,
    Hyper,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BlockOp {
    Tb,
    Te,
    Check,
}

// ── File formats beyond single documents ────────────────────────────────────

/// Output of `bmx svd` for a side-2 hypermatrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Svd3Document {
    pub utilde: HypermatrixDocument,
    pub vtilde: HypermatrixDocument,
    pub wtilde: HypermatrixDocument,
    /// Coefficients indexed by `4i + 2j + k`.
    pub sigma: Vec<[f64; 2]>,
}

/// Output of `bmx svd` for a matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixSvdDocument {
    pub u: HypermatrixDocument,
    pub sigma: Vec<f64>,
    pub v: HypermatrixDocument,
    pub repeated: bool,
}

/// Input of `bmx map --spec`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MapDocument {
    Map2 {
        a: HypermatrixDocument,
        b: HypermatrixDocument,
    },
    Map3 {
        a: HypermatrixDocument,
        b: HypermatrixDocument,
        c: HypermatrixDocument,
        #[serde(default)]
        selector: SelectorConvention,
    },
}

/// Input and output of `bmx block`. Blocks are row-major for matrices and
/// indexed `4i + 2j + k` for hypermatrices.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BlockDocument {
    Matrix { grid: usize, blocks: Vec<HypermatrixDocument> },
    Hypermatrix { blocks: Vec<HypermatrixDocument> },
}

/// Parameters accepted by `bmx gen-orthogonal --params`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OrthoParamsDocument {
    Hyper(OrthoParamHyper),
    Matrix(OrthoParamMatrix),
}

/// Output of `bmx orbit`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitDocument {
    pub modulus: u64,
    pub size: usize,
    /// Formula value for invertible square inputs, as a decimal string.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cardinality: Option<String>,
    pub matrices: Vec<Vec<Vec<u64>>>,
}

// ── Runner ──────────────────────────────────────────────────────────────────

/// Input-side failure: the command could not compute a result (exit 2).
#[derive(Debug)]
struct InputError(String);

impl From<BmxError> for InputError {
    fn from(e: BmxError) -> Self {
        InputError(e.to_string())
    }
}

type CmdResult<T> = std::result::Result<T, InputError>;

struct Ctx {
    tol: f64,
    gauge: Option<C64>,
    seed: Option<u64>,
    report: Option<PathBuf>,
    output: Option<PathBuf>,
    inputs: Vec<Vec<u8>>,
}

impl Ctx {
    fn read(&mut self, path: &Path) -> CmdResult<String> {
        let bytes = std::fs::read(path).map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|_| InputError(format!("{} is not valid UTF-8", path.display())))?;
        self.inputs.push(bytes);
        Ok(text)
    }

    fn doc(&mut self, path: &Path) -> CmdResult<HypermatrixDocument> {
        let text = self.read(path)?;
        HypermatrixDocument::parse(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
    }

    fn json<T: for<'de> Deserialize<'de>>(&mut self, path: &Path) -> CmdResult<T> {
        let text = self.read(path)?;
        serde_json::from_str(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
    }

    fn new_report(&self, check: &str) -> VerificationReport {
        let views: Vec<&[u8]> = self.inputs.iter().map(Vec::as_slice).collect();
        VerificationReport::new(check, &views)
    }
}

/// What a finished command hands back to the runner.
struct Outcome {
    primary: Option<String>,
    report: Option<VerificationReport>,
    /// Verification verdict; `false` maps to exit code 1.
    passed: bool,
}

impl Outcome {
    fn output(text: String) -> Self {
        Self { primary: Some(text), report: None, passed: true }
    }
}

fn write_atomic(path: &Path, text: &str) -> CmdResult<()> {
    let name = path.file_name().ok_or_else(|| InputError(format!("{} is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    std::fs::write(&tmp, text)
        .and_then(|_| std::fs::rename(&tmp, path))
        .map_err(|e| InputError(format!("cannot write {}: {e}", path.display())))
}

fn to_json<T: Serialize>(v: &T) -> CmdResult<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| InputError(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn parse_complex(s: &str) -> CmdResult<C64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|_| InputError(format!("cannot parse `{p}` as a number")));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(InputError(format!("expected `re` or `re,im`, got `{s}`"))),
    }
}

fn parse_angles(s: &str) -> CmdResult<Vec<RotationAngle>> {
    s.split(',')
        .map(|p| {
            let q: u8 = p.trim().parse().map_err(|_| InputError(format!("cannot parse quarter turns `{p}`")))?;
            Ok(RotationAngle::new(q)?)
        })
        .collect()
}

fn resolve_tol(flag: Option<f64>) -> CmdResult<f64> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var("BMX_TOL") {
            Ok(v) => v.trim().parse().map_err(|_| InputError(format!("BMX_TOL=`{v}` is not a number")))?,
            Err(_) => DEFAULT_TOL,
        },
    };
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(InputError(format!("tolerance must be finite and nonnegative, got {tol}")));
    }
    Ok(tol)
}

/// Runs the CLI with process streams and returns the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI with explicit output streams. Exit codes: 0 success, 1
/// verification failure, 2 input error.
pub fn run_cli_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    match execute(cli) {
        Ok((outcome, ctx)) => {
            if let Some(text) = &outcome.primary {
                match &ctx.output {
                    Some(path) => {
                        if let Err(InputError(m)) = write_atomic(path, text) {
                            let _ = writeln!(err, "error: {m}");
                            return 2;
                        }
                    }
                    None => {
                        let _ = write!(out, "{text}");
                    }
                }
            }
            if let Some(report) = &outcome.report {
                let text = report.to_json();
                match &ctx.report {
                    Some(path) => {
                        if let Err(InputError(m)) = write_atomic(path, &text) {
                            let _ = writeln!(err, "error: {m}");
                            return 2;
                        }
                    }
                    // Reports are the primary result when nothing else is printed.
                    None if outcome.primary.is_none() || ctx.output.is_some() => {
                        let _ = write!(out, "{text}");
                    }
                    None => {}
                }
                if !report.passed {
                    for r in report.residuals.iter().filter(|r| !r.passed) {
                        let tol = r.tolerance.map_or(String::from("-"), |t| format!("{t:e}"));
                        let _ = writeln!(err, "check failed: {} = {:e} (tolerance {tol})", r.name, r.value);
                    }
                }
            }
            if outcome.passed {
                0
            } else {
                1
            }
        }
        Err(InputError(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
    }
}

fn execute(cli: Cli) -> CmdResult<(Outcome, Ctx)> {
    let mut ctx = Ctx {
        tol: resolve_tol(cli.tol)?,
        gauge: cli.gauge.as_deref().map(parse_complex).transpose()?,
        seed: cli.seed,
        report: cli.report,
        output: cli.output,
        inputs: Vec::new(),
    };
    let outcome = match cli.command {
        Command::Product { inputs } => product(&mut ctx, &inputs, false)?,
        Command::ProductBg { inputs } => product(&mut ctx, &inputs, true)?,
        Command::Transpose { input, power } => {
            let value = match ctx.doc(&input)?.to_value()? {
                Value::Matrix(m) => Value::Matrix(if power % 2 == 1 { m.transpose() } else { m }),
                Value::Hypermatrix(h) => Value::Hypermatrix(h.transpose_pow(power)),
            };
            Outcome::output(HypermatrixDocument::from_value(&value).to_json()?)
        }
        Command::Rotate { input, theta } => {
            let angles = parse_angles(&theta)?;
            let value = match (ctx.doc(&input)?.to_value()?, angles.as_slice()) {
                (Value::Matrix(m), [q]) => Value::Matrix(rotate_matrix(&m, *q)?),
                (Value::Hypermatrix(h), [x, y, z]) => Value::Hypermatrix(rotate_hyper(&h, *x, *y, *z)?),
                (Value::Matrix(_), _) => return Err(InputError("a matrix takes one angle: --theta q".into())),
                (Value::Hypermatrix(_), _) => {
                    return Err(InputError("a hypermatrix takes three angles: --theta qx,qy,qz".into()))
                }
            };
            Outcome::output(HypermatrixDocument::from_value(&value).to_json()?)
        }
        Command::Svd { input, refine } => svd(&mut ctx, &input, refine)?,
        Command::Verify { check } => verify(&mut ctx, check)?,
        Command::GenOrthogonal { params, random, kind } => gen_orthogonal(&mut ctx, params.as_deref(), random, kind)?,
        Command::Kron { a, b } => {
            let value = match (ctx.doc(&a)?.to_value()?, ctx.doc(&b)?.to_value()?) {
                (Value::Matrix(x), Value::Matrix(y)) => Value::Matrix(x.kron(&y)),
                (Value::Hypermatrix(x), Value::Hypermatrix(y)) => Value::Hypermatrix(kron(&x, &y)),
                _ => return Err(InputError("kron needs two inputs of the same order".into())),
            };
            Outcome::output(HypermatrixDocument::from_value(&value).to_json()?)
        }
        Command::Dirsum { a, b } => {
            let value = match (ctx.doc(&a)?.to_value()?, ctx.doc(&b)?.to_value()?) {
                (Value::Matrix(x), Value::Matrix(y)) => Value::Matrix(x.dirsum(&y)),
                (Value::Hypermatrix(x), Value::Hypermatrix(y)) => Value::Hypermatrix(block_diag(&x, &y)),
                _ => return Err(InputError("dirsum needs two inputs of the same order".into())),
            };
            Outcome::output(HypermatrixDocument::from_value(&value).to_json()?)
        }
        Command::Map { spec, input } => map(&mut ctx, &spec, &input)?,
        Command::Orbit { field, input } => orbit(&mut ctx, field, &input)?,
        Command::Block { op, input, power } => block(&mut ctx, op, &input, power)?,
    };
    Ok((outcome, ctx))
}

fn product(ctx: &mut Ctx, inputs: &[PathBuf], background: bool) -> CmdResult<Outcome> {
    let docs = inputs.iter().map(|p| ctx.doc(p)).collect::<CmdResult<Vec<_>>>()?;
    let values = docs.iter().map(|d| d.to_value()).collect::<Result<Vec<_>, _>>()?;
    let (mats, hypers): (Vec<_>, Vec<_>) = values.iter().partition(|v| matches!(v, Value::Matrix(_)));
    let name = if background { "product-bg" } else { "product" };
    let value = if hypers.is_empty() {
        let m: Vec<&Matrix> = mats.iter().map(|v| if let Value::Matrix(m) = v { m } else { unreachable!() }).collect();
        match (background, m.as_slice()) {
            (false, [a, b]) => Value::Matrix(prod2(a, b)?),
            (true, [a, b, bg]) => Value::Matrix(prod2_bg(a, b, bg)?),
            _ => {
                return Err(InputError(format!(
                    "{name} on matrices needs {} inputs, got {}",
                    if background { 3 } else { 2 },
                    m.len()
                )))
            }
        }
    } else if mats.is_empty() {
        let h: Vec<&Hypermatrix3> =
            hypers.iter().map(|v| if let Value::Hypermatrix(h) = v { h } else { unreachable!() }).collect();
        match (background, h.as_slice()) {
            (false, [a, b, c]) => Value::Hypermatrix(prod3(a, b, c)?),
            (true, [a, b, c, bg]) => Value::Hypermatrix(prod3_bg(a, b, c, bg)?),
            _ => {
                return Err(InputError(format!(
                    "{name} on hypermatrices needs {} inputs, got {}",
                    if background { 4 } else { 3 },
                    h.len()
                )))
            }
        }
    } else {
        return Err(InputError(format!("{name} inputs must all have the same order")));
    };
    Ok(Outcome::output(HypermatrixDocument::from_value(&value).to_json()?))
}

/// Report tolerances for a decomposition, tiered from the base tolerance:
/// characteristic ≤ tol, spectral ≤ 10·tol, reconstruction ≤ 1000·tol.
fn svd(ctx: &mut Ctx, input: &Path, refine: usize) -> CmdResult<Outcome> {
    let doc = ctx.doc(input)?;
    let tol = ctx.tol;
    match doc.to_value()? {
        Value::Matrix(a) => {
            let r = matrix_svd_sym(&a)?;
            let sigma = Matrix::from_fn(r.sigma.len(), r.sigma.len(), |i, j| {
                if i == j {
                    C64::new(r.sigma[i], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            let n = r.sigma.len();
            let rec = r.u.matmul(&sigma)?.matmul(&r.v)?.max_abs_diff(&a) / a.max_abs().max(f64::MIN_POSITIVE);
            let id = Matrix::identity(n);
            let mut report = ctx.new_report("svd-matrix");
            report
                .judged("orthogonality_u", r.u.matmul(&r.u.transpose())?.max_abs_diff(&id), 10.0 * tol)
                .judged("orthogonality_v", r.v.transpose().matmul(&r.v)?.max_abs_diff(&id), 10.0 * tol)
                .judged("reconstruction", rec, 10.0 * tol)
                .info("vandermonde_condition", r.vandermonde_condition);
            if r.repeated {
                report.note("repeated singular values: factors taken from the eigenvectors");
            }
            let out = MatrixSvdDocument {
                u: HypermatrixDocument::from_matrix(&r.u),
                sigma: r.sigma.clone(),
                v: HypermatrixDocument::from_matrix(&r.v),
                repeated: r.repeated,
            };
            let passed = report.passed;
            Ok(Outcome { primary: Some(to_json(&out)?), report: Some(report), passed })
        }
        Value::Hypermatrix(a) => {
            let opts = Svd3Options { gauge: ctx.gauge, ..Svd3Options::default() };
            let mut r = svd3(&a, &opts)?;
            let mut report = ctx.new_report("svd");
            if refine > 0 {
                let (refined, rep) = fixed_point_refine(&a, &r, refine)?;
                if rep.non_decreasing {
                    report.note("fixed-point refinement did not decrease the spectral residual at every step");
                }
                r = refined;
            }
            report
                .judged("characteristic", r.residuals.characteristic, tol)
                .judged("spectral", r.residuals.spectral, 10.0 * tol)
                .judged("reconstruction", r.residuals.reconstruction, 1000.0 * tol)
                .info("orthogonality_u", r.residuals.orthogonality[0])
                .info("orthogonality_v", r.residuals.orthogonality[1])
                .info("orthogonality_w", r.residuals.orthogonality[2])
                .info("sigma_condition", r.sigma_condition);
            if r.rank_deficient {
                report.note(format!("sigma solved by least squares; {} nonzero coefficients", r.sigma_l0));
            }
            let out = Svd3Document {
                utilde: HypermatrixDocument::from_hypermatrix(&r.utilde),
                vtilde: HypermatrixDocument::from_hypermatrix(&r.vtilde),
                wtilde: HypermatrixDocument::from_hypermatrix(&r.wtilde),
                sigma: r.sigma.iter().map(|z| [z.re, z.im]).collect(),
            };
            let passed = report.passed;
            Ok(Outcome { primary: Some(to_json(&out)?), report: Some(report), passed })
        }
    }
}

fn verify(ctx: &mut Ctx, check: VerifyCommand) -> CmdResult<Outcome> {
    let tol = ctx.tol;
    let report = match check {
        VerifyCommand::Orthogonal { input } => {
            let doc = ctx.doc(&input)?;
            let mut report = ctx.new_report("orthogonal");
            match doc.to_value()? {
                Value::Hypermatrix(x) => {
                    report.judged("orthogonality", is_orthogonal(&x, tol)?.residual, tol);
                }
                Value::Matrix(x) => {
                    let n = x.require_square("verify orthogonal")?;
                    let res = x.matmul(&x.transpose())?.max_abs_diff(&Matrix::identity(n));
                    report.judged("orthogonality", res, tol);
                }
            }
            report
        }
        VerifyCommand::Uncorrelated { a, b, c } => {
            let (a, b, c) = (ctx.doc(&a)?.to_hypermatrix()?, ctx.doc(&b)?.to_hypermatrix()?, ctx.doc(&c)?.to_hypermatrix()?);
            let mut report = ctx.new_report("uncorrelated");
            report.judged("uncorrelated", is_uncorrelated(&a, &b, &c, tol)?.residual, tol);
            report
        }
        VerifyCommand::Scaling { input } => {
            let d = ctx.doc(&input)?.to_hypermatrix()?;
            let check = is_scaling(&d, tol)?;
            let mut report = ctx.new_report("scaling");
            report
                .info("transpose_lead", check.residuals[0])
                .info("plain_lead", check.residuals[1])
                .info("double_transpose_lead", check.residuals[2]);
            let best = check.residuals.iter().copied().fold(f64::INFINITY, f64::min);
            report.judged("best_characterisation", best, tol);
            report
        }
        VerifyCommand::Block { input } => return block(ctx, BlockOp::Check, &input, 1),
        VerifyCommand::FixedPoint { input, decomposition } => {
            let a = ctx.doc(&input)?.to_hypermatrix()?;
            let d: Svd3Document = ctx.json(&decomposition)?;
            let (u, v, w) = (d.utilde.to_hypermatrix()?, d.vtilde.to_hypermatrix()?, d.wtilde.to_hypermatrix()?);
            let res = spectral_residual(&a, &u, &v, &w)?;
            let mut report = ctx.new_report("fixed-point");
            report.judged("spectral", res, 10.0 * tol);
            if d.sigma.len() == 8 {
                let mut rec = Hypermatrix3::zeros([2, 2, 2]);
                for (s, z) in d.sigma.iter().enumerate() {
                    let term = prod3(&u.select(1, s / 4)?, &v.select(2, (s / 2) % 2)?, &w.select(0, s % 2)?)?;
                    rec = rec.add(&term.scale(C64::new(z[0], z[1])))?;
                }
                let scale = a.max_abs().max(f64::MIN_POSITIVE);
                report.judged("reconstruction", a.max_abs_diff(&rec) / scale, 1000.0 * tol);
            } else {
                return Err(InputError(format!("sigma must have 8 entries, got {}", d.sigma.len())));
            }
            report
        }
    };
    let passed = report.passed;
    Ok(Outcome { primary: None, report: Some(report), passed })
}

fn gen_orthogonal(ctx: &mut Ctx, params: Option<&Path>, random: bool, kind: OrthoKind) -> CmdResult<Outcome> {
    let seed = ctx.seed.unwrap_or(0);
    let params = match (params, random) {
        (Some(p), _) => ctx.json::<OrthoParamsDocument>(p)?,
        (None, true) => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            match kind {
                OrthoKind::Hyper => OrthoParamsDocument::Hyper(OrthoParamHyper::random(&mut rng)),
                OrthoKind::Matrix => OrthoParamsDocument::Matrix(OrthoParamMatrix::random(&mut rng)),
            }
        }
        (None, false) => return Err(InputError("gen-orthogonal needs --params <file> or --random".into())),
    };
    let tol = ctx.tol;
    let mut report = ctx.new_report("gen-orthogonal");
    let metadata = super::document::Metadata { name: Some("orthogonal".into()), seed: random.then_some(seed) };
    let doc = match &params {
        OrthoParamsDocument::Hyper(p) => {
            let x = gen_ortho_hyper(p)?;
            report.judged("orthogonality", is_orthogonal(&x, tol)?.residual, tol);
            for (name, r) in ["x1x4x5+x3x6x7", "x0x1x4+x2x3x6", "x0^3+x2^3-1", "x5^3+x7^3-1"].iter().zip(ortho_constraints(&x)?) {
                report.judged(*name, r, tol);
            }
            HypermatrixDocument::from_hypermatrix(&x)
        }
        OrthoParamsDocument::Matrix(p) => {
            let x = gen_ortho_matrix(p)?;
            report.judged("orthogonality", x.matmul(&x.transpose())?.max_abs_diff(&Matrix::identity(2)), tol);
            HypermatrixDocument::from_matrix(&x)
        }
    };
    let passed = report.passed;
    Ok(Outcome { primary: Some(doc.with_metadata(metadata).to_json()?), report: Some(report), passed })
}

fn map(ctx: &mut Ctx, spec: &Path, input: &Path) -> CmdResult<Outcome> {
    let spec: MapDocument = ctx.json(spec)?;
    let x = ctx.doc(input)?.to_vector()?;
    let (y, order) = match &spec {
        MapDocument::Map2 { a, b } => (apply_map2(&MapSpec2::new(a.to_matrix()?, b.to_matrix()?)?, &x)?, 2),
        MapDocument::Map3 { a, b, c, selector } => {
            let m = MapSpec3::new(a.to_hypermatrix()?, b.to_hypermatrix()?, c.to_hypermatrix()?)?.with_selector(*selector);
            (apply_map3(&m, &x)?, 3)
        }
    };
    let mut report = ctx.new_report("map");
    let (sx, sy) = (power_sum(&x, order)?, power_sum(&y, order)?);
    report.info("power_sum_input", sx.norm()).info("power_sum_output", sy.norm()).info("power_sum_change", (sx - sy).norm());
    let out = Matrix::new(y.len(), 1, y)?;
    Ok(Outcome { primary: Some(HypermatrixDocument::from_matrix(&out).to_json()?), report: Some(report), passed: true })
}

fn orbit(ctx: &mut Ctx, field: u64, input: &Path) -> CmdResult<Outcome> {
    let f = FiniteFieldSpec::prime(field)?;
    let m = ctx.doc(input)?.to_fp_matrix(field)?;
    let orbit = enumerate_orbit(&m, &f)?;
    let cardinality =
        if m.is_invertible(field) { Some(orbit_cardinality(&f, m.rows as u32)?.to_string()) } else { None };
    let out = OrbitDocument {
        modulus: field,
        size: orbit.len(),
        cardinality,
        matrices: orbit.iter().map(|x| x.to_rows()).collect(),
    };
    Ok(Outcome::output(to_json(&out)?))
}

fn block(ctx: &mut Ctx, op: BlockOp, input: &Path, power: usize) -> CmdResult<Outcome> {
    let doc: BlockDocument = ctx.json(input)?;
    let tol = ctx.tol;
    match doc {
        BlockDocument::Matrix { grid, blocks } => {
            let blocks = blocks.iter().map(|d| d.to_matrix()).collect::<Result<Vec<_>, _>>()?;
            let bm = BlockMatrix::new(grid, blocks)?;
            let back = |bm: BlockMatrix| -> CmdResult<Outcome> {
                let blocks = (0..grid * grid).map(|b| HypermatrixDocument::from_matrix(bm.block(b / grid, b % grid))).collect();
                Ok(Outcome::output(to_json(&BlockDocument::Matrix { grid, blocks })?))
            };
            match op {
                BlockOp::Tb => back(if power % 2 == 1 { bm.top_b() } else { bm }),
                BlockOp::Te => back(if power % 2 == 1 { bm.top_e() } else { bm }),
                BlockOp::Check => {
                    let c = block_unitary_check(&bm, tol)?;
                    let mut report = ctx.new_report("block-unitary");
                    report.judged("left_product", c.left, tol).judged("right_product", c.right, tol);
                    let passed = report.passed;
                    Ok(Outcome { primary: None, report: Some(report), passed })
                }
            }
        }
        BlockDocument::Hypermatrix { blocks } => {
            let blocks = blocks.iter().map(|d| d.to_hypermatrix()).collect::<Result<Vec<_>, _>>()?;
            let bh = BlockHypermatrix::new(blocks)?;
            let back = |bh: BlockHypermatrix| -> CmdResult<Outcome> {
                let blocks = bh.blocks().iter().map(HypermatrixDocument::from_hypermatrix).collect();
                Ok(Outcome::output(to_json(&BlockDocument::Hypermatrix { blocks })?))
            };
            match op {
                BlockOp::Tb => back(bh.top_b(power)?),
                BlockOp::Te => back(bh.top_e(power)),
                BlockOp::Check => {
                    let r = block_orthogonality_residual(&bh, tol)?;
                    let mut report = ctx.new_report("block-orthogonality");
                    for (i, c) in r.conditions.iter().enumerate() {
                        report.judged(format!("condition_{}", i + 1), *c, tol);
                    }
                    report.judged("diagonal_000", r.diagonal[0], tol).judged("diagonal_111", r.diagonal[1], tol);
                    let passed = report.passed;
                    Ok(Outcome { primary: None, report: Some(report), passed })
                }
            }
        }
    }
}
