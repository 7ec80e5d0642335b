use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

#[derive(Debug, Parser)]
#[command(name = "exptaylor", version, about = "Exponential Taylor expansions from the command line")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the coefficients c_j (or c_γ when --dims > 1).
    Expand(ExpandArgs),
    /// Evaluate a partial sum at one point with its remainder and bounds.
    Eval(EvalArgs),
    /// Error and bounds along a range of x or of orders N.
    Sweep(SweepArgs),
    /// Ratio-test estimate of the radius of convergence.
    Radius(RadiusArgs),
    /// Growth of the operator sequence over one period.
    Growth(GrowthArgs),
    /// Multivariate expansion, optionally evaluated at --x with its bound.
    Nd(NdArgs),
    /// Run the numerical identity suite.
    Identities(IdentitiesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[arg(long = "fn", value_name = "EXPR")]
    pub function: String,
    #[arg(long, default_value_t = 1)]
    pub dims: usize,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub lambda: Complex64,
    /// Expansion point; comma-separated when --dims > 1 (default: origin).
    #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
    pub x0: Option<Point>,
    /// Number of terms N (1-D: j < N, n-D: |γ| < N).
    #[arg(long)]
    pub order: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long = "fn", value_name = "EXPR")]
    pub function: String,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub lambda: Complex64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x0: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub x: f64,
    #[arg(long)]
    pub order: usize,
    #[arg(long, default_value_t = exptaylor::series1d::DEFAULT_GRID)]
    pub grid: usize,
    #[arg(long, default_value_t = exptaylor::series1d::DEFAULT_QUAD_NODES)]
    pub quad_nodes: usize,
    /// Fail with exit code 3 unless |sum + remainder - f(x)| <= --check-tol.
    #[arg(long)]
    pub check: bool,
    #[arg(long, default_value_t = 1e-9)]
    pub check_tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long = "fn", value_name = "EXPR")]
    pub function: String,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub lambda: Complex64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x0: f64,
    /// `lo:hi:steps`, evaluated at fixed --order.
    #[arg(long, value_parser = parse_x_range, allow_hyphen_values = true, conflicts_with = "n_range")]
    pub x_range: Option<XRange>,
    /// `lo:hi` (inclusive), evaluated at fixed --x.
    #[arg(long, value_parser = parse_n_range, required_unless_present = "x_range")]
    pub n_range: Option<(usize, usize)>,
    #[arg(long, required_unless_present = "n_range")]
    pub order: Option<usize>,
    #[arg(long, allow_hyphen_values = true, required_unless_present = "x_range")]
    pub x: Option<f64>,
    #[arg(long, default_value_t = exptaylor::series1d::DEFAULT_GRID)]
    pub grid: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RadiusArgs {
    #[arg(long = "fn", value_name = "EXPR")]
    pub function: String,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub lambda: Complex64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x0: f64,
    #[arg(long, default_value_t = 64)]
    pub j_max: usize,
    #[arg(long, default_value_t = 8)]
    pub window: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GrowthArgs {
    #[arg(long = "fn", value_name = "EXPR")]
    pub function: String,
    /// Period T; the expansion uses λ = 2πi / T.
    #[arg(long, default_value_t = 1.0)]
    pub period: f64,
    /// Largest operator order sampled.
    #[arg(long, default_value_t = 24)]
    pub order: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct NdArgs {
    #[arg(long = "fn", value_name = "EXPR")]
    pub function: String,
    #[arg(long)]
    pub dims: usize,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub lambda: Complex64,
    #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
    pub x0: Option<Point>,
    #[arg(long)]
    pub order: usize,
    /// Evaluation point for the partial sum and remainder bound.
    #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
    pub x: Option<Point>,
    /// Points per axis when sampling the box between x0 and x.
    #[arg(long, default_value_t = exptaylor::seriesnd::DEFAULT_GRID)]
    pub grid: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fail with exit code 3 unless |f(x) - sum| <= bound.
    #[arg(long, requires = "x")]
    pub check: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct IdentitiesArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    /// Tolerance override `name=value`; repeatable.
    #[arg(long = "tol", value_parser = parse_tolerance)]
    pub tolerances: Vec<(String, f64)>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Cosine,
    Linear,
    Log,
    Stirling,
}

impl Suite {
    pub fn prefix(self) -> &'static str {
        match self {
            Suite::All => "",
            Suite::Cosine => "cosine_",
            Suite::Linear => "linear_",
            Suite::Log => "log_",
            Suite::Stirling => "stirling_",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XRange {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl XRange {
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let t = i as f64 / last;
                self.lo * (1.0 - t) + self.hi * t
            })
            .collect()
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("invalid number `{s}`"))?;
    if !v.is_finite() {
        return Err(format!("non-finite number `{s}`"));
    }
    Ok(v)
}

/// Accepts `a`, `bi`, `a+bi` and `a-bi` with optional exponents.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("invalid complex literal `{s}` (expected a+bi or a-bi)");
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(parse_f64(&t).map_err(|_| bad())?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |txt: &str| -> Result<f64, String> {
        match txt {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => parse_f64(txt).map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => Ok(Complex64::new(parse_f64(&body[..k]).map_err(|_| bad())?, imag(&body[k..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

/// Comma-separated coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(pub Vec<f64>);

pub fn parse_vector(s: &str) -> Result<Point, String> {
    s.split(',').map(parse_f64).collect::<Result<_, _>>().map(Point)
}

pub fn parse_x_range(s: &str) -> Result<XRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, steps] = parts.as_slice() else {
        return Err(format!("expected lo:hi:steps, got `{s}`"));
    };
    let steps: usize = steps.trim().parse().map_err(|_| format!("invalid step count `{steps}`"))?;
    if steps == 0 {
        return Err("steps must be at least 1".into());
    }
    Ok(XRange { lo: parse_f64(lo)?, hi: parse_f64(hi)?, steps })
}

pub fn parse_n_range(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got `{s}`"))?;
    let lo: usize = lo.trim().parse().map_err(|_| format!("invalid order `{lo}`"))?;
    let hi: usize = hi.trim().parse().map_err(|_| format!("invalid order `{hi}`"))?;
    if lo == 0 || lo > hi {
        return Err(format!("need 1 <= lo <= hi, got {lo}:{hi}"));
    }
    Ok((lo, hi))
}

pub fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.rsplit_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let v = parse_f64(value)?;
    if v < 0.0 {
        return Err("tolerance must be non-negative".into());
    }
    Ok((name.trim().to_owned(), v))
}
