//! The `leroy` command-line front end.
//!
//! Every subcommand produces one [`Table`] with a fixed header, written as
//! CSV (default) or JSON to standard output. `--plot PATH` additionally
//! writes an SVG line chart of two of the table's columns.
//!
//! Exit codes: 0 success, 2 usage or domain error, 3 numerical failure.
//! Failures print a single `ERROR <CODE>: message` line to standard error.

pub mod svg;
pub mod table;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::Float;

use crate::boundary::trace_curve;
use crate::classifier::{classify, gamma_ratio_cm_check, GammaRatioParams};
use crate::criterion::{criterion_analyze, g_eval, levy_exponent_quadrature, Argmax};
use crate::error::Error;
use crate::hankel::{hankel_test, HankelFamily};
use crate::params::Params;
use crate::precision::{format_sig, format_sig_f64, PrecisionContext};
use crate::series::{leroy_derivative, ln_mellin_closed_form, moment};

pub use table::{Cell, Table};

/// Agreement required between the two sides in `verify-levy`.
pub const LEVY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "leroy", version, about = "Le Roy-type Mittag-Leffler functions: evaluation and complete monotonicity")]
pub struct Cli {
    /// Output table format.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,

    /// Also write an SVG line chart to this path.
    #[arg(long, global = true, value_name = "PATH")]
    pub plot: Option<PathBuf>,

    /// Significant decimal digits (at least 16).
    #[arg(long, global = true, env = "LEROY_PRECISION", default_value_t = PrecisionContext::DEFAULT_DIGITS)]
    pub digits: u32,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Args)]
#[command(allow_negative_numbers = true)]
pub struct Triple {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub gamma: f64,
}

impl Triple {
    fn params(&self) -> Result<Params, Error> {
        Params::new(self.alpha, self.beta, self.gamma)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// F(z) or its k-th derivative at one or more real z.
    #[command(allow_negative_numbers = true)]
    Eval {
        #[command(flatten)]
        triple: Triple,
        #[arg(long, required = true, num_args = 1.., action = clap::ArgAction::Append)]
        z: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        order: u32,
    },
    /// CM verdict with the deciding clause.
    #[command(allow_negative_numbers = true)]
    Classify {
        #[command(flatten)]
        triple: Triple,
    },
    /// Analysis of g(z) = z + γ(z^(β-α) - z^β) on (0,1).
    #[command(allow_negative_numbers = true)]
    Criterion {
        #[command(flatten)]
        triple: Triple,
        /// Number of z samples in the plotted g profile.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Moments E[X^n] = n! (Γ(β)/Γ(β+αn))^γ for n = 0..=n_max.
    #[command(allow_negative_numbers = true)]
    Moments {
        #[command(flatten)]
        triple: Triple,
        #[arg(long, default_value_t = 10)]
        n_max: u64,
    },
    /// Hankel determinants of the moment sequence.
    #[command(allow_negative_numbers = true)]
    Hankel {
        #[command(flatten)]
        triple: Triple,
        #[arg(long, default_value_t = 6)]
        order: u32,
    },
    /// Boundary curve β(α) for fixed γ > 1.
    #[command(allow_negative_numbers = true)]
    Boundary {
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 16)]
        points: usize,
    },
    /// Lévy-Khintchine exponent by quadrature against ln E[X^s].
    #[command(allow_negative_numbers = true)]
    VerifyLevy {
        #[command(flatten)]
        triple: Triple,
        #[arg(long, num_args = 1.., action = clap::ArgAction::Append, default_values_t = [0.5, 1.0, 2.5, 5.0])]
        s: Vec<f64>,
    },
    /// The CM conditions for θ^-x Γ(Ax+a)^α' / Γ(Bx+b)^β'.
    #[command(allow_negative_numbers = true)]
    GammaRatio {
        #[arg(long = "A")]
        big_a: f64,
        #[arg(long = "a")]
        small_a: f64,
        #[arg(long = "B")]
        big_b: f64,
        #[arg(long = "b")]
        small_b: f64,
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        alpha_exp: f64,
        #[arg(long)]
        beta_exp: f64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Eval { .. } => "eval",
            Command::Classify { .. } => "classify",
            Command::Criterion { .. } => "criterion",
            Command::Moments { .. } => "moments",
            Command::Hankel { .. } => "hankel",
            Command::Boundary { .. } => "boundary",
            Command::VerifyLevy { .. } => "verify-levy",
            Command::GammaRatio { .. } => "gamma-ratio",
        }
    }
}

/// A table plus optional chart data and a summary line for stderr.
#[derive(Debug, Clone)]
pub struct Output {
    pub table: Table,
    pub chart: Option<Chart>,
    pub summary: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Chart {
    pub title: String,
    pub x_label: &'static str,
    pub y_label: &'static str,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T, W, E>(args: I, out: &mut W, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(err, "{}", e.render());
                    2
                }
                _ => {
                    let msg = e.to_string();
                    let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
                    let _ = writeln!(err, "ERROR USAGE: {first}");
                    2
                }
            };
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "ERROR USAGE: {m}");
            2
        }
        Err(Failure::Io(m)) => {
            let _ = writeln!(err, "ERROR IO: {m}");
            2
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "ERROR {}: {}", e.code(), e);
            if e.is_numerical() {
                3
            } else {
                2
            }
        }
    }
}

fn execute<W: Write, E: Write>(cli: &Cli, out: &mut W, err: &mut E) -> Result<(), Failure> {
    if cli.digits < PrecisionContext::MIN_DIGITS {
        return Err(Failure::Usage(format!(
            "--digits must be at least {}, got {}",
            PrecisionContext::MIN_DIGITS,
            cli.digits
        )));
    }
    if cli.plot.is_some() && matches!(cli.command, Command::Classify { .. } | Command::GammaRatio { .. }) {
        return Err(Failure::Usage(format!("--plot is not supported by {}", cli.command.name())));
    }
    let ctx = PrecisionContext::new(cli.digits)?;
    let output = compute(&cli.command, &ctx)?;
    if let (Some(path), Some(chart)) = (&cli.plot, &output.chart) {
        let svg = svg::line_chart(&chart.title, chart.x_label, chart.y_label, &chart.points);
        std::fs::write(path, svg).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    }
    let written = match cli.format {
        Format::Csv => output.table.write_csv(out),
        Format::Json => output.table.write_json(out, ctx.decimal_digits()),
    };
    written.map_err(|e| Failure::Io(e.to_string()))?;
    if let Some(s) = &output.summary {
        let _ = writeln!(err, "{s}");
    }
    Ok(())
}

fn mp(x: &Float, ctx: &PrecisionContext) -> Cell {
    Cell::Num(format_sig(x, ctx.decimal_digits() as usize))
}

fn num(x: f64, ctx: &PrecisionContext) -> Cell {
    Cell::Num(format_sig_f64(x, ctx.decimal_digits().min(17) as usize))
}

/// Inputs are echoed as given (shortest round-trip form).
fn echo(x: f64) -> Cell {
    Cell::Num(format!("{x}"))
}

fn list(xs: &[f64], ctx: &PrecisionContext) -> Cell {
    let sig = ctx.decimal_digits().min(17) as usize;
    Cell::List(xs.iter().map(|x| format_sig_f64(*x, sig)).collect())
}

/// Runs one subcommand without touching any stream.
pub fn compute(cmd: &Command, ctx: &PrecisionContext) -> Result<Output, Error> {
    match cmd {
        Command::Eval { triple, z, order } => eval(triple, z, *order, ctx),
        Command::Classify { triple } => classify_cmd(triple, ctx),
        Command::Criterion { triple, samples } => criterion_cmd(triple, *samples, ctx),
        Command::Moments { triple, n_max } => moments_cmd(triple, *n_max, ctx),
        Command::Hankel { triple, order } => hankel_cmd(triple, *order, ctx),
        Command::Boundary { gamma, points } => boundary_cmd(*gamma, *points, ctx),
        Command::VerifyLevy { triple, s } => levy_cmd(triple, s, ctx),
        Command::GammaRatio {
            big_a,
            small_a,
            big_b,
            small_b,
            theta,
            alpha_exp,
            beta_exp,
        } => {
            let p = GammaRatioParams::new(*big_a, *small_a, *big_b, *small_b, *theta, *alpha_exp, *beta_exp)?;
            gamma_ratio_cmd(&p)
        }
    }
}

fn triple_cells(t: &Triple) -> Vec<Cell> {
    vec![echo(t.alpha), echo(t.beta), echo(t.gamma)]
}

fn eval(t: &Triple, zs: &[f64], order: u32, ctx: &PrecisionContext) -> Result<Output, Error> {
    let params = t.params()?;
    let mut table = Table::new(
        "eval",
        &["alpha", "beta", "gamma", "z", "order", "value", "tail_bound", "terms_used", "digits_used"],
    );
    let mut points = Vec::new();
    for &z in zs {
        let r = leroy_derivative(&params, z, order, ctx)?;
        points.push((z, r.value.to_f64()));
        let mut row = triple_cells(t);
        row.extend([
            echo(z),
            Cell::Int(order as i64),
            mp(&r.value, ctx),
            Cell::Num(format_sig(&r.tail_bound, 3)),
            Cell::Int(r.terms_used as i64),
            Cell::Int(r.digits_used as i64),
        ]);
        table.push(row);
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(Output {
        table,
        chart: Some(Chart {
            title: format!("F^({order})(z), alpha={}, beta={}, gamma={}", t.alpha, t.beta, t.gamma),
            x_label: "z",
            y_label: "value",
            points,
        }),
        summary: None,
    })
}

fn classify_cmd(t: &Triple, ctx: &PrecisionContext) -> Result<Output, Error> {
    let v = classify(&t.params()?, ctx);
    let mut table = Table::new("classify", &["alpha", "beta", "gamma", "status", "clause", "detail"]);
    let mut row = triple_cells(t);
    row.extend([
        Cell::Text(v.status.as_str().into()),
        Cell::Text(v.clause.as_str().into()),
        Cell::Text(v.detail),
    ]);
    table.push(row);
    Ok(Output {
        table,
        chart: None,
        summary: None,
    })
}

fn criterion_cmd(t: &Triple, samples: usize, ctx: &PrecisionContext) -> Result<Output, Error> {
    let params = t.params()?;
    if samples < 2 {
        return Err(Error::Precondition(format!("--samples must be at least 2, got {samples}")));
    }
    let r = criterion_analyze(&params, ctx);
    let mut table = Table::new(
        "criterion",
        &[
            "alpha",
            "beta",
            "gamma",
            "holds",
            "marginal",
            "sup_g",
            "argmax",
            "pattern",
            "sign_changes",
            "critical_points",
            "zero_limit_phi",
        ],
    );
    let argmax = match r.argmax {
        Argmax::Interior(z) => num(z, ctx),
        Argmax::LowerEnd => Cell::Text("0+".into()),
        Argmax::UpperEnd => Cell::Text("1-".into()),
    };
    let zl = match r.zero_limit_phi {
        crate::criterion::ZeroLimit::Finite(v) => num(v, ctx),
        other => Cell::Text(other.to_string()),
    };
    let mut row = triple_cells(t);
    row.extend([
        Cell::Bool(r.holds),
        Cell::Bool(r.marginal),
        mp(&r.sup_g, ctx),
        argmax,
        Cell::Text(r.pattern.as_str().into()),
        list(&r.sign_changes, ctx),
        list(&r.critical_points, ctx),
        zl,
    ]);
    table.push(row);
    let mut points = Vec::with_capacity(samples);
    for i in 1..=samples {
        let z = i as f64 / (samples + 1) as f64;
        points.push((z, g_eval(&params, z, ctx)?.to_f64()));
    }
    Ok(Output {
        table,
        chart: Some(Chart {
            title: format!("g(z), alpha={}, beta={}, gamma={}", t.alpha, t.beta, t.gamma),
            x_label: "z",
            y_label: "g(z)",
            points,
        }),
        summary: None,
    })
}

fn moments_cmd(t: &Triple, n_max: u64, ctx: &PrecisionContext) -> Result<Output, Error> {
    let params = t.params()?;
    let ms: Vec<_> = (0..=n_max).map(|n| moment(&params, n, ctx)).collect();
    let mut table = Table::new("moments", &["n", "moment", "ln_moment", "log_second_difference"]);
    let mut points = Vec::new();
    for (n, m) in ms.iter().enumerate() {
        let d2 = if n >= 1 && n < ms.len() - 1 {
            let mut d = Float::with_val(ctx.bits(), &ms[n - 1].ln_value + &ms[n + 1].ln_value);
            d -= Float::with_val(ctx.bits(), &m.ln_value * 2u32);
            mp(&d, ctx)
        } else {
            Cell::Empty
        };
        points.push((n as f64, m.ln_value.to_f64()));
        table.push(vec![Cell::Int(n as i64), mp(&m.value, ctx), mp(&m.ln_value, ctx), d2]);
    }
    Ok(Output {
        table,
        chart: Some(Chart {
            title: format!("ln E[X^n], alpha={}, beta={}, gamma={}", t.alpha, t.beta, t.gamma),
            x_label: "n",
            y_label: "ln moment",
            points,
        }),
        summary: None,
    })
}

fn hankel_cmd(t: &Triple, order: u32, ctx: &PrecisionContext) -> Result<Output, Error> {
    let r = hankel_test(&t.params()?, order, ctx)?;
    let mut table = Table::new("hankel", &["family", "k", "determinant", "tolerance", "nonnegative"]);
    let mut points = Vec::new();
    for (family, dets, tols) in [
        (HankelFamily::H0, &r.det_h0, &r.tol_h0),
        (HankelFamily::H1, &r.det_h1, &r.tol_h1),
    ] {
        for (k, (d, tol)) in dets.iter().zip(tols).enumerate() {
            let ok = Float::with_val(d.prec(), d + tol) >= 0;
            if family == HankelFamily::H0 {
                points.push((k as f64, d.to_f64()));
            }
            table.push(vec![
                Cell::Text(family.as_str().into()),
                Cell::Int(k as i64),
                mp(d, ctx),
                Cell::Num(format_sig(tol, 3)),
                Cell::Bool(ok),
            ]);
        }
    }
    let violation = match r.first_violation {
        Some(v) => format!("{}[{}]", v.family.as_str(), v.k),
        None => "none".into(),
    };
    Ok(Output {
        table,
        chart: Some(Chart {
            title: format!("H0 determinants, alpha={}, beta={}, gamma={}", t.alpha, t.beta, t.gamma),
            x_label: "k",
            y_label: "det",
            points,
        }),
        summary: Some(format!(
            "hankel: all_nonnegative={} first_violation={} digits_used={}",
            r.all_nonnegative, violation, r.digits_used
        )),
    })
}

fn boundary_cmd(gamma: f64, n_points: usize, ctx: &PrecisionContext) -> Result<Output, Error> {
    let c = trace_curve(gamma, n_points, ctx)?;
    let ratios = c.ratios();
    let mut table = Table::new("boundary", &["alpha", "beta", "ratio"]);
    let mut bracket_ok = true;
    for ((a, b), q) in c.alphas.iter().zip(&c.betas).zip(&ratios) {
        bracket_ok &= *a < *b && *b < 0.5 * a * (1.0 + gamma);
        table.push(vec![num(*a, ctx), num(*b, ctx), num(*q, ctx)]);
    }
    Ok(Output {
        table,
        chart: Some(Chart {
            title: format!("beta(alpha), gamma={gamma}"),
            x_label: "alpha",
            y_label: "beta",
            points: c.alphas.iter().copied().zip(c.betas.iter().copied()).collect(),
        }),
        summary: Some(format!(
            "boundary: gamma={gamma} points={n_points} bracket_ok={bracket_ok} ratio_monotone={} convexity_violations={}",
            c.ratio_monotone,
            c.convexity_violations.len()
        )),
    })
}

fn levy_cmd(t: &Triple, ss: &[f64], ctx: &PrecisionContext) -> Result<Output, Error> {
    let params = t.params()?;
    let mut table = Table::new(
        "verify-levy",
        &["s", "quadrature", "closed_form", "difference", "error_estimate", "within_tolerance"],
    );
    let mut points = Vec::new();
    for &s in ss {
        let q = levy_exponent_quadrature(&params, s, ctx)?;
        let cf = ln_mellin_closed_form(&params, s, ctx)?.to_f64();
        let diff = q.value - cf;
        points.push((s, q.value));
        table.push(vec![
            echo(s),
            num(q.value, ctx),
            num(cf, ctx),
            num(diff, ctx),
            num(q.error, ctx),
            Cell::Bool(diff.abs() <= LEVY_TOLERANCE),
        ]);
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(Output {
        table,
        chart: Some(Chart {
            title: format!("Levy exponent, alpha={}, beta={}, gamma={}", t.alpha, t.beta, t.gamma),
            x_label: "s",
            y_label: "exponent",
            points,
        }),
        summary: None,
    })
}

fn gamma_ratio_cmd(p: &GammaRatioParams) -> Result<Output, Error> {
    let c = gamma_ratio_cm_check(p);
    let mut table = Table::new(
        "gamma-ratio",
        &["A", "a", "B", "b", "theta", "alpha_exp", "beta_exp", "balance", "shift", "scale", "half_shift", "holds"],
    );
    table.push(vec![
        echo(p.A),
        echo(p.a),
        echo(p.B),
        echo(p.b),
        echo(p.theta),
        echo(p.alpha_exp),
        echo(p.beta_exp),
        Cell::Bool(c.balance),
        Cell::Bool(c.shift),
        Cell::Bool(c.scale),
        Cell::Bool(c.half_shift),
        Cell::Bool(c.holds),
    ]);
    Ok(Output {
        table,
        chart: None,
        summary: None,
    })
}
