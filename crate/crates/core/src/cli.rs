//! The `hadlyap` command line.

use std::ffi::OsString;
use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bounds::{nonexistence_check, LyapunovReport, DEFAULT_TOL};
use crate::coefficient::{Coefficient, Table};
use crate::error::Error;
use crate::fredholm::{min_eigenvalue_modulus, EigenMethod};
use crate::green::{green_eval, green_max, write_grid_csv};
use crate::params::{validate, FracParams};
use crate::report::{parse_real, GreenPoint, GridFile, Payload, RunReport};
use crate::selftest::{self, DEFAULT_SEED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SELFTEST: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;

fn real(s: &str) -> Result<f64, String> {
    parse_real(s).map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "hadlyap",
    version,
    about = "Lyapunov-type bounds for two-order Hadamard fractional boundary value problems",
    after_help = "Reals are plain decimals with an optional exponent (2.718281828459045, 1e-3); \
                  names such as `e` are not accepted.\n\
                  Coefficient expressions use the variable t, numbers, + - * / ^, parentheses \
                  and ln, exp, sin, cos, abs, sqrt. ^ is right-associative and binds tighter \
                  than unary minus. Tables are CSV files with header `t,q`."
)]
pub struct Cli {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Absolute tolerance for the integral of |q|.
    #[arg(long, global = true, value_parser = real)]
    tol: Option<f64>,
    /// Seed for the randomized checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ParamArgs {
    #[arg(long, value_parser = real, allow_hyphen_values = true)]
    sigma: f64,
    #[arg(long, value_parser = real, allow_hyphen_values = true)]
    kappa: f64,
    #[arg(long, value_parser = real, allow_hyphen_values = true)]
    t1: f64,
    #[arg(long, value_parser = real, allow_hyphen_values = true)]
    t2: f64,
}

impl ParamArgs {
    fn validate(&self) -> Result<FracParams, Error> {
        validate(self.sigma, self.kappa, self.t1, self.t2)
    }
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct CoefficientArgs {
    /// Constant coefficient.
    #[arg(long, value_parser = real, allow_hyphen_values = true)]
    q_const: Option<f64>,
    /// Coefficient expression in t, e.g. "ln(t)".
    #[arg(long, allow_hyphen_values = true)]
    q_expr: Option<String>,
    /// CSV table with header `t,q`, interpolated linearly in ln t.
    #[arg(long)]
    q_table: Option<PathBuf>,
}

impl CoefficientArgs {
    fn load(&self) -> Result<Coefficient, Error> {
        if let Some(c) = self.q_const {
            return Ok(Coefficient::Constant(c));
        }
        if let Some(src) = &self.q_expr {
            return Coefficient::parse(src);
        }
        let path = self
            .q_table
            .as_ref()
            .expect("clap enforces one coefficient source");
        let file =
            File::open(path).map_err(|e| Error::Table(format!("{}: {e}", path.display())))?;
        Ok(Coefficient::Table(Table::from_csv(file)?))
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lyapunov bound, eigenvalue threshold and the kernel maximum.
    Bound(ParamArgs),
    /// Nonexistence test for a given coefficient q.
    Check {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        q: CoefficientArgs,
    },
    /// Green's function: point values, maximum, or a CSV grid.
    Green {
        #[command(subcommand)]
        action: GreenCommand,
    },
    /// Nyström estimate of the smallest |lambda| against the threshold.
    Eigen {
        #[command(flatten)]
        params: ParamArgs,
        /// Mesh size (at least 32).
        #[arg(long, default_value_t = 400)]
        n: usize,
    },
    /// Run the embedded acceptance suite.
    Selftest {
        /// Only run criteria of this group (green, bounds, fredholm, hadamard, parser) or id.
        #[arg(long)]
        filter: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
enum GreenCommand {
    /// G(t, s) at one point.
    Eval {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_parser = real, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, value_parser = real, allow_hyphen_values = true)]
        s: f64,
    },
    /// Closed-form maximum of |G|.
    Max(ParamArgs),
    /// Write G on an n x n log-uniform grid as CSV `t,s,G`.
    Grid {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::QuadratureFailure { .. }
        | Error::ConvergenceFailure { .. }
        | Error::DifferenceInstability { .. } => EXIT_NUMERIC,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Reports go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok((report, code)) => {
            let text = if cli.json {
                report.to_json() + "\n"
            } else {
                render_text(&report)
            };
            if out.write_all(text.as_bytes()).is_err() {
                return EXIT_NUMERIC;
            }
            for w in &report.warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli) -> Result<(RunReport, i32), Error> {
    match &cli.command {
        Command::Bound(a) => {
            let p = a.validate()?;
            Ok((
                RunReport::new("bound", Some(p), Payload::Lyapunov(LyapunovReport::new(&p))),
                EXIT_OK,
            ))
        }
        Command::Check { params, q } => {
            let p = params.validate()?;
            let coef = q.load()?;
            let tol = cli.tol.unwrap_or(DEFAULT_TOL);
            let verdict = nonexistence_check(&p, &coef, tol)?;
            let mut report = RunReport::new(
                "check",
                Some(p),
                Payload::Lyapunov(LyapunovReport::new(&p).with_verdict(verdict)),
            );
            if (verdict.q_integral - verdict.bound).abs() <= tol {
                report
                    .warnings
                    .push("the integral is within tolerance of the bound; the verdict is sensitive to quadrature error".into());
            }
            Ok((report, EXIT_OK))
        }
        Command::Green { action } => match action {
            GreenCommand::Eval { params, t, s } => {
                let p = params.validate()?;
                let g = green_eval(&p, *t, *s)?;
                let payload = Payload::GreenPoint(GreenPoint { t: *t, s: *s, g });
                Ok((RunReport::new("green eval", Some(p), payload), EXIT_OK))
            }
            GreenCommand::Max(a) => {
                let p = a.validate()?;
                Ok((
                    RunReport::new("green max", Some(p), Payload::GreenMax(green_max(&p))),
                    EXIT_OK,
                ))
            }
            GreenCommand::Grid { params, n, out } => {
                let p = params.validate()?;
                let file = File::create(out).map_err(|e| {
                    Error::DomainInvalid(format!("cannot create {}: {e}", out.display()))
                })?;
                let rows = write_grid_csv(&p, *n, file)?;
                let payload = Payload::Grid(GridFile {
                    path: out.display().to_string(),
                    rows,
                });
                Ok((RunReport::new("green grid", Some(p), payload), EXIT_OK))
            }
        },
        Command::Eigen { params, n } => {
            let p = params.validate()?;
            let r = min_eigenvalue_modulus(&p, *n)?;
            let code = if r.satisfied { EXIT_OK } else { EXIT_VIOLATION };
            let mut warnings = Vec::new();
            if r.method == EigenMethod::Subspace && r.dominant_im != 0.0 {
                warnings.push(
                    "the dominant eigenvalue is a complex pair; its modulus is reported"
                        .to_string(),
                );
            }
            if !r.satisfied {
                warnings.push(format!(
                    "lambda_min = {} is below the threshold {}",
                    r.lambda_min, r.analytic_bound
                ));
            }
            let mut report = RunReport::new("eigen", Some(p), Payload::Nystrom(r));
            report.warnings = warnings;
            Ok((report, code))
        }
        Command::Selftest { filter } => {
            let results = selftest::run(filter.as_deref(), cli.seed.unwrap_or(DEFAULT_SEED));
            let code = if results.iter().all(|r| r.passed) {
                EXIT_OK
            } else {
                EXIT_SELFTEST
            };
            Ok((
                RunReport::new("selftest", None, Payload::Selftest { results }),
                code,
            ))
        }
    }
}

fn render_text(report: &RunReport) -> String {
    let mut s = String::new();
    let mut line = |k: &str, v: String| s.push_str(&format!("{k:<32}{v}\n"));
    if let Some(p) = &report.params {
        line("sigma", p.sigma().to_string());
        line("kappa", p.kappa().to_string());
        line("t1", p.t1().to_string());
        line("t2", p.t2().to_string());
    }
    match &report.payload {
        Payload::Lyapunov(r) => {
            line("Delta", r.kernel.delta.to_string());
            line("x2", r.kernel.x2.to_string());
            line("Omega", r.kernel.omega.to_string());
            line("Mho", r.kernel.mho.to_string());
            line("Gamma(sigma-kappa)", r.gamma_sk.to_string());
            line("bound", r.bound.to_string());
            line("eigen_bound", r.eigen_bound.to_string());
            line("constant_q_bound", r.constant_q_bound.to_string());
            if let Some(v) = &r.verdict {
                line("q_integral", v.q_integral.to_string());
                line("verdict", format!("{:?}", v.kind));
            }
        }
        Payload::GreenMax(g) => {
            line("Delta", g.delta.to_string());
            line("x2", g.x2.to_string());
            line("t_star", g.t_star.to_string());
            line("t_hat", g.t_hat.to_string());
            line("Omega", g.omega.to_string());
            line("Mho", g.mho.to_string());
            line("max_abs_g", g.max_abs_g.to_string());
            line("branch", format!("{:?}", g.branch));
        }
        Payload::GreenPoint(g) => {
            line("t", g.t.to_string());
            line("s", g.s.to_string());
            line("G", g.g.to_string());
        }
        Payload::Grid(g) => {
            line("path", g.path.clone());
            line("rows", g.rows.to_string());
        }
        Payload::Nystrom(r) => {
            line("n", r.n.to_string());
            line("dominant_mu", r.dominant_mu.to_string());
            line(
                "dominant",
                format!("{} {:+}i", r.dominant_re, r.dominant_im),
            );
            line("lambda_min", r.lambda_min.to_string());
            line("analytic_bound", r.analytic_bound.to_string());
            line("satisfied", r.satisfied.to_string());
            line("constant_q_bound", r.constant_q_bound.to_string());
            line("constant_q_satisfied", r.constant_q_satisfied.to_string());
            line(
                "eigenvector_boundary_residual",
                r.eigenvector_boundary_residual.to_string(),
            );
            line(
                "method",
                format!("{:?} ({} iterations)", r.method, r.iterations),
            );
        }
        Payload::Selftest { results } => {
            for r in results {
                let status = if r.passed { "PASS" } else { "FAIL" };
                s.push_str(&format!(
                    "{status}  {:<3} {:<9} {:<36} {:>10.1} ms  {}\n",
                    r.id, r.group, r.title, r.millis, r.detail
                ));
            }
        }
    }
    s
}
