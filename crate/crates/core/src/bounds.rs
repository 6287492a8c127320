//! Lyapunov-type bound `int |q| >= Gamma(sigma-kappa) / max(Omega, Mho)` and
//! the nonexistence tests derived from it.

use serde::{Deserialize, Serialize};

use crate::coefficient::Coefficient;
use crate::error::{Error, Result};
use crate::green::{green_max, mho, omega, GreenMaxReport};
use crate::params::{FracParams, Verdict};
use crate::quadrature::{adaptive, DEFAULT_MAX_INTERVALS};
use crate::special::gamma_pos;

/// Default absolute tolerance for `int |q|`.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovReport {
    pub gamma_sk: f64,
    pub bound: f64,
    /// `bound * (t2 - t1)`, the published threshold for `|lambda|`.
    pub eigen_bound: f64,
    /// `bound / (t2 - t1)`, the threshold that follows from the bound for a
    /// constant coefficient.
    pub constant_q_bound: f64,
    pub q_integral: Option<f64>,
    pub verdict: Option<Verdict>,
    pub kernel: GreenMaxReport,
}

impl LyapunovReport {
    pub fn new(p: &FracParams) -> Self {
        LyapunovReport {
            gamma_sk: gamma_pos(p.sigma() - p.kappa()),
            bound: lyapunov_bound(p),
            eigen_bound: eigenvalue_bound(p),
            constant_q_bound: constant_q_bound(p),
            q_integral: None,
            verdict: None,
            kernel: green_max(p),
        }
    }

    pub fn with_verdict(mut self, verdict: Verdict) -> Self {
        self.q_integral = Some(verdict.q_integral);
        self.verdict = Some(verdict);
        self
    }
}

pub fn lyapunov_bound(p: &FracParams) -> f64 {
    gamma_pos(p.sigma() - p.kappa()) / omega(p).max(mho(p))
}

/// `lyapunov_bound * (t2 - t1)`.
pub fn eigenvalue_bound(p: &FracParams) -> f64 {
    lyapunov_bound(p) * (p.t2() - p.t1())
}

/// Lower bound on `|lambda|` for `q = lambda` constant: `int |q| = |lambda| (t2 - t1)`
/// must reach `lyapunov_bound`, so `|lambda| >= lyapunov_bound / (t2 - t1)`.
pub fn constant_q_bound(p: &FracParams) -> f64 {
    lyapunov_bound(p) / (p.t2() - p.t1())
}

/// Compares `int_{t1}^{t2} |q|` with the bound. Equality is inconclusive.
pub fn nonexistence_check(p: &FracParams, q: &Coefficient, tol: f64) -> Result<Verdict> {
    let integral = integrate_abs_q(q, p.t1(), p.t2(), tol)?;
    Ok(Verdict::from_comparison(integral, lyapunov_bound(p)))
}

/// Constant coefficient `q = lambda`: rules out solutions iff
/// `|lambda| < eigenvalue_bound`.
pub fn lambda_nonexistence_check(p: &FracParams, lambda: f64) -> Result<Verdict> {
    if lambda == 0.0 {
        return Err(Error::ZeroLambda);
    }
    if !lambda.is_finite() {
        return Err(Error::DomainInvalid(format!(
            "lambda must be finite, got {lambda}"
        )));
    }
    Ok(Verdict::from_comparison(lambda.abs(), eigenvalue_bound(p)))
}

const SIGN_SAMPLES: usize = 64;

fn bisect_root<F>(f: &F, mut a: f64, mut b: f64, mut fa: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    while b - a > 1e-12 * a.abs().max(1.0) {
        let m = 0.5 * (a + b);
        if !(m > a && m < b) {
            break;
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// `int_{t1}^{t2} |q(t)| dt` to absolute tolerance `tol`.
///
/// The kinks of `|q|` are located first: table knots are taken as given, and
/// sign changes seen on a sampling grid are bisected down to `1e-12`. Each
/// smooth piece then gets its share of `tol` in proportion to its length.
pub fn integrate_abs_q(q: &Coefficient, t1: f64, t2: f64, tol: f64) -> Result<f64> {
    if !(t1.is_finite() && t2.is_finite() && t1 < t2) {
        return Err(Error::DomainInvalid(format!(
            "need t1 < t2, got [{t1}, {t2}]"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::DomainInvalid(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if let Coefficient::Constant(c) = q {
        return Ok(c.abs() * (t2 - t1));
    }
    let f = |t: f64| q.eval(t);

    let mut knots = vec![t1];
    knots.extend(
        q.breakpoints()
            .iter()
            .copied()
            .filter(|&k| k > t1 && k < t2),
    );
    knots.push(t2);

    let mut breaks = vec![t1];
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let step = (b - a) / SIGN_SAMPLES as f64;
        let mut prev_t = a;
        let mut prev_v = f(a)?;
        for k in 1..=SIGN_SAMPLES {
            let t = if k == SIGN_SAMPLES {
                b
            } else {
                a + k as f64 * step
            };
            let v = f(t)?;
            if prev_v != 0.0 && v != 0.0 && (prev_v < 0.0) != (v < 0.0) {
                breaks.push(bisect_root(&f, prev_t, t, prev_v)?);
            }
            prev_t = t;
            prev_v = v;
        }
        breaks.push(b);
    }
    breaks.dedup();

    let width = t2 - t1;
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let share = (tol * (b - a) / width).max(f64::MIN_POSITIVE);
        let piece = adaptive(|t| Ok(f(t)?.abs()), a, b, share, DEFAULT_MAX_INTERVALS).map_err(
            |e| match e {
                Error::QuadratureFailure {
                    estimate, error, ..
                } => Error::QuadratureFailure {
                    estimate,
                    error,
                    tol,
                },
                other => other,
            },
        )?;
        total += piece.value;
    }
    Ok(total)
}

/// Single-derivative (`kappa = 0`) bound
/// `Gamma(sigma) rho (ln(rho/t1) ln(t2/rho) / L)^(1-sigma)` with
/// `rho = exp((2(sigma-1) + ln(t1 t2) - sqrt(4(sigma-1)^2 + L^2)) / 2)`.
pub fn reference_bound_kappa0(sigma: f64, t1: f64, t2: f64) -> Result<f64> {
    if !(sigma > 1.0 && sigma <= 2.0) {
        return Err(Error::OrderOutOfRange(format!(
            "sigma must lie in (1, 2], got {sigma}"
        )));
    }
    if !(t1 > 0.0 && t1 < t2 && t2.is_finite()) {
        return Err(Error::DomainInvalid(format!(
            "need 0 < t1 < t2, got [{t1}, {t2}]"
        )));
    }
    let (rho, l) = kappa0_rho(sigma, t1, t2);
    let inner = (rho / t1).ln() * (t2 / rho).ln() / l;
    Ok(gamma_pos(sigma) * rho * inner.powf(1.0 - sigma))
}

fn kappa0_rho(sigma: f64, t1: f64, t2: f64) -> (f64, f64) {
    let l = (t2 / t1).ln();
    let a = sigma - 1.0;
    let exponent = 0.5 * (2.0 * a + (t1 * t2).ln() - (4.0 * a * a + l * l).sqrt());
    (exponent.exp(), l)
}
