//! Left-sided Hadamard fractional integral and derivative, evaluated numerically,
//! and the analytic power rule used to check them.
//!
//! With `u = ln(s/t1)` and `U = ln(t/t1)` the integral becomes a
//! Riemann-Liouville integral in `u`:
//!
//! ```text
//! I^a f(t) = 1/Gamma(a) * int_0^U (U - u)^(a-1) f(t1 e^u) du
//! ```
//!
//! The range is split at `U/2`. The lower half is integrated directly on a
//! mesh graded toward `u = 0`, where `f` itself may be singular (e.g. powers of
//! `ln(s/t1)`). On the upper half the kernel singularity is removed with
//! `w = (U - u)^a`, giving `1/Gamma(a+1) * int_0^{(U/2)^a} f(t1 e^{U - w^{1/a}}) dw`,
//! again on a mesh graded toward `w = 0`.

use crate::coefficient::Coefficient;
use crate::error::{Error, Result};
use crate::quadrature::{graded_breakpoints, GaussLegendre};
use crate::special::{gamma_pos, recip_gamma};

/// Something that can be sampled at a point `t`.
pub trait RealFunction {
    fn value(&self, t: f64) -> Result<f64>;

    /// Value at `t = t1 exp(u)`. Functions that know their own log variable
    /// override this, so that `u` far below the resolution of `t` near `t1`
    /// is not lost.
    fn value_log(&self, t1: f64, u: f64) -> Result<f64> {
        self.value(t1 * u.exp())
    }
}

impl RealFunction for Coefficient {
    fn value(&self, t: f64) -> Result<f64> {
        self.eval(t)
    }
}

impl<F> RealFunction for F
where
    F: Fn(f64) -> Result<f64>,
{
    fn value(&self, t: f64) -> Result<f64> {
        self(t)
    }
}

/// A function given in terms of `u = ln(t / base)`, e.g. `u^(kappa-1)`.
pub struct LogFunction<F> {
    pub base: f64,
    pub f: F,
}

impl<F: Fn(f64) -> Result<f64>> LogFunction<F> {
    pub fn new(base: f64, f: F) -> Self {
        LogFunction { base, f }
    }
}

impl<F: Fn(f64) -> Result<f64>> RealFunction for LogFunction<F> {
    fn value(&self, t: f64) -> Result<f64> {
        (self.f)((t / self.base).ln())
    }

    fn value_log(&self, t1: f64, u: f64) -> Result<f64> {
        if t1 == self.base {
            (self.f)(u)
        } else {
            (self.f)(u + (t1 / self.base).ln())
        }
    }
}

/// Ratio between consecutive panels of the geometric refinement at the
/// singular end of each half-range.
const GEOMETRIC_RATIO: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Polynomially graded panels per half-range.
    pub panels: usize,
    /// Gauss-Legendre points per panel.
    pub order: usize,
    /// Grading exponent, `x_k = (k / panels)^grading`.
    pub grading: f64,
    /// Extra geometric subdivisions of the panel touching the singular end.
    pub endpoint_levels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            panels: 64,
            order: 8,
            grading: 2.0,
            endpoint_levels: 48,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.panels < 1 || self.order < 2 || !(self.grading >= 1.0) || !self.grading.is_finite()
        {
            return Err(Error::DomainInvalid(format!(
                "quadrature config needs panels >= 1, order >= 2, grading >= 1; got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerOp {
    Integral,
    Derivative,
}

struct Mesh {
    rule: GaussLegendre,
    breaks: Vec<f64>,
}

impl Mesh {
    fn new(cfg: &QuadratureConfig) -> Self {
        Mesh {
            rule: GaussLegendre::new(cfg.order),
            breaks: graded_breakpoints(
                cfg.panels,
                cfg.grading,
                cfg.endpoint_levels,
                GEOMETRIC_RATIO,
            ),
        }
    }

    /// `int_0^len h(z) dz` with panels clustered toward `z = 0`.
    fn integrate<H>(&self, len: f64, mut h: H) -> Result<f64>
    where
        H: FnMut(f64) -> Result<f64>,
    {
        let mut acc = 0.0;
        for w in self.breaks.windows(2) {
            acc += self.rule.integrate(w[0] * len, w[1] * len, &mut h)?;
        }
        Ok(acc)
    }
}

fn check_points(t1: f64, t: f64) -> Result<f64> {
    if !(t1 > 0.0 && t1.is_finite() && t.is_finite() && t >= t1) {
        return Err(Error::DomainInvalid(format!(
            "need 0 < t1 <= t, got t1 = {t1}, t = {t}"
        )));
    }
    Ok((t / t1).ln().max(0.0))
}

/// `I^order f` at log coordinate `big_u = ln(t/t1)`.
fn integral_log<F: RealFunction + ?Sized>(
    order: f64,
    f: &F,
    t1: f64,
    big_u: f64,
    mesh: &Mesh,
) -> Result<f64> {
    if order == 0.0 {
        return f.value_log(t1, big_u);
    }
    if big_u == 0.0 {
        return Ok(0.0);
    }
    let half = 0.5 * big_u;
    let lower = mesh.integrate(half, |u| {
        Ok((big_u - u).powf(order - 1.0) * f.value_log(t1, u)?)
    })?;
    let inv = 1.0 / order;
    let upper = mesh.integrate(half.powf(order), |w| {
        let v = w.powf(inv);
        f.value_log(t1, big_u - v)
    })?;
    let value = lower / gamma_pos(order) + upper / gamma_pos(order + 1.0);
    if !value.is_finite() {
        return Err(Error::QuadratureFailure {
            estimate: value,
            error: f64::INFINITY,
            tol: 0.0,
        });
    }
    Ok(value)
}

/// Left-sided Hadamard fractional integral `(I^order_{t1+} f)(t)`; order 0 is
/// the identity.
pub fn hadamard_integral<F: RealFunction + ?Sized>(
    order: f64,
    f: &F,
    t1: f64,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(order >= 0.0 && order.is_finite()) {
        return Err(Error::DomainInvalid(format!(
            "order must be >= 0, got {order}"
        )));
    }
    cfg.validate()?;
    let big_u = check_points(t1, t)?;
    integral_log(order, f, t1, big_u, &Mesh::new(cfg))
}

/// Relative step, in units of `ln(t/t1)`, for first and second differences.
const STEP_FIRST: f64 = 1e-3;
const STEP_SECOND: f64 = 1e-2;
/// Tolerated Richardson error estimate relative to `max(1, |value|)`.
const DIFF_TOL: f64 = 1e-4;

/// Left-sided Hadamard fractional derivative `delta^n I^(n - order) f` with
/// `n = ceil(order)` and `delta = t d/dt`, for `0 < order <= 2`.
///
/// `delta^n` is taken by centered differences in `ln t` with one Richardson
/// step; the difference between the two step sizes serves as error estimate.
pub fn hadamard_derivative<F: RealFunction + ?Sized>(
    order: f64,
    f: &F,
    t1: f64,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(order > 0.0 && order <= 2.0) {
        return Err(Error::DomainInvalid(format!(
            "derivative order must lie in (0, 2], got {order}"
        )));
    }
    cfg.validate()?;
    let big_u = check_points(t1, t)?;
    if big_u <= 0.0 {
        return Err(Error::DomainInvalid(format!(
            "derivative needs t > t1, got t = t1 = {t1}"
        )));
    }
    let n = order.ceil() as u32;
    let rem = n as f64 - order;
    let mesh = Mesh::new(cfg);
    let g = |x: f64| integral_log(rem, f, t1, x, &mesh);

    let (d_h, d_h2) = if n == 1 {
        let h = STEP_FIRST * big_u;
        let diff = |h: f64| -> Result<f64> { Ok((g(big_u + h)? - g(big_u - h)?) / (2.0 * h)) };
        (diff(h)?, diff(0.5 * h)?)
    } else {
        let h = STEP_SECOND * big_u;
        let g0 = g(big_u)?;
        let diff =
            |h: f64| -> Result<f64> { Ok((g(big_u + h)? - 2.0 * g0 + g(big_u - h)?) / (h * h)) };
        (diff(h)?, diff(0.5 * h)?)
    };
    let value = (4.0 * d_h2 - d_h) / 3.0;
    let error = (d_h2 - d_h).abs() / 3.0;
    if !value.is_finite() || error > DIFF_TOL * value.abs().max(1.0) {
        return Err(Error::DifferenceInstability { value, error });
    }
    Ok(value)
}

/// Power rule for `f(t) = ln(t/t1)^(kappa-1)`:
/// `I^order f = Gamma(kappa)/Gamma(kappa+order) ln(t/t1)^(kappa+order-1)` and
/// `D^order f = Gamma(kappa)/Gamma(kappa-order) ln(t/t1)^(kappa-order-1)`,
/// with `1/Gamma` at its poles taken as zero.
pub fn power_rule_reference(
    op: PowerOp,
    order: f64,
    exponent_kappa: f64,
    t1: f64,
    t: f64,
) -> Result<f64> {
    if !(order > 0.0 && exponent_kappa > 0.0 && order.is_finite() && exponent_kappa.is_finite()) {
        return Err(Error::DomainInvalid(format!(
            "power rule needs order > 0 and kappa > 0, got order = {order}, kappa = {exponent_kappa}"
        )));
    }
    let x = check_points(t1, t)?;
    let gk = gamma_pos(exponent_kappa);
    let (coef, power) = match op {
        PowerOp::Integral => (
            gk * recip_gamma(exponent_kappa + order),
            exponent_kappa + order - 1.0,
        ),
        PowerOp::Derivative => (
            gk * recip_gamma(exponent_kappa - order),
            exponent_kappa - order - 1.0,
        ),
    };
    if coef == 0.0 {
        return Ok(0.0);
    }
    Ok(coef * x.powf(power))
}

/// Returns `(I^sigma (I^kappa f)(t), I^(sigma+kappa) f(t))`.
pub fn composition_check<F: RealFunction + ?Sized>(
    sigma: f64,
    kappa: f64,
    f: &F,
    t1: f64,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    if !(sigma >= 0.0 && kappa >= 0.0) {
        return Err(Error::DomainInvalid(format!(
            "orders must be non-negative, got {sigma}, {kappa}"
        )));
    }
    cfg.validate()?;
    let big_u = check_points(t1, t)?;
    let mesh = Mesh::new(cfg);
    let inner = LogFunction::new(t1, |u: f64| integral_log(kappa, f, t1, u.max(0.0), &mesh));
    let nested = integral_log(sigma, &inner, t1, big_u, &mesh)?;
    let direct = integral_log(sigma + kappa, f, t1, big_u, &mesh)?;
    Ok((nested, direct))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::E;

    fn log_power(kappa: f64, t1: f64) -> LogFunction<impl Fn(f64) -> Result<f64>> {
        LogFunction::new(t1, move |u: f64| Ok(u.max(0.0).powf(kappa - 1.0)))
    }

    #[test]
    fn order_one_of_constant_is_log() {
        let cfg = QuadratureConfig::default();
        let v = hadamard_integral(1.0, &Coefficient::Constant(1.0), 1.0, E, &cfg).unwrap();
        assert!((v - 1.0).abs() < 1e-13);
    }

    #[test]
    fn order_zero_is_identity() {
        let cfg = QuadratureConfig::default();
        let q = Coefficient::parse("t^2 + 1").unwrap();
        assert_eq!(hadamard_integral(0.0, &q, 1.0, 2.0, &cfg).unwrap(), 5.0);
    }

    #[test]
    fn power_rule_example() {
        let cfg = QuadratureConfig::default();
        let got = hadamard_integral(1.25, &log_power(1.5, 1.0), 1.0, E, &cfg).unwrap();
        let want = power_rule_reference(PowerOp::Integral, 1.25, 1.5, 1.0, E).unwrap();
        let direct = gamma_pos(1.5) / gamma_pos(2.75);
        assert!((want - direct).abs() < 1e-15);
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn power_rule_reference_cases() {
        assert_eq!(
            power_rule_reference(PowerOp::Derivative, 1.3, 1.3, 1.0, 2.0).unwrap(),
            0.0
        );
        assert!(
            (power_rule_reference(PowerOp::Integral, 1.0, 1.0, 1.0, E).unwrap() - 1.0).abs()
                < 1e-14
        );
        assert!(power_rule_reference(PowerOp::Integral, 0.0, 1.0, 1.0, E).is_err());
        assert!(power_rule_reference(PowerOp::Integral, 1.0, 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn power_rule_random_pairs() {
        let cfg = QuadratureConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let (t1, t2) = (1.5f64, 4.0);
        for _ in 0..20 {
            let order = rng.gen_range(0.0..2.0f64).max(1e-3);
            let kap = rng.gen_range(0.3..2.0);
            for t in [(t1 * t2).sqrt(), t2] {
                let got = hadamard_integral(order, &log_power(kap, t1), t1, t, &cfg).unwrap();
                let want = power_rule_reference(PowerOp::Integral, order, kap, t1, t).unwrap();
                assert!(
                    (got - want).abs() <= 1e-6,
                    "order {order}, kappa {kap}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn derivative_examples() {
        let cfg = QuadratureConfig::default();
        let d = hadamard_derivative(0.5, &log_power(1.5, 1.0), 1.0, 2.0, &cfg).unwrap();
        assert!((d - 0.8862269255).abs() < 1e-6, "{d}");
        let d = hadamard_derivative(0.5, &log_power(1.5, 1.0), 1.0, 5.0, &cfg).unwrap();
        assert!((d - 0.8862269255).abs() < 1e-6, "{d}");
        let d = hadamard_derivative(1.6, &log_power(1.6, 1.0), 1.0, 2.0, &cfg).unwrap();
        assert!(d.abs() < 1e-6, "{d}");
        let d = hadamard_derivative(1.0, &Coefficient::parse("ln(t)").unwrap(), 1.0, 2.0, &cfg)
            .unwrap();
        assert!((d - 1.0).abs() < 1e-9);
    }

    #[test]
    fn derivative_matches_power_rule() {
        let cfg = QuadratureConfig::default();
        for (order, kap) in [(0.3, 1.8), (0.75, 1.2), (1.4, 2.5), (1.9, 3.0)] {
            let got = hadamard_derivative(order, &log_power(kap, 1.0), 1.0, 2.5, &cfg).unwrap();
            let want = power_rule_reference(PowerOp::Derivative, order, kap, 1.0, 2.5).unwrap();
            assert!(
                (got - want).abs() < 1e-6 * want.abs().max(1.0),
                "{order}, {kap}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn derivative_rejects_bad_input() {
        let cfg = QuadratureConfig::default();
        let one = Coefficient::Constant(1.0);
        assert!(hadamard_derivative(2.5, &one, 1.0, 2.0, &cfg).is_err());
        assert!(hadamard_derivative(0.0, &one, 1.0, 2.0, &cfg).is_err());
        assert!(hadamard_derivative(0.5, &one, 1.0, 1.0, &cfg).is_err());
        assert!(hadamard_integral(0.5, &one, 2.0, 1.0, &cfg).is_err());
        assert!(hadamard_integral(-0.5, &one, 1.0, 2.0, &cfg).is_err());
        let bad = QuadratureConfig { order: 1, ..cfg };
        assert!(hadamard_integral(0.5, &one, 1.0, 2.0, &bad).is_err());
    }

    #[test]
    fn semigroup_property() {
        let cfg = QuadratureConfig::default();
        let (a, b) =
            composition_check(0.5, 0.5, &Coefficient::Constant(1.0), 1.0, E, &cfg).unwrap();
        assert!((a - 1.0).abs() < 1e-6 && (b - 1.0).abs() < 1e-10);
        let (a, b) = composition_check(0.75, 0.5, &log_power(1.5, 1.0), 1.0, E, &cfg).unwrap();
        let want = power_rule_reference(PowerOp::Integral, 1.25, 1.5, 1.0, E).unwrap();
        assert!(
            (a - want).abs() < 1e-6 && (b - want).abs() < 1e-6,
            "{a} {b} {want}"
        );
        let q = Coefficient::parse("cos(t) + 2").unwrap();
        let (a, b) = composition_check(0.3, 1.1, &q, 1.0, 3.0, &cfg).unwrap();
        assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn derivative_inverts_integral() {
        let cfg = QuadratureConfig::default();
        let f = Coefficient::parse("sin(t) + 2").unwrap();
        for sigma in [0.4, 1.3, 1.75] {
            let g = |s: f64| hadamard_integral(sigma, &f, 1.0, s, &cfg);
            for t in [1.7, 2.4] {
                let d = hadamard_derivative(sigma, &g, 1.0, t, &cfg).unwrap();
                assert!(
                    (d - f.eval(t).unwrap()).abs() < 1e-4,
                    "sigma {sigma}, t {t}: {d}"
                );
            }
        }
    }

    #[test]
    fn graded_mesh_converges() {
        // no geometric refinement, uniform panels: error should fall >= 2x per halving
        for (order, kap) in [(1.25, 1.5), (1.6, 1.25), (1.9, 2.0)] {
            let want = power_rule_reference(PowerOp::Integral, order, kap, 1.0, E).unwrap();
            let err = |panels: usize| {
                let cfg = QuadratureConfig {
                    panels,
                    order: 2,
                    grading: 1.0,
                    endpoint_levels: 0,
                };
                (hadamard_integral(order, &log_power(kap, 1.0), 1.0, E, &cfg).unwrap() - want).abs()
            };
            let (e1, e2) = (err(4), err(8));
            assert!(e2 * 2.0 <= e1, "order {order}: {e1:e} -> {e2:e}");
        }
    }
}
