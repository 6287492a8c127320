//! Embedded acceptance suite: regressions against the worked examples plus the
//! property checks that tie the modules together. Each criterion reports its
//! own verdict, a one-line detail and its runtime.

use std::f64::consts::E;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{
    eigenvalue_bound, integrate_abs_q, lambda_nonexistence_check, lyapunov_bound,
    reference_bound_kappa0, DEFAULT_TOL,
};
use crate::coefficient::{parse_expr, BinOp, Coefficient, ExprNode, Func};
use crate::error::Result;
use crate::fredholm::min_eigenvalue_modulus;
use crate::green::{
    critical_x2, discriminant, green_max, green_max_bruteforce, mho, omega, xi1, xi2,
};
use crate::hadamard::{
    hadamard_derivative, hadamard_integral, power_rule_reference, LogFunction, PowerOp,
    QuadratureConfig,
};
use crate::params::{validate, FracParams, Verdict, VerdictKind};
use crate::report::CriterionResult;
use crate::special::{gamma, gamma_pos};

pub const DEFAULT_SEED: u64 = 20240611;

struct Check {
    passed: bool,
    detail: String,
}

type Runner = fn(u64) -> Result<Check>;

pub struct Criterion {
    pub id: &'static str,
    pub group: &'static str,
    pub title: &'static str,
    pub limit_ms: f64,
    run: Runner,
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion {
            id: "1",
            group: "green",
            title: "example-1 constants",
            limit_ms: 1.0,
            run: example_one,
        },
        Criterion {
            id: "2",
            group: "bounds",
            title: "example-1 verdict",
            limit_ms: 50.0,
            run: example_one_verdict,
        },
        Criterion {
            id: "3",
            group: "bounds",
            title: "example-2 threshold",
            limit_ms: 1.0,
            run: example_two,
        },
        Criterion {
            id: "4",
            group: "green",
            title: "closed-form max vs grid search",
            limit_ms: 60_000.0,
            run: oracle_agreement,
        },
        Criterion {
            id: "5a",
            group: "fredholm",
            title: "example-2 spectrum above threshold",
            limit_ms: 120_000.0,
            run: spectrum_example,
        },
        Criterion {
            id: "5b",
            group: "fredholm",
            title: "random spectra above threshold",
            limit_ms: 120_000.0,
            run: spectrum_random,
        },
        Criterion {
            id: "6",
            group: "hadamard",
            title: "power rule and inversion",
            limit_ms: 10_000.0,
            run: power_rule,
        },
        Criterion {
            id: "7",
            group: "bounds",
            title: "kappa -> 0 consistency",
            limit_ms: 10.0,
            run: kappa_zero,
        },
        Criterion {
            id: "8",
            group: "green",
            title: "kernel monotonicity",
            limit_ms: 5_000.0,
            run: monotonicity,
        },
        Criterion {
            id: "9",
            group: "parser",
            title: "expression corpus",
            limit_ms: 100.0,
            run: parser_corpus,
        },
    ]
}

/// Runs one criterion; an error counts as a failure with the message as detail.
pub fn run_criterion(c: &Criterion, seed: u64) -> CriterionResult {
    let start = Instant::now();
    let outcome = (c.run)(seed);
    let millis = start.elapsed().as_secs_f64() * 1e3;
    let (passed, detail) = match outcome {
        Ok(check) => (check.passed, check.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult {
        id: c.id.to_string(),
        group: c.group.to_string(),
        title: c.title.to_string(),
        passed,
        detail,
        millis,
        limit_ms: c.limit_ms,
    }
}

/// Runs every criterion whose id or group equals `filter` (all if `None`).
pub fn run(filter: Option<&str>, seed: u64) -> Vec<CriterionResult> {
    criteria()
        .iter()
        .filter(|c| filter.is_none_or(|f| f == c.group || f == c.id))
        .map(|c| run_criterion(c, seed))
        .collect()
}

pub fn find(id: &str) -> Option<Criterion> {
    criteria().into_iter().find(|c| c.id == id)
}

/// Random valid parameters: `sigma` in `[1.05, 2]`, `kappa / (sigma-1)` in
/// `[0.05, 0.95)`, `t1` in `[0.5, 2)`, `ln(t2/t1)` in `[0.25, 2.5)`.
pub fn random_params(rng: &mut ChaCha8Rng) -> FracParams {
    let sigma = rng.gen_range(1.05..=2.0);
    let kappa = (sigma - 1.0) * rng.gen_range(0.05..0.95);
    let t1 = rng.gen_range(0.5..2.0);
    let t2 = t1 * rng.gen_range(0.25f64..2.5).exp();
    validate(sigma, kappa, t1, t2).expect("sampled parameters are valid")
}

fn example_params() -> FracParams {
    validate(1.75, 0.5, 1.0, E).expect("example parameters are valid")
}

struct Tally {
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            failures: Vec::new(),
        }
    }

    fn close(&mut self, name: &str, got: f64, want: f64, tol: f64) {
        if !((got - want).abs() <= tol) {
            self.failures
                .push(format!("{name} = {got:.12} (want {want}, tol {tol:e})"));
        }
    }

    fn require(&mut self, name: &str, ok: bool) {
        if !ok {
            self.failures.push(name.to_string());
        }
    }

    fn finish(self, ok_detail: String) -> Result<Check> {
        Ok(if self.failures.is_empty() {
            Check {
                passed: true,
                detail: ok_detail,
            }
        } else {
            Check {
                passed: false,
                detail: self.failures.join("; "),
            }
        })
    }
}

fn example_one(_: u64) -> Result<Check> {
    let p = example_params();
    let mut t = Tally::new();
    t.close("Delta", discriminant(&p), 1.0, 1e-12);
    t.close("x2", critical_x2(&p), 0.5, 1e-12);
    t.close("Omega", omega(&p), 0.3032653299, 1e-9);
    t.close("Mho", mho(&p), 0.3849001795, 1e-9);
    t.close("Gamma(1.25)", gamma(1.25)?, 0.9064024771, 1e-9);
    t.close("bound", lyapunov_bound(&p), 2.3549027134, 1e-8);
    t.finish(format!("bound = {:.10}", lyapunov_bound(&p)))
}

fn example_one_verdict(_: u64) -> Result<Check> {
    let p = example_params();
    let integral = integrate_abs_q(&Coefficient::parse("ln(t)")?, 1.0, E, DEFAULT_TOL)?;
    let verdict = Verdict::from_comparison(integral, lyapunov_bound(&p));
    let mut t = Tally::new();
    t.close("int |ln s|", integral, 1.0, 1e-9);
    t.require(
        "verdict is NoNontrivialSolution",
        verdict.kind == VerdictKind::NoNontrivialSolution,
    );
    t.finish(format!("{integral:.12} < {:.10}", verdict.bound))
}

fn example_two(_: u64) -> Result<Check> {
    let p = example_params();
    let mut t = Tally::new();
    t.close("eigen_bound", eigenvalue_bound(&p), 4.0463865405, 1e-8);
    t.require(
        "lambda = 4.0 rules out",
        lambda_nonexistence_check(&p, 4.0)?.rules_out_solutions(),
    );
    t.require(
        "lambda = 4.1 inconclusive",
        !lambda_nonexistence_check(&p, 4.1)?.rules_out_solutions(),
    );
    t.finish(format!("eigen_bound = {:.10}", eigenvalue_bound(&p)))
}

fn oracle_agreement(seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally::new();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let p = random_params(&mut rng);
        let closed = green_max(&p).max_abs_g;
        let brute = green_max_bruteforce(&p, 2000)?.value;
        let rel = (closed - brute).abs() / closed;
        worst = worst.max(rel);
        t.require(&format!("{p:?}: relative gap {rel:e}"), rel <= 2e-3);
    }
    t.finish(format!("50 sets, worst relative gap {worst:.2e}"))
}

fn spectrum_example(_: u64) -> Result<Check> {
    let p = example_params();
    let r = min_eigenvalue_modulus(&p, 400)?;
    let mut t = Tally::new();
    t.require(
        &format!("lambda_min {} below 4.0463865405", r.lambda_min),
        r.lambda_min >= 4.0463865405 && r.lambda_min >= eigenvalue_bound(&p) - 1e-9,
    );
    t.finish(format!(
        "lambda_min = {:.6} >= {:.10}",
        r.lambda_min, r.analytic_bound
    ))
}

fn spectrum_random(seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    let mut weaker_violations = 0;
    for _ in 0..20 {
        let p = random_params(&mut rng);
        let r = min_eigenvalue_modulus(&p, 400)?;
        if !r.constant_q_satisfied {
            weaker_violations += 1;
        }
        if !(r.lambda_min >= r.analytic_bound - 1e-9) {
            violations.push(format!(
                "(sigma {:.4}, kappa {:.4}, [{:.4}, {:.4}]): lambda_min {:.4} < {:.4}",
                p.sigma(),
                p.kappa(),
                p.t1(),
                p.t2(),
                r.lambda_min,
                r.analytic_bound
            ));
        }
    }
    if violations.is_empty() {
        return Ok(Check {
            passed: true,
            detail: "20 sets, no violation".into(),
        });
    }
    Ok(Check {
        passed: false,
        detail: format!(
            "{} of 20 sets violate lambda_min >= bound*(t2-t1) (bound/(t2-t1) violated in {}); first: {}",
            violations.len(),
            weaker_violations,
            violations[0]
        ),
    })
}

fn power_rule(seed: u64) -> Result<Check> {
    let cfg = QuadratureConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally::new();
    let (t1, t2) = (1.0, E);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let order = rng.gen_range(0.0..2.0f64).max(1e-3);
        let kap = rng.gen_range(0.3..2.0);
        let f = LogFunction::new(t1, move |u: f64| Ok(u.max(0.0).powf(kap - 1.0)));
        for at in [(t1 * t2).sqrt(), t2] {
            let got = hadamard_integral(order, &f, t1, at, &cfg)?;
            let want = power_rule_reference(PowerOp::Integral, order, kap, t1, at)?;
            worst = worst.max((got - want).abs());
            t.close(
                &format!("I^{order:.4} of ln^{:.4}", kap - 1.0),
                got,
                want,
                1e-6,
            );
        }
    }
    let f = |s: f64| Ok(s.sin() + 2.0);
    for sigma in [0.6, 1.7] {
        let g = |s: f64| hadamard_integral(sigma, &f, t1, s, &cfg);
        for at in [1.6, 2.2] {
            let d = hadamard_derivative(sigma, &g, t1, at, &cfg)?;
            t.close(
                &format!("D^{sigma} I^{sigma} f at {at}"),
                d,
                at.sin() + 2.0,
                1e-4,
            );
        }
    }
    t.finish(format!("worst power-rule error {worst:.2e}"))
}

fn kappa_zero(_: u64) -> Result<Check> {
    let mut t = Tally::new();
    let kappa = 1e-7;
    for sigma in [1.3, 1.6, 1.9] {
        let p = validate(sigma, kappa, 1.0, E)?;
        let limit = gamma_pos(sigma - kappa) / omega(&p);
        let reference = reference_bound_kappa0(sigma, 1.0, E)?;
        t.close(
            &format!("sigma {sigma} relative gap"),
            (limit - reference) / reference,
            0.0,
            1e-5,
        );
        t.require(
            &format!("sigma {sigma}: Omega is the maximum"),
            omega(&p) >= mho(&p),
        );
    }
    t.finish("three orders agree".into())
}

fn monotonicity(seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0usize;
    let mut first = None;
    for _ in 0..20 {
        let p = random_params(&mut rng);
        let (t1, t2) = (p.t1(), p.t2());
        let slack = |a: f64, b: f64| 1e-12 * a.abs().max(b.abs()).max(1e-300);
        for _ in 0..200 {
            let t = rng.gen_range(t1..=t2);
            let mut check = |ok: bool, what: &str| {
                if !ok {
                    violations += 1;
                    first.get_or_insert_with(|| format!("{what} at {p:?}, t = {t}"));
                }
            };
            let (a, b) = {
                let u = rng.gen_range(t..=t2);
                let v = rng.gen_range(t..=t2);
                (u.min(v), u.max(v))
            };
            let (xa, xb) = (xi1(&p, t, a)?, xi1(&p, t, b)?);
            check(xa >= xb - slack(xa, xb), "xi1 increasing");
            check(xa >= 0.0 && xb >= 0.0, "xi1 negative");
            let (c, d) = {
                let u = rng.gen_range(t1..=t);
                let v = rng.gen_range(t1..=t);
                (u.min(v), u.max(v))
            };
            let (yc, yd) = (xi2(&p, t, c)?, xi2(&p, t, d)?);
            check(yc <= yd + slack(yc, yd), "xi2 decreasing");
            check(xi2(&p, t, t1)? <= 0.0, "xi2(t, t1) positive");
            let gap = (xi1(&p, t, t)? - xi2(&p, t, t)?).abs();
            check(gap <= 1e-12, "diagonal jump");
        }
    }
    Ok(Check {
        passed: violations == 0,
        detail: match first {
            None => "20 sets x 200 pairs, no violation".into(),
            Some(f) => format!("{violations} violations; first: {f}"),
        },
    })
}

/// Expressions that must survive print-then-parse unchanged.
pub const EXPRESSION_CORPUS: [&str; 50] = [
    "t",
    "1",
    "2.5",
    "1e-3",
    "-t",
    "--t",
    "t + 1",
    "t - 1",
    "1 - t - 2",
    "1 - (t - 2)",
    "2 * t",
    "t / 3",
    "1 / t / 2",
    "1 / (t / 2)",
    "t ^ 2",
    "t ^ 2 ^ 3",
    "(t ^ 2) ^ 3",
    "-t ^ 2",
    "(-t) ^ 2",
    "2 ^ -t",
    "2 * t ^ 2 - 1",
    "1 + 2 * 3",
    "(1 + 2) * 3",
    "ln(t)",
    "exp(t)",
    "sin(t)",
    "cos(t)",
    "abs(t - 2)",
    "sqrt(t)",
    "ln(t) - 0.5",
    "sin(t) ^ 2 + cos(t) ^ 2",
    "exp(-t ^ 2 / 2)",
    "ln(ln(t + 2))",
    "t * ln(t) - t",
    "sqrt(abs(sin(t)))",
    "1 / (1 + t ^ 2)",
    "(t - 1) * (t - 2) * (t - 3)",
    "-(t + 1)",
    "-(-(t))",
    "2 * -t",
    "t ^ 0.5 * ln(t)",
    "exp(ln(t))",
    "3.25e2 * t - 1E+1",
    "cos(2 * t) / (t + 1)",
    "abs(t) ^ 1.5",
    "10 - t * t / 4",
    "(t + 1) ^ (t - 1)",
    "sin(t) * exp(-t) + 2",
    "0.5 * (t + 1 / t)",
    "t - -1",
];

fn parser_corpus(_: u64) -> Result<Check> {
    let mut t = Tally::new();
    for src in EXPRESSION_CORPUS {
        match parse_expr(src) {
            Ok(ast) => {
                let printed = ast.to_string();
                match parse_expr(&printed) {
                    Ok(again) => t.require(
                        &format!("`{src}` -> `{printed}` changes the tree"),
                        again == ast,
                    ),
                    Err(e) => t.require(&format!("`{printed}` does not reparse: {e}"), false),
                }
            }
            Err(e) => t.require(&format!("`{src}` does not parse: {e}"), false),
        }
    }
    t.require(
        "ln(t) is a call of ln on t",
        parse_expr("ln(t)")? == ExprNode::Call(Func::Ln, Box::new(ExprNode::Var)),
    );
    t.require(
        "2*t^2 - 1 at 2 is 7",
        parse_expr("2*t^2 - 1")?.eval(2.0)? == 7.0,
    );
    let sum = parse_expr("1+2*3")?;
    t.require(
        "1+2*3 is 7 with * binding tighter",
        sum.eval(0.0)? == 7.0 && matches!(sum, ExprNode::Binary(BinOp::Add, _, _)),
    );
    t.finish("50 round-trips and 3 precedence cases".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_selects_group() {
        let ids: Vec<&str> = criteria()
            .iter()
            .filter(|c| c.group == "green")
            .map(|c| c.id)
            .collect();
        assert_eq!(ids, ["1", "4", "8"]);
        let results = run(Some("parser"), DEFAULT_SEED);
        assert_eq!(results.len(), 1);
        assert!(results[0].passed, "{}", results[0].detail);
        assert!(run(Some("nothing"), DEFAULT_SEED).is_empty());
    }

    #[test]
    fn fast_criteria_pass() {
        for id in ["1", "2", "3", "7"] {
            let r = run_criterion(&find(id).unwrap(), DEFAULT_SEED);
            assert!(r.passed, "{id}: {}", r.detail);
        }
    }
}
