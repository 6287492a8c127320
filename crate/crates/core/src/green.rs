//! Green's function of the two-order Hadamard problem with Dirichlet data,
//! the auxiliary functions used to locate its maximum, and a grid-search
//! oracle for that maximum.
//!
//! Everything is evaluated in log coordinates `x = ln(t/t1)`, `y = ln(s/t1)`,
//! where the kernel is
//!
//! ```text
//! s * Xi(t, s) = (x/L)^(sigma-1) (L-y)^beta - [y <= x] (x-y)^beta,   beta = sigma-kappa-1
//! ```

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::FracParams;
use crate::special::gamma_pos;

/// Which of the two candidate maxima is the larger one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// Attained on the diagonal `s = t` at `t = t_star` (value `omega`).
    Diagonal,
    /// Attained on the edge `s = t1` at `t = t_hat` (value `mho`).
    LeftEdge,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenMaxReport {
    pub delta: f64,
    pub x2: f64,
    pub t_star: f64,
    pub t_hat: f64,
    pub omega: f64,
    pub mho: f64,
    pub max_abs_g: f64,
    pub branch: Branch,
}

/// Location and value of the grid-search maximum of `|G|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BruteForceMax {
    pub value: f64,
    pub t: f64,
    pub s: f64,
}

/// Largest grid accepted by [`green_max_bruteforce`] and [`write_grid_csv`].
pub const MAX_GRID: usize = 20_000;

/// `s * Xi(t, s)` in log coordinates, both in `[0, L]`.
#[inline]
pub(crate) fn scaled_kernel_log(p: &FracParams, x: f64, y: f64) -> f64 {
    let l = p.log_len();
    let beta = p.beta();
    let first = (x / l).powf(p.sigma() - 1.0) * (l - y).max(0.0).powf(beta);
    if y < x {
        first - (x - y).powf(beta)
    } else {
        first
    }
}

/// `Xi(t, s)` in log coordinates (without the `1/Gamma(sigma-kappa)` factor).
#[inline]
pub(crate) fn xi_log(p: &FracParams, x: f64, y: f64) -> f64 {
    scaled_kernel_log(p, x, y) * (-y).exp() / p.t1()
}

fn check_square(p: &FracParams, t: f64, s: f64) -> Result<(f64, f64)> {
    p.check_in_interval("t", t)?;
    p.check_in_interval("s", s)?;
    Ok((p.log_coord(t), p.log_coord(s)))
}

/// Upper-triangle piece `Xi_1(t, s)`, `t <= s`.
pub fn xi1(p: &FracParams, t: f64, s: f64) -> Result<f64> {
    let (x, y) = check_square(p, t, s)?;
    if t > s {
        return Err(Error::DomainInvalid(format!(
            "xi1 requires t <= s, got t = {t}, s = {s}"
        )));
    }
    let l = p.log_len();
    Ok((x / l).powf(p.sigma() - 1.0) * (l - y).powf(p.beta()) / s)
}

/// Lower-triangle piece `Xi_2(t, s)`, `s <= t`.
pub fn xi2(p: &FracParams, t: f64, s: f64) -> Result<f64> {
    let (x, y) = check_square(p, t, s)?;
    if s > t {
        return Err(Error::DomainInvalid(format!(
            "xi2 requires s <= t, got t = {t}, s = {s}"
        )));
    }
    let l = p.log_len();
    let beta = p.beta();
    let first = (x / l).powf(p.sigma() - 1.0) * (l - y).powf(beta);
    Ok((first - (x - y).max(0.0).powf(beta)) / s)
}

/// `G(t, s)` on `[t1, t2]^2`.
pub fn green_eval(p: &FracParams, t: f64, s: f64) -> Result<f64> {
    let xi = if t <= s { xi1(p, t, s)? } else { xi2(p, t, s)? };
    Ok(xi / gamma_pos(p.sigma() - p.kappa()))
}

/// `h(t) = ln(t/t1)^(sigma-1) ln(t2/t)^beta / t`; `Xi(t, t) = h(t) / L^(sigma-1)`.
pub fn diag_h(p: &FracParams, t: f64) -> Result<f64> {
    p.check_in_interval("t", t)?;
    let x = p.log_coord(t);
    let l = p.log_len();
    Ok(x.powf(p.sigma() - 1.0) * (l - x).powf(p.beta()) / t)
}

/// `zeta(t) = |Xi_2(t, t1)| = ln(t/t1)^beta [1 - (ln(t/t1)/L)^kappa] / t1`.
pub fn zeta(p: &FracParams, t: f64) -> Result<f64> {
    p.check_in_interval("t", t)?;
    let x = p.log_coord(t);
    let ratio = x / p.log_len();
    Ok(x.powf(p.beta()) * (1.0 - ratio.powf(p.kappa())) / p.t1())
}

/// `Delta = (L + 2(sigma-1) - kappa)^2 - 4 (sigma-1) L`.
pub fn discriminant(p: &FracParams) -> f64 {
    let l = p.log_len();
    let sm1 = p.sigma() - 1.0;
    let b = l + 2.0 * sm1 - p.kappa();
    b * b - 4.0 * sm1 * l
}

/// Expanded form `(L - kappa)^2 + 4 (sigma-1)^2 - 4 (sigma-1) kappa`, which
/// makes positivity evident since `kappa < sigma - 1`.
pub fn discriminant_expanded(p: &FracParams) -> f64 {
    let l = p.log_len();
    let sm1 = p.sigma() - 1.0;
    let k = p.kappa();
    (l - k) * (l - k) + 4.0 * sm1 * sm1 - 4.0 * sm1 * k
}

/// Both roots `(x1, x2)` of `x^2 - [L + 2(sigma-1) - kappa] x + (sigma-1) L`.
/// Only `x2` lies in `(0, L)`; `x1 > L`.
pub fn critical_roots(p: &FracParams) -> (f64, f64) {
    let l = p.log_len();
    let sm1 = p.sigma() - 1.0;
    let b = l + 2.0 * sm1 - p.kappa();
    let sq = discriminant(p).sqrt();
    let x1 = 0.5 * (b + sq);
    // product of the roots is (sigma-1) L; avoids cancellation in b - sqrt(Delta)
    let x2 = sm1 * l / x1;
    (x1, x2)
}

/// The admissible critical point `x2 = ln(t_star / t1)` of `h`.
pub fn critical_x2(p: &FracParams) -> f64 {
    let (x1, x2) = critical_roots(p);
    debug_assert!(x1 > p.log_len(), "rejected root x1 = {x1} must exceed L");
    x2
}

pub fn t_star(p: &FracParams) -> f64 {
    p.t1() * critical_x2(p).exp()
}

/// Critical point of `zeta`: `t1 exp[((sigma-kappa-1)/(sigma-1))^(1/kappa) L]`.
pub fn t_hat(p: &FracParams) -> f64 {
    let r = p.beta() / (p.sigma() - 1.0);
    p.t1() * (r.powf(1.0 / p.kappa()) * p.log_len()).exp()
}

/// Diagonal maximum `max_t Xi(t, t)`.
pub fn omega(p: &FracParams) -> f64 {
    let l = p.log_len();
    let x2 = critical_x2(p);
    x2.powf(p.sigma() - 1.0) * (l - x2).powf(p.beta())
        / (l.powf(p.sigma() - 1.0) * p.t1() * x2.exp())
}

/// Edge maximum `max_t |Xi_2(t, t1)|`.
pub fn mho(p: &FracParams) -> f64 {
    let sm1 = p.sigma() - 1.0;
    let ratio = p.kappa() / sm1;
    ratio * (1.0 - ratio).powf(p.beta() / p.kappa()) * p.log_len().powf(p.beta()) / p.t1()
}

/// Closed-form maximum of `|G|` over the square. Ties go to [`Branch::Diagonal`].
pub fn green_max(p: &FracParams) -> GreenMaxReport {
    let omega = omega(p);
    let mho = mho(p);
    let (branch, top) = if omega >= mho {
        (Branch::Diagonal, omega)
    } else {
        (Branch::LeftEdge, mho)
    };
    GreenMaxReport {
        delta: discriminant(p),
        x2: critical_x2(p),
        t_star: t_star(p),
        t_hat: t_hat(p),
        omega,
        mho,
        max_abs_g: top / gamma_pos(p.sigma() - p.kappa()),
        branch,
    }
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Maximises `f` on `[a, b]` by golden-section search, also looking at the
/// bracket ends. Returns `(argmax, max)`.
fn golden_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (a, b);
    let mut c = hi - GOLDEN * (hi - lo);
    let mut d = lo + GOLDEN * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if hi - lo <= 1e-15 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - GOLDEN * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + GOLDEN * (hi - lo);
            fd = f(d);
        }
    }
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for e in [a, b] {
        let fe = f(e);
        if fe > best.1 {
            best = (e, fe);
        }
    }
    best
}

/// Maximum of `|G|` over an `n x n` grid uniform in `(ln t, ln s)`, followed by
/// golden-section line searches around the grid argmax along the `t`, `s` and
/// diagonal directions.
pub fn green_max_bruteforce(p: &FracParams, n: usize) -> Result<BruteForceMax> {
    if n < 16 {
        return Err(Error::DomainInvalid(format!(
            "grid size must be at least 16, got {n}"
        )));
    }
    if n > MAX_GRID {
        return Err(Error::ResourceLimit {
            requested: n,
            cap: MAX_GRID,
        });
    }
    let l = p.log_len();
    let beta = p.beta();
    let h = l / (n - 1) as f64;
    let coord = |i: usize| if i == n - 1 { l } else { i as f64 * h };
    // the kernel separates on a uniform log grid
    let a: Vec<f64> = (0..n)
        .map(|i| (coord(i) / l).powf(p.sigma() - 1.0))
        .collect();
    let b: Vec<f64> = (0..n).map(|j| (l - coord(j)).powf(beta)).collect();
    let c: Vec<f64> = (0..n).map(|k| (k as f64 * h).powf(beta)).collect();
    let inv_s: Vec<f64> = (0..n).map(|j| (-coord(j)).exp() / p.t1()).collect();

    let mut best = (0.0f64, 0usize, 0usize);
    for i in 0..n {
        for j in 0..n {
            let mut v = a[i] * b[j];
            if j < i {
                v -= c[i - j];
            }
            let v = (v * inv_s[j]).abs();
            if v > best.0 {
                best = (v, i, j);
            }
        }
    }

    let f = |x: f64, y: f64| xi_log(p, x.clamp(0.0, l), y.clamp(0.0, l)).abs();
    let (mut x, mut y) = (coord(best.1), coord(best.2));
    let mut val = f(x, y);
    let mut span = h;
    for _ in 0..30 {
        let before = val;
        // along t
        let (nx, v) = golden_max(|u| f(u, y), (x - span).max(0.0), (x + span).min(l));
        if v > val {
            x = nx;
            val = v;
        }
        // along s
        let (ny, v) = golden_max(|u| f(x, u), (y - span).max(0.0), (y + span).min(l));
        if v > val {
            y = ny;
            val = v;
        }
        // along the diagonal direction
        let lo = -span.min(x).min(y);
        let hi = span.min(l - x).min(l - y);
        let (d, v) = golden_max(|u| f(x + u, y + u), lo, hi);
        if v > val {
            x += d;
            y += d;
            val = v;
        }
        if val - before <= 1e-15 * val {
            break;
        }
        span *= 0.5;
    }
    let gsk = gamma_pos(p.sigma() - p.kappa());
    let value = (val / gsk).max(best.0 / gsk);
    Ok(BruteForceMax {
        value,
        t: p.t1() * x.exp(),
        s: p.t1() * y.exp(),
    })
}

/// Writes `G` on an `n x n` grid uniform in log space as CSV `t,s,G`
/// (17 significant digits, LF line endings). Returns the number of data rows.
pub fn write_grid_csv<W: Write>(p: &FracParams, n: usize, out: W) -> Result<usize> {
    if n < 2 {
        return Err(Error::DomainInvalid(format!(
            "grid size must be at least 2, got {n}"
        )));
    }
    if n > MAX_GRID {
        return Err(Error::ResourceLimit {
            requested: n,
            cap: MAX_GRID,
        });
    }
    let io = |e: std::io::Error| Error::DomainInvalid(format!("cannot write grid: {e}"));
    let mut out = std::io::BufWriter::new(out);
    let l = p.log_len();
    let gsk = gamma_pos(p.sigma() - p.kappa());
    let point = |i: usize| {
        if i == n - 1 {
            (l, p.t2())
        } else {
            let x = l * i as f64 / (n - 1) as f64;
            (x, p.t1() * x.exp())
        }
    };
    writeln!(out, "t,s,G").map_err(io)?;
    for i in 0..n {
        let (x, t) = point(i);
        for j in 0..n {
            let (y, s) = point(j);
            let g = xi_log(p, x, y) / gsk;
            writeln!(out, "{t:.16e},{s:.16e},{g:.16e}").map_err(io)?;
        }
    }
    out.flush().map_err(io)?;
    Ok(n * n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::validate;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::E;

    fn ex1() -> FracParams {
        validate(1.75, 0.5, 1.0, E).unwrap()
    }

    pub(crate) fn random_params(rng: &mut ChaCha8Rng) -> FracParams {
        let sigma = rng.gen_range(1.2..=2.0);
        let kappa = (sigma - 1.0) * rng.gen_range(0.05..0.9);
        let t1 = rng.gen_range(0.5..2.0);
        let t2 = t1 * rng.gen_range(0.25f64..2.5).exp();
        validate(sigma, kappa, t1, t2).unwrap()
    }

    #[test]
    fn example_one_constants() {
        let p = ex1();
        assert!((discriminant(&p) - 1.0).abs() < 1e-12);
        assert!((critical_x2(&p) - 0.5).abs() < 1e-12);
        assert!((omega(&p) - 0.3032653299).abs() < 1e-9);
        assert!((mho(&p) - 0.3849001795).abs() < 1e-9);
        let r = green_max(&p);
        assert_eq!(r.branch, Branch::LeftEdge);
        assert!((r.max_abs_g - 0.3849001795 / 0.9064024771).abs() < 1e-9);
        assert!((r.t_star - 0.5f64.exp()).abs() < 1e-12);
        assert!((r.t_hat - (1.0f64 / 9.0).exp()).abs() < 1e-12);
    }

    #[test]
    fn example_one_pointwise() {
        let p = ex1();
        let ts = 0.5f64.exp();
        assert!((xi1(&p, ts, ts).unwrap() - 0.3032653299).abs() < 1e-9);
        assert!((diag_h(&p, ts).unwrap() - 0.5 / ts).abs() < 1e-12);
        assert!((green_eval(&p, ts, ts).unwrap() - 0.3345813).abs() < 1e-6);
        let th = t_hat(&p);
        assert!((xi2(&p, th, 1.0).unwrap() + 0.3849001795).abs() < 1e-9);
        assert!((zeta(&p, th).unwrap() - 0.3849001795).abs() < 1e-9);
        assert!(xi2(&p, E, 1.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn vanishing_edges() {
        let p = ex1();
        for s in [1.0, 1.3, 2.0, E] {
            assert_eq!(green_eval(&p, 1.0, s).unwrap(), 0.0);
            assert_eq!(xi1(&p, 1.0, s).unwrap(), 0.0);
        }
        for t in [1.0, 1.5, E] {
            assert_eq!(xi1(&p, t, E).unwrap(), 0.0);
        }
        assert_eq!(green_eval(&p, E, E).unwrap(), 0.0);
        assert_eq!(diag_h(&p, 1.0).unwrap(), 0.0);
        assert_eq!(diag_h(&p, E).unwrap(), 0.0);
        assert_eq!(zeta(&p, 1.0).unwrap(), 0.0);
        assert!(zeta(&p, E).unwrap().abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        let p = ex1();
        assert!(xi1(&p, 2.0, 1.5).is_err());
        assert!(xi2(&p, 1.5, 2.0).is_err());
        assert!(green_eval(&p, 0.5, 1.5).is_err());
        assert!(green_eval(&p, 1.5, 3.0).is_err());
        assert!(diag_h(&p, 3.0).is_err());
        assert!(zeta(&p, 0.9).is_err());
    }

    #[test]
    fn second_parameter_set() {
        let p = validate(1.5, 0.25, 1.0, E).unwrap();
        assert!((discriminant(&p) - 1.0625).abs() < 1e-12);
        let want = 0.5 * (1.75 - 1.0625f64.sqrt());
        assert!((critical_x2(&p) - want).abs() < 1e-12);
        assert!((critical_x2(&p) - 0.3596).abs() < 1e-4);
    }

    #[test]
    fn stationarity_of_critical_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let p = random_params(&mut rng);
            let l = p.log_len();
            let x2 = critical_x2(&p);
            let (x1, _) = critical_roots(&p);
            assert!(x1 > l);
            let quad =
                x2 * x2 - (l + 2.0 * (p.sigma() - 1.0) - p.kappa()) * x2 + (p.sigma() - 1.0) * l;
            assert!(quad.abs() < 1e-10);
            let ts = t_star(&p);
            assert!(ts > p.t1() && ts < p.t2());
            let th = t_hat(&p);
            assert!(th > p.t1() && th < p.t2());

            let hs = diag_h(&p, ts).unwrap();
            let dt = 1e-6 * ts;
            let d = (diag_h(&p, ts + dt).unwrap() - diag_h(&p, ts - dt).unwrap()) / (2.0 * dt);
            assert!(
                d.abs() * ts <= 1e-6 * hs / l.min(1.0) + 1e-9,
                "h'(t*) = {d}"
            );

            let zh = zeta(&p, th).unwrap();
            let dt = 1e-7 * (th - p.t1()).min(p.t2() - th);
            let d = (zeta(&p, th + dt).unwrap() - zeta(&p, th - dt).unwrap()) / (2.0 * dt);
            assert!(d.abs() * dt <= 1e-6 * zh, "zeta'(t_hat) = {d}");
        }
    }

    #[test]
    fn closed_forms_match_diagonal_and_edge_scans() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let p = random_params(&mut rng);
            let n = 10_000;
            let mut hmax: f64 = 0.0;
            let mut zmax: f64 = 0.0;
            for k in 0..=n {
                let t = p.t1() * (p.log_len() * k as f64 / n as f64).exp();
                let t = t.min(p.t2());
                hmax = hmax.max(xi1(&p, t, t).unwrap());
                zmax = zmax.max(zeta(&p, t).unwrap());
            }
            let om = omega(&p);
            let mh = mho(&p);
            assert!(hmax <= om * (1.0 + 1e-12) && hmax >= om * (1.0 - 1e-3));
            assert!(
                zmax <= mh * (1.0 + 1e-12) && zmax >= mh * (1.0 - 2e-2),
                "{zmax} vs {mh}"
            );
            assert!(
                (om - diag_h(&p, t_star(&p)).unwrap() / p.log_len().powf(p.sigma() - 1.0)).abs()
                    < 1e-12 * om
            );
            assert!((mh - zeta(&p, t_hat(&p)).unwrap()).abs() < 1e-10 * mh);
        }
    }

    #[test]
    fn discriminant_forms_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let p = random_params(&mut rng);
            let a = discriminant(&p);
            let b = discriminant_expanded(&p);
            assert!(a > 0.0);
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn bruteforce_example_one() {
        let p = ex1();
        let r = green_max_bruteforce(&p, 2000).unwrap();
        let closed = green_max(&p).max_abs_g;
        assert!((r.value - closed).abs() < 2e-3 * closed);
        assert!((r.value - 0.42465).abs() < 1e-4);
        assert!((r.s - 1.0).abs() < 1e-12);
        let coarse = green_max_bruteforce(&p, 16).unwrap();
        assert!(coarse.value <= r.value + 1e-9);
        assert!(green_max_bruteforce(&p, 8).is_err());
        assert!(matches!(
            green_max_bruteforce(&p, MAX_GRID + 1),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn bruteforce_argmax_on_diagonal_or_edge() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let p = random_params(&mut rng);
            let r = green_max_bruteforce(&p, 400).unwrap();
            let closed = green_max(&p);
            assert!(
                (r.value - closed.max_abs_g).abs() < 2e-3 * closed.max_abs_g,
                "{p:?}: {} vs {}",
                r.value,
                closed.max_abs_g
            );
            let on_diag = (r.t.ln() - r.s.ln()).abs() < 1e-6;
            let on_edge = (r.s / p.t1()).ln() < 1e-6;
            assert!(on_diag || on_edge, "argmax at ({}, {})", r.t, r.s);
            let expect_diag = closed.branch == Branch::Diagonal;
            assert_eq!(on_diag && !on_edge, expect_diag);
        }
    }

    #[test]
    fn fast_grid_matches_green_eval() {
        let p = validate(1.6, 0.3, 0.7, 3.1).unwrap();
        let l = p.log_len();
        for i in 0..=20 {
            for j in 0..=20 {
                let x = l * i as f64 / 20.0;
                let y = l * j as f64 / 20.0;
                let t = (p.t1() * x.exp()).min(p.t2());
                let s = (p.t1() * y.exp()).min(p.t2());
                let g = green_eval(&p, t, s).unwrap();
                let k = xi_log(&p, x, y) / gamma_pos(p.sigma() - p.kappa());
                assert!((g - k).abs() < 1e-12, "({t}, {s})");
            }
        }
    }

    #[test]
    fn grid_csv_shape() {
        let p = ex1();
        let mut buf = Vec::new();
        let rows = write_grid_csv(&p, 10, &mut buf).unwrap();
        assert_eq!(rows, 100);
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 101);
        assert_eq!(lines[0], "t,s,G");
        assert!(!text.contains('\r'));
        let fields: Vec<f64> = lines[1].split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields, vec![1.0, 1.0, 0.0]);
    }
}
