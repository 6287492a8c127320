//! Nyström discretization of `x(t) = int G(t, s) q(s) x(s) ds` and the
//! spectral check of the eigenvalue bound.
//!
//! In `y = ln(s/t1)` the measure `G(t, s) ds` becomes `k(x, y) dy / Gamma(sigma-kappa)`
//! with `k(x, y) = (x/L)^(sigma-1) (L-y)^beta - [y < x] (x-y)^beta`. The product
//! `q x` is replaced by its piecewise-linear interpolant on a uniform grid in
//! `y` and the kernel is integrated against each hat function exactly, so the
//! weak singularity at `y = x` costs nothing. On a uniform grid the singular
//! moments depend only on the offset `i - j`.

use serde::{Deserialize, Serialize};

use crate::bounds::{constant_q_bound, eigenvalue_bound};
use crate::coefficient::Coefficient;
use crate::error::{Error, Result};
use crate::params::FracParams;
use crate::quadrature::GaussLegendre;
use crate::special::gamma_pos;

/// Largest accepted mesh (the matrix is dense).
pub const MAX_NODES: usize = 4000;

const POWER_ITERS: usize = 400;
const SUBSPACE_ITERS: usize = 5000;
const CHANGE_TOL: f64 = 1e-10;
const RESIDUAL_TOL: f64 = 1e-9;

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        self.data
            .chunks_exact(self.n)
            .map(|row| dot(row, v))
            .collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.data[j * self.n + i] = self.data[i * self.n + j];
            }
        }
        t
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn sup_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Log-uniform nodes `t_k = t1 exp(k L / (n-1))`, with the last node exactly `t2`.
pub fn nodes(p: &FracParams, n: usize) -> Vec<f64> {
    let h = p.log_len() / (n - 1) as f64;
    (0..n)
        .map(|k| {
            if k == n - 1 {
                p.t2()
            } else {
                p.t1() * (k as f64 * h).exp()
            }
        })
        .collect()
}

/// `int_a^b w^beta (w - c) dw`, in closed form near the origin and by Gauss
/// away from it, where the closed form would cancel.
struct Moments {
    beta: f64,
    rule: GaussLegendre,
}

impl Moments {
    fn linear(&self, a: f64, b: f64, c: f64) -> f64 {
        let beta = self.beta;
        if a < 4.0 {
            let f2 = (b.powf(beta + 2.0) - a.powf(beta + 2.0)) / (beta + 2.0);
            let f1 = (b.powf(beta + 1.0) - a.powf(beta + 1.0)) / (beta + 1.0);
            f2 - c * f1
        } else {
            self.rule
                .integrate(a, b, |w| Ok(w.powf(beta) * (w - c)))
                .expect("closure is infallible")
        }
    }

    /// Rising half hat on `[m-1, m]`.
    fn ramp_up(&self, m: usize) -> f64 {
        let a = m as f64 - 1.0;
        self.linear(a, a + 1.0, a)
    }

    /// Falling half hat on `[m, m+1]`.
    fn ramp_down(&self, m: usize) -> f64 {
        let a = m as f64;
        -self.linear(a, a + 1.0, a + 1.0)
    }

    fn full(&self, k: usize) -> f64 {
        self.ramp_up(k) + self.ramp_down(k)
    }
}

/// Nyström matrix: `(K v)_i` approximates `int G(t_i, s) q(s) v(s) ds` on the
/// grid of [`nodes`]. Rows at `t1` and `t2` are exactly zero.
pub fn nystrom_matrix(p: &FracParams, q: &Coefficient, n: usize) -> Result<Matrix> {
    if n < 8 {
        return Err(Error::DomainInvalid(format!(
            "mesh size must be at least 8, got {n}"
        )));
    }
    if n > MAX_NODES {
        return Err(Error::ResourceLimit {
            requested: n,
            cap: MAX_NODES,
        });
    }
    let ts = nodes(p, n);
    let qv = ts
        .iter()
        .map(|&t| q.eval(t))
        .collect::<Result<Vec<f64>>>()?;
    let l = p.log_len();
    let beta = p.beta();
    let h = l / (n - 1) as f64;
    let scale = h.powf(beta + 1.0) / gamma_pos(p.sigma() - p.kappa());
    let mom = Moments {
        beta,
        rule: GaussLegendre::new(8),
    };
    let origin = mom.ramp_down(0);
    let full: Vec<f64> = (0..n)
        .map(|k| if k == 0 { origin } else { mom.full(k) })
        .collect();
    let edge = |m: usize| mom.ramp_up(m);

    // right-end moments: int (L - y)^beta phi_j
    let mut right = vec![0.0; n];
    for (j, r) in right.iter_mut().enumerate() {
        let m = n - 1 - j;
        *r = if j == 0 { edge(m) } else { full[m] };
    }
    let mut k = Matrix::zeros(n);
    for i in 1..n - 1 {
        let a = (i as f64 / (n - 1) as f64).powf(p.sigma() - 1.0);
        let row = &mut k.data[i * n..(i + 1) * n];
        for j in 0..n {
            let singular = if j > i {
                0.0
            } else if j == 0 {
                edge(i)
            } else {
                full[i - j]
            };
            row[j] = qv[j] * scale * (a * right[j] - singular);
        }
    }
    Ok(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EigenMethod {
    /// Plain power iteration; the dominant eigenvalue is real.
    Power,
    /// Two-dimensional orthogonal iteration; used when power iteration does
    /// not settle, typically because the dominant pair is complex.
    Subspace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NystromResult {
    pub n: usize,
    /// Modulus of the dominant eigenvalue of the `q = 1` matrix.
    pub dominant_mu: f64,
    pub dominant_re: f64,
    pub dominant_im: f64,
    /// `1 / dominant_mu`, the smallest `|lambda|` with a nontrivial solution.
    pub lambda_min: f64,
    /// Published threshold `bound * (t2 - t1)`.
    pub analytic_bound: f64,
    pub satisfied: bool,
    /// Threshold `bound / (t2 - t1)` implied by the integral inequality.
    pub constant_q_bound: f64,
    pub constant_q_satisfied: bool,
    pub eigenvector_boundary_residual: f64,
    pub method: EigenMethod,
    pub iterations: usize,
    /// Dominant modulus obtained from the transposed matrix.
    pub transpose_mu: f64,
    #[serde(skip)]
    pub eigenvector: Vec<f64>,
}

#[derive(Debug, Clone)]
struct Dominant {
    re: f64,
    im: f64,
    method: EigenMethod,
    iterations: usize,
    /// Basis of the dominant invariant subspace (one vector if real).
    basis: Vec<Vec<f64>>,
}

impl Dominant {
    fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

fn start_vector(n: usize, phase: f64) -> Vec<f64> {
    let v: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.5 * (phase + 0.7 * i as f64).sin())
        .collect();
    let s = norm(&v);
    v.into_iter().map(|x| x / s).collect()
}

fn power_iteration(k: &Matrix) -> Option<Dominant> {
    let mut v = start_vector(k.size(), 0.0);
    let mut prev = f64::NAN;
    for it in 1..=POWER_ITERS {
        let w = k.matvec(&v);
        let mu = dot(&v, &w);
        let wn = norm(&w);
        if wn == 0.0 || !mu.is_finite() {
            return None;
        }
        let resid = w
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - mu * b).powi(2))
            .sum::<f64>()
            .sqrt()
            / wn;
        let change = ((mu - prev) / mu).abs();
        v = w.into_iter().map(|x| x / wn).collect();
        if resid < RESIDUAL_TOL && change < CHANGE_TOL {
            return Some(Dominant {
                re: mu,
                im: 0.0,
                method: EigenMethod::Power,
                iterations: it,
                basis: vec![v],
            });
        }
        prev = mu;
    }
    None
}

/// Eigenvalues of `[[a, b], [c, d]]` as `(re, im)` of the one with larger modulus.
fn dominant_2x2(a: f64, b: f64, c: f64, d: f64) -> (f64, f64) {
    let half_tr = 0.5 * (a + d);
    let det = a * d - b * c;
    let disc = half_tr * half_tr - det;
    if disc < 0.0 {
        (half_tr, (-disc).sqrt())
    } else {
        let r = disc.sqrt();
        let (l1, l2) = (half_tr + r, half_tr - r);
        (if l1.abs() >= l2.abs() { l1 } else { l2 }, 0.0)
    }
}

fn subspace_iteration(k: &Matrix) -> Result<Dominant> {
    let n = k.size();
    let mut a = start_vector(n, 0.0);
    let mut b = start_vector(n, 1.3);
    orthonormalize(&mut a, &mut b);
    let (mut prev_re, mut prev_im) = (f64::NAN, f64::NAN);
    let mut change = f64::INFINITY;
    for it in 1..=SUBSPACE_ITERS {
        let za = k.matvec(&a);
        let zb = k.matvec(&b);
        let (h00, h01, h10, h11) = (dot(&a, &za), dot(&a, &zb), dot(&b, &za), dot(&b, &zb));
        let (re, im) = dominant_2x2(h00, h01, h10, h11);
        let rho = re.hypot(im);
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::ConvergenceFailure {
                iterations: it,
                change: f64::NAN,
            });
        }
        change = ((re - prev_re).abs() + (im.abs() - prev_im.abs()).abs()) / rho;
        let resid = {
            let ra: f64 = (0..n)
                .map(|i| (za[i] - a[i] * h00 - b[i] * h10).powi(2))
                .sum();
            let rb: f64 = (0..n)
                .map(|i| (zb[i] - a[i] * h01 - b[i] * h11).powi(2))
                .sum();
            (ra + rb).sqrt() / rho
        };
        if change < CHANGE_TOL && resid < RESIDUAL_TOL {
            return Ok(Dominant {
                re,
                im,
                method: EigenMethod::Subspace,
                iterations: it,
                basis: vec![a, b],
            });
        }
        prev_re = re;
        prev_im = im;
        a = za;
        b = zb;
        orthonormalize(&mut a, &mut b);
    }
    Err(Error::ConvergenceFailure {
        iterations: SUBSPACE_ITERS,
        change,
    })
}

fn orthonormalize(a: &mut [f64], b: &mut [f64]) {
    let na = norm(a);
    a.iter_mut().for_each(|x| *x /= na);
    let proj = dot(a, b);
    b.iter_mut().zip(a.iter()).for_each(|(y, x)| *y -= proj * x);
    let nb = norm(b);
    b.iter_mut().for_each(|x| *x /= nb);
}

fn dominant(k: &Matrix) -> Result<Dominant> {
    match power_iteration(k) {
        Some(d) => Ok(d),
        None => subspace_iteration(k),
    }
}

/// Smallest `|lambda|` for which `x = lambda int G x` has a nontrivial
/// solution, estimated from the dominant eigenvalue of the `q = 1` matrix, and
/// compared with the analytic thresholds.
pub fn min_eigenvalue_modulus(p: &FracParams, n: usize) -> Result<NystromResult> {
    if n < 32 {
        return Err(Error::DomainInvalid(format!(
            "mesh size must be at least 32, got {n}"
        )));
    }
    let k = nystrom_matrix(p, &Coefficient::Constant(1.0), n)?;
    let dom = dominant(&k)?;
    let transpose_mu = dominant(&k.transpose())?.modulus();
    let mu = dom.modulus();
    let lambda_min = 1.0 / mu;
    let analytic_bound = eigenvalue_bound(p);
    let cq = constant_q_bound(p);
    let boundary = dom
        .basis
        .iter()
        .map(|v| v[0].abs().max(v[n - 1].abs()) / sup_norm(v))
        .fold(0.0, f64::max);
    let eigenvector = dom.basis[0].clone();
    Ok(NystromResult {
        n,
        dominant_mu: mu,
        dominant_re: dom.re,
        dominant_im: dom.im.abs(),
        lambda_min,
        analytic_bound,
        satisfied: lambda_min >= analytic_bound - 1e-9,
        constant_q_bound: cq,
        constant_q_satisfied: lambda_min >= cq - 1e-9,
        eigenvector_boundary_residual: boundary,
        method: dom.method,
        iterations: dom.iterations,
        transpose_mu,
        eigenvector,
    })
}

/// `max_i |x(t_i) - (K x)(t_i)|` for a candidate solution given by samples,
/// interpolated linearly in `ln t` onto the nodes.
pub fn residual_check(
    p: &FracParams,
    q: &Coefficient,
    x_samples: &[(f64, f64)],
    n: usize,
) -> Result<f64> {
    let k = nystrom_matrix(p, q, n)?;
    let xs = interpolate_samples(x_samples, &nodes(p, n))?;
    let kx = k.matvec(&xs);
    Ok(xs
        .iter()
        .zip(&kx)
        .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
}

fn interpolate_samples(samples: &[(f64, f64)], at: &[f64]) -> Result<Vec<f64>> {
    if samples.len() < 2 {
        return Err(Error::DomainInvalid("need at least two samples".into()));
    }
    if samples.windows(2).any(|w| !(w[1].0 > w[0].0))
        || samples.iter().any(|s| !(s.0 > 0.0) || !s.1.is_finite())
    {
        return Err(Error::DomainInvalid(
            "samples must have positive, strictly increasing t and finite values".into(),
        ));
    }
    let (lo, hi) = (samples[0].0, samples[samples.len() - 1].0);
    at.iter()
        .map(|&t| {
            let tol = 1e-12 * t;
            if t < lo - tol || t > hi + tol {
                return Err(Error::DomainInvalid(format!(
                    "samples cover [{lo}, {hi}] but the node {t} lies outside"
                )));
            }
            let t = t.clamp(lo, hi);
            let j = samples
                .partition_point(|s| s.0 <= t)
                .clamp(1, samples.len() - 1);
            let (t0, v0) = samples[j - 1];
            let (t1, v1) = samples[j];
            let w = (t / t0).ln() / (t1 / t0).ln();
            Ok(v0 + w * (v1 - v0))
        })
        .collect()
}
