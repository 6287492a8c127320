//! Problem data: the order pair `(sigma, kappa)` and the interval `[t1, t2]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A validated parameter set.
///
/// Invariants: `1 < sigma <= 2`, `0 < kappa < sigma - 1`, `0 < t1 < t2 < inf`.
/// The interval is also kept in logarithmic form since every kernel in the
/// crate lives in the variable `ln(t / t1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FracParams {
    sigma: f64,
    kappa: f64,
    t1: f64,
    t2: f64,
    #[serde(skip)]
    log_len: f64,
}

impl FracParams {
    pub fn new(sigma: f64, kappa: f64, t1: f64, t2: f64) -> Result<Self> {
        validate(sigma, kappa, t1, t2)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }

    /// `L = ln(t2 / t1)`, strictly positive.
    pub fn log_len(&self) -> f64 {
        self.log_len
    }

    /// Exponent `sigma - kappa - 1` of the `ln(t2/s)` and `ln(t/s)` factors, in `(0, 1)`.
    pub fn beta(&self) -> f64 {
        self.sigma - self.kappa - 1.0
    }

    /// Log coordinate `ln(t / t1)` clamped into `[0, L]`.
    pub(crate) fn log_coord(&self, t: f64) -> f64 {
        (t / self.t1).ln().clamp(0.0, self.log_len)
    }

    pub(crate) fn check_in_interval(&self, what: &str, t: f64) -> Result<()> {
        if !(t >= self.t1 && t <= self.t2) {
            return Err(Error::DomainInvalid(format!(
                "{what} = {t} is outside [{}, {}]",
                self.t1, self.t2
            )));
        }
        Ok(())
    }
}

/// Validates the quadruple `(sigma, kappa, t1, t2)`.
///
/// Comparisons are exact; `kappa == sigma - 1` is reported separately as
/// [`Error::BoundaryOrderUnsupported`].
pub fn validate(sigma: f64, kappa: f64, t1: f64, t2: f64) -> Result<FracParams> {
    for (name, v) in [("sigma", sigma), ("kappa", kappa), ("t1", t1), ("t2", t2)] {
        if !v.is_finite() {
            return Err(Error::DomainInvalid(format!(
                "{name} must be finite, got {v}"
            )));
        }
    }
    if !(sigma > 1.0 && sigma <= 2.0) {
        return Err(Error::OrderOutOfRange(format!(
            "sigma must satisfy 1 < sigma <= 2, got {sigma}"
        )));
    }
    let upper = sigma - 1.0;
    if kappa == upper {
        return Err(Error::BoundaryOrderUnsupported { sigma, kappa });
    }
    if !(kappa > 0.0 && kappa < upper) {
        return Err(Error::OrderOutOfRange(format!(
            "kappa must satisfy 0 < kappa < sigma - 1 = {upper}, got {kappa}"
        )));
    }
    if !(t1 > 0.0) {
        return Err(Error::DomainInvalid(format!(
            "t1 must be positive, got {t1}"
        )));
    }
    if !(t2 > t1) {
        return Err(Error::DomainInvalid(format!(
            "t2 must exceed t1, got t1 = {t1}, t2 = {t2}"
        )));
    }
    let log_len = (t2 / t1).ln();
    if !(log_len > 0.0) {
        return Err(Error::DomainInvalid(format!(
            "ln(t2/t1) underflows for t1 = {t1}, t2 = {t2}"
        )));
    }
    Ok(FracParams {
        sigma,
        kappa,
        t1,
        t2,
        log_len,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictKind {
    NoNontrivialSolution,
    Inconclusive,
}

/// Outcome of a nonexistence test: `q_integral < bound` rules out nontrivial
/// solutions, anything else (including equality) says nothing.
///
/// For the constant-coefficient (`lambda`) check the two fields hold `|lambda|`
/// and the eigenvalue threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub bound: f64,
    pub q_integral: f64,
}

impl Verdict {
    pub fn from_comparison(q_integral: f64, bound: f64) -> Self {
        let kind = if q_integral < bound {
            VerdictKind::NoNontrivialSolution
        } else {
            VerdictKind::Inconclusive
        };
        Verdict {
            kind,
            bound,
            q_integral,
        }
    }

    pub fn rules_out_solutions(&self) -> bool {
        self.kind == VerdictKind::NoNontrivialSolution
    }
}
