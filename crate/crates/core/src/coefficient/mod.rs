//! Coefficient functions `q(t)`: constants, parsed expressions, or sampled
//! tables interpolated linearly in `ln t`.

mod expr;
mod table;

pub use expr::{parse_expr, BinOp, ExprNode, Func};
pub use table::Table;

use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient {
    Constant(f64),
    Expression(ExprNode),
    Table(Table),
}

impl Coefficient {
    pub fn parse(src: &str) -> Result<Self> {
        Ok(Coefficient::Expression(parse_expr(src)?))
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        eval_coefficient(self, t)
    }

    /// Points where `q` may fail to be smooth (table knots); empty otherwise.
    pub fn breakpoints(&self) -> &[f64] {
        match self {
            Coefficient::Table(tab) => tab.knots(),
            _ => &[],
        }
    }
}

pub fn eval_coefficient(q: &Coefficient, t: f64) -> Result<f64> {
    match q {
        Coefficient::Constant(c) => Ok(*c),
        Coefficient::Expression(e) => e.eval(t),
        Coefficient::Table(tab) => tab.eval(t),
    }
}

impl From<f64> for Coefficient {
    fn from(c: f64) -> Self {
        Coefficient::Constant(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn variants() {
        let q = Coefficient::parse("ln(t)").unwrap();
        assert!((q.eval(E).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(Coefficient::Constant(3.5).eval(123.0).unwrap(), 3.5);
        let tab = Table::new(vec![(1.0, 0.0), (E, 1.0)]).unwrap();
        let q = Coefficient::Table(tab);
        assert!((q.eval(0.5f64.exp()).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(q.breakpoints().len(), 2);
    }

    #[test]
    fn deterministic_bits() {
        let q = Coefficient::parse("sin(t)^2 + ln(t)/t").unwrap();
        for t in [0.3, 1.0, 2.5, 7.0] {
            assert_eq!(q.eval(t).unwrap().to_bits(), q.eval(t).unwrap().to_bits());
        }
    }
}
