use std::io::Read;

use crate::error::{Error, Result};

/// Samples `(t, q)` with strictly increasing `t > 0`, interpolated linearly
/// in `(ln t, q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    knots: Vec<f64>,
    log_knots: Vec<f64>,
    values: Vec<f64>,
}

impl Table {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Table(format!(
                "need at least 2 points, got {}",
                points.len()
            )));
        }
        for (i, &(t, v)) in points.iter().enumerate() {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::Table(format!(
                    "row {}: t must be finite and positive, got {t}",
                    i + 1
                )));
            }
            if !v.is_finite() {
                return Err(Error::Table(format!(
                    "row {}: q must be finite, got {v}",
                    i + 1
                )));
            }
        }
        if let Some(i) = points.windows(2).position(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::Table(format!(
                "t must be strictly increasing (rows {} and {})",
                i + 1,
                i + 2
            )));
        }
        let knots: Vec<f64> = points.iter().map(|p| p.0).collect();
        let log_knots = knots.iter().map(|t| t.ln()).collect();
        let values = points.iter().map(|p| p.1).collect();
        Ok(Table {
            knots,
            log_knots,
            values,
        })
    }

    /// Reads CSV with header `t,q`.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::Table(e.to_string()))?
            .clone();
        if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "q" {
            return Err(Error::Table(format!(
                "expected header `t,q`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut points = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Table(e.to_string()))?;
            if rec.len() != 2 {
                return Err(Error::Table(format!("row {}: expected 2 fields", i + 1)));
            }
            let parse = |s: &str| {
                crate::report::parse_real(s)
                    .map_err(|_| Error::Table(format!("row {}: invalid number `{s}`", i + 1)))
            };
            points.push((parse(&rec[0])?, parse(&rec[1])?));
        }
        Table::new(points)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn range(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(t >= lo && t <= hi) {
            return Err(Error::OutOfTableRange { t, lo, hi });
        }
        // exact at knots
        let k = self.knots.partition_point(|&x| x < t);
        if k < self.knots.len() && self.knots[k] == t {
            return Ok(self.values[k]);
        }
        let (i, j) = (k - 1, k);
        let x = t.ln();
        let w = ((x - self.log_knots[i]) / (self.log_knots[j] - self.log_knots[i])).clamp(0.0, 1.0);
        Ok(self.values[i] + w * (self.values[j] - self.values[i]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::E;

    #[test]
    fn interpolates_in_log_t() {
        let tab = Table::new(vec![(1.0, 0.0), (E, 1.0)]).unwrap();
        assert!((tab.eval(0.5f64.exp()).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(tab.eval(1.0).unwrap(), 0.0);
        assert_eq!(tab.eval(E).unwrap(), 1.0);
        assert!(matches!(tab.eval(3.0), Err(Error::OutOfTableRange { .. })));
        assert!(matches!(tab.eval(0.5), Err(Error::OutOfTableRange { .. })));
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(Table::new(vec![(1.0, 0.0)]).is_err());
        assert!(Table::new(vec![(1.0, 0.0), (1.0, 1.0)]).is_err());
        assert!(Table::new(vec![(2.0, 0.0), (1.0, 1.0)]).is_err());
        assert!(Table::new(vec![(0.0, 0.0), (1.0, 1.0)]).is_err());
    }

    #[test]
    fn csv_parsing() {
        let src = "t,q\n1,0\n2.718281828459045,1\n";
        let tab = Table::from_csv(src.as_bytes()).unwrap();
        assert_eq!(tab.knots().len(), 2);
        assert!(Table::from_csv("x,y\n1,2\n3,4\n".as_bytes()).is_err());
        assert!(Table::from_csv("t,q\n1,2\n3,abc\n".as_bytes()).is_err());
        assert!(Table::from_csv("t,q\n3,2\n1,4\n".as_bytes()).is_err());
        assert!(Table::from_csv("t,q\n1,2\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn exact_at_knots_and_bounded_between(
            mut ts in proptest::collection::vec(0.1f64..50.0, 2..12),
            vs in proptest::collection::vec(-10.0f64..10.0, 12),
            frac in 0.0f64..1.0,
        ) {
            ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            ts.dedup();
            prop_assume!(ts.len() >= 2 && ts.windows(2).all(|w| w[1] > w[0]));
            let pts: Vec<(f64, f64)> = ts.iter().zip(&vs).map(|(&t, &v)| (t, v)).collect();
            let tab = Table::new(pts.clone()).unwrap();
            for &(t, v) in &pts {
                prop_assert_eq!(tab.eval(t).unwrap(), v);
            }
            for w in pts.windows(2) {
                let t = (w[0].0.ln() + frac * (w[1].0.ln() - w[0].0.ln())).exp().clamp(w[0].0, w[1].0);
                let v = tab.eval(t).unwrap();
                let (lo, hi) = if w[0].1 <= w[1].1 { (w[0].1, w[1].1) } else { (w[1].1, w[0].1) };
                prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
            }
        }
    }
}
