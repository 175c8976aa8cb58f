//! Real functions given by samples, with linear interpolation between them.

use std::path::Path;

use crate::error::{Error, Result};
use crate::COORD_TOL;

#[derive(Debug, Clone, PartialEq)]
pub struct SampledFn {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl SampledFn {
    /// `xs` must be strictly increasing and the same length as `ys` (≥ 2).
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<SampledFn> {
        if xs.len() != ys.len() {
            return Err(Error::SampleLengthMismatch { expected: xs.len(), got: ys.len() });
        }
        if xs.len() < 2 {
            return Err(Error::InvalidDensity("need at least two samples".into()));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidDensity("abscissae must be strictly increasing".into()));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::InvalidDensity("samples must be finite".into()));
        }
        Ok(SampledFn { xs, ys })
    }

    /// Samples `f` at `count` equally spaced points of `[lo, hi]`.
    pub fn from_fn(lo: f64, hi: f64, count: usize, f: impl Fn(f64) -> f64) -> Result<SampledFn> {
        let count = count.max(2);
        let step = (hi - lo) / (count - 1) as f64;
        let mut xs: Vec<f64> = (0..count).map(|i| lo + i as f64 * step).collect();
        xs[count - 1] = hi;
        let ys = xs.iter().map(|&x| f(x)).collect();
        SampledFn::new(xs, ys)
    }

    /// Parses two-column `x,y` CSV text; a non-numeric first row is taken as a header.
    pub fn from_csv_str(text: &str) -> Result<SampledFn> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for (row, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Parse(e.to_string()))?;
            if record.len() < 2 {
                return Err(Error::Parse(format!("row {}: expected two columns", row + 1)));
            }
            match (record[0].parse::<f64>(), record[1].parse::<f64>()) {
                (Ok(x), Ok(y)) => {
                    xs.push(x);
                    ys.push(y);
                }
                _ if row == 0 => continue,
                _ => return Err(Error::Parse(format!("row {}: not numeric", row + 1))),
            }
        }
        SampledFn::new(xs, ys)
    }

    pub fn from_csv_file(path: &Path) -> Result<SampledFn> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        SampledFn::from_csv_str(&text)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.range();
        x >= lo - COORD_TOL && x <= hi + COORD_TOL
    }

    /// Linear interpolation; errors outside the sampled range.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !self.contains(x) {
            let (lo, hi) = self.range();
            return Err(Error::OutOfRange { x, lo, hi });
        }
        Ok(self.interp(x))
    }

    pub(crate) fn interp(&self, x: f64) -> f64 {
        let i = self.xs.partition_point(|&s| s <= x);
        if i == 0 {
            return self.ys[0];
        }
        if i >= self.xs.len() {
            return self.ys[self.ys.len() - 1];
        }
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let (y0, y1) = (self.ys[i - 1], self.ys[i]);
        if y0 == y1 {
            return y0;
        }
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Simpson's rule for `∫ₐᵇ 1/G` on a single panel.
    pub(crate) fn simpson_reciprocal(&self, a: f64, b: f64) -> f64 {
        let m = 0.5 * (a + b);
        (b - a) / 6.0 * (1.0 / self.interp(a) + 4.0 / self.interp(m) + 1.0 / self.interp(b))
    }

    pub(crate) fn check_positive(&self) -> Result<()> {
        if self.ys.iter().all(|&y| y > 0.0) {
            Ok(())
        } else {
            Err(Error::NonPositiveG)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_linearly() {
        let f = SampledFn::new(vec![0.0, 1.0, 3.0], vec![1.0, 3.0, 7.0]).unwrap();
        assert_eq!(f.eval(0.5).unwrap(), 2.0);
        assert_eq!(f.eval(2.0).unwrap(), 5.0);
        assert_eq!(f.eval(3.0).unwrap(), 7.0);
        assert!(matches!(f.eval(3.5), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn rejects_bad_samples() {
        assert!(SampledFn::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(SampledFn::new(vec![0.0], vec![1.0]).is_err());
        assert!(matches!(
            SampledFn::new(vec![0.0, 1.0], vec![1.0]),
            Err(Error::SampleLengthMismatch { .. })
        ));
    }

    #[test]
    fn csv_with_header() {
        let f = SampledFn::from_csv_str("x,G\n0,1\n1, 2\n# trailing comment\n2,4\n").unwrap();
        assert_eq!(f.xs(), &[0.0, 1.0, 2.0]);
        assert_eq!(f.ys(), &[1.0, 2.0, 4.0]);
        assert!(SampledFn::from_csv_str("0,1\n1,abc\n").is_err());
    }

    #[test]
    fn simpson_is_exact_for_constants() {
        let g = SampledFn::new(vec![0.0, 2.0], vec![0.5, 0.5]).unwrap();
        assert_eq!(g.simpson_reciprocal(0.0, 1.0), 2.0);
    }
}
