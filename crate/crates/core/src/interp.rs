//! Shape-preserving (Fritsch–Carlson) piecewise cubic Hermite interpolation.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct MonotoneCubic<'a> {
    xs: &'a [f64],
    ys: &'a [f64],
    slopes: Vec<f64>,
}

impl<'a> MonotoneCubic<'a> {
    /// `xs` must be strictly increasing; the error carries the first offending index.
    pub fn new(xs: &'a [f64], ys: &'a [f64]) -> std::result::Result<Self, usize> {
        assert_eq!(xs.len(), ys.len(), "knot arrays differ in length");
        assert!(xs.len() >= 2, "need at least two knots");
        if let Some(k) = (1..xs.len()).find(|&k| !(xs[k] > xs[k - 1])) {
            return Err(k);
        }
        let n = xs.len();
        let secants: Vec<f64> = (0..n - 1)
            .map(|k| (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]))
            .collect();
        let mut slopes = vec![0.0; n];
        if n == 2 {
            slopes[0] = secants[0];
            slopes[1] = secants[0];
        } else {
            for k in 1..n - 1 {
                let (d0, d1) = (secants[k - 1], secants[k]);
                if d0 * d1 > 0.0 {
                    let h0 = xs[k] - xs[k - 1];
                    let h1 = xs[k + 1] - xs[k];
                    let w0 = 2.0 * h1 + h0;
                    let w1 = h1 + 2.0 * h0;
                    slopes[k] = (w0 + w1) / (w0 / d0 + w1 / d1);
                }
            }
            slopes[0] = end_slope(xs[1] - xs[0], xs[2] - xs[1], secants[0], secants[1]);
            slopes[n - 1] = end_slope(
                xs[n - 1] - xs[n - 2],
                xs[n - 2] - xs[n - 3],
                secants[n - 2],
                secants[n - 3],
            );
        }
        Ok(Self { xs, ys, slopes })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        let span = (hi - lo).abs().max(1.0);
        if !(x >= lo - 1e-12 * span && x <= hi + 1e-12 * span) {
            return Err(Error::OutOfRange { value: x, lo, hi });
        }
        let k = match self.xs.partition_point(|&v| v <= x) {
            0 => 0,
            p => (p - 1).min(self.xs.len() - 2),
        };
        Ok(self.eval_in(k, x))
    }

    fn eval_in(&self, k: usize, x: f64) -> f64 {
        let h = self.xs[k + 1] - self.xs[k];
        let t = (x - self.xs[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[k]
            + h10 * h * self.slopes[k]
            + h01 * self.ys[k + 1]
            + h11 * h * self.slopes[k + 1]
    }
}

// Three-point one-sided estimate, limited to preserve shape at the boundary.
fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}
