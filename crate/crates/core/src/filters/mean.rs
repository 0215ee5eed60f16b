//! Box mean over truncated windows in O(n), independent of the radius.

use crate::error::{Error, Result};
use crate::signal::Signal;

/// Prefix sums kept as unevaluated pairs `hi + lo` (Knuth two-sum), so a
/// window sum is accurate to a few ulps of the window itself rather than of
/// the running total.
struct CompensatedPrefix {
    hi: Vec<f64>,
    lo: Vec<f64>,
}

impl CompensatedPrefix {
    fn new(x: &[f64]) -> Self {
        let mut hi = Vec::with_capacity(x.len() + 1);
        let mut lo = Vec::with_capacity(x.len() + 1);
        hi.push(0.0);
        lo.push(0.0);
        let (mut s, mut c) = (0.0f64, 0.0f64);
        for &v in x {
            let t = s + v;
            let bp = t - s;
            let err = (s - (t - bp)) + (v - bp);
            s = t;
            c += err;
            hi.push(s);
            lo.push(c);
        }
        Self { hi, lo }
    }

    /// Sum of `x[a..b]`.
    fn range(&self, a: usize, b: usize) -> f64 {
        (self.hi[b] - self.hi[a]) + (self.lo[b] - self.lo[a])
    }
}

/// `y[i]` = mean of `x[i - rho ..= i + rho]` clipped to the valid index range.
pub fn box_mean(x: &[f64], rho: usize) -> Vec<f64> {
    let n = x.len();
    let prefix = CompensatedPrefix::new(x);
    (0..n)
        .map(|i| {
            let a = i.saturating_sub(rho);
            let b = (i + rho + 1).min(n);
            prefix.range(a, b) / (b - a) as f64
        })
        .collect()
}

pub fn mean_filter(x: &Signal, rho: usize) -> Result<Signal> {
    if rho == 0 {
        return Err(Error::Specification(
            "mean filter radius must be at least 1".into(),
        ));
    }
    x.with_samples(box_mean(x.samples(), rho))
}
