//! Reconstruction quality against a reference signal.
//!
//! PSNR uses the reference's dynamic range `R = max - min` as peak:
//! `psnr = 10 log10(R^2 / mse)`. SNR is `10 log10(sum ref^2 / sum (ref - est)^2)`.
//! An exact reconstruction reports `+inf` for both.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::Signal;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub mse: f64,
    /// `f64::INFINITY` when `mse == 0`.
    pub psnr_db: f64,
    /// `f64::INFINITY` when `mse == 0`.
    pub snr_db: f64,
}

pub fn compute_metrics(reference: &Signal, estimate: &Signal) -> Result<Metrics> {
    metrics_from_slices(reference.samples(), estimate.samples())
}

pub fn metrics_from_slices(reference: &[f64], estimate: &[f64]) -> Result<Metrics> {
    if reference.len() != estimate.len() {
        return Err(Error::Dimension {
            expected: reference.len(),
            found: estimate.len(),
        });
    }
    if reference.is_empty() {
        return Err(Error::InvalidSignal("empty reference".into()));
    }
    let (lo, hi) = reference
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let range = hi - lo;
    if range <= 0.0 {
        return Err(Error::PsnrUndefined);
    }

    let mut err2 = 0.0;
    let mut ref2 = 0.0;
    for (&r, &e) in reference.iter().zip(estimate) {
        let d = r - e;
        err2 += d * d;
        ref2 += r * r;
    }
    let mse = err2 / reference.len() as f64;
    if mse == 0.0 {
        return Ok(Metrics {
            mse,
            psnr_db: f64::INFINITY,
            snr_db: f64::INFINITY,
        });
    }
    Ok(Metrics {
        mse,
        psnr_db: 10.0 * (range * range / mse).log10(),
        snr_db: 10.0 * (ref2 / err2).log10(),
    })
}

/// Euclidean norm of `a - b`.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
