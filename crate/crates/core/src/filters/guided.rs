//! Guided filter in two forms: the O(n) box-mean recipe, and the explicit
//! symmetric matrix it applies.
//!
//! For a window `w_k` of radius `rho` with mean `mu_k` and population
//! variance `var_k` of the guidance `g`, the matrix is
//!
//! ```text
//! W[i][j] = sum over k with i, j in w_k of (1 + (g_i - mu_k)(g_j - mu_k) / (var_k + eps)) / |w|^2
//! ```
//!
//! which has half-bandwidth `2 rho`. At the ends of the signal the matrix
//! form extends `g` by half-sample symmetric reflection (`g[-1] = g[0]`,
//! `g[n] = g[n-1]`) and folds the reflected columns back. Every window then
//! has the full `2 rho + 1` samples, every row sums to one, and the folded
//! matrix stays symmetric because the extended guidance is itself symmetric
//! under the reflections.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::mean::box_mean;
use crate::filters::GraphFilter;
use crate::operator::BandedSymOperator;
use crate::signal::Signal;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GfParams {
    /// Regularization in signal-variance units; larger means smoother.
    pub epsilon: f64,
    /// Box-mean radius in samples.
    pub rho: usize,
}

impl Default for GfParams {
    fn default() -> Self {
        Self {
            epsilon: 0.001,
            rho: 1,
        }
    }
}

impl GfParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Specification(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.rho == 0 {
            return Err(Error::Specification(
                "guided filter rho must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn half_bandwidth(&self) -> usize {
        2 * self.rho
    }
}

/// Half-sample symmetric reflection of an arbitrary integer index into `0..n`.
pub(crate) fn reflect(j: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let t = j.rem_euclid(period) as usize;
    if t < n {
        t
    } else {
        2 * n - 1 - t
    }
}

/// Explicit guided-filter matrix `W(g)` with `D = I`.
pub fn gf_build(g: &Signal, params: &GfParams) -> Result<BandedSymOperator> {
    params.validate()?;
    let n = g.len();
    let rho = params.rho;
    if n < 2 * rho + 1 {
        return Err(Error::Specification(format!(
            "guided filter needs n >= 2 rho + 1 = {}, got n = {n}",
            2 * rho + 1
        )));
    }
    let gv = g.samples();
    let r = rho as isize;
    let size = (2 * rho + 1) as f64;
    let norm = 1.0 / (size * size);

    // Window statistics for centres k in -rho ..= n-1+rho, stored at k + rho.
    let centres = n + 2 * rho;
    let mut mu = Vec::with_capacity(centres);
    let mut denom = Vec::with_capacity(centres);
    for c in 0..centres {
        let k = c as isize - r;
        let vals = (k - r..=k + r).map(|j| gv[reflect(j, n)]);
        let m = vals.clone().sum::<f64>() / size;
        let var = vals.map(|v| (v - m) * (v - m)).sum::<f64>() / size;
        mu.push(m);
        denom.push(var + params.epsilon);
    }

    let hb = 2 * rho;
    let mut bands: Vec<Vec<f64>> = (0..=hb).map(|o| vec![0.0; n.saturating_sub(o)]).collect();
    let mut row = vec![0.0; 2 * hb + 1];
    for i in 0..n {
        row.iter_mut().for_each(|v| *v = 0.0);
        let ii = i as isize;
        for k in ii - r..=ii + r {
            let c = (k + r) as usize;
            let gi = gv[i] - mu[c];
            for j_ext in k - r..=k + r {
                let j = reflect(j_ext, n);
                let w = norm * (1.0 + gi * (gv[j] - mu[c]) / denom[c]);
                row[(j as isize - ii + hb as isize) as usize] += w;
            }
        }
        for o in 0..=hb {
            if i + o < n {
                bands[o][i] = row[hb + o];
            }
        }
    }
    BandedSymOperator::from_parts(n, bands, vec![1.0; n])
}

/// Per-window linear model `y = a g + b` fitted by the guided filter.
pub fn gf_coefficients(x: &Signal, g: &Signal, params: &GfParams) -> Result<(Vec<f64>, Vec<f64>)> {
    params.validate()?;
    x.check_len(g.len())?;
    let rho = params.rho;
    let xv = x.samples();
    let gv = g.samples();

    let mean_g = box_mean(gv, rho);
    let mean_x = box_mean(xv, rho);
    let gg: Vec<f64> = gv.iter().map(|v| v * v).collect();
    let gx: Vec<f64> = gv.iter().zip(xv).map(|(a, b)| a * b).collect();
    let corr_g = box_mean(&gg, rho);
    let corr_gx = box_mean(&gx, rho);

    let mut a = Vec::with_capacity(xv.len());
    let mut b = Vec::with_capacity(xv.len());
    for i in 0..xv.len() {
        let var_g = corr_g[i] - mean_g[i] * mean_g[i];
        let cov_gx = corr_gx[i] - mean_g[i] * mean_x[i];
        let ai = cov_gx / (var_g + params.epsilon);
        a.push(ai);
        b.push(mean_x[i] - ai * mean_g[i]);
    }
    Ok((a, b))
}

/// Algorithm-1 style guided filter using truncated-window box means.
pub fn gf_step_fast(x: &Signal, g: &Signal, params: &GfParams) -> Result<Signal> {
    let (a, b) = gf_coefficients(x, g, params)?;
    let mean_a = box_mean(&a, params.rho);
    let mean_b = box_mean(&b, params.rho);
    let y = mean_a
        .iter()
        .zip(g.samples())
        .zip(&mean_b)
        .map(|((ma, gi), mb)| ma * gi + mb)
        .collect();
    x.with_samples(y)
}

#[derive(Debug, Clone, Copy)]
pub struct Guided {
    pub params: GfParams,
}

impl Guided {
    pub fn new(params: GfParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }
}

impl GraphFilter for Guided {
    fn name(&self) -> &'static str {
        "gf"
    }

    fn build(&self, guidance: &Signal) -> Result<BandedSymOperator> {
        gf_build(guidance, &self.params)
    }

    fn step(&self, x: &Signal, guidance: &Signal) -> Result<Signal> {
        gf_step_fast(x, guidance, &self.params)
    }
}
