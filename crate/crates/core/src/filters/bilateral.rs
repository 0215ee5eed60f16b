use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::GraphFilter;
use crate::operator::BandedSymOperator;
use crate::signal::Signal;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BfParams {
    /// Spatial scale, in position units.
    pub sigma_d: f64,
    /// Range scale, in signal units.
    pub sigma_r: f64,
    /// Neighbourhood radius in samples; the band has `2 * half_width + 1` diagonals.
    pub half_width: usize,
}

impl Default for BfParams {
    fn default() -> Self {
        Self {
            sigma_d: 0.5,
            sigma_r: 0.1,
            half_width: 2,
        }
    }
}

impl BfParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_d > 0.0 && self.sigma_d.is_finite()) {
            return Err(Error::Specification(format!(
                "sigma_d must be positive, got {}",
                self.sigma_d
            )));
        }
        if !(self.sigma_r > 0.0 && self.sigma_r.is_finite()) {
            return Err(Error::Specification(format!(
                "sigma_r must be positive, got {}",
                self.sigma_r
            )));
        }
        if self.half_width == 0 {
            return Err(Error::Specification(
                "bilateral half_width must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Bilateral weights
/// `w[i][j] = exp(-|p_i - p_j|^2 / (2 sigma_d^2)) * exp(-(g_i - g_j)^2 / (2 sigma_r^2))`
/// for `|i - j| <= half_width`, with degrees `d = W 1`.
pub fn bf_build(g: &Signal, params: &BfParams) -> Result<BandedSymOperator> {
    params.validate()?;
    let n = g.len();
    let p = g.positions();
    let v = g.samples();
    let sd = 2.0 * params.sigma_d * params.sigma_d;
    let sr = 2.0 * params.sigma_r * params.sigma_r;
    let bands = (0..=params.half_width)
        .map(|o| {
            (0..n.saturating_sub(o))
                .map(|i| {
                    let dp = p[i] - p[i + o];
                    let dg = v[i] - v[i + o];
                    (-(dp * dp) / sd).exp() * (-(dg * dg) / sr).exp()
                })
                .collect()
        })
        .collect();
    BandedSymOperator::with_row_sum_degrees(n, bands)
}

/// `y = D^-1 W x` with weights from `g`.
pub fn bf_step(x: &Signal, g: &Signal, params: &BfParams) -> Result<Signal> {
    x.check_len(g.len())?;
    bf_build(g, params)?.smooth(x)
}

#[derive(Debug, Clone, Copy)]
pub struct Bilateral {
    pub params: BfParams,
}

impl Bilateral {
    pub fn new(params: BfParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }
}

impl GraphFilter for Bilateral {
    fn name(&self) -> &'static str {
        "bf"
    }

    fn build(&self, guidance: &Signal) -> Result<BandedSymOperator> {
        bf_build(guidance, &self.params)
    }
}
