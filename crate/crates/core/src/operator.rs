//! Symmetric banded weight matrices and the graph Laplacian `L = D - W`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::signal::Signal;

/// Largest `n` for which [`BandedSymOperator::dense_oracle`] will materialize a matrix.
pub const DENSE_LIMIT: usize = 512;

/// Weights `w[i][j]` for `|i - j| <= half_bandwidth` plus a degree vector.
///
/// Only the upper triangle is stored: `bands[o][i]` holds `w[i][i + o]`, so
/// `w[i][j]` and `w[j][i]` are the same number.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSymOperator {
    n: usize,
    half_bandwidth: usize,
    bands: Vec<Vec<f64>>,
    degrees: Vec<f64>,
    // W 1, cached for the Laplacian.
    row_sums: Vec<f64>,
}

impl BandedSymOperator {
    /// Build from band storage, with `d = W 1` as the degree vector.
    pub fn with_row_sum_degrees(n: usize, bands: Vec<Vec<f64>>) -> Result<Self> {
        let mut op = Self::from_parts(n, bands, vec![0.0; n])?;
        op.degrees = op.row_sums.clone();
        Ok(op)
    }

    pub fn from_parts(n: usize, bands: Vec<Vec<f64>>, degrees: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Specification(
                "operator needs at least one vertex".into(),
            ));
        }
        if bands.is_empty() {
            return Err(Error::Specification("missing main diagonal".into()));
        }
        for (o, band) in bands.iter().enumerate() {
            let expected = n.saturating_sub(o);
            if band.len() != expected {
                return Err(Error::Dimension {
                    expected,
                    found: band.len(),
                });
            }
        }
        if degrees.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: degrees.len(),
            });
        }
        let mut op = Self {
            n,
            half_bandwidth: bands.len() - 1,
            bands,
            degrees,
            row_sums: Vec::new(),
        };
        let mut sums = vec![0.0; n];
        op.weight_into(&vec![1.0; n], &mut sums);
        op.row_sums = sums;
        Ok(op)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_parts(n, vec![vec![1.0; n]], vec![1.0; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_bandwidth(&self) -> usize {
        self.half_bandwidth
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// `w[i][i + offset]` for every valid `i`.
    pub fn band(&self, offset: usize) -> &[f64] {
        &self.bands[offset]
    }

    /// Entry `w[i][j]`; zero outside the band.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        let o = hi - lo;
        if o > self.half_bandwidth || hi >= self.n {
            0.0
        } else {
            self.bands[o][lo]
        }
    }

    /// `W 1`, accumulated in the same order as [`Self::apply_weight`].
    pub fn row_sums(&self) -> &[f64] {
        &self.row_sums
    }

    pub(crate) fn weight_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for ((yi, &xi), &w) in y.iter_mut().zip(x).zip(&self.bands[0]) {
            *yi = w * xi;
        }
        for o in 1..self.bands.len() {
            for (i, &w) in self.bands[o].iter().enumerate() {
                y[i] += w * x[i + o];
                y[i + o] += w * x[i];
            }
        }
    }

    /// `y = D x - W x`, evaluated as
    /// `(d_i - sum_j w_ij) x_i + sum_j w_ij (x_i - x_j)`.
    ///
    /// When `d = W 1` the first term vanishes exactly and constants map to
    /// an exact zero.
    pub(crate) fn laplacian_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for (((yi, &xi), &d), &s) in y.iter_mut().zip(x).zip(&self.degrees).zip(&self.row_sums) {
            *yi = (d - s) * xi;
        }
        for o in 1..self.bands.len() {
            for (i, &w) in self.bands[o].iter().enumerate() {
                let t = w * (x[i] - x[i + o]);
                y[i] += t;
                y[i + o] -= t;
            }
        }
    }

    pub(crate) fn check_degrees(&self) -> Result<()> {
        match self.degrees.iter().position(|&d| d.is_nan() || d <= 0.0) {
            Some(index) => Err(Error::SingularDegree {
                index,
                value: self.degrees[index],
            }),
            None => Ok(()),
        }
    }

    pub(crate) fn inverse_degree_into(&self, r: &[f64], s: &mut [f64]) {
        for ((si, &ri), &d) in s.iter_mut().zip(r).zip(&self.degrees) {
            *si = ri / d;
        }
    }

    pub fn apply_weight(&self, x: &Signal) -> Result<Signal> {
        x.check_len(self.n)?;
        let mut y = vec![0.0; self.n];
        self.weight_into(x.samples(), &mut y);
        x.with_samples(y)
    }

    pub fn apply_laplacian(&self, x: &Signal) -> Result<Signal> {
        x.check_len(self.n)?;
        let mut y = vec![0.0; self.n];
        self.laplacian_into(x.samples(), &mut y);
        x.with_samples(y)
    }

    pub fn apply_inverse_degree(&self, r: &Signal) -> Result<Signal> {
        r.check_len(self.n)?;
        self.check_degrees()?;
        let mut s = vec![0.0; self.n];
        self.inverse_degree_into(r.samples(), &mut s);
        r.with_samples(s)
    }

    /// One smoothing sweep `D^-1 W x`.
    pub fn smooth(&self, x: &Signal) -> Result<Signal> {
        self.apply_inverse_degree(&self.apply_weight(x)?)
    }

    /// Expand the band into a full matrix. Test and debugging aid only.
    pub fn dense_oracle(&self) -> Result<DenseMatrix> {
        if self.n > DENSE_LIMIT {
            return Err(Error::Size {
                n: self.n,
                limit: DENSE_LIMIT,
            });
        }
        let mut m = DenseMatrix::zeros(self.n);
        for (o, band) in self.bands.iter().enumerate() {
            for (i, &w) in band.iter().enumerate() {
                m.set(i, i + o, w);
                m.set(i + o, i, w);
            }
        }
        Ok(m)
    }

    /// Stored triangle as CSV `i,j,w` with `j >= i`, row-major.
    pub fn weights_csv(&self) -> String {
        let mut out = String::from("i,j,w\n");
        for i in 0..self.n {
            for o in 0..self.bands.len() {
                if i + o < self.n {
                    let _ = writeln!(out, "{},{},{:.16e}", i, i + o, self.bands[o][i]);
                }
            }
        }
        out
    }

    /// Degree vector as CSV `i,d`.
    pub fn degrees_csv(&self) -> String {
        let mut out = String::from("i,d\n");
        for (i, d) in self.degrees.iter().enumerate() {
            let _ = writeln!(out, "{i},{d:.16e}");
        }
        out
    }
}

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}
