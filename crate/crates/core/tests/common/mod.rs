#![allow(dead_code)]

use cgsmooth::{BandedSymOperator, DenseMatrix, Signal};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Piecewise-constant guidance with noise, values roughly in [0, 1].
pub fn random_signal(rng: &mut StdRng, n: usize) -> Signal {
    let mut level = rng.gen::<f64>();
    let samples = (0..n)
        .map(|_| {
            if rng.gen_bool(0.05) {
                level = rng.gen::<f64>();
            }
            level + 0.1 * (rng.gen::<f64>() - 0.5)
        })
        .collect();
    Signal::from_samples(samples).unwrap()
}

/// Signal on a jittered, strictly increasing grid.
pub fn random_positions_signal(rng: &mut StdRng, n: usize) -> Signal {
    let base = random_signal(rng, n);
    let mut p = 0.0;
    let positions = (0..n)
        .map(|_| {
            p += 0.5 + rng.gen::<f64>();
            p
        })
        .collect();
    Signal::new(base.into_samples(), positions).unwrap()
}

pub fn random_vec(rng: &mut StdRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Operator with random positive weights and unrelated positive degrees.
pub fn random_operator(rng: &mut StdRng, n: usize, b: usize) -> BandedSymOperator {
    let bands = (0..=b)
        .map(|o| {
            (0..n.saturating_sub(o))
                .map(|_| rng.gen_range(0.01..2.0))
                .collect()
        })
        .collect();
    let degrees = (0..n).map(|_| rng.gen_range(0.5..5.0)).collect();
    BandedSymOperator::from_parts(n, bands, degrees).unwrap()
}

pub fn dense_laplacian(op: &BandedSymOperator) -> DenseMatrix {
    let w = op.dense_oracle().unwrap();
    let mut l = DenseMatrix::zeros(op.n());
    for i in 0..op.n() {
        for j in 0..op.n() {
            let d = if i == j { op.degrees()[i] } else { 0.0 };
            l.set(i, j, d - w.get(i, j));
        }
    }
    l
}

pub fn abs_matvec(a: &DenseMatrix, x: &[f64]) -> Vec<f64> {
    (0..a.n())
        .map(|i| a.row(i).iter().zip(x).map(|(v, y)| (v * y).abs()).sum())
        .collect()
}

/// Componentwise `|y - want| <= tol * scale` with a floor for zero scales.
pub fn assert_close_scaled(y: &[f64], want: &[f64], scale: &[f64], tol: f64, what: &str) {
    assert_eq!(y.len(), want.len());
    for i in 0..y.len() {
        let bound = tol * scale[i].max(f64::MIN_POSITIVE);
        assert!(
            (y[i] - want[i]).abs() <= bound,
            "{what}: index {i}: got {}, want {}, |diff| {} > {bound}",
            y[i],
            want[i],
            (y[i] - want[i]).abs()
        );
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}
