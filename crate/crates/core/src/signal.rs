//! 1D signals on a chain graph, synthetic clean signals and additive noise.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::GaussianStream;

/// Samples attached to strictly increasing vertex positions.
///
/// Positions are shared between a signal and everything derived from it, so
/// producing a filtered copy only allocates the new samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    positions: Arc<[f64]>,
}

impl Signal {
    pub fn new(samples: Vec<f64>, positions: Vec<f64>) -> Result<Self> {
        if samples.len() != positions.len() {
            return Err(Error::Dimension {
                expected: samples.len(),
                found: positions.len(),
            });
        }
        if samples.is_empty() {
            return Err(Error::InvalidSignal(
                "signal must have at least one sample".into(),
            ));
        }
        if let Some(i) = positions.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidSignal(format!("position {i} is not finite")));
        }
        if let Some(i) = positions.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSignal(format!(
                "positions must be strictly increasing (index {})",
                i + 1
            )));
        }
        check_finite(&samples)?;
        Ok(Self {
            samples,
            positions: positions.into(),
        })
    }

    /// Signal on the unit-spaced grid `0, 1, ..., n-1`.
    pub fn from_samples(samples: Vec<f64>) -> Result<Self> {
        let positions = (0..samples.len()).map(|i| i as f64).collect();
        Self::new(samples, positions)
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Self::from_samples(vec![value; n])
    }

    /// A new signal on the same positions.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != self.len() {
            return Err(Error::Dimension {
                expected: self.len(),
                found: samples.len(),
            });
        }
        check_finite(&samples)?;
        Ok(Self {
            samples,
            positions: Arc::clone(&self.positions),
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.len() == n {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected: n,
                found: self.len(),
            })
        }
    }

    /// CSV with header `index,position,value`, LF line endings and every
    /// real printed with 17 significant digits.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::with_capacity(48 * (self.len() + 1));
        out.push_str("index,position,value\n");
        for (i, (p, v)) in self.positions.iter().zip(&self.samples).enumerate() {
            let _ = writeln!(out, "{i},{p:.16e},{v:.16e}");
        }
        out
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next().map(str::trim) {
            Some("index,position,value") => {}
            other => {
                return Err(Error::InvalidSignal(format!(
                    "expected header `index,position,value`, found {other:?}"
                )))
            }
        }
        let mut samples = Vec::new();
        let mut positions = Vec::new();
        for (row, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::InvalidSignal(format!(
                    "row {row}: expected 3 fields, found {}",
                    fields.len()
                )));
            }
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidSignal(format!("row {row}: {e}")))
            };
            positions.push(parse(fields[1])?);
            samples.push(parse(fields[2])?);
        }
        Self::new(samples, positions)
    }
}

fn check_finite(samples: &[f64]) -> Result<()> {
    match samples.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::InvalidSignal(format!("sample {i} is not finite"))),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SegmentShape {
    Constant {
        level: f64,
    },
    /// Linear from `from` at the first sample to `to` at the last.
    Ramp {
        from: f64,
        to: f64,
    },
    /// Jump to `level`, held for the whole segment.
    Step {
        level: f64,
    },
    /// `center + amplitude * sin(2 pi t / period)`, `t` counted from the segment start.
    Sine {
        center: f64,
        amplitude: f64,
        period: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub count: usize,
    pub shape: SegmentShape,
}

impl Segment {
    pub fn new(count: usize, shape: SegmentShape) -> Self {
        Self { count, shape }
    }

    fn value_range(&self) -> (f64, f64) {
        match self.shape {
            SegmentShape::Constant { level } | SegmentShape::Step { level } => (level, level),
            SegmentShape::Ramp { from, to } => (from.min(to), from.max(to)),
            SegmentShape::Sine {
                center, amplitude, ..
            } => (center - amplitude.abs(), center + amplitude.abs()),
        }
    }

    fn render(&self, out: &mut Vec<f64>) {
        let n = self.count;
        match self.shape {
            SegmentShape::Constant { level } | SegmentShape::Step { level } => {
                out.extend(std::iter::repeat_n(level, n))
            }
            SegmentShape::Ramp { from, to } => {
                let denom = n.saturating_sub(1).max(1) as f64;
                out.extend((0..n).map(|t| from + (to - from) * (t as f64 / denom)))
            }
            SegmentShape::Sine {
                center,
                amplitude,
                period,
            } => out.extend((0..n).map(|t| center + amplitude * (TAU * t as f64 / period).sin())),
        }
    }
}

/// Piecewise description of a synthetic clean signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleanSignalSpec {
    pub length: usize,
    pub segments: Vec<Segment>,
}

impl CleanSignalSpec {
    pub const DEFAULT_LENGTH: usize = 4730;

    pub fn validate(&self) -> Result<()> {
        if self.length == 0 {
            return Err(Error::Specification("length must be positive".into()));
        }
        let total: usize = self.segments.iter().map(|s| s.count).sum();
        if total != self.length {
            return Err(Error::Specification(format!(
                "segment counts sum to {total}, expected {}",
                self.length
            )));
        }
        for (i, seg) in self.segments.iter().enumerate() {
            if seg.count == 0 {
                return Err(Error::Specification(format!("segment {i} is empty")));
            }
            if let SegmentShape::Sine { period, .. } = seg.shape {
                if !(period.is_finite() && period > 0.0) {
                    return Err(Error::Specification(format!(
                        "segment {i}: sine period must be positive"
                    )));
                }
            }
            let (lo, hi) = seg.value_range();
            if !(lo >= 0.0 && hi <= 1.0) {
                return Err(Error::Specification(format!(
                    "segment {i}: values [{lo}, {hi}] leave [0, 1]"
                )));
            }
        }
        Ok(())
    }

    /// Rescale segment counts proportionally so they sum to `length`.
    ///
    /// Rounding leftovers go to the last segment; segments never shrink
    /// below one sample, so `length` must be at least the segment count.
    pub fn resized(&self, length: usize) -> Result<Self> {
        if length < self.segments.len() {
            return Err(Error::Specification(format!(
                "cannot fit {} segments into {length} samples",
                self.segments.len()
            )));
        }
        let old = self.length as f64;
        let mut segments: Vec<Segment> = self
            .segments
            .iter()
            .map(|s| {
                Segment::new(
                    ((s.count as f64 * length as f64 / old).round() as usize).max(1),
                    s.shape,
                )
            })
            .collect();
        let mut total: usize = segments.iter().map(|s| s.count).sum();
        // Trim from the longest segments first when rounding overshoots.
        while total > length {
            let idx = (0..segments.len())
                .max_by_key(|&i| segments[i].count)
                .unwrap();
            segments[idx].count -= 1;
            total -= 1;
        }
        if let Some(last) = segments.last_mut() {
            last.count += length - total;
        }
        Ok(Self { length, segments })
    }
}

impl Default for CleanSignalSpec {
    /// Steps of several heights (including a narrow 60-sample pulse), two
    /// ramps, flat plateaus and two sine stretches spanning exactly `[0, 1]`.
    fn default() -> Self {
        use SegmentShape::*;
        let segments = vec![
            Segment::new(400, Constant { level: 0.2 }),
            Segment::new(350, Step { level: 0.8 }),
            Segment::new(500, Ramp { from: 0.8, to: 0.3 }),
            Segment::new(200, Step { level: 0.9 }),
            Segment::new(300, Step { level: 0.35 }),
            Segment::new(
                720,
                Sine {
                    center: 0.35,
                    amplitude: 0.25,
                    period: 190.0,
                },
            ),
            Segment::new(300, Step { level: 1.0 }),
            Segment::new(200, Step { level: 0.0 }),
            Segment::new(60, Step { level: 0.6 }),
            Segment::new(200, Step { level: 0.0 }),
            Segment::new(
                450,
                Ramp {
                    from: 0.0,
                    to: 0.75,
                },
            ),
            Segment::new(350, Step { level: 0.2 }),
            Segment::new(
                350,
                Sine {
                    center: 0.2,
                    amplitude: 0.15,
                    period: 115.0,
                },
            ),
            Segment::new(350, Step { level: 0.8 }),
        ];
        Self {
            length: Self::DEFAULT_LENGTH,
            segments,
        }
    }
}

/// Render a clean signal on the unit grid `0..length`.
pub fn generate_clean(spec: &CleanSignalSpec) -> Result<Signal> {
    spec.validate()?;
    let mut samples = Vec::with_capacity(spec.length);
    for seg in &spec.segments {
        seg.render(&mut samples);
    }
    Signal::from_samples(samples)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub variance: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub const DEFAULT_VARIANCE: f64 = 0.01;

    pub fn new(variance: f64, seed: u64) -> Result<Self> {
        let spec = Self { variance, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.variance.is_finite() && self.variance > 0.0 {
            Ok(())
        } else {
            Err(Error::Specification(format!(
                "noise variance must be positive, got {}",
                self.variance
            )))
        }
    }
}

/// The noise sequence `eta` itself, `n` draws of `N(0, variance)`.
pub fn gaussian_noise(n: usize, noise: &NoiseSpec) -> Result<Vec<f64>> {
    noise.validate()?;
    let sigma = noise.variance.sqrt();
    let mut stream = GaussianStream::new(noise.seed);
    Ok((0..n).map(|_| sigma * stream.next_standard()).collect())
}

/// `x + eta` with `eta` drawn from the documented generator in [`crate::rng`].
pub fn add_noise(x: &Signal, noise: &NoiseSpec) -> Result<Signal> {
    let eta = gaussian_noise(x.len(), noise)?;
    let samples = x.samples().iter().zip(eta).map(|(v, e)| v + e).collect();
    x.with_samples(samples)
}
