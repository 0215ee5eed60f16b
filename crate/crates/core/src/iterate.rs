//! Repeated filter sweeps, i.e. power iteration with `D^-1 W`.

use crate::error::Result;
use crate::filters::GraphFilter;
use crate::log::IterationLog;
use crate::signal::Signal;

/// Where the filter weights come from.
#[derive(Debug, Clone, PartialEq)]
pub enum GuidancePolicy {
    /// Weights computed once from this signal and reused (linear filter).
    Fixed(Signal),
    /// Weights recomputed from the current iterate (nonlinear filter).
    SelfGuided,
}

impl GuidancePolicy {
    pub fn is_self_guided(&self) -> bool {
        matches!(self, GuidancePolicy::SelfGuided)
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        match self {
            GuidancePolicy::Fixed(g) => g.check_len(n),
            GuidancePolicy::SelfGuided => Ok(()),
        }
    }
}

/// Apply `iterations` sweeps of `filter` to `x0`.
///
/// Fixed guidance builds the operator once; self-guided sweeps use the
/// previous sweep's output as guidance for the next one.
pub fn iterate_filter(
    x0: &Signal,
    filter: &dyn GraphFilter,
    policy: &GuidancePolicy,
    iterations: usize,
    log: &mut IterationLog,
) -> Result<Signal> {
    policy.check_len(x0.len())?;
    log.start(x0.samples(), None);
    let mut x = x0.clone();
    match policy {
        GuidancePolicy::Fixed(g) => {
            if iterations == 0 {
                return Ok(x);
            }
            let op = filter.build(g)?;
            for _ in 0..iterations {
                x = op.smooth(&x)?;
                log.application(x.samples(), None);
            }
        }
        GuidancePolicy::SelfGuided => {
            for _ in 0..iterations {
                x = filter.step(&x, &x)?;
                log.application(x.samples(), None);
            }
        }
    }
    Ok(x)
}
