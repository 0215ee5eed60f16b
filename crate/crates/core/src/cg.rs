//! Truncated preconditioned conjugate gradients on `L x = 0`.
//!
//! Starting from the noisy signal, each step of PCG with the Jacobi
//! preconditioner `D^-1` removes high-frequency content along the Krylov
//! space of `D^-1 L`; stopping after a handful of operator applications is
//! what keeps the result from collapsing to a constant. One cycle costs
//! `k_max` applications of `L`: the initial residual plus `k_max - 1` steps.
//!
//! For self-guided (nonlinear) filtering the weights are rebuilt from the
//! current iterate at every restart and held fixed inside the cycle, so
//! every cycle is an ordinary linear PCG run. A literal variant that
//! rebuilds `W(x)`, `D(x)` before every inner step is available through
//! [`FreezePolicy::RefreshEveryStep`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::filters::GraphFilter;
use crate::iterate::GuidancePolicy;
use crate::log::{IterationLog, LogEvent};
use crate::operator::BandedSymOperator;
use crate::signal::Signal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreezePolicy {
    /// Rebuild weights only at the start of each cycle.
    #[default]
    FreezeAtRestart,
    /// Rebuild weights from the current iterate before every inner step.
    RefreshEveryStep,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgSchedule {
    /// Operator applications per cycle.
    pub k_max: usize,
    /// Number of cycles; 1 means no restart.
    pub l_max: usize,
    pub guidance: GuidancePolicy,
    pub freeze: FreezePolicy,
}

impl CgSchedule {
    pub fn self_guided(l_max: usize, k_max: usize) -> Self {
        Self {
            k_max,
            l_max,
            guidance: GuidancePolicy::SelfGuided,
            freeze: FreezePolicy::FreezeAtRestart,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_max == 0 {
            return Err(Error::Specification("k_max must be at least 1".into()));
        }
        if self.l_max == 0 {
            return Err(Error::Specification("l_max must be at least 1".into()));
        }
        Ok(())
    }

    /// Total operator applications, `l_max * k_max`.
    pub fn applications(&self) -> usize {
        self.l_max * self.k_max
    }
}

/// A cycle could not continue: `p^T q <= 0` or a non-finite step length.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("CG breakdown in cycle {cycle}, step {step}: {reason}")]
pub struct Breakdown {
    pub cycle: usize,
    pub step: usize,
    pub reason: String,
    /// Last iterate before the failed step.
    pub iterate: Signal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepOutcome {
    Advanced,
    /// The residual is exactly zero; the iterate is a fixed point.
    ZeroResidual,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepFailure {
    NonPositiveCurvature(f64),
    NonFiniteStep(f64),
}

impl std::fmt::Display for StepFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StepFailure::NonPositiveCurvature(c) => write!(f, "p^T q = {c:e} is not positive"),
            StepFailure::NonFiniteStep(a) => write!(f, "step length alpha = {a} is not finite"),
        }
    }
}

/// Working vectors of one PCG cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct PcgState {
    pub x: Vec<f64>,
    /// `W x - D x`, updated by recurrence.
    pub r: Vec<f64>,
    /// `D^-1 r`.
    pub s: Vec<f64>,
    pub p: Vec<f64>,
    /// `L p`.
    pub q: Vec<f64>,
    pub gamma: f64,
    pub gamma_old: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Completed steps in this cycle.
    pub steps: usize,
}

impl PcgState {
    /// Start a cycle at `x`; costs one application of `L`.
    pub fn new(op: &BandedSymOperator, x: Vec<f64>) -> Self {
        let n = x.len();
        let mut r = vec![0.0; n];
        op.laplacian_into(&x, &mut r);
        r.iter_mut().for_each(|v| *v = -*v);
        Self {
            x,
            r,
            s: vec![0.0; n],
            p: vec![0.0; n],
            q: vec![0.0; n],
            gamma: 0.0,
            gamma_old: 0.0,
            alpha: 0.0,
            beta: 0.0,
            steps: 0,
        }
    }

    pub fn residual_norm(&self) -> f64 {
        dot(&self.r, &self.r).sqrt()
    }

    /// One PCG step with operator `op`; applies `L` once unless the
    /// residual is already zero. On failure `x` and `r` are left untouched.
    pub fn step(
        &mut self,
        op: &BandedSymOperator,
    ) -> std::result::Result<StepOutcome, StepFailure> {
        if self.r.iter().all(|&v| v == 0.0) {
            return Ok(StepOutcome::ZeroResidual);
        }
        op.inverse_degree_into(&self.r, &mut self.s);
        self.gamma = dot(&self.s, &self.r);
        if self.steps == 0 {
            self.beta = 0.0;
            self.p.copy_from_slice(&self.s);
        } else {
            self.beta = self.gamma / self.gamma_old;
            for (p, &s) in self.p.iter_mut().zip(&self.s) {
                *p = s + self.beta * *p;
            }
        }
        op.laplacian_into(&self.p, &mut self.q);
        let curvature = dot(&self.p, &self.q);
        if curvature.is_nan() || curvature <= 0.0 {
            return Err(StepFailure::NonPositiveCurvature(curvature));
        }
        let alpha = self.gamma / curvature;
        if !alpha.is_finite() {
            return Err(StepFailure::NonFiniteStep(alpha));
        }
        self.alpha = alpha;
        for ((x, r), (&p, &q)) in self
            .x
            .iter_mut()
            .zip(self.r.iter_mut())
            .zip(self.p.iter().zip(&self.q))
        {
            *x += alpha * p;
            *r -= alpha * q;
        }
        self.gamma_old = self.gamma;
        self.steps += 1;
        Ok(StepOutcome::Advanced)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One cycle of `k_max` applications starting from `x`, with `op` built
/// from the guidance. `rebuild` regenerates the operator from the current
/// iterate before inner steps after the first.
fn run_cycle(
    x: &Signal,
    mut op: BandedSymOperator,
    rebuild: Option<&dyn GraphFilter>,
    k_max: usize,
    cycle: usize,
    log: &mut IterationLog,
) -> Result<Signal> {
    x.check_len(op.n())?;
    op.check_degrees()?;
    let mut state = PcgState::new(&op, x.samples().to_vec());
    log.application(&state.x, Some(state.residual_norm()));

    for k in 1..k_max {
        if let (Some(filter), true) = (rebuild, k > 1) {
            op = filter.build(&x.with_samples(state.x.clone())?)?;
            op.check_degrees()?;
        }
        let zero_residual = state.r.iter().all(|&v| v == 0.0);
        match state.step(&op) {
            Ok(StepOutcome::Advanced) => {
                if (state.gamma.is_nan() || state.gamma <= 0.0) && !zero_residual {
                    log.event(LogEvent::IndefiniteGamma {
                        cycle,
                        step: k,
                        gamma: state.gamma,
                    });
                }
                log.application(&state.x, Some(state.residual_norm()));
            }
            Ok(StepOutcome::ZeroResidual) => {
                log.event(LogEvent::ZeroResidual { cycle, step: k });
                break;
            }
            Err(failure) => {
                // L p was evaluated before the failure was detected.
                log.application(&state.x, Some(state.residual_norm()));
                let reason = failure.to_string();
                log.event(LogEvent::Breakdown {
                    cycle,
                    step: k,
                    reason: reason.clone(),
                });
                return Err(Breakdown {
                    cycle,
                    step: k,
                    reason,
                    iterate: x.with_samples(state.x)?,
                }
                .into());
            }
        }
    }
    x.with_samples(state.x)
}

/// Truncated PCG with weights frozen from `g`.
///
/// Returns `x0` itself for `k_max = 1`. A breakdown is returned as
/// [`Error::Breakdown`] carrying the last finite iterate.
pub fn pcg_truncated(
    x0: &Signal,
    g: &Signal,
    filter: &dyn GraphFilter,
    k_max: usize,
    log: &mut IterationLog,
) -> Result<Signal> {
    if k_max == 0 {
        return Err(Error::Specification("k_max must be at least 1".into()));
    }
    x0.check_len(g.len())?;
    let op = filter.build(g)?;
    log.start(x0.samples(), None);
    run_cycle(x0, op, None, k_max, 1, log)
}

/// Restarted truncated PCG: `l_max` cycles of `k_max` applications each.
///
/// Self-guided schedules rebuild the weights from the current iterate at
/// each restart (or every step, per [`FreezePolicy`]). Fixed guidance uses
/// the same frozen weights for every cycle. A breakdown ends its cycle only;
/// the next cycle restarts from the last finite iterate.
pub fn pcg_restarted(
    x0: &Signal,
    filter: &dyn GraphFilter,
    schedule: &CgSchedule,
    log: &mut IterationLog,
) -> Result<Signal> {
    schedule.validate()?;
    schedule.guidance.check_len(x0.len())?;
    log.start(x0.samples(), None);
    let fixed = match &schedule.guidance {
        GuidancePolicy::Fixed(g) => Some(filter.build(g)?),
        GuidancePolicy::SelfGuided => None,
    };
    let rebuild = match (&schedule.guidance, schedule.freeze) {
        (GuidancePolicy::SelfGuided, FreezePolicy::RefreshEveryStep) => Some(filter),
        _ => None,
    };
    let mut x = x0.clone();
    for cycle in 1..=schedule.l_max {
        let op = match &fixed {
            Some(op) => op.clone(),
            None => filter.build(&x)?,
        };
        x = match run_cycle(&x, op, rebuild, schedule.k_max, cycle, log) {
            Ok(next) => next,
            Err(Error::Breakdown(b)) => b.iterate,
            Err(e) => return Err(e),
        };
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::{BfParams, Bilateral, GfParams, Guided};

    fn wiggle(n: usize) -> Signal {
        Signal::from_samples(
            (0..n)
                .map(|i| 0.5 + 0.3 * ((i * 5) % 7) as f64 / 7.0)
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn k_max_one_is_identity() {
        let x = wiggle(30);
        let bf = Bilateral::new(BfParams::default()).unwrap();
        let mut log = IterationLog::new();
        let y = pcg_truncated(&x, &x, &bf, 1, &mut log).unwrap();
        assert_eq!(y, x);
        assert_eq!(log.applications(), 1);
    }

    #[test]
    fn k_max_zero_rejected() {
        let x = wiggle(8);
        let bf = Bilateral::new(BfParams::default()).unwrap();
        assert!(pcg_truncated(&x, &x, &bf, 0, &mut IterationLog::new()).is_err());
        let sched = CgSchedule::self_guided(0, 3);
        assert!(pcg_restarted(&x, &bf, &sched, &mut IterationLog::new()).is_err());
    }

    #[test]
    fn constant_input_is_fixed_point() {
        let x = Signal::constant(25, 0.3).unwrap();
        let bf = Bilateral::new(BfParams::default()).unwrap();
        let mut log = IterationLog::new();
        let y = pcg_truncated(&x, &x, &bf, 6, &mut log).unwrap();
        assert_eq!(y, x);
        assert_eq!(log.records()[1].residual_norm, Some(0.0));
        assert!(log
            .events()
            .iter()
            .any(|e| matches!(e, LogEvent::ZeroResidual { .. })));

        let mut log = IterationLog::new();
        let y = pcg_restarted(&x, &bf, &CgSchedule::self_guided(4, 5), &mut log).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn application_accounting() {
        let x = wiggle(64);
        let gf = Guided::new(GfParams::default()).unwrap();
        for freeze in [
            FreezePolicy::FreezeAtRestart,
            FreezePolicy::RefreshEveryStep,
        ] {
            let sched = CgSchedule {
                freeze,
                ..CgSchedule::self_guided(3, 4)
            };
            let mut log = IterationLog::new();
            pcg_restarted(&x, &gf, &sched, &mut log).unwrap();
            assert_eq!(log.applications(), 12);
        }
    }

    #[test]
    fn refresh_differs_from_freeze() {
        let x = wiggle(64);
        let bf = Bilateral::new(BfParams::default()).unwrap();
        let frozen = pcg_restarted(
            &x,
            &bf,
            &CgSchedule::self_guided(2, 4),
            &mut IterationLog::new(),
        )
        .unwrap();
        let sched = CgSchedule {
            freeze: FreezePolicy::RefreshEveryStep,
            ..CgSchedule::self_guided(2, 4)
        };
        let refreshed = pcg_restarted(&x, &bf, &sched, &mut IterationLog::new()).unwrap();
        assert_ne!(frozen, refreshed);
    }

    #[test]
    fn breakdown_on_indefinite_operator() {
        // W with a large off-diagonal weight and unit degrees: L = I - W is indefinite.
        #[derive(Debug)]
        struct Bad;
        impl GraphFilter for Bad {
            fn name(&self) -> &'static str {
                "bad"
            }
            fn build(&self, g: &Signal) -> Result<BandedSymOperator> {
                let n = g.len();
                BandedSymOperator::from_parts(n, vec![vec![0.0; n], vec![3.0; n - 1]], vec![1.0; n])
            }
        }
        let x = Signal::constant(4, 1.0).unwrap();
        let mut log = IterationLog::new();
        let err = pcg_truncated(&x, &x, &Bad, 5, &mut log).unwrap_err();
        match err {
            Error::Breakdown(b) => {
                assert_eq!(b.step, 1);
                assert_eq!(b.iterate, x);
                assert!(b.iterate.samples().iter().all(|v| v.is_finite()));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(log.has_breakdown());

        // Restarted runs absorb the breakdown and keep going.
        let mut log = IterationLog::new();
        let y = pcg_restarted(&x, &Bad, &CgSchedule::self_guided(3, 5), &mut log).unwrap();
        assert_eq!(y, x);
        assert_eq!(log.events().len(), 3);
    }
}
