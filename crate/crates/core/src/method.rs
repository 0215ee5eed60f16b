//! Denoising methods selectable by name: plain iteration, truncated PCG
//! and restarted PCG all drive a [`GraphFilter`] towards a smoothed signal.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cg::{pcg_restarted, pcg_truncated, CgSchedule, FreezePolicy};
use crate::error::{Error, Result};
use crate::filters::GraphFilter;
use crate::iterate::{iterate_filter, GuidancePolicy};
use crate::log::IterationLog;
use crate::signal::Signal;

pub trait Denoiser: Send + Sync + fmt::Debug {
    /// Registry key, e.g. `"cg-restart"`.
    fn name(&self) -> &'static str;

    /// Operator applications the method will spend when nothing breaks down.
    fn budget(&self) -> usize;

    fn denoise(
        &self,
        x0: &Signal,
        filter: &dyn GraphFilter,
        guidance: &GuidancePolicy,
        log: &mut IterationLog,
    ) -> Result<Signal>;
}

/// Plain repeated sweeps.
#[derive(Debug, Clone, Copy)]
pub struct Iterated {
    pub iterations: usize,
}

impl Denoiser for Iterated {
    fn name(&self) -> &'static str {
        "iterate"
    }

    fn budget(&self) -> usize {
        self.iterations
    }

    fn denoise(
        &self,
        x0: &Signal,
        filter: &dyn GraphFilter,
        guidance: &GuidancePolicy,
        log: &mut IterationLog,
    ) -> Result<Signal> {
        iterate_filter(x0, filter, guidance, self.iterations, log)
    }
}

/// One truncated PCG cycle. Self-guidance freezes the weights at `x0`.
#[derive(Debug, Clone, Copy)]
pub struct TruncatedCg {
    pub k_max: usize,
}

impl Denoiser for TruncatedCg {
    fn name(&self) -> &'static str {
        "cg"
    }

    fn budget(&self) -> usize {
        self.k_max
    }

    fn denoise(
        &self,
        x0: &Signal,
        filter: &dyn GraphFilter,
        guidance: &GuidancePolicy,
        log: &mut IterationLog,
    ) -> Result<Signal> {
        let g = match guidance {
            GuidancePolicy::Fixed(g) => g,
            GuidancePolicy::SelfGuided => x0,
        };
        pcg_truncated(x0, g, filter, self.k_max, log)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RestartedCg {
    pub l_max: usize,
    pub k_max: usize,
    pub freeze: FreezePolicy,
}

impl Denoiser for RestartedCg {
    fn name(&self) -> &'static str {
        "cg-restart"
    }

    fn budget(&self) -> usize {
        self.l_max * self.k_max
    }

    fn denoise(
        &self,
        x0: &Signal,
        filter: &dyn GraphFilter,
        guidance: &GuidancePolicy,
        log: &mut IterationLog,
    ) -> Result<Signal> {
        let schedule = CgSchedule {
            k_max: self.k_max,
            l_max: self.l_max,
            guidance: guidance.clone(),
            freeze: self.freeze,
        };
        pcg_restarted(x0, filter, &schedule, log)
    }
}

/// Iteration counts shared by every registered method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodParams {
    pub iterations: usize,
    pub k_max: usize,
    pub l_max: usize,
    pub freeze: FreezePolicy,
}

impl Default for MethodParams {
    fn default() -> Self {
        Self {
            iterations: 100,
            k_max: 5,
            l_max: 1,
            freeze: FreezePolicy::FreezeAtRestart,
        }
    }
}

pub type MethodFactory = fn(&MethodParams) -> Result<Box<dyn Denoiser>>;

#[derive(Clone)]
pub struct MethodRegistry {
    factories: BTreeMap<&'static str, MethodFactory>,
}

impl MethodRegistry {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    /// `iterate`, `cg` and `cg-restart`.
    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        reg.register("iterate", |p| {
            Ok(Box::new(Iterated {
                iterations: p.iterations,
            }))
        });
        reg.register("cg", |p| {
            check_positive("k_max", p.k_max)?;
            Ok(Box::new(TruncatedCg { k_max: p.k_max }))
        });
        reg.register("cg-restart", |p| {
            check_positive("k_max", p.k_max)?;
            check_positive("l_max", p.l_max)?;
            Ok(Box::new(RestartedCg {
                l_max: p.l_max,
                k_max: p.k_max,
                freeze: p.freeze,
            }))
        });
        reg
    }

    pub fn register(&mut self, name: &'static str, factory: MethodFactory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    pub fn create(&self, name: &str, params: &MethodParams) -> Result<Box<dyn Denoiser>> {
        let factory = self
            .factories
            .get(name)
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "method",
                name: name.to_string(),
            })?;
        factory(params)
    }
}

fn check_positive(what: &str, v: usize) -> Result<()> {
    if v == 0 {
        Err(Error::Specification(format!("{what} must be at least 1")))
    } else {
        Ok(())
    }
}

impl Default for MethodRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl fmt::Debug for MethodRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.factories.keys()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_round_trip() {
        let reg = MethodRegistry::builtin();
        assert_eq!(
            reg.names().collect::<Vec<_>>(),
            vec!["cg", "cg-restart", "iterate"]
        );
        let params = MethodParams {
            iterations: 4,
            k_max: 3,
            l_max: 2,
            freeze: FreezePolicy::FreezeAtRestart,
        };
        let budgets: Vec<(String, usize)> = reg
            .names()
            .map(|n| {
                let m = reg.create(n, &params).unwrap();
                (m.name().to_string(), m.budget())
            })
            .collect();
        assert_eq!(
            budgets,
            vec![
                ("cg".into(), 3),
                ("cg-restart".into(), 6),
                ("iterate".into(), 4)
            ]
        );
        assert!(reg.create("gmres", &params).is_err());
        assert!(reg
            .create("cg", &MethodParams { k_max: 0, ..params })
            .is_err());
    }
}
