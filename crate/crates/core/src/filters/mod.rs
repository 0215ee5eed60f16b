//! Edge-preserving filters viewed as weighted graphs on the sample chain.
//!
//! Each filter kind implements [`GraphFilter`]: given a guidance signal it
//! builds the weight matrix `W` and degree matrix `D`, and it knows how to
//! perform one smoothing sweep. Kinds are registered by name in a
//! [`FilterRegistry`] so benchmarks can pick one at runtime.

mod bilateral;
mod guided;
mod mean;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use bilateral::{bf_build, bf_step, BfParams, Bilateral};
pub use guided::{gf_build, gf_coefficients, gf_step_fast, GfParams, Guided};
pub use mean::{box_mean, mean_filter};

use crate::error::{Error, Result};
use crate::operator::BandedSymOperator;
use crate::signal::Signal;

pub trait GraphFilter: Send + Sync + fmt::Debug {
    /// Registry key, e.g. `"bf"`.
    fn name(&self) -> &'static str;

    /// Weights `W(g)` and degrees `D(g)` for guidance `g`.
    fn build(&self, guidance: &Signal) -> Result<BandedSymOperator>;

    /// One sweep `D^-1 W x` with weights taken from `guidance`.
    fn step(&self, x: &Signal, guidance: &Signal) -> Result<Signal> {
        x.check_len(guidance.len())?;
        self.build(guidance)?.smooth(x)
    }
}

/// Union of every registered filter's hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FilterParams {
    pub bilateral: BfParams,
    pub guided: GfParams,
}

pub type FilterFactory = fn(&FilterParams) -> Result<Box<dyn GraphFilter>>;

#[derive(Clone)]
pub struct FilterRegistry {
    factories: BTreeMap<&'static str, FilterFactory>,
}

impl FilterRegistry {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    /// `bf` (bilateral) and `gf` (guided).
    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        reg.register("bf", |p| Ok(Box::new(Bilateral::new(p.bilateral)?)));
        reg.register("gf", |p| Ok(Box::new(Guided::new(p.guided)?)));
        reg
    }

    pub fn register(&mut self, name: &'static str, factory: FilterFactory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    pub fn create(&self, name: &str, params: &FilterParams) -> Result<Box<dyn GraphFilter>> {
        let factory = self
            .factories
            .get(name)
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "filter",
                name: name.to_string(),
            })?;
        factory(params)
    }
}

impl Default for FilterRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl fmt::Debug for FilterRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.factories.keys()).finish()
    }
}
