//! Experiment configuration.
//!
//! Values come from three layers: built-in defaults (the published
//! experiment parameters), an optional flat `key = value` file, and command
//! line flags. Keys are the long flag names without the leading dashes
//! (`sigma-d`, `kmax`, ...); underscores are accepted in place of dashes.
//! Blank lines and lines starting with `#` are ignored.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cgsmooth::{
    generate_clean, CleanSignalSpec, FilterParams, FilterRegistry, FreezePolicy, MethodParams,
    MethodRegistry, NoiseSpec, Signal,
};
use serde::Serialize;

use crate::error::{read_file, BenchError, Result};

/// Source of the filter weights.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GuidanceMode {
    /// Weights follow the current iterate.
    SelfGuided,
    /// Weights frozen from the clean signal.
    Clean,
    /// Weights frozen from a signal CSV.
    File(PathBuf),
}

impl FromStr for GuidanceMode {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "self" => Ok(GuidanceMode::SelfGuided),
            "clean" => Ok(GuidanceMode::Clean),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(GuidanceMode::File(PathBuf::from(p))),
                _ => Err(BenchError::Usage(format!(
                    "guidance must be self, clean or file:PATH, got `{s}`"
                ))),
            },
        }
    }
}

impl fmt::Display for GuidanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GuidanceMode::SelfGuided => f.write_str("self"),
            GuidanceMode::Clean => f.write_str("clean"),
            GuidanceMode::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

pub fn parse_freeze(s: &str) -> Result<FreezePolicy> {
    match s {
        "restart" => Ok(FreezePolicy::FreezeAtRestart),
        "step" => Ok(FreezePolicy::RefreshEveryStep),
        _ => Err(BenchError::Usage(format!(
            "freeze must be restart or step, got `{s}`"
        ))),
    }
}

pub fn freeze_name(f: FreezePolicy) -> &'static str {
    match f {
        FreezePolicy::FreezeAtRestart => "restart",
        FreezePolicy::RefreshEveryStep => "step",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    /// Clean signal CSV; the built-in synthetic signal when absent.
    pub input: Option<PathBuf>,
    /// Length of the synthetic signal (ignored with `input`).
    pub length: usize,
    pub noise: NoiseSpec,
    /// Filter registry key.
    pub filter: String,
    pub filter_params: FilterParams,
    /// Method registry key.
    pub method: String,
    pub method_params: MethodParams,
    pub guidance: GuidanceMode,
    pub out_dir: PathBuf,
    /// Prefix of every output file of this run.
    pub label: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            input: None,
            length: CleanSignalSpec::DEFAULT_LENGTH,
            noise: NoiseSpec {
                variance: NoiseSpec::DEFAULT_VARIANCE,
                seed: 1,
            },
            filter: "bf".into(),
            filter_params: FilterParams::default(),
            method: "iterate".into(),
            method_params: MethodParams::default(),
            guidance: GuidanceMode::SelfGuided,
            out_dir: PathBuf::from("out"),
            label: "run".into(),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| BenchError::Usage(format!("{key}: cannot parse `{value}`: {e}")))
}

impl ExperimentConfig {
    /// Set one option by its key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        let bf = &mut self.filter_params.bilateral;
        let gf = &mut self.filter_params.guided;
        let m = &mut self.method_params;
        match key.as_str() {
            "filter" => self.filter = value.to_string(),
            "method" => self.method = value.to_string(),
            "sigma-d" => bf.sigma_d = parse(&key, value)?,
            "sigma-r" => bf.sigma_r = parse(&key, value)?,
            "half-width" => bf.half_width = parse(&key, value)?,
            "epsilon" => gf.epsilon = parse(&key, value)?,
            "rho" => gf.rho = parse(&key, value)?,
            "iters" => m.iterations = parse(&key, value)?,
            "kmax" => m.k_max = parse(&key, value)?,
            "lmax" => m.l_max = parse(&key, value)?,
            "freeze" => m.freeze = parse_freeze(value)?,
            "guidance" => self.guidance = value.parse()?,
            "noise-var" => self.noise.variance = parse(&key, value)?,
            "seed" => self.noise.seed = parse(&key, value)?,
            "length" => self.length = parse(&key, value)?,
            "out" => self.out_dir = PathBuf::from(value),
            "input" => self.input = Some(PathBuf::from(value)),
            "label" => self.label = value.to_string(),
            _ => return Err(BenchError::Usage(format!("unknown option `{key}`"))),
        }
        Ok(())
    }

    /// Apply the contents of a flat `key = value` file.
    pub fn apply_kv_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                BenchError::Usage(format!("config line {}: expected key=value", n + 1))
            })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn apply_kv_file(&mut self, path: &Path) -> Result<()> {
        self.apply_kv_text(&read_file(path)?)
    }

    /// Check everything that can be checked before running.
    pub fn validate(&self) -> Result<()> {
        FilterRegistry::builtin()
            .create(&self.filter, &self.filter_params)
            .map_err(usage)?;
        MethodRegistry::builtin()
            .create(&self.method, &self.method_params)
            .map_err(usage)?;
        self.noise.validate().map_err(usage)?;
        if self.length == 0 {
            return Err(BenchError::Usage("length must be positive".into()));
        }
        for p in self.input.iter().chain(match &self.guidance {
            GuidanceMode::File(p) => Some(p),
            _ => None,
        }) {
            if !p.is_file() {
                return Err(BenchError::Usage(format!("{} does not exist", p.display())));
            }
        }
        if self.label.is_empty() || self.label.contains(['/', '\\']) {
            return Err(BenchError::Usage(format!(
                "label `{}` is not a plain file prefix",
                self.label
            )));
        }
        Ok(())
    }

    /// Schedule as it appears in reports: `500`, `20` or `3x11`.
    pub fn schedule(&self) -> String {
        let m = &self.method_params;
        match self.method.as_str() {
            "iterate" => m.iterations.to_string(),
            "cg" => m.k_max.to_string(),
            "cg-restart" => format!("{}x{}", m.l_max, m.k_max),
            _ => String::new(),
        }
    }

    pub fn clean_signal(&self) -> Result<Signal> {
        match &self.input {
            Some(p) => Ok(Signal::from_csv_str(&read_file(p)?)?),
            None if self.length == CleanSignalSpec::DEFAULT_LENGTH => {
                Ok(generate_clean(&CleanSignalSpec::default())?)
            }
            None => Ok(generate_clean(
                &CleanSignalSpec::default().resized(self.length)?,
            )?),
        }
    }
}

fn usage(e: cgsmooth::Error) -> BenchError {
    BenchError::Usage(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_text_overrides_defaults() {
        let mut c = ExperimentConfig::default();
        c.apply_kv_text("# bilateral run\nfilter = gf\n\nkmax=13\nsigma_d = 0.75\nguidance=clean\nfreeze=step\n")
            .unwrap();
        assert_eq!(c.filter, "gf");
        assert_eq!(c.method_params.k_max, 13);
        assert_eq!(c.filter_params.bilateral.sigma_d, 0.75);
        assert_eq!(c.guidance, GuidanceMode::Clean);
        assert_eq!(c.method_params.freeze, FreezePolicy::RefreshEveryStep);
    }

    #[test]
    fn bad_entries_are_usage_errors() {
        let mut c = ExperimentConfig::default();
        for text in [
            "nonsense",
            "kmax = three",
            "colour = red",
            "guidance = file:",
            "freeze = never",
        ] {
            assert!(
                matches!(c.apply_kv_text(text), Err(BenchError::Usage(_))),
                "{text}"
            );
        }
        c.filter = "median".into();
        assert!(matches!(c.validate(), Err(BenchError::Usage(_))));
    }

    #[test]
    fn guidance_round_trips_through_display() {
        for s in ["self", "clean", "file:g.csv"] {
            assert_eq!(s.parse::<GuidanceMode>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn schedule_labels() {
        let mut c = ExperimentConfig::default();
        c.method_params.iterations = 600;
        assert_eq!(c.schedule(), "600");
        c.method = "cg-restart".into();
        c.method_params.l_max = 3;
        c.method_params.k_max = 11;
        assert_eq!(c.schedule(), "3x11");
    }
}
