//! One denoising run: generate or load, add noise, denoise, score, write.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use cgsmooth::log::fmt_real;
use cgsmooth::metrics::distance;
use cgsmooth::{
    add_noise, compute_metrics, Denoiser, Error, FilterRegistry, GraphFilter, GuidancePolicy,
    IterationLog, LogEvent, MethodRegistry, Metrics, Signal,
};
use serde::Serialize;

use crate::config::{freeze_name, ExperimentConfig, GuidanceMode};
use crate::error::{read_file, write_file, BenchError, Result};

/// Output file names, relative to the run's output directory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignalFiles {
    pub clean: String,
    pub noisy: String,
    pub denoised: String,
    pub error: String,
    pub log: String,
}

impl SignalFiles {
    fn for_label(label: &str) -> Self {
        Self {
            clean: format!("{label}_clean.csv"),
            noisy: format!("{label}_noisy.csv"),
            denoised: format!("{label}_denoised.csv"),
            error: format!("{label}_error.csv"),
            log: format!("{label}_log.csv"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DenoiseReport {
    pub label: String,
    /// Runs sharing a tag are overlaid in one plot.
    pub experiment: Option<String>,
    pub config: ExperimentConfig,
    pub schedule: String,
    /// Noisy input scored against the clean signal.
    pub input_metrics: Metrics,
    /// Output scored against the clean signal.
    pub output_metrics: Metrics,
    /// Output scored against the noisy input (the alternative error reading).
    pub output_vs_noisy: Metrics,
    /// `||x_hat - x0||` with `x0` the noisy input.
    pub residual_vs_noisy: f64,
    pub applications: usize,
    pub budget: usize,
    /// Seconds spent in the denoise call only.
    pub wall_time_s: f64,
    pub breakdown: bool,
    pub events: Vec<LogEvent>,
    pub files: SignalFiles,
    #[serde(skip)]
    pub out_dir: PathBuf,
}

impl DenoiseReport {
    /// Flat `key=value` lines.
    pub fn to_kv_string(&self) -> String {
        let c = &self.config;
        let bf = &c.filter_params.bilateral;
        let gf = &c.filter_params.guided;
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k}={v}");
        };
        kv("label", self.label.clone());
        kv("experiment", self.experiment.clone().unwrap_or_default());
        kv("filter", c.filter.clone());
        kv("method", c.method.clone());
        kv("schedule", self.schedule.clone());
        kv("guidance", c.guidance.to_string());
        kv("freeze", freeze_name(c.method_params.freeze).into());
        kv("sigma_d", fmt_real(bf.sigma_d));
        kv("sigma_r", fmt_real(bf.sigma_r));
        kv("half_width", bf.half_width.to_string());
        kv("epsilon", fmt_real(gf.epsilon));
        kv("rho", gf.rho.to_string());
        kv("noise_var", fmt_real(c.noise.variance));
        kv("seed", c.noise.seed.to_string());
        kv("length", c.length.to_string());
        kv("input_mse", fmt_real(self.input_metrics.mse));
        kv("input_psnr_db", fmt_real(self.input_metrics.psnr_db));
        kv("input_snr_db", fmt_real(self.input_metrics.snr_db));
        kv("output_mse", fmt_real(self.output_metrics.mse));
        kv("output_psnr_db", fmt_real(self.output_metrics.psnr_db));
        kv("output_snr_db", fmt_real(self.output_metrics.snr_db));
        kv(
            "output_vs_noisy_psnr_db",
            fmt_real(self.output_vs_noisy.psnr_db),
        );
        kv("residual_vs_noisy", fmt_real(self.residual_vs_noisy));
        kv("applications", self.applications.to_string());
        kv("budget", self.budget.to_string());
        kv("wall_time_s", format!("{:.6}", self.wall_time_s));
        kv("breakdown", self.breakdown.to_string());
        kv("events", self.events.len().to_string());
        kv("log", self.files.log.clone());
        out
    }

    pub fn report_txt(&self) -> String {
        format!("{}_report.txt", self.label)
    }

    pub fn report_json(&self) -> String {
        format!("{}_report.json", self.label)
    }
}

/// Clean and noisy signals plus resolved guidance, shared by runs that
/// differ only in method or schedule.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub clean: Signal,
    pub noisy: Signal,
    pub guidance: GuidancePolicy,
}

impl Inputs {
    pub fn prepare(config: &ExperimentConfig) -> Result<Self> {
        let clean = config.clean_signal()?;
        let noisy = add_noise(&clean, &config.noise)?;
        let guidance = match &config.guidance {
            GuidanceMode::SelfGuided => GuidancePolicy::SelfGuided,
            GuidanceMode::Clean => GuidancePolicy::Fixed(clean.clone()),
            GuidanceMode::File(p) => {
                let g = Signal::from_csv_str(&read_file(p)?)?;
                if g.len() != clean.len() {
                    return Err(BenchError::Usage(format!(
                        "guidance {} has {} samples, signal has {}",
                        p.display(),
                        g.len(),
                        clean.len()
                    )));
                }
                GuidancePolicy::Fixed(g)
            }
        };
        Ok(Self {
            clean,
            noisy,
            guidance,
        })
    }
}

pub(crate) struct Outcome {
    pub denoised: Signal,
    pub log: IterationLog,
    pub wall_time_s: f64,
    pub budget: usize,
}

pub(crate) fn strategies(
    config: &ExperimentConfig,
) -> Result<(Box<dyn GraphFilter>, Box<dyn Denoiser>)> {
    let filter = FilterRegistry::builtin().create(&config.filter, &config.filter_params)?;
    let method = MethodRegistry::builtin().create(&config.method, &config.method_params)?;
    Ok((filter, method))
}

/// Denoise `inputs.noisy`; a breakdown keeps the last finite iterate.
pub(crate) fn denoise(
    inputs: &Inputs,
    filter: &dyn GraphFilter,
    method: &dyn Denoiser,
) -> Result<Outcome> {
    let mut log = IterationLog::with_reference(inputs.clean.clone());
    let start = Instant::now();
    let result = method.denoise(&inputs.noisy, filter, &inputs.guidance, &mut log);
    let wall_time_s = start.elapsed().as_secs_f64();
    let denoised = match result {
        Ok(x) => x,
        Err(Error::Breakdown(b)) => b.iterate,
        Err(e) => return Err(e.into()),
    };
    Ok(Outcome {
        denoised,
        log,
        wall_time_s,
        budget: method.budget(),
    })
}

/// Run the full pipeline and write signals, log and report to `config.out_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<DenoiseReport> {
    config.validate()?;
    let inputs = Inputs::prepare(config)?;
    let (filter, method) = strategies(config)?;
    let outcome = denoise(&inputs, filter.as_ref(), method.as_ref())?;
    write_experiment(config, &inputs, outcome)
}

pub(crate) fn write_experiment(
    config: &ExperimentConfig,
    inputs: &Inputs,
    outcome: Outcome,
) -> Result<DenoiseReport> {
    let dir = &config.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    let files = SignalFiles::for_label(&config.label);
    let Outcome {
        denoised,
        log,
        wall_time_s,
        budget,
    } = outcome;
    let error = denoised.with_samples(
        denoised
            .samples()
            .iter()
            .zip(inputs.clean.samples())
            .map(|(x, c)| x - c)
            .collect(),
    )?;
    write_file(&dir.join(&files.clean), &inputs.clean.to_csv_string())?;
    write_file(&dir.join(&files.noisy), &inputs.noisy.to_csv_string())?;
    write_file(&dir.join(&files.denoised), &denoised.to_csv_string())?;
    write_file(&dir.join(&files.error), &error.to_csv_string())?;
    write_file(&dir.join(&files.log), &log.to_csv_string())?;

    let report = DenoiseReport {
        label: config.label.clone(),
        experiment: None,
        config: config.clone(),
        schedule: config.schedule(),
        input_metrics: compute_metrics(&inputs.clean, &inputs.noisy)?,
        output_metrics: compute_metrics(&inputs.clean, &denoised)?,
        output_vs_noisy: compute_metrics(&inputs.noisy, &denoised)?,
        residual_vs_noisy: distance(denoised.samples(), inputs.noisy.samples()),
        applications: log.applications(),
        budget,
        wall_time_s,
        breakdown: log.has_breakdown(),
        events: log.events().to_vec(),
        files,
        out_dir: dir.clone(),
    };
    write_report(&report)?;
    Ok(report)
}

pub(crate) fn write_report(report: &DenoiseReport) -> Result<()> {
    let dir = &report.out_dir;
    write_file(&dir.join(report.report_txt()), &report.to_kv_string())?;
    write_file(
        &dir.join(report.report_json()),
        &(serde_json::to_string_pretty(report)? + "\n"),
    )
}

/// Write the clean and noisy signals and the operator built from the clean
/// signal, without denoising.
pub fn generate(config: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    config.validate()?;
    std::fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    let inputs = Inputs::prepare(config)?;
    let (filter, _) = strategies(config)?;
    let op = filter.build(&inputs.clean)?;
    let outputs = [
        ("clean.csv".to_string(), inputs.clean.to_csv_string()),
        ("noisy.csv".to_string(), inputs.noisy.to_csv_string()),
        (format!("{}_weights.csv", config.filter), op.weights_csv()),
        (format!("{}_degrees.csv", config.filter), op.degrees_csv()),
    ];
    let mut written = Vec::new();
    for (name, text) in outputs {
        let path = dir.join(name);
        write_file(&path, &text)?;
        written.push(path);
    }
    Ok(written)
}
