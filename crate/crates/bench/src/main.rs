//! `cgsmooth` command line: generate, denoise, suite, sweep, plot.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 numerical breakdown
//! (outputs written with the last finite iterate).

use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use cgsmooth_bench::{
    default_ranges, emit_plot_script_for, entries_in_dir, generate, run_experiment, run_suite,
    run_sweep, BenchError, ExperimentConfig, Result,
};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "cgsmooth",
    version,
    about = "Edge-preserving 1D denoising with CG-accelerated graph filters"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write clean and noisy signals and the filter's weight and degree dumps.
    Generate(Common),
    /// Run one denoising experiment.
    Denoise(Common),
    /// Run the four paired iterated-versus-CG experiments.
    Suite(Common),
    /// Grid over restart schedules `lmax x kmax` with restarted CG.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Range of cycles, `A:B` inclusive.
        #[arg(long, value_name = "A:B")]
        lmax_range: Option<String>,
        /// Range of applications per cycle, `A:B` inclusive.
        #[arg(long, value_name = "A:B")]
        kmax_range: Option<String>,
    },
    /// Write plot.py for every report in the output directory.
    Plot(Common),
}

/// Options shared by every subcommand. Flags override `--config`.
#[derive(Args)]
struct Common {
    /// Flat key=value file; keys are the long flag names.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long, value_parser = ["bf", "gf"])]
    filter: Option<String>,
    #[arg(long, value_parser = ["iterate", "cg", "cg-restart"])]
    method: Option<String>,
    #[arg(long)]
    sigma_d: Option<String>,
    #[arg(long)]
    sigma_r: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    rho: Option<String>,
    #[arg(long)]
    half_width: Option<String>,
    /// Sweeps of the iterated filter.
    #[arg(long)]
    iters: Option<String>,
    /// Operator applications per CG cycle.
    #[arg(long)]
    kmax: Option<String>,
    /// CG cycles.
    #[arg(long)]
    lmax: Option<String>,
    /// self, clean or file:PATH.
    #[arg(long)]
    guidance: Option<String>,
    #[arg(long, value_parser = ["restart", "step"])]
    freeze: Option<String>,
    #[arg(long)]
    noise_var: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    length: Option<String>,
    /// Clean signal CSV instead of the built-in synthetic signal.
    #[arg(long)]
    input: Option<String>,
    /// Output file prefix for `denoise`.
    #[arg(long)]
    label: Option<String>,
    #[arg(long, value_name = "DIR")]
    out: Option<String>,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut c = ExperimentConfig::default();
        if let Some(p) = &self.config {
            c.apply_kv_file(p)?;
        }
        let flags = [
            ("filter", &self.filter),
            ("method", &self.method),
            ("sigma-d", &self.sigma_d),
            ("sigma-r", &self.sigma_r),
            ("epsilon", &self.epsilon),
            ("rho", &self.rho),
            ("half-width", &self.half_width),
            ("iters", &self.iters),
            ("kmax", &self.kmax),
            ("lmax", &self.lmax),
            ("guidance", &self.guidance),
            ("freeze", &self.freeze),
            ("noise-var", &self.noise_var),
            ("seed", &self.seed),
            ("length", &self.length),
            ("input", &self.input),
            ("label", &self.label),
            ("out", &self.out),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                c.set(k, v)?;
            }
        }
        Ok(c)
    }
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>> {
    let bad = || BenchError::Usage(format!("range must look like A:B, got `{s}`"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok(a.trim().parse().map_err(|_| bad())?..=b.trim().parse().map_err(|_| bad())?)
}

/// `Ok(true)` when a breakdown occurred.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Generate(common) => {
            let c = common.config()?;
            for p in generate(&c, &c.out_dir)? {
                println!("{}", p.display());
            }
            Ok(false)
        }
        Command::Denoise(common) => {
            let report = run_experiment(&common.config()?)?;
            print!("{}", report.to_kv_string());
            Ok(report.breakdown)
        }
        Command::Suite(common) => {
            let summary = run_suite(&common.config()?)?;
            print!("{}", summary.comparisons_csv());
            Ok(summary.any_breakdown())
        }
        Command::Sweep {
            common,
            lmax_range,
            kmax_range,
        } => {
            let c = common.config()?;
            let (dl, dk) = default_ranges(&c.filter);
            let l = lmax_range
                .as_deref()
                .map(parse_range)
                .transpose()?
                .unwrap_or(dl);
            let k = kmax_range
                .as_deref()
                .map(parse_range)
                .transpose()?
                .unwrap_or(dk);
            let cells = run_sweep(&c, l, k)?;
            for cell in cells.iter().take(10) {
                println!(
                    "{}x{} psnr_db={:.4}",
                    cell.l_max,
                    cell.k_max,
                    cell.psnr_db()
                );
            }
            Ok(false)
        }
        Command::Plot(common) => {
            let c = common.config()?;
            let entries = entries_in_dir(&c.out_dir)?;
            let path = c.out_dir.join("plot.py");
            emit_plot_script_for(&entries, &path)?;
            println!("{}", path.display());
            Ok(false)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("numerical breakdown; outputs hold the last finite iterate");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
