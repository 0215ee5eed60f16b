//! The four paired experiments and the restart-schedule sweep.

use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::path::Path;

use cgsmooth::log::fmt_real;
use cgsmooth::{compute_metrics, Metrics, RestartedCg};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, GuidanceMode};
use crate::error::{write_file, BenchError, Result};
use crate::experiment::{denoise, run_experiment, strategies, write_report, DenoiseReport, Inputs};
use crate::plot::emit_plot_script;

/// PSNR gap within which a pair counts as matching.
pub const PAIR_TOLERANCE_DB: f64 = 0.5;

/// Iterated filter versus CG with the same filter, guidance and noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSpec {
    pub name: &'static str,
    pub filter: &'static str,
    pub self_guided: bool,
    pub sweeps: usize,
    /// Cycles; 1 with fixed guidance means plain truncated CG.
    pub l_max: usize,
    pub k_max: usize,
}

pub const SUITE_PAIRS: [PairSpec; 4] = [
    PairSpec {
        name: "bf_clean",
        filter: "bf",
        self_guided: false,
        sweeps: 500,
        l_max: 1,
        k_max: 20,
    },
    PairSpec {
        name: "gf_clean",
        filter: "gf",
        self_guided: false,
        sweeps: 90,
        l_max: 1,
        k_max: 13,
    },
    PairSpec {
        name: "bf_self",
        filter: "bf",
        self_guided: true,
        sweeps: 600,
        l_max: 3,
        k_max: 11,
    },
    PairSpec {
        name: "gf_self",
        filter: "gf",
        self_guided: true,
        sweeps: 75,
        l_max: 5,
        k_max: 5,
    },
];

impl PairSpec {
    fn configs(&self, base: &ExperimentConfig) -> (ExperimentConfig, ExperimentConfig) {
        let mut it = base.clone();
        it.filter = self.filter.into();
        it.guidance = if self.self_guided {
            GuidanceMode::SelfGuided
        } else {
            GuidanceMode::Clean
        };
        let mut cg = it.clone();
        it.method = "iterate".into();
        it.method_params.iterations = self.sweeps;
        it.label = format!("{}_iterate_{}", self.name, self.sweeps);
        cg.method = if self.self_guided { "cg-restart" } else { "cg" }.into();
        cg.method_params.l_max = self.l_max;
        cg.method_params.k_max = self.k_max;
        cg.label = format!("{}_{}_{}", self.name, cg.method, cg.schedule());
        (it, cg)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairResult {
    pub name: String,
    pub iterated: DenoiseReport,
    pub cg: DenoiseReport,
}

impl PairResult {
    /// Iterated minus CG output PSNR.
    pub fn gap_db(&self) -> f64 {
        self.iterated.output_metrics.psnr_db - self.cg.output_metrics.psnr_db
    }

    /// Application-count reduction of CG over iteration.
    pub fn ratio(&self) -> f64 {
        self.iterated.applications as f64 / self.cg.applications as f64
    }

    pub fn within_tolerance(&self) -> bool {
        self.gap_db().abs() <= PAIR_TOLERANCE_DB
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub pairs: Vec<PairResult>,
}

impl SuiteSummary {
    pub fn reports(&self) -> impl Iterator<Item = &DenoiseReport> {
        self.pairs.iter().flat_map(|p| [&p.iterated, &p.cg])
    }

    pub fn any_breakdown(&self) -> bool {
        self.reports().any(|r| r.breakdown)
    }

    /// One row per run; no timings, so identical seeds give identical bytes.
    pub fn summary_csv(&self) -> String {
        let mut out =
            String::from("experiment,label,filter,method,guidance,schedule,applications,input_psnr_db,psnr_db,snr_db,breakdown\n");
        for p in &self.pairs {
            for r in [&p.iterated, &p.cg] {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    p.name,
                    r.label,
                    r.config.filter,
                    r.config.method,
                    r.config.guidance,
                    r.schedule,
                    r.applications,
                    fmt_real(r.input_metrics.psnr_db),
                    fmt_real(r.output_metrics.psnr_db),
                    fmt_real(r.output_metrics.snr_db),
                    r.breakdown
                );
            }
        }
        out
    }

    pub fn comparisons_csv(&self) -> String {
        let mut out = String::from(
            "experiment,iterated_applications,cg_applications,ratio,iterated_psnr_db,cg_psnr_db,gap_db,within_tolerance\n",
        );
        for p in &self.pairs {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                p.name,
                p.iterated.applications,
                p.cg.applications,
                fmt_real(p.ratio()),
                fmt_real(p.iterated.output_metrics.psnr_db),
                fmt_real(p.cg.output_metrics.psnr_db),
                fmt_real(p.gap_db()),
                p.within_tolerance()
            );
        }
        out
    }

    pub fn timings_txt(&self) -> String {
        let mut out = String::new();
        for r in self.reports() {
            let _ = writeln!(out, "{}={:.6}", r.label, r.wall_time_s);
        }
        out
    }
}

/// Run the four paired experiments into `base.out_dir`, sharing filter
/// parameters, noise and seed from `base`.
///
/// Writes every run's files, `summary.csv`, `comparisons.csv`,
/// `timings.txt` and `plot.py`.
pub fn run_suite(base: &ExperimentConfig) -> Result<SuiteSummary> {
    let mut pairs = Vec::new();
    for spec in SUITE_PAIRS {
        let (it, cg) = spec.configs(base);
        let mut reports = Vec::new();
        for config in [it, cg] {
            let mut r = run_experiment(&config)?;
            r.experiment = Some(spec.name.to_string());
            write_report(&r)?;
            reports.push(r);
        }
        let cg = reports.pop().unwrap();
        let iterated = reports.pop().unwrap();
        pairs.push(PairResult {
            name: spec.name.into(),
            iterated,
            cg,
        });
    }
    let summary = SuiteSummary { pairs };
    let dir = &base.out_dir;
    write_file(&dir.join("summary.csv"), &summary.summary_csv())?;
    write_file(&dir.join("comparisons.csv"), &summary.comparisons_csv())?;
    write_file(&dir.join("timings.txt"), &summary.timings_txt())?;
    let reports: Vec<DenoiseReport> = summary.reports().cloned().collect();
    emit_plot_script(&reports, &dir.join("plot.py"))?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub l_max: usize,
    pub k_max: usize,
    pub applications: usize,
    /// `Err` holds the failure message of a cell that could not be scored.
    pub result: std::result::Result<Metrics, String>,
}

impl SweepCell {
    pub fn psnr_db(&self) -> f64 {
        self.result.as_ref().map_or(f64::NAN, |m| m.psnr_db)
    }
}

/// Restarted CG over every `(l_max, k_max)` in the ranges, with filter,
/// guidance, freeze policy and noise taken from `base`.
///
/// All cells denoise the same noisy signal, so differences between cells
/// come from the schedule alone. Returned sorted by PSNR, best first;
/// failed cells go last.
pub fn sweep_schedules(
    base: &ExperimentConfig,
    l_range: RangeInclusive<usize>,
    k_range: RangeInclusive<usize>,
) -> Result<Vec<SweepCell>> {
    if l_range.is_empty() || k_range.is_empty() || *l_range.start() == 0 || *k_range.start() == 0 {
        return Err(BenchError::Usage(
            "sweep ranges must be non-empty and start at 1 or more".into(),
        ));
    }
    let mut config = base.clone();
    config.method = "cg-restart".into();
    config.validate()?;
    let inputs = Inputs::prepare(&config)?;
    let (filter, _) = strategies(&config)?;
    let grid: Vec<(usize, usize)> = l_range
        .flat_map(|l| k_range.clone().map(move |k| (l, k)))
        .collect();
    let mut cells: Vec<SweepCell> = grid
        .par_iter()
        .map(|&(l_max, k_max)| {
            let method = RestartedCg {
                l_max,
                k_max,
                freeze: config.method_params.freeze,
            };
            let scored = denoise(&inputs, filter.as_ref(), &method).and_then(|o| {
                let m = compute_metrics(&inputs.clean, &o.denoised)?;
                Ok((o.log.applications(), m))
            });
            match scored {
                Ok((applications, m)) => SweepCell {
                    l_max,
                    k_max,
                    applications,
                    result: Ok(m),
                },
                Err(e) => SweepCell {
                    l_max,
                    k_max,
                    applications: 0,
                    result: Err(e.to_string()),
                },
            }
        })
        .collect();
    cells.sort_by(|a, b| {
        let key = |c: &SweepCell| {
            if c.result.is_ok() {
                -c.psnr_db()
            } else {
                f64::INFINITY
            }
        };
        key(a)
            .total_cmp(&key(b))
            .then((a.l_max, a.k_max).cmp(&(b.l_max, b.k_max)))
    });
    Ok(cells)
}

/// `l_max,k_max,applications,psnr_db,snr_db`; failed cells print `nan`.
pub fn sweep_csv(cells: &[SweepCell]) -> String {
    let mut out = String::from("l_max,k_max,applications,psnr_db,snr_db\n");
    for c in cells {
        let (p, s) = match &c.result {
            Ok(m) => (fmt_real(m.psnr_db), fmt_real(m.snr_db)),
            Err(_) => ("nan".into(), "nan".into()),
        };
        let _ = writeln!(out, "{},{},{},{p},{s}", c.l_max, c.k_max, c.applications);
    }
    out
}

/// Sweep and write `sweep.csv` into `base.out_dir`.
pub fn run_sweep(
    base: &ExperimentConfig,
    l_range: RangeInclusive<usize>,
    k_range: RangeInclusive<usize>,
) -> Result<Vec<SweepCell>> {
    let cells = sweep_schedules(base, l_range, k_range)?;
    let dir: &Path = &base.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    write_file(&dir.join("sweep.csv"), &sweep_csv(&cells))?;
    Ok(cells)
}

/// Default sweep ranges around the published schedule lists.
pub fn default_ranges(filter: &str) -> (RangeInclusive<usize>, RangeInclusive<usize>) {
    match filter {
        "gf" => (3..=11, 3..=7),
        _ => (2..=31, 3..=19),
    }
}
