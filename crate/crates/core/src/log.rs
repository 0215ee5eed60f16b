//! Per-application trace of an iterative run.

use std::fmt::Write as _;

use serde::Serialize;

use crate::metrics::{metrics_from_slices, Metrics};
use crate::signal::Signal;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iter: usize,
    /// Operator applications (`W x` or `L x` evaluations) so far.
    pub applications: usize,
    pub metrics: Option<Metrics>,
    pub residual_norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum LogEvent {
    /// `s^T r <= 0` with a nonzero residual.
    IndefiniteGamma {
        cycle: usize,
        step: usize,
        gamma: f64,
    },
    /// The cycle stopped early; the iterate from before the failed step was kept.
    Breakdown {
        cycle: usize,
        step: usize,
        reason: String,
    },
    /// Residual exactly zero; nothing left to do in this cycle.
    ZeroResidual { cycle: usize, step: usize },
}

#[derive(Debug, Clone, Default)]
pub struct IterationLog {
    reference: Option<Signal>,
    records: Vec<IterationRecord>,
    events: Vec<LogEvent>,
    applications: usize,
}

impl IterationLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Log that also scores every iterate against `reference`.
    pub fn with_reference(reference: Signal) -> Self {
        Self {
            reference: Some(reference),
            ..Self::default()
        }
    }

    pub fn records(&self) -> &[IterationRecord] {
        &self.records
    }

    pub fn events(&self) -> &[LogEvent] {
        &self.events
    }

    pub fn applications(&self) -> usize {
        self.applications
    }

    pub fn has_breakdown(&self) -> bool {
        self.events
            .iter()
            .any(|e| matches!(e, LogEvent::Breakdown { .. }))
    }

    fn score(&self, x: &[f64]) -> Option<Metrics> {
        self.reference
            .as_ref()
            .and_then(|r| metrics_from_slices(r.samples(), x).ok())
    }

    /// Record the starting point (iteration 0, no applications). Only the
    /// first call has an effect.
    pub fn start(&mut self, x: &[f64], residual_norm: Option<f64>) {
        if self.records.is_empty() {
            let metrics = self.score(x);
            self.records.push(IterationRecord {
                iter: 0,
                applications: self.applications,
                metrics,
                residual_norm,
            });
        }
    }

    /// Count one operator application and record the iterate after it.
    pub fn application(&mut self, x: &[f64], residual_norm: Option<f64>) {
        self.applications += 1;
        let metrics = self.score(x);
        let iter = self.records.last().map_or(1, |r| r.iter + 1);
        self.records.push(IterationRecord {
            iter,
            applications: self.applications,
            metrics,
            residual_norm,
        });
    }

    pub fn event(&mut self, event: LogEvent) {
        self.events.push(event);
    }

    /// CSV `iter,applications,mse,psnr_db,snr_db,residual_norm`; missing
    /// values are left empty.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("iter,applications,mse,psnr_db,snr_db,residual_norm\n");
        for r in &self.records {
            let (mse, psnr, snr) = match r.metrics {
                Some(m) => (fmt_real(m.mse), fmt_real(m.psnr_db), fmt_real(m.snr_db)),
                None => Default::default(),
            };
            let res = r.residual_norm.map(fmt_real).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{mse},{psnr},{snr},{res}",
                r.iter, r.applications
            );
        }
        out
    }
}

/// 17 significant digits; infinities as `inf` / `-inf`.
pub fn fmt_real(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_csv() {
        let clean = Signal::from_samples(vec![0.0, 1.0]).unwrap();
        let mut log = IterationLog::with_reference(clean);
        log.start(&[0.0, 0.0], None);
        log.start(&[9.0, 9.0], None);
        log.application(&[0.0, 1.0], Some(0.5));
        log.application(&[0.0, 0.5], None);
        assert_eq!(log.applications(), 2);
        let apps: Vec<usize> = log.records().iter().map(|r| r.applications).collect();
        assert_eq!(apps, vec![0, 1, 2]);
        let csv = log.to_csv_string();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "iter,applications,mse,psnr_db,snr_db,residual_norm"
        );
        assert_eq!(lines.len(), 4);
        assert!(lines[2].starts_with("1,1,0.0000000000000000e0,inf,inf,5.0"));
        assert!(lines[3].ends_with(','));
    }

    #[test]
    fn no_reference_no_metrics() {
        let mut log = IterationLog::new();
        log.application(&[1.0], None);
        assert_eq!(log.records()[0].metrics, None);
        assert_eq!(log.to_csv_string().lines().nth(1), Some("1,1,,,,"));
    }
}
