//! Library-level pipeline properties.

use cgsmooth_bench::{
    emit_plot_script, run_experiment, run_suite, sweep_csv, sweep_schedules, ExperimentConfig,
    GuidanceMode,
};

fn config(dir: &std::path::Path, length: usize) -> ExperimentConfig {
    ExperimentConfig {
        out_dir: dir.to_path_buf(),
        length,
        ..ExperimentConfig::default()
    }
}

#[test]
fn zero_sweeps_leave_the_noisy_signal() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(dir.path(), 400);
    c.method_params.iterations = 0;
    let r = run_experiment(&c).unwrap();
    assert_eq!(r.applications, 0);
    assert_eq!(r.output_metrics, r.input_metrics);
    assert_eq!(r.residual_vs_noisy, 0.0);
    assert_eq!(
        std::fs::read(dir.path().join(&r.files.denoised)).unwrap(),
        std::fs::read(dir.path().join(&r.files.noisy)).unwrap()
    );
}

#[test]
fn input_psnr_matches_realized_noise() {
    let dir = tempfile::tempdir().unwrap();
    let r = run_experiment(&config(dir.path(), 4730)).unwrap();
    let predicted = 10.0 * (1.0 / r.input_metrics.mse).log10();
    assert!((r.input_metrics.psnr_db - predicted).abs() < 1e-9);
    assert!((r.input_metrics.psnr_db - 20.0).abs() < 0.2);
}

#[test]
fn application_counts_follow_the_method() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(dir.path(), 300);
    for (method, want) in [("iterate", 7), ("cg", 5), ("cg-restart", 10)] {
        c.method = method.into();
        c.method_params.iterations = 7;
        c.method_params.k_max = 5;
        c.method_params.l_max = 2;
        c.label = method.into();
        let r = run_experiment(&c).unwrap();
        assert_eq!(r.applications, want, "{method}");
        assert_eq!(r.budget, want, "{method}");
    }
}

#[test]
fn single_cell_sweep_matches_the_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(dir.path(), 700);
    c.filter = "gf".into();
    c.method = "cg-restart".into();
    c.method_params.l_max = 4;
    c.method_params.k_max = 6;
    let r = run_experiment(&c).unwrap();
    let cells = sweep_schedules(&c, 4..=4, 6..=6).unwrap();
    assert_eq!(cells.len(), 1);
    assert_eq!(cells[0].result.as_ref().unwrap(), &r.output_metrics);
    assert_eq!(cells[0].applications, r.applications);
}

#[test]
fn sweep_csv_is_sorted_best_first() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(dir.path(), 500);
    c.guidance = GuidanceMode::Clean;
    let cells = sweep_schedules(&c, 1..=3, 2..=5).unwrap();
    assert_eq!(cells.len(), 12);
    assert!(cells.windows(2).all(|w| w[0].psnr_db() >= w[1].psnr_db()));
    let csv = sweep_csv(&cells);
    assert_eq!(csv.lines().count(), 13);
    let (lo, hi) = (3, 2);
    assert!(sweep_schedules(&c, lo..=hi, 2..=5).is_err());
}

#[test]
fn suite_reports_eight_runs_with_expected_ratios() {
    let dir = tempfile::tempdir().unwrap();
    let s = run_suite(&config(dir.path(), 1000)).unwrap();
    assert_eq!(s.reports().count(), 8);
    let ratios: Vec<(String, f64)> = s
        .pairs
        .iter()
        .map(|p| (p.name.clone(), p.ratio()))
        .collect();
    assert_eq!(ratios[2].0, "bf_self");
    assert!((ratios[2].1 - 600.0 / 33.0).abs() < 1e-12);
    assert!((ratios[3].1 - 3.0).abs() < 1e-12);
    assert!(!s.timings_txt().is_empty());
    assert!(!s.summary_csv().contains("wall"));
}

#[test]
fn empty_plot_script_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plot.py");
    emit_plot_script(&[], &path).unwrap();
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("#!/usr/bin/env python3"));
    assert!(!text.contains("FIGURES"));
}

#[test]
fn plot_script_refuses_files_outside_its_directory() {
    let runs = tempfile::tempdir().unwrap();
    let elsewhere = tempfile::tempdir().unwrap();
    let r = run_experiment(&config(runs.path(), 100)).unwrap();
    assert!(emit_plot_script(std::slice::from_ref(&r), &elsewhere.path().join("plot.py")).is_err());
    emit_plot_script(&[r], &runs.path().join("plot.py")).unwrap();
}

#[test]
fn plot_script_is_valid_python() {
    let dir = tempfile::tempdir().unwrap();
    run_suite(&config(dir.path(), 600)).unwrap();
    let status = std::process::Command::new("python3")
        .args([
            "-m",
            "py_compile",
            dir.path().join("plot.py").to_str().unwrap(),
        ])
        .status();
    match status {
        Ok(s) => assert!(s.success()),
        Err(_) => eprintln!("python3 not available; skipped compile check"),
    }
}
