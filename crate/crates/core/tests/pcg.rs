//! Truncated and restarted PCG, and plain iteration, against dense
//! transcriptions of the same recurrences.

mod common;

use cgsmooth::{
    bf_build, iterate_filter, pcg_restarted, pcg_truncated, BfParams, Bilateral, CgSchedule, Error,
    FreezePolicy, GfParams, GraphFilter, GuidancePolicy, Guided, IterationLog, PcgState, Signal,
};
use common::*;
use rand::Rng;

fn filters() -> Vec<Box<dyn GraphFilter>> {
    vec![
        Box::new(Bilateral::new(BfParams::default()).unwrap()),
        Box::new(Guided::new(GfParams::default()).unwrap()),
    ]
}

fn noisy(rng: &mut rand::rngs::StdRng, n: usize) -> Signal {
    let g = random_signal(rng, n);
    let s = g
        .samples()
        .iter()
        .map(|v| v + 0.1 * rng.gen_range(-1.0..1.0))
        .collect();
    Signal::from_samples(s).unwrap()
}

#[test]
fn one_application_is_the_identity() {
    let mut rng = rng(31);
    for f in filters() {
        let x = noisy(&mut rng, 90);
        let g = random_signal(&mut rng, 90);
        let mut log = IterationLog::new();
        let y = pcg_truncated(&x, &g, f.as_ref(), 1, &mut log).unwrap();
        assert_eq!(y, x);
        assert_eq!(log.applications(), 1);
    }
}

#[test]
fn single_restart_equals_truncated_with_self_guidance() {
    let mut rng = rng(32);
    for f in filters() {
        for k_max in [1, 2, 5, 13] {
            let x = noisy(&mut rng, 150);
            let a = pcg_truncated(&x, &x, f.as_ref(), k_max, &mut IterationLog::new()).unwrap();
            let b = pcg_restarted(
                &x,
                f.as_ref(),
                &CgSchedule::self_guided(1, k_max),
                &mut IterationLog::new(),
            )
            .unwrap();
            assert_eq!(a.samples(), b.samples(), "{} k_max {k_max}", f.name());
        }
    }
}

#[test]
fn two_applications_match_hand_transcribed_dense_step() {
    let mut rng = rng(33);
    for f in filters() {
        for _ in 0..10 {
            let n = rng.gen_range(10..=200);
            let x0 = noisy(&mut rng, n);
            let g = random_signal(&mut rng, n);
            let op = f.build(&g).unwrap();
            let l = dense_laplacian(&op);
            let d = op.degrees();
            let x = x0.samples();

            let lx = l.matvec(x);
            let r: Vec<f64> = lx.iter().map(|v| -v).collect();
            let s: Vec<f64> = (0..n).map(|i| r[i] / d[i]).collect();
            let gamma: f64 = s.iter().zip(&r).map(|(a, b)| a * b).sum();
            let q = l.matvec(&s);
            let alpha = gamma / s.iter().zip(&q).map(|(a, b)| a * b).sum::<f64>();
            let want: Vec<f64> = (0..n).map(|i| x[i] + alpha * s[i]).collect();

            let got = pcg_truncated(&x0, &g, f.as_ref(), 2, &mut IterationLog::new()).unwrap();
            let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let diff = max_abs_diff(got.samples(), &want);
            assert!(diff <= 1e-13 * scale, "{}: {diff}", f.name());
        }
    }
}

#[test]
fn search_directions_are_conjugate() {
    let mut rng = rng(34);
    let n = 300;
    let g = random_signal(&mut rng, n);
    let x = noisy(&mut rng, n);
    let op = bf_build(&g, &BfParams::default()).unwrap();
    let mut state = PcgState::new(&op, x.samples().to_vec());
    state.step(&op).unwrap();
    for _ in 0..6 {
        let q_old = state.q.clone();
        state.step(&op).unwrap();
        let pq: f64 = state.p.iter().zip(&q_old).map(|(a, b)| a * b).sum();
        let rel = pq.abs() / (norm(&state.p) * norm(&q_old));
        assert!(rel <= 1e-8, "step {}: {rel}", state.steps);
    }
}

#[test]
fn many_applications_drive_the_residual_to_zero() {
    let mut rng = rng(35);
    let n = 120;
    let x = noisy(&mut rng, n);
    let g = random_signal(&mut rng, n);
    for f in filters() {
        let op = f.build(&g).unwrap();
        let r0 = norm(op.apply_laplacian(&x).unwrap().samples());
        let y = match pcg_truncated(&x, &g, f.as_ref(), 3 * n, &mut IterationLog::new()) {
            Ok(y) => y,
            // Once converged, rounding can make p^T q non-positive; the
            // iterate before that step is what matters.
            Err(Error::Breakdown(b)) => b.iterate,
            Err(e) => panic!("{e}"),
        };
        let r = norm(op.apply_laplacian(&y).unwrap().samples());
        assert!(r / r0 < 1e-6, "{}: {}", f.name(), r / r0);
    }
}

#[test]
fn application_counts_follow_the_schedule() {
    let mut rng = rng(36);
    let x = noisy(&mut rng, 200);
    for f in filters() {
        for (l, k) in [(1, 1), (3, 11), (5, 5), (2, 19)] {
            let mut log = IterationLog::new();
            pcg_restarted(&x, f.as_ref(), &CgSchedule::self_guided(l, k), &mut log).unwrap();
            assert_eq!(log.applications(), l * k);
            assert_eq!(log.records().len(), l * k + 1);
        }
        let mut log = IterationLog::new();
        iterate_filter(&x, f.as_ref(), &GuidancePolicy::SelfGuided, 17, &mut log).unwrap();
        assert_eq!(log.applications(), 17);
    }
}

#[test]
fn restart_with_fixed_guidance_continues_linear_pcg() {
    let mut rng = rng(37);
    let x = noisy(&mut rng, 100);
    let g = random_signal(&mut rng, 100);
    let bf = Bilateral::new(BfParams::default()).unwrap();
    let schedule = CgSchedule {
        k_max: 4,
        l_max: 2,
        guidance: GuidancePolicy::Fixed(g.clone()),
        freeze: FreezePolicy::FreezeAtRestart,
    };
    let once = pcg_truncated(&x, &g, &bf, 4, &mut IterationLog::new()).unwrap();
    let twice = pcg_truncated(&once, &g, &bf, 4, &mut IterationLog::new()).unwrap();
    let restarted = pcg_restarted(&x, &bf, &schedule, &mut IterationLog::new()).unwrap();
    assert_eq!(restarted.samples(), twice.samples());
}

#[test]
fn fixed_guidance_iteration_is_linear() {
    let mut rng = rng(38);
    let n = 200;
    let g = random_signal(&mut rng, n);
    let x = random_vec(&mut rng, n);
    let y = random_vec(&mut rng, n);
    let (a, b) = (0.7, -1.3);
    let combo: Vec<f64> = x.iter().zip(&y).map(|(u, v)| a * u + b * v).collect();
    let policy = GuidancePolicy::Fixed(g);
    for f in filters() {
        let run = |v: &[f64]| {
            iterate_filter(
                &Signal::from_samples(v.to_vec()).unwrap(),
                f.as_ref(),
                &policy,
                25,
                &mut IterationLog::new(),
            )
            .unwrap()
            .into_samples()
        };
        let (fx, fy, fc) = (run(&x), run(&y), run(&combo));
        let want: Vec<f64> = fx.iter().zip(&fy).map(|(u, v)| a * u + b * v).collect();
        assert!(max_abs_diff(&fc, &want) <= 1e-11, "{}", f.name());
    }
}

#[test]
fn fixed_guidance_iteration_is_power_iteration() {
    let mut rng = rng(39);
    let n = 150;
    let g = random_signal(&mut rng, n);
    let x = noisy(&mut rng, n);
    for f in filters() {
        let op = f.build(&g).unwrap();
        let w = op.dense_oracle().unwrap();
        let mut want = x.samples().to_vec();
        for _ in 0..40 {
            want = w
                .matvec(&want)
                .iter()
                .zip(op.degrees())
                .map(|(v, d)| v / d)
                .collect();
        }
        let got = iterate_filter(
            &x,
            f.as_ref(),
            &GuidancePolicy::Fixed(g.clone()),
            40,
            &mut IterationLog::new(),
        )
        .unwrap();
        assert!(max_abs_diff(got.samples(), &want) <= 1e-10, "{}", f.name());
    }
}

#[test]
fn bilateral_sweeps_stay_within_the_input_range() {
    let mut rng = rng(40);
    let bf = Bilateral::new(BfParams::default()).unwrap();
    for _ in 0..10 {
        let x = noisy(&mut rng, 120);
        let lo = x.samples().iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = x
            .samples()
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        for policy in [
            GuidancePolicy::SelfGuided,
            GuidancePolicy::Fixed(random_signal(&mut rng, 120)),
        ] {
            let y = iterate_filter(&x, &bf, &policy, 30, &mut IterationLog::new()).unwrap();
            assert!(y
                .samples()
                .iter()
                .all(|&v| v >= lo - 1e-12 && v <= hi + 1e-12));
        }
    }
}

#[test]
fn runs_are_deterministic() {
    let mut rng = rng(41);
    let x = noisy(&mut rng, 300);
    for f in filters() {
        for freeze in [
            FreezePolicy::FreezeAtRestart,
            FreezePolicy::RefreshEveryStep,
        ] {
            let schedule = CgSchedule {
                freeze,
                ..CgSchedule::self_guided(3, 6)
            };
            let mut la = IterationLog::new();
            let mut lb = IterationLog::new();
            let a = pcg_restarted(&x, f.as_ref(), &schedule, &mut la).unwrap();
            let b = pcg_restarted(&x, f.as_ref(), &schedule, &mut lb).unwrap();
            assert_eq!(a, b);
            assert_eq!(la.to_csv_string(), lb.to_csv_string());
        }
    }
}
