use super::*;
use crate::grid_ops::{Grid, GridSequence};
use crate::kernels::kernel_exponential;
use crate::semidiscrete::{nonlinearity_quadratic, ProblemOptions};

/// `v'' = -v` in first-order form.
struct Oscillator;

impl OdeSystem for Oscillator {
    fn dim(&self) -> usize {
        2
    }
    fn eval(&self, y: &[f64], dy: &mut [f64]) {
        dy[0] = y[1];
        dy[1] = -y[0];
    }
    fn position_len(&self) -> Option<usize> {
        Some(1)
    }
}

/// `v'' = 6 v^2`, solved by `v = (T - t)^-2`.
struct SquareBlowup;

impl OdeSystem for SquareBlowup {
    fn dim(&self) -> usize {
        2
    }
    fn eval(&self, y: &[f64], dy: &mut [f64]) {
        dy[0] = y[1];
        dy[1] = 6.0 * y[0] * y[0];
    }
    fn position_len(&self) -> Option<usize> {
        Some(1)
    }
}

fn rk4(dt: f64, t_end: f64) -> IntegratorConfig {
    IntegratorConfig {
        method: Method::Rk4Fixed,
        dt: Some(dt),
        t_end,
        ..Default::default()
    }
}

fn oscillator_error(cfg: &IntegratorConfig) -> f64 {
    let out = solve(&Oscillator, &[1.0, 0.0], cfg, &[]).unwrap();
    assert_eq!(out.status, Status::Completed);
    assert_eq!(out.t, cfg.t_end);
    (out.y[0] - cfg.t_end.cos()).abs().max((out.y[1] + cfg.t_end.sin()).abs())
}

#[test]
fn rk4_is_fourth_order_on_oscillator() {
    let e1 = oscillator_error(&rk4(0.1, 2.0));
    let e2 = oscillator_error(&rk4(0.05, 2.0));
    let rate = (e1 / e2).log2();
    assert!((rate - 4.0).abs() < 0.1, "rate {rate}");
    assert!(oscillator_error(&rk4(0.01, 1.0)) < 1e-9);
}

#[test]
fn adaptive_meets_tolerance() {
    let cfg = IntegratorConfig {
        t_end: 10.0,
        rel_tol: 1e-10,
        abs_tol: 1e-10,
        ..Default::default()
    };
    let e = oscillator_error(&cfg);
    assert!(e < 1e-8, "{e}");
    let loose = IntegratorConfig {
        rel_tol: 1e-5,
        abs_tol: 1e-5,
        ..cfg.clone()
    };
    let out_tight = solve(&Oscillator, &[1.0, 0.0], &cfg, &[]).unwrap();
    let out_loose = solve(&Oscillator, &[1.0, 0.0], &loose, &[]).unwrap();
    assert!(out_loose.stats.accepted < out_tight.stats.accepted);
}

#[test]
fn output_times_are_hit_exactly() {
    let times = [0.0, 0.3, 1.7, 2.5, 9.0];
    for cfg in [rk4(0.07, 2.5), IntegratorConfig { t_end: 2.5, ..Default::default() }] {
        let out = solve(&Oscillator, &[1.0, 0.0], &cfg, &times).unwrap();
        let ts: Vec<f64> = out.snapshots.iter().map(|s| s.0).collect();
        assert_eq!(ts, vec![0.0, 0.3, 1.7, 2.5]);
        for (t, y) in &out.snapshots {
            assert!((y[0] - t.cos()).abs() < 1e-5, "t={t}");
        }
    }
}

#[test]
fn trace_is_uniform_and_increasing() {
    let cfg = IntegratorConfig { t_end: 4.0, ..Default::default() };
    let out = solve(&Oscillator, &[1.0, 0.0], &cfg, &[]).unwrap();
    assert_eq!(out.trace.len(), cfg.trace_samples + 1);
    for (k, p) in out.trace.iter().enumerate() {
        let t = 4.0 * k as f64 / cfg.trace_samples as f64;
        assert!((p.t - t).abs() < 1e-12);
        // Hermite interpolation is accurate to well below the plot scale
        assert!((p.linf - t.cos().abs()).abs() < 1e-5, "t={t}");
    }
}

#[test]
fn square_blowup_crossing_and_extrapolation() {
    let big_t = 1.0;
    let cfg = IntegratorConfig { t_end: 2.0, ..Default::default() };
    let out = solve(&SquareBlowup, &[1.0, 2.0], &cfg, &[]).unwrap();
    assert_eq!(out.status, Status::BlowupDetected);
    // v = 1e8 at T - 1e-4
    let crossing = out.threshold_crossing_time.unwrap();
    assert!((crossing - (big_t - 1e-4)).abs() < 2e-6, "{crossing}");
    let estimate = out.blowup_time_estimate.unwrap();
    assert!((estimate - big_t).abs() < 1e-6, "{estimate}");
    assert!(out.trace.windows(2).all(|w| w[0].t < w[1].t));
    assert_eq!(out.trace.last().unwrap().t, crossing);
}

#[test]
fn estimate_is_insensitive_to_threshold() {
    let estimates: Vec<f64> = [1e4, 1e6, 1e8]
        .iter()
        .map(|&m| {
            let cfg = IntegratorConfig {
                t_end: 2.0,
                blowup_threshold: m,
                ..Default::default()
            };
            solve(&SquareBlowup, &[1.0, 2.0], &cfg, &[])
                .unwrap()
                .blowup_time_estimate
                .unwrap()
        })
        .collect();
    for e in &estimates {
        assert!((e - 1.0).abs() < 1e-6, "{estimates:?}");
    }
}

fn small_problem() -> Problem {
    let g = Grid::symmetric(0.25, 40).unwrap();
    Problem::from_functions(
        &kernel_exponential(),
        nonlinearity_quadratic(),
        g,
        |x: f64| 0.3 * (-x * x).exp(),
        |x: f64| 0.1 * x * (-x * x).exp(),
        ProblemOptions::default(),
    )
    .unwrap()
}

#[test]
fn rk4_step_is_time_reversible_to_high_order() {
    let p = small_problem();
    let s0 = p.initial_state().clone();
    let mut prev: Option<f64> = None;
    for dt in [0.2, 0.1] {
        let back = step_rk4(&p, &step_rk4(&p, &s0, dt).unwrap(), -dt).unwrap();
        let diff = back
            .to_vector()
            .iter()
            .zip(s0.to_vector())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(back.t.abs() < 1e-15);
        if let Some(d) = prev {
            let rate: f64 = (d / diff).log2();
            assert!(rate > 4.5, "rate {rate}");
        }
        prev = Some(diff);
    }
}

#[test]
fn zero_data_stays_zero() {
    let g = Grid::symmetric(0.5, 10).unwrap();
    let p = Problem::new(
        &kernel_exponential(),
        nonlinearity_quadratic(),
        GridSequence::zeros(g),
        GridSequence::zeros(g),
        ProblemOptions::default(),
    )
    .unwrap();
    for cfg in [rk4(0.1, 3.0), IntegratorConfig { t_end: 3.0, ..Default::default() }] {
        let out = integrate(&p, &cfg).unwrap();
        assert_eq!(out.status, Status::Completed);
        assert!(out.final_state.to_vector().iter().all(|&x| x == 0.0));
        assert!(out.trace.iter().all(|p| p.linf == 0.0));
        assert_eq!(out.final_state.t, 3.0);
    }
}

#[test]
fn rk4_and_adaptive_agree_on_small_problem() {
    let p = small_problem();
    let a = integrate(&p, &rk4(0.01, 2.0)).unwrap();
    let b = integrate(&p, &IntegratorConfig { t_end: 2.0, ..Default::default() }).unwrap();
    let diff = a
        .final_state
        .to_vector()
        .iter()
        .zip(b.final_state.to_vector())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    assert!(diff < 1e-8, "{diff}");
}

#[test]
fn invalid_configs_are_rejected() {
    let bad = [
        IntegratorConfig { method: Method::Rk4Fixed, dt: None, ..Default::default() },
        IntegratorConfig { dt: Some(-1.0), ..Default::default() },
        IntegratorConfig { rel_tol: 0.0, ..Default::default() },
        IntegratorConfig { t_end: f64::NAN, ..Default::default() },
        IntegratorConfig { blowup_threshold: 0.0, ..Default::default() },
    ];
    for cfg in bad {
        assert!(cfg.validate().is_err(), "{cfg:?}");
    }
    assert!("leapfrog".parse::<Method>().is_err());
    assert_eq!("rk4_fixed".parse::<Method>().unwrap(), Method::Rk4Fixed);
}

#[test]
fn initial_data_above_threshold_stops_at_zero() {
    let cfg = IntegratorConfig { blowup_threshold: 0.5, ..Default::default() };
    let out = solve(&Oscillator, &[1.0, 0.0], &cfg, &[]).unwrap();
    assert_eq!(out.status, Status::BlowupDetected);
    assert_eq!(out.threshold_crossing_time, Some(0.0));
}
