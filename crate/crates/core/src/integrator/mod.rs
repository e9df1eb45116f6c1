//! Time integration of the semi-discrete system with a blow-up monitor.
//!
//! Two methods are available: classical RK4 with a fixed step, and the
//! Dormand-Prince 5(4) pair with PI step-size control. Both clamp steps so
//! that requested output times are hit exactly, record a trace of
//! `||v||_inf`, and stop once that norm exceeds the blow-up threshold.

mod blowup;
mod dopri;

pub use blowup::{detect_blowup, extrapolate_remaining_time, TracePoint, CROSSING_RESOLUTION};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid_ops::linf;
use crate::semidiscrete::{Problem, SystemState};
use dopri::Dopri5;

/// An autonomous system `y' = F(y)`.
pub trait OdeSystem: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, y: &[f64], dy: &mut [f64]);
    /// For second-order systems stored as `[v; w]`, the length of `v`. The
    /// blow-up monitor watches `||v||_inf` when this is set and `||y||_inf`
    /// otherwise.
    fn position_len(&self) -> Option<usize> {
        None
    }
}

impl OdeSystem for Problem {
    fn dim(&self) -> usize {
        2 * self.len()
    }

    fn eval(&self, y: &[f64], dy: &mut [f64]) {
        self.eval_into(y, dy)
    }

    fn position_len(&self) -> Option<usize> {
        Some(self.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    Rk4Fixed,
    #[default]
    Rk45Adaptive,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Rk4Fixed => "rk4_fixed",
            Method::Rk45Adaptive => "rk45_adaptive",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4_fixed" | "rk4" => Ok(Method::Rk4Fixed),
            "rk45_adaptive" | "rk45" | "dopri5" => Ok(Method::Rk45Adaptive),
            other => Err(Error::InvalidConfig(format!(
                "unknown integrator method '{other}' (expected rk4_fixed or rk45_adaptive)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Step for `rk4_fixed`; initial step guess for `rk45_adaptive` (chosen
    /// automatically when `None`).
    pub dt: Option<f64>,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub t_end: f64,
    pub blowup_threshold: f64,
    /// Adaptive steps below this size end the run with `StepUnderflow`.
    pub min_step: f64,
    /// Number of uniformly spaced trace samples on `[0, t_end]`.
    pub trace_samples: usize,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Rk45Adaptive,
            dt: None,
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            t_end: 1.0,
            blowup_threshold: 1e8,
            min_step: 1e-14,
            trace_samples: 200,
            max_steps: 20_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return bad(format!("t_end must be finite and >= 0, got {}", self.t_end));
        }
        if let Some(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return bad(format!("dt must be positive, got {dt}"));
            }
        } else if self.method == Method::Rk4Fixed {
            return bad("rk4_fixed requires dt".into());
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return bad(format!(
                "tolerances must be positive, got rel_tol={} abs_tol={}",
                self.rel_tol, self.abs_tol
            ));
        }
        if !(self.blowup_threshold > 0.0) {
            return bad(format!(
                "blowup_threshold must be positive, got {}",
                self.blowup_threshold
            ));
        }
        if !(self.min_step > 0.0) {
            return bad(format!("min_step must be positive, got {}", self.min_step));
        }
        if self.max_steps == 0 {
            return bad("max_steps must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Completed,
    BlowupDetected,
    StepUnderflow,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Completed => "completed",
            Status::BlowupDetected => "blowup_detected",
            Status::StepUnderflow => "step_underflow",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

/// Raw result on the flat state vector.
#[derive(Debug, Clone)]
pub struct OdeOutcome {
    pub status: Status,
    pub t: f64,
    pub y: Vec<f64>,
    /// Time at which the monitored norm first exceeded the threshold.
    pub threshold_crossing_time: Option<f64>,
    /// Estimate of the singular time, extrapolated past the crossing.
    pub blowup_time_estimate: Option<f64>,
    pub trace: Vec<TracePoint>,
    pub snapshots: Vec<(f64, Vec<f64>)>,
    pub stats: StepStats,
}

/// Result of integrating a [`Problem`].
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationOutcome {
    pub status: Status,
    pub final_state: SystemState,
    pub threshold_crossing_time: Option<f64>,
    pub blowup_time_estimate: Option<f64>,
    pub trace: Vec<TracePoint>,
    pub snapshots: Vec<SystemState>,
    pub stats: StepStats,
}

/// One classical RK4 step of size `dt` (which may be negative).
pub fn step_rk4(problem: &Problem, state: &SystemState, dt: f64) -> Result<SystemState> {
    if !dt.is_finite() {
        return Err(Error::InvalidConfig(format!("dt must be finite, got {dt}")));
    }
    if state.v.grid() != problem.grid() {
        return Err(Error::InvalidGrid("state is not on the problem grid".into()));
    }
    let y = state.to_vector();
    let mut ws = Rk4Work::new(y.len());
    let mut k1 = vec![0.0; y.len()];
    problem.eval(&y, &mut k1);
    let mut y_new = vec![0.0; y.len()];
    ws.step(problem, &y, &k1, dt, &mut y_new);
    SystemState::from_vector(state.t + dt, *problem.grid(), &y_new)
}

/// Integrates `problem` from its initial state to `config.t_end`.
pub fn integrate(problem: &Problem, config: &IntegratorConfig) -> Result<IntegrationOutcome> {
    integrate_with_outputs(problem, config, &[])
}

/// Like [`integrate`], also returning the state at each of `output_times`
/// reached before the run stops.
pub fn integrate_with_outputs(
    problem: &Problem,
    config: &IntegratorConfig,
    output_times: &[f64],
) -> Result<IntegrationOutcome> {
    let init = problem.initial_state();
    let raw = solve(problem, &init.to_vector(), config, output_times)?;
    let grid = *problem.grid();
    let snapshots = raw
        .snapshots
        .iter()
        .map(|(t, y)| SystemState::from_vector(*t, grid, y))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntegrationOutcome {
        status: raw.status,
        final_state: SystemState::from_vector(raw.t, grid, &raw.y)?,
        threshold_crossing_time: raw.threshold_crossing_time,
        blowup_time_estimate: raw.blowup_time_estimate,
        trace: raw.trace,
        snapshots,
        stats: raw.stats,
    })
}

struct Rk4Work {
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4Work {
    fn new(dim: usize) -> Self {
        Self {
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            tmp: vec![0.0; dim],
        }
    }

    #[allow(clippy::needless_range_loop)]
    fn step<S: OdeSystem + ?Sized>(&mut self, sys: &S, y: &[f64], k1: &[f64], dt: f64, out: &mut [f64]) {
        let n = y.len();
        for i in 0..n {
            self.tmp[i] = y[i] + 0.5 * dt * k1[i];
        }
        sys.eval(&self.tmp, &mut self.k2);
        for i in 0..n {
            self.tmp[i] = y[i] + 0.5 * dt * self.k2[i];
        }
        sys.eval(&self.tmp, &mut self.k3);
        for i in 0..n {
            self.tmp[i] = y[i] + dt * self.k3[i];
        }
        sys.eval(&self.tmp, &mut self.k4);
        for i in 0..n {
            out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }
}

enum Stepper {
    Rk4(Rk4Work),
    Dopri(Dopri5),
}

// PI controller constants for the adaptive method.
const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
const PI_BETA: f64 = 0.04;
const ERR_EXPONENT: f64 = 0.2 - 0.75 * PI_BETA;

fn monitor(y: &[f64], position_len: Option<usize>) -> f64 {
    linf(&y[..position_len.unwrap_or(y.len())])
}

/// Cubic Hermite interpolant on `[0, h]` at `theta * h`.
fn hermite(y0: f64, f0: f64, y1: f64, f1: f64, h: f64, theta: f64) -> f64 {
    let t2 = theta * theta;
    let t3 = t2 * theta;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + theta;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1
}

fn initial_step<S: OdeSystem + ?Sized>(sys: &S, y: &[f64], f: &[f64], cfg: &IntegratorConfig) -> f64 {
    // Hairer-Norsett-Wanner starting step heuristic.
    let sc = |i: usize| cfg.abs_tol + cfg.rel_tol * y[i].abs();
    let block = sys.position_len().unwrap_or(y.len());
    let rms = |v: &dyn Fn(usize) -> f64| {
        (dopri::paired_sum(y.len(), block, |i| v(i).powi(2)) / y.len().max(1) as f64).sqrt()
    };
    let d0 = rms(&|i| y[i] / sc(i));
    let d1 = rms(&|i| f[i] / sc(i));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1: Vec<f64> = (0..y.len()).map(|i| y[i] + h0 * f[i]).collect();
    let mut f1 = vec![0.0; y.len()];
    sys.eval(&y1, &mut f1);
    let d2 = rms(&|i| (f1[i] - f[i]) / sc(i)) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    let h = (100.0 * h0).min(h1);
    if h.is_finite() && h > 0.0 {
        h
    } else {
        1e-6
    }
}

/// Integrates `y' = F(y)` from `y0` at `t = 0` to `config.t_end`.
///
/// `output_times` outside `[0, t_end]` are ignored; the rest are hit exactly.
pub fn solve<S: OdeSystem + ?Sized>(
    sys: &S,
    y0: &[f64],
    config: &IntegratorConfig,
    output_times: &[f64],
) -> Result<OdeOutcome> {
    config.validate()?;
    let dim = sys.dim();
    if y0.len() != dim {
        return Err(Error::LengthMismatch {
            expected: dim,
            actual: y0.len(),
        });
    }
    let pos = sys.position_len();
    let block = pos.unwrap_or(dim);
    let threshold = config.blowup_threshold;
    let dense_level = threshold.sqrt();
    let t_end = config.t_end;

    let mut outputs: Vec<f64> = output_times
        .iter()
        .copied()
        .filter(|t| t.is_finite() && *t >= 0.0 && *t <= t_end)
        .collect();
    outputs.sort_by(f64::total_cmp);
    outputs.dedup();

    let mut stats = StepStats::default();
    let mut y = y0.to_vec();
    let mut f = vec![0.0; dim];
    sys.eval(&y, &mut f);
    stats.rhs_evals += 1;

    let samples = config.trace_samples.max(1);
    let sample_time = |k: usize| t_end * k as f64 / samples as f64;
    let mut trace = vec![TracePoint {
        t: 0.0,
        linf: monitor(&y, pos),
    }];
    let mut next_sample = 1usize;
    let mut snapshots = Vec::new();
    let mut next_output = 0usize;
    while next_output < outputs.len() && outputs[next_output] == 0.0 {
        snapshots.push((0.0, y.clone()));
        next_output += 1;
    }

    let outcome = |status, t, y, crossing, estimate, trace, snapshots, stats| OdeOutcome {
        status,
        t,
        y,
        threshold_crossing_time: crossing,
        blowup_time_estimate: estimate,
        trace,
        snapshots,
        stats,
    };

    if !(trace[0].linf <= threshold) {
        return Ok(outcome(
            Status::BlowupDetected,
            0.0,
            y,
            Some(0.0),
            Some(0.0),
            trace,
            snapshots,
            stats,
        ));
    }
    if t_end == 0.0 {
        return Ok(outcome(Status::Completed, 0.0, y, None, None, trace, snapshots, stats));
    }

    let mut stepper = match config.method {
        Method::Rk4Fixed => Stepper::Rk4(Rk4Work::new(dim)),
        Method::Rk45Adaptive => Stepper::Dopri(Dopri5::new(dim)),
    };
    let mut h_next = match (config.method, config.dt) {
        (_, Some(dt)) => dt,
        (Method::Rk45Adaptive, None) => {
            stats.rhs_evals += 1;
            initial_step(sys, &y, &f, config)
        }
        (Method::Rk4Fixed, None) => unreachable!("validated"),
    };
    let mut err_prev: f64 = 1e-4;
    let mut y_new = vec![0.0; dim];
    let mut f_new = vec![0.0; dim];
    let mut t = 0.0f64;

    loop {
        if t >= t_end {
            return Ok(outcome(Status::Completed, t, y, None, None, trace, snapshots, stats));
        }
        if stats.accepted + stats.rejected >= config.max_steps {
            return Err(Error::Diverged(format!(
                "step budget of {} exhausted at t = {t}",
                config.max_steps
            )));
        }
        let target = outputs.get(next_output).copied().unwrap_or(t_end).min(t_end);
        let remaining = target - t;
        let (h, hits_target) = if h_next >= remaining * (1.0 - 1e-12) {
            (remaining, true)
        } else {
            (h_next, false)
        };

        match &mut stepper {
            Stepper::Rk4(ws) => {
                ws.step(sys, &y, &f, h, &mut y_new);
                sys.eval(&y_new, &mut f_new);
                stats.rhs_evals += 4;
            }
            Stepper::Dopri(dp) => {
                let err =
                    dp.step(sys, &y, &f, h, config.rel_tol, config.abs_tol, block, &mut y_new, &mut f_new);
                stats.rhs_evals += 6;
                if !(err <= 1.0) {
                    stats.rejected += 1;
                    let factor = if err.is_finite() {
                        (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0)
                    } else {
                        MIN_FACTOR
                    };
                    h_next = h * factor;
                    if h_next < config.min_step {
                        let estimate = estimate_blowup(sys, &y, &f, t, pos);
                        return Ok(outcome(
                            Status::StepUnderflow,
                            t,
                            y,
                            None,
                            estimate,
                            trace,
                            snapshots,
                            stats,
                        ));
                    }
                    continue;
                }
                let err = err.max(1e-10);
                let factor = (SAFETY * err.powf(-ERR_EXPONENT) * err_prev.powf(PI_BETA))
                    .clamp(MIN_FACTOR, MAX_FACTOR);
                err_prev = err;
                // A step shortened to land on an output time does not shrink
                // the proposal for the next one.
                h_next = if hits_target { h_next.max(h * factor) } else { h * factor };
            }
        }
        stats.accepted += 1;
        let t_new = if hits_target { target } else { t + h };
        let m_new = monitor(&y_new, pos);

        if !(m_new <= threshold) {
            // Re-integrate single steps from (t, y) to bisect the crossing.
            let norm_at = |s: f64| {
                let mut out = vec![0.0; dim];
                single_step(sys, config.method, &y, &f, s - t, &mut out);
                monitor(&out, pos)
            };
            let bracket = [
                TracePoint {
                    t,
                    linf: monitor(&y, pos),
                },
                TracePoint { t: t_new, linf: m_new },
            ];
            let t_cross = detect_blowup(&bracket, threshold, Some(&norm_at)).unwrap_or(t_new);
            let mut y_cross = vec![0.0; dim];
            single_step(sys, config.method, &y, &f, t_cross - t, &mut y_cross);
            push_samples(&mut trace, &mut next_sample, samples, &sample_time, t, t_cross, h, &y, &f, &y_new, &f_new, pos);
            let m_cross = monitor(&y_cross, pos);
            if t_cross > trace.last().map_or(f64::NEG_INFINITY, |p| p.t) {
                trace.push(TracePoint { t: t_cross, linf: m_cross });
            }
            let estimate = if y_cross.iter().all(|x| x.is_finite()) {
                let mut f_cross = vec![0.0; dim];
                sys.eval(&y_cross, &mut f_cross);
                estimate_blowup(sys, &y_cross, &f_cross, t_cross, pos)
            } else {
                None
            }
            .or(Some(t_cross));
            log::info!("blow-up threshold {threshold:e} crossed at t = {t_cross}");
            return Ok(outcome(
                Status::BlowupDetected,
                t_cross,
                y_cross,
                Some(t_cross),
                estimate,
                trace,
                snapshots,
                stats,
            ));
        }

        push_samples(&mut trace, &mut next_sample, samples, &sample_time, t, t_new, h, &y, &f, &y_new, &f_new, pos);
        if m_new > dense_level && t_new > trace.last().map_or(f64::NEG_INFINITY, |p| p.t) {
            trace.push(TracePoint { t: t_new, linf: m_new });
        }
        std::mem::swap(&mut y, &mut y_new);
        std::mem::swap(&mut f, &mut f_new);
        t = t_new;
        if hits_target && next_output < outputs.len() && outputs[next_output] == target {
            snapshots.push((t, y.clone()));
            next_output += 1;
        }
    }
}

/// Appends uniformly spaced trace samples in `(t0, t1]` using the cubic
/// Hermite interpolant of the step.
#[allow(clippy::too_many_arguments)]
fn push_samples(
    trace: &mut Vec<TracePoint>,
    next_sample: &mut usize,
    samples: usize,
    sample_time: &dyn Fn(usize) -> f64,
    t0: f64,
    t1: f64,
    h: f64,
    y0: &[f64],
    f0: &[f64],
    y1: &[f64],
    f1: &[f64],
    pos: Option<usize>,
) {
    let n = pos.unwrap_or(y0.len());
    while *next_sample <= samples {
        let ts = sample_time(*next_sample);
        if ts > t1 * (1.0 + 1e-14) {
            break;
        }
        let theta = if h > 0.0 { ((ts - t0) / h).clamp(0.0, 1.0) } else { 1.0 };
        let m = (0..n)
            .map(|i| hermite(y0[i], f0[i], y1[i], f1[i], h, theta).abs())
            .fold(0.0f64, |a, b| if b.is_nan() { f64::INFINITY } else { a.max(b) });
        if ts > trace.last().map_or(f64::NEG_INFINITY, |p| p.t) {
            trace.push(TracePoint { t: ts, linf: m });
        }
        *next_sample += 1;
    }
}

/// Extrapolated singular time from the state `(v, w)` and `v'' = F_w(y)`.
fn estimate_blowup<S: OdeSystem + ?Sized>(
    _sys: &S,
    y: &[f64],
    f: &[f64],
    t: f64,
    pos: Option<usize>,
) -> Option<f64> {
    let n = pos?;
    extrapolate_remaining_time(&y[..n], &y[n..], &f[n..]).map(|r| t + r)
}

/// One step of `method` with size `h` from `(y, f(y))`, with fresh buffers.
fn single_step<S: OdeSystem + ?Sized>(
    sys: &S,
    method: Method,
    y: &[f64],
    f: &[f64],
    h: f64,
    out: &mut [f64],
) {
    match method {
        Method::Rk4Fixed => Rk4Work::new(y.len()).step(sys, y, f, h, out),
        Method::Rk45Adaptive => {
            let mut f_out = vec![0.0; y.len()];
            Dopri5::new(y.len()).step(sys, y, f, h, 1.0, 1.0, y.len(), out, &mut f_out);
        }
    }
}

#[cfg(test)]
mod tests;
