use super::{Profile, Setup};
use crate::error::{Error, Result};
use crate::grid_ops::{Grid, GridSequence};
use crate::par;
use crate::integrator::{integrate_with_outputs, IntegratorConfig, Status};

/// Travelling wave `A sech^2(B (x - c t - x0))` of the improved Boussinesq
/// equation with `f(u) = u + u^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolitaryWave {
    c: f64,
    x0: f64,
    amplitude: f64,
    width: f64,
}

impl SolitaryWave {
    /// Requires `|c| > 1`.
    pub fn new(c: f64, x0: f64) -> Result<Self> {
        if !(c.is_finite() && c * c > 1.0) || !x0.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "solitary wave needs |c| > 1 and finite x0, got c = {c}, x0 = {x0}"
            )));
        }
        let amplitude = 1.5 * (c * c - 1.0);
        let width = amplitude.sqrt() / (6f64.sqrt() * c.abs());
        Ok(Self {
            c,
            x0,
            amplitude,
            width,
        })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn width(&self) -> f64 {
        self.width
    }
}

fn sech2(z: f64) -> f64 {
    let c = z.cosh();
    1.0 / (c * c)
}

pub fn solitary_exact(wave: &SolitaryWave, x: f64, t: f64) -> f64 {
    wave.amplitude * sech2(wave.width * (x - wave.c * t - wave.x0))
}

/// `(phi, psi)` with `psi = -c phi'`.
pub fn solitary_initial_data(
    wave: &SolitaryWave,
) -> (impl Fn(f64) -> f64 + Sync + Send, impl Fn(f64) -> f64 + Sync + Send) {
    let w = *wave;
    let phi = move |x: f64| solitary_exact(&w, x, 0.0);
    let psi = move |x: f64| {
        let z = w.width * (x - w.x0);
        2.0 * w.amplitude * w.width * w.c * sech2(z) * z.tanh()
    };
    (phi, psi)
}

/// `max_i |numerical_i - exact(x_i, t)|`.
pub fn error_linf(numerical: &GridSequence, exact: impl Fn(f64, f64) -> f64, t: f64) -> f64 {
    let g = numerical.grid();
    g.points()
        .zip(numerical.values())
        .map(|(x, &v)| (v - exact(x, t)).abs())
        .fold(0.0f64, |m, e| if e.is_nan() { f64::INFINITY } else { m.max(e) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub h: f64,
    /// Number of subintervals per half-domain, `x_right / h` for symmetric
    /// domains.
    pub n: i64,
    pub error: f64,
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub times: Vec<f64>,
}

/// Observed orders from consecutive `(h, E)` pairs:
/// `ln(E_prev / E) / ln(h_prev / h)`, i.e. `log2(E_{2h} / E_h)` under halving.
pub fn convergence_rates(hs: &[f64], errors: &[f64]) -> Vec<Option<f64>> {
    (0..errors.len())
        .map(|k| {
            if k == 0 {
                return None;
            }
            let (e0, e1) = (errors[k - 1], errors[k]);
            let (h0, h1) = (hs[k - 1], hs[k]);
            if e0 > 0.0 && e1 > 0.0 && h0 != h1 {
                Some((e0 / e1).ln() / (h0 / h1).ln())
            } else if e0 == e1 {
                Some(0.0)
            } else {
                None
            }
        })
        .collect()
}

fn check_decreasing(h_list: &[f64]) -> Result<()> {
    if h_list.is_empty() || h_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidConfig(format!(
            "h list must be non-empty and strictly decreasing, got {h_list:?}"
        )));
    }
    Ok(())
}

fn max_time(times: &[f64]) -> Result<f64> {
    let t = times.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if times.is_empty() || !(t >= 0.0) {
        return Err(Error::InvalidConfig("need at least one evaluation time >= 0".into()));
    }
    Ok(t)
}

/// Runs the solitary wave on `[x_left, x_right]` for each `h` and reports the
/// largest nodal error over `times` together with the observed orders.
pub fn convergence_study(
    setup: &Setup,
    domain: (f64, f64),
    h_list: &[f64],
    times: &[f64],
    wave: &SolitaryWave,
) -> Result<ConvergenceReport> {
    check_decreasing(h_list)?;
    let t_end = max_time(times)?;
    let (phi, psi) = solitary_initial_data(wave);
    let errors = par::map_collect(h_list, |&h| -> Result<(i64, f64)> {
        let grid = Grid::from_interval(h, domain.0, domain.1)?;
        let out = setup.run_completed(grid, &phi, &psi, t_end, times)?;
        let e = out
            .snapshots
            .iter()
            .map(|s| error_linf(&s.v, |x, t| solitary_exact(wave, x, t), s.t))
            .fold(0.0f64, f64::max);
        Ok((grid.i_max(), e))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(assemble(h_list, &errors, times))
}

fn assemble(h_list: &[f64], errors: &[(i64, f64)], times: &[f64]) -> ConvergenceReport {
    let es: Vec<f64> = errors.iter().map(|e| e.1).collect();
    let rates = convergence_rates(h_list, &es);
    ConvergenceReport {
        rows: h_list
            .iter()
            .zip(errors)
            .zip(rates)
            .map(|((&h, &(n, error)), rate)| ConvergenceRow { h, n, error, rate })
            .collect(),
        times: times.to_vec(),
    }
}

/// Self-convergence for data without a closed-form solution: every run is
/// compared at its own nodes with a reference run at `h_min / 4`.
pub fn self_convergence_study(
    setup: &Setup,
    domain: (f64, f64),
    h_list: &[f64],
    times: &[f64],
    phi: Profile,
    psi: Profile,
) -> Result<ConvergenceReport> {
    check_decreasing(h_list)?;
    let t_end = max_time(times)?;
    let h_ref = h_list[h_list.len() - 1] / 4.0;
    let mut jobs: Vec<f64> = h_list.to_vec();
    jobs.push(h_ref);
    let runs = par::map_collect(&jobs, |&h| -> Result<(Grid, Vec<GridSequence>)> {
        let grid = Grid::from_interval(h, domain.0, domain.1)?;
        let out = setup.run_completed(grid, phi, psi, t_end, times)?;
        Ok((grid, out.snapshots.into_iter().map(|s| s.v).collect()))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let (_, reference) = &runs[runs.len() - 1];
    let mut errors = Vec::with_capacity(h_list.len());
    for (grid, snaps) in &runs[..h_list.len()] {
        let ratio = (grid.h() / h_ref).round() as i64;
        let mut e = 0.0f64;
        for (s, r) in snaps.iter().zip(reference) {
            for i in grid.indices() {
                e = e.max((s.at(i) - r.at(i * ratio)).abs());
            }
        }
        errors.push((grid.i_max(), e));
    }
    Ok(assemble(h_list, &errors, times))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainRow {
    pub n: i64,
    pub status: Status,
    /// Nodal error at each evaluation time; infinite for times after the run
    /// stopped.
    pub errors: Vec<f64>,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainReport {
    pub h: f64,
    pub times: Vec<f64>,
    pub rows: Vec<DomainRow>,
}

/// Fixed `h`, domains `[-N h, N h]` for each `N`.
///
/// A run that stops early (blow-up on a domain too small for the wave) is
/// kept in the report with its status and infinite errors at the times it
/// did not reach.
pub fn domain_study(
    setup: &Setup,
    n_list: &[i64],
    h: f64,
    times: &[f64],
    wave: &SolitaryWave,
) -> Result<DomainReport> {
    let t_end = max_time(times)?;
    let mut times = times.to_vec();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let (phi, psi) = solitary_initial_data(wave);
    let cfg = IntegratorConfig {
        t_end,
        ..setup.integrator.clone()
    };
    let rows = par::map_collect(n_list, |&n| -> Result<DomainRow> {
        let grid = Grid::symmetric(h, n)?;
        let problem = setup.problem(grid, &phi, &psi)?;
        let out = integrate_with_outputs(&problem, &cfg, &times)?;
        let errors: Vec<f64> = times
            .iter()
            .map(|&t| {
                out.snapshots
                    .iter()
                    .find(|s| s.t == t)
                    .map_or(f64::INFINITY, |s| error_linf(&s.v, |x, t| solitary_exact(wave, x, t), t))
            })
            .collect();
        let max = errors.iter().copied().fold(0.0f64, f64::max);
        Ok(DomainRow {
            n,
            status: out.status,
            errors,
            max,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(DomainReport { h, times, rows })
}
