use super::Setup;
use crate::error::{Error, Result};
use crate::grid_ops::Grid;
use crate::integrator::{integrate, Status, TracePoint};
use crate::kernels::Kernel;
use crate::par;

type Profile = fn(f64) -> f64;

/// Even initial data that blows up for all four built-in kernels:
/// `phi = 4 (2x^2/3 - 1) e^{-x^2/3}`, `psi = (x^2 - 1) e^{-x^2/2}`.
pub fn blowup_initial_data() -> (Profile, Profile) {
    (
        |x| 4.0 * (2.0 / 3.0 * x * x - 1.0) * (-x * x / 3.0).exp(),
        |x| (x * x - 1.0) * (-x * x / 2.0).exp(),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlowupRow {
    pub kernel: String,
    pub status: Status,
    /// Extrapolated singular time.
    pub blowup_time: Option<f64>,
    /// First time `||v||_inf` exceeded the threshold.
    pub crossing_time: Option<f64>,
    pub trace: Vec<TracePoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlowupReport {
    pub h: f64,
    pub domain: (f64, f64),
    pub threshold: f64,
    pub rows: Vec<BlowupRow>,
}

fn run_one(setup: &Setup, grid: Grid) -> Result<BlowupRow> {
    let (phi, psi) = blowup_initial_data();
    let problem = setup.problem(grid, &phi, &psi)?;
    let out = integrate(&problem, &setup.integrator)?;
    Ok(BlowupRow {
        kernel: setup.kernel.name().to_string(),
        status: out.status,
        blowup_time: out.blowup_time_estimate,
        crossing_time: out.threshold_crossing_time,
        trace: out.trace,
    })
}

/// One run per kernel on `grid`, integrating up to `setup.integrator.t_end`.
/// Runs that complete without crossing the threshold are reported with
/// status `Completed` and no blow-up time.
pub fn blowup_study(setup: &Setup, kernels: &[Kernel], grid: Grid) -> Result<BlowupReport> {
    let rows = par::map_collect(kernels, |k| {
        let s = Setup {
            kernel: k.clone(),
            ..setup.clone()
        };
        run_one(&s, grid)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(BlowupReport {
        h: grid.h(),
        domain: (grid.x_left(), grid.x_right()),
        threshold: setup.integrator.blowup_threshold,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementRow {
    pub n: i64,
    pub h: f64,
    pub status: Status,
    pub blowup_time: Option<f64>,
    pub crossing_time: Option<f64>,
    pub trace: Vec<TracePoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementReport {
    pub half_width: f64,
    pub rows: Vec<RefinementRow>,
}

/// Blow-up runs on `[-R, R]` with `h = R / N` for each `N`.
pub fn blowup_refinement_study(
    setup: &Setup,
    n_list: &[i64],
    half_width: f64,
) -> Result<RefinementReport> {
    if !(half_width > 0.0) || n_list.iter().any(|&n| n < 1) {
        return Err(Error::InvalidConfig(format!(
            "refinement study needs R > 0 and N >= 1, got R = {half_width}, N = {n_list:?}"
        )));
    }
    let rows = par::map_collect(n_list, |&n| -> Result<RefinementRow> {
        let h = half_width / n as f64;
        let row = run_one(setup, Grid::symmetric(h, n)?)?;
        Ok(RefinementRow {
            n,
            h,
            status: row.status,
            blowup_time: row.blowup_time,
            crossing_time: row.crossing_time,
            trace: row.trace,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(RefinementReport { half_width, rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    /// `(threshold, blowup_time, crossing_time)` per threshold.
    pub rows: Vec<(f64, Option<f64>, Option<f64>)>,
    /// Largest pairwise difference of the blow-up times.
    pub spread: Option<f64>,
}

/// Repeats one blow-up run at several thresholds.
pub fn threshold_sensitivity(
    setup: &Setup,
    grid: Grid,
    thresholds: &[f64],
) -> Result<SensitivityReport> {
    let rows = par::map_collect(thresholds, |&m| -> Result<(f64, Option<f64>, Option<f64>)> {
        let mut s = setup.clone();
        s.integrator.blowup_threshold = m;
        let row = run_one(&s, grid)?;
        Ok((m, row.blowup_time, row.crossing_time))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let times: Option<Vec<f64>> = rows.iter().map(|r| r.1).collect();
    let spread = times.filter(|t| !t.is_empty()).map(|t| {
        let lo = t.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    });
    Ok(SensitivityReport { rows, spread })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::IntegratorConfig;
    use crate::kernels::kernel_triangular;

    #[test]
    fn initial_data_is_even() {
        let (phi, psi) = blowup_initial_data();
        for x in [0.3, 1.0, 2.7, 9.0] {
            assert_eq!(phi(x), phi(-x));
            assert_eq!(psi(x), psi(-x));
        }
        assert_eq!(phi(0.0), -4.0);
        assert_eq!(psi(1.0), 0.0);
    }

    #[test]
    fn coarse_triangle_run_blows_up() {
        let setup = Setup {
            kernel: kernel_triangular(),
            integrator: IntegratorConfig {
                t_end: 5.0,
                rel_tol: 1e-8,
                abs_tol: 1e-8,
                ..Default::default()
            },
            ..Default::default()
        };
        let report = blowup_study(&setup, &[kernel_triangular()], Grid::symmetric(0.5, 20).unwrap()).unwrap();
        let row = &report.rows[0];
        assert_eq!(row.status, Status::BlowupDetected);
        let t = row.blowup_time.unwrap();
        assert!(t > 0.5 && t < 3.0, "{t}");
        assert!(row.crossing_time.unwrap() <= t);
    }

    #[test]
    fn short_horizon_reports_completion() {
        let setup = Setup {
            integrator: IntegratorConfig { t_end: 0.2, ..Default::default() },
            ..Default::default()
        };
        let r = blowup_refinement_study(&setup, &[5], 10.0).unwrap();
        assert_eq!(r.rows[0].status, Status::Completed);
        assert_eq!(r.rows[0].blowup_time, None);
        assert!(blowup_refinement_study(&setup, &[0], 10.0).is_err());
    }
}
