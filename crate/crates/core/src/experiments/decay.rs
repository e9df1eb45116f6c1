use crate::error::{Error, Result};
use crate::integrator::{integrate_with_outputs, IntegratorConfig, Status};
use crate::semidiscrete::Problem;

#[derive(Debug, Clone, PartialEq)]
pub struct DecayOptions {
    /// Decay rate `r` of the weight `e^{-r|x|}`.
    pub r: f64,
    /// Sample times; `0` is always included.
    pub times: Vec<f64>,
    /// Band of `|x|` checked, as fractions of the domain half-width.
    pub band: (f64, f64),
}

impl DecayOptions {
    pub fn new(r: f64, times: Vec<f64>) -> Self {
        Self {
            r,
            times,
            band: (0.5, 0.9),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayCheckReport {
    pub r: f64,
    /// Envelope constant `||phi/w|| + T ||psi/w||`.
    pub fitted_c: f64,
    /// `max_i |phi_i| e^{r|x_i|}` over the whole grid.
    pub displacement_c: f64,
    /// `max_i |psi_i| e^{r|x_i|}` over the whole grid.
    pub velocity_c: f64,
    /// Growth rate of the envelope `C e^{-r|x|} e^{kappa t}`.
    pub kappa: f64,
    /// Smallest growth rate that the sampled solution actually needs.
    pub observed_kappa: f64,
    /// Largest `|v|` seen at any sample time and grid point.
    pub max_amplitude: f64,
    pub samples: usize,
    pub violations: usize,
}

/// Checks that the solution stays under `C e^{-r|x|} e^{kappa t}` in the
/// sample band.
///
/// `C = ||phi/w|| + T ||psi/w||` is taken from the initial data over the
/// whole grid, with `w = e^{-r|x|}`, since the interior feeds the band.
/// The growth rate follows the weighted Gronwall estimate `kappa = C_w K_M T`, where
/// `C_w = sum_k |b_k| e^{r|k|h}` bounds the weighted kernel action,
/// `K_M = max |f(u)/u|` over `|u| <= M` with `M` the largest amplitude seen,
/// and `T` is the last sample time.
pub fn decay_check(
    problem: &Problem,
    integrator: &IntegratorConfig,
    opts: &DecayOptions,
) -> Result<DecayCheckReport> {
    let r = opts.r;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidConfig(format!("decay rate must be positive, got {r}")));
    }
    if problem.kernel_name() == "exp" && r >= 1.0 {
        return Err(Error::InvalidConfig(format!(
            "the exponential kernel only propagates decay rates r < 1, got {r}"
        )));
    }
    let (lo, hi) = opts.band;
    if !(0.0 <= lo && lo < hi && hi <= 1.0) {
        return Err(Error::InvalidConfig(format!("invalid sample band {:?}", opts.band)));
    }
    let grid = *problem.grid();
    let half = grid.x_left().abs().min(grid.x_right().abs());
    let band: Vec<(usize, f64)> = grid
        .points()
        .enumerate()
        .filter(|(_, x)| (lo * half..=hi * half).contains(&x.abs()))
        .collect();

    let mut times: Vec<f64> = opts.times.iter().copied().filter(|t| *t >= 0.0).collect();
    times.push(0.0);
    times.sort_by(f64::total_cmp);
    times.dedup();
    let t_max = *times.last().unwrap_or(&0.0);
    let cfg = IntegratorConfig {
        t_end: t_max,
        ..integrator.clone()
    };
    let out = integrate_with_outputs(problem, &cfg, &times)?;
    if out.status != Status::Completed {
        return Err(Error::Diverged(format!(
            "decay run stopped with status {} at t = {}",
            out.status, out.final_state.t
        )));
    }

    let weighted_on = |vals: &[f64], idx: &mut dyn Iterator<Item = (usize, f64)>| {
        idx.map(|(i, x)| vals[i].abs() * (r * x.abs()).exp())
            .fold(0.0f64, f64::max)
    };
    let weighted = |vals: &[f64]| weighted_on(vals, &mut band.iter().copied());
    let init = problem.initial_state();
    let displacement_c = weighted_on(init.v.values(), &mut grid.points().enumerate());
    let velocity_c = weighted_on(init.w.values(), &mut grid.points().enumerate());
    let fitted_c = displacement_c + t_max * velocity_c;
    let max_amplitude = out
        .snapshots
        .iter()
        .flat_map(|s| s.v.values().iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));

    let w = problem.weights();
    let c_w: f64 = (-(w.half_width() as i64)..=w.half_width() as i64)
        .map(|k| w.b(k).abs() * (r * (k as f64 * w.h()).abs()).exp())
        .sum();
    let k_m = problem.nonlinearity().max_ratio_on(max_amplitude);
    let kappa = c_w * k_m * t_max;

    let mut violations = 0;
    let mut samples = 0;
    let mut observed_kappa = 0.0f64;
    for snap in out.snapshots.iter().filter(|s| s.t > 0.0) {
        let growth = (kappa * snap.t).exp();
        let vals = snap.v.values();
        for &(i, x) in &band {
            samples += 1;
            let envelope = fitted_c * (-r * x.abs()).exp() * growth;
            if vals[i].abs() > envelope * (1.0 + 1e-12) {
                violations += 1;
            }
        }
        let ratio = weighted(vals);
        if fitted_c > 0.0 && ratio > fitted_c {
            observed_kappa = observed_kappa.max((ratio / fitted_c).ln() / snap.t);
        }
    }
    Ok(DecayCheckReport {
        r,
        fitted_c,
        displacement_c,
        velocity_c,
        kappa,
        observed_kappa,
        max_amplitude,
        samples,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_ops::{Grid, GridSequence};
    use crate::kernels::{kernel_exponential, kernel_triangular};
    use crate::semidiscrete::{nonlinearity_quadratic, ProblemOptions};

    #[test]
    fn zero_data_has_no_violations() {
        let g = Grid::symmetric(0.5, 20).unwrap();
        let p = Problem::new(
            &kernel_exponential(),
            nonlinearity_quadratic(),
            GridSequence::zeros(g),
            GridSequence::zeros(g),
            ProblemOptions::default(),
        )
        .unwrap();
        let rep = decay_check(&p, &IntegratorConfig::default(), &DecayOptions::new(0.5, vec![1.0, 2.0])).unwrap();
        assert_eq!(rep.violations, 0);
        assert_eq!(rep.fitted_c, 0.0);
        assert!(rep.samples > 0);
    }

    #[test]
    fn lattice_gaussian_respects_fast_decay() {
        let g = Grid::symmetric(0.25, 80).unwrap();
        let p = Problem::from_functions(
            &kernel_triangular(),
            nonlinearity_quadratic(),
            g,
            |x: f64| 0.2 * (-x * x).exp(),
            |_| 0.0,
            ProblemOptions::default(),
        )
        .unwrap();
        let rep = decay_check(&p, &IntegratorConfig::default(), &DecayOptions::new(2.0, vec![0.5, 1.0, 2.0])).unwrap();
        assert_eq!(rep.violations, 0, "{rep:?}");
        assert!(rep.observed_kappa <= rep.kappa);
    }

    #[test]
    fn invalid_rates_are_rejected() {
        let g = Grid::symmetric(0.5, 10).unwrap();
        let p = Problem::new(
            &kernel_exponential(),
            nonlinearity_quadratic(),
            GridSequence::zeros(g),
            GridSequence::zeros(g),
            ProblemOptions::default(),
        )
        .unwrap();
        let cfg = IntegratorConfig::default();
        assert!(decay_check(&p, &cfg, &DecayOptions::new(1.0, vec![1.0])).is_err());
        assert!(decay_check(&p, &cfg, &DecayOptions::new(-0.5, vec![1.0])).is_err());
    }
}
