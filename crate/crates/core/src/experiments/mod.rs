//! Reproduction harness for the solitary-wave, blow-up and decay experiments.
//!
//! Each study builds one [`Problem`] per parameter value, runs the
//! independent problems concurrently, and assembles the report in parameter
//! order so results do not depend on scheduling.

mod blowup;
mod decay;
mod solitary;
mod suite;

pub use blowup::{
    blowup_initial_data, blowup_refinement_study, blowup_study, threshold_sensitivity,
    BlowupReport, BlowupRow, RefinementReport, RefinementRow, SensitivityReport,
};
pub use decay::{decay_check, DecayCheckReport, DecayOptions};
pub use solitary::{
    convergence_rates, convergence_study, domain_study, error_linf, self_convergence_study,
    solitary_exact, solitary_initial_data, ConvergenceReport, ConvergenceRow, DomainReport,
    DomainRow, SolitaryWave,
};
pub use suite::{kernel_bound_rows, run_bound_suite, BoundSuiteReport, TAIL_TOLERANCE};

use crate::error::{Error, Result};
use crate::grid_ops::Grid;
use crate::integrator::{integrate_with_outputs, IntegrationOutcome, IntegratorConfig};
use crate::kernels::{kernel_exponential, Kernel};
use crate::semidiscrete::{nonlinearity_quadratic, Nonlinearity, Problem, ProblemOptions};

/// Initial displacement or velocity profile.
pub type Profile<'a> = &'a (dyn Fn(f64) -> f64 + Sync);

/// Everything about a run except the grid and the initial data.
#[derive(Debug, Clone)]
pub struct Setup {
    pub kernel: Kernel,
    pub nonlinearity: Nonlinearity,
    pub integrator: IntegratorConfig,
    pub options: ProblemOptions,
}

impl Default for Setup {
    fn default() -> Self {
        Self {
            kernel: kernel_exponential(),
            nonlinearity: nonlinearity_quadratic(),
            integrator: IntegratorConfig::default(),
            options: ProblemOptions::default(),
        }
    }
}

impl Setup {
    pub fn new(kernel: Kernel, nonlinearity: Nonlinearity, integrator: IntegratorConfig) -> Self {
        Self {
            kernel,
            nonlinearity,
            integrator,
            options: ProblemOptions::default(),
        }
    }

    pub fn problem(&self, grid: Grid, phi: Profile, psi: Profile) -> Result<Problem> {
        Problem::from_functions(
            &self.kernel,
            self.nonlinearity.clone(),
            grid,
            phi,
            psi,
            self.options,
        )
    }

    /// Runs to `t_end` and requires the run to complete.
    pub fn run_completed(
        &self,
        grid: Grid,
        phi: Profile,
        psi: Profile,
        t_end: f64,
        outputs: &[f64],
    ) -> Result<IntegrationOutcome> {
        let problem = self.problem(grid, phi, psi)?;
        let cfg = IntegratorConfig {
            t_end,
            ..self.integrator.clone()
        };
        let out = integrate_with_outputs(&problem, &cfg, outputs)?;
        if out.status != crate::integrator::Status::Completed {
            return Err(Error::Diverged(format!(
                "run with h = {} on [{}, {}] stopped with status {} at t = {} (||v||_inf = {:e})",
                grid.h(),
                grid.x_left(),
                grid.x_right(),
                out.status,
                out.final_state.t,
                out.trace.last().map_or(f64::NAN, |p| p.linf)
            )));
        }
        Ok(out)
    }
}
