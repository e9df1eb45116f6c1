//! The truncated semi-discrete system
//! `v_i'' = sum_j b_{i-j} f(v_j)` on a finite index window, written in first
//! order form `(v, w)' = (w, B f(v))`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid_ops::{restrict, Grid, GridSequence};
use crate::kernels::{second_difference_weights, Kernel, KernelWeights};
use crate::toeplitz::{ConvolutionPath, ToeplitzOperator};

#[derive(Clone)]
enum NonlinearityKind {
    Quadratic,
    Power(u32),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// Pointwise nonlinearity `f` with `f(0) = 0`.
#[derive(Clone)]
pub struct Nonlinearity {
    name: String,
    kind: NonlinearityKind,
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Nonlinearity").field("name", &self.name).finish()
    }
}

/// `f(u) = u + u^2`.
pub fn nonlinearity_quadratic() -> Nonlinearity {
    Nonlinearity {
        name: "quadratic".into(),
        kind: NonlinearityKind::Quadratic,
    }
}

/// `f(u) = u + u^p`, `p >= 2`.
pub fn nonlinearity_power(p: u32) -> Result<Nonlinearity> {
    if p < 2 {
        return Err(Error::InvalidNonlinearity(format!(
            "power must be an integer >= 2, got {p}"
        )));
    }
    Ok(Nonlinearity {
        name: format!("power{p}"),
        kind: NonlinearityKind::Power(p),
    })
}

/// User nonlinearity; rejected unless `|f(0)| <= 1e-14`.
pub fn nonlinearity_custom(
    name: &str,
    f: impl Fn(f64) -> f64 + Send + Sync + 'static,
) -> Result<Nonlinearity> {
    let at_zero = f(0.0);
    if !(at_zero.abs() <= 1e-14) {
        return Err(Error::InvalidNonlinearity(format!(
            "f(0) must vanish, got f(0) = {at_zero}"
        )));
    }
    Ok(Nonlinearity {
        name: name.to_string(),
        kind: NonlinearityKind::Custom(Arc::new(f)),
    })
}

impl Nonlinearity {
    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn apply(&self, u: f64) -> f64 {
        match &self.kind {
            NonlinearityKind::Quadratic => u + u * u,
            NonlinearityKind::Power(p) => u + u.powi(*p as i32),
            NonlinearityKind::Custom(f) => f(u),
        }
    }

    pub fn apply_slice(&self, u: &[f64], out: &mut [f64]) {
        for (o, &x) in out.iter_mut().zip(u) {
            *o = self.apply(x);
        }
    }

    /// `max |f(z)|` over `|z| <= m`.
    pub fn max_abs_on(&self, m: f64) -> f64 {
        match &self.kind {
            NonlinearityKind::Quadratic => m + m * m,
            NonlinearityKind::Power(p) => m + m.powi(*p as i32),
            NonlinearityKind::Custom(_) => sample_max(|z| self.apply(z).abs(), m),
        }
    }

    /// `max |f(z) / z|` over `0 < |z| <= m`.
    pub fn max_ratio_on(&self, m: f64) -> f64 {
        match &self.kind {
            NonlinearityKind::Quadratic => 1.0 + m,
            NonlinearityKind::Power(p) => 1.0 + m.powi(*p as i32 - 1),
            NonlinearityKind::Custom(_) => sample_max(
                |z| {
                    if z == 0.0 {
                        0.0
                    } else {
                        (self.apply(z) / z).abs()
                    }
                },
                m,
            ),
        }
    }
}

fn sample_max(g: impl Fn(f64) -> f64, m: f64) -> f64 {
    (0..=4000)
        .map(|k| g(-m + 2.0 * m * k as f64 / 4000.0))
        .fold(0.0f64, f64::max)
}

/// `(t, v, w)` with `w = dv/dt`, both on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub t: f64,
    pub v: GridSequence,
    pub w: GridSequence,
}

impl SystemState {
    pub fn new(t: f64, v: GridSequence, w: GridSequence) -> Result<Self> {
        if v.grid() != w.grid() {
            return Err(Error::InvalidGrid(
                "displacement and velocity must share one grid".into(),
            ));
        }
        Ok(Self { t, v, w })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            t: 0.0,
            v: GridSequence::zeros(grid),
            w: GridSequence::zeros(grid),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.w.is_finite()
    }

    /// `[v; w]` as one vector.
    pub fn to_vector(&self) -> Vec<f64> {
        let mut y = self.v.values().to_vec();
        y.extend_from_slice(self.w.values());
        y
    }

    pub fn from_vector(t: f64, grid: Grid, y: &[f64]) -> Result<Self> {
        let n = grid.len();
        if y.len() != 2 * n {
            return Err(Error::LengthMismatch {
                expected: 2 * n,
                actual: y.len(),
            });
        }
        Ok(Self {
            t,
            v: GridSequence::new(grid, y[..n].to_vec())?,
            w: GridSequence::new(grid, y[n..].to_vec())?,
        })
    }
}

/// Samples `phi` and `psi` on `grid`.
pub fn restrict_initial_data(
    phi: impl Fn(f64) -> f64,
    psi: impl Fn(f64) -> f64,
    grid: &Grid,
) -> Result<(GridSequence, GridSequence)> {
    Ok((restrict(phi, grid)?, restrict(psi, grid)?))
}

/// Construction options for [`Problem`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ProblemOptions {
    pub path: ConvolutionPath,
    /// Drop weights below `cutoff * max |b|`. Off by default.
    pub cutoff: Option<f64>,
}

/// A truncated semi-discrete initial-value problem.
#[derive(Debug, Clone)]
pub struct Problem {
    grid: Grid,
    kernel_name: String,
    weights: KernelWeights,
    nonlinearity: Nonlinearity,
    initial: SystemState,
    operator: ToeplitzOperator,
}

impl Problem {
    /// Builds the problem with the full stencil `K = i_max - i_min`.
    pub fn new(
        kernel: &Kernel,
        nonlinearity: Nonlinearity,
        initial_v: GridSequence,
        initial_w: GridSequence,
        options: ProblemOptions,
    ) -> Result<Self> {
        let grid = *initial_v.grid();
        let initial = SystemState::new(0.0, initial_v, initial_w)?;
        let half_width = (grid.len() - 1).max(1);
        let mut weights = second_difference_weights(kernel, grid.h(), half_width)?;
        if let Some(c) = options.cutoff {
            weights = weights.with_cutoff(c);
            if weights.dropped() > 0 {
                log::info!(
                    "weight cutoff {c:e} dropped {} of {} weights",
                    weights.dropped(),
                    2 * half_width + 1
                );
            }
        }
        Self::from_weights(kernel.name(), weights, nonlinearity, initial, options.path)
    }

    /// Samples `phi`, `psi` on `grid` and builds the problem.
    pub fn from_functions(
        kernel: &Kernel,
        nonlinearity: Nonlinearity,
        grid: Grid,
        phi: impl Fn(f64) -> f64,
        psi: impl Fn(f64) -> f64,
        options: ProblemOptions,
    ) -> Result<Self> {
        let (v, w) = restrict_initial_data(phi, psi, &grid)?;
        Self::new(kernel, nonlinearity, v, w, options)
    }

    /// Builds the problem from precomputed weights.
    pub fn from_weights(
        kernel_name: &str,
        weights: KernelWeights,
        nonlinearity: Nonlinearity,
        initial: SystemState,
        path: ConvolutionPath,
    ) -> Result<Self> {
        let grid = *initial.v.grid();
        if weights.h() != grid.h() {
            return Err(Error::MeshMismatch {
                left: weights.h(),
                right: grid.h(),
            });
        }
        let operator = weights.operator(grid.len(), path);
        Ok(Self {
            grid,
            kernel_name: kernel_name.to_string(),
            weights,
            nonlinearity,
            initial,
            operator,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn kernel_name(&self) -> &str {
        &self.kernel_name
    }

    pub fn weights(&self) -> &KernelWeights {
        &self.weights
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nonlinearity
    }

    pub fn initial_state(&self) -> &SystemState {
        &self.initial
    }

    /// Path used for the weight product.
    pub fn path(&self) -> ConvolutionPath {
        self.operator.path()
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// First-order right-hand side on `y = [v; w]`: writes `[w; B f(v)]`.
    pub fn eval_into(&self, y: &[f64], dy: &mut [f64]) {
        let n = self.grid.len();
        let (v, w) = y.split_at(n);
        let (dv, dw) = dy.split_at_mut(n);
        dv.copy_from_slice(w);
        let mut fv = vec![0.0; n];
        self.nonlinearity.apply_slice(v, &mut fv);
        self.operator.apply_into(&fv, dw);
    }
}

/// Result of [`rhs`]. `diverged` is set when `f(v)` or the product is not
/// finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Rhs {
    pub dv: GridSequence,
    pub dw: GridSequence,
    pub diverged: bool,
}

/// `dv = w`, `dw = B f(v)`.
pub fn rhs(problem: &Problem, state: &SystemState) -> Result<Rhs> {
    if state.v.grid() != problem.grid() || state.w.grid() != problem.grid() {
        return Err(Error::InvalidGrid("state is not on the problem grid".into()));
    }
    let n = problem.len();
    let y = state.to_vector();
    let mut dy = vec![0.0; 2 * n];
    problem.eval_into(&y, &mut dy);
    let diverged = dy[n..].iter().any(|x| !x.is_finite());
    let grid = *problem.grid();
    Ok(Rhs {
        dv: GridSequence::new(grid, dy[..n].to_vec())?,
        dw: GridSequence::new(grid, dy[n..].to_vec())?,
        diverged,
    })
}
