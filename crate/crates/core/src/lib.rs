//! Semi-discrete solver for the nonlocal wave equation
//! `u_tt = (beta * f(u))_xx` on a uniform grid.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid_ops`]: grids, grid sequences, discrete norms, differences,
//!   convolution and piecewise extensions.
//! * [`kernels`]: convolution kernels and their second-difference weights.
//! * [`semidiscrete`]: the truncated system `v'' = B f(v)`.
//! * [`integrator`]: RK4 and adaptive Dormand-Prince integration with a
//!   blow-up monitor.
//! * [`experiments`]: convergence, domain-size, blow-up and decay studies.
//!
//! Data-parallel loops use rayon when the `parallel` feature is enabled
//! (the default) and run sequentially otherwise.

// Negated comparisons such as `!(h > 0.0)` are used on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod grid_ops;
pub mod integrator;
pub mod kernels;
mod par;
pub mod semidiscrete;
pub mod toeplitz;

pub use error::{Error, Result};
pub use grid_ops::{Grid, GridSequence, Norm};
pub use integrator::{IntegrationOutcome, IntegratorConfig, Method, Status};
pub use kernels::{BuiltinKernel, Kernel, KernelWeights};
pub use par::current_threads;
pub use semidiscrete::{Nonlinearity, Problem, ProblemOptions, SystemState};
pub use toeplitz::ConvolutionPath;
