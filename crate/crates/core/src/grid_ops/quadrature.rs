//! Reference quadrature for continuous norms, and the grid-sum integration
//! error check.
//!
//! Continuous `L^p` norms are evaluated with the composite trapezoidal rule at
//! mesh `h / 100` over the window where the integrand exceeds `1e-14`.

use super::Norm;
use crate::error::{Error, Result};

/// Magnitude below which a function is treated as zero when locating its
/// support window.
pub const SUPPORT_CUTOFF: f64 = 1e-14;

/// Ratio between the grid mesh and the reference quadrature mesh.
pub const REFERENCE_REFINEMENT: f64 = 100.0;

/// Smallest interval `[a, b]` (searched over `[-radius, radius]` with step
/// `0.01`) outside of which `|f| <= SUPPORT_CUTOFF`. Returns `None` when `f`
/// vanishes on the whole search range.
pub fn support_window(f: &dyn Fn(f64) -> f64, radius: f64) -> Option<(f64, f64)> {
    let step = 0.01;
    let n = (2.0 * radius / step).ceil() as i64;
    let mut lo = None;
    let mut hi = None;
    for k in 0..=n {
        let x = -radius + k as f64 * step;
        if f(x).abs() > SUPPORT_CUTOFF {
            lo.get_or_insert(x);
            hi = Some(x);
        }
    }
    Some((lo? - step, hi? + step))
}

/// Composite trapezoidal rule with `n` panels.
pub fn trapezoid(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n.max(1);
    let dx = (b - a) / n as f64;
    let mut s = 0.5 * (f(a) + f(b));
    for k in 1..n {
        s += f(a + k as f64 * dx);
    }
    s * dx
}

/// Continuous norm of `f` over `window`, at reference mesh `h_ref`.
pub fn function_norm(f: &dyn Fn(f64) -> f64, which: Norm, window: (f64, f64), h_ref: f64) -> f64 {
    let (a, b) = window;
    let n = ((b - a) / h_ref).ceil() as usize;
    match which {
        Norm::L1 => trapezoid(&|x| f(x).abs(), a, b, n),
        Norm::L2 => trapezoid(&|x| f(x) * f(x), a, b, n).sqrt(),
        Norm::Linf => sup_abs(f, a, b, n),
    }
}

/// Sampled `sup |f|` refined by ternary search around the best sample.
pub fn sup_abs(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n.max(1);
    let dx = (b - a) / n as f64;
    let (mut best_x, mut best) = (a, f(a).abs());
    for k in 1..=n {
        let x = a + k as f64 * dx;
        let v = f(x).abs();
        if v > best {
            best = v;
            best_x = x;
        }
    }
    let (mut lo, mut hi) = ((best_x - dx).max(a), (best_x + dx).min(b));
    for _ in 0..60 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1).abs() < f(m2).abs() {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    best.max(f(0.5 * (lo + hi)).abs())
}

/// `L^p` distance between `u` and a cellwise-defined function, integrated
/// cell by cell over `[x_{i_lo}, x_{i_hi + 1}]` with `REFERENCE_REFINEMENT`
/// trapezoid panels per cell. `cell(i, s)` evaluates the second function at
/// `x_i + s` for `s` in `[0, h]`, so jumps at the nodes are resolved exactly.
pub fn cellwise_distance(
    u: &dyn Fn(f64) -> f64,
    cell: &dyn Fn(i64, f64) -> f64,
    h: f64,
    i_lo: i64,
    i_hi: i64,
    which: Norm,
) -> f64 {
    let panels = REFERENCE_REFINEMENT as usize;
    let ds = h / panels as f64;
    let mut total = 0.0f64;
    for i in i_lo..=i_hi {
        let x0 = i as f64 * h;
        let diff = |k: usize| {
            let s = k as f64 * ds;
            (u(x0 + s) - cell(i, s)).abs()
        };
        match which {
            Norm::Linf => {
                for k in 0..=panels {
                    total = total.max(diff(k));
                }
            }
            Norm::L1 | Norm::L2 => {
                let pw = |k: usize| match which {
                    Norm::L1 => diff(k),
                    _ => diff(k).powi(2),
                };
                let mut s = 0.5 * (pw(0) + pw(panels));
                for k in 1..panels {
                    s += pw(k);
                }
                total += s * ds;
            }
        }
    }
    match which {
        Norm::L2 => total.sqrt(),
        _ => total,
    }
}

/// What is known about the smoothness of a function whose grid sum is
/// checked against its integral.
#[derive(Debug, Clone, Copy, Default)]
pub struct SmoothnessInfo {
    /// `||f'||_{L^1}`.
    pub first_derivative_l1: Option<f64>,
    /// `|mu|(R)` for `mu = f''`, the `L^1` norm of `f''` in the regular case.
    pub second_variation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureReport {
    pub h: f64,
    pub grid_sum: f64,
    pub reference_integral: f64,
    pub error: f64,
    /// `h ||f'||_{L^1}`, when known.
    pub first_order_bound: Option<f64>,
    /// `h^2 |mu|(R)`, when known.
    pub second_order_bound: Option<f64>,
    pub violated: bool,
}

/// Compares `sum_i h f(x_i)` with `int f dx`. The integral is taken from
/// `exact_integral` when supplied, otherwise from reference quadrature at
/// `h / 100` over the support window of `f`.
pub fn quadrature_error_bound_check(
    f: &dyn Fn(f64) -> f64,
    info: &SmoothnessInfo,
    exact_integral: Option<f64>,
    h: f64,
) -> Result<QuadratureReport> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidGrid(format!("mesh size must be positive, got {h}")));
    }
    let Some(window) = support_window(f, 400.0) else {
        return Ok(QuadratureReport {
            h,
            grid_sum: 0.0,
            reference_integral: exact_integral.unwrap_or(0.0),
            error: exact_integral.unwrap_or(0.0).abs(),
            first_order_bound: info.first_derivative_l1.map(|d| h * d),
            second_order_bound: info.second_variation.map(|m| h * h * m),
            violated: false,
        });
    };
    let i_lo = (window.0 / h).floor() as i64 - 1;
    let i_hi = (window.1 / h).ceil() as i64 + 1;
    let mut grid_sum = 0.0;
    for i in i_lo..=i_hi {
        let y = f(i as f64 * h);
        if !y.is_finite() {
            return Err(Error::NonFinite {
                x: i as f64 * h,
                value: y,
            });
        }
        grid_sum += h * y;
    }
    let reference_integral = exact_integral.unwrap_or_else(|| {
        let n = ((window.1 - window.0) * REFERENCE_REFINEMENT / h).ceil() as usize;
        trapezoid(f, window.0, window.1, n)
    });
    let error = (grid_sum - reference_integral).abs();
    let first_order_bound = info.first_derivative_l1.map(|d| h * d);
    let second_order_bound = info.second_variation.map(|m| h * h * m);
    // Allow for roundoff in the sums themselves.
    let slack = 1e-13 * (1.0 + reference_integral.abs());
    let violated = first_order_bound.is_some_and(|b| error > b + slack)
        || second_order_bound.is_some_and(|b| error > b + slack);
    Ok(QuadratureReport {
        h,
        grid_sum,
        reference_integral,
        error,
        first_order_bound,
        second_order_bound,
        violated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_integrates_gaussian() {
        let f = |x: f64| (-x * x).exp();
        let v = trapezoid(&f, -8.0, 8.0, 1600);
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn norms_of_gaussian() {
        let f = |x: f64| (-x * x).exp();
        let w = support_window(&f, 50.0).unwrap();
        assert!(w.0 < -5.6 && w.1 > 5.6);
        let l2 = function_norm(&f, Norm::L2, w, 0.001);
        assert!((l2 - (std::f64::consts::PI / 2.0).sqrt().sqrt()).abs() < 1e-10);
        let sup = function_norm(&|x: f64| -2.0 * x * (-x * x).exp(), Norm::Linf, w, 0.01);
        let exact = (2.0f64).sqrt() * (-0.5f64).exp();
        assert!((sup - exact).abs() < 1e-12);
    }

    #[test]
    fn zero_function_has_zero_quadrature_error() {
        let r = quadrature_error_bound_check(&|_| 0.0, &SmoothnessInfo::default(), None, 0.1)
            .unwrap();
        assert_eq!(r.error, 0.0);
        assert!(!r.violated);
    }

    #[test]
    fn gaussian_grid_sum_within_second_order_bound() {
        let f = |x: f64| (-x * x).exp();
        let d2 = |x: f64| (4.0 * x * x - 2.0) * (-x * x).exp();
        let w = support_window(&f, 50.0).unwrap();
        let info = SmoothnessInfo {
            first_derivative_l1: Some(2.0),
            second_variation: Some(function_norm(&d2, Norm::L1, w, 0.001)),
        };
        let r = quadrature_error_bound_check(&f, &info, None, 0.1).unwrap();
        assert!(!r.violated);
        assert!(r.error <= r.second_order_bound.unwrap());
    }
}
