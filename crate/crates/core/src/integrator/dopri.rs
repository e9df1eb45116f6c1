//! Dormand-Prince 5(4) embedded pair with FSAL.

use super::OdeSystem;

// The systems here are autonomous, so the stage nodes c_i never appear.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// difference between the 5th and the embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Stage buffers for one system size.
pub(crate) struct Dopri5 {
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    k5: Vec<f64>,
    k6: Vec<f64>,
    tmp: Vec<f64>,
}

impl Dopri5 {
    pub(crate) fn new(dim: usize) -> Self {
        Self {
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            k5: vec![0.0; dim],
            k6: vec![0.0; dim],
            tmp: vec![0.0; dim],
        }
    }

    /// One step of size `h` from `y` with `k1 = f(y)`. Writes the 5th order
    /// solution to `y_new`, `f(y_new)` to `k7`, and returns the scaled RMS
    /// error estimate (`NaN` propagates when the step is not finite).
    ///
    /// The squared errors are accumulated with [`paired_sum`].
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn step<S: OdeSystem + ?Sized>(
        &mut self,
        sys: &S,
        y: &[f64],
        k1: &[f64],
        h: f64,
        rel_tol: f64,
        abs_tol: f64,
        block: usize,
        y_new: &mut [f64],
        k7: &mut [f64],
    ) -> f64 {
        let n = y.len();
        let Self {
            k2,
            k3,
            k4,
            k5,
            k6,
            tmp,
        } = self;
        for i in 0..n {
            tmp[i] = y[i] + h * A21 * k1[i];
        }
        sys.eval(tmp, k2);
        for i in 0..n {
            tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        sys.eval(tmp, k3);
        for i in 0..n {
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        sys.eval(tmp, k4);
        for i in 0..n {
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        sys.eval(tmp, k5);
        for i in 0..n {
            tmp[i] = y[i]
                + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        sys.eval(tmp, k6);
        for i in 0..n {
            y_new[i] = y[i]
                + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        sys.eval(y_new, k7);
        let sq = |i: usize| {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = abs_tol + rel_tol * y[i].abs().max(y_new[i].abs());
            (e / sc) * (e / sc)
        };
        let acc = paired_sum(n, block, sq);
        (acc / n.max(1) as f64).sqrt()
    }
}

/// Sums `term(i)` for `i < n` over consecutive blocks of length `block`,
/// adding entries `j` and `block - 1 - j` of each block as a pair. Mirroring
/// every block therefore leaves the sum bit-identical.
pub(crate) fn paired_sum(n: usize, block: usize, term: impl Fn(usize) -> f64) -> f64 {
    let block = block.clamp(1, n.max(1));
    let mut acc = 0.0;
    let mut start = 0;
    while start < n {
        let len = block.min(n - start);
        for j in 0..len / 2 {
            acc += term(start + j) + term(start + len - 1 - j);
        }
        if len % 2 == 1 {
            acc += term(start + len / 2);
        }
        start += len;
    }
    acc
}
