//! Toeplitz matrix-vector products `out_i = sum_k t_k x_{i-k}` on a finite
//! index window, with zero extension outside `[0, n)`.
//!
//! Two execution paths are provided. The direct path is an O(n*m) loop with a
//! fixed summation order per output index and serves as the reference. The
//! FFT path embeds the product in a circular convolution of power-of-two
//! length and costs O(L log L) per application.
//!
//! For even coefficient sequences the direct path sums `t_k (x_{i-k} +
//! x_{i+k})` in increasing `k`, so reversing the input reverses the output
//! bit for bit.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::par;

/// Execution path for Toeplitz products.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConvolutionPath {
    /// Reference double loop.
    Direct,
    /// Zero-padded FFT convolution.
    Fft,
    /// Pick by estimated operation count.
    #[default]
    Auto,
}

impl fmt::Display for ConvolutionPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConvolutionPath::Direct => "direct",
            ConvolutionPath::Fft => "fft",
            ConvolutionPath::Auto => "auto",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for ConvolutionPath {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct" => Ok(ConvolutionPath::Direct),
            "fft" => Ok(ConvolutionPath::Fft),
            "auto" => Ok(ConvolutionPath::Auto),
            other => Err(format!("unknown convolution path '{other}'")),
        }
    }
}

// Output length above which the direct loop is split across threads.
const PARALLEL_MIN_LEN: usize = 256;

/// Direct Toeplitz product. `coeffs[q]` holds the coefficient for offset
/// `k_lo + q`. Each output index sums in increasing `q`.
pub fn toeplitz_direct(coeffs: &[f64], k_lo: i64, x: &[f64], out: &mut [f64]) {
    let n = x.len() as i64;
    let m = coeffs.len() as i64;
    debug_assert_eq!(out.len(), x.len());
    par::fill_indexed(out, PARALLEL_MIN_LEN, |i| {
        let i = i as i64;
        // j = i - k_lo - q must lie in [0, n)
        let q_lo = (i - k_lo - (n - 1)).max(0);
        let q_hi = (i - k_lo).min(m - 1);
        let mut acc = 0.0;
        let mut q = q_lo;
        while q <= q_hi {
            acc += coeffs[q as usize] * x[(i - k_lo - q) as usize];
            q += 1;
        }
        acc
    });
}

/// Direct product for an even sequence given by `half[k] = t_k = t_{-k}`.
pub fn toeplitz_direct_even(half: &[f64], x: &[f64], out: &mut [f64]) {
    let n = x.len();
    debug_assert_eq!(out.len(), n);
    let k_max = half.len().saturating_sub(1);
    par::fill_indexed(out, PARALLEL_MIN_LEN, |i| {
        let both = i.min(n - 1 - i).min(k_max);
        let reach = i.max(n - 1 - i).min(k_max);
        let mut acc = half[0] * x[i];
        for k in 1..=both {
            acc += half[k] * (x[i - k] + x[i + k]);
        }
        for k in both + 1..=reach {
            let one = if i >= k { x[i - k] } else { x[i + k] };
            acc += half[k] * one;
        }
        acc
    });
}

fn even_half(coeffs: &[f64], k_lo: i64) -> Option<Vec<f64>> {
    let m = coeffs.len();
    if m.is_multiple_of(2) || k_lo != -((m / 2) as i64) {
        return None;
    }
    let c = m / 2;
    (0..=c)
        .all(|k| coeffs[c + k] == coeffs[c - k])
        .then(|| coeffs[c..].to_vec())
}

#[derive(Clone)]
struct FftPlan {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    coeff_spectrum: Vec<Complex<f64>>,
}

impl fmt::Debug for FftPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FftPlan").field("len", &self.len).finish()
    }
}

/// A Toeplitz operator bound to a fixed input length.
#[derive(Debug, Clone)]
pub struct ToeplitzOperator {
    k_lo: i64,
    coeffs: Vec<f64>,
    n: usize,
    path: ConvolutionPath,
    fft: Option<FftPlan>,
    even: Option<Vec<f64>>,
}

impl ToeplitzOperator {
    /// Builds the operator for inputs of length `n`. Offsets that cannot
    /// couple two indices of `[0, n)` are dropped.
    pub fn new(coeffs: &[f64], k_lo: i64, n: usize, path: ConvolutionPath) -> Self {
        let span = n as i64 - 1;
        let k_hi = k_lo + coeffs.len() as i64 - 1;
        let lo = k_lo.max(-span);
        let hi = k_hi.min(span);
        let trimmed: Vec<f64> = if lo > hi || coeffs.is_empty() || n == 0 {
            Vec::new()
        } else {
            coeffs[(lo - k_lo) as usize..=(hi - k_lo) as usize].to_vec()
        };
        let path = match path {
            ConvolutionPath::Auto => choose_path(n, trimmed.len()),
            p => p,
        };
        let fft = (path == ConvolutionPath::Fft && !trimmed.is_empty())
            .then(|| FftPlan::build(&trimmed, n));
        let even = if path == ConvolutionPath::Direct && !trimmed.is_empty() {
            even_half(&trimmed, lo)
        } else {
            None
        };
        Self {
            k_lo: lo,
            coeffs: trimmed,
            n,
            path,
            fft,
            even,
        }
    }

    /// Input and output length.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// The path actually used (never `Auto`).
    pub fn path(&self) -> ConvolutionPath {
        self.path
    }

    /// Writes the product into `out`. Panics if lengths differ from `n`.
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.n, "input length");
        assert_eq!(out.len(), self.n, "output length");
        if self.coeffs.is_empty() {
            out.fill(0.0);
            return;
        }
        match (&self.fft, &self.even) {
            (Some(plan), _) => plan.apply(&self.coeffs, self.k_lo, x, out),
            (None, Some(half)) => toeplitz_direct_even(half, x, out),
            (None, None) => toeplitz_direct(&self.coeffs, self.k_lo, x, out),
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.apply_into(x, &mut out);
        out
    }
}

fn choose_path(n: usize, m: usize) -> ConvolutionPath {
    if m == 0 {
        return ConvolutionPath::Direct;
    }
    let direct_cost = (n * m.min(n)) as f64;
    let len = (n + m - 1).next_power_of_two() as f64;
    let fft_cost = 12.0 * len * len.log2().max(1.0);
    if direct_cost > fft_cost {
        ConvolutionPath::Fft
    } else {
        ConvolutionPath::Direct
    }
}

impl FftPlan {
    fn build(coeffs: &[f64], n: usize) -> Self {
        let len = (coeffs.len() + n - 1).next_power_of_two();
        let mut planner = FftPlanner::<f64>::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        let mut coeff_spectrum = vec![Complex::new(0.0, 0.0); len];
        for (c, &v) in coeff_spectrum.iter_mut().zip(coeffs) {
            c.re = v;
        }
        forward.process(&mut coeff_spectrum);
        Self {
            len,
            forward,
            inverse,
            coeff_spectrum,
        }
    }

    fn apply(&self, coeffs: &[f64], k_lo: i64, x: &[f64], out: &mut [f64]) {
        let mut buf = vec![Complex::new(0.0, 0.0); self.len];
        for (b, &v) in buf.iter_mut().zip(x) {
            b.re = v;
        }
        self.forward.process(&mut buf);
        for (b, c) in buf.iter_mut().zip(&self.coeff_spectrum) {
            *b *= c;
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.len as f64;
        // full[p] = sum_q coeffs[q] x[p - q], and out_i = full[i - k_lo]
        let full_len = (coeffs.len() + x.len() - 1) as i64;
        for (i, o) in out.iter_mut().enumerate() {
            let p = i as i64 - k_lo;
            *o = if (0..full_len).contains(&p) {
                buf[p as usize].re * scale
            } else {
                0.0
            };
        }
    }
}
