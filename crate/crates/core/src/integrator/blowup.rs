//! Locating the time at which `||v||_inf` crosses a threshold, and estimating
//! the singular time beyond it.

/// One `(t, ||v(t)||_inf)` sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub t: f64,
    pub linf: f64,
}

/// Resolution of the bisection on the crossing time.
pub const CROSSING_RESOLUTION: f64 = 1e-6;

/// First time the trace exceeds `threshold`.
///
/// The crossing is bracketed by the first sample above the threshold and
/// the one before it. With `refine`, which evaluates the monitored norm at
/// any time inside that bracket, the crossing is bisected to
/// [`CROSSING_RESOLUTION`] and the upper end of the final bracket is returned.
/// Without it, `ln ||v||` is interpolated linearly between the two samples.
pub fn detect_blowup(
    trace: &[TracePoint],
    threshold: f64,
    refine: Option<&dyn Fn(f64) -> f64>,
) -> Option<f64> {
    let k = trace.iter().position(|p| !(p.linf <= threshold))?;
    if k == 0 {
        return Some(trace[0].t);
    }
    let (a, b) = (trace[k - 1], trace[k]);
    match refine {
        Some(norm_at) => {
            let (mut lo, mut hi) = (a.t, b.t);
            while hi - lo > CROSSING_RESOLUTION {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if norm_at(mid) <= threshold {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Some(hi)
        }
        None => {
            if !b.linf.is_finite() || a.linf <= 0.0 {
                return Some(b.t);
            }
            let (la, lb, lt) = (a.linf.ln(), b.linf.ln(), threshold.ln());
            let s = ((lt - la) / (lb - la)).clamp(0.0, 1.0);
            Some(a.t + s * (b.t - a.t))
        }
    }
}

/// Time remaining until blow-up, estimated from the local self-similar
/// profile `v ~ C (T - t)^(-p)` at the point of largest `|v|`.
///
/// With `a = v'/v` and `b = v''/v` one has `p = a^2 / (b - a^2)` and
/// `T - t = p / a`. Returns `None` when the local behaviour is not of that
/// form (`a <= 0` or `b <= a^2`).
pub fn extrapolate_remaining_time(v: &[f64], w: &[f64], acc: &[f64]) -> Option<f64> {
    let (i, vi) = v
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))?;
    if *vi == 0.0 || !vi.is_finite() {
        return None;
    }
    let a = w[i] / vi;
    let b = acc[i] / vi;
    let denom = b - a * a;
    if !(a > 0.0 && denom > 0.0) || !a.is_finite() || !b.is_finite() {
        return None;
    }
    let remaining = a / denom;
    remaining.is_finite().then_some(remaining)
}
