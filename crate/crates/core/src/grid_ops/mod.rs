//! Sequence algebra on uniform grids `x_i = i h`.
//!
//! Two-sided sequences are stored as finite slices over `[i_min, i_max]`;
//! every index outside that window reads as zero.

pub mod lemmas;
pub mod quadrature;

use crate::error::{Error, Result};
use crate::toeplitz::{ConvolutionPath, ToeplitzOperator};

/// A uniform index window with mesh size `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    h: f64,
    i_min: i64,
    i_max: i64,
}

impl Grid {
    pub fn new(h: f64, i_min: i64, i_max: i64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidGrid(format!("mesh size must be positive, got {h}")));
        }
        if i_min > i_max {
            return Err(Error::InvalidGrid(format!(
                "empty index range [{i_min}, {i_max}]"
            )));
        }
        Ok(Self { h, i_min, i_max })
    }

    /// The window `-n..=n`.
    pub fn symmetric(h: f64, n: i64) -> Result<Self> {
        Self::new(h, -n, n)
    }

    /// Grid whose end points are exactly `x_left` and `x_right`. Both must be
    /// integer multiples of `h` to within `1e-12` relative.
    pub fn from_interval(h: f64, x_left: f64, x_right: f64) -> Result<Self> {
        if !(x_left < x_right) {
            return Err(Error::InvalidGrid(format!(
                "x_left = {x_left} must be smaller than x_right = {x_right}"
            )));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidGrid(format!("mesh size must be positive, got {h}")));
        }
        let count = (x_right - x_left) / h;
        if (count - count.round()).abs() > 1e-12 * count.abs().max(1.0) {
            return Err(Error::InvalidGrid(format!(
                "h = {h} does not divide the interval [{x_left}, {x_right}] ({count} cells)"
            )));
        }
        let lo = x_left / h;
        if (lo - lo.round()).abs() > 1e-12 * lo.abs().max(1.0) {
            return Err(Error::InvalidGrid(format!(
                "x_left = {x_left} is not a grid point i*h for h = {h}"
            )));
        }
        let i_min = lo.round() as i64;
        Self::new(h, i_min, i_min + count.round() as i64)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn i_min(&self) -> i64 {
        self.i_min
    }

    pub fn i_max(&self) -> i64 {
        self.i_max
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        (self.i_max - self.i_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, i: i64) -> f64 {
        i as f64 * self.h
    }

    pub fn x_left(&self) -> f64 {
        self.point(self.i_min)
    }

    pub fn x_right(&self) -> f64 {
        self.point(self.i_max)
    }

    pub fn contains(&self, i: i64) -> bool {
        (self.i_min..=self.i_max).contains(&i)
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        self.i_min..=self.i_max
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        self.indices().map(move |i| self.point(i))
    }

    /// Mirror image `[-i_max, -i_min]`.
    pub fn reflected(&self) -> Self {
        Self {
            h: self.h,
            i_min: -self.i_max,
            i_max: -self.i_min,
        }
    }

    pub fn same_mesh(&self, other: &Grid) -> Result<()> {
        if self.h == other.h {
            Ok(())
        } else {
            Err(Error::MeshMismatch {
                left: self.h,
                right: other.h,
            })
        }
    }
}

/// Values on a [`Grid`], one per index.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSequence {
    grid: Grid,
    values: Vec<f64>,
}

impl GridSequence {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    /// Sequence with a single nonzero entry `value` at index `i`.
    pub fn spike(grid: Grid, i: i64, value: f64) -> Self {
        let mut s = Self::zeros(grid);
        if grid.contains(i) {
            s.values[(i - grid.i_min) as usize] = value;
        }
        s
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at grid index `i`, zero outside the window.
    pub fn at(&self, i: i64) -> f64 {
        if self.grid.contains(i) {
            self.values[(i - self.grid.i_min) as usize]
        } else {
            0.0
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Applies `f` componentwise.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Same values re-indexed by `i -> -i`.
    pub fn reflected(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self {
            grid: self.grid.reflected(),
            values,
        }
    }

    /// Shift by `s` indices with zero fill, keeping the grid.
    pub fn shifted(&self, s: i64) -> Self {
        let grid = self.grid;
        let values = grid.indices().map(|i| self.at(i - s)).collect();
        Self { grid, values }
    }
}

/// Norm selector for [`norm_lp`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    pub fn from_exponent(p: f64) -> Result<Self> {
        if p == 1.0 {
            Ok(Norm::L1)
        } else if p == 2.0 {
            Ok(Norm::L2)
        } else if p == f64::INFINITY {
            Ok(Norm::Linf)
        } else {
            Err(Error::UnsupportedNorm(p))
        }
    }
}

/// `(sum_i h |u_i|^p)^(1/p)` for `p` in {1, 2}, `sup |u_i|` for `p = inf`.
pub fn norm_lp(u: &GridSequence, p: f64) -> Result<f64> {
    Ok(norm(u, Norm::from_exponent(p)?))
}

pub fn norm(u: &GridSequence, which: Norm) -> f64 {
    let h = u.grid.h;
    match which {
        Norm::L1 => h * u.values.iter().map(|v| v.abs()).sum::<f64>(),
        Norm::L2 => (h * u.values.iter().map(|v| v * v).sum::<f64>()).sqrt(),
        Norm::Linf => norm_linf(u),
    }
}

pub fn norm_linf(u: &GridSequence) -> f64 {
    linf(&u.values)
}

/// Max absolute value of a slice; NaN entries count as infinite.
pub fn linf(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, v| {
        if v.is_nan() {
            f64::INFINITY
        } else {
            m.max(v.abs())
        }
    })
}

/// `<u, v> = sum_i h u_i v_i` over the union of both windows.
pub fn inner_product(u: &GridSequence, v: &GridSequence) -> Result<f64> {
    u.grid.same_mesh(&v.grid)?;
    let lo = u.grid.i_min.max(v.grid.i_min);
    let hi = u.grid.i_max.min(v.grid.i_max);
    Ok(u.grid.h * (lo..=hi).map(|i| u.at(i) * v.at(i)).sum::<f64>())
}

/// Discrete convolution `(u * v)_i = sum_j h u_{i-j} v_j`, evaluated on the
/// window of `v` with the reference direct loop.
pub fn convolve(u: &GridSequence, v: &GridSequence) -> Result<GridSequence> {
    convolve_with(u, v, ConvolutionPath::Direct)
}

pub fn convolve_with(
    u: &GridSequence,
    v: &GridSequence,
    path: ConvolutionPath,
) -> Result<GridSequence> {
    u.grid.same_mesh(&v.grid)?;
    let h = u.grid.h;
    let coeffs: Vec<f64> = u.values.iter().map(|x| h * x).collect();
    // Offsets k = i - j range over u's window.
    let op = ToeplitzOperator::new(&coeffs, u.grid.i_min, v.values.len(), path);
    GridSequence::new(v.grid, op.apply(&v.values))
}

/// `(D+ u)_i = (u_{i+1} - u_i) / h`.
pub fn diff_forward(u: &GridSequence) -> GridSequence {
    let h = u.grid.h;
    let values = u.grid.indices().map(|i| (u.at(i + 1) - u.at(i)) / h).collect();
    GridSequence {
        grid: u.grid,
        values,
    }
}

/// `(D- u)_i = (u_i - u_{i-1}) / h`.
pub fn diff_backward(u: &GridSequence) -> GridSequence {
    let h = u.grid.h;
    let values = u.grid.indices().map(|i| (u.at(i) - u.at(i - 1)) / h).collect();
    GridSequence {
        grid: u.grid,
        values,
    }
}

/// `(D+ D- u)_i = (u_{i+1} - 2 u_i + u_{i-1}) / h^2`.
pub fn diff_second(u: &GridSequence) -> GridSequence {
    let h = u.grid.h;
    let values = u
        .grid
        .indices()
        .map(|i| (u.at(i + 1) - 2.0 * u.at(i) + u.at(i - 1)) / (h * h))
        .collect();
    GridSequence {
        grid: u.grid,
        values,
    }
}

/// Samples `f` at the grid points.
pub fn restrict(f: impl Fn(f64) -> f64, grid: &Grid) -> Result<GridSequence> {
    let mut values = Vec::with_capacity(grid.len());
    for x in grid.points() {
        let y = f(x);
        if !y.is_finite() {
            return Err(Error::NonFinite { x, value: y });
        }
        values.push(y);
    }
    Ok(GridSequence {
        grid: *grid,
        values,
    })
}

// Cell index containing x, snapping points that sit on a node up to roundoff.
fn cell_of(x: f64, h: f64) -> i64 {
    let r = x / h;
    let nearest = r.round();
    if (x - nearest * h).abs() <= 4.0 * f64::EPSILON * x.abs().max(h) {
        nearest as i64
    } else {
        r.floor() as i64
    }
}

/// Right-continuous step function `P0(u)(x) = u_i` on `[x_i, x_{i+1})`.
#[derive(Debug, Clone)]
pub struct PiecewiseConstant {
    seq: GridSequence,
}

impl PiecewiseConstant {
    pub fn eval(&self, x: f64) -> f64 {
        self.seq.at(cell_of(x, self.seq.grid.h))
    }

    /// Value on cell `i` (the left-end node value).
    pub fn cell_value(&self, i: i64) -> f64 {
        self.seq.at(i)
    }
}

/// Nodal interpolant `P1(u)`, linear on each `[x_i, x_{i+1})`.
#[derive(Debug, Clone)]
pub struct PiecewiseLinear {
    seq: GridSequence,
}

impl PiecewiseLinear {
    pub fn eval(&self, x: f64) -> f64 {
        let h = self.seq.grid.h;
        let i = cell_of(x, h);
        if !self.seq.grid.contains(i) {
            return 0.0;
        }
        self.on_cell(i, x - i as f64 * h)
    }

    /// Value at offset `s` in `[0, h]` from the left node of cell `i`.
    pub fn on_cell(&self, i: i64, s: f64) -> f64 {
        let (a, b) = (self.seq.at(i), self.seq.at(i + 1));
        a + (b - a) * s / self.seq.grid.h
    }
}

pub fn extend_p0(u: &GridSequence) -> PiecewiseConstant {
    PiecewiseConstant { seq: u.clone() }
}

pub fn extend_p1(u: &GridSequence) -> PiecewiseLinear {
    PiecewiseLinear { seq: u.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(h: f64, i_min: i64, values: &[f64]) -> GridSequence {
        let g = Grid::new(h, i_min, i_min + values.len() as i64 - 1).unwrap();
        GridSequence::new(g, values.to_vec()).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(0.0, 0, 1).is_err());
        assert!(Grid::new(-1.0, 0, 1).is_err());
        assert!(Grid::new(1.0, 2, 1).is_err());
        let g = Grid::from_interval(0.125, -30.0, 30.0).unwrap();
        assert_eq!((g.i_min(), g.i_max()), (-240, 240));
        assert!(Grid::from_interval(0.3, -1.0, 1.0).is_err());
        assert!(Grid::from_interval(0.1, 1.0, -1.0).is_err());
        let g = Grid::from_interval(0.1, -10.0, 10.0).unwrap();
        assert_eq!(g.len(), 201);
        assert_eq!(g.point(7), 7.0 * 0.1);
    }

    #[test]
    fn norms_on_small_sequences() {
        let u = seq(0.5, 0, &[1.0]);
        assert_eq!(norm_lp(&u, 1.0).unwrap(), 0.5);
        let z = GridSequence::zeros(Grid::symmetric(0.3, 4).unwrap());
        for p in [1.0, 2.0, f64::INFINITY] {
            assert_eq!(norm_lp(&z, p).unwrap(), 0.0);
        }
        let u = seq(1.0, 0, &[3.0, 4.0]);
        assert_eq!(norm_lp(&u, 2.0).unwrap(), 5.0);
        assert_eq!(norm_linf(&seq(1.0, 0, &[-2.0, 1.0])), 2.0);
        assert!(matches!(norm_lp(&u, 0.5), Err(Error::UnsupportedNorm(_))));
        assert!(matches!(norm_lp(&u, 3.0), Err(Error::UnsupportedNorm(_))));
    }

    #[test]
    fn linf_of_sech2_samples_is_value_at_origin() {
        let g = Grid::symmetric(0.37, 20).unwrap();
        let u = restrict(|x: f64| 1.0 / x.cosh().powi(2), &g).unwrap();
        assert_eq!(norm_linf(&u), u.at(0));
    }

    #[test]
    fn convolution_examples() {
        let h = 0.25;
        let g = Grid::symmetric(h, 5).unwrap();
        let delta = GridSequence::spike(g, 0, 1.0 / h);
        let v = restrict(|x| x * x - x + 0.5, &g).unwrap();
        let c = convolve(&delta, &v).unwrap();
        for (a, b) in c.values().iter().zip(v.values()) {
            assert!((a - b).abs() < 1e-15);
        }
        let zero = GridSequence::zeros(g);
        assert!(convolve(&zero, &v).unwrap().values().iter().all(|&x| x == 0.0));

        let u = seq(1.0, 0, &[1.0, 1.0]);
        let c = convolve(&u, &u).unwrap();
        assert_eq!(c.values(), &[1.0, 2.0]);
    }

    #[test]
    fn convolution_rejects_mesh_mismatch() {
        let a = seq(1.0, 0, &[1.0]);
        let b = seq(0.5, 0, &[1.0]);
        assert!(matches!(convolve(&a, &b), Err(Error::MeshMismatch { .. })));
    }

    #[test]
    fn difference_examples() {
        let g = Grid::symmetric(0.1, 10).unwrap();
        let lin = restrict(|x| 3.0 * x + 1.0, &g).unwrap();
        let d = diff_forward(&lin);
        for i in -9..=9 {
            assert!((d.at(i) - 3.0).abs() < 1e-12);
        }
        let c = restrict(|_| 2.5, &g).unwrap();
        for i in -9..=9 {
            assert_eq!(diff_backward(&c).at(i), 0.0);
            assert_eq!(diff_second(&c).at(i), 0.0);
        }
        let sq = restrict(|x| x * x, &g).unwrap();
        assert!((diff_forward(&sq).at(0) - 0.1).abs() < 1e-14);
        let d2 = diff_second(&sq);
        for i in -9..=9 {
            assert!((d2.at(i) - 2.0).abs() < 1e-10);
        }
        let g = Grid::symmetric(0.5, 3).unwrap();
        let q = restrict(|x| x.powi(4), &g).unwrap();
        assert_eq!(diff_second(&q).at(0), 0.5);
    }

    #[test]
    fn restriction_examples() {
        let g = Grid::symmetric(1.0, 1).unwrap();
        assert_eq!(restrict(|x| x, &g).unwrap().values(), &[-1.0, 0.0, 1.0]);
        assert!(restrict(|_| 0.0, &g).unwrap().values().iter().all(|&v| v == 0.0));
        assert!(matches!(
            restrict(|x| 1.0 / x, &g),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn extensions_reproduce_nodes_and_lines() {
        let g = Grid::symmetric(0.1, 30).unwrap();
        let u = restrict(|x| 2.0 * x - 0.3, &g).unwrap();
        let p0 = extend_p0(&u);
        let p1 = extend_p1(&u);
        for i in g.indices() {
            assert_eq!(p0.eval(g.point(i)), u.at(i));
        }
        for k in 0..500 {
            let x = -3.0 + 5.9 * k as f64 / 500.0;
            assert!((p1.eval(x) - (2.0 * x - 0.3)).abs() < 1e-12, "x={x}");
            let cell = (x / 0.1).floor() as i64;
            assert_eq!(p0.eval(x), u.at(cell));
        }
        assert_eq!(p0.eval(-3.05), 0.0);
        assert_eq!(p0.eval(3.1), 0.0);
        assert_eq!(p1.eval(3.1), 0.0);
        // last cell ramps down to the zero extension
        assert!((p1.eval(3.05) - 0.5 * u.at(30)).abs() < 1e-12);
    }

    #[test]
    fn shift_and_reflect() {
        let u = seq(1.0, -1, &[1.0, 2.0, 3.0]);
        assert_eq!(u.shifted(1).values(), &[0.0, 1.0, 2.0]);
        let r = u.reflected();
        assert_eq!(r.at(1), 1.0);
        assert_eq!(r.at(-1), 3.0);
    }
}
