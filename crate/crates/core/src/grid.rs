use std::fmt;

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::scalar::{czero, Real};

/// Uniform periodic grid `x_j = x_min + j·dx`, `j = 0..n`, with `dx = (x_max - x_min)/n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineGrid<T> {
    x_min: T,
    x_max: T,
    n: usize,
    dx: T,
}

impl<T: Real> LineGrid<T> {
    pub fn new(x_min: T, x_max: T, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::DegenerateInterval {
                min: x_min.to_f64(),
                max: x_max.to_f64(),
            });
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::GridSize(n));
        }
        let dx = (x_max - x_min) / T::idx(n);
        Ok(Self { x_min, x_max, n, dx })
    }

    /// Centered grid on `[-half_width, half_width)`.
    pub fn centered(half_width: T, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    pub fn x_min(&self) -> T {
        self.x_min
    }

    pub fn x_max(&self) -> T {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dx(&self) -> T {
        self.dx
    }

    pub fn point(&self, j: usize) -> T {
        self.x_min + T::idx(j) * self.dx
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    /// Spacing of the reciprocal grid, `2π/(n·dx)`.
    pub fn dual_spacing(&self) -> T {
        T::two_pi() / (T::idx(self.n) * self.dx)
    }

    /// Centered reciprocal grid with `p_k = (k - n/2)·dp`.
    pub fn dual(&self) -> Self {
        let dp = self.dual_spacing();
        let half = T::idx(self.n / 2) * dp;
        Self {
            x_min: -half,
            x_max: half,
            n: self.n,
            dx: dp,
        }
    }

    /// True when `x_min = -(n/2)·dx`, so that index `n/2` is the origin.
    pub fn is_centered(&self) -> bool {
        let offset = self.x_min + T::idx(self.n / 2) * self.dx;
        offset.abs() <= T::lit(1e-9) * self.dx
    }

    /// Same size and same nodes up to a relative tolerance.
    pub fn matches(&self, other: &Self) -> bool {
        let tol = T::lit(1e-9) * self.dx;
        self.n == other.n
            && (self.x_min - other.x_min).abs() <= tol
            && (self.dx - other.dx).abs() <= tol
    }

    /// `n·dx·dp = 2π` for equal sizes.
    pub fn is_reciprocal_to(&self, other: &Self) -> bool {
        let prod = self.dx * other.dx * T::idx(self.n);
        self.n == other.n && (prod - T::two_pi()).abs() <= T::lit(1e-9) * T::two_pi()
    }

    /// Index of the node nearest to `x`, if `x` lies within the periodic cell.
    pub fn nearest_index(&self, x: T) -> Option<usize> {
        let t = ((x - self.x_min) / self.dx).round();
        if t < T::zero() || t > T::idx(self.n - 1) {
            return None;
        }
        Some(t.to_f64() as usize)
    }

    /// True when `x` lies in `[x_min, x_min + (n-1)·dx]`.
    pub fn contains(&self, x: T) -> bool {
        let tol = T::lit(1e-12) * self.dx;
        x >= self.x_min - tol && x <= self.point(self.n - 1) + tol
    }
}

/// Tensor grid for phase-space functions: `q` along rows, `p` along columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGrid<T> {
    pub q_axis: LineGrid<T>,
    pub p_axis: LineGrid<T>,
}

impl<T: Real> PhaseGrid<T> {
    pub fn new(q_axis: LineGrid<T>, p_axis: LineGrid<T>) -> Self {
        Self { q_axis, p_axis }
    }

    /// `q` axis equal to `grid`, `p` axis equal to its reciprocal grid.
    pub fn conjugate(grid: &LineGrid<T>) -> Self {
        Self {
            q_axis: *grid,
            p_axis: grid.dual(),
        }
    }

    /// True when this grid is the centered conjugate grid of `grid`.
    pub fn is_conjugate_of(&self, grid: &LineGrid<T>) -> bool {
        grid.is_centered() && self.q_axis.matches(grid) && self.p_axis.matches(&grid.dual())
    }

    pub fn matches(&self, other: &Self) -> bool {
        self.q_axis.matches(&other.q_axis) && self.p_axis.matches(&other.p_axis)
    }

    pub fn cell_area(&self) -> T {
        self.q_axis.dx() * self.p_axis.dx()
    }
}

/// Non-fatal diagnostics attached to sampled data and operators.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// Samples at the grid boundary exceed the decay floor, so periodic wrap-around may bias results.
    EdgeDecay { context: &'static str, ratio: f64 },
    /// A shift moves mass across the periodic boundary.
    ShiftOffGrid { shift: f64 },
    /// Mollifier width close to the grid spacing.
    UnderResolved { sigma: f64, dx: f64 },
    /// Interval end points do not coincide with grid nodes.
    Misaligned { context: &'static str, offset: f64 },
    Note(String),
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::EdgeDecay { context, ratio } => {
                write!(f, "{context}: edge-to-peak ratio {ratio:.3e} above decay floor")
            }
            Warning::ShiftOffGrid { shift } => {
                write!(f, "shift {shift} moves support across the periodic boundary")
            }
            Warning::UnderResolved { sigma, dx } => {
                write!(f, "width {sigma} spans fewer than four cells of size {dx}")
            }
            Warning::Misaligned { context, offset } => {
                write!(f, "{context}: end points miss grid nodes by up to {offset:.3e}")
            }
            Warning::Note(msg) => f.write_str(msg),
        }
    }
}

pub(crate) fn push_unique(warnings: &mut Vec<Warning>, w: Warning) {
    if !warnings.contains(&w) {
        warnings.push(w);
    }
}

fn check_finite<T: Real>(values: &[Complex<T>], context: &'static str) -> Result<()> {
    if values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(context))
    }
}

/// Complex samples of a function on a [`LineGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction1D<T> {
    grid: LineGrid<T>,
    values: Vec<Complex<T>>,
    warnings: Vec<Warning>,
}

impl<T: Real> SampledFunction1D<T> {
    pub fn new(grid: LineGrid<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        check_finite(&values, "sampled function")?;
        Ok(Self {
            grid,
            values,
            warnings: Vec::new(),
        })
    }

    pub fn from_real(grid: LineGrid<T>, values: &[T]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex::new(v, T::zero())).collect())
    }

    pub fn from_fn(grid: LineGrid<T>, f: impl Fn(T) -> Complex<T>) -> Result<Self> {
        Self::new(grid, grid.points().into_iter().map(f).collect())
    }

    pub fn from_real_fn(grid: LineGrid<T>, f: impl Fn(T) -> T) -> Result<Self> {
        Self::from_fn(grid, |x| Complex::new(f(x), T::zero()))
    }

    pub fn zeros(grid: LineGrid<T>) -> Self {
        Self {
            grid,
            values: vec![czero(); grid.len()],
            warnings: Vec::new(),
        }
    }

    pub fn grid(&self) -> &LineGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub fn with_warning(mut self, w: Warning) -> Self {
        push_unique(&mut self.warnings, w);
        self
    }

    pub fn with_warnings(mut self, ws: impl IntoIterator<Item = Warning>) -> Self {
        for w in ws {
            push_unique(&mut self.warnings, w);
        }
        self
    }

    pub fn real_parts(&self) -> Vec<T> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|z| z.im == T::zero())
    }

    /// Drops imaginary parts; used where a quantity is real by construction.
    pub fn into_real_part(mut self) -> Self {
        for z in &mut self.values {
            z.im = T::zero();
        }
        self
    }

    /// `(Σ dx |f_j|²)^{1/2}`.
    pub fn l2_norm(&self) -> T {
        let s = self.values.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
        (s * self.grid.dx()).sqrt()
    }

    /// `Σ dx f_j`.
    pub fn integral(&self) -> Complex<T> {
        let s = self.values.iter().fold(czero(), |acc, z| acc + z);
        s * self.grid.dx()
    }

    /// `Σ dx conj(f_j) g_j`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if !self.grid.matches(&other.grid) {
            return Err(Error::GridMismatch("inner product".into()));
        }
        let s = self
            .values
            .iter()
            .zip(&other.values)
            .fold(czero(), |acc, (a, b)| acc + a.conj() * b);
        Ok(s * self.grid.dx())
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, z| m.max(z.norm_sqr().sqrt()))
    }

    /// Largest boundary magnitude relative to the peak, or zero for the null function.
    pub fn edge_ratio(&self) -> T {
        let peak = self.max_abs();
        if peak == T::zero() {
            return T::zero();
        }
        let first = self.values[0].norm_sqr().sqrt();
        let last = self.values[self.values.len() - 1].norm_sqr().sqrt();
        first.max(last) / peak
    }

    pub fn map(&self, f: impl Fn(T, Complex<T>) -> Complex<T>) -> Result<Self> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(j, &z)| f(self.grid.point(j), z))
            .collect();
        Ok(Self::new(self.grid, values)?.with_warnings(self.warnings.clone()))
    }

    pub fn scaled(&self, s: Complex<T>) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|z| z * s).collect(),
            warnings: self.warnings.clone(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        if !self.grid.matches(&other.grid) {
            return Err(Error::GridMismatch("difference".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |m, (a, b)| m.max((a - b).norm_sqr().sqrt())))
    }
}

/// Complex samples on a [`PhaseGrid`]; entry `(i, k)` is the value at `(q_i, p_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction2D<T: Real> {
    grid: PhaseGrid<T>,
    values: DMatrix<Complex<T>>,
    warnings: Vec<Warning>,
}

impl<T: Real> SampledFunction2D<T> {
    pub fn new(grid: PhaseGrid<T>, values: DMatrix<Complex<T>>) -> Result<Self> {
        let (r, c) = values.shape();
        if r != grid.q_axis.len() || c != grid.p_axis.len() {
            return Err(Error::LengthMismatch {
                expected: grid.q_axis.len() * grid.p_axis.len(),
                got: r * c,
            });
        }
        check_finite(values.as_slice(), "phase-space function")?;
        Ok(Self {
            grid,
            values,
            warnings: Vec::new(),
        })
    }

    pub fn from_fn(grid: PhaseGrid<T>, f: impl Fn(T, T) -> Complex<T>) -> Result<Self> {
        let qs = grid.q_axis.points();
        let ps = grid.p_axis.points();
        let values = DMatrix::from_fn(qs.len(), ps.len(), |i, k| f(qs[i], ps[k]));
        Self::new(grid, values)
    }

    pub fn from_real_fn(grid: PhaseGrid<T>, f: impl Fn(T, T) -> T) -> Result<Self> {
        Self::from_fn(grid, |q, p| Complex::new(f(q, p), T::zero()))
    }

    pub fn grid(&self) -> &PhaseGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &DMatrix<Complex<T>> {
        &self.values
    }

    pub fn into_values(self) -> DMatrix<Complex<T>> {
        self.values
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub fn with_warnings(mut self, ws: impl IntoIterator<Item = Warning>) -> Self {
        for w in ws {
            push_unique(&mut self.warnings, w);
        }
        self
    }

    pub fn at(&self, i: usize, k: usize) -> Complex<T> {
        self.values[(i, k)]
    }

    /// `Σ dq dp F`.
    pub fn integral(&self) -> Complex<T> {
        let s = self.values.iter().fold(czero(), |acc, z| acc + z);
        s * self.grid.cell_area()
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, z| m.max(z.norm_sqr().sqrt()))
    }

    /// Largest magnitude on the outer frame relative to the peak.
    pub fn edge_ratio(&self) -> T {
        let peak = self.max_abs();
        if peak == T::zero() {
            return T::zero();
        }
        let (r, c) = self.values.shape();
        let mut edge = T::zero();
        for i in 0..r {
            for k in [0, c - 1] {
                edge = edge.max(self.values[(i, k)].norm_sqr().sqrt());
            }
        }
        for k in 0..c {
            for i in [0, r - 1] {
                edge = edge.max(self.values[(i, k)].norm_sqr().sqrt());
            }
        }
        edge / peak
    }

    /// Row `i` as a function of `p`.
    pub fn row(&self, i: usize) -> SampledFunction1D<T> {
        SampledFunction1D {
            grid: self.grid.p_axis,
            values: self.values.row(i).iter().copied().collect(),
            warnings: Vec::new(),
        }
    }

    /// Column `k` as a function of `q`.
    pub fn column(&self, k: usize) -> SampledFunction1D<T> {
        SampledFunction1D {
            grid: self.grid.q_axis,
            values: self.values.column(k).iter().copied().collect(),
            warnings: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes_and_intervals() {
        assert_eq!(LineGrid::<f64>::new(0.0, 1.0, 12), Err(Error::GridSize(12)));
        assert_eq!(LineGrid::<f64>::new(0.0, 1.0, 4), Err(Error::GridSize(4)));
        assert!(matches!(
            LineGrid::<f64>::new(1.0, 1.0, 16),
            Err(Error::DegenerateInterval { .. })
        ));
    }

    #[test]
    fn dual_of_dual_is_identity_for_centered_grids() {
        let g = LineGrid::<f64>::centered(8.0, 64).unwrap();
        assert!(g.is_centered());
        let back = g.dual().dual();
        assert!(back.matches(&g));
        assert!(g.is_reciprocal_to(&g.dual()));
        assert_eq!(g.point(32), 0.0);
    }

    #[test]
    fn norm_and_inner_product() {
        let g = LineGrid::<f64>::centered(10.0, 256).unwrap();
        let f = SampledFunction1D::from_real_fn(g, |x: f64| (-x * x / 2.0).exp() / std::f64::consts::PI.powf(0.25)).unwrap();
        assert!((f.l2_norm() - 1.0).abs() < 1e-12);
        assert!((f.inner(&f).unwrap().re - 1.0).abs() < 1e-12);
        assert!(f.edge_ratio() < 1e-20);
    }

    #[test]
    fn non_finite_samples_are_rejected() {
        let g = LineGrid::<f64>::centered(1.0, 8).unwrap();
        let err = SampledFunction1D::from_real_fn(g, |x: f64| 1.0 / x).unwrap_err();
        assert_eq!(err, Error::NonFinite("sampled function"));
    }
}
