use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::grid::{push_unique, LineGrid, SampledFunction1D, Warning};
use crate::scalar::{czero, Real};

/// Residual below which an operator is flagged Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Discretized integral operator `(Aφ)(x_i) = Σ_j dx·K(x_i, x_j)·φ(x_j)`.
///
/// `entries` holds the kernel `K`; the action matrix is `dx·K`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix<T: Real> {
    grid: LineGrid<T>,
    entries: DMatrix<Complex<T>>,
    quadrature_weight: T,
    hermitian_flag: bool,
    warnings: Vec<Warning>,
}

impl<T: Real> OperatorMatrix<T> {
    pub fn from_kernel(grid: LineGrid<T>, entries: DMatrix<Complex<T>>) -> Result<Self> {
        let n = grid.len();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                got: entries.nrows() * entries.ncols(),
            });
        }
        if !entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("operator kernel"));
        }
        let mut out = Self {
            grid,
            entries,
            quadrature_weight: grid.dx(),
            hermitian_flag: false,
            warnings: Vec::new(),
        };
        out.hermitian_flag = out.hermitian_residual() < T::lit(HERMITIAN_TOL);
        Ok(out)
    }

    /// Builds the operator from its action matrix (kernel times `dx`).
    pub fn from_action(grid: LineGrid<T>, action: DMatrix<Complex<T>>) -> Result<Self> {
        let inv = T::one() / grid.dx();
        Self::from_kernel(grid, action * Complex::new(inv, T::zero()))
    }

    /// Multiplication operator `φ ↦ f·φ`.
    pub fn multiplication(grid: LineGrid<T>, f: &[Complex<T>]) -> Result<Self> {
        if f.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: f.len(),
            });
        }
        Self::from_action(grid, DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(f)))
    }

    pub fn identity(grid: LineGrid<T>) -> Self {
        Self::from_action(grid, DMatrix::identity(grid.len(), grid.len())).expect("finite")
    }

    pub fn grid(&self) -> &LineGrid<T> {
        &self.grid
    }

    pub fn entries(&self) -> &DMatrix<Complex<T>> {
        &self.entries
    }

    pub fn quadrature_weight(&self) -> T {
        self.quadrature_weight
    }

    pub fn hermitian_flag(&self) -> bool {
        self.hermitian_flag
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

    pub fn action(&self) -> DMatrix<Complex<T>> {
        &self.entries * Complex::new(self.quadrature_weight, T::zero())
    }

    /// `max |K_ij - conj(K_ji)|`.
    pub fn hermitian_residual(&self) -> T {
        let n = self.entries.nrows();
        let mut r = T::zero();
        for i in 0..n {
            for j in i..n {
                let d = self.entries[(i, j)] - self.entries[(j, i)].conj();
                r = r.max(d.norm_sqr().sqrt());
            }
        }
        r
    }

    /// True when every entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|z| z.im == T::zero())
    }

    pub fn apply(&self, f: &SampledFunction1D<T>) -> Result<SampledFunction1D<T>> {
        if !self.grid.matches(f.grid()) {
            return Err(Error::GridMismatch("operator and state grids differ".into()));
        }
        let v = nalgebra::DVector::from_column_slice(f.values());
        let out = &self.entries * v * Complex::new(self.quadrature_weight, T::zero());
        SampledFunction1D::new(self.grid, out.iter().copied().collect())
    }

    /// `⟨φ|Aφ⟩` with grid quadrature.
    pub fn expectation(&self, f: &SampledFunction1D<T>) -> Result<Complex<T>> {
        f.inner(&self.apply(f)?)
    }

    /// `Σ dx K_ii`.
    pub fn trace(&self) -> Complex<T> {
        let s = (0..self.entries.nrows()).fold(czero(), |acc, i| acc + self.entries[(i, i)]);
        s * self.quadrature_weight
    }

    pub fn adjoint(&self) -> Self {
        let mut out = self.clone();
        out.entries = self.entries.adjoint();
        out
    }

    pub fn scaled(&self, s: Complex<T>) -> Self {
        let mut out = self.clone();
        out.entries *= s;
        out.hermitian_flag = out.hermitian_residual() < T::lit(HERMITIAN_TOL);
        out
    }

    /// Operator product `A·B`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        let k = &self.entries * &other.entries * Complex::new(self.quadrature_weight, T::zero());
        Ok(Self::from_kernel(self.grid, k)?.with_warnings(self.merged_warnings(other)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        Ok(Self::from_kernel(self.grid, &self.entries + &other.entries)?.with_warnings(self.merged_warnings(other)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        Ok(Self::from_kernel(self.grid, &self.entries - &other.entries)?.with_warnings(self.merged_warnings(other)))
    }

    /// Largest entry-wise difference of the action matrices.
    pub fn max_action_diff(&self, other: &Self) -> Result<T> {
        self.check_grid(other)?;
        let d = (&self.entries - &other.entries) * Complex::new(self.quadrature_weight, T::zero());
        Ok(d.iter().fold(T::zero(), |m, z| m.max(z.norm_sqr().sqrt())))
    }

    /// Replaces the kernel by its Hermitian part `(K + K†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let mut out = self.clone();
        out.entries = (&self.entries + self.entries.adjoint()) * Complex::new(T::lit(0.5), T::zero());
        out.hermitian_flag = true;
        out
    }

    fn check_grid(&self, other: &Self) -> Result<()> {
        if self.grid.matches(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch("operators live on different grids".into()))
        }
    }

    fn merged_warnings(&self, other: &Self) -> Vec<Warning> {
        self.warnings.iter().chain(&other.warnings).cloned().collect()
    }
}

/// `[A, B] = AB - BA`.
pub fn commutator<T: Real>(a: &OperatorMatrix<T>, b: &OperatorMatrix<T>) -> Result<OperatorMatrix<T>> {
    a.compose(b)?.sub(&b.compose(a)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn action_and_kernel_scaling() {
        let g = LineGrid::<f64>::centered(4.0, 16).unwrap();
        let id = OperatorMatrix::identity(g);
        assert!(id.hermitian_flag());
        assert!((id.entries()[(0, 0)].re - 1.0 / g.dx()).abs() < 1e-12);
        let f = SampledFunction1D::from_real_fn(g, |x: f64| x).unwrap();
        assert_eq!(id.apply(&f).unwrap().max_abs_diff(&f).unwrap(), 0.0);
        assert!((id.trace().re - 16.0).abs() < 1e-12);
    }

    #[test]
    fn commutator_of_diagonals_vanishes() {
        let g = LineGrid::<f64>::centered(4.0, 16).unwrap();
        let xs: Vec<Complex<f64>> = g.points().iter().map(|&x| Complex::new(x, 0.0)).collect();
        let a = OperatorMatrix::multiplication(g, &xs).unwrap();
        let b = a.compose(&a).unwrap();
        let c = commutator(&a, &b).unwrap();
        assert!(c.entries().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn non_hermitian_flag() {
        let g = LineGrid::<f64>::centered(4.0, 8).unwrap();
        let mut k = DMatrix::from_element(8, 8, Complex::new(0.0, 0.0));
        k[(0, 1)] = Complex::new(1.0, 0.0);
        let op = OperatorMatrix::from_kernel(g, k).unwrap();
        assert!(!op.hermitian_flag());
        assert!(op.hermitian_part().hermitian_residual() == 0.0);
    }
}

/// Structure of a Fourier multiplier, used to make discrete symmetries exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolParity {
    /// No structure assumed.
    General,
    /// Real and odd in `p`: the circulant is purely imaginary and Hermitian.
    RealOdd,
    /// Real and even in `p`: the circulant is real and symmetric.
    RealEven,
}

/// Action matrix of the Fourier multiplier `σ(P)` on the periodic grid.
///
/// `σ` is evaluated on the centered reciprocal grid, including the Nyquist node `-n/2·dp`.
pub fn circulant_from_symbol<T: Real>(
    grid: &LineGrid<T>,
    symbol: impl Fn(T) -> Complex<T>,
    parity: SymbolParity,
) -> DMatrix<Complex<T>> {
    let n = grid.len();
    let dual = grid.dual();
    let mut s: Vec<Complex<T>> = (0..n).map(|k| symbol(dual.point(k))).collect();
    rustfft::FftPlanner::new().plan_fft_inverse(n).process(&mut s);
    let inv = T::one() / T::idx(n);
    for (d, z) in s.iter_mut().enumerate() {
        let sign = if d % 2 == 0 { inv } else { -inv };
        *z *= sign;
    }
    if parity != SymbolParity::General {
        for d in 1..n / 2 {
            let avg = (s[d] + s[n - d].conj()) * T::lit(0.5);
            s[d] = avg;
            s[n - d] = avg.conj();
        }
        s[0].im = T::zero();
        s[n / 2].im = T::zero();
        for z in &mut s {
            match parity {
                SymbolParity::RealOdd => z.re = T::zero(),
                SymbolParity::RealEven => z.im = T::zero(),
                SymbolParity::General => {}
            }
        }
    }
    DMatrix::from_fn(n, n, |j, m| s[(j + n - m) % n])
}
