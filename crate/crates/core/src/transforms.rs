use nalgebra::{Complex, DMatrix};
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::{LineGrid, PhaseGrid, SampledFunction1D, SampledFunction2D, Warning};
use crate::scalar::{cis_cycles, czero, Real};

/// Edge-to-peak ratio above which inputs are flagged as not decaying.
pub const DEFAULT_DECAY_FLOOR: f64 = 1e-10;

/// Sign convention of a continuum Fourier transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `F(p) = (2π)^{-1/2} ∫ f(x) e^{-ixp} dx`
    Forward,
    /// `f(x) = (2π)^{-1/2} ∫ F(p) e^{+ixp} dp`
    Inverse,
}

impl Direction {
    fn sign<T: Real>(self) -> T {
        match self {
            Direction::Forward => -T::one(),
            Direction::Inverse => T::one(),
        }
    }

    fn flipped(self) -> Self {
        match self {
            Direction::Forward => Direction::Inverse,
            Direction::Inverse => Direction::Forward,
        }
    }
}

fn decay_warning<T: Real>(ratio: T, floor: T, context: &'static str) -> Option<Warning> {
    (ratio > floor).then(|| Warning::EdgeDecay {
        context,
        ratio: ratio.to_f64(),
    })
}

/// Reusable continuum-normalized DFT between a grid and a reciprocal grid.
pub(crate) struct Dft<T: Real> {
    planner: FftPlanner<T>,
}

impl<T: Real> Dft<T> {
    pub(crate) fn new() -> Self {
        Self {
            planner: FftPlanner::new(),
        }
    }

    /// `out_k = (dx/√2π) Σ_j f_j e^{s·i·x_j·p_k}` for reciprocal `src`, `dst`.
    pub(crate) fn apply(
        &mut self,
        values: &[Complex<T>],
        src: &LineGrid<T>,
        dst: &LineGrid<T>,
        dir: Direction,
    ) -> Vec<Complex<T>> {
        let n = src.len();
        let s: T = dir.sign();
        let x0 = src.x_min();
        let p0 = dst.x_min();
        let two_pi = T::two_pi();
        let pre = src.dx() * p0 / two_pi;
        let mut buf: Vec<Complex<T>> = values
            .iter()
            .enumerate()
            .map(|(j, &f)| f * cis_cycles(s * T::idx(j) * pre))
            .collect();
        let fft = match dir {
            Direction::Forward => self.planner.plan_fft_forward(n),
            Direction::Inverse => self.planner.plan_fft_inverse(n),
        };
        fft.process(&mut buf);
        let scale = src.dx() / two_pi.sqrt();
        let base = x0 * p0 / two_pi;
        let step = x0 * dst.dx() / two_pi;
        for (k, z) in buf.iter_mut().enumerate() {
            let phase = cis_cycles(s * (base + T::idx(k) * step));
            *z = *z * phase * scale;
        }
        buf
    }
}

fn check_reciprocal<T: Real>(src: &LineGrid<T>, dst: &LineGrid<T>) -> Result<()> {
    if src.is_reciprocal_to(dst) {
        Ok(())
    } else {
        Err(Error::GridMismatch(format!(
            "target grid (n = {}, spacing {}) is not reciprocal to source (n = {}, spacing {})",
            dst.len(),
            dst.dx().to_f64(),
            src.len(),
            src.dx().to_f64()
        )))
    }
}

/// Continuum Fourier transform onto the centered reciprocal grid.
pub fn fourier_1d<T: Real>(f: &SampledFunction1D<T>, dir: Direction) -> SampledFunction1D<T> {
    let target = f.grid().dual();
    fourier_1d_onto(f, dir, &target).expect("dual grid is reciprocal by construction")
}

/// Continuum Fourier transform onto an explicit reciprocal grid.
pub fn fourier_1d_onto<T: Real>(
    f: &SampledFunction1D<T>,
    dir: Direction,
    target: &LineGrid<T>,
) -> Result<SampledFunction1D<T>> {
    fourier_1d_with(f, dir, target, T::lit(DEFAULT_DECAY_FLOOR))
}

/// As [`fourier_1d_onto`] with an explicit decay floor for the edge check.
pub fn fourier_1d_with<T: Real>(
    f: &SampledFunction1D<T>,
    dir: Direction,
    target: &LineGrid<T>,
    decay_floor: T,
) -> Result<SampledFunction1D<T>> {
    check_reciprocal(f.grid(), target)?;
    let out = Dft::new().apply(f.values(), f.grid(), target, dir);
    let warn = decay_warning(f.edge_ratio(), decay_floor, "fourier_1d");
    Ok(SampledFunction1D::new(*target, out)?.with_warnings(warn))
}

fn map_rows<T: Real>(
    m: &DMatrix<Complex<T>>,
    src: &LineGrid<T>,
    dst: &LineGrid<T>,
    dir: Direction,
    dft: &mut Dft<T>,
) -> DMatrix<Complex<T>> {
    let mut out = DMatrix::from_element(m.nrows(), dst.len(), czero());
    let mut row = vec![czero(); m.ncols()];
    for i in 0..m.nrows() {
        for (k, v) in row.iter_mut().enumerate() {
            *v = m[(i, k)];
        }
        let t = dft.apply(&row, src, dst, dir);
        for (k, v) in t.into_iter().enumerate() {
            out[(i, k)] = v;
        }
    }
    out
}

fn map_columns<T: Real>(
    m: &DMatrix<Complex<T>>,
    src: &LineGrid<T>,
    dst: &LineGrid<T>,
    dir: Direction,
    dft: &mut Dft<T>,
) -> DMatrix<Complex<T>> {
    let mut out = DMatrix::from_element(dst.len(), m.ncols(), czero());
    for k in 0..m.ncols() {
        let col: Vec<Complex<T>> = m.column(k).iter().copied().collect();
        let t = dft.apply(&col, src, dst, dir);
        out.column_mut(k).copy_from_slice(&t);
    }
    out
}

/// Forward transform in `p` at fixed `q`: `F̂_p(q, y) = (2π)^{-1/2} ∫ F(q, p) e^{-iyp} dp`.
pub fn partial_fourier_p<T: Real>(f: &SampledFunction2D<T>) -> SampledFunction2D<T> {
    let g = f.grid();
    let y_axis = g.p_axis.dual();
    let mut dft = Dft::new();
    let out = map_rows(f.values(), &g.p_axis, &y_axis, Direction::Forward, &mut dft);
    let warn = decay_warning(f.edge_ratio(), T::lit(DEFAULT_DECAY_FLOOR), "partial_fourier_p");
    SampledFunction2D::new(PhaseGrid::new(g.q_axis, y_axis), out)
        .expect("shape preserved")
        .with_warnings(warn)
}

/// Symplectic Fourier transform
/// `𝔉_s[F](q, p) = (2π)^{-1}∫∫ e^{-i(q p' - q' p)} F(q', p') dq' dp'`,
/// or its dual (both exponent signs flipped) when `dual` is set.
///
/// The result lives on `(dual(p_axis), dual(q_axis))`, which equals the input grid
/// for a centered conjugate grid.
pub fn symplectic_fourier<T: Real>(f: &SampledFunction2D<T>, dual: bool) -> SampledFunction2D<T> {
    let g = f.grid();
    let q_out = g.p_axis.dual();
    let p_out = g.q_axis.dual();
    let first = if dual { Direction::Inverse } else { Direction::Forward };
    let mut dft = Dft::new();
    let stage = map_rows(f.values(), &g.p_axis, &q_out, first, &mut dft);
    // rows: q', columns: q. Transform along q' for every output q.
    let out = map_columns(&stage, &g.q_axis, &p_out, first.flipped(), &mut dft);
    let warn = decay_warning(f.edge_ratio(), T::lit(DEFAULT_DECAY_FLOOR), "symplectic_fourier");
    // `out` has rows p and columns q; transpose to rows q.
    SampledFunction2D::new(PhaseGrid::new(q_out, p_out), out.transpose())
        .expect("shape preserved")
        .with_warnings(warn)
}

fn single_nonzero<T: Real>(values: &[Complex<T>]) -> Option<usize> {
    let mut found = None;
    for (j, z) in values.iter().enumerate() {
        if z.re != T::zero() || z.im != T::zero() {
            if found.is_some() {
                return None;
            }
            found = Some(j);
        }
    }
    found
}

/// Integer offset `x_min/dx` when it is integral.
fn integral_origin<T: Real>(g: &LineGrid<T>) -> Option<i64> {
    let t = g.x_min() / g.dx();
    let r = t.round();
    ((t - r).abs() <= T::lit(1e-9)).then(|| r.to_f64() as i64)
}

/// Periodic convolution `(f ∗ g)(x) = ∫ f(x - y) g(y) dy` on a shared grid.
///
/// Computed as `F^{-1}[√(2π) F[f]·F[g]]`; a single-sample input is handled by an exact shift.
pub fn convolve_1d<T: Real>(
    f: &SampledFunction1D<T>,
    g: &SampledFunction1D<T>,
) -> Result<SampledFunction1D<T>> {
    if !f.grid().matches(g.grid()) {
        return Err(Error::GridMismatch("convolve_1d operands differ".into()));
    }
    let grid = *f.grid();
    let floor = T::lit(DEFAULT_DECAY_FLOOR);
    let mut warnings: Vec<Warning> = Vec::new();
    for (h, name) in [(f, "convolve_1d lhs"), (g, "convolve_1d rhs")] {
        if let Some(w) = decay_warning(h.edge_ratio(), floor, name) {
            warnings.push(w);
        }
    }
    if let Some(origin) = integral_origin(&grid) {
        let spike = single_nonzero(g.values())
            .map(|k| (f, k, g.values()[k]))
            .or_else(|| single_nonzero(f.values()).map(|k| (g, k, f.values()[k])));
        if let Some((other, k, weight)) = spike {
            // x_i - x_k = (i - k - origin)·dx + x_min
            let n = grid.len() as i64;
            let scale = weight * grid.dx();
            let values = (0..n)
                .map(|i| other.values()[(i - k as i64 + origin).rem_euclid(n) as usize] * scale)
                .collect();
            return Ok(SampledFunction1D::new(grid, values)?.with_warnings(warnings));
        }
    }
    let dual = grid.dual();
    let mut dft = Dft::new();
    let ff = dft.apply(f.values(), &grid, &dual, Direction::Forward);
    let gg = dft.apply(g.values(), &grid, &dual, Direction::Forward);
    let root = T::two_pi().sqrt();
    let prod: Vec<Complex<T>> = ff.iter().zip(&gg).map(|(a, b)| a * b * root).collect();
    let out = dft.apply(&prod, &dual, &grid, Direction::Inverse);
    Ok(SampledFunction1D::new(grid, out)?.with_warnings(warnings))
}

/// Multiplies a spectrum on `dual(grid)` by `symbol(p)` and returns to `grid`.
pub fn apply_symbol<T: Real>(
    f: &SampledFunction1D<T>,
    symbol: impl Fn(T) -> Complex<T>,
) -> SampledFunction1D<T> {
    let grid = *f.grid();
    let dual = grid.dual();
    let mut dft = Dft::new();
    let mut spec = dft.apply(f.values(), &grid, &dual, Direction::Forward);
    for (k, z) in spec.iter_mut().enumerate() {
        *z *= symbol(dual.point(k));
    }
    let out = dft.apply(&spec, &dual, &grid, Direction::Inverse);
    SampledFunction1D::new(grid, out)
        .expect("finite symbol")
        .with_warnings(f.warnings().iter().cloned())
}

/// Spectral derivative of the given order; the Nyquist mode is dropped for odd orders.
pub fn spectral_derivative<T: Real>(f: &SampledFunction1D<T>, order: u32) -> SampledFunction1D<T> {
    let nyquist = f.grid().dual().x_min();
    apply_symbol(f, |p| {
        if order % 2 == 1 && p == nyquist {
            return czero();
        }
        let ip = Complex::new(T::zero(), p);
        (0..order).fold(Complex::new(T::one(), T::zero()), |acc, _| acc * ip)
    })
}

/// Trigonometric interpolation onto a grid `factor` times finer with the same `x_min`.
///
/// The Nyquist coefficient is split evenly between `±n/2`.
pub fn upsample<T: Real>(values: &[Complex<T>], factor: usize) -> Vec<Complex<T>> {
    let n = values.len();
    if factor <= 1 {
        return values.to_vec();
    }
    let m = n * factor;
    let mut planner = FftPlanner::new();
    let mut spec = values.to_vec();
    planner.plan_fft_forward(n).process(&mut spec);
    let mut big = vec![czero(); m];
    let half = n / 2;
    for k in 0..half {
        big[k] = spec[k];
    }
    for k in half + 1..n {
        big[m - n + k] = spec[k];
    }
    let split = spec[half] * T::lit(0.5);
    big[half] = split;
    big[m - half] = split;
    planner.plan_fft_inverse(m).process(&mut big);
    let scale = T::one() / T::idx(n);
    big.into_iter().map(|z| z * scale).collect()
}

fn fft2<T: Real>(data: &mut DMatrix<Complex<T>>, inverse: bool, planner: &mut FftPlanner<T>) {
    let (r, c) = data.shape();
    let col_fft = if inverse {
        planner.plan_fft_inverse(r)
    } else {
        planner.plan_fft_forward(r)
    };
    for k in 0..c {
        let mut col: Vec<Complex<T>> = data.column(k).iter().copied().collect();
        col_fft.process(&mut col);
        data.column_mut(k).copy_from_slice(&col);
    }
    let row_fft = if inverse {
        planner.plan_fft_inverse(c)
    } else {
        planner.plan_fft_forward(c)
    };
    let mut row = vec![czero(); c];
    for i in 0..r {
        for (k, v) in row.iter_mut().enumerate() {
            *v = data[(i, k)];
        }
        row_fft.process(&mut row);
        for (k, v) in row.iter().enumerate() {
            data[(i, k)] = *v;
        }
    }
}

/// Non-periodic 2-D convolution `(K ∗ F)(q, p) = ∫∫ K(q - q', p - p') F(q', p') dq' dp'`
/// sampled on the grid of `f`. The kernel must live on centered axes with the same spacings.
pub fn convolve_2d_linear<T: Real>(
    kernel: &SampledFunction2D<T>,
    f: &SampledFunction2D<T>,
) -> Result<SampledFunction2D<T>> {
    let kg = kernel.grid();
    let fg = f.grid();
    let tol = T::lit(1e-9);
    if !kg.q_axis.is_centered()
        || !kg.p_axis.is_centered()
        || (kg.q_axis.dx() - fg.q_axis.dx()).abs() > tol * fg.q_axis.dx()
        || (kg.p_axis.dx() - fg.p_axis.dx()).abs() > tol * fg.p_axis.dx()
    {
        return Err(Error::GridMismatch(
            "kernel axes must be centered with the spacings of the data grid".into(),
        ));
    }
    let (kr, kc) = kernel.values().shape();
    let (fr, fc) = f.values().shape();
    let rows = (kr + fr).next_power_of_two();
    let cols = (kc + fc).next_power_of_two();
    let mut a = DMatrix::from_element(rows, cols, czero());
    let mut b = DMatrix::from_element(rows, cols, czero());
    a.view_mut((0, 0), (kr, kc)).copy_from(kernel.values());
    b.view_mut((0, 0), (fr, fc)).copy_from(f.values());
    let mut planner = FftPlanner::new();
    fft2(&mut a, false, &mut planner);
    fft2(&mut b, false, &mut planner);
    a.component_mul_assign(&b);
    fft2(&mut a, true, &mut planner);
    let scale = fg.cell_area() / T::idx(rows * cols);
    // Kernel index c ↔ offset zero.
    let cq = kr / 2;
    let cp = kc / 2;
    let out = DMatrix::from_fn(fr, fc, |i, k| a[(i + cq, k + cp)] * scale);
    let mut warnings = Vec::new();
    if let Some(w) = decay_warning(kernel.edge_ratio(), T::lit(DEFAULT_DECAY_FLOOR), "convolve_2d kernel") {
        warnings.push(w);
    }
    Ok(SampledFunction2D::new(*fg, out)?.with_warnings(warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> LineGrid<f64> {
        LineGrid::centered(12.0, 256).unwrap()
    }

    #[test]
    fn gaussian_is_fixed_by_forward_transform() {
        let g = grid();
        let f = SampledFunction1D::from_real_fn(g, |x: f64| (-x * x / 2.0).exp()).unwrap();
        let ff = fourier_1d(&f, Direction::Forward);
        for (k, z) in ff.values().iter().enumerate() {
            let p = ff.grid().point(k);
            assert!((z - Complex::new((-p * p / 2.0).exp(), 0.0)).norm() < 1e-13);
        }
        assert!(ff.warnings().is_empty());
    }

    #[test]
    fn offset_grid_shift_theorem() {
        // f(x) = exp(-(x-1)^2/2) on a non-centered grid; F(p) = e^{-ip} e^{-p^2/2}
        let g = LineGrid::new(-9.0, 15.0, 256).unwrap();
        let f = SampledFunction1D::from_real_fn(g, |x: f64| (-(x - 1.0) * (x - 1.0) / 2.0).exp()).unwrap();
        let ff = fourier_1d(&f, Direction::Forward);
        for (k, z) in ff.values().iter().enumerate() {
            let p = ff.grid().point(k);
            let want = Complex::new(0.0, -p).exp() * (-p * p / 2.0).exp();
            assert!((z - want).norm() < 1e-12, "k={k}");
        }
        let back = fourier_1d_onto(&ff, Direction::Inverse, &g).unwrap();
        assert!(back.max_abs_diff(&f).unwrap() < 1e-13);
    }

    #[test]
    fn mismatched_target_is_rejected() {
        let g = grid();
        let f = SampledFunction1D::zeros(g);
        let bad = LineGrid::centered(3.0, 256).unwrap();
        assert!(matches!(
            fourier_1d_onto(&f, Direction::Forward, &bad),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn convolution_of_gaussians() {
        // e^{-x²/2} ∗ e^{-x²/2} = √π e^{-x²/4}
        let g = grid();
        let f = SampledFunction1D::from_real_fn(g, |x: f64| (-x * x / 2.0).exp()).unwrap();
        let h = convolve_1d(&f, &f).unwrap();
        for (j, z) in h.values().iter().enumerate() {
            let x = g.point(j);
            assert!((z.re - PI.sqrt() * (-x * x / 4.0).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn spike_convolution_is_exact_shift() {
        let g = grid();
        let f = SampledFunction1D::from_real_fn(g, |x: f64| (-x * x).exp()).unwrap();
        let mut spike = vec![Complex::new(0.0, 0.0); 256];
        spike[128 + 10] = Complex::new(1.0 / g.dx(), 0.0);
        let s = SampledFunction1D::new(g, spike).unwrap();
        let h = convolve_1d(&f, &s).unwrap();
        let shift = g.point(138);
        for (j, z) in h.values().iter().enumerate() {
            let x = g.point(j);
            assert!((z.re - (-(x - shift) * (x - shift)).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_of_gaussian() {
        let g = grid();
        let f = SampledFunction1D::from_real_fn(g, |x: f64| (-x * x / 2.0).exp()).unwrap();
        let d2 = spectral_derivative(&f, 2);
        for (j, z) in d2.values().iter().enumerate() {
            let x = g.point(j);
            assert!((z.re - (x * x - 1.0) * (-x * x / 2.0).exp()).abs() < 1e-11);
        }
    }

    #[test]
    fn upsampling_interpolates_band_limited_data() {
        let g = grid();
        let f: Vec<Complex<f64>> = g.points().iter().map(|&x| Complex::new((-x * x / 2.0).exp(), 0.0)).collect();
        let fine = upsample(&f, 2);
        for (j, z) in fine.iter().enumerate() {
            let x = g.x_min() + j as f64 * g.dx() / 2.0;
            assert!((z.re - (-x * x / 2.0).exp()).abs() < 1e-13);
        }
    }

    #[test]
    fn symplectic_transform_of_gaussian_and_involution() {
        // 𝔉_s[e^{-(q²+p²)/2}] = e^{-(q²+p²)/2}
        let g = LineGrid::centered((128.0 * PI).sqrt() / 2.0, 64).unwrap();
        let pg = PhaseGrid::conjugate(&g);
        let f = SampledFunction2D::from_real_fn(pg, |q: f64, p: f64| (-(q * q + p * p) / 2.0).exp()).unwrap();
        let s = symplectic_fourier(&f, false);
        assert!(s.grid().matches(&pg));
        for i in 0..64 {
            for k in 0..64 {
                assert!((s.at(i, k) - f.at(i, k)).norm() < 1e-12);
            }
        }
        let shifted = SampledFunction2D::from_real_fn(pg, |q: f64, p: f64| (-((q - 1.0).powi(2) + 2.0 * p * p) / 2.0).exp()).unwrap();
        let twice = symplectic_fourier(&symplectic_fourier(&shifted, false), false);
        for i in 0..64 {
            for k in 0..64 {
                assert!((twice.at(i, k) - shifted.at(i, k)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn linear_convolution_matches_closed_form() {
        let g = LineGrid::centered(8.0, 64).unwrap();
        let pg = PhaseGrid::new(g, g);
        let k = SampledFunction2D::from_real_fn(pg, |q: f64, p: f64| (-(q * q + p * p)).exp()).unwrap();
        let f = SampledFunction2D::from_real_fn(pg, |q: f64, p: f64| (-(q * q + p * p)).exp()).unwrap();
        let h = convolve_2d_linear(&k, &f).unwrap();
        for i in 0..64 {
            for j in 0..64 {
                let (q, p) = (g.point(i), g.point(j));
                let want = PI / 2.0 * (-(q * q + p * p) / 2.0).exp();
                assert!((h.at(i, j).re - want).abs() < 1e-12);
            }
        }
    }
}
