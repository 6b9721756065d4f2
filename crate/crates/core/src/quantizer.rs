use nalgebra::{Complex, DMatrix};

use crate::analysis::{momentum_power_action, Scheme};
use crate::apodization::{Apodization, ApodizationKind};
use crate::error::{Error, Result};
use crate::grid::{LineGrid, SampledFunction1D, SampledFunction2D, Warning};
use crate::mollifier::{smooth_indicator, IntervalSet, SmoothIndicator};
use crate::operator::OperatorMatrix;
use crate::scalar::{creal, czero, Real};
use crate::transforms::{
    fourier_1d_onto, partial_fourier_p, spectral_derivative, upsample, Dft, Direction, DEFAULT_DECAY_FLOOR,
};

/// Relative magnitude below which fiducial samples are skipped in kernel sums.
const PSI_CUTOFF: f64 = 1e-17;

/// Position-space weight `u(q)`.
///
/// Interval weights keep their exact transform so that convolutions against smooth
/// profiles are not limited by the sampling of a jump.
#[derive(Debug, Clone)]
pub enum PositionWeight<T: Real> {
    Sampled(SampledFunction1D<T>),
    Indicator(SmoothIndicator<T>),
}

impl<T: Real> From<SampledFunction1D<T>> for PositionWeight<T> {
    fn from(f: SampledFunction1D<T>) -> Self {
        PositionWeight::Sampled(f)
    }
}

impl<T: Real> From<SmoothIndicator<T>> for PositionWeight<T> {
    fn from(s: SmoothIndicator<T>) -> Self {
        PositionWeight::Indicator(s)
    }
}

impl<T: Real> PositionWeight<T> {
    pub fn samples(&self) -> &SampledFunction1D<T> {
        match self {
            PositionWeight::Sampled(f) => f,
            PositionWeight::Indicator(s) => &s.values,
        }
    }

    pub fn grid(&self) -> &LineGrid<T> {
        self.samples().grid()
    }

    /// `û` on the reciprocal grid.
    pub fn spectrum(&self) -> Vec<Complex<T>> {
        let dual = self.grid().dual();
        match self {
            PositionWeight::Sampled(f) => fourier_1d_onto(f, Direction::Forward, &dual)
                .expect("dual grid")
                .into_values(),
            PositionWeight::Indicator(s) => dual.points().into_iter().map(|p| s.spectrum(p)).collect(),
        }
    }

    /// Real values on the grid refined by `factor` (same `x_min`).
    pub fn refined(&self, factor: usize) -> Vec<T> {
        match self {
            PositionWeight::Sampled(f) => upsample(f.values(), factor).into_iter().map(|z| z.re).collect(),
            PositionWeight::Indicator(s) => {
                let g = s.values.grid();
                let h = g.dx() / T::idx(factor);
                (0..g.len() * factor).map(|j| s.eval(g.x_min() + T::idx(j) * h)).collect()
            }
        }
    }

    fn is_real(&self) -> bool {
        self.samples().is_real()
    }

    /// `F^{-1}[m(p)·û(p)]` back on the position grid.
    fn filtered(&self, multiplier: &[Complex<T>]) -> SampledFunction1D<T> {
        let grid = *self.grid();
        let dual = grid.dual();
        let spec: Vec<Complex<T>> = self.spectrum().iter().zip(multiplier).map(|(a, b)| a * b).collect();
        let out = Dft::new().apply(&spec, &dual, &grid, Direction::Inverse);
        SampledFunction1D::new(grid, out).expect("finite")
    }
}

/// `(u ∗ g)(x)`; exact in `u` for interval weights, discrete otherwise.
pub fn weight_convolve<T: Real>(u: &PositionWeight<T>, g: &SampledFunction1D<T>) -> Result<SampledFunction1D<T>> {
    if !u.grid().matches(g.grid()) {
        return Err(Error::GridMismatch("weight and profile grids differ".into()));
    }
    let out = match u {
        PositionWeight::Sampled(f) => crate::transforms::convolve_1d(f, g)?,
        PositionWeight::Indicator(_) => {
            let dual = g.grid().dual();
            let root = creal(T::two_pi().sqrt());
            let gh: Vec<Complex<T>> = fourier_1d_onto(g, Direction::Forward, &dual)?
                .values()
                .iter()
                .map(|z| z * root)
                .collect();
            let mut out = u.filtered(&gh);
            if g.edge_ratio() > T::lit(DEFAULT_DECAY_FLOOR) {
                out = out.with_warning(Warning::EdgeDecay {
                    context: "weight_convolve profile",
                    ratio: g.edge_ratio().to_f64(),
                });
            }
            out
        }
    };
    Ok(if u.is_real() && g.is_real() { out.into_real_part() } else { out })
}

fn check_grids<T: Real>(apod: &Apodization<T>, grid: &LineGrid<T>) -> Result<()> {
    if apod.position_grid().matches(grid) {
        Ok(())
    } else {
        Err(Error::GridMismatch("apodization grid differs from the operator grid".into()))
    }
}

/// Window `w_u = u ∗ γ`; the weight itself for Weyl-Wigner.
pub fn window_function<T: Real>(u: &PositionWeight<T>, apod: &Apodization<T>) -> Result<SampledFunction1D<T>> {
    check_grids(apod, u.grid())?;
    match apod.kind {
        ApodizationKind::WeylWigner => Ok(u.samples().clone()),
        ApodizationKind::PureState => weight_convolve(u, &apod.gamma),
    }
}

/// `ŵ(p) = û(p)·Π(0, p)` on the momentum axis.
pub fn window_fourier<T: Real>(u: &PositionWeight<T>, apod: &Apodization<T>) -> Result<SampledFunction1D<T>> {
    check_grids(apod, u.grid())?;
    let n = u.grid().len();
    let pi0 = apod.pi_values.row(n / 2);
    let values = u.spectrum().iter().zip(pi0.values()).map(|(a, b)| a * b).collect();
    SampledFunction1D::new(apod.grid().p_axis, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfilePath {
    /// Convolutions of the weight with products of the fiducial state and its derivatives.
    PureState,
    /// `w = u`, `c = -(i/2)u′`, `d = -u″/4`, `b = 0`.
    WeylWignerClosedForm,
}

/// Coefficient functions of `A_{u·q}`, `A_{u·p}`, `A_{u·p²}`:
/// `A_{uq} = wQ + b`, `A_{up} = wP + c`, `A_{up²} = wP² + 2cP + d` before symmetrization.
#[derive(Debug, Clone)]
pub struct CoefficientProfiles<T: Real> {
    pub w: SampledFunction1D<T>,
    pub b: SampledFunction1D<T>,
    pub c: SampledFunction1D<T>,
    pub d: SampledFunction1D<T>,
    pub path: ProfilePath,
}

impl<T: Real> CoefficientProfiles<T> {
    /// `c + (i/2)w′`, real for any pure state.
    pub fn c_tilde(&self) -> SampledFunction1D<T> {
        let wp = spectral_derivative(&self.w, 1);
        let vals = self
            .c
            .values()
            .iter()
            .zip(wp.values())
            .map(|(c, w)| c + Complex::new(T::zero(), T::lit(0.5)) * w)
            .collect();
        SampledFunction1D::new(*self.w.grid(), vals).expect("finite")
    }

    /// `i c′ + d`, real for any pure state.
    pub fn second_order_potential(&self) -> SampledFunction1D<T> {
        let cp = spectral_derivative(&self.c, 1);
        let vals = cp
            .values()
            .iter()
            .zip(self.d.values())
            .map(|(c, d)| Complex::new(-c.im, c.re) + d)
            .collect();
        SampledFunction1D::new(*self.w.grid(), vals).expect("finite")
    }

    /// Diagonal of `[A_q, A_p]`: `i·w·(w′x + w + b′)`.
    pub fn deformed_ccr(&self) -> Vec<Complex<T>> {
        let wp = spectral_derivative(&self.w, 1);
        let bp = spectral_derivative(&self.b, 1);
        let g = self.w.grid();
        (0..g.len())
            .map(|j| {
                let w = self.w.values()[j].re;
                let f = wp.values()[j].re * g.point(j) + w + bp.values()[j].re;
                Complex::new(T::zero(), w * f)
            })
            .collect()
    }

    /// `i·(w′x + w + w·b′)`, the commutator as sometimes written without the outer factor `w`.
    pub fn deformed_ccr_unweighted(&self) -> Vec<Complex<T>> {
        let wp = spectral_derivative(&self.w, 1);
        let bp = spectral_derivative(&self.b, 1);
        let g = self.w.grid();
        (0..g.len())
            .map(|j| {
                let w = self.w.values()[j].re;
                let f = wp.values()[j].re * g.point(j) + w + w * bp.values()[j].re;
                Complex::new(T::zero(), f)
            })
            .collect()
    }
}

pub fn coefficient_profiles<T: Real>(u: &PositionWeight<T>, apod: &Apodization<T>) -> Result<CoefficientProfiles<T>> {
    check_grids(apod, u.grid())?;
    let grid = *u.grid();
    match apod.kind {
        ApodizationKind::WeylWigner => {
            let ip = |p: T| Complex::new(T::zero(), p);
            let dual = grid.dual();
            let nyquist = dual.x_min();
            let first: Vec<Complex<T>> = dual
                .points()
                .into_iter()
                .map(|p| if p == nyquist { czero() } else { ip(p) * T::lit(-0.5) * Complex::new(T::zero(), T::one()) })
                .collect();
            let second: Vec<Complex<T>> = dual.points().into_iter().map(|p| creal(p * p * T::lit(0.25))).collect();
            Ok(CoefficientProfiles {
                w: u.samples().clone(),
                b: SampledFunction1D::zeros(grid),
                c: u.filtered(&first),
                d: u.filtered(&second),
                path: ProfilePath::WeylWignerClosedForm,
            })
        }
        ApodizationKind::PureState => {
            let psi = apod.psi.as_ref().ok_or_else(|| Error::Unsupported("pure-state apodization without a state".into()))?;
            let d1 = spectral_derivative(psi, 1);
            let d2 = spectral_derivative(psi, 2);
            let v = psi.values();
            let prod = |other: &[Complex<T>]| -> Result<SampledFunction1D<T>> {
                SampledFunction1D::new(grid, v.iter().zip(other).map(|(a, b)| a * b.conj()).collect())
            };
            let xg = SampledFunction1D::new(
                grid,
                v.iter().enumerate().map(|(j, a)| creal(a.norm_sqr() * grid.point(j))).collect(),
            )?;
            let w = weight_convolve(u, &apod.gamma)?;
            let b = weight_convolve(u, &xg)?.scaled(creal(-T::one()));
            let c = weight_convolve(u, &prod(d1.values())?)?.scaled(Complex::new(T::zero(), -T::one()));
            let d = weight_convolve(u, &prod(d2.values())?)?.scaled(creal(-T::one()));
            Ok(CoefficientProfiles {
                w,
                b,
                c,
                d,
                path: ProfilePath::PureState,
            })
        }
    }
}

fn hermitian_sum<T: Real>(x: &DMatrix<Complex<T>>) -> DMatrix<Complex<T>> {
    x + x.adjoint()
}

fn diag_times<T: Real>(diag: &[T], m: &DMatrix<Complex<T>>, half: bool) -> DMatrix<Complex<T>> {
    let s = if half { T::lit(0.5) } else { T::one() };
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * (diag[i] * s))
}

/// Symmetrized profile assembly of `A_{u·pⁿ}`, `n ≤ 2`, with spectral `P`.
///
/// `n = 1`: `½{W,P} + c̃`; `n = 2`: `½{W,P²} + {c̃,P} + (ic′ + d)`, where `c̃ = c + (i/2)w′`.
pub fn quantize_u_pn<T: Real>(
    u: &PositionWeight<T>,
    n: u32,
    apod: &Apodization<T>,
    grid: &LineGrid<T>,
) -> Result<OperatorMatrix<T>> {
    if n > 2 {
        return Err(Error::Unsupported(format!("monomial degree {n}")));
    }
    let profiles = coefficient_profiles(u, apod)?;
    assemble(&profiles, n, grid)
}

pub(crate) fn assemble<T: Real>(profiles: &CoefficientProfiles<T>, n: u32, grid: &LineGrid<T>) -> Result<OperatorMatrix<T>> {
    let w = profiles.w.real_parts();
    let warnings = profiles.w.warnings().to_vec();
    let action = match n {
        0 => DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(w.len(), w.iter().map(|&v| creal(v)))),
        1 => {
            let p = momentum_power_action(grid, 1, Scheme::Spectral);
            let ct = profiles.c_tilde().real_parts();
            let mut a = hermitian_sum(&diag_times(&w, &p, true));
            for (j, v) in ct.iter().enumerate() {
                a[(j, j)] += creal(*v);
            }
            a
        }
        _ => {
            let p = momentum_power_action(grid, 1, Scheme::Spectral);
            let p2 = momentum_power_action(grid, 2, Scheme::Spectral);
            let ct = profiles.c_tilde().real_parts();
            let v = profiles.second_order_potential().real_parts();
            let mut a = hermitian_sum(&diag_times(&w, &p2, true)) + hermitian_sum(&diag_times(&ct, &p, false));
            for (j, x) in v.iter().enumerate() {
                a[(j, j)] += creal(*x);
            }
            a
        }
    };
    Ok(OperatorMatrix::from_action(*grid, action)?.with_warnings(warnings))
}

/// Kernel-route quantization of a phase-space function.
///
/// Pure states: `𝒜(x,x′) = (2π)^{-1/2} ∫ f̂_p(q, x′-x) ψ(x-q) ψ̄(x′-q) dq`.
/// Weyl-Wigner: `𝒜(x,x′) = (2π)^{-1/2} f̂_p((x+x′)/2, x′-x)`.
pub fn kernel<T: Real>(f: &SampledFunction2D<T>, apod: &Apodization<T>, grid: &LineGrid<T>) -> Result<OperatorMatrix<T>> {
    check_grids(apod, grid)?;
    if !f.grid().matches(apod.grid()) {
        return Err(Error::GridMismatch("symbol grid differs from the apodization grid".into()));
    }
    let fh = partial_fourier_p(f);
    let warnings = fh.warnings().to_vec();
    let n = grid.len();
    let half = n / 2;
    let inv_root = T::one() / T::two_pi().sqrt();
    let fv = fh.values();
    let mut k = DMatrix::from_element(n, n, czero());
    match apod.kind {
        ApodizationKind::PureState => {
            let psi = apod.psi.as_ref().ok_or_else(|| Error::KernelPathUnavailable("missing fiducial state".into()))?;
            let v = psi.values();
            let cut = psi.max_abs() * T::lit(PSI_CUTOFF);
            let dq = grid.dx();
            let mut active: Vec<(usize, Complex<T>)> = Vec::with_capacity(n);
            for kq in 0..n {
                active.clear();
                for i in 0..n {
                    // ψ(x_i - q_k) sits at index i - k + n/2
                    let m = i as i64 - kq as i64 + half as i64;
                    if (0..n as i64).contains(&m) {
                        let z = v[m as usize];
                        if z.norm_sqr().sqrt() > cut {
                            active.push((i, z));
                        }
                    }
                }
                for &(i, zi) in &active {
                    let zi = zi * dq * inv_root;
                    for &(j, zj) in &active {
                        let y = j as i64 - i as i64 + half as i64;
                        if !(0..n as i64).contains(&y) {
                            continue;
                        }
                        k[(i, j)] += fv[(kq, y as usize)] * zi * zj.conj();
                    }
                }
            }
        }
        ApodizationKind::WeylWigner => {
            let mut fine = DMatrix::from_element(2 * n, n, czero());
            for y in 0..n {
                let col: Vec<Complex<T>> = fv.column(y).iter().copied().collect();
                let up = upsample(&col, 2);
                fine.column_mut(y).copy_from_slice(&up);
            }
            for i in 0..n {
                for j in 0..n {
                    let y = j as i64 - i as i64 + half as i64;
                    if (0..n as i64).contains(&y) {
                        k[(i, j)] = fine[(i + j, y as usize)] * inv_root;
                    }
                }
            }
        }
    }
    Ok(OperatorMatrix::from_kernel(*grid, k)?.with_warnings(warnings))
}

/// Kernel-route quantization of `u(q)·pⁿ`: the `Pⁿ` kernel multiplied entrywise by
/// `G(x,x′) = ∫ u(q) ψ(x-q) ψ̄(x′-q) dq` (Weyl-Wigner: `u((x+x′)/2)`).
///
/// The `q` integral uses a grid refined by `refine` with trigonometric interpolation of `ψ`.
pub fn kernel_u_pn<T: Real>(
    u: &PositionWeight<T>,
    n: u32,
    apod: &Apodization<T>,
    grid: &LineGrid<T>,
    refine: usize,
) -> Result<OperatorMatrix<T>> {
    if n > 2 {
        return Err(Error::Unsupported(format!("monomial degree {n}")));
    }
    check_grids(apod, grid)?;
    if !u.grid().matches(grid) {
        return Err(Error::GridMismatch("weight grid differs from the operator grid".into()));
    }
    if !u.is_real() {
        return Err(Error::Unsupported("complex weight in kernel route".into()));
    }
    let len = grid.len();
    let g = match apod.kind {
        ApodizationKind::WeylWigner => {
            let uh = u.refined(2);
            DMatrix::from_fn(len, len, |i, j| creal(uh[i + j]))
        }
        ApodizationKind::PureState => {
            let r = refine.max(1);
            if !r.is_power_of_two() {
                return Err(Error::Unsupported(format!("refinement factor {r}")));
            }
            let psi = apod.psi.as_ref().ok_or_else(|| Error::KernelPathUnavailable("missing fiducial state".into()))?;
            let fine = upsample(psi.values(), r);
            let uf = u.refined(r);
            let m = len * r;
            let h = grid.dx() / T::idx(r);
            let offset = (m / 2) as i64;
            let at = |i: usize, s: usize| -> Complex<T> {
                let idx = (r * i) as i64 - s as i64 + offset;
                if (0..m as i64).contains(&idx) {
                    fine[idx as usize]
                } else {
                    czero()
                }
            };
            let re = DMatrix::from_fn(len, m, |i, s| at(i, s).re);
            let im = DMatrix::from_fn(len, m, |i, s| at(i, s).im);
            let weights: Vec<T> = uf.iter().map(|&v| v * h).collect();
            let scale_cols = |a: &DMatrix<T>| DMatrix::from_fn(len, m, |i, s| a[(i, s)] * weights[s]);
            let (re_w, im_w) = (scale_cols(&re), scale_cols(&im));
            let real_part = &re_w * re.transpose() + &im_w * im.transpose();
            let imag_part = &im_w * re.transpose() - &re_w * im.transpose();
            DMatrix::from_fn(len, len, |i, j| Complex::new(real_part[(i, j)], imag_part[(i, j)]))
        }
    };
    let pn = momentum_power_action(grid, n, Scheme::Spectral);
    let action = pn.component_mul(&g);
    OperatorMatrix::from_action(*grid, action)
}

/// Truncated position, momentum and kinetic observables for the interval weight `u_{E,σ}`.
#[derive(Debug, Clone)]
pub struct TruncatedObservables<T: Real> {
    pub position: OperatorMatrix<T>,
    pub momentum: OperatorMatrix<T>,
    pub kinetic: OperatorMatrix<T>,
    pub profiles: CoefficientProfiles<T>,
    pub weight: SmoothIndicator<T>,
}

pub fn truncated_observables<T: Real>(
    set: IntervalSet<T>,
    sigma: T,
    apod: &Apodization<T>,
    grid: &LineGrid<T>,
) -> Result<TruncatedObservables<T>> {
    let weight = smooth_indicator(set, sigma, grid)?;
    let u = PositionWeight::Indicator(weight.clone());
    let profiles = coefficient_profiles(&u, apod)?;
    let xs = grid.points();
    let diag: Vec<Complex<T>> = (0..grid.len())
        .map(|j| creal(profiles.w.values()[j].re * xs[j] + profiles.b.values()[j].re))
        .collect();
    let position = OperatorMatrix::multiplication(*grid, &diag)?;
    let momentum = assemble(&profiles, 1, grid)?;
    let kinetic = assemble(&profiles, 2, grid)?;
    Ok(TruncatedObservables {
        position,
        momentum,
        kinetic,
        profiles,
        weight,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceCheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub abs_err: T,
}

/// Compares `Tr A` with `(2π)^{-1} ∫∫ f dq dp`.
pub fn trace_check<T: Real>(a: &OperatorMatrix<T>, f: &SampledFunction2D<T>) -> TraceCheck<T> {
    let lhs = a.trace().re;
    let rhs = f.integral().re / T::two_pi();
    TraceCheck {
        lhs,
        rhs,
        abs_err: (lhs - rhs).abs(),
    }
}

pub use crate::operator::commutator;
