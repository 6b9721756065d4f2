use std::sync::OnceLock;

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::grid::{LineGrid, SampledFunction1D, Warning};
use crate::scalar::{cis, Real};
use crate::transforms::convolve_1d;

/// Minimum number of grid cells per mollifier width.
pub const MIN_CELLS_PER_SIGMA: usize = 4;

/// Open interval `(alpha, beta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalSet<T> {
    pub alpha: T,
    pub beta: T,
}

impl<T: Real> IntervalSet<T> {
    pub fn new(alpha: T, beta: T) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) || alpha >= beta {
            return Err(Error::DegenerateInterval {
                min: alpha.to_f64(),
                max: beta.to_f64(),
            });
        }
        Ok(Self { alpha, beta })
    }

    pub fn width(&self) -> T {
        self.beta - self.alpha
    }

    pub fn midpoint(&self) -> T {
        (self.alpha + self.beta) * T::lit(0.5)
    }

    pub fn contains(&self, x: T) -> bool {
        x > self.alpha && x < self.beta
    }

    /// Distance from `x` to the nearer end point.
    pub fn boundary_distance(&self, x: T) -> T {
        (x - self.alpha).abs().min((x - self.beta).abs())
    }
}

fn bump_profile(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

/// Continuum mass of `exp(-1/(1 - x²))` on `(-1, 1)`.
pub fn bump_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| 2.0 * quadrature::double_exponential::integrate(bump_profile, 0.0, 1.0, 1e-16).integral)
}

/// Continuum-normalized standard bump.
pub fn bump(x: f64) -> f64 {
    bump_profile(x) / bump_mass()
}

/// Distribution function `B(t) = ∫_{-1}^{t} ω`.
pub fn bump_cdf(t: f64) -> f64 {
    if t <= -1.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let tail = |s: f64| quadrature::double_exponential::integrate(bump_profile, s, 1.0, 1e-17).integral / bump_mass();
    if t > 0.0 {
        1.0 - tail(t)
    } else {
        tail(-t)
    }
}

/// Characteristic function `Ω(k) = ∫ ω(s) cos(ks) ds`, with `Ω(0) = 1`.
pub fn bump_characteristic(k: f64) -> f64 {
    const NODES: usize = 2048;
    static SAMPLES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    let samples = SAMPLES.get_or_init(|| {
        let h = 1.0 / NODES as f64;
        (1..NODES)
            .map(|j| {
                let s = j as f64 * h;
                (s, bump(s) * h)
            })
            .collect()
    });
    let centre = bump(0.0) / NODES as f64;
    centre + 2.0 * samples.iter().map(|&(s, w)| w * (k * s).cos()).sum::<f64>()
}

/// Standard bump `c·exp(-1/(1 - x²))` with `c` chosen so the grid sum equals one.
pub fn bump_mollifier<T: Real>(grid: &LineGrid<T>) -> Result<SampledFunction1D<T>> {
    if grid.x_min() > -T::one() || grid.point(grid.len() - 1) < T::one() {
        return Err(Error::OutOfGrid("mollifier support (-1, 1)".into()));
    }
    let raw: Vec<f64> = grid.points().iter().map(|x| bump_profile(x.to_f64())).collect();
    let mass = raw.iter().sum::<f64>() * grid.dx().to_f64();
    let vals: Vec<T> = raw.iter().map(|v| T::lit(v / mass)).collect();
    SampledFunction1D::from_real(*grid, &vals)
}

/// `ω_σ(x) = σ^{-1} ω(x/σ)` resampled by linear interpolation and renormalized to unit mass.
pub fn scaled_mollifier<T: Real>(omega: &SampledFunction1D<T>, sigma: T) -> Result<SampledFunction1D<T>> {
    let grid = *omega.grid();
    check_resolution(sigma, grid.dx())?;
    let re = omega.real_parts();
    let n = grid.len();
    let interp = |x: T| -> T {
        let t = (x - grid.x_min()) / grid.dx();
        if t < T::zero() || t > T::idx(n - 1) {
            return T::zero();
        }
        let j = t.floor().to_f64() as usize;
        if j + 1 >= n {
            return re[n - 1];
        }
        let frac = t - T::idx(j);
        re[j] * (T::one() - frac) + re[j + 1] * frac
    };
    let raw: Vec<T> = grid.points().iter().map(|&x| interp(x / sigma) / sigma).collect();
    let mass = raw.iter().fold(T::zero(), |a, &v| a + v) * grid.dx();
    if mass <= T::zero() {
        return Err(Error::EmptyTable("scaled mollifier has no mass on the grid".into()));
    }
    let vals: Vec<T> = raw.iter().map(|&v| v / mass).collect();
    SampledFunction1D::from_real(grid, &vals)
}

fn check_resolution<T: Real>(sigma: T, dx: T) -> Result<()> {
    if !(sigma > T::zero()) || sigma < T::idx(MIN_CELLS_PER_SIGMA) * dx {
        return Err(Error::UnderResolved {
            sigma: sigma.to_f64(),
            dx: dx.to_f64(),
            min_cells: MIN_CELLS_PER_SIGMA,
        });
    }
    Ok(())
}

/// Smoothed indicator `u_{E,σ} = ω_σ ∗ χ_E` together with its exact point values and spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothIndicator<T: Real> {
    pub set: IntervalSet<T>,
    pub sigma: T,
    pub values: SampledFunction1D<T>,
}

impl<T: Real> SmoothIndicator<T> {
    /// Exact value at an arbitrary point; for `σ = 0` the open-interval indicator.
    pub fn eval(&self, x: T) -> T {
        if self.sigma == T::zero() {
            return if self.set.contains(x) { T::one() } else { T::zero() };
        }
        let s = self.sigma.to_f64();
        let xf = x.to_f64();
        let lo = bump_cdf((xf - self.set.alpha.to_f64()) / s);
        let hi = bump_cdf((xf - self.set.beta.to_f64()) / s);
        T::lit((lo - hi).clamp(0.0, 1.0))
    }

    /// Continuum transform `û(p) = (2π)^{-1/2} ∫ u(x) e^{-ixp} dx`.
    pub fn spectrum(&self, p: T) -> Complex<T> {
        let w = self.set.width();
        let half = w * T::lit(0.5) * p;
        let sinc = if half.abs() < T::lit(1e-8) {
            T::one() - half * half / T::lit(6.0)
        } else {
            half.sin() / half
        };
        let smooth = if self.sigma == T::zero() {
            T::one()
        } else {
            T::lit(bump_characteristic((self.sigma * p).to_f64()))
        };
        cis(-p * self.set.midpoint()) * (w * sinc * smooth / T::two_pi().sqrt())
    }

    pub fn is_smooth(&self) -> bool {
        self.sigma > T::zero()
    }
}

fn check_inside<T: Real>(set: &IntervalSet<T>, sigma: T, grid: &LineGrid<T>) -> Result<()> {
    if !grid.contains(set.alpha - sigma) || !grid.contains(set.beta + sigma) {
        return Err(Error::OutOfGrid(format!(
            "interval [{}, {}]",
            (set.alpha - sigma).to_f64(),
            (set.beta + sigma).to_f64()
        )));
    }
    Ok(())
}

/// `χ_E` on the grid: a node counts as inside iff it lies in the open interval.
pub fn indicator_samples<T: Real>(set: &IntervalSet<T>, grid: &LineGrid<T>) -> SampledFunction1D<T> {
    SampledFunction1D::from_real_fn(*grid, |x| if set.contains(x) { T::one() } else { T::zero() })
        .expect("indicator is finite")
}

/// `u_{E,σ}` sampled from the exact distribution function of the standard bump.
pub fn smooth_indicator<T: Real>(set: IntervalSet<T>, sigma: T, grid: &LineGrid<T>) -> Result<SmoothIndicator<T>> {
    if !(sigma >= T::zero()) || !sigma.is_finite() {
        return Err(Error::Unsupported(format!("negative width {}", sigma.to_f64())));
    }
    check_inside(&set, sigma, grid)?;
    if sigma == T::zero() {
        return Ok(SmoothIndicator {
            set,
            sigma,
            values: indicator_samples(&set, grid),
        });
    }
    let mut out = SmoothIndicator {
        set,
        sigma,
        values: SampledFunction1D::zeros(*grid),
    };
    let vals: Vec<T> = grid.points().iter().map(|&x| out.eval(x)).collect();
    let mut values = SampledFunction1D::from_real(*grid, &vals)?;
    if sigma < T::idx(MIN_CELLS_PER_SIGMA) * grid.dx() {
        values = values.with_warning(Warning::UnderResolved {
            sigma: sigma.to_f64(),
            dx: grid.dx().to_f64(),
        });
    }
    out.values = values;
    Ok(out)
}

/// `ω_σ ∗ χ_E` by discrete convolution with a caller-supplied unit-mass mollifier on the same grid.
pub fn smooth_indicator_with<T: Real>(
    set: IntervalSet<T>,
    sigma: T,
    omega: &SampledFunction1D<T>,
) -> Result<SmoothIndicator<T>> {
    let grid = *omega.grid();
    check_inside(&set, sigma, &grid)?;
    let scaled = scaled_mollifier(omega, sigma)?;
    let chi = indicator_samples(&set, &grid);
    let values = convolve_1d(&scaled, &chi)?.into_real_part();
    Ok(SmoothIndicator { set, sigma, values })
}

/// `ln a(x)` for `a(x) = ∫_α^β e^{-(t-x)²} dt`, accurate far into both tails.
pub fn gaussian_window_ln(alpha: f64, beta: f64, x: f64) -> f64 {
    let half_root_pi = 0.5 * std::f64::consts::PI.sqrt();
    let u1 = alpha - x;
    let u2 = beta - x;
    let tail = |v1: f64, v2: f64| {
        // erfc(v1) - erfc(v2) for 0 ≤ v1 < v2
        let inner = puruspe::erfcx(v1) - (v1 * v1 - v2 * v2).exp() * puruspe::erfcx(v2);
        half_root_pi.ln() - v1 * v1 + inner.ln()
    };
    if u1 >= 0.0 {
        tail(u1, u2)
    } else if u2 <= 0.0 {
        tail(-u2, -u1)
    } else {
        (half_root_pi * (puruspe::erf(u2) + puruspe::erf(-u1))).ln()
    }
}

/// `a(x) = (√π/2)[erf(β - x) - erf(α - x)]`, the Gaussian-smoothed indicator of `E`.
pub fn gaussian_window_closed_form<T: Real>(set: &IntervalSet<T>, grid: &LineGrid<T>) -> Result<SampledFunction1D<T>> {
    check_inside(set, T::zero(), grid)?;
    let (a, b) = (set.alpha.to_f64(), set.beta.to_f64());
    SampledFunction1D::from_real_fn(*grid, |x| T::lit(gaussian_window_ln(a, b, x.to_f64()).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> LineGrid<f64> {
        LineGrid::centered(6.0, 512).unwrap()
    }

    fn e02() -> IntervalSet<f64> {
        IntervalSet::new(0.0, 2.0).unwrap()
    }

    #[test]
    fn interval_validation() {
        assert!(IntervalSet::new(2.0, 0.0).is_err());
        assert!(IntervalSet::new(0.0, f64::NAN).is_err());
    }

    #[test]
    fn bump_has_compact_support_and_unit_mass() {
        let g = grid();
        let w = bump_mollifier(&g).unwrap();
        assert!((w.integral().re - 1.0).abs() < 1e-12);
        let j = g.nearest_index(1.0).unwrap();
        assert_eq!(w.values()[j + 1].re, 0.0);
        assert_eq!(w.values()[g.nearest_index(-1.0).unwrap() - 1].re, 0.0);
        let small = LineGrid::centered(0.5, 16).unwrap();
        assert!(bump_mollifier(&small).is_err());
    }

    #[test]
    fn scaled_mollifier_guards_resolution() {
        let g = grid();
        let w = bump_mollifier(&g).unwrap();
        let err = scaled_mollifier(&w, 2.0 * g.dx()).unwrap_err();
        assert!(matches!(err, Error::UnderResolved { .. }));
        let same = scaled_mollifier(&w, 1.0).unwrap();
        assert!(same.max_abs_diff(&w).unwrap() < 1e-12);
        for s in [0.5, 0.1] {
            let ws = scaled_mollifier(&w, s).unwrap();
            assert!((ws.integral().re - 1.0).abs() < 1e-12);
            let last = (0..g.len()).rev().find(|&j| ws.values()[j].re > 0.0).unwrap();
            assert!((g.point(last) - s).abs() <= g.dx());
        }
    }

    #[test]
    fn sigma_zero_is_sampled_indicator() {
        let g = grid();
        let u = smooth_indicator(e02(), 0.0, &g).unwrap();
        for (j, z) in u.values.values().iter().enumerate() {
            let x = g.point(j);
            let want = if x > 0.0 && x < 2.0 { 1.0 } else { 0.0 };
            assert_eq!(z.re, want);
        }
    }

    #[test]
    fn interior_saturates_and_edges_converge() {
        let g = grid();
        for s in [0.4, 0.2, 0.1] {
            let u = smooth_indicator(e02(), s, &g).unwrap();
            let j = g.nearest_index(1.0).unwrap();
            assert!((u.values.values()[j].re - 1.0).abs() < 1e-12);
            for (j, z) in u.values.values().iter().enumerate() {
                let x = g.point(j);
                let chi = if x > 0.0 && x < 2.0 { 1.0 } else { 0.0 };
                assert!(z.re >= 0.0 && z.re <= 1.0 + 1e-12);
                if e02().boundary_distance(x) > 2.0 * s {
                    assert!((z.re - chi).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn interval_must_fit_the_grid() {
        let g = grid();
        let e = IntervalSet::new(0.0, 5.9).unwrap();
        assert!(matches!(smooth_indicator(e, 0.2, &g), Err(Error::OutOfGrid(_))));
    }

    #[test]
    fn characteristic_function_oracle() {
        // Ω(k) against direct adaptive quadrature
        for k in [0.0, 0.7, 3.0, 12.0] {
            let direct = 2.0
                * quadrature::double_exponential::integrate(|s| bump(s) * (k * s).cos(), 0.0, 1.0, 1e-15).integral;
            assert!((bump_characteristic(k) - direct).abs() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn gaussian_window_maximum_and_tails() {
        let g = LineGrid::centered(16.0, 1024).unwrap();
        let a = gaussian_window_closed_form(&e02(), &g).unwrap();
        let (jmax, vmax) = a
            .values()
            .iter()
            .enumerate()
            .fold((0, 0.0), |(j0, m), (j, z)| if z.re > m { (j, z.re) } else { (j0, m) });
        assert!((g.point(jmax) - 1.0).abs() < 1e-12);
        let oracle = quadrature::double_exponential::integrate(|t: f64| (-t * t).exp(), -1.0, 1.0, 1e-15).integral;
        assert!((vmax - oracle).abs() < 1e-13);
        assert!(a.values().iter().all(|z| z.re > 0.0 && z.re <= 2.0));
        assert!(gaussian_window_ln(0.0, 2.0, 12.0) > f64::NEG_INFINITY);
        assert!(gaussian_window_ln(0.0, 2.0, 12.0).exp() > 0.0);
    }

    #[test]
    fn gaussian_window_log_matches_quadrature_in_tails() {
        for x in [-9.0, -3.5, 0.3, 1.0, 2.7, 6.0, 11.0] {
            let direct = quadrature::double_exponential::integrate(|t: f64| (-(t - x) * (t - x)).exp(), 0.0, 2.0, 1e-300).integral;
            let rel = (gaussian_window_ln(0.0, 2.0, x) - direct.ln()).abs();
            assert!(rel < 1e-9, "x={x} rel={rel}");
        }
    }
}
