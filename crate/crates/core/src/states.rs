use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::grid::{LineGrid, SampledFunction1D};
use crate::scalar::Real;

/// Harmonic-oscillator ground state `π^{-1/4} e^{-x²/2}`.
pub fn gaussian_ground<T: Real>(grid: &LineGrid<T>) -> SampledFunction1D<T> {
    let c = T::pi().powf(T::lit(-0.25));
    SampledFunction1D::from_real_fn(*grid, |x| c * (-x * x * T::lit(0.5)).exp()).expect("finite")
}

/// First excited oscillator state `π^{-1/4} √2 x e^{-x²/2}`.
pub fn hermite_1<T: Real>(grid: &LineGrid<T>) -> SampledFunction1D<T> {
    let c = T::pi().powf(T::lit(-0.25)) * T::lit(2.0).sqrt();
    SampledFunction1D::from_real_fn(*grid, |x| c * x * (-x * x * T::lit(0.5)).exp()).expect("finite")
}

/// Normalized Gaussian packet centered at `x0` with width `s` and mean momentum `k0`.
pub fn gaussian_packet<T: Real>(grid: &LineGrid<T>, x0: T, s: T, k0: T) -> SampledFunction1D<T> {
    let c = (T::pi() * s * s).powf(T::lit(-0.25));
    SampledFunction1D::from_fn(*grid, |x| {
        let d = (x - x0) / s;
        Complex::new((k0 * x).cos(), (k0 * x).sin()) * (c * (-d * d * T::lit(0.5)).exp())
    })
    .expect("finite")
}

/// Rescales to unit grid norm.
pub fn normalize<T: Real>(f: &SampledFunction1D<T>) -> Result<SampledFunction1D<T>> {
    let n = f.l2_norm();
    if n == T::zero() {
        return Err(Error::NotNormalized { norm: 0.0 });
    }
    Ok(f.scaled(Complex::new(T::one() / n, T::zero())))
}

/// Linear interpolation of tabulated `(x, value)` pairs onto `grid`, zero outside the table.
pub fn from_table<T: Real>(grid: &LineGrid<T>, rows: &[(T, T)]) -> Result<SampledFunction1D<T>> {
    if rows.is_empty() {
        return Err(Error::EmptyTable("state table".into()));
    }
    let mut rows = rows.to_vec();
    rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    SampledFunction1D::from_real_fn(*grid, |x| {
        let idx = rows.partition_point(|r| r.0 <= x);
        if idx == 0 || idx == rows.len() {
            return if idx > 0 && x == rows[idx - 1].0 { rows[idx - 1].1 } else { T::zero() };
        }
        let (x0, y0) = rows[idx - 1];
        let (x1, y1) = rows[idx];
        if x1 == x0 {
            return y0;
        }
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_normalized() {
        let g = LineGrid::<f64>::centered(12.0, 256).unwrap();
        assert!((gaussian_ground(&g).l2_norm() - 1.0).abs() < 1e-13);
        assert!((hermite_1(&g).l2_norm() - 1.0).abs() < 1e-13);
        assert!((gaussian_packet(&g, 1.0, 0.5, 2.0).l2_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn table_interpolation() {
        let g = LineGrid::<f64>::centered(4.0, 16).unwrap();
        let f = from_table(&g, &[(-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)]).unwrap();
        assert_eq!(f.values()[8].re, 1.0);
        assert_eq!(f.values()[10].re, 0.0);
        assert!((f.values()[9].re - 0.5).abs() < 1e-15);
        assert_eq!(f.values()[0].re, 0.0);
        assert!(from_table::<f64>(&g, &[]).is_err());
    }
}
