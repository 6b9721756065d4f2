use nalgebra::{Complex, RealField};
use rustfft::FftNum;

/// Floating-point scalar used by every numerical routine (`f32` or `f64`).
pub trait Real: RealField + FftNum + Copy {
    /// Converts an `f64` literal into the scalar type.
    fn lit(v: f64) -> Self {
        nalgebra::convert(v)
    }

    /// Lossy conversion to `f64`, used for reporting.
    fn to_f64(self) -> f64 {
        self.to_subset().unwrap_or(f64::NAN)
    }

    /// Converts an index or count.
    fn idx(v: usize) -> Self {
        Self::lit(v as f64)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub(crate) fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// `exp(2πi·t)` with `t` reduced to the principal cycle before scaling.
pub(crate) fn cis_cycles<T: Real>(t: T) -> Complex<T> {
    let r = t - t.round();
    cis(r * T::two_pi())
}

/// `exp(2πi·num/den)` computed from exact integer arithmetic.
pub(crate) fn cis_ratio<T: Real>(num: i64, den: i64) -> Complex<T> {
    let r = num.rem_euclid(den);
    cis_cycles(T::lit(r as f64) / T::lit(den as f64))
}

pub(crate) fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

pub(crate) fn creal<T: Real>(v: T) -> Complex<T> {
    Complex::new(v, T::zero())
}
