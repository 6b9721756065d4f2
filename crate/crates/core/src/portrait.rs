use nalgebra::Complex;

use crate::apodization::{displace, Apodization, ApodizationKind};
use crate::error::{Error, Result};
use crate::grid::SampledFunction2D;
use crate::operator::OperatorMatrix;
use crate::scalar::Real;
use crate::transforms::convolve_2d_linear;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortraitPath {
    TraceForm,
    ConvolutionForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortraitSample<T> {
    pub q: T,
    pub p: T,
    pub value: Complex<T>,
}

#[derive(Debug, Clone)]
pub enum PortraitValues<T: Real> {
    Grid(SampledFunction2D<T>),
    Points(Vec<PortraitSample<T>>),
}

/// Lower symbol `f̌` of a quantized observable.
#[derive(Debug, Clone)]
pub struct Portrait<T: Real> {
    pub values: PortraitValues<T>,
    pub source: String,
    pub path: PortraitPath,
}

impl<T: Real> Portrait<T> {
    pub fn grid_values(&self) -> Option<&SampledFunction2D<T>> {
        match &self.values {
            PortraitValues::Grid(g) => Some(g),
            PortraitValues::Points(_) => None,
        }
    }

    pub fn samples(&self) -> Option<&[PortraitSample<T>]> {
        match &self.values {
            PortraitValues::Points(p) => Some(p),
            PortraitValues::Grid(_) => None,
        }
    }
}

fn describe<T: Real>(apod: &Apodization<T>) -> String {
    match apod.kind {
        ApodizationKind::WeylWigner => "weyl-wigner apodization".into(),
        ApodizationKind::PureState => "pure-state apodization".into(),
    }
}

/// `f̌ = (2π)^{-1} 𝔉̄_s[Π·Π̃] ∗ f` on the grid of `f`; the identity for Weyl-Wigner.
pub fn portrait_convolution<T: Real>(f: &SampledFunction2D<T>, apod: &Apodization<T>) -> Result<Portrait<T>> {
    if !f.grid().matches(apod.grid()) {
        return Err(Error::GridMismatch("symbol grid differs from the apodization grid".into()));
    }
    let values = match apod.kind {
        ApodizationKind::WeylWigner => f.clone(),
        ApodizationKind::PureState => convolve_2d_linear(apod.autocorrelation_kernel(), f)?,
    };
    Ok(Portrait {
        values: PortraitValues::Grid(values),
        source: format!("convolution portrait, {}", describe(apod)),
        path: PortraitPath::ConvolutionForm,
    })
}

/// `f̌(q,p) = ⟨q,p|A|q,p⟩` with `|q,p⟩ = U(q,p)ψ`, at the requested points.
pub fn portrait_trace<T: Real>(
    a: &OperatorMatrix<T>,
    apod: &Apodization<T>,
    points: &[(T, T)],
) -> Result<Portrait<T>> {
    let psi = match (apod.kind, apod.psi.as_ref()) {
        (ApodizationKind::PureState, Some(psi)) => psi,
        _ => return Err(Error::Unsupported("trace portrait needs a fiducial state".into())),
    };
    if !a.grid().matches(psi.grid()) {
        return Err(Error::GridMismatch("operator grid differs from the state grid".into()));
    }
    let samples = points
        .iter()
        .map(|&(q, p)| {
            let phi = displace(psi, q, p);
            Ok(PortraitSample {
                q,
                p,
                value: a.expectation(&phi)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Portrait {
        values: PortraitValues::Points(samples),
        source: format!("trace portrait, {}", describe(apod)),
        path: PortraitPath::TraceForm,
    })
}

/// Minimum over the grid of `Tr(𝔔(q,p)𝔔(0,0)) = |Π(q,p)|²` for a rank-one fiducial.
pub fn coherent_overlap_min<T: Real>(apod: &Apodization<T>) -> T {
    apod.pi_values
        .values()
        .iter()
        .fold(T::max_value().unwrap_or(T::one()), |m, z| m.min(z.norm_sqr()))
}
